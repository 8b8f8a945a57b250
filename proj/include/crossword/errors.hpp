#pragma once

#include <stdexcept>
#include <string>

namespace crossword {

// Error classes map to CLI exit codes: data/format errors exit 3,
// service errors exit 4 (usage errors are handled by the CLI parser).
enum class ErrorClass { data = 3, service = 4 };

class Error : public std::runtime_error {
public:
  Error(ErrorClass cls, const std::string& message)
      : std::runtime_error(message), class_(cls) {}

  ErrorClass error_class() const noexcept { return class_; }
  int exit_code() const noexcept { return static_cast<int>(class_); }

private:
  ErrorClass class_;
};

#define CROSSWORD_DEFINE_ERROR(Name, Class)                   \
  class Name : public Error {                                 \
  public:                                                     \
    explicit Name(const std::string& message)                 \
        : Error(ErrorClass::Class, #Name ": " + message) {}   \
  }

CROSSWORD_DEFINE_ERROR(MaskCollision, data);
CROSSWORD_DEFINE_ERROR(TooFewSentences, data);
CROSSWORD_DEFINE_ERROR(InvalidRatio, data);
CROSSWORD_DEFINE_ERROR(DimensionMismatch, data);
CROSSWORD_DEFINE_ERROR(SentenceCountMismatch, data);
CROSSWORD_DEFINE_ERROR(CorruptStream, data);
CROSSWORD_DEFINE_ERROR(InvalidDistribution, data);
CROSSWORD_DEFINE_ERROR(ZeroWords, data);
CROSSWORD_DEFINE_ERROR(UnknownSymbol, data);
CROSSWORD_DEFINE_ERROR(NotErgodic, data);
CROSSWORD_DEFINE_ERROR(NoConvergence, data);
CROSSWORD_DEFINE_ERROR(EmptyCorpus, data);
CROSSWORD_DEFINE_ERROR(NotTrained, data);
CROSSWORD_DEFINE_ERROR(ShapeMismatch, data);
CROSSWORD_DEFINE_ERROR(AlignmentMismatch, data);
CROSSWORD_DEFINE_ERROR(ServiceUnavailable, service);

#undef CROSSWORD_DEFINE_ERROR

}  // namespace crossword
