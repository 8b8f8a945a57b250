#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "crossword/corpus.hpp"
#include "crossword/errors.hpp"

namespace crossword {

inline constexpr std::uint32_t kPadId = 0;
inline constexpr std::uint32_t kMaskId = 1;
inline constexpr std::uint32_t kOovId = 2;
inline constexpr std::uint32_t kFirstWordId = 3;
inline constexpr std::size_t kWindowLength = 30;
inline constexpr std::size_t kWordEmbeddingDim = 128;

/// Word <-> id association. Ids 0..2 are reserved (PAD, MASK, OOV); word
/// ids start at 3 and follow lexicographic order, so smaller id means
/// lexicographically smaller word.
class Vocabulary {
public:
  Vocabulary() = default;

  explicit Vocabulary(std::vector<std::string> sorted_words)
      : words_(std::move(sorted_words)) {
    for (std::uint32_t i = 0; i < words_.size(); ++i)
      ids_[words_[i]] = kFirstWordId + i;
  }

  static Vocabulary from_text(const Text& text) {
    std::set<std::string> seen;
    for (const Sentence& s : text.sentences) {
      for (const Token& t : s.tokens) {
        if (t.kind == TokenKind::word) seen.insert(t.normalized);
      }
    }
    return Vocabulary(std::vector<std::string>(seen.begin(), seen.end()));
  }

  std::uint32_t id_of(const std::string& word) const {
    const auto it = ids_.find(word);
    return it == ids_.end() ? kOovId : it->second;
  }

  const std::string& word_of(std::uint32_t id) const {
    static const std::string reserved[] = {"<pad>", "<mask>", "<oov>"};
    if (id < kFirstWordId) return reserved[id];
    return words_.at(id - kFirstWordId);
  }

  std::size_t word_count() const { return words_.size(); }
  std::size_t id_space() const { return words_.size() + kFirstWordId; }
  const std::vector<std::string>& words() const { return words_; }

private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

// A fixed-length slice of a sentence's word stream. mask_positions are
// 1-based word positions within the window, the same convention as the
// per-sentence position sets elsewhere.
struct TokenWindow {
  std::array<std::uint32_t, kWindowLength> ids{};
  std::vector<std::size_t> mask_positions;
};

/// Sinusoidal positional encoding: entry z (1-based, z = 1..d) is
/// sin(10^(-4z/d) * pos) for even z and cos(10^(-4(z-1)/d) * pos) for
/// odd z.
inline std::vector<double> positional_encoding(std::size_t pos, std::size_t d) {
  std::vector<double> pe(d);
  const double dd = static_cast<double>(d);
  for (std::size_t z = 1; z <= d; ++z) {
    const double p = static_cast<double>(pos);
    if (z % 2 == 0) {
      pe[z - 1] = std::sin(std::pow(10.0, -4.0 * static_cast<double>(z) / dd) * p);
    } else {
      pe[z - 1] = std::cos(std::pow(10.0, -4.0 * static_cast<double>(z - 1) / dd) * p);
    }
  }
  return pe;
}

/// Positions 1..length as rows; d columns.
inline std::vector<std::vector<double>> positional_encoding_matrix(
    std::size_t length = kWindowLength, std::size_t d = kWordEmbeddingDim) {
  std::vector<std::vector<double>> rows;
  rows.reserve(length);
  for (std::size_t pos = 1; pos <= length; ++pos)
    rows.push_back(positional_encoding(pos, d));
  return rows;
}

/// Cross-entropy between one-hot labels and predicted distributions,
/// summed over (position, symbol). Includes the complementary
/// (1-q) log2(1-p) term by default; predictions are clamped away from 0
/// and 1 before taking logs.
inline double cross_entropy(const std::vector<std::vector<double>>& labels,
                            const std::vector<std::vector<double>>& predictions,
                            bool include_complement_term = true) {
  if (labels.size() != predictions.size())
    throw ShapeMismatch("label rows " + std::to_string(labels.size()) +
                        " vs prediction rows " +
                        std::to_string(predictions.size()));
  constexpr double kEps = 1e-12;
  double total = 0.0;
  for (std::size_t n = 0; n < labels.size(); ++n) {
    if (labels[n].size() != predictions[n].size())
      throw ShapeMismatch("row " + std::to_string(n) + " width mismatch");
    for (std::size_t k = 0; k < labels[n].size(); ++k) {
      const double q = labels[n][k];
      const double p = std::min(1.0 - kEps, std::max(kEps, predictions[n][k]));
      total -= q * std::log2(p);
      if (include_complement_term) total -= (1.0 - q) * std::log2(1.0 - p);
    }
  }
  return total;
}

/// Cut a sentence's word stream (punctuation dropped, masks kept) into
/// zero-padded windows of 30 ids; sentences longer than 30 words span
/// consecutive windows.
inline std::vector<TokenWindow> windows_from_sentence(const Sentence& sentence,
                                                      const Vocabulary& vocab) {
  std::vector<std::uint32_t> stream;
  for (const Token& t : sentence.tokens) {
    if (t.kind == TokenKind::word) {
      stream.push_back(vocab.id_of(t.normalized));
    } else if (t.kind == TokenKind::mask) {
      stream.push_back(kMaskId);
    }
  }

  std::vector<TokenWindow> windows;
  for (std::size_t start = 0; start < stream.size(); start += kWindowLength) {
    TokenWindow w;
    w.ids.fill(kPadId);
    const std::size_t len = std::min(kWindowLength, stream.size() - start);
    for (std::size_t i = 0; i < len; ++i) {
      w.ids[i] = stream[start + i];
      if (w.ids[i] == kMaskId) w.mask_positions.push_back(i + 1);
    }
    windows.push_back(std::move(w));
  }
  return windows;
}

enum class PredictorKind : std::uint8_t {
  identity = 0,
  unigram = 1,
  ngram = 2,
  external_model = 3,
};

class Predictor {
public:
  virtual ~Predictor() = default;

  virtual PredictorKind kind() const = 0;
  virtual const Vocabulary& vocabulary() const = 0;

  // One probability row over the full id space per mask position of the
  // window, in mask_positions order. Rows sum to 1.
  virtual std::vector<std::vector<double>> predict(
      const TokenWindow& window) const = 0;
};

/// Keeps every mask in place: all probability mass on the MASK id.
class IdentityPredictor final : public Predictor {
public:
  IdentityPredictor() = default;
  explicit IdentityPredictor(Vocabulary vocab) : vocab_(std::move(vocab)) {}

  PredictorKind kind() const override { return PredictorKind::identity; }
  const Vocabulary& vocabulary() const override { return vocab_; }

  std::vector<std::vector<double>> predict(const TokenWindow& window) const override {
    std::vector<std::vector<double>> rows;
    rows.reserve(window.mask_positions.size());
    for (std::size_t i = 0; i < window.mask_positions.size(); ++i) {
      std::vector<double> row(vocab_.id_space(), 0.0);
      row[kMaskId] = 1.0;
      rows.push_back(std::move(row));
    }
    return rows;
  }

private:
  Vocabulary vocab_;
};

/// Count-based predictors: unigram frequencies, or bigram products with
/// add-1 smoothing where a PAD/MASK/OOV/absent neighbour contributes a
/// uniform factor.
class StatisticalPredictor final : public Predictor {
public:
  StatisticalPredictor(PredictorKind kind, Vocabulary vocab,
                       std::vector<std::uint64_t> unigram_counts,
                       std::unordered_map<std::uint64_t, std::uint64_t> pair_counts)
      : kind_(kind),
        vocab_(std::move(vocab)),
        unigram_counts_(std::move(unigram_counts)),
        pair_counts_(std::move(pair_counts)) {
    for (std::uint64_t c : unigram_counts_) total_words_ += c;
  }

  PredictorKind kind() const override { return kind_; }
  const Vocabulary& vocabulary() const override { return vocab_; }

  std::vector<std::vector<double>> predict(const TokenWindow& window) const override {
    if (vocab_.word_count() == 0 || total_words_ == 0)
      throw NotTrained("statistical predictor has no counts");
    std::vector<std::vector<double>> rows;
    rows.reserve(window.mask_positions.size());
    for (std::size_t pos : window.mask_positions) {
      rows.push_back(kind_ == PredictorKind::unigram
                         ? unigram_row()
                         : ngram_row(window, pos));
    }
    return rows;
  }

  std::uint64_t unigram_count(std::uint32_t word_id) const {
    return unigram_counts_.at(word_id - kFirstWordId);
  }

  std::uint64_t pair_count(std::uint32_t left_id, std::uint32_t right_id) const {
    const auto it = pair_counts_.find(pair_key(left_id, right_id));
    return it == pair_counts_.end() ? 0 : it->second;
  }

  const std::vector<std::uint64_t>& unigram_counts() const { return unigram_counts_; }
  const std::unordered_map<std::uint64_t, std::uint64_t>& pair_counts() const {
    return pair_counts_;
  }

  static std::uint64_t pair_key(std::uint32_t left_id, std::uint32_t right_id) {
    return (static_cast<std::uint64_t>(left_id) << 32) | right_id;
  }

private:
  std::vector<double> unigram_row() const {
    std::vector<double> row(vocab_.id_space(), 0.0);
    for (std::size_t i = 0; i < unigram_counts_.size(); ++i) {
      row[kFirstWordId + i] = static_cast<double>(unigram_counts_[i]) /
                              static_cast<double>(total_words_);
    }
    return row;
  }

  std::vector<double> ngram_row(const TokenWindow& window, std::size_t pos) const {
    const std::uint32_t left =
        pos >= 2 ? window.ids[pos - 2] : kPadId;  // pos is 1-based
    const std::uint32_t right =
        pos < kWindowLength ? window.ids[pos] : kPadId;
    const bool use_left = left >= kFirstWordId;
    const bool use_right = right >= kFirstWordId;

    std::vector<double> row(vocab_.id_space(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < unigram_counts_.size(); ++i) {
      const std::uint32_t w = kFirstWordId + static_cast<std::uint32_t>(i);
      double score = 1.0;
      if (use_left) score *= static_cast<double>(pair_count(left, w) + 1);
      if (use_right) score *= static_cast<double>(pair_count(w, right) + 1);
      row[w] = score;
      total += score;
    }
    for (double& x : row) x /= total;
    return row;
  }

  PredictorKind kind_;
  Vocabulary vocab_;
  std::vector<std::uint64_t> unigram_counts_;
  std::unordered_map<std::uint64_t, std::uint64_t> pair_counts_;
  std::uint64_t total_words_ = 0;
};

/// Fit a statistical predictor on an unmasked corpus. Bigram counts are
/// taken over adjacent word positions within each sentence.
inline std::unique_ptr<Predictor> train_predictor(PredictorKind kind,
                                                  const Text& training_text) {
  if (kind == PredictorKind::identity)
    return std::make_unique<IdentityPredictor>(Vocabulary::from_text(training_text));
  if (kind == PredictorKind::external_model)
    throw NotTrained("external model predictors are constructed, not trained");

  Vocabulary vocab = Vocabulary::from_text(training_text);
  if (vocab.word_count() == 0)
    throw EmptyCorpus("training text has no words");

  std::vector<std::uint64_t> unigram(vocab.word_count(), 0);
  std::unordered_map<std::uint64_t, std::uint64_t> pairs;
  for (const Sentence& s : training_text.sentences) {
    std::uint32_t prev = kPadId;
    for (const Token& t : s.tokens) {
      if (t.kind != TokenKind::word) continue;
      const std::uint32_t id = vocab.id_of(t.normalized);
      ++unigram[id - kFirstWordId];
      if (prev >= kFirstWordId)
        ++pairs[StatisticalPredictor::pair_key(prev, id)];
      prev = id;
    }
  }
  return std::make_unique<StatisticalPredictor>(kind, std::move(vocab),
                                                std::move(unigram),
                                                std::move(pairs));
}

/// Replace every mask token by the predictor's argmax word (ties go to
/// the lexicographically smallest word; reserved ids keep the mask).
/// Non-mask tokens pass through untouched.
inline Text demask_text(const Predictor& predictor, const Text& masked) {
  Text out = masked;
  for (Sentence& sentence : out.sentences) {
    if (sentence.mask_count() == 0) continue;

    // Token index of each word-stream position (words and masks).
    std::vector<std::size_t> stream_token_index;
    for (std::size_t ti = 0; ti < sentence.tokens.size(); ++ti) {
      if (sentence.tokens[ti].kind != TokenKind::punctuation)
        stream_token_index.push_back(ti);
    }

    const std::vector<TokenWindow> windows =
        windows_from_sentence(sentence, predictor.vocabulary());
    for (std::size_t wi = 0; wi < windows.size(); ++wi) {
      const TokenWindow& window = windows[wi];
      const std::vector<std::vector<double>> rows = predictor.predict(window);
      if (rows.size() != window.mask_positions.size())
        throw ShapeMismatch("predictor returned " + std::to_string(rows.size()) +
                            " rows for " +
                            std::to_string(window.mask_positions.size()) +
                            " masks");
      for (std::size_t mi = 0; mi < rows.size(); ++mi) {
        const std::vector<double>& probs = rows[mi];
        std::size_t best = 0;
        for (std::size_t k = 1; k < probs.size(); ++k) {
          if (probs[k] > probs[best]) best = k;  // id order is lexicographic
        }
        if (best < kFirstWordId) continue;  // no recovery (e.g. identity)
        const std::size_t stream_pos =
            wi * kWindowLength + (window.mask_positions[mi] - 1);
        sentence.tokens[stream_token_index.at(stream_pos)] =
            make_word_token(predictor.vocabulary().word_of(
                static_cast<std::uint32_t>(best)));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Predictor persistence: "XWPD" | version | kind | vocab | unigram | pairs.

namespace model_io {

inline constexpr std::array<char, 4> kMagic = {'X', 'W', 'P', 'D'};
inline constexpr std::uint8_t kVersion = 1;

template <typename T>
inline void write_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
}

template <typename T>
inline T read_le(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw CorruptStream("model file truncated");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    value |= static_cast<T>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  pos += sizeof(T);
  return value;
}

}  // namespace model_io

inline std::string serialize_predictor(const Predictor& predictor) {
  using namespace model_io;
  std::string out(kMagic.begin(), kMagic.end());
  out.push_back(static_cast<char>(kVersion));
  out.push_back(static_cast<char>(predictor.kind()));

  const Vocabulary& vocab = predictor.vocabulary();
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(vocab.word_count()));
  for (const std::string& w : vocab.words()) {
    if (w.size() > 0xffff)
      throw CorruptStream("vocabulary word exceeds the 64 KiB format limit");
    write_le<std::uint16_t>(out, static_cast<std::uint16_t>(w.size()));
    out += w;
  }

  const auto* stats = dynamic_cast<const StatisticalPredictor*>(&predictor);
  if (stats == nullptr) {
    write_le<std::uint64_t>(out, 0);  // no pair table
    return out;
  }
  for (std::uint64_t c : stats->unigram_counts()) write_le<std::uint64_t>(out, c);
  write_le<std::uint64_t>(out, stats->pair_counts().size());
  // Deterministic file bytes: pairs sorted by key.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs(
      stats->pair_counts().begin(), stats->pair_counts().end());
  std::sort(pairs.begin(), pairs.end());
  for (const auto& [key, count] : pairs) {
    write_le<std::uint64_t>(out, key);
    write_le<std::uint64_t>(out, count);
  }
  return out;
}

inline std::unique_ptr<Predictor> deserialize_predictor(const std::string& data) {
  using namespace model_io;
  std::size_t pos = 0;
  for (char expected : kMagic) {
    if (pos >= data.size() || data[pos] != expected)
      throw CorruptStream("bad model magic");
    ++pos;
  }
  if (read_le<std::uint8_t>(data, pos) != kVersion)
    throw CorruptStream("unsupported model version");
  const auto kind = static_cast<PredictorKind>(read_le<std::uint8_t>(data, pos));

  const std::uint32_t vocab_count = read_le<std::uint32_t>(data, pos);
  std::vector<std::string> words;
  words.reserve(vocab_count);
  for (std::uint32_t i = 0; i < vocab_count; ++i) {
    const std::uint16_t len = read_le<std::uint16_t>(data, pos);
    if (pos + len > data.size()) throw CorruptStream("model file truncated");
    words.emplace_back(data.substr(pos, len));
    pos += len;
  }
  Vocabulary vocab(std::move(words));

  if (kind == PredictorKind::identity) {
    read_le<std::uint64_t>(data, pos);
    return std::make_unique<IdentityPredictor>(std::move(vocab));
  }
  if (kind != PredictorKind::unigram && kind != PredictorKind::ngram)
    throw CorruptStream("model file holds an unsupported predictor kind");

  std::vector<std::uint64_t> unigram(vocab_count);
  for (std::uint32_t i = 0; i < vocab_count; ++i)
    unigram[i] = read_le<std::uint64_t>(data, pos);
  const std::uint64_t pair_count = read_le<std::uint64_t>(data, pos);
  std::unordered_map<std::uint64_t, std::uint64_t> pairs;
  pairs.reserve(pair_count);
  for (std::uint64_t i = 0; i < pair_count; ++i) {
    const std::uint64_t key = read_le<std::uint64_t>(data, pos);
    pairs[key] = read_le<std::uint64_t>(data, pos);
  }
  return std::make_unique<StatisticalPredictor>(kind, std::move(vocab),
                                                std::move(unigram),
                                                std::move(pairs));
}

inline void save_predictor(const Predictor& predictor, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorruptStream("cannot open model file for writing: " + path);
  const std::string data = serialize_predictor(predictor);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

inline std::unique_ptr<Predictor> load_predictor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptStream("cannot open model file: " + path);
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return deserialize_predictor(data);
}

}  // namespace crossword
