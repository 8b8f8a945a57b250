#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "crossword/corpus.hpp"
#include "crossword/errors.hpp"

namespace crossword {

// Container header: magic, version, mask symbol, policy, ratio*1000.
struct BlobHeader {
  char mask_symbol = kDefaultMaskSymbol;
  std::uint8_t policy = 0;
  std::uint16_t ratio_milli = 0;
};

inline constexpr std::array<char, 4> kBlobMagic = {'X', 'W', 'R', 'D'};
inline constexpr std::uint8_t kBlobVersion = 1;
inline constexpr std::size_t kBlobHeaderBytes = 9;  // magic+version+mask+policy+ratio
inline constexpr std::size_t kBlobHeaderBits = kBlobHeaderBytes * 8;

struct CompressedBlob {
  BlobHeader header;
  std::vector<std::uint8_t> payload;  // packed code stream, zero-padded to bytes
  std::uint64_t bit_length = 0;       // total payload bits (8 * payload size)

  std::vector<std::uint8_t> serialize() const {
    std::vector<std::uint8_t> out;
    out.reserve(kBlobHeaderBytes + payload.size());
    for (char c : kBlobMagic) out.push_back(static_cast<std::uint8_t>(c));
    out.push_back(kBlobVersion);
    out.push_back(static_cast<std::uint8_t>(header.mask_symbol));
    out.push_back(header.policy);
    out.push_back(static_cast<std::uint8_t>(header.ratio_milli & 0xff));
    out.push_back(static_cast<std::uint8_t>(header.ratio_milli >> 8));
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
  }

  static CompressedBlob deserialize(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kBlobHeaderBytes)
      throw CorruptStream("blob shorter than header");
    for (std::size_t i = 0; i < kBlobMagic.size(); ++i) {
      if (bytes[i] != static_cast<std::uint8_t>(kBlobMagic[i]))
        throw CorruptStream("bad magic");
    }
    if (bytes[4] != kBlobVersion)
      throw CorruptStream("unsupported version " + std::to_string(bytes[4]));
    CompressedBlob blob;
    blob.header.mask_symbol = static_cast<char>(bytes[5]);
    blob.header.policy = bytes[6];
    blob.header.ratio_milli =
        static_cast<std::uint16_t>(bytes[7] | (bytes[8] << 8));
    blob.payload.assign(bytes.begin() + kBlobHeaderBytes, bytes.end());
    blob.bit_length = 8 * static_cast<std::uint64_t>(blob.payload.size());
    return blob;
  }
};

namespace lzw_detail {

inline constexpr std::uint32_t kClearCode = 256;
inline constexpr std::uint32_t kStopCode = 257;
inline constexpr std::uint32_t kFirstDynamicCode = 258;
inline constexpr std::uint32_t kCodeLimit = 1u << 16;  // table full at 65536
inline constexpr int kMinWidth = 9;
inline constexpr int kMaxWidth = 16;

// Width of the k-th code since the last reset. Both directions derive it
// from the code position alone: the n-th code is written while the next
// dictionary code to assign is 258+n, and the width grows to w+1 exactly
// when that value reaches 2^w.
inline int width_at(std::uint64_t position_since_reset) {
  const std::uint64_t next = kFirstDynamicCode + position_since_reset;
  int width = kMinWidth;
  while (width < kMaxWidth && next >= (1ull << width)) ++width;
  return width;
}

class BitWriter {
public:
  void put(std::uint32_t code, int width) {
    for (int b = width - 1; b >= 0; --b) {
      if (bit_ == 0) bytes_.push_back(0);
      if (code & (1u << b)) bytes_.back() |= (0x80u >> bit_);
      bit_ = (bit_ + 1) % 8;
    }
  }

  std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
  std::vector<std::uint8_t> bytes_;
  int bit_ = 0;
};

class BitReader {
public:
  explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t get(int width) {
    std::uint32_t code = 0;
    for (int b = 0; b < width; ++b) {
      const std::size_t byte = pos_ >> 3;
      if (byte >= bytes_.size())
        throw CorruptStream("payload ends before stop code");
      const int bit = static_cast<int>(pos_ & 7);
      code = (code << 1) | ((bytes_[byte] >> (7 - bit)) & 1u);
      ++pos_;
    }
    return code;
  }

private:
  std::span<const std::uint8_t> bytes_;
  std::uint64_t pos_ = 0;
};

}  // namespace lzw_detail

struct LzStats {
  std::size_t codes_emitted = 0;
  std::size_t clears = 0;
};

/// LZW over the byte alphabet with variable 9..16-bit codes packed
/// MSB-first. Dictionary codes 0..255 are the single bytes, 256 clears
/// the table, 257 stops the stream. When the table is full the encoder
/// emits a clear and starts over.
inline CompressedBlob lz_encode(std::span<const std::uint8_t> input,
                                BlobHeader header = {},
                                LzStats* stats = nullptr) {
  using namespace lzw_detail;

  // (prefix code << 8 | byte) -> code
  std::unordered_map<std::uint32_t, std::uint32_t> dict;
  dict.reserve(1 << 16);
  std::uint32_t next_code = kFirstDynamicCode;
  std::uint64_t position = 0;
  BitWriter writer;
  LzStats local;

  auto emit = [&](std::uint32_t code) {
    writer.put(code, width_at(position));
    ++position;
    ++local.codes_emitted;
  };

  constexpr std::uint32_t kNoPrefix = 0xffffffff;
  std::uint32_t prefix = kNoPrefix;

  for (std::uint8_t byte : input) {
    if (prefix == kNoPrefix) {
      prefix = byte;
      continue;
    }
    const std::uint32_t key = (prefix << 8) | byte;
    if (auto it = dict.find(key); it != dict.end()) {
      prefix = it->second;
      continue;
    }
    emit(prefix);
    if (next_code < kCodeLimit) {
      dict.emplace(key, next_code++);
    } else {
      emit(kClearCode);
      dict.clear();
      next_code = kFirstDynamicCode;
      position = 0;
      ++local.clears;
    }
    prefix = byte;
  }
  if (prefix != kNoPrefix) emit(prefix);
  emit(kStopCode);

  CompressedBlob blob;
  blob.header = header;
  blob.payload = writer.take();
  blob.bit_length = 8 * static_cast<std::uint64_t>(blob.payload.size());
  if (stats != nullptr) *stats = local;
  return blob;
}

inline CompressedBlob lz_encode(std::string_view text, BlobHeader header = {},
                                LzStats* stats = nullptr) {
  return lz_encode(
      std::span<const std::uint8_t>(
          reinterpret_cast<const std::uint8_t*>(text.data()), text.size()),
      header, stats);
}

/// Exact inverse of lz_encode, including the one-code-ahead case where
/// the encoder references the entry it has only just created.
inline std::vector<std::uint8_t> lz_decode(const CompressedBlob& blob) {
  using namespace lzw_detail;

  BitReader reader(blob.payload);
  std::vector<std::uint8_t> out;

  // Per dynamic code: the prefix chain plus one byte; first_byte is kept
  // so the pending entry can be completed in O(1).
  std::vector<std::uint32_t> prefix_of;
  std::vector<std::uint8_t> last_byte_of, first_byte_of;

  auto reset_tables = [&] {
    prefix_of.clear();
    last_byte_of.clear();
    first_byte_of.clear();
  };

  auto first_byte = [&](std::uint32_t code) -> std::uint8_t {
    return code < 256 ? static_cast<std::uint8_t>(code)
                      : first_byte_of[code - kFirstDynamicCode];
  };

  auto append_string = [&](std::uint32_t code) {
    // Walk the prefix chain; the reversed tail is rewritten in place.
    const std::size_t start = out.size();
    while (code >= kFirstDynamicCode) {
      const std::uint32_t idx = code - kFirstDynamicCode;
      out.push_back(last_byte_of[idx]);
      code = prefix_of[idx];
    }
    out.push_back(static_cast<std::uint8_t>(code));
    for (std::size_t i = start, j = out.size() - 1; i < j; ++i, --j)
      std::swap(out[i], out[j]);
  };

  std::uint64_t position = 0;
  bool have_prev = false;
  std::uint32_t prev = 0;

  while (true) {
    // Widths depend on the code's position in the stream alone, so the
    // decoder mirrors the encoder by counting reads since the last reset.
    const std::uint32_t code = reader.get(width_at(position));
    ++position;

    if (code == kStopCode) return out;
    if (code == kClearCode) {
      reset_tables();
      have_prev = false;
      position = 0;
      continue;
    }

    const std::uint32_t next_code =
        kFirstDynamicCode + static_cast<std::uint32_t>(prefix_of.size());
    if (!have_prev) {
      if (code >= 256)
        throw CorruptStream("first code of a segment must be a literal");
      out.push_back(static_cast<std::uint8_t>(code));
      prev = code;
      have_prev = true;
      continue;
    }

    if (code > next_code || code >= kCodeLimit)
      throw CorruptStream("code " + std::to_string(code) +
                          " references an unknown entry");

    if (next_code < kCodeLimit) {
      // Entry for (prev, first byte of current); for code == next_code the
      // current string is prev + first(prev), the classic one-ahead case.
      const std::uint8_t fb = first_byte(code == next_code ? prev : code);
      prefix_of.push_back(prev);
      last_byte_of.push_back(fb);
      first_byte_of.push_back(first_byte(prev));
    }
    append_string(code);
    prev = code;
  }
}

inline std::string lz_decode_string(const CompressedBlob& blob) {
  const std::vector<std::uint8_t> bytes = lz_decode(blob);
  return std::string(bytes.begin(), bytes.end());
}

/// Rate accounting for a blob against the original (unmasked) word count.
inline double bits_per_word(const CompressedBlob& blob,
                            std::size_t word_count) {
  if (word_count < 1) throw ZeroWords("bits_per_word needs at least one word");
  return (static_cast<double>(kBlobHeaderBits) +
          static_cast<double>(blob.bit_length)) /
         static_cast<double>(word_count);
}

}  // namespace crossword
