#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ggm/models.hpp"

namespace ggm::codec {

inline constexpr int kPrecisionBits = 16;
inline constexpr std::uint32_t kTotalFreq = 1u << kPrecisionBits;
inline constexpr std::int32_t kDefaultSupport = 255;

/// Integer-quantized CDF over symbols [s_min, s_max] plus two escape buckets
/// for symbols below s_min and above s_max. Bucket i covers
/// [start(i), cum[i]); bucket 0 is the low escape, the last the high escape.
class FrequencyTable {
 public:
  FrequencyTable() = default;

  /// Frequencies proportional to the model's bin masses, rounded by largest
  /// remainder to total exactly 2^16 with every bucket >= 1. The escape
  /// buckets receive the mass below s_min - 1/2 and above s_max + 1/2.
  /// Throws DomainError unless s_min <= 0 <= s_max and the alphabet fits.
  static FrequencyTable build(const EntropyModel& m, std::int32_t s_min,
                              std::int32_t s_max);

  /// From explicit bucket frequencies (escape_low, s_min..s_max, escape_high).
  static FrequencyTable from_frequencies(std::int32_t s_min,
                                         std::int32_t s_max,
                                         std::span<const std::uint32_t> freqs);

  std::int32_t s_min() const { return s_min_; }
  std::int32_t s_max() const { return s_max_; }
  const std::vector<std::uint32_t>& cum() const { return cum_; }
  std::size_t buckets() const { return cum_.size(); }

  std::uint32_t start(std::size_t bucket) const {
    return bucket == 0 ? 0 : cum_[bucket - 1];
  }
  std::uint32_t freq(std::size_t bucket) const {
    return cum_[bucket] - start(bucket);
  }
  /// Frequency of the bucket a symbol codes through (escape if out of range).
  std::uint32_t symbol_freq(std::int64_t symbol) const;
  std::size_t bucket_of(std::int64_t symbol) const;
  /// Bucket containing cumulative value v < 2^16.
  std::size_t find(std::uint32_t v) const;

  /// Throws DomainError if the invariants do not hold.
  void validate() const;

  friend bool operator==(const FrequencyTable&, const FrequencyTable&) = default;

 private:
  std::int32_t s_min_ = 0;
  std::int32_t s_max_ = 0;
  std::vector<std::uint32_t> cum_;
};

/// Symmetric-or-not support around the model's grid covering all but ~2^-30
/// of the mass, clipped to [-kDefaultSupport, kDefaultSupport] and always
/// containing 0.
std::pair<std::int32_t, std::int32_t> auto_support(const EntropyModel& m);

// ---- range coder ------------------------------------------------------------

/// 32-bit range / 64-bit low carry-propagating range encoder with byte-wise
/// renormalization and 16-bit probabilities.
class RangeEncoder {
 public:
  void encode(std::uint32_t start, std::uint32_t freq);
  /// 16 raw bits at probability 2^-16 each value.
  void encode_raw16(std::uint32_t bits);
  std::vector<std::uint8_t> finish();

 private:
  void shift_low();

  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t cache_size_ = 1;
  std::vector<std::uint8_t> out_;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const std::uint8_t> payload);
  /// Cumulative value of the next symbol; follow with consume().
  std::uint32_t peek();
  void consume(std::uint32_t start, std::uint32_t freq);
  std::uint32_t decode_raw16();
  /// True if the decoder read past the end of the payload.
  bool overran() const { return pos_ > payload_.size(); }

 private:
  std::uint8_t next_byte();

  std::span<const std::uint8_t> payload_;
  std::size_t pos_ = 0;
  std::uint32_t code_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint32_t r_ = 0;
};

// ---- symbol streams ---------------------------------------------------------

/// Range-codes symbols; tables holds one shared table or one per symbol.
/// Out-of-range symbols go through an escape bucket followed by their 32-bit
/// two's-complement value.
std::vector<std::uint8_t> encode_symbols(std::span<const std::int64_t> symbols,
                                         std::span<const FrequencyTable> tables);

std::vector<std::int64_t> decode_symbols(std::span<const std::uint8_t> payload,
                                         std::size_t count,
                                         std::span<const FrequencyTable> tables);

/// sum -log2(freq / 2^16) over the buckets the symbols code through, plus 32
/// raw bits per escaped symbol.
double table_ideal_bits(std::span<const std::int64_t> symbols,
                        std::span<const FrequencyTable> tables);

// ---- bitstream container ------------------------------------------------------

/// Little-endian layout: "GGMC", u8 version, u8 family tag, u32 symbol count,
/// i32 s_min, i32 s_max, u32 parameter-block length, JSON parameter block,
/// u32 payload length, payload, u32 CRC32 over everything before it.
struct Bitstream {
  static constexpr std::uint8_t kVersion = 1;

  Family family = Family::ggm;
  std::uint32_t count = 0;
  std::int32_t s_min = 0;
  std::int32_t s_max = 0;
  std::string params_json;
  std::vector<std::uint8_t> payload;

  std::vector<std::uint8_t> serialize() const;
  /// Throws FormatError on a bad magic/version/tag and CorruptStreamError on
  /// truncation or checksum mismatch.
  static Bitstream parse(std::span<const std::uint8_t> bytes);

  std::size_t payload_bits() const { return payload.size() * 8; }
};

/// Encodes symbols against per-symbol (or one shared) tables. The tables must
/// share bounds; the header records them along with family and parameters.
Bitstream encode(std::span<const std::int64_t> symbols,
                 std::span<const FrequencyTable> tables, Family family,
                 std::string params_json);

/// Throws DomainError if the table count does not match the stream and
/// CorruptStreamError if decoding runs past the payload.
std::vector<std::int64_t> decode(const Bitstream& bs,
                                 std::span<const FrequencyTable> tables);

// ---- model-level helpers ------------------------------------------------------

struct RateReport {
  double ideal_bits = 0.0;     // sum -log2 bin probability under the model
  double table_bits = 0.0;     // sum -log2 freq / 2^16 under the tables
  double measured_bits = 0.0;  // payload size in bits
};

/// Shared-model stream: bounds from auto_support, parameters serialized into
/// the header as the models JSON.
Bitstream encode_with_model(std::span<const std::int64_t> symbols,
                            const EntropyModel& m);

/// Rebuilds the table from the header parameters and decodes.
std::vector<std::int64_t> decode_with_model(const Bitstream& bs);

/// One model per symbol, tables built on the fly over [s_min, s_max]. The
/// header carries {"models": [...]}.
Bitstream encode_with_models(std::span<const std::int64_t> symbols,
                             std::span<const EntropyModel> models,
                             std::int32_t s_min = -kDefaultSupport,
                             std::int32_t s_max = kDefaultSupport);

std::vector<std::int64_t> decode_with_models(const Bitstream& bs);

RateReport rate_report(std::span<const std::int64_t> symbols,
                       const EntropyModel& m, const Bitstream& bs);

}  // namespace ggm::codec
