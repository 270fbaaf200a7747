#include "ggm/codec.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ggm/error.hpp"

namespace ggm::codec {
namespace {

constexpr std::uint32_t kTop = 1u << 24;
constexpr char kMagic[4] = {'G', 'G', 'M', 'C'};

// Mass just beyond either end of the coded alphabet decides when
// auto_support stops widening.
constexpr double kSupportTail = 0x1.0p-30;

void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_i32(std::vector<std::uint8_t>& out, std::int32_t v) {
  put_u32(out, static_cast<std::uint32_t>(v));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::span<const std::uint8_t> take(std::size_t n) {
    if (bytes_.size() - pos_ < n) {
      throw CorruptStreamError("bitstream truncated");
    }
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8() { return take(1)[0]; }
  std::uint32_t u32() {
    auto s = take(4);
    return static_cast<std::uint32_t>(s[0]) |
           (static_cast<std::uint32_t>(s[1]) << 8) |
           (static_cast<std::uint32_t>(s[2]) << 16) |
           (static_cast<std::uint32_t>(s[3]) << 24);
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::size_t pos() const { return pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  std::size_t off = 0;
  while (off < bytes.size()) {
    const auto n = static_cast<uInt>(
        std::min<std::size_t>(bytes.size() - off, 1u << 30));
    crc = ::crc32(crc, bytes.data() + off, n);
    off += n;
  }
  return static_cast<std::uint32_t>(crc);
}

void check_table_count(std::size_t tables, std::size_t symbols) {
  if (tables != 1 && tables != symbols) {
    std::ostringstream oss;
    oss << "table/stream count mismatch: " << tables << " tables for "
        << symbols << " symbols";
    throw DomainError(oss.str());
  }
}

}  // namespace

// ---- FrequencyTable ----------------------------------------------------------

FrequencyTable FrequencyTable::build(const EntropyModel& m, std::int32_t s_min,
                                     std::int32_t s_max) {
  if (!(s_min <= 0 && 0 <= s_max)) {
    throw DomainError("FrequencyTable: need s_min <= 0 <= s_max");
  }
  const std::int64_t span = static_cast<std::int64_t>(s_max) - s_min + 1;
  const std::int64_t nb = span + 2;
  if (nb > static_cast<std::int64_t>(kTotalFreq) / 2) {
    throw DomainError("FrequencyTable: alphabet too large for 16-bit precision");
  }

  std::vector<double> mass(static_cast<std::size_t>(nb));
  mass.front() = model_relative_interval_mass(-INFINITY, s_min - 0.5, m);
  for (std::int64_t k = 0; k < span; ++k) {
    const double c = static_cast<double>(s_min + k);
    mass[static_cast<std::size_t>(k + 1)] =
        model_relative_interval_mass(c - 0.5, c + 0.5, m);
  }
  mass.back() = model_relative_interval_mass(s_max + 0.5, INFINITY, m);

  const double sum = std::accumulate(mass.begin(), mass.end(), 0.0);
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    throw DomainError("FrequencyTable: model assigns no mass to the alphabet");
  }

  // One count reserved per bucket; the rest by largest remainder. Buckets
  // with equal remainders are served as a group or not at all so that equal
  // masses always receive equal counts; whatever is left over goes to the
  // most probable bucket.
  const std::uint64_t spare = kTotalFreq - static_cast<std::uint64_t>(nb);
  std::vector<std::uint64_t> freq(mass.size(), 1);
  std::vector<double> rem(mass.size());
  std::uint64_t used = 0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    const double scaled = mass[i] / sum * static_cast<double>(spare);
    const double base = std::floor(scaled);
    freq[i] += static_cast<std::uint64_t>(base);
    used += static_cast<std::uint64_t>(base);
    rem[i] = scaled - base;
  }
  std::uint64_t left = spare - used;
  std::vector<std::size_t> order(mass.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t i = 0; i < order.size() && left > 0;) {
    std::size_t j = i;
    while (j < order.size() && rem[order[j]] == rem[order[i]]) ++j;
    const std::size_t group = j - i;
    if (group <= left && rem[order[i]] > 0.0) {
      for (std::size_t g = i; g < j; ++g) ++freq[order[g]];
      left -= group;
    }
    i = j;
  }
  if (left > 0) {
    const auto top = std::max_element(mass.begin(), mass.end()) - mass.begin();
    freq[static_cast<std::size_t>(top)] += left;
  }

  FrequencyTable t;
  t.s_min_ = s_min;
  t.s_max_ = s_max;
  t.cum_.resize(freq.size());
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < freq.size(); ++i) {
    acc += freq[i];
    t.cum_[i] = static_cast<std::uint32_t>(acc);
  }
  t.validate();
  return t;
}

FrequencyTable FrequencyTable::from_frequencies(
    std::int32_t s_min, std::int32_t s_max,
    std::span<const std::uint32_t> freqs) {
  FrequencyTable t;
  t.s_min_ = s_min;
  t.s_max_ = s_max;
  std::uint64_t acc = 0;
  for (const auto f : freqs) {
    acc += f;
    if (acc > kTotalFreq) throw DomainError("FrequencyTable: total exceeds 2^16");
    t.cum_.push_back(static_cast<std::uint32_t>(acc));
  }
  t.validate();
  return t;
}

void FrequencyTable::validate() const {
  if (!(s_min_ <= 0 && 0 <= s_max_)) {
    throw DomainError("FrequencyTable: need s_min <= 0 <= s_max");
  }
  const auto expect =
      static_cast<std::size_t>(static_cast<std::int64_t>(s_max_) - s_min_ + 3);
  if (cum_.size() != expect) {
    throw DomainError("FrequencyTable: cum length must be s_max - s_min + 3");
  }
  std::uint32_t prev = 0;
  for (const auto c : cum_) {
    if (c <= prev) throw DomainError("FrequencyTable: cum must strictly increase");
    prev = c;
  }
  if (cum_.back() != kTotalFreq) {
    throw DomainError("FrequencyTable: total must equal 2^16");
  }
}

std::size_t FrequencyTable::bucket_of(std::int64_t symbol) const {
  if (symbol < s_min_) return 0;
  if (symbol > s_max_) return cum_.size() - 1;
  return static_cast<std::size_t>(symbol - s_min_ + 1);
}

std::uint32_t FrequencyTable::symbol_freq(std::int64_t symbol) const {
  return freq(bucket_of(symbol));
}

std::size_t FrequencyTable::find(std::uint32_t v) const {
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), v);
  return static_cast<std::size_t>(it - cum_.begin());
}

std::pair<std::int32_t, std::int32_t> auto_support(const EntropyModel& m) {
  std::int32_t hi = 0;
  while (hi < kDefaultSupport &&
         model_relative_interval_mass(hi + 0.5, INFINITY, m) > kSupportTail) {
    ++hi;
  }
  std::int32_t lo = 0;
  while (lo > -kDefaultSupport &&
         model_relative_interval_mass(-INFINITY, lo - 0.5, m) > kSupportTail) {
    --lo;
  }
  return {lo, hi};
}

// ---- range coder ---------------------------------------------------------------

void RangeEncoder::shift_low() {
  if (static_cast<std::uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
    const auto carry = static_cast<std::uint8_t>(low_ >> 32);
    std::uint8_t temp = cache_;
    do {
      out_.push_back(static_cast<std::uint8_t>(temp + carry));
      temp = 0xFF;
    } while (--cache_size_ != 0);
    cache_ = static_cast<std::uint8_t>(low_ >> 24);
  }
  ++cache_size_;
  low_ = (low_ & 0x00FFFFFFu) << 8;
}

void RangeEncoder::encode(std::uint32_t start, std::uint32_t freq) {
  const std::uint32_t r = range_ >> kPrecisionBits;
  low_ += static_cast<std::uint64_t>(r) * start;
  range_ = r * freq;
  while (range_ < kTop) {
    range_ <<= 8;
    shift_low();
  }
}

void RangeEncoder::encode_raw16(std::uint32_t bits) { encode(bits & 0xFFFFu, 1); }

std::vector<std::uint8_t> RangeEncoder::finish() {
  for (int i = 0; i < 5; ++i) shift_low();
  // low + range never exceeds 2^32 at the top level, so the first byte
  // out of the cache is always zero and need not be stored.
  out_.erase(out_.begin());
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> payload)
    : payload_(payload) {
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
}

std::uint8_t RangeDecoder::next_byte() {
  const std::uint8_t b = pos_ < payload_.size() ? payload_[pos_] : 0;
  ++pos_;
  return b;
}

std::uint32_t RangeDecoder::peek() {
  r_ = range_ >> kPrecisionBits;
  const std::uint32_t v = code_ / r_;
  return std::min(v, kTotalFreq - 1);
}

void RangeDecoder::consume(std::uint32_t start, std::uint32_t freq) {
  code_ -= r_ * start;
  range_ = r_ * freq;
  while (range_ < kTop) {
    code_ = (code_ << 8) | next_byte();
    range_ <<= 8;
  }
}

std::uint32_t RangeDecoder::decode_raw16() {
  const std::uint32_t v = peek();
  consume(v, 1);
  return v;
}

// ---- symbol streams ---------------------------------------------------------------

std::vector<std::uint8_t> encode_symbols(std::span<const std::int64_t> symbols,
                                         std::span<const FrequencyTable> tables) {
  RangeEncoder enc;
  if (!symbols.empty()) {
    check_table_count(tables.size(), symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      const auto& t = tables.size() == 1 ? tables[0] : tables[i];
      const std::int64_t s = symbols[i];
      const std::size_t bucket = t.bucket_of(s);
      enc.encode(t.start(bucket), t.freq(bucket));
      if (bucket == 0 || bucket == t.buckets() - 1) {
        if (s < std::numeric_limits<std::int32_t>::min() ||
            s > std::numeric_limits<std::int32_t>::max()) {
          throw DomainError("encode: escaped symbol does not fit in 32 bits");
        }
        const auto raw = static_cast<std::uint32_t>(static_cast<std::int32_t>(s));
        enc.encode_raw16(raw >> 16);
        enc.encode_raw16(raw & 0xFFFFu);
      }
    }
  }
  return enc.finish();
}

std::vector<std::int64_t> decode_symbols(std::span<const std::uint8_t> payload,
                                         std::size_t count,
                                         std::span<const FrequencyTable> tables) {
  std::vector<std::int64_t> out;
  if (count == 0) return out;
  check_table_count(tables.size(), count);
  out.reserve(count);
  RangeDecoder dec(payload);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& t = tables.size() == 1 ? tables[0] : tables[i];
    const std::uint32_t v = dec.peek();
    const std::size_t bucket = t.find(v);
    dec.consume(t.start(bucket), t.freq(bucket));
    if (bucket == 0 || bucket == t.buckets() - 1) {
      const std::uint32_t hi = dec.decode_raw16();
      const std::uint32_t lo = dec.decode_raw16();
      out.push_back(static_cast<std::int32_t>((hi << 16) | lo));
    } else {
      out.push_back(static_cast<std::int64_t>(bucket) - 1 + t.s_min());
    }
    if (dec.overran()) throw CorruptStreamError("decode ran past the payload");
  }
  return out;
}

double table_ideal_bits(std::span<const std::int64_t> symbols,
                        std::span<const FrequencyTable> tables) {
  if (symbols.empty()) return 0.0;
  check_table_count(tables.size(), symbols.size());
  double bits = 0.0;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    const auto& t = tables.size() == 1 ? tables[0] : tables[i];
    const std::size_t bucket = t.bucket_of(symbols[i]);
    bits += kPrecisionBits - std::log2(static_cast<double>(t.freq(bucket)));
    if (bucket == 0 || bucket == t.buckets() - 1) bits += 32.0;
  }
  return bits;
}

// ---- bitstream container ------------------------------------------------------------

std::vector<std::uint8_t> Bitstream::serialize() const {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u8(out, kVersion);
  put_u8(out, static_cast<std::uint8_t>(family));
  put_u32(out, count);
  put_i32(out, s_min);
  put_i32(out, s_max);
  put_u32(out, static_cast<std::uint32_t>(params_json.size()));
  out.insert(out.end(), params_json.begin(), params_json.end());
  put_u32(out, static_cast<std::uint32_t>(payload.size()));
  out.insert(out.end(), payload.begin(), payload.end());
  put_u32(out, crc32_of(out));
  return out;
}

Bitstream Bitstream::parse(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("bitstream: bad magic");
  }
  r.take(4);
  const std::uint8_t version = r.u8();
  if (version != kVersion) {
    throw FormatError("bitstream: unsupported version " + std::to_string(version));
  }
  Bitstream bs;
  bs.family = family_from_tag(r.u8());
  bs.count = r.u32();
  bs.s_min = r.i32();
  bs.s_max = r.i32();
  const auto plen = r.u32();
  const auto pblock = r.take(plen);
  bs.params_json.assign(pblock.begin(), pblock.end());
  const auto len = r.u32();
  const auto payload = r.take(len);
  bs.payload.assign(payload.begin(), payload.end());
  const std::size_t body = r.pos();
  const auto stored = r.u32();
  if (crc32_of(bytes.first(body)) != stored) {
    throw CorruptStreamError("bitstream: CRC32 mismatch");
  }
  if (r.pos() != bytes.size()) {
    throw FormatError("bitstream: trailing bytes after CRC");
  }
  return bs;
}

Bitstream encode(std::span<const std::int64_t> symbols,
                 std::span<const FrequencyTable> tables, Family family,
                 std::string params_json) {
  if (symbols.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw DomainError("encode: too many symbols for a u32 count");
  }
  Bitstream bs;
  bs.family = family;
  bs.count = static_cast<std::uint32_t>(symbols.size());
  if (!tables.empty()) {
    bs.s_min = tables.front().s_min();
    bs.s_max = tables.front().s_max();
    for (const auto& t : tables) {
      if (t.s_min() != bs.s_min || t.s_max() != bs.s_max) {
        throw DomainError("encode: all tables must share the same bounds");
      }
    }
  }
  bs.params_json = std::move(params_json);
  bs.payload = encode_symbols(symbols, tables);
  return bs;
}

std::vector<std::int64_t> decode(const Bitstream& bs,
                                 std::span<const FrequencyTable> tables) {
  if (bs.count == 0) return {};
  return decode_symbols(bs.payload, bs.count, tables);
}

// ---- model-level helpers ---------------------------------------------------------------

Bitstream encode_with_model(std::span<const std::int64_t> symbols,
                            const EntropyModel& m) {
  const auto [lo, hi] = auto_support(m);
  const auto table = FrequencyTable::build(m, lo, hi);
  return encode(symbols, std::span(&table, 1), m.family(),
                nlohmann::json(m).dump());
}

std::vector<std::int64_t> decode_with_model(const Bitstream& bs) {
  EntropyModel m;
  try {
    m = nlohmann::json::parse(bs.params_json).get<EntropyModel>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bitstream: bad parameter block: ") + e.what());
  }
  if (m.family() != bs.family) {
    throw FormatError("bitstream: family tag does not match parameter block");
  }
  const auto table = FrequencyTable::build(m, bs.s_min, bs.s_max);
  return decode(bs, std::span(&table, 1));
}

Bitstream encode_with_models(std::span<const std::int64_t> symbols,
                             std::span<const EntropyModel> models,
                             std::int32_t s_min, std::int32_t s_max) {
  if (models.size() != symbols.size()) {
    throw DomainError("encode_with_models: one model per symbol required");
  }
  std::vector<FrequencyTable> tables;
  tables.reserve(models.size());
  auto arr = nlohmann::json::array();
  for (const auto& m : models) {
    tables.push_back(FrequencyTable::build(m, s_min, s_max));
    arr.push_back(m);
  }
  const Family family = models.empty() ? Family::ggm : models.front().family();
  auto bs = encode(symbols, tables, family, nlohmann::json{{"models", arr}}.dump());
  bs.s_min = s_min;
  bs.s_max = s_max;
  return bs;
}

std::vector<std::int64_t> decode_with_models(const Bitstream& bs) {
  std::vector<FrequencyTable> tables;
  try {
    const auto j = nlohmann::json::parse(bs.params_json);
    for (const auto& mj : j.at("models")) {
      tables.push_back(
          FrequencyTable::build(mj.get<EntropyModel>(), bs.s_min, bs.s_max));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bitstream: bad parameter block: ") + e.what());
  }
  if (tables.size() != bs.count) {
    throw DomainError("table/stream count mismatch");
  }
  return decode(bs, tables);
}

RateReport rate_report(std::span<const std::int64_t> symbols,
                       const EntropyModel& m, const Bitstream& bs) {
  RateReport r;
  const double offset = m.quantization_offset();
  for (const auto s : symbols) {
    r.ideal_bits -= std::log2(model_bin_probability(offset + static_cast<double>(s), m));
  }
  const auto table = FrequencyTable::build(m, bs.s_min, bs.s_max);
  r.table_bits = table_ideal_bits(symbols, std::span(&table, 1));
  r.measured_bits = static_cast<double>(bs.payload_bits());
  return r;
}

}  // namespace ggm::codec
