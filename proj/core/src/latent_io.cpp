#include "ggm/latent_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include <nlohmann/json.hpp>

#include "ggm/error.hpp"

namespace ggm {
namespace {

std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    return (v >> 24) | ((v >> 8) & 0xFF00u) | ((v << 8) & 0xFF0000u) | (v << 24);
  }
  return v;
}

}  // namespace

void write_latents(const std::filesystem::path& path, const bench::LatentSet& set) {
  if (set.mask.size() != set.values.size()) {
    throw DomainError("latent set: mask and values differ in length");
  }
  const nlohmann::ordered_json header = {
      {"n", set.values.size()},
      {"roi_fraction", set.roi_fraction},
      {"seed", set.seed},
      {"dtype", "f32le"},
      {"mask", "u8"},
  };
  std::string bytes = header.dump();
  bytes.push_back('\n');
  const std::size_t body = bytes.size();
  bytes.resize(body + 4 * set.values.size());
  for (std::size_t i = 0; i < set.values.size(); ++i) {
    const auto bits = to_le(std::bit_cast<std::uint32_t>(static_cast<float>(set.values[i])));
    std::memcpy(bytes.data() + body + 4 * i, &bits, 4);
  }
  bytes.append(set.mask.begin(), set.mask.end());

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("failed writing '" + path.string() + "'");
}

bench::LatentSet read_latents(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  const auto nl = bytes.find('\n');
  if (nl == std::string::npos) throw FormatError("latent file: missing header line");

  bench::LatentSet set;
  std::size_t n = 0;
  try {
    const auto h = nlohmann::json::parse(bytes.substr(0, nl));
    if (h.at("dtype").get<std::string>() != "f32le" ||
        h.at("mask").get<std::string>() != "u8") {
      throw FormatError("latent file: unsupported dtype or mask encoding");
    }
    n = h.at("n").get<std::size_t>();
    set.roi_fraction = h.at("roi_fraction").get<double>();
    set.seed = h.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("latent file: bad header: ") + e.what());
  }

  const std::size_t body = nl + 1;
  if (bytes.size() - body != 5 * n) {
    throw FormatError("latent file: body size does not match n");
  }
  set.values.resize(n);
  set.mask.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t bits = 0;
    std::memcpy(&bits, bytes.data() + body + 4 * i, 4);
    set.values[i] = std::bit_cast<float>(to_le(bits));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto m = static_cast<std::uint8_t>(bytes[body + 4 * n + i]);
    if (m > 1) throw FormatError("latent file: mask bytes must be 0 or 1");
    set.mask[i] = m;
  }
  return set;
}

}  // namespace ggm
