#include "ggm_cli/output.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "ggm/error.hpp"

namespace ggm::cli {

std::string fmt(double v) {
  char buf[64];
  // std::to_chars ignores the C locale and gives the shortest round-trip form.
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw std::logic_error("csv row width mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_.push_back(',');
    text_ += cells[i];
  }
  text_.push_back('\n');
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw FormatError("failed writing '" + path.string() + "'");
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  write_text(path, std::string(bytes.begin(), bytes.end()));
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void Manifest::write(const std::filesystem::path& primary_output) const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["tool"] = "ggmtool";
  j["version"] = GGM_VERSION;
  j["seed"] = seed;
  j["flags"] = flags;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["wall_ms"] = wall_ms;
  auto path = primary_output;
  path += ".manifest.json";
  write_text(path, j.dump(2) + "\n");
}

}  // namespace ggm::cli
