#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ggm::cli {

/// Locale-independent shortest round-trip formatting ('.' decimal point).
std::string fmt(double v);

/// Header row plus data rows, comma separated, '\n' line ends.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  std::string str() const { return text_; }

 private:
  std::size_t width_;
  std::string text_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);

struct Manifest {
  std::string command;
  nlohmann::ordered_json flags = nlohmann::ordered_json::object();
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  double wall_ms = 0.0;

  /// Written next to the primary output as "<output>.manifest.json".
  void write(const std::filesystem::path& primary_output) const;
};

}  // namespace ggm::cli
