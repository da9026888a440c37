#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "heis/harness.hpp"

namespace heis {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

Json to_json(const DistortionReport& r);
Json to_json(const PairRecord& p);

// Deterministic rendering: sorted keys, two-space indent, trailing newline.
std::string dump(const Json& j);

std::string hex64(std::uint64_t v);

void write_text(const std::string& path, const std::string& text);

// Per-bucket min/max ratio against separation on log-log axes.
std::string svg_distortion_plot(const DistortionReport& r);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<double>& values);
  const std::string& str() const { return out_; }

 private:
  std::size_t width_;
  std::string out_;
};

}  // namespace heis
