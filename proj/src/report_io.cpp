#include "heis/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "heis/errors.hpp"

namespace heis {

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Json to_json(const PairRecord& p) {
  return Json{{"p", {p.p[0], p.p[1]}}, {"q", {p.q[0], p.q[1]}}, {"sep", p.sep},
              {"bucket", p.bucket},   {"d_source", p.d_source}, {"d_target", p.d_target}};
}

Json to_json(const DistortionReport& r) {
  Json buckets = Json::array();
  for (const auto& b : r.buckets)
    buckets.push_back({{"bucket", b.bucket},
                       {"sep_lo", b.sep_lo},
                       {"sep_hi", b.sep_hi},
                       {"count", b.count},
                       {"min_ratio", b.min_ratio},
                       {"max_ratio", b.max_ratio}});
  return Json{{"schema", kSchemaVersion},
              {"id", r.id},
              {"L_lower", r.L_lower},
              {"L_upper", r.L_upper},
              {"L_product", r.L_product},
              {"L", r.L},
              {"L_opt", r.L_opt},
              {"prescale", r.prescale},
              {"sample_count", r.sample_count},
              {"seed", r.seed},
              {"config_hash", hex64(r.config_hash)},
              {"worst_expansion", to_json(r.worst_expansion)},
              {"worst_contraction", to_json(r.worst_contraction)},
              {"buckets", buckets}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot write " + path);
  f << text;
}

std::string svg_distortion_plot(const DistortionReport& r) {
  const double W = 640, H = 400, m = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& b : r.buckets) {
    if (b.count == 0) continue;
    const double x = std::log2(std::sqrt(b.sep_lo * b.sep_hi));
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, std::log2(b.min_ratio));
    ymax = std::max(ymax, std::log2(b.max_ratio));
  }
  if (xmin > xmax) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax - xmin < 1e-9) xmax = xmin + 1;
  if (ymax - ymin < 1e-9) ymax = ymin + 1;
  auto X = [&](double x) { return m + (W - 2 * m) * (x - xmin) / (xmax - xmin); };
  auto Y = [&](double y) { return H - m - (H - 2 * m) * (y - ymin) / (ymax - ymin); };
  char buf[256];
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"20\" font-size=\"14\">%s</text>\n", m, r.id.c_str());
  s += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%g\" y=\"%g\" font-size=\"11\">log2 separation</text>\n"
                "<text x=\"5\" y=\"%g\" font-size=\"11\">log2 ratio</text>\n",
                W / 2 - 40, H - 10, H / 2);
  s += buf;
  for (int series = 0; series < 2; ++series) {
    s += std::string("<polyline fill=\"none\" stroke=\"") + (series ? "crimson" : "steelblue") +
         "\" points=\"";
    for (const auto& b : r.buckets) {
      if (b.count == 0) continue;
      const double x = std::log2(std::sqrt(b.sep_lo * b.sep_hi));
      const double y = std::log2(series ? b.max_ratio : b.min_ratio);
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(x), Y(y));
      s += buf;
    }
    s += "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ += (i ? "," : "") + header[i];
  out_ += "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != width_) throw InvalidInput("csv row width mismatch");
  char buf[32];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", values[i]);
    out_ += (i ? "," : "");
    out_ += buf;
  }
  out_ += "\n";
}

}  // namespace heis
