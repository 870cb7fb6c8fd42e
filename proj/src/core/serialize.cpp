#include "serialize.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

namespace pwband {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* family_name(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::none: return "none";
    case NoiseFamily::laplace: return "laplace";
    case NoiseFamily::gaussian: return "gaussian";
    case NoiseFamily::uniform: return "uniform";
  }
  return "none";
}

nlohmann::ordered_json meta_json(const BandMeta& meta, double risk, std::size_t grid_points) {
  nlohmann::ordered_json j;
  j["algorithm"] = meta.algorithm;
  j["eta"] = meta.eta;
  j["n"] = meta.n;
  j["alpha"] = meta.alpha;
  j["beta"] = meta.beta;
  j["total_risk"] = risk;
  j["delta0"] = meta.delta0;
  j["bound_value"] = meta.bound_value;
  j["grid_points"] = grid_points;
  j["clip_unit"] = meta.clip_unit;
  if (meta.algorithm == "noisy") {
    j["d"] = meta.d;
    j["m"] = meta.m;
    j["q"] = meta.q;
    j["beta_achieved"] = static_cast<double>(meta.q) / static_cast<double>(meta.m);
    j["lambda"] = meta.lambda;
    j["seed"] = meta.seed;
    j["perturbed_rows"] = meta.perturbed_rows;
  }
  return j;
}

double parse_double(const std::string& field, const std::string& context) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw error(errc::invalid_argument, "cannot parse number '" + field + "' in " + context);
  }
  return v;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::string band_to_csv(const Band& band) {
  std::string out = "x,lower,upper,empty\n";
  for (std::size_t i = 0; i < band.grid.size(); ++i) {
    const IntervalPair& iv = band.intervals[i];
    out += fmt17(band.grid[i]);
    out += ',';
    out += fmt17(iv.lower);
    out += ',';
    out += fmt17(iv.upper);
    out += ',';
    out += iv.empty() ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string band_to_json(const Band& band, const std::string& timestamp) {
  nlohmann::ordered_json j = meta_json(band.meta, band.risk, band.grid.size());
  if (!timestamp.empty()) j["generated_at"] = timestamp;
  return j.dump(2) + "\n";
}

std::string coverage_report_to_json(const CoverageReport& report, const std::string& timestamp) {
  const CoverageConfig& c = report.config;
  nlohmann::ordered_json j;
  j["trials"] = report.trials;
  j["successes"] = report.successes;
  j["errors"] = report.errors;
  j["empirical_reliability"] = report.empirical_reliability;
  j["guarantee"] = report.guarantee;
  j["mean_width"] = report.mean_width;
  j["finite_width_trials"] = report.finite_width_trials;
  j["unbounded_trials"] = report.unbounded_trials;
  j["empty_trials"] = report.empty_trials;
  nlohmann::ordered_json cfg;
  cfg["algorithm"] = c.algorithm == BandAlgorithm::noise_free ? "noise-free" : "noisy";
  cfg["trials"] = c.trials;
  cfg["n"] = c.n;
  cfg["grid_resolution"] = c.grid_resolution;
  cfg["eta"] = c.params.eta;
  cfg["alpha"] = c.alpha;
  cfg["beta"] = c.beta;
  cfg["d"] = c.d;
  cfg["lambda"] = c.lambda;
  cfg["m"] = c.m;
  cfg["q"] = c.q;
  cfg["perturbed_rows"] = c.perturbed_rows;
  cfg["noise"] = {{"family", family_name(c.noise.family)},
                  {"location", c.noise.location},
                  {"scale", c.noise.scale}};
  cfg["seed"] = c.seed;
  cfg["clip_unit"] = c.clip_unit;
  j["config"] = cfg;
  if (!timestamp.empty()) j["generated_at"] = timestamp;
  return j.dump(2) + "\n";
}

std::string now_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Dataset read_xy_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::io_error, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw error(errc::invalid_argument, path + ": empty file, expected header x,y");
  }
  if (strip_cr(line) != "x,y") {
    throw error(errc::invalid_argument, path + ": expected header x,y");
  }
  Dataset data;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw error(errc::invalid_argument,
                  path + ": row " + std::to_string(row) + " must have exactly two fields");
    }
    const std::string ctx = path + " row " + std::to_string(row);
    data.xs.push_back(parse_double(line.substr(0, comma), ctx));
    data.ys.push_back(parse_double(line.substr(comma + 1), ctx));
  }
  if (data.xs.empty()) {
    throw error(errc::invalid_argument, path + ": no data rows");
  }
  return data;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error(errc::io_error, "cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out) throw error(errc::io_error, "write failed for " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::io_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace pwband
