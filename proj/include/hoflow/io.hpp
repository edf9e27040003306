// Run configuration, number formatting, and CSV / JSON trajectory output.
//
// Data files are deterministic: they never contain wall time or timestamps.
// Those live only in the companion "<out>.manifest.json".

#ifndef HOFLOW_IO_HPP
#define HOFLOW_IO_HPP

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hoflow/conserved.hpp"
#include "hoflow/integrator.hpp"
#include "hoflow/singularity.hpp"

namespace hoflow {

inline constexpr const char* kToolVersion = "0.1.0";

/// Shortest of: 17 significant digits, locale independent.
inline std::string format_double(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

inline std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw ConfigError(what + ": empty entry in '" + text + "'");
    const std::string tok = item.substr(first, last - first + 1);
    double v = 0.0;
    const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (r.ec != std::errc{} || r.ptr != tok.data() + tok.size()) {
      throw ConfigError(what + ": cannot parse '" + tok + "' as a number");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError(what + ": no values given");
  return out;
}

enum class Format { csv, json };

struct RunConfig {
  std::string system;  // a geometry class name or a reduced-system name
  std::vector<double> initial;
  double alpha_prime = 0.0;
  Direction direction = Direction::forward;
  double t_max = 1.0;
  std::vector<double> output_times;
  std::size_t sample_count = 0;
  IntegratorControls controls;
  Format emit = Format::csv;
  std::string output_path;  // empty: standard output

  /// Sample count defaults to 201 when neither sampling mode is given.
  OutputSpec output_spec() const {
    if (!output_times.empty() && sample_count != 0) {
      throw ConfigError("set either output times or a sample count, not both");
    }
    if (!output_times.empty()) return {output_times, 0};
    return {{}, sample_count != 0 ? sample_count : 201};
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["system"] = system;
    j["init"] = initial;
    j["alpha"] = alpha_prime;
    j["direction"] = std::string(to_string(direction));
    j["tmax"] = t_max;
    if (!output_times.empty()) j["times"] = output_times;
    j["samples"] = output_spec().count;
    j["rel_tol"] = controls.rel_tol;
    j["abs_tol"] = controls.abs_tol;
    j["min_scale_floor"] = controls.min_scale_floor;
    j["format"] = emit == Format::csv ? "csv" : "json";
    return j;
  }
};

// ------------------------------------------------------------ trajectories

template <std::size_t N>
std::vector<std::string> trajectory_columns(const System<N>& sys) {
  std::vector<std::string> cols{"t"};
  for (const auto& l : sys.labels) cols.push_back(l);
  if (sys.has_embedding()) {
    cols.push_back("scal");
    cols.push_back("rc_norm_sq");
  }
  return cols;
}

template <std::size_t N>
std::vector<double> sample_row(const System<N>& sys, const Sample<N>& s) {
  std::vector<double> row{s.t};
  for (double v : s.state) row.push_back(v);
  if (sys.has_embedding()) {
    const auto c = s.curvature ? *s.curvature : curvature_bundle(structure_constants(*sys.geometry), sys.embed(s.state));
    row.push_back(c.scal);
    row.push_back(c.rc_norm_sq);
  }
  return row;
}

inline void write_csv_row(std::ostream& os, const std::vector<double>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
  os << '\n';
}

inline void write_csv_header(std::ostream& os, const std::vector<std::string>& cols) {
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
}

template <std::size_t N>
void write_trajectory_csv(std::ostream& os, const System<N>& sys, const std::vector<Sample<N>>& samples) {
  write_csv_header(os, trajectory_columns(sys));
  for (const auto& s : samples) write_csv_row(os, sample_row(sys, s));
}

template <std::size_t N>
nlohmann::ordered_json trajectory_json(const System<N>& sys, const std::vector<Sample<N>>& samples) {
  nlohmann::ordered_json j;
  j["columns"] = trajectory_columns(sys);
  auto rows = nlohmann::ordered_json::array();
  for (const auto& s : samples) rows.push_back(sample_row(sys, s));
  j["rows"] = std::move(rows);
  return j;
}

// ------------------------------------------------------------ manifest

struct RunManifest {
  nlohmann::ordered_json config;
  std::string terminal;
  std::optional<SingularityReport> singularity;
  std::vector<DriftSummary> drift;
  double t_end = 0.0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  double wall_time_s = 0.0;

  /// Everything except wall time: identical inputs give identical output.
  nlohmann::ordered_json deterministic_json() const {
    nlohmann::ordered_json j;
    j["tool"] = "hoflow";
    j["version"] = kToolVersion;
    j["config"] = config;
    j["terminal"] = terminal;
    j["t_end"] = t_end;
    j["accepted_steps"] = accepted_steps;
    j["rejected_steps"] = rejected_steps;
    if (singularity) {
      nlohmann::ordered_json s;
      s["t_s"] = singularity->t_s;
      s["bracket"] = {singularity->t_lo, singularity->t_hi};
      s["collapsing"] = singularity->collapsing;
      s["diverging"] = singularity->diverging;
      s["degeneracy"] = std::string(to_string(singularity->degeneracy));
      j["singularity"] = s;
    } else {
      j["singularity"] = nullptr;
    }
    auto d = nlohmann::ordered_json::array();
    for (const auto& x : drift) {
      d.push_back({{"name", x.name}, {"initial", x.initial}, {"max_rel_drift", x.max_rel_drift}});
    }
    j["conserved_drift"] = d;
    return j;
  }

  nlohmann::ordered_json full_json(const std::string& timestamp) const {
    auto j = deterministic_json();
    j["wall_time_s"] = wall_time_s;
    j["timestamp"] = timestamp;
    return j;
  }
};

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw Error("write to '" + path + "' failed");
}

}  // namespace hoflow

#endif  // HOFLOW_IO_HPP
