// The `hoflow` command-line front end. Kept in a header so tests can drive it
// in-process; tools/hoflow.cpp only forwards main().

#ifndef HOFLOW_CLI_HPP
#define HOFLOW_CLI_HPP

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hoflow/analysis.hpp"
#include "hoflow/io.hpp"
#include "hoflow/verification.hpp"

namespace hoflow::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kIntegratorFailure = 2, kVerificationFailure = 3 };

struct Options {
  std::string cls;
  std::string system;
  std::vector<double> init;
  double alpha = 0.0;
  std::string direction = "forward";
  std::optional<double> tmax;
  std::optional<std::size_t> samples;
  std::vector<double> times;
  double rel_tol = IntegratorControls{}.rel_tol;
  double abs_tol = IntegratorControls{}.abs_tol;
  std::vector<double> box;
  std::size_t grid = 10;
  std::string suite = "all";
  std::string out;
  std::string format = "csv";
  std::vector<double> omega{0.5, 2.0, 10.0};
};

namespace detail {

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string system_name(const Options& o) {
  if (!o.cls.empty() && !o.system.empty()) throw ConfigError("give either --class or --system, not both");
  if (!o.cls.empty()) {
    if (!parse_geometry_class(o.cls)) throw ConfigError("unknown class '" + o.cls + "' (su2, nil, sol, isom, sl2r)");
    return o.cls;
  }
  if (!o.system.empty()) return o.system;
  throw ConfigError("a system is required: --class or --system");
}

inline AnySystem resolve_system(const Options& o) {
  const std::string name = system_name(o);
  auto sys = make_system(name, o.alpha);
  if (!sys) {
    std::string known;
    for (const auto& n : system_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown system '" + name + "' (known: " + known + ")");
  }
  return *sys;
}

inline Direction parse_direction(const std::string& s) {
  if (s == "forward") return Direction::forward;
  if (s == "backward") return Direction::backward;
  throw ConfigError("--direction must be forward or backward");
}

inline RunConfig make_run_config(const Options& o, double default_tmax) {
  RunConfig rc;
  rc.system = system_name(o);
  rc.initial = o.init;
  rc.alpha_prime = o.alpha;
  rc.direction = parse_direction(o.direction);
  rc.t_max = o.tmax.value_or(default_tmax);
  rc.output_times = o.times;
  if (o.samples) {
    if (*o.samples == 0) throw ConfigError("--samples must be at least 1");
    rc.sample_count = *o.samples;
  }
  rc.controls.rel_tol = o.rel_tol;
  rc.controls.abs_tol = o.abs_tol;
  rc.controls.validate();
  if (!(rc.t_max > 0.0)) throw ConfigError("--tmax must be positive");
  if (o.format == "csv") rc.emit = Format::csv;
  else if (o.format == "json") rc.emit = Format::json;
  else throw ConfigError("--format must be csv or json");
  rc.output_path = o.out;
  (void)rc.output_spec();
  return rc;
}

template <std::size_t N>
Vec<N> state_from(const System<N>& sys, const std::vector<double>& v) {
  if (v.size() != N) {
    std::string labels;
    for (const auto& l : sys.labels) labels += (labels.empty() ? "" : ",") + l;
    throw ConfigError("--init for " + sys.name + " needs " + std::to_string(N) + " values (" + labels + "), got " +
                      std::to_string(v.size()));
  }
  Vec<N> y{};
  std::copy(v.begin(), v.end(), y.begin());
  validate_initial(sys, y);
  return y;
}

template <std::size_t N>
Box<N> box_from(const std::vector<double>& v) {
  if (v.size() != 2 * N) {
    throw ConfigError("--box needs " + std::to_string(2 * N) + " values: lo,hi for each coordinate");
  }
  Box<N> b;
  for (std::size_t i = 0; i < N; ++i) {
    b.lo[i] = v[2 * i];
    b.hi[i] = v[2 * i + 1];
  }
  b.validate();
  return b;
}

// Writes to the path, or to `out` when the path is empty.
inline void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
  } else {
    write_text_file(path, content);
  }
}

template <std::size_t N>
nlohmann::ordered_json fixed_point_json(const System<N>& sys, const FixedPoint<N>& fp) {
  nlohmann::ordered_json j;
  for (std::size_t i = 0; i < N; ++i) j["state"][sys.labels[i]] = fp.state[i];
  j["residual_norm"] = fp.residual_norm;
  j["classification"] = std::string(to_string(fp.classification));
  auto eig = nlohmann::ordered_json::array();
  for (const auto& e : fp.eigenvalues) eig.push_back({e.real(), e.imag()});
  j["eigenvalues"] = eig;
  return j;
}

}  // namespace detail

// ------------------------------------------------------------ simulate

inline int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig rc = detail::make_run_config(o, 10.0);
  const AnySystem any = detail::resolve_system(o);
  return std::visit(
      [&](const auto& sys) -> int {
        const auto y0 = detail::state_from(sys, rc.initial);
        const auto start = std::chrono::steady_clock::now();
        const auto tr = integrate(sys, y0, rc.direction, rc.t_max, rc.controls, rc.output_spec());

        RunManifest m;
        m.config = rc.to_json();
        m.terminal = std::string(to_string(tr.terminal));
        m.t_end = tr.t_end();
        m.accepted_steps = tr.accepted;
        m.rejected_steps = tr.rejected;
        if (tr.terminal == Terminal::singular) m.singularity = detect_singularity(tr, sys, rc.controls);
        m.drift = measure_drift(tr, invariants_for(sys));
        m.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        std::ostringstream data;
        if (rc.emit == Format::csv) {
          write_trajectory_csv(data, sys, tr.samples);
        } else {
          nlohmann::ordered_json j;
          j["manifest"] = m.deterministic_json();
          j["trajectory"] = trajectory_json(sys, tr.samples);
          data << j.dump(2) << '\n';
        }
        detail::emit(rc.output_path, data.str(), out);
        if (!rc.output_path.empty()) {
          write_text_file(rc.output_path + ".manifest.json", m.full_json(detail::utc_timestamp()).dump(2) + "\n");
        }

        err << "terminal: " << m.terminal << " at t = " << format_double(m.t_end) << '\n';
        if (m.singularity) {
          err << "T_s = " << format_double(m.singularity->t_s) << " ("
              << to_string(m.singularity->degeneracy) << ")\n";
        }
        return tr.terminal == Terminal::step_failure ? kIntegratorFailure : kOk;
      },
      any);
}

// ------------------------------------------------------------ phase

inline int cmd_phase(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig rc = detail::make_run_config(o, 50.0);
  if (o.grid < 2) throw ConfigError("--grid must be at least 2 for a phase grid");
  const AnySystem any = detail::resolve_system(o);
  const auto* sys = std::get_if<System<2>>(&any);
  if (!sys) throw ConfigError("phase needs a two-variable reduced system (--system)");
  const Box<2> box = detail::box_from<2>(o.box);
  const std::filesystem::path dir = o.out.empty() ? std::filesystem::path("phase_out") : std::filesystem::path(o.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());

  Box<2> search = box;
  for (int i = 0; i < 2; ++i) search.lo[i] = std::min(search.lo[i], 0.0);
  const auto fps = find_fixed_points(*sys, search, 8);
  const auto classify = default_classifier<2>(fps);
  GridRunParams gp;
  gp.t_max = rc.t_max;
  gp.controls = rc.controls;
  gp.samples = rc.output_spec().count;
  const PhaseGrid grid = phase_grid(*sys, box, o.grid, gp, classify);

  nlohmann::ordered_json index;
  index["system"] = sys->name;
  index["alpha"] = rc.alpha_prime;
  index["box"] = {{box.lo[0], box.hi[0]}, {box.lo[1], box.hi[1]}};
  index["n"] = grid.n;
  index["tmax"] = rc.t_max;
  auto jfp = nlohmann::ordered_json::array();
  for (const auto& fp : fps) jfp.push_back(detail::fixed_point_json(*sys, fp));
  index["fixed_points"] = jfp;

  std::map<std::string, std::size_t> basins;
  auto seeds = nlohmann::ordered_json::array();
  for (const auto& s : grid.seeds) {
    const std::string file = "seed_" + std::to_string(s.row) + "_" + std::to_string(s.col) + ".csv";
    std::vector<Sample<2>> rows;
    if (s.backward) rows.assign(s.backward->samples.rbegin(), s.backward->samples.rend() - 1);
    if (s.forward) rows.insert(rows.end(), s.forward->samples.begin(), s.forward->samples.end());
    std::ostringstream csv;
    write_trajectory_csv(csv, *sys, rows);
    write_text_file((dir / file).string(), csv.str());
    nlohmann::ordered_json js;
    js["row"] = s.row;
    js["col"] = s.col;
    js["init"] = {s.state[0], s.state[1]};
    js["label"] = s.outcome.label();
    js["file"] = file;
    if (!s.error.empty()) js["error"] = s.error;
    seeds.push_back(js);
    ++basins[s.outcome.label()];
  }
  index["basins"] = basins;
  index["seeds"] = seeds;
  try {
    GridRunParams cp = gp;
    cp.samples = 2;
    const auto curve = critical_curve(*sys, cp, box, classify, o.grid);
    auto pts = nlohmann::ordered_json::array();
    for (const auto& p : curve) pts.push_back({p[0], p[1]});
    index["critical_curve"] = {{"points", pts}};
  } catch (const NoBoundaryError& e) {
    index["critical_curve"] = {{"points", nlohmann::ordered_json::array()}, {"note", e.what()}};
  }
  write_text_file((dir / "index.json").string(), index.dump(2) + "\n");
  out << (dir / "index.json").string() << '\n';
  err << grid.seeds.size() << " seeds, " << basins.size() << " outcome labels\n";
  return kOk;
}

// ------------------------------------------------------------ fixed-points

inline int cmd_fixed_points(const Options& o, std::ostream& out, std::ostream&) {
  if (o.format != "csv" && o.format != "json") throw ConfigError("--format must be csv or json");
  const AnySystem any = detail::resolve_system(o);
  return std::visit(
      [&](const auto& sys) -> int {
        constexpr std::size_t N = std::tuple_size_v<std::decay_t<decltype(sys.labels)>>;
        const Box<N> box = detail::box_from<N>(o.box);
        const auto fps = find_fixed_points(sys, box, std::max<std::size_t>(o.grid, 1));
        std::ostringstream os;
        if (o.format == "json") {
          nlohmann::ordered_json j;
          j["system"] = sys.name;
          j["alpha"] = o.alpha;
          auto arr = nlohmann::ordered_json::array();
          for (const auto& fp : fps) arr.push_back(detail::fixed_point_json(sys, fp));
          j["fixed_points"] = arr;
          os << j.dump(2) << '\n';
        } else {
          std::vector<std::string> cols(sys.labels.begin(), sys.labels.end());
          cols.push_back("residual_norm");
          cols.push_back("classification");
          write_csv_header(os, cols);
          for (const auto& fp : fps) {
            for (double v : fp.state) os << format_double(v) << ',';
            os << format_double(fp.residual_norm) << ',' << to_string(fp.classification) << '\n';
          }
        }
        detail::emit(o.out, os.str(), out);
        return kOk;
      },
      any);
}

// ------------------------------------------------------------ curvature

inline int cmd_curvature(const Options& o, std::ostream& out, std::ostream&) {
  const RunConfig rc = detail::make_run_config(o, 10.0);
  const AnySystem any = detail::resolve_system(o);
  return std::visit(
      [&](const auto& sys) -> int {
        if (!sys.has_embedding()) throw ConfigError("system " + sys.name + " has no metric embedding");
        const auto y0 = detail::state_from(sys, rc.initial);
        const auto tr = integrate(sys, y0, rc.direction, rc.t_max, rc.controls, rc.output_spec());
        const auto sc = structure_constants(*sys.geometry);
        std::vector<std::string> cols{"t"};
        cols.insert(cols.end(), sys.labels.begin(), sys.labels.end());
        for (const char* c : {"k12", "k23", "k31", "rc1", "rc2", "rc3", "rh1", "rh2", "rh3", "scal", "rc_norm_sq",
                              "a_over_b", "b_over_c", "max_pairwise_gap"}) {
          cols.push_back(c);
        }
        std::vector<std::vector<double>> rows;
        for (const auto& s : tr.samples) {
          const MetricState m = sys.embed(s.state);
          const auto cb = curvature_bundle(sc, m);
          const auto an = anisotropy_at(s.t, m);
          std::vector<double> row{s.t};
          row.insert(row.end(), s.state.begin(), s.state.end());
          for (double v : {cb.k12, cb.k23, cb.k31, cb.rc1, cb.rc2, cb.rc3, cb.rh1, cb.rh2, cb.rh3, cb.scal,
                           cb.rc_norm_sq, an.a_over_b, an.b_over_c, an.max_pairwise_gap}) {
            row.push_back(v);
          }
          rows.push_back(std::move(row));
        }
        std::ostringstream os;
        if (rc.emit == Format::csv) {
          write_csv_header(os, cols);
          for (const auto& r : rows) write_csv_row(os, r);
        } else {
          nlohmann::ordered_json j;
          j["config"] = rc.to_json();
          j["terminal"] = std::string(to_string(tr.terminal));
          j["columns"] = cols;
          j["rows"] = rows;
          os << j.dump(2) << '\n';
        }
        detail::emit(rc.output_path, os.str(), out);
        return tr.terminal == Terminal::step_failure ? kIntegratorFailure : kOk;
      },
      any);
}

// ------------------------------------------------------------ verify

inline int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<std::pair<std::string, verify::Suite>> selected;
  for (const auto& s : verify::suites()) {
    if (o.suite == "all" || o.suite == s.first) selected.push_back(s);
  }
  if (selected.empty()) {
    std::string known = "all";
    for (const auto& s : verify::suites()) known += ", " + s.first;
    throw ConfigError("unknown suite '" + o.suite + "' (known: " + known + ")");
  }
  nlohmann::ordered_json report;
  report["tool"] = "hoflow";
  report["version"] = kToolVersion;
  auto cases = nlohmann::ordered_json::array();
  nlohmann::ordered_json verdicts;
  bool all_pass = true;
  for (const auto& [name, run] : selected) {
    const auto rows = run();
    const bool ok = verify::suite_passed(rows);
    all_pass = all_pass && ok;
    verdicts[name] = ok;
    std::size_t failed = 0;
    for (const auto& r : rows) {
      cases.push_back(verify::to_json(r));
      if (!r.pass) ++failed;
    }
    err << (ok ? "PASS " : "FAIL ") << name << " (" << rows.size() - failed << "/" << rows.size() << " cases)\n";
  }
  report["suites"] = verdicts;
  report["pass"] = all_pass;
  report["cases"] = cases;
  detail::emit(o.out, report.dump(2) + "\n", out);
  return all_pass ? kOk : kVerificationFailure;
}

// ------------------------------------------------------------ scaling-check

inline int cmd_scaling_check(const Options& o, std::ostream& out, std::ostream& err) {
  const std::string name = detail::system_name(o);
  const auto cls = parse_geometry_class(name);
  if (!cls) throw ConfigError("scaling-check needs a full geometry class (--class)");
  if (o.init.size() != 3) throw ConfigError("--init needs 3 values (A,B,C)");
  const MetricState m{o.init[0], o.init[1], o.init[2]};
  validate(m);
  const double t = detail::parse_direction(o.direction) == Direction::forward ? o.tmax.value_or(0.1)
                                                                              : -o.tmax.value_or(0.1);
  IntegratorControls c;
  c.rel_tol = o.rel_tol;
  c.abs_tol = o.abs_tol;
  c.validate();
  nlohmann::ordered_json j;
  j["class"] = name;
  j["init"] = o.init;
  j["alpha"] = o.alpha;
  j["t"] = t;
  j["tol"] = 1e-8;
  auto res = nlohmann::ordered_json::array();
  bool ok = true;
  for (double w : o.omega) {
    const double d = scaling_equivalence_check(*cls, m, o.alpha, w, t, c);
    ok = ok && d < 1e-8;
    res.push_back({{"omega", w}, {"max_rel_diff", d}, {"pass", d < 1e-8}});
    err << "omega = " << format_double(w) << ": max relative difference " << format_double(d) << '\n';
  }
  j["results"] = res;
  j["pass"] = ok;
  detail::emit(o.out, j.dump(2) + "\n", out);
  return ok ? kOk : kVerificationFailure;
}

// ------------------------------------------------------------ entry point

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Second-order geometric flows on homogeneous 3-manifolds", "hoflow"};
  app.set_version_flag("--version", kToolVersion);
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.set_config("--config", "", "flat key=value file; command-line flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--class", o.cls, "geometry class: su2, nil, sol, isom, sl2r");
  app.add_option("--system", o.system, "registered system name (classes or reduced systems)");
  app.add_option("--init", o.init, "initial state, comma separated")->delimiter(',');
  app.add_option("--alpha", o.alpha, "alpha' (any real)");
  app.add_option("--direction", o.direction, "forward or backward");
  app.add_option("--tmax", o.tmax, "integration span |t|");
  app.add_option("--samples", o.samples, "evenly spaced output samples on [0, tmax]");
  app.add_option("--times", o.times, "explicit output times, comma separated")->delimiter(',');
  app.add_option("--rel-tol", o.rel_tol, "relative tolerance");
  app.add_option("--abs-tol", o.abs_tol, "absolute tolerance");
  app.add_option("--box", o.box, "lo,hi per coordinate, comma separated")->delimiter(',');
  app.add_option("--grid", o.grid, "grid size per axis");
  app.add_option("--suite", o.suite, "verification suite or 'all'");
  app.add_option("--out", o.out, "output file (directory for phase)");
  app.add_option("--format", o.format, "csv or json");
  app.add_option("--omega", o.omega, "scaling factors for scaling-check")->delimiter(',');

  struct Cmd {
    const char* name;
    const char* help;
    int (*fn)(const Options&, std::ostream&, std::ostream&);
  };
  const Cmd cmds[] = {
      {"simulate", "integrate one trajectory", cmd_simulate},
      {"phase", "phase-plane grid, basin labels and critical curve", cmd_phase},
      {"fixed-points", "locate and classify fixed points in a box", cmd_fixed_points},
      {"curvature", "curvature and anisotropy series along a trajectory", cmd_curvature},
      {"verify", "run verification suites", cmd_verify},
      {"scaling-check", "compare a flow with its rescaled counterpart", cmd_scaling_check},
  };
  for (const auto& c : cmds) app.add_subcommand(c.name, c.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }

  try {
    for (const auto& c : cmds) {
      if (app.got_subcommand(c.name)) return c.fn(o, out, err);
    }
    return kConfigError;
  } catch (const IntegrationError& e) {
    err << "error: " << e.what() << '\n';
    return kIntegratorFailure;
  } catch (const InconclusiveError& e) {
    err << "error: " << e.what() << '\n';
    return kIntegratorFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace hoflow::cli

#endif  // HOFLOW_CLI_HPP
