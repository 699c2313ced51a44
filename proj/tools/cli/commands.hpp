#pragma once

// The five CLI commands. Each returns a process exit code; the pipeline
// pieces (build_input, run_simulation, ...) are separate so tests can use
// them without touching the filesystem.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "twophoton/analytic.hpp"
#include "twophoton/correlations.hpp"
#include "twophoton/csv.hpp"
#include "twophoton/oracle.hpp"
#include "twophoton/propagate.hpp"
#include "twophoton/version.hpp"

namespace twophoton::cli {

enum ExitCode : int { ok = 0, config_error = 2, tolerance_failure = 3, io_error = 4 };

struct CommandOptions {
  bool check = false;
  bool linear_only = false;
};

/// Input pulse: a one-photon factor (product state) or a general
/// two-photon amplitude, plus its support.
struct PulseInput {
  std::optional<Wavefunction1> factor;
  std::optional<Wavefunction2> general;
  double support_min = 0.0, support_max = 0.0;
  std::vector<std::string> warnings;

  Wavefunction2 two_photon() const { return general ? *general : Wavefunction2::product(*factor); }
};

inline std::vector<double> pulse_breakpoints(const RunConfig& cfg) {
  if (cfg.pulse.kind == PulseKind::rectangular) return {0.0, cfg.pulse.length};
  return {};
}

inline Grid1D output_grid(const RunConfig& cfg) {
  const auto bps = pulse_breakpoints(cfg);
  try {
    return Grid1D::aligned(cfg.grid.x_min, cfg.grid.x_max, cfg.grid.n, bps);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

inline cplx gaussian_amplitude(double x, double center, double width) {
  const double norm = std::pow(2.0 * std::numbers::pi * width * width, -0.25);
  const double u = (x - center) / width;
  return norm * std::exp(-0.25 * u * u);
}

namespace detail {

inline bool looks_two_photon(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read pulse file '" + path + "'");
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    return line.rfind("x1", 0) == 0;
  }
  throw IoError("pulse file '" + path + "' has no header");
}

inline std::string fmt(double d) {
  std::ostringstream os;
  os.precision(17);
  os << d;
  return os.str();
}

}  // namespace detail

/// Loads or builds the input pulse. Built-in pulses are sampled on `grid`;
/// file pulses keep their own grid and are renormalized to unit norm.
inline PulseInput build_input(const RunConfig& cfg, const Grid1D& grid) {
  PulseInput in;
  switch (cfg.pulse.kind) {
    case PulseKind::rectangular:
      in.factor = Wavefunction1::rectangular(cfg.pulse.length, grid);
      in.support_min = 0.0;
      in.support_max = cfg.pulse.length;
      break;
    case PulseKind::gaussian: {
      const double c = cfg.pulse.center, w = cfg.pulse.width;
      in.factor = Wavefunction1::from_function(grid, [&](double x, Limit) { return gaussian_amplitude(x, c, w); });
      in.support_min = c - 6.0 * w;
      in.support_max = c + 6.0 * w;
      break;
    }
    case PulseKind::file: {
      std::ifstream f(cfg.pulse.path);
      if (!f) throw IoError("cannot read pulse file '" + cfg.pulse.path + "'");
      double norm = 0.0;
      if (detail::looks_two_photon(cfg.pulse.path)) {
        auto w = read_csv2(f);
        norm = norm2(w);
        in.general = norm > 0.0 ? w.scaled(1.0 / std::sqrt(norm)) : w;
        in.support_min = w.grid().x_min();
        in.support_max = w.grid().x_max();
      } else {
        auto w = read_csv1(f);
        norm = norm1(w);
        in.factor = norm > 0.0 ? w.scaled(1.0 / std::sqrt(norm)) : w;
        std::tie(in.support_min, in.support_max) = input_support(w);
      }
      if (norm == 0.0)
        in.warnings.push_back("pulse file has zero norm; not renormalized");
      else if (std::abs(norm - 1.0) > 1e-6)
        in.warnings.push_back("pulse renormalized from norm " + detail::fmt(norm) + " to 1");
      break;
    }
  }
  const double tol = 1e-12 * std::max(1.0, std::abs(in.support_max - in.support_min));
  if (in.support_min < grid.x_min() - tol || in.support_max > grid.x_max() + tol)
    throw ConfigError("grid [" + detail::fmt(grid.x_min()) + ", " + detail::fmt(grid.x_max()) +
                      "] does not cover the pulse support [" + detail::fmt(in.support_min) + ", " +
                      detail::fmt(in.support_max) + "]");
  return in;
}

/// Grid range for file pulses without an explicit grid: ten relaxation
/// lengths below the support.
inline RunConfig resolve_file_grid(RunConfig cfg) {
  if (cfg.pulse.kind != PulseKind::file || cfg.grid.explicit_range) return cfg;
  std::ifstream f(cfg.pulse.path);
  if (!f) throw IoError("cannot read pulse file '" + cfg.pulse.path + "'");
  double lo, hi;
  if (detail::looks_two_photon(cfg.pulse.path)) {
    auto w = read_csv2(f);
    lo = w.grid().x_min();
    hi = w.grid().x_max();
  } else {
    auto w = read_csv1(f);
    std::tie(lo, hi) = input_support(w);
  }
  cfg.grid.x_min = lo - 10.0 * cfg.params.relaxation_length();
  cfg.grid.x_max = hi;
  cfg.entries["grid.x_min"] = detail::fmt(cfg.grid.x_min);
  cfg.entries["grid.x_max"] = detail::fmt(cfg.grid.x_max);
  return cfg;
}

struct Simulation {
  Grid1D grid;
  PulseInput input;
  TwoPhotonResult result;
  double seconds = 0.0;
};

inline Simulation run_simulation(const RunConfig& cfg_in) {
  const RunConfig cfg = resolve_file_grid(cfg_in);
  const auto t0 = std::chrono::steady_clock::now();
  Grid1D grid = output_grid(cfg);
  PulseInput in = build_input(cfg, grid);
  auto res = apply_two_photon(in.two_photon(), grid, cfg.params);
  const auto t1 = std::chrono::steady_clock::now();
  return {std::move(grid), std::move(in), std::move(res), std::chrono::duration<double>(t1 - t0).count()};
}

/// Largest |simulated - closed form| over the grid, for rectangular pulses.
inline double closed_form_deviation(const RunConfig& cfg, const Wavefunction2& psi) {
  const auto& g = psi.grid();
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) {
      const cplx ref = rect_two_photon_out(g[i], g[j], cfg.pulse.length, cfg.params, g.limit(i), g.limit(j));
      worst = std::max(worst, std::abs(psi(i, j) - ref));
    }
  return worst;
}

/// Key/value manifest writer; keys are emitted in insertion order.
class Manifest {
 public:
  void set(const std::string& k, const std::string& v) { rows_.emplace_back(k, v); }
  void set(const std::string& k, double v) { set(k, detail::fmt(v)); }
  void config(const RunConfig& cfg) {
    set("version", std::string(version));
    for (const auto& [k, v] : cfg.entries) set("config." + k, v);
  }
  void write(const std::filesystem::path& p) const {
    std::ofstream f(p);
    if (!f) throw IoError("cannot write '" + p.string() + "'");
    for (const auto& [k, v] : rows_) f << k << " = " << v << '\n';
    if (!f) throw IoError("write failed for '" + p.string() + "'");
  }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

inline std::string header_comment(const RunConfig& cfg, const std::string& what) {
  std::string s = std::string("twophoton ") + version + " " + what;
  // the output directory is left out so reruns elsewhere give identical files
  for (const auto& [k, v] : cfg.entries)
    if (k != "out") s += " " + k + "=" + v;
  return s;
}

inline std::filesystem::path prepare_out(const RunConfig& cfg) {
  std::filesystem::path dir(cfg.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + cfg.out + "': " + ec.message());
  return dir;
}

template <class W>
void write_grid(const std::filesystem::path& p, const W& psi, const std::string& comment) {
  std::ofstream f(p);
  if (!f) throw IoError("cannot write '" + p.string() + "'");
  write_csv(f, psi, comment);
  if (!f) throw IoError("write failed for '" + p.string() + "'");
}

inline void report_warnings(const std::vector<std::string>& w, Manifest& m) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    std::cerr << "warning: " << w[i] << '\n';
    m.set("warning." + std::to_string(i), w[i]);
  }
}

inline double tolerance_or(const RunConfig& cfg, double fallback) {
  return cfg.check_tolerance > 0.0 ? cfg.check_tolerance : fallback;
}

inline int check_result(bool pass, const std::string& what, double value, double tol) {
  std::cout << "check " << what << ": " << detail::fmt(value) << (pass ? " <= " : " > ") << detail::fmt(tol)
            << (pass ? " ok" : " FAILED") << '\n';
  return pass ? ok : tolerance_failure;
}

inline int cmd_simulate(const RunConfig& cfg, const CommandOptions& opt) {
  auto sim = run_simulation(cfg);
  const auto dir = prepare_out(cfg);
  Manifest m;
  m.config(cfg);
  std::vector<std::string> warnings = sim.input.warnings;
  warnings.insert(warnings.end(), sim.result.diagnostics.warnings.begin(), sim.result.diagnostics.warnings.end());
  report_warnings(warnings, m);
  write_grid(dir / "psi_out.csv", sim.result.total, header_comment(cfg, "psi_out"));
  write_grid(dir / "psi_lin.csv", sim.result.linear, header_comment(cfg, "psi_lin"));
  write_grid(dir / "psi_nonlin.csv", sim.result.nonlinear, header_comment(cfg, "psi_nonlin"));
  const double n_in = norm2(sim.input.two_photon());
  const double n_out = norm2(sim.result.total);
  m.set("grid.points", static_cast<double>(sim.grid.size()));
  m.set("grid.spacing", sim.grid.spacing());
  m.set("norm.input", n_in);
  m.set("norm.output", n_out);
  m.set("norm.linear", norm2(sim.result.linear));
  m.set("norm.nonlinear", norm2(sim.result.nonlinear));
  m.set("quadrature.exact", sim.result.diagnostics.exact ? "true" : "false");
  m.set("quadrature.refinements", static_cast<double>(sim.result.diagnostics.quadrature.refinements));
  m.set("quadrature.converged", sim.result.diagnostics.quadrature.converged ? "true" : "false");
  m.set("timing.seconds", sim.seconds);
  int code = ok;
  if (opt.check) {
    if (cfg.pulse.kind == PulseKind::rectangular) {
      const double dev = closed_form_deviation(cfg, sim.result.total);
      const double tol = tolerance_or(cfg, 1e-10);
      m.set("check.closed_form_max_abs", dev);
      code = check_result(dev <= tol, "max |psi - closed form|", dev, tol);
    } else {
      const double dev = std::abs(n_out - n_in);
      const double tol = tolerance_or(cfg, 1e-4);
      m.set("check.norm_change", dev);
      code = check_result(dev <= tol, "|norm_out - norm_in|", dev, tol);
    }
  }
  m.write(dir / "manifest.txt");
  std::cout << "wrote " << (dir / "psi_out.csv").string() << " (" << sim.grid.size() << "^2 points)\n";
  return code;
}

inline int cmd_g2(const RunConfig& cfg_in, const CommandOptions& opt) {
  RunConfig cfg = cfg_in;
  const auto norm = cfg.g2_normalization == "local" ? G2Normalization::local : G2Normalization::long_pulse;
  if (norm == G2Normalization::long_pulse && cfg.pulse.kind != PulseKind::rectangular && !cfg.pulse.length_given)
    throw ConfigError("long_pulse normalization needs pulse.length for non-rectangular pulses");
  Manifest m;
  std::optional<Wavefunction2> psi;
  if (!cfg.g2_grid.empty()) {
    if (opt.linear_only) throw ConfigError("--linear-only cannot be applied to a saved grid");
    std::ifstream f(cfg.g2_grid);
    if (!f) throw IoError("cannot read '" + cfg.g2_grid + "'");
    psi = read_csv2(f);
  } else {
    auto sim = run_simulation(cfg);
    std::vector<std::string> w = sim.input.warnings;
    w.insert(w.end(), sim.result.diagnostics.warnings.begin(), sim.result.diagnostics.warnings.end());
    report_warnings(w, m);
    psi = opt.linear_only ? std::move(sim.result.linear) : std::move(sim.result.total);
  }
  cfg.entries["g2.linear_only"] = opt.linear_only ? "true" : "false";
  auto curve = g2_slice(*psi, cfg.anchor_x, cfg.tau_min, cfg.tau_max, cfg.tau_n, cfg.pulse.length, cfg.params, norm);
  const auto zeros = find_dip_zeros(curve);
  const auto dir = prepare_out(cfg);
  {
    std::ofstream f(dir / "g2.csv");
    if (!f) throw IoError("cannot write '" + (dir / "g2.csv").string() + "'");
    write_curve_csv(f, curve, header_comment(cfg, "g2"));
    if (!f) throw IoError("write failed for g2.csv");
  }
  m.config(cfg);
  std::string zs;
  for (double z : zeros) zs += (zs.empty() ? "" : ", ") + detail::fmt(z);
  m.set("zeros.count", static_cast<double>(zeros.size()));
  m.set("zeros", zs.empty() ? "none" : zs);
  std::cout << "zeros: " << (zs.empty() ? "none" : zs) << '\n';
  int code = ok;
  if (opt.check) {
    if (opt.linear_only) {
      code = check_result(zeros.empty(), "zero count (expected 0)", static_cast<double>(zeros.size()), 0.0);
    } else {
      const double expect = 2.0 * std::numbers::ln2 / cfg.params.gamma;
      const double tol = tolerance_or(cfg, 1e-3);
      double worst = zeros.size() == 2 ? std::max(std::abs(zeros[0] + expect), std::abs(zeros[1] - expect)) : INFINITY;
      m.set("check.zero_offset", worst);
      code = check_result(worst <= tol, "|zero - (+-2 ln2/gamma)|", worst, tol);
    }
  }
  m.write(dir / "manifest.txt");
  return code;
}

struct OracleComparison {
  double rel_l2 = 0.0;
  double norm_drift = 0.0;
  std::vector<TracePoint> trace;
  std::optional<Wavefunction1> field1;
  std::optional<Wavefunction2> field2;
};

/// Runs the lab-frame integrator at one dx and compares the far field with
/// the scattering map (closed form for rectangles).
inline OracleComparison run_oracle(const RunConfig& cfg, const PulseInput& in, double dx, bool two, bool keep_field) {
  const auto& p = cfg.params;
  const double lo = in.support_min, hi = in.support_max;
  const double t_end = oracle_end_time(lo, hi, p);
  const bool rect = cfg.pulse.kind == PulseKind::rectangular;
  const double length = cfg.pulse.length;
  OracleComparison out;
  std::function<cplx(double)> f1;
  if (in.factor) {
    const Wavefunction1& fac = *in.factor;
    if (const auto* pc = fac.exact())
      f1 = [pc](double x) { return pc->value(x); };
    else
      f1 = [&fac](double x) { return fac.at(x); };
  }
  if (!two) {
    if (!in.factor) throw ConfigError("oracle.mode = one needs a one-photon pulse");
    auto run = run_one_photon(prepare_one_photon(f1, lo, hi, dx, p), dx, t_end, p, true);
    auto ff = far_field(run.state, p);
    if (rect) {
      out.rel_l2 = relative_l2(ff, [&](double x) { return rect_one_photon_out(x, length, p); });
    } else {
      auto ref = apply_one_photon(*in.factor, ff.grid(), p).psi;
      out.rel_l2 = relative_l2(ff.amp(), ref.amp());
    }
    out.norm_drift = run.norm_drift();
    out.trace = std::move(run.trace);
    if (keep_field) out.field1 = std::move(ff);
    return out;
  }
  LabState2 s0;
  if (in.factor) {
    s0 = prepare_two_photon([&](double a, double b) { return f1(a) * f1(b); }, lo, hi, dx, p);
  } else {
    const Wavefunction2& w = *in.general;
    s0 = prepare_two_photon(
        [&w](double a, double b) {
          const auto& g = w.grid();
          return g.contains(a) && g.contains(b) ? w.at(a, b) : cplx{};
        },
        lo, hi, dx, p);
  }
  auto run = run_two_photon(std::move(s0), dx, t_end, p, true);
  out.norm_drift = run.norm_drift();
  out.trace = std::move(run.trace);
  auto ff = far_field(run.state, p);
  run.state = LabState2{};
  if (rect) {
    out.rel_l2 = relative_l2(ff, [&](double a, double b) { return rect_two_photon_out(a, b, length, p); });
  } else {
    Wavefunction2 src = in.general ? *in.general : Wavefunction2::product(*in.factor);
    auto ref = apply_two_photon(src, ff.grid(), p).total;
    out.rel_l2 = relative_l2(ff.amp(), ref.amp());
  }
  if (keep_field) out.field2 = std::move(ff);
  return out;
}

inline int cmd_oracle(const RunConfig& cfg_in, const CommandOptions& opt) {
  const RunConfig cfg = resolve_file_grid(cfg_in);
  const bool two = cfg.oracle_mode == "two";
  const auto t0 = std::chrono::steady_clock::now();
  // built-in pulses are sampled finely enough for the far-field reference
  RunConfig fine = cfg;
  if (cfg.pulse.kind == PulseKind::gaussian) {
    fine.grid.x_min = cfg.pulse.center - 6.0 * cfg.pulse.width;
    fine.grid.x_max = cfg.pulse.center + 6.0 * cfg.pulse.width;
    fine.grid.n = std::max<std::size_t>(cfg.grid.n, static_cast<std::size_t>(12.0 * cfg.pulse.width / (0.25 * cfg.oracle_dx)) + 1);
  }
  Grid1D g = output_grid(fine);
  PulseInput in = build_input(fine, g);
  const bool keep = two ? cfg.oracle_write_field : true;
  auto coarse = run_oracle(cfg, in, cfg.oracle_dx, two, keep);
  auto half = run_oracle(cfg, in, 0.5 * cfg.oracle_dx, two, false);
  const double ratio = half.rel_l2 > 0.0 ? coarse.rel_l2 / half.rel_l2 : 0.0;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const auto dir = prepare_out(cfg);
  Manifest m;
  m.config(cfg);
  report_warnings(in.warnings, m);
  m.set("oracle.rel_l2", coarse.rel_l2);
  m.set("oracle.rel_l2_half_dx", half.rel_l2);
  m.set("oracle.convergence_ratio", ratio);
  m.set("oracle.norm_drift", coarse.norm_drift);
  m.set("oracle.norm_drift_half_dx", half.norm_drift);
  m.set("timing.seconds", secs);
  {
    std::ofstream f(dir / "oracle_trace.csv");
    if (!f) throw IoError("cannot write oracle_trace.csv");
    f << "# " << header_comment(cfg, "excitation trace") << "\nt,value\n";
    char buf[64];
    for (const auto& tp : coarse.trace) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", tp.t, tp.value);
      f << buf;
    }
  }
  if (coarse.field1) write_grid(dir / "oracle_far_field.csv", *coarse.field1, header_comment(cfg, "oracle far field"));
  if (coarse.field2) write_grid(dir / "oracle_far_field.csv", *coarse.field2, header_comment(cfg, "oracle far field"));
  std::cout << "rel_l2(dx) = " << detail::fmt(coarse.rel_l2) << "\nrel_l2(dx/2) = " << detail::fmt(half.rel_l2)
            << "\nratio = " << detail::fmt(ratio) << '\n';
  int code = ok;
  if (opt.check) {
    const double tol = tolerance_or(cfg, two ? 5e-2 : 2e-2);
    code = check_result(coarse.rel_l2 <= tol, "oracle rel_l2", coarse.rel_l2, tol);
  }
  m.write(dir / "manifest.txt");
  return code;
}

inline int cmd_compare(const std::string& a, const std::string& b, double tol, const CommandOptions& opt) {
  const bool two_a = detail::looks_two_photon(a), two_b = detail::looks_two_photon(b);
  if (two_a != two_b) {
    std::cerr << "error: grid mismatch: " << a << " is " << (two_a ? "2D" : "1D") << ", " << b << " is "
              << (two_b ? "2D" : "1D") << '\n';
    return config_error;
  }
  std::ifstream fa(a), fb(b);
  if (!fa || !fb) throw IoError("cannot read input files");
  std::span<const cplx> va, vb;
  std::optional<Wavefunction1> a1, b1;
  std::optional<Wavefunction2> a2, b2;
  const Grid1D* ga;
  const Grid1D* gb;
  if (two_a) {
    a2 = read_csv2(fa, nullptr, SymmetryPolicy::average);
    b2 = read_csv2(fb, nullptr, SymmetryPolicy::average);
    va = a2->amp();
    vb = b2->amp();
    ga = &a2->grid();
    gb = &b2->grid();
  } else {
    a1 = read_csv1(fa);
    b1 = read_csv1(fb);
    va = a1->amp();
    vb = b1->amp();
    ga = &a1->grid();
    gb = &b1->grid();
  }
  if (!ga->same_nodes(*gb)) {
    std::cerr << "error: grid mismatch: " << ga->size() << " nodes on [" << detail::fmt(ga->x_min()) << ", "
              << detail::fmt(ga->x_max()) << "] vs " << gb->size() << " nodes on [" << detail::fmt(gb->x_min())
              << ", " << detail::fmt(gb->x_max()) << "]\n";
    return config_error;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) worst = std::max(worst, std::abs(va[i] - vb[i]));
  const double rel = relative_l2(va, vb);
  std::cout << "max_abs = " << detail::fmt(worst) << "\nrel_l2 = " << detail::fmt(rel) << '\n';
  if (opt.check) return check_result(worst <= tol, "max_abs", worst, tol);
  return ok;
}

inline int cmd_decompose(const RunConfig& cfg_in, const CommandOptions& opt) {
  const RunConfig cfg = resolve_file_grid(cfg_in);
  Grid1D grid = output_grid(cfg);
  PulseInput in = build_input(cfg, grid);
  const auto psi = in.two_photon();
  auto parts = decompose_two_photon(psi, grid, cfg.params);
  const auto dir = prepare_out(cfg);
  Manifest m;
  m.config(cfg);
  report_warnings(in.warnings, m);
  write_grid(dir / "process_i.csv", parts.transmitted, header_comment(cfg, "process i (both transmitted)"));
  write_grid(dir / "process_ii.csv", parts.single_reemission, header_comment(cfg, "process ii (one reemitted)"));
  write_grid(dir / "process_iii.csv", parts.double_reemission, header_comment(cfg, "process iii (both reemitted)"));
  write_grid(dir / "nonlinear.csv", parts.nonlinear, header_comment(cfg, "nonlinear part of process iii"));
  int code = ok;
  if (opt.check) {
    const auto total = apply_two_photon(psi, grid, cfg.params).total;
    const std::size_t n = grid.size();
    double sum_dev = 0.0, closed_dev = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const cplx s = parts.transmitted(i, j) + parts.single_reemission(i, j) + parts.double_reemission(i, j);
        sum_dev = std::max(sum_dev, std::abs(s - total(i, j)));
        const double x1 = grid[i], x2 = grid[j];
        const double len = cfg.pulse.length;
        auto inside = [&](double x, Limit l) {
          return x >= 0 && x <= len && !(x == 0 && l == Limit::left) && !(x == len && l == Limit::right);
        };
        if (cfg.pulse.kind == PulseKind::rectangular && inside(x1, grid.limit(i)) && inside(x2, grid.limit(j))) {
          const auto pa = rect_process_amplitudes(x1, x2, cfg.pulse.length, cfg.params);
          closed_dev = std::max({closed_dev, std::abs(pa.p_i - parts.transmitted(i, j)),
                                 std::abs(pa.p_ii - parts.single_reemission(i, j)),
                                 std::abs(pa.p_iii - parts.double_reemission(i, j))});
        }
      }
    m.set("check.sum_vs_total", sum_dev);
    m.set("check.closed_form_max_abs", closed_dev);
    const double tol = tolerance_or(cfg, 1e-10);
    code = check_result(sum_dev <= 1e-12 && closed_dev <= tol, "process split", std::max(sum_dev, closed_dev), tol);
  }
  m.write(dir / "manifest.txt");
  std::cout << "wrote process grids to " << dir.string() << '\n';
  return code;
}

}  // namespace twophoton::cli
