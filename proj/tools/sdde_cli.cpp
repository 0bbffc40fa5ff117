// sdde: command-line front end for the delay-equation estimation library.
//
// Exit codes: 0 success, 1 I/O failure, 2 usage or domain error,
// 3 numerical failure (no convergence, degenerate denominator).

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sdde/chareq.hpp"
#include "sdde/error.hpp"
#include "sdde/fundsol.hpp"
#include "sdde/grid.hpp"
#include "sdde/harness.hpp"
#include "sdde/inference.hpp"
#include "sdde/kernels.hpp"
#include "sdde/limits.hpp"
#include "sdde/simul.hpp"

using namespace sdde;
using nlohmann::json;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct UsageError : Error {
  using Error::Error;
};

double drift(const CLI::App* app, double a, bool critical, bool required = true) {
  if (critical) return kCriticalDrift;
  if (required && app->count("--a") == 0) throw UsageError("--a or --a-critical is required");
  return a;
}

json residue_json(const chareq::ResidueData& r) {
  if (r.kind == chareq::ResidueData::Kind::RealRoot) return {{"kind", "real_root"}, {"psi_real", r.psi_real}};
  return {{"kind", "complex_pair"}, {"A0", r.A0}, {"B0", r.B0}};
}

int cmd_roots(double a, double tol) {
  const chareq::LeadingRoot root = chareq::leading_root(a, tol);
  const Regime regime = chareq::classify_regime(a);
  json out = {{"a", a},
              {"v0", root.v0},
              {"kappa0", root.kappa0},
              {"is_real", root.is_real},
              {"multiplicity", root.multiplicity},
              {"residual", root.residual},
              {"regime", std::string(regime_name(regime))}};
  if (regime == Regime::LAMN || regime == Regime::PLAMN || regime == Regime::LAQ_CRITICAL) {
    out["residue"] = residue_json(chareq::residue_constants(a));
    out["averaged_residue"] = residue_json(chareq::averaged_residue(a));
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_fundsol(double a, double t_max, double dt, bool fisher, double rel_tol) {
  if (fisher) {
    const fundsol::FisherLimit f = fundsol::fisher_limit_detail(a, rel_tol);
    std::cout << json{{"a", a}, {"J", f.value}, {"t_max", f.t_max}, {"dt", f.dt}, {"tail_bound", f.tail_bound}}.dump(2)
              << '\n';
    return 0;
  }
  const fundsol::FundamentalSolution fs = fundsol::fundamental_solution(a, t_max, dt);
  std::cout << "t,x,y\n";
  for (std::size_t i = 0; i <= fs.steps(); ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(fs.per_unit);
    std::cout << fmt(t) << ',' << fmt(fs.x[fs.per_unit + i]) << ',' << fmt(fs.y[i]) << '\n';
  }
  return 0;
}

void write_path_csv(std::ostream& os, const simul::SamplePath& p, bool emit_dw) {
  os << (emit_dw ? "t,x,dw\n" : "t,x\n");
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    os << fmt(p.time_of(i)) << ',' << fmt(p.x[i]);
    if (emit_dw) {
      os << ',';
      if (i >= p.per_unit && i - p.per_unit < p.dw.size()) os << fmt(p.dw[i - p.per_unit]);
    }
    os << '\n';
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw DomainError("line " + std::to_string(line) + ": bad number '" + s + "'");
  }
}

// Rebuilds a path from t,x[,dw] CSV covering [-1, T].
simul::SamplePath read_path_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("empty path input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv(line);
  const bool has_dw = header.size() == 3 && header[2] == "dw";
  if (header.size() < 2 || header[0] != "t" || header[1] != "x" || (header.size() == 3 && !has_dw) ||
      header.size() > 3)
    throw DomainError("path input header must be t,x or t,x,dw");
  std::vector<double> t, x, dw;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv(line);
    if (cells.size() < 2) throw DomainError("line " + std::to_string(lineno) + ": expected at least t,x");
    t.push_back(parse_double(cells[0], lineno));
    x.push_back(parse_double(cells[1], lineno));
    if (has_dw && cells.size() > 2 && !cells[2].empty()) dw.push_back(parse_double(cells[2], lineno));
  }
  if (t.size() < 3) throw DomainError("path input too short");
  const Grid unit = make_grid(t[1] - t[0], 1.0);
  if (std::abs(t.front() + 1.0) > 1e-9) throw InvalidGrid("path input must start at t = -1");
  const double T = t.back();
  const Grid g = make_grid(unit.dt, T);
  if (x.size() != g.steps + g.per_unit + 1) throw InvalidGrid("path input does not cover [-1, T] on its grid");
  simul::SamplePath p;
  p.model.a = std::numeric_limits<double>::quiet_NaN();
  p.model.x0 = simul::InitialSegment::sampled(std::vector<double>(x.begin(), x.begin() + g.per_unit + 1));
  p.dt = g.dt;
  p.T = g.T;
  p.per_unit = g.per_unit;
  p.steps = g.steps;
  p.x = std::move(x);
  if (has_dw) {
    if (dw.size() != g.steps) throw DomainError("dw column must have one increment per step");
    p.dw = std::move(dw);
  }
  return p;
}

json estimate_json(const inference::EstimateResult& e, std::optional<double> a_true) {
  json out = {{"a_hat", e.a_hat}, {"numerator", e.numerator}, {"denominator", e.denominator}, {"T", e.T}, {"dt", e.dt}};
  if (a_true) {
    out["a"] = *a_true;
    out["regime"] = std::string(regime_name(chareq::classify_regime(*a_true)));
    out["scaled_error"] = (e.a_hat - *a_true) / chareq::scaling(*a_true, e.T);
  }
  return out;
}

std::istream& open_input(const std::string& path, std::ifstream& file) {
  if (path == "-") return std::cin;
  file.open(path);
  if (!file) throw Error("cannot open " + path);
  return file;
}

int cmd_report_plot(const std::string& path) {
  std::ifstream file;
  std::istream& in = open_input(path, file);
  json rep;
  try {
    rep = json::parse(in);
  } catch (const json::exception& e) {
    throw DomainError(std::string("report is not valid JSON: ") + e.what());
  }
  if (!rep.contains("scaled_errors") || !rep.contains("limit_values"))
    throw DomainError("report lacks scaled_errors or limit_values");
  auto e = rep["scaled_errors"].get<std::vector<double>>();
  auto l = rep["limit_values"].get<std::vector<double>>();
  if (e.empty() || l.empty()) throw EmptySample("report has an empty sample");
  std::sort(e.begin(), e.end());
  std::sort(l.begin(), l.end());
  std::vector<double> grid(e);
  grid.insert(grid.end(), l.begin(), l.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::cout << "value,empirical_cdf,limit_cdf\n";
  for (double v : grid) {
    const double fe = static_cast<double>(std::upper_bound(e.begin(), e.end(), v) - e.begin()) / e.size();
    const double fl = static_cast<double>(std::upper_bound(l.begin(), l.end(), v) - l.begin()) / l.size();
    std::cout << fmt(v) << ',' << fmt(fe) << ',' << fmt(fl) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Estimation of the drift of a stochastic delay differential equation"};
  app.require_subcommand(1);
  std::string backend;
  app.add_option("--backend", backend, "kernel backend: scalar or avx2 (default: best available)");

  double a = 0.0, tol = 1e-12, t_max = 10.0, dt = 0.01, T = 0.0, x0 = 0.0, d = 0.0, rel_tol = 1e-7;
  bool critical = false, fisher = false, zero_noise = false, emit_dw = false;
  std::optional<std::uint64_t> seed;
  std::size_t n = 0, m = 10000, m_tail = 8000;
  std::optional<double> j_lan;
  std::string input, config, out, regime_str, report;
  unsigned jobs = 0;

  auto add_drift = [&](CLI::App* sub) {
    auto* o = sub->add_option("--a", a, "drift parameter");
    auto* c = sub->add_flag("--a-critical", critical, "use a = -pi^2/2 exactly");
    o->excludes(c);
    c->excludes(o);
  };

  auto* roots = app.add_subcommand("roots", "leading root of the characteristic equation and the regime");
  add_drift(roots);
  roots->add_option("--tol", tol, "root tolerance");

  auto* fsol = app.add_subcommand("fundsol", "fundamental solution x and delay average y as CSV t,x,y");
  add_drift(fsol);
  fsol->add_option("--t-max", t_max, "horizon (>= 1)");
  fsol->add_option("--dt", dt, "step, must divide 1 and t-max");
  fsol->add_flag("--fisher", fisher, "print the Fisher limit J_a (LAN regime) instead");
  fsol->add_option("--rel-tol", rel_tol, "relative tolerance of the Fisher limit");

  auto* sim = app.add_subcommand("simulate", "Euler path on [-1, T] as CSV t,x[,dw]");
  add_drift(sim);
  sim->add_option("--T", T, "horizon (>= 1)")->required();
  sim->add_option("--dt", dt, "step, must divide 1 and T");
  sim->add_option("--x0", x0, "constant initial segment");
  sim->add_option("--seed", seed, "master seed")->required();
  sim->add_flag("--zero-noise", zero_noise, "set every increment to zero");
  sim->add_flag("--emit-dw", emit_dw, "add the dw column");

  auto* est = app.add_subcommand("estimate", "maximum likelihood estimate from a CSV path or a fresh simulation");
  add_drift(est);
  est->add_option("--input", input, "path CSV (t,x[,dw]); '-' for stdin");
  est->add_option("--T", T, "horizon for an inline simulation");
  est->add_option("--dt", dt, "step for an inline simulation");
  est->add_option("--x0", x0, "constant initial segment for an inline simulation");
  est->add_option("--seed", seed, "seed for an inline simulation");

  auto* lim = app.add_subcommand("limit-sample", "draws from a limit law, one per line");
  lim->add_option("--regime", regime_str, "LAN, LAQ_ZERO, LAQ_CRITICAL, LAMN or PLAMN")->required();
  lim->add_option("--n", n, "number of draws")->required();
  lim->add_option("--seed", seed, "master seed")->required();
  add_drift(lim);
  lim->add_option("--j", j_lan, "LAN information (default: J_a from --a)");
  lim->add_option("--x0", x0, "constant initial segment (LAMN, PLAMN)");
  lim->add_option("--d", d, "PLAMN phase");
  lim->add_option("--m", m, "Wiener grid steps (LAQ)");
  lim->add_option("--m-tail", m_tail, "tail quadrature steps (LAMN, PLAMN)");
  lim->add_option("--jobs", jobs, "worker threads");

  auto* exp = app.add_subcommand("experiment", "Monte Carlo experiment; prints the report as JSON");
  exp->add_option("--config", config, "config file")->required();
  exp->add_option("--jobs", jobs, "worker threads (overrides the config)");
  exp->add_option("--out", out, "output prefix for <out>.json and <out>.csv (overrides the config)");

  auto* plot = app.add_subcommand("report-plot", "empirical vs limit CDFs of a report as CSV");
  plot->add_option("--report", report, "report JSON; '-' for stdin")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    std::cerr << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  const CLI::App* active = app.get_subcommands().front();
  try {
    if (!backend.empty()) {
      if (backend == "scalar")
        kernels::set_backend(kernels::Backend::Scalar);
      else if (backend == "avx2")
        kernels::set_backend(kernels::Backend::Avx2);
      else
        throw UsageError("--backend must be scalar or avx2");
    }

    if (active == roots) return cmd_roots(drift(active, a, critical), tol);
    if (active == fsol) return cmd_fundsol(drift(active, a, critical), t_max, dt, fisher, rel_tol);

    if (active == sim) {
      const simul::DelayModel model{drift(active, a, critical), simul::InitialSegment::constant(x0)};
      const simul::SamplePath p =
          simul::simulate_path(model, T, dt, *seed, zero_noise ? simul::Noise::Zero : simul::Noise::Gaussian);
      write_path_csv(std::cout, p, emit_dw);
      return 0;
    }

    if (active == est) {
      const bool has_a = critical || active->count("--a") > 0;
      if (!input.empty()) {
        std::ifstream file;
        const simul::SamplePath p = read_path_csv(open_input(input, file));
        std::optional<double> a_true;
        if (has_a) a_true = drift(active, a, critical);
        std::cout << estimate_json(inference::mle(p), a_true).dump(2) << '\n';
        return 0;
      }
      if (!seed || active->count("--T") == 0)
        throw UsageError("estimate needs --input, or --a, --T and --seed for an inline simulation");
      const simul::DelayModel model{drift(active, a, critical), simul::InitialSegment::constant(x0)};
      const simul::SamplePath p = simul::simulate_path(model, T, dt, *seed);
      std::cout << estimate_json(inference::mle(p), model.a).dump(2) << '\n';
      return 0;
    }

    if (active == lim) {
      const std::optional<Regime> parsed = parse_regime(regime_str);
      if (!parsed) throw UsageError("unknown regime " + regime_str);
      const Regime regime = *parsed;
      const unsigned nj = std::max(1u, jobs);
      const simul::InitialSegment seg = simul::InitialSegment::constant(x0);
      limits::LimitSample s;
      switch (regime) {
        case Regime::LAN:
          s = limits::sample_lan_limit(j_lan ? *j_lan : fundsol::fisher_limit(drift(active, a, critical)), n, *seed);
          break;
        case Regime::LAQ_ZERO:
          s = limits::sample_df_limit(n, m, *seed, nj);
          break;
        case Regime::LAQ_CRITICAL:
          s = limits::sample_critical_limit(n, m, *seed, nj);
          break;
        case Regime::LAMN:
          s = limits::sample_lamn_limit(drift(active, a, critical), seg, n, m_tail, *seed, nj);
          break;
        case Regime::PLAMN:
          s = limits::sample_plamn_limit(drift(active, a, critical), seg, d, n, m_tail, *seed, nj);
          break;
      }
      for (double v : s.values) std::cout << fmt(v) << '\n';
      return 0;
    }

    if (active == exp) {
      harness::ExperimentConfig cfg = harness::load_config(config);
      if (jobs > 0) cfg.jobs = jobs;
      if (!out.empty()) cfg.out = out;
      const harness::MCReport rep = harness::run_experiment(cfg);
      if (!cfg.out.empty()) harness::write_outputs(rep, cfg.out);
      std::cout << harness::to_json(rep).dump(2) << '\n';
      return 0;
    }

    if (active == plot) return cmd_report_plot(report);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << active->help();
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n\n" << active->help();
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}
