#include "sdde/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sdde/error.hpp"
#include "sdde/fundsol.hpp"
#include "sdde/grid.hpp"
#include "sdde/inference.hpp"
#include "sdde/limits.hpp"
#include "sdde/parallel.hpp"
#include "sdde/rng.hpp"

namespace sdde::harness {

namespace pt = boost::property_tree;

namespace {

constexpr std::size_t kMinSample = 50;

std::vector<double> parse_list(const std::string& s, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw DomainError("config: bad number '" + item + "' in " + key);
    }
  }
  return out;
}

template <class T>
std::optional<T> get(const pt::ptree& tree, const std::string& key) {
  const auto node = tree.get_child_optional(pt::ptree::path_type(key, '/'));
  if (!node) return std::nullopt;
  const auto v = node->get_value_optional<T>();
  if (!v) throw DomainError("config: bad value '" + node->data() + "' for " + key);
  return *v;
}

template <class T>
T require(const pt::ptree& tree, const std::string& key) {
  auto v = get<T>(tree, key);
  if (!v) throw DomainError("config: missing key " + key);
  return *v;
}

double parse_drift(const std::string& s) {
  if (s == "critical") return kCriticalDrift;
  return parse_list(s, "a").at(0);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!std::isfinite(a)) throw DomainError("config: a must be finite");
  if (n_reps < kMinSample || n_limit < kMinSample)
    throw DomainError("config: n_reps and n_limit must be at least " + std::to_string(kMinSample));
  if (jobs == 0) throw DomainError("config: jobs must be positive");
  make_grid(dt, 1.0);
  if (chareq::classify_regime(a) == Regime::PLAMN && k > 0) return;
  if (!(T >= 1.0)) throw InvalidGrid("config: T must be at least 1");
  make_grid(dt, T);
}

ExperimentConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw DomainError(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg;
  cfg.a = parse_drift(require<std::string>(tree, "a"));
  cfg.T = get<double>(tree, "T").value_or(0.0);
  cfg.dt = require<double>(tree, "dt");
  cfg.n_reps = require<std::size_t>(tree, "n_reps");
  cfg.n_limit = require<std::size_t>(tree, "n_limit");
  cfg.seed = require<std::uint64_t>(tree, "seed");
  cfg.d = get<double>(tree, "d").value_or(0.0);
  cfg.k = get<std::size_t>(tree, "k").value_or(0);
  cfg.m = get<std::size_t>(tree, "m").value_or(cfg.m);
  cfg.m_tail = get<std::size_t>(tree, "m_tail").value_or(cfg.m_tail);
  cfg.jobs = get<unsigned>(tree, "jobs").value_or(1);
  cfg.out = get<std::string>(tree, "out").value_or("");
  if (auto h = get<std::string>(tree, "h")) cfg.h = parse_list(*h, "h");

  const std::string kind = get<std::string>(tree, "x0.kind").value_or("constant");
  const std::string value = get<std::string>(tree, "x0.value").value_or("0");
  if (kind == "constant") {
    cfg.x0 = simul::InitialSegment::constant(parse_list(value, "x0.value").at(0));
  } else if (kind == "sampled") {
    cfg.x0 = simul::InitialSegment::sampled(parse_list(value, "x0.value"));
  } else {
    throw DomainError("config: x0.kind must be constant or sampled, got " + kind);
  }
  if (cfg.T == 0.0 && cfg.k == 0) throw DomainError("config: missing key T");
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path);
  return parse_config(in);
}

SampleSummary SampleSummary::of(std::span<const double> xs) {
  if (xs.empty()) throw EmptySample("summary of an empty sample");
  SampleSummary s;
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  for (std::size_t i = 0; i < kLevels.size(); ++i) {
    const double pos = kLevels[i] * (n - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    s.quantiles[i] = v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  }
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  s.mean = mean;
  s.variance = v.size() > 1 ? ss / (n - 1.0) : 0.0;
  return s;
}

double ks_distance(std::span<const double> s1, std::span<const double> s2) {
  if (s1.empty() || s2.empty()) throw EmptySample("ks_distance: both samples must be nonempty");
  std::vector<double> a(s1.begin(), s1.end()), b(s2.begin(), s2.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_threshold(std::size_t n, std::size_t m) {
  const double dn = static_cast<double>(n), dm = static_cast<double>(m);
  return 1.628 * std::sqrt((dn + dm) / (dn * dm));
}

Horizon experiment_horizon(const ExperimentConfig& cfg) {
  if (chareq::classify_regime(cfg.a) != Regime::PLAMN || cfg.k == 0) return {cfg.T, cfg.d};
  const double period = std::numbers::pi / chareq::leading_root(cfg.a).kappa0;
  if (!(cfg.d >= 0.0 && cfg.d < period))
    throw InvalidPhase("config: d = " + std::to_string(cfg.d) + " outside [0, " + std::to_string(period) + ")");
  const Grid g = make_grid(cfg.dt, 1.0);
  const double target = static_cast<double>(cfg.k) * period + cfg.d;
  const double T = std::round(target * static_cast<double>(g.per_unit)) / static_cast<double>(g.per_unit);
  if (T < 1.0) throw InvalidGrid("config: PLAMN horizon below 1");
  double d = std::fmod(T, period);
  if (d < 0.0) d += period;
  if (d >= period) d -= period;
  return {T, d};
}

MCReport run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  MCReport rep;
  rep.config = cfg;
  rep.regime = chareq::classify_regime(cfg.a);
  const Horizon hz = experiment_horizon(cfg);
  rep.T = hz.T;
  rep.d = hz.d;
  make_grid(cfg.dt, rep.T);
  const double r = chareq::scaling(cfg.a, rep.T);

  struct Slot {
    bool ok = false;
    double a_hat = 0.0;
    std::vector<double> weights;  // exp(h Delta - h^2 J / 2) per h
  };
  std::vector<Slot> slots(cfg.n_reps);
  const simul::DelayModel model{cfg.a, cfg.x0};
  const std::uint64_t paths = stream_seed(cfg.seed, Stream::Paths);
  parallel_for(cfg.n_reps, cfg.jobs, [&](std::size_t i) {
    const simul::SamplePath path = simul::simulate_path(model, rep.T, cfg.dt, substream_seed(paths, i));
    Slot& s = slots[i];
    try {
      s.a_hat = inference::mle(path).a_hat;
      s.ok = true;
    } catch (const DegenerateDenominator&) {
      return;
    }
    for (double h : cfg.h) s.weights.push_back(std::exp(inference::local_quadratic(path, cfg.a, h).loglik));
  });

  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i].ok) {
      ++rep.failed;
      continue;
    }
    rep.replication.push_back(i);
    rep.a_hat.push_back(slots[i].a_hat);
    rep.scaled_errors.push_back((slots[i].a_hat - cfg.a) / r);
  }
  if (rep.scaled_errors.empty()) throw DegenerateDenominator("every replication had a degenerate denominator");

  for (std::size_t q = 0; q < cfg.h.size(); ++q) {
    std::vector<double> w;
    for (const Slot& s : slots)
      if (s.ok) w.push_back(s.weights[q]);
    const SampleSummary sw = SampleSummary::of(w);
    rep.likelihood.push_back({cfg.h[q], sw.mean, std::sqrt(sw.variance / static_cast<double>(w.size()))});
  }

  const std::uint64_t lseed = stream_seed(cfg.seed, Stream::Limit);
  limits::LimitSample ls;
  switch (rep.regime) {
    case Regime::LAN:
      rep.fisher = fundsol::fisher_limit(cfg.a);
      ls = limits::sample_lan_limit(rep.fisher, cfg.n_limit, lseed);
      break;
    case Regime::LAQ_ZERO:
      ls = limits::sample_df_limit(cfg.n_limit, cfg.m, lseed, cfg.jobs);
      break;
    case Regime::LAQ_CRITICAL:
      ls = limits::sample_critical_limit(cfg.n_limit, cfg.m, lseed, cfg.jobs);
      break;
    case Regime::LAMN:
      ls = limits::sample_lamn_limit(cfg.a, cfg.x0, cfg.n_limit, cfg.m_tail, lseed, cfg.jobs);
      break;
    case Regime::PLAMN:
      ls = limits::sample_plamn_limit(cfg.a, cfg.x0, rep.d, cfg.n_limit, cfg.m_tail, lseed, cfg.jobs);
      break;
  }
  rep.limit_values = std::move(ls.values);
  rep.ks = ks_distance(rep.scaled_errors, rep.limit_values);
  rep.error_summary = SampleSummary::of(rep.scaled_errors);
  rep.limit_summary = SampleSummary::of(rep.limit_values);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

namespace {

nlohmann::json summary_json(const SampleSummary& s) {
  nlohmann::json q = nlohmann::json::object();
  for (std::size_t i = 0; i < s.quantiles.size(); ++i) {
    q[std::to_string(static_cast<int>(std::lround(SampleSummary::kLevels[i] * 100)))] = s.quantiles[i];
  }
  return {{"quantiles", q}, {"mean", s.mean}, {"variance", s.variance}};
}

}  // namespace

nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json x0 = {{"kind", cfg.x0.kind() == simul::InitialSegment::Kind::Constant ? "constant" : "sampled"}};
  if (cfg.x0.kind() == simul::InitialSegment::Kind::Constant)
    x0["value"] = cfg.x0.value();
  else
    x0["value"] = cfg.x0.samples();
  return {{"a", cfg.a},           {"T", cfg.T},           {"dt", cfg.dt},   {"n_reps", cfg.n_reps},
          {"n_limit", cfg.n_limit}, {"seed", cfg.seed},   {"x0", x0},       {"d", cfg.d},
          {"k", cfg.k},           {"m", cfg.m},           {"m_tail", cfg.m_tail}, {"h", cfg.h},
          {"jobs", cfg.jobs},     {"out", cfg.out}};
}

nlohmann::json to_json(const MCReport& rep) {
  nlohmann::json lik = nlohmann::json::array();
  for (const auto& c : rep.likelihood) lik.push_back({{"h", c.h}, {"mean", c.mean}, {"se", c.se}});
  nlohmann::json j = {{"config", to_json(rep.config)},
                      {"regime", std::string(regime_name(rep.regime))},
                      {"T", rep.T},
                      {"scaling", chareq::scaling(rep.config.a, rep.T)},
                      {"n_reps", rep.config.n_reps},
                      {"failed", rep.failed},
                      {"ks", rep.ks},
                      {"ks_threshold", ks_threshold(rep.scaled_errors.size(), rep.limit_values.size())},
                      {"scaled_errors", rep.scaled_errors},
                      {"limit_values", rep.limit_values},
                      {"errors", summary_json(rep.error_summary)},
                      {"limit", summary_json(rep.limit_summary)},
                      {"likelihood_check", lik},
                      {"seconds", rep.seconds}};
  if (rep.regime == Regime::LAN) j["fisher"] = rep.fisher;
  if (rep.regime == Regime::PLAMN) j["d"] = rep.d;
  return j;
}

void write_csv(std::ostream& os, const MCReport& rep) {
  os << "replication,a_hat,scaled_error\n";
  char buf[96];
  for (std::size_t i = 0; i < rep.a_hat.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", rep.replication[i], rep.a_hat[i], rep.scaled_errors[i]);
    os << buf;
  }
}

void write_outputs(const MCReport& rep, const std::string& prefix) {
  std::ofstream js(prefix + ".json");
  std::ofstream csv(prefix + ".csv");
  if (!js || !csv) throw Error("cannot write report files with prefix " + prefix);
  js << to_json(rep).dump(2) << '\n';
  write_csv(csv, rep);
}

}  // namespace sdde::harness
