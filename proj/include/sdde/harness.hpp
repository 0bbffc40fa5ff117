#pragma once

// Monte Carlo experiments comparing scaled estimator errors with samples of
// the matching limit law.
//
// Config file: INI-style `key = value` lines, `#` or `;` comments, no
// sections. Keys:
//   a         drift; the word `critical` selects -pi^2/2 exactly
//   T         horizon (ignored when k > 0)
//   dt        step, must divide 1 and T
//   n_reps    replications (>= 50)
//   n_limit   limit-law draws (>= 50)
//   seed      master seed
//   x0.kind   constant | sampled
//   x0.value  number, or comma-separated grid values on [-1, 0] when sampled
//   d         PLAMN phase in [0, pi/kappa0)
//   k         PLAMN period count; horizon k pi/kappa0 + d rounded to the grid
//   m         Wiener grid of the LAQ limit samplers (default 10000)
//   m_tail    tail quadrature steps of the LAMN/PLAMN samplers (default 8000)
//   h         comma-separated local parameters for the likelihood check
//   jobs      worker threads (default 1)
//   out       output prefix: writes <out>.json and <out>.csv

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdde/chareq.hpp"
#include "sdde/simul.hpp"

namespace sdde::harness {

struct ExperimentConfig {
  double a = 0.0;
  double T = 0.0;
  double dt = 0.01;
  std::size_t n_reps = 0;
  std::size_t n_limit = 0;
  std::uint64_t seed = 0;
  simul::InitialSegment x0 = simul::InitialSegment::constant(0.0);
  double d = 0.0;
  std::size_t k = 0;
  std::size_t m = 10000;
  std::size_t m_tail = 8000;
  std::vector<double> h;
  unsigned jobs = 1;
  std::string out;

  /// Throws InvalidGrid / DomainError on bad values.
  void validate() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

struct SampleSummary {
  static constexpr std::array<double, 7> kLevels{0.01, 0.05, 0.25, 0.50, 0.75, 0.95, 0.99};
  std::array<double, 7> quantiles{};
  double mean = 0.0;
  double variance = 0.0;  // unbiased

  static SampleSummary of(std::span<const double> xs);
};

/// Empirical mean of exp(h Delta - h^2 J / 2) over replications.
struct LikelihoodCheck {
  double h = 0.0;
  double mean = 0.0;
  double se = 0.0;
};

struct MCReport {
  ExperimentConfig config;
  Regime regime = Regime::LAN;
  double T = 0.0;        // horizon actually simulated
  double d = 0.0;        // effective PLAMN phase
  double fisher = 0.0;   // J_a, LAN only
  std::vector<std::size_t> replication;  // indices of successful replications
  std::vector<double> a_hat;
  std::vector<double> scaled_errors;
  std::vector<double> limit_values;
  std::size_t failed = 0;
  double ks = 0.0;
  SampleSummary error_summary;
  SampleSummary limit_summary;
  std::vector<LikelihoodCheck> likelihood;
  double seconds = 0.0;
};

/// Two-sample Kolmogorov-Smirnov statistic; EmptySample if either is empty.
double ks_distance(std::span<const double> s1, std::span<const double> s2);

/// Two-sample critical value c(alpha) sqrt((n+m)/(nm)) with c = 1.628 (alpha = 0.01).
double ks_threshold(std::size_t n, std::size_t m);

/// Horizon and phase for a config: T itself, or for PLAMN with k > 0 the grid
/// point nearest k pi/kappa0 + d together with the phase it realises.
struct Horizon {
  double T = 0.0;
  double d = 0.0;
};
Horizon experiment_horizon(const ExperimentConfig& cfg);

MCReport run_experiment(const ExperimentConfig& cfg);

nlohmann::json to_json(const ExperimentConfig& cfg);
nlohmann::json to_json(const MCReport& report);

/// replication,a_hat,scaled_error
void write_csv(std::ostream& os, const MCReport& report);

/// Writes <prefix>.json and <prefix>.csv.
void write_outputs(const MCReport& report, const std::string& prefix);

}  // namespace sdde::harness
