#pragma once

// Likelihood quantities of an observed path. One discretisation convention
// is shared by everything here: with Q_k the trapezoid delay integral at t_k,
//
//     int Q dX  ~  sum_k Q_k (x_{k+1} - x_k)      (left point, Ito)
//     int Q dW  ~  sum_k Q_k dw_k                 (left point, Ito)
//     int Q^2dt ~  sum_k Q_k^2 dt                 (left point)
//
// for k = 0..N-1. Under the Euler recursion this makes the Girsanov
// identities and the estimator-error identity hold exactly on the grid.

#include <vector>

#include "sdde/simul.hpp"

namespace sdde::inference {

struct EstimateResult {
  double a_hat = 0.0;
  double numerator = 0.0;    // sum Q_k (x_{k+1} - x_k)
  double denominator = 0.0;  // sum Q_k^2 dt
  double T = 0.0;
  double dt = 0.0;
};

struct LocalQuadratic {
  double a_ref = 0.0;
  double r = 0.0;
  double delta = 0.0;
  double j = 0.0;
  double h = 0.0;
  double loglik = 0.0;
};

/// Q(t_k) for every grid point of [0, T].
std::vector<double> delay_integral(const simul::SamplePath& path);

/// Left-point sums over k < N.
double observed_information(const simul::SamplePath& path);  // sum Q_k^2 dt
double score_dx(const simul::SamplePath& path);              // sum Q_k (x_{k+1} - x_k)
double score_dw(const simul::SamplePath& path);              // sum Q_k dw_k; MissingIncrements without dw

/// MLE a_hat = score_dx / observed_information; DegenerateDenominator when
/// the denominator is not positive.
EstimateResult mle(const simul::SamplePath& path);

/// Local log-likelihood h Delta - h^2 J / 2 at a_ref with r = scaling(a_ref, T).
LocalQuadratic local_quadratic(const simul::SamplePath& path, double a_ref, double h);

/// log dP_{a_tilde,T}/dP_{a,T} from the observable (dX) form.
double loglik_ratio(const simul::SamplePath& path, double a, double a_tilde);

/// Same quantity from the noise (dW) form; only defined for simulated paths
/// whose increments were kept and whose drift is a.
double loglik_ratio_dw(const simul::SamplePath& path, double a, double a_tilde);

}  // namespace sdde::inference
