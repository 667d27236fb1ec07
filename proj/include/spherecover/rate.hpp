#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spherecover/information.hpp"
#include "spherecover/model.hpp"

namespace spherecover {

struct RateOptions {
  /// Alternating minimization stops once the certified gap drops below this (nats).
  double gap_tolerance = 1e-12;
  std::size_t max_iterations = 100000;
};

/// One sample of the mass-tilted rate function R(D; P, M).
struct RatePoint {
  double D = 0.0;
  /// Infimum of the objective over channels meeting the distortion budget (nats).
  double rate_nats = 0.0;
  /// A channel achieving rate_nats with expected distortion at most D.
  Channel channel;
  /// Slope parameter of the distortion constraint; +infinity for the D = 0 support restriction.
  double lambda = 0.0;
  double achieved_distortion = 0.0;
  /// Output law of the auxiliary alternating-minimization variable at the optimum.
  std::vector<double> output_law;
  /// Per-source-letter potential phi(x); sum_x Q(x) phi(x) - lambda D equals the rate.
  /// Its simplex projection is the gradient of Q -> R(D; Q, M) along the support of Q; for a
  /// letter outside the support it only bounds the directional derivative from above.
  std::vector<double> source_potential;
  std::size_t iterations = 0;
};

struct RateCurve {
  std::vector<RatePoint> points;
  Units units = Units::nats;
};

RatePoint rate(const Model& model, double D, const RateOptions& options = {});

/// Same as rate() but with `source` in place of the model's P. `source` may contain zeros.
RatePoint rate_for_source(const Model& model, std::span<const double> source, double D,
                          const RateOptions& options = {});

/// Exact D = 0 solve: each row of the channel is restricted to its zero-distortion letters.
RatePoint rate_at_zero(const Model& model, const RateOptions& options = {});
RatePoint rate_at_zero_for_source(const Model& model, std::span<const double> source,
                                  const RateOptions& options = {});

/// Smallest D at which the rate reaches its floor min_y log M(y).
double saturation_distortion(const Model& model, std::span<const double> source);

/// Evaluates rate() at every grid point. The grid must be ascending and nonnegative.
/// Throws std::logic_error if the result is not nonincreasing and midpoint-convex within 1e-6 nats.
RateCurve rate_curve(const Model& model, std::span<const double> d_grid, const RateOptions& options = {});

/// Brute-force upper bound on R(D; P, M): exhaustive minimization over row-stochastic matrices on a
/// uniform mesh of step 1/mesh followed by feasible pattern-search descent. Requires
/// |A|*|A^| <= 9 and mesh >= 10.
double rate_oracle(const Model& model, double D, std::size_t mesh);
double rate_oracle_for_source(const Model& model, std::span<const double> source, double D, std::size_t mesh);

}  // namespace spherecover
