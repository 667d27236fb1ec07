#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "spherecover/information.hpp"
#include "spherecover/model.hpp"
#include "spherecover/rate.hpp"

namespace spherecover {

enum class Regime { zero, finite, infinite };

std::string_view to_string(Regime regime);

/// Value of inf { H(Q||P) : R(D;Q,M) >= R } together with its regime.
struct ExponentResult {
  double value_nats = 0.0;  ///< +infinity in the infinite regime
  Regime regime = Regime::zero;
  std::optional<Distribution> minimizer;  ///< absent in the infinite regime
  double constraint_value = 0.0;          ///< R(D; Q*, M) at the minimizer, NaN when absent
  /// R lies within the boundary window of a regime boundary, where the exponent may jump.
  bool boundary = false;

  InfoValue value() const { return regime == Regime::infinite ? InfoValue::infinite() : InfoValue(value_nats); }
};

/// Regime boundaries on the R axis: the exponent is zero for R below rate_at_source and
/// infinite for R at or above sup_rate.
struct RegimeBoundaries {
  double rate_at_source = 0.0;
  double sup_rate = 0.0;
  std::vector<double> argmax;  ///< a source law attaining sup_rate

  /// Same boundaries on the concentration axis r = -R.
  double r_zero() const noexcept { return -rate_at_source; }
  double r_infinite() const noexcept { return -sup_rate; }
};

struct ExponentOptions {
  RateOptions rate;
  /// Grid intervals used to profile Q -> R(D;Q,M) on binary alphabets.
  std::size_t profile_intervals = 512;
  double feasibility_slack = 1e-9;
  double boundary_window = 1e-6;
  std::size_t max_descent_steps = 400;
};

/// Solver for a fixed (model, D). Construction computes the regime boundaries once so that
/// repeated queries over R are cheap. solve() is const and safe to call concurrently.
class ExponentSolver {
 public:
  ExponentSolver(Model model, double D, ExponentOptions options = {});

  ExponentResult solve(double R) const;
  const RegimeBoundaries& boundaries() const noexcept { return bounds_; }
  const Model& model() const noexcept { return model_; }
  double D() const noexcept { return d_; }

  /// R(D; Q, M) for an arbitrary source law Q.
  double rate_of(std::span<const double> q) const;

 private:
  ExponentResult finite_binary(double R) const;
  ExponentResult finite_general(double R) const;
  std::vector<double> crossing(std::span<const double> feasible, std::span<const double> infeasible, double R) const;
  void compute_sup_binary();
  void compute_sup_general();
  std::vector<std::vector<double>> starts() const;

  Model model_;
  double d_;
  ExponentOptions options_;
  RegimeBoundaries bounds_;
  std::vector<double> profile_;  // binary only: R(D; Q_t) at t = i / profile_intervals
  std::vector<std::vector<double>> feasible_seeds_;
};

ExponentResult exponent(const Model& model, double R, double D, const ExponentOptions& options = {});

/// Regime boundaries for any D >= 0 (including D >= D_max).
RegimeBoundaries regime_boundaries(const Model& model, double D, const ExponentOptions& options = {});

/// Brute-force minimization of H(Q||P) over the simplex mesh of step 1/mesh, with the rate computed
/// at every mesh point, followed by a bisection toward P from the best feasible point.
/// Requires |A| <= 3. Returns +infinity when no mesh point is feasible.
class ExponentOracle {
 public:
  ExponentOracle(const Model& model, double D, std::size_t mesh, const RateOptions& options = {});
  double query(double R) const;
  double max_rate() const noexcept { return max_rate_; }

 private:
  Model model_;
  double d_;
  RateOptions options_;
  std::vector<std::vector<double>> points_;
  std::vector<double> rates_;
  double max_rate_;
};

double exponent_oracle(const Model& model, double R, double D, std::size_t mesh);

struct ExponentSample {
  double axis = 0.0;  ///< R, or r = -R on the concentration axis
  ExponentResult result;
};

struct ExponentCurve {
  std::vector<ExponentSample> samples;
  double r_infinite = 0.0;
  double r_zero = 0.0;
  bool concentration_axis = false;
};

/// Exponent at every grid value. On the concentration axis the grid holds r and R = -r.
ExponentCurve exponent_curve(const Model& model, double D, std::span<const double> grid, bool concentration_axis,
                             const ExponentOptions& options = {});

/// Best type-II exponent among tests with type-I exponent at least r (nats); 0 < r < H(P1||P0).
ExponentResult hoeffding_exponent(const Distribution& p0, const Distribution& p1, double r,
                                  const ExponentOptions& options = {});

/// Lossy-compression exponent with counting mass (nats).
ExponentResult marton_exponent(const Distribution& p, const DistortionMatrix& rho, double R, double D,
                               const ExponentOptions& options = {});

/// Converse concentration exponent: mass M = P and R = -r, natural units.
ExponentResult concentration_exponent(const Distribution& p, const DistortionMatrix& rho, double r, double D,
                                      const ExponentOptions& options = {});

/// Exponent D^2/2 - r of the classical blowup inequality on the binary cube.
double talagrand_bound(double r, double D);

}  // namespace spherecover
