#include "spherecover/rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "spherecover/errors.hpp"

namespace spherecover {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Letters whose log-mass is within this of the minimum count as minimal.
constexpr double kMassTieTolerance = 1e-12;

struct TiltedProblem {
  std::span<const double> source;
  const DistortionMatrix& rho;
  std::vector<double> log_mass;
  double log_mass_min;

  TiltedProblem(const Model& model, std::span<const double> src) : source(src), rho(model.rho()) {
    if (src.size() != model.source_size())
      throw validation_error("dimension mismatch: source has " + std::to_string(src.size()) + " entries, model has " +
                             std::to_string(model.source_size()));
    log_mass.reserve(model.reproduction_size());
    for (double m : model.M().values()) log_mass.push_back(std::log(m));
    log_mass_min = *std::min_element(log_mass.begin(), log_mass.end());
  }

  std::size_t rows() const { return rho.rows(); }
  std::size_t cols() const { return rho.cols(); }
};

// Solution of the Lagrangian problem min_W objective(W) + lambda * E rho for a fixed lambda.
struct LambdaSolution {
  double lambda = 0.0;
  std::vector<double> q;
  std::vector<double> w;
  double distortion = 0.0;
  double dual_value = 0.0;  // Phi(q), an upper bound on min_W objective + lambda E rho
  double gap = 0.0;         // certified: dual_value - gap <= true minimum
  std::vector<double> potential;
  std::size_t iterations = 0;
};

// Blahut-Arimoto style alternating minimization with a mass tilt. For fixed output law q the
// optimal row is W(y|x) proportional to q(y) exp(-lambda rho(x,y)) / M(y); for fixed W the
// output law is the Y-marginal. lambda = +inf restricts rows to zero-distortion letters.
LambdaSolution solve_lambda(const TiltedProblem& pb, double lambda, const RateOptions& options,
                            std::span<const double> start = {}) {
  const std::size_t nx = pb.rows();
  const std::size_t ny = pb.cols();

  // kernel(x,y) = exp(logK(x,y) - shift_x), shift_x = max_y logK(x,y)
  std::vector<double> kernel(nx * ny);
  std::vector<double> shift(nx);
  for (std::size_t x = 0; x < nx; ++x) {
    double best = -kInf;
    for (std::size_t y = 0; y < ny; ++y) {
      double lk;
      if (std::isinf(lambda))
        lk = pb.rho(x, y) == 0.0 ? -pb.log_mass[y] : -kInf;
      else
        lk = -lambda * pb.rho(x, y) - pb.log_mass[y];
      kernel[x * ny + y] = lk;
      best = std::max(best, lk);
    }
    shift[x] = best;
    for (std::size_t y = 0; y < ny; ++y) kernel[x * ny + y] = std::exp(kernel[x * ny + y] - best);
  }

  LambdaSolution sol;
  sol.lambda = lambda;
  sol.q.assign(ny, 1.0 / static_cast<double>(ny));
  if (start.size() == ny) {
    // Warm start, blended with the uniform law so every letter stays positive.
    for (std::size_t y = 0; y < ny; ++y) sol.q[y] = (1.0 - 1e-6) * start[y] + 1e-6 * sol.q[y];
  }
  std::vector<double> z(nx), c(ny);

  auto sweep = [&]() {
    for (std::size_t x = 0; x < nx; ++x) {
      double s = 0.0;
      for (std::size_t y = 0; y < ny; ++y) s += sol.q[y] * kernel[x * ny + y];
      z[x] = s;
    }
    std::fill(c.begin(), c.end(), 0.0);
    double phi = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      if (pb.source[x] <= 0.0) continue;
      phi -= pb.source[x] * (shift[x] + std::log(z[x]));
      const double inv = pb.source[x] / z[x];
      for (std::size_t y = 0; y < ny; ++y) c[y] += inv * kernel[x * ny + y];
    }
    return phi;
  };

  // Active-set Newton on the dual Phi(q) = -sum_x P(x) log z_x over the simplex, restricted to the
  // current support. Multiplicative updates converge sublinearly when an output letter's optimal
  // weight is zero with a tight optimality condition; Newton removes that stall.
  auto evaluate = [&](const std::vector<double>& q) {
    double phi = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      if (pb.source[x] <= 0.0) continue;
      double s = 0.0;
      for (std::size_t y = 0; y < ny; ++y) s += q[y] * kernel[x * ny + y];
      if (!(s > 0.0)) return kInf;
      phi -= pb.source[x] * (shift[x] + std::log(s));
    }
    return phi;
  };
  auto newton_polish = [&](std::size_t max_steps) {
    std::size_t steps = 0;
    std::vector<double> trial(ny);
    for (; steps < max_steps; ++steps) {
      const double phi0 = sweep();
      std::vector<std::size_t> support;
      for (std::size_t y = 0; y < ny; ++y)
        if (sol.q[y] > 0.0) support.push_back(y);
      const std::size_t m = support.size();
      if (m <= 1) break;
      // KKT system [H 1; 1' 0] [d; nu] = [c_S; 0].
      const std::size_t dim = m + 1;
      std::vector<double> a(dim * (dim + 1), 0.0);
      double diag_max = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
          double h = 0.0;
          for (std::size_t x = 0; x < nx; ++x) {
            if (pb.source[x] <= 0.0) continue;
            h += pb.source[x] * kernel[x * ny + support[i]] * kernel[x * ny + support[j]] / (z[x] * z[x]);
          }
          a[i * (dim + 1) + j] = a[j * (dim + 1) + i] = h;
          if (i == j) diag_max = std::max(diag_max, h);
        }
      for (std::size_t i = 0; i < m; ++i) {
        a[i * (dim + 1) + i] += 1e-13 * diag_max;
        a[i * (dim + 1) + m] = a[m * (dim + 1) + i] = 1.0;
        a[i * (dim + 1) + dim] = c[support[i]];
      }
      // Gaussian elimination with partial pivoting.
      bool singular = false;
      for (std::size_t k = 0; k < dim && !singular; ++k) {
        std::size_t piv = k;
        for (std::size_t r = k + 1; r < dim; ++r)
          if (std::abs(a[r * (dim + 1) + k]) > std::abs(a[piv * (dim + 1) + k])) piv = r;
        if (std::abs(a[piv * (dim + 1) + k]) < 1e-300) {
          singular = true;
          break;
        }
        if (piv != k)
          for (std::size_t col = 0; col <= dim; ++col) std::swap(a[k * (dim + 1) + col], a[piv * (dim + 1) + col]);
        for (std::size_t r = k + 1; r < dim; ++r) {
          const double f = a[r * (dim + 1) + k] / a[k * (dim + 1) + k];
          if (f == 0.0) continue;
          for (std::size_t col = k; col <= dim; ++col) a[r * (dim + 1) + col] -= f * a[k * (dim + 1) + col];
        }
      }
      if (singular) break;
      std::vector<double> sol_vec(dim);
      for (std::size_t k = dim; k-- > 0;) {
        double v = a[k * (dim + 1) + dim];
        for (std::size_t col = k + 1; col < dim; ++col) v -= a[k * (dim + 1) + col] * sol_vec[col];
        sol_vec[k] = v / a[k * (dim + 1) + k];
      }
      // Largest step keeping the support nonnegative; the blocking letter leaves the support.
      double t = 1.0;
      std::size_t blocking = ny;
      double slope = 0.0, step_norm = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double d = sol_vec[i];
        slope -= c[support[i]] * d;
        step_norm = std::max(step_norm, std::abs(d));
        if (d < 0.0 && -sol.q[support[i]] / d < t) {
          t = -sol.q[support[i]] / d;
          blocking = support[i];
        }
      }
      if (step_norm <= 1e-17) break;
      for (bool first = true;; t *= 0.5, first = false) {
        trial = sol.q;
        for (std::size_t i = 0; i < m; ++i) trial[support[i]] = std::max(0.0, trial[support[i]] + t * sol_vec[i]);
        if (blocking < ny) trial[blocking] = 0.0;
        double total = 0.0;
        for (double v : trial) total += v;
        for (double& v : trial) v /= total;
        const double f = evaluate(trial);
        // Near the optimum the decrease falls below the resolution of Phi; a Newton step that
        // leaves Phi unchanged up to rounding is still taken, since it is what shrinks the gap.
        const double noise = 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(phi0));
        if (f <= phi0 + 1e-4 * t * std::min(slope, 0.0) || (first && f <= phi0 + noise) || t < 1e-12) {
          if (f <= phi0 + noise) sol.q = trial;
          break;
        }
        blocking = ny;
      }
      if (t < 1e-12) break;
    }
    return steps;
  };

  double phi = sweep();
  double previous = kInf;
  std::size_t it = 0;
  std::size_t since_polish = 0;
  constexpr std::size_t kPolishEvery = 50;
  for (;; ++it) {
    const double cmax = *std::max_element(c.begin(), c.end());
    sol.gap = std::max(0.0, std::log(cmax));
    if (sol.gap <= options.gap_tolerance) break;
    // Stagnation at machine precision with a small certified gap.
    if (std::abs(previous - phi) <= 1e-16 * std::max(1.0, std::abs(phi)) && sol.gap <= 1e-10) break;
    if (it >= options.max_iterations)
      throw convergence_error("rate solver did not converge at lambda=" + std::to_string(lambda) + " after " +
                              std::to_string(it) + " iterations (residual gap " + std::to_string(sol.gap) + ")");
    if (++since_polish >= kPolishEvery) {
      since_polish = 0;
      it += newton_polish(50);
      // Letters dropped by the active set but still violating optimality re-enter with small weight.
      phi = sweep();
      bool revived = false;
      for (std::size_t y = 0; y < ny; ++y)
        if (sol.q[y] == 0.0 && c[y] > 1.0 + options.gap_tolerance) {
          sol.q[y] = 1e-8;
          revived = true;
        }
      if (revived) {
        double total = 0.0;
        for (double v : sol.q) total += v;
        for (double& v : sol.q) v /= total;
        phi = sweep();
      }
      previous = kInf;
      continue;
    }
    double total = 0.0;
    for (std::size_t y = 0; y < ny; ++y) {
      sol.q[y] *= c[y];
      total += sol.q[y];
    }
    for (double& v : sol.q) v /= total;
    previous = phi;
    phi = sweep();
  }
  sol.iterations = it;
  sol.dual_value = phi;

  sol.w.assign(nx * ny, 0.0);
  sol.potential.resize(nx);
  sol.distortion = 0.0;
  for (std::size_t x = 0; x < nx; ++x) {
    if (z[x] > 0.0) {
      for (std::size_t y = 0; y < ny; ++y) sol.w[x * ny + y] = sol.q[y] * kernel[x * ny + y] / z[x];
      sol.potential[x] = -(shift[x] + std::log(z[x]));
    } else {
      // Only reachable for rows outside the support of the source.
      std::size_t best = 0;
      for (std::size_t y = 1; y < ny; ++y)
        if (kernel[x * ny + y] > kernel[x * ny + best]) best = y;
      sol.w[x * ny + best] = 1.0;
      sol.potential[x] = kInf;
    }
    double row_sum = 0.0;
    for (std::size_t y = 0; y < ny; ++y) row_sum += sol.w[x * ny + y];
    for (std::size_t y = 0; y < ny; ++y) {
      sol.w[x * ny + y] /= row_sum;
      sol.distortion += pb.source[x] * sol.w[x * ny + y] * pb.rho(x, y);
    }
  }
  return sol;
}

RatePoint point_from(const TiltedProblem& pb, const LambdaSolution& sol, double D) {
  RatePoint pt;
  pt.D = D;
  pt.channel = Channel(pb.rows(), pb.cols(), sol.w);
  pt.lambda = sol.lambda;
  pt.achieved_distortion = sol.distortion;
  pt.output_law = sol.q;
  pt.source_potential = sol.potential;
  pt.iterations = sol.iterations;
  std::vector<double> mass(pb.log_mass.size());
  for (std::size_t y = 0; y < mass.size(); ++y) mass[y] = std::exp(pb.log_mass[y]);
  pt.rate_nats = objective(pb.source, pt.channel, mass);
  return pt;
}

struct Saturation {
  double distortion;
  std::size_t letter;
};

Saturation saturation(const TiltedProblem& pb) {
  Saturation best{kInf, 0};
  for (std::size_t y = 0; y < pb.cols(); ++y) {
    if (pb.log_mass[y] > pb.log_mass_min + kMassTieTolerance) continue;
    double d = 0.0;
    for (std::size_t x = 0; x < pb.rows(); ++x) d += pb.source[x] * pb.rho(x, y);
    if (d < best.distortion) best = {d, y};
  }
  return best;
}

RatePoint saturated_point(const TiltedProblem& pb, const Saturation& sat, double D) {
  RatePoint pt;
  pt.D = D;
  pt.rate_nats = pb.log_mass[sat.letter];
  pt.channel = Channel::constant(pb.rows(), pb.cols(), sat.letter);
  pt.lambda = 0.0;
  pt.achieved_distortion = sat.distortion;
  pt.output_law.assign(pb.cols(), 0.0);
  pt.output_law[sat.letter] = 1.0;
  pt.source_potential.assign(pb.rows(), pb.log_mass[sat.letter]);
  return pt;
}

void check_source(std::span<const double> source) {
  double sum = 0.0;
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (!(source[i] >= 0.0)) throw validation_error("negative source entry at index " + std::to_string(i));
    sum += source[i];
  }
  if (std::abs(sum - 1.0) > 1e-9) throw validation_error("source law does not sum to 1");
}

}  // namespace

double saturation_distortion(const Model& model, std::span<const double> source) {
  TiltedProblem pb(model, source);
  return saturation(pb).distortion;
}

RatePoint rate_at_zero_for_source(const Model& model, std::span<const double> source, const RateOptions& options) {
  check_source(source);
  TiltedProblem pb(model, source);
  auto sat = saturation(pb);
  if (sat.distortion == 0.0) return saturated_point(pb, sat, 0.0);
  auto sol = solve_lambda(pb, kInf, options);
  return point_from(pb, sol, 0.0);
}

RatePoint rate_at_zero(const Model& model, const RateOptions& options) {
  return rate_at_zero_for_source(model, model.P().values(), options);
}

RatePoint rate_for_source(const Model& model, std::span<const double> source, double D, const RateOptions& options) {
  if (!(D >= 0.0) || std::isnan(D)) throw validation_error("distortion level must be nonnegative");
  check_source(source);
  TiltedProblem pb(model, source);

  const auto sat = saturation(pb);
  if (D >= sat.distortion) return saturated_point(pb, sat, D);
  if (D == 0.0) return rate_at_zero_for_source(model, source, options);

  // Bracket on lambda: `lo` has distortion >= D, `hi` has distortion <= D. lambda = 0 is the
  // saturated constant channel, whose Lagrangian value log min M is exact.
  LambdaSolution lo;
  lo.lambda = 0.0;
  lo.distortion = sat.distortion;
  {
    const auto constant = Channel::constant(pb.rows(), pb.cols(), sat.letter);
    lo.w.assign(constant.entries().begin(), constant.entries().end());
  }
  lo.q.assign(pb.cols(), 0.0);
  lo.q[sat.letter] = 1.0;
  lo.potential.assign(pb.rows(), pb.log_mass[sat.letter]);
  double lower_bound = pb.log_mass[sat.letter];
  std::size_t iterations = 0;

  auto evaluate = [&](double lambda, std::span<const double> start) {
    auto sol = solve_lambda(pb, lambda, options, start);
    iterations += sol.iterations;
    lower_bound = std::max(lower_bound, sol.dual_value - sol.gap - lambda * D);
    return sol;
  };

  LambdaSolution hi = evaluate(1.0, {});
  while (hi.distortion > D) {
    if (hi.lambda > 1e15)
      throw convergence_error("rate solver could not reach distortion " + std::to_string(D));
    lo = std::move(hi);
    hi = evaluate(lo.lambda * 2.0, lo.q);
  }

  // Illinois regula falsi on f(lambda) = distortion(lambda) - D, with bisection safeguards.
  double f_lo = lo.distortion - D;
  double f_hi = hi.distortion - D;
  int retained = 0;  // +1: lo kept repeatedly, -1: hi kept repeatedly
  for (int step = 0; step < 300 && f_hi != 0.0; ++step) {
    const double width = hi.lambda - lo.lambda;
    if (width <= 1e-13 * hi.lambda || lo.distortion - hi.distortion <= 1e-15) break;
    double lambda = hi.lambda - f_hi * width / (f_hi - f_lo);
    const bool poor = !(lambda > lo.lambda + 1e-3 * width && lambda < hi.lambda - 1e-3 * width);
    if (poor || step % 4 == 3) lambda = lo.lambda == 0.0 ? 0.5 * hi.lambda : 0.5 * (lo.lambda + hi.lambda);
    auto sol = evaluate(lambda, (lambda - lo.lambda < hi.lambda - lambda && lo.lambda > 0.0) ? lo.q : hi.q);
    const double f = sol.distortion - D;
    if (f > 0.0) {
      lo = std::move(sol);
      f_lo = f;
      if (retained == -1) f_hi *= 0.5;
      retained = -1;
    } else {
      hi = std::move(sol);
      f_hi = f;
      if (retained == +1) f_lo *= 0.5;
      retained = +1;
    }
  }

  // Mix the bracketing channels so the budget is met exactly. The objective is convex in W and
  // both ends lie on the same supporting line at a breakpoint, so the mixture stays optimal.
  const double spread = lo.distortion - hi.distortion;
  const double theta = (f_hi == 0.0 || spread <= 0.0) ? 0.0 : std::clamp((D - hi.distortion) / spread, 0.0, 1.0);
  const LambdaSolution& major = theta >= 0.5 ? lo : hi;
  RatePoint pt;
  pt.D = D;
  pt.channel = Channel::mix(Channel(pb.rows(), pb.cols(), lo.w), Channel(pb.rows(), pb.cols(), hi.w), theta);
  pt.lambda = major.lambda;
  pt.achieved_distortion = pt.channel.expected_distortion(source, pb.rho);
  pt.output_law = major.q;
  pt.source_potential = major.potential;
  pt.iterations = iterations;
  pt.rate_nats = objective(source, pt.channel, model.M().values());
  if (pt.achieved_distortion > D + 1e-9)
    throw convergence_error("rate solver channel exceeds the distortion budget by " +
                            std::to_string(pt.achieved_distortion - D));
  if (pt.rate_nats - lower_bound > 1e-8)
    throw convergence_error("rate solver duality gap " + std::to_string(pt.rate_nats - lower_bound) +
                            " exceeds tolerance at D=" + std::to_string(D));
  return pt;
}

RatePoint rate(const Model& model, double D, const RateOptions& options) {
  return rate_for_source(model, model.P().values(), D, options);
}

RateCurve rate_curve(const Model& model, std::span<const double> d_grid, const RateOptions& options) {
  for (std::size_t i = 0; i < d_grid.size(); ++i) {
    if (!(d_grid[i] >= 0.0)) throw validation_error("distortion grid entry " + std::to_string(i) + " is negative");
    if (i > 0 && d_grid[i] < d_grid[i - 1]) throw validation_error("distortion grid is not ascending");
  }
  RateCurve curve;
  curve.points.resize(d_grid.size());
  std::vector<std::string> failures(d_grid.size());
  std::vector<int> kinds(d_grid.size(), 0);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < d_grid.size(); ++i) {
    try {
      curve.points[i] = rate(model, d_grid[i], options);
    } catch (const Error& e) {
      failures[i] = e.what();
      kinds[i] = e.exit_code();
    }
  }
  for (std::size_t i = 0; i < d_grid.size(); ++i)
    if (kinds[i] != 0) throw Error(static_cast<ErrorKind>(kinds[i]), failures[i]);

  constexpr double tol = 1e-6;
  const auto& pts = curve.points;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].rate_nats > pts[i - 1].rate_nats + tol)
      throw std::logic_error("rate curve increases between D=" + std::to_string(pts[i - 1].D) +
                             " and D=" + std::to_string(pts[i].D));
  }
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const double d0 = pts[i - 1].D, d1 = pts[i].D, d2 = pts[i + 1].D;
    if (d2 <= d0) continue;
    const double chord = pts[i - 1].rate_nats + (pts[i + 1].rate_nats - pts[i - 1].rate_nats) * (d1 - d0) / (d2 - d0);
    if (pts[i].rate_nats > chord + tol)
      throw std::logic_error("rate curve is not convex at D=" + std::to_string(d1));
  }
  return curve;
}

}  // namespace spherecover
