#include "spherecover/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "spherecover/errors.hpp"
#include "spherecover/kernels.hpp"

namespace spherecover {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double kl(std::span<const double> q, std::span<const double> p) { return relative_entropy(q, p).nats(); }

std::vector<double> binary_law(double t) { return {1.0 - t, t}; }

std::vector<double> lerp(std::span<const double> a, std::span<const double> b, double s) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::max(0.0, a[i] + s * (b[i] - a[i]));
  const double sum = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& v : out) v /= sum;
  return out;
}

/// Euclidean projection onto the probability simplex.
std::vector<double> project_simplex(std::vector<double> v) {
  std::vector<double> sorted(v);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0, tau = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - t > 0.0) tau = t;
  }
  double sum = 0.0;
  for (double& x : v) {
    x = std::max(0.0, x - tau);
    sum += x;
  }
  for (double& x : v) x /= sum;
  return v;
}

void center(std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

std::vector<double> potential_gradient(const RatePoint& pt) {
  std::vector<double> g(pt.source_potential);
  for (double& v : g)
    if (!std::isfinite(v)) v = 1e3;
  center(g);
  return g;
}

ExponentResult make_result(double value, Regime regime, std::span<const double> q, double constraint) {
  ExponentResult r;
  r.value_nats = value;
  r.regime = regime;
  if (!q.empty()) r.minimizer = Distribution::normalized(std::vector<double>(q.begin(), q.end()));
  r.constraint_value = constraint;
  return r;
}

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::zero:
      return "zero";
    case Regime::finite:
      return "finite";
    case Regime::infinite:
      return "infinite";
  }
  return "unknown";
}

ExponentSolver::ExponentSolver(Model model, double D, ExponentOptions options)
    : model_(std::move(model)), d_(D), options_(options) {
  if (!(D >= 0.0)) throw validation_error("distortion level must be nonnegative");
  bounds_.rate_at_source = rate(model_, d_, options_.rate).rate_nats;
  if (model_.source_size() == 2)
    compute_sup_binary();
  else
    compute_sup_general();
}

double ExponentSolver::rate_of(std::span<const double> q) const {
  return rate_for_source(model_, q, d_, options_.rate).rate_nats;
}

void ExponentSolver::compute_sup_binary() {
  const std::size_t n = std::max<std::size_t>(options_.profile_intervals, 8);
  profile_.assign(n + 1, 0.0);
  std::vector<std::string> failures(n + 1);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i <= n; ++i) {
    try {
      profile_[i] = rate_of(binary_law(static_cast<double>(i) / static_cast<double>(n)));
    } catch (const Error& e) {
      failures[i] = e.what();
    }
  }
  for (const auto& f : failures)
    if (!f.empty()) throw convergence_error(f);

  const std::size_t best = static_cast<std::size_t>(std::max_element(profile_.begin(), profile_.end()) - profile_.begin());
  double lo = static_cast<double>(best == 0 ? 0 : best - 1) / static_cast<double>(n);
  double hi = static_cast<double>(std::min(best + 1, n)) / static_cast<double>(n);
  double sup_t = static_cast<double>(best) / static_cast<double>(n);
  double sup = profile_[best];

  // Golden-section refinement inside the two grid cells around the best profile point.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - inv_phi * (hi - lo), b = lo + inv_phi * (hi - lo);
  double fa = rate_of(binary_law(a)), fb = rate_of(binary_law(b));
  while (hi - lo > 1e-12) {
    if (fa >= fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = rate_of(binary_law(a));
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = rate_of(binary_law(b));
    }
  }
  for (auto [t, f] : {std::pair{a, fa}, std::pair{b, fb}}) {
    if (f > sup) {
      sup = f;
      sup_t = t;
    }
  }
  bounds_.sup_rate = sup;
  bounds_.argmax = binary_law(sup_t);
}

std::vector<std::vector<double>> ExponentSolver::starts() const {
  const std::size_t k = model_.source_size();
  const double inv = 1.0 / static_cast<double>(k);
  std::vector<std::vector<double>> out;
  auto push = [&](std::vector<double> q) {
    if (out.size() >= 8) return;
    for (const auto& existing : out)
      if (distance(existing, q) < 1e-9) return;
    out.push_back(std::move(q));
  };
  push(std::vector<double>(k, inv));
  push(std::vector<double>(model_.P().values().begin(), model_.P().values().end()));
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> q(k, 0.2 * inv);
    q[i] += 0.8;
    push(std::move(q));
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      std::vector<double> q(k, 0.2 * inv);
      q[i] += 0.4;
      q[j] += 0.4;
      push(std::move(q));
    }
  return out;
}

void ExponentSolver::compute_sup_general() {
  const auto seeds = starts();
  std::vector<std::vector<double>> ends(seeds.size());
  std::vector<double> values(seeds.size(), -kInf);
  std::vector<std::string> failures(seeds.size());

#pragma omp parallel for schedule(dynamic)
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    try {
      std::vector<double> q = seeds[s];
      RatePoint pt = rate_for_source(model_, q, d_, options_.rate);
      // The potential of a letter outside the support only bounds the directional derivative from
      // above, so after a failed full step the ascent stays on the current face and letters are
      // re-entered by direct evaluation once the face is exhausted.
      auto enter = [&] {
        for (std::size_t x = 0; x < q.size(); ++x) {
          if (q[x] > 0.0) continue;
          for (double eps : {1e-2, 1e-3, 1e-4}) {
            std::vector<double> trial(q);
            for (double& v : trial) v *= 1.0 - eps;
            trial[x] += eps;
            RatePoint next = rate_for_source(model_, trial, d_, options_.rate);
            if (next.rate_nats > pt.rate_nats + 1e-12) {
              q = std::move(trial);
              pt = std::move(next);
              return true;
            }
          }
        }
        return false;
      };
      double step = 0.25;
      bool face = false;
      for (std::size_t it = 0; it < options_.max_descent_steps; ++it) {
        auto g = potential_gradient(pt);
        if (face)
          for (std::size_t i = 0; i < q.size(); ++i)
            if (q[i] <= 0.0) g[i] = -1e3;
        std::vector<double> trial(q);
        for (std::size_t i = 0; i < q.size(); ++i) trial[i] += step * g[i];
        trial = project_simplex(std::move(trial));
        std::vector<double> delta(q.size());
        for (std::size_t i = 0; i < q.size(); ++i) delta[i] = trial[i] - q[i];
        if (step <= 1e-12 || std::sqrt(dot(delta, delta)) < 1e-15) {
          if (!enter()) break;
          step = 0.25;
          face = false;
          continue;
        }
        RatePoint next = rate_for_source(model_, trial, d_, options_.rate);
        if (next.rate_nats >= pt.rate_nats + 1e-4 * dot(g, delta)) {
          q = std::move(trial);
          pt = std::move(next);
          step = std::min(step * 2.0, 16.0);
        } else if (!face && std::any_of(q.begin(), q.end(), [](double v) { return v <= 0.0; })) {
          face = true;
        } else {
          step *= 0.5;
        }
      }
      ends[s] = q;
      values[s] = pt.rate_nats;
    } catch (const Error& e) {
      failures[s] = e.what();
    }
  }
  for (const auto& f : failures)
    if (!f.empty()) throw convergence_error(f);

  const std::size_t best = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
  bounds_.sup_rate = values[best];
  bounds_.argmax = ends[best];
  feasible_seeds_ = ends;
}

std::vector<double> ExponentSolver::crossing(std::span<const double> feasible, std::span<const double> infeasible,
                                             double R) const {
  // Illinois regula falsi on s -> R(D; (1-s) F + s I) - R over [0, 1]; returns the feasible end.
  double s_f = 0.0, s_i = 1.0;
  double g_f = rate_of(feasible) - R;
  double g_i = rate_of(infeasible) - R;
  int retained = 0;
  for (int it = 0; it < 200 && s_i - s_f > 1e-13; ++it) {
    double s = s_f + g_f * (s_i - s_f) / (g_f - g_i);
    if (!(s > s_f && s < s_i) || it % 5 == 4) s = 0.5 * (s_f + s_i);
    const double g = rate_of(lerp(feasible, infeasible, s)) - R;
    if (g >= 0.0) {
      s_f = s;
      g_f = g;
      if (retained == +1) g_i *= 0.5;
      retained = +1;
      if (g == 0.0) break;
    } else {
      s_i = s;
      g_i = g;
      if (retained == -1) g_f *= 0.5;
      retained = -1;
    }
  }
  return lerp(feasible, infeasible, s_f);
}

ExponentResult ExponentSolver::finite_binary(double R) const {
  const std::size_t n = profile_.size() - 1;
  const auto p = model_.P().values();
  const double tp = p[1];
  const double t_star = bounds_.argmax[1];
  const auto source = binary_law(tp);

  double best_h = kInf;
  std::vector<double> best_q;
  for (int dir : {-1, +1}) {
    // Walk outward from P over the profile until the first feasible grid point.
    double prev = tp;
    std::optional<std::pair<double, double>> bracket;  // (feasible t, infeasible t)
    const long start = dir < 0 ? static_cast<long>(std::ceil(tp * n)) - 1 : static_cast<long>(std::floor(tp * n)) + 1;
    for (long i = start; i >= 0 && i <= static_cast<long>(n); i += dir) {
      const double t = static_cast<double>(i) / static_cast<double>(n);
      if ((t - tp) * dir <= 0.0) continue;
      if (profile_[static_cast<std::size_t>(i)] >= R) {
        bracket = std::pair{t, prev};
        break;
      }
      prev = t;
    }
    // The refined maximizer may sit in a feasible island narrower than a grid cell.
    if ((t_star - tp) * dir > 0.0 && bounds_.sup_rate >= R &&
        (!bracket || std::abs(t_star - tp) < std::abs(bracket->first - tp)))
      bracket = std::pair{t_star, tp};
    if (!bracket) continue;
    auto q = crossing(binary_law(bracket->first), binary_law(bracket->second), R);
    const double h = kl(q, source);
    if (h < best_h) {
      best_h = h;
      best_q = q;
    }
  }
  if (best_q.empty()) throw convergence_error("exponent solver found no feasible source law below the supremum");
  return make_result(best_h, Regime::finite, best_q, rate_of(best_q));
}

ExponentResult ExponentSolver::finite_general(double R) const {
  const auto p = model_.P().values();
  const auto& anchor = bounds_.argmax;

  std::vector<std::vector<double>> seeds{anchor};
  for (const auto& s : feasible_seeds_)
    if (rate_of(s) >= R) seeds.push_back(s);

  double best_h = kInf;
  std::vector<double> best_q;
  std::vector<std::vector<double>> visited;
  for (const auto& seed : seeds) {
    auto b = crossing(seed, p, R);
    if (std::any_of(visited.begin(), visited.end(), [&](const auto& v) { return distance(v, b) < 1e-9; })) continue;
    visited.push_back(b);
    double h = kl(b, p);
    double step = 0.05;
    for (std::size_t it = 0; it < options_.max_descent_steps && step > 1e-11; ++it) {
      RatePoint pt = rate_for_source(model_, b, d_, options_.rate);
      auto grad_r = potential_gradient(pt);
      std::vector<double> grad_h(b.size());
      for (std::size_t i = 0; i < b.size(); ++i) grad_h[i] = std::log(std::max(b[i], 1e-300) / p[i]) + 1.0;
      center(grad_h);
      // Move along the constraint surface: remove the component along grad R.
      const double rr = dot(grad_r, grad_r);
      std::vector<double> d(b.size());
      const double coef = rr > 1e-30 ? dot(grad_h, grad_r) / rr : 0.0;
      for (std::size_t i = 0; i < b.size(); ++i) d[i] = -(grad_h[i] - coef * grad_r[i]);
      if (std::sqrt(dot(d, d)) < 1e-12) break;

      std::vector<double> trial(b);
      for (std::size_t i = 0; i < b.size(); ++i) trial[i] += step * d[i];
      trial = project_simplex(std::move(trial));
      const bool feasible = rate_of(trial) >= R;
      auto restored = feasible ? crossing(trial, p, R) : crossing(anchor, trial, R);
      const double hn = kl(restored, p);
      if (hn < h - 1e-14) {
        b = std::move(restored);
        h = hn;
        step = std::min(step * 1.5, 1.0);
      } else {
        step *= 0.5;
      }
    }
    if (h < best_h) {
      best_h = h;
      best_q = b;
    }
  }
  return make_result(best_h, Regime::finite, best_q, rate_of(best_q));
}

ExponentResult ExponentSolver::solve(double R) const {
  if (std::isnan(R)) throw validation_error("rate level is NaN");
  if (!(d_ < model_.d_max())) throw validation_error("distortion level must lie in [0, D_max)");

  ExponentResult result;
  if (R <= bounds_.rate_at_source) {
    result = make_result(0.0, Regime::zero, model_.P().values(), bounds_.rate_at_source);
  } else if (R >= bounds_.sup_rate - options_.feasibility_slack) {
    result = make_result(kInf, Regime::infinite, {}, kNaN);
  } else if (model_.source_size() == 2) {
    result = finite_binary(R);
  } else {
    result = finite_general(R);
  }
  result.boundary = std::abs(R - bounds_.rate_at_source) <= options_.boundary_window ||
                    std::abs(R - bounds_.sup_rate) <= options_.boundary_window;
  return result;
}

ExponentResult exponent(const Model& model, double R, double D, const ExponentOptions& options) {
  if (!(D >= 0.0 && D < model.d_max())) throw validation_error("distortion level must lie in [0, D_max)");
  return ExponentSolver(model, D, options).solve(R);
}

RegimeBoundaries regime_boundaries(const Model& model, double D, const ExponentOptions& options) {
  return ExponentSolver(model, D, options).boundaries();
}

ExponentOracle::ExponentOracle(const Model& model, double D, std::size_t mesh, const RateOptions& options)
    : model_(model), d_(D), options_(options) {
  const std::size_t k = model.source_size();
  if (k > 3) throw cap_error("exponent oracle is limited to |A| <= 3");
  if (mesh == 0) throw validation_error("exponent oracle mesh must be positive");
  for (const auto& c : kernels::compositions(mesh, k)) {
    std::vector<double> q(k);
    for (std::size_t i = 0; i < k; ++i) q[i] = static_cast<double>(c[i]) / static_cast<double>(mesh);
    points_.push_back(std::move(q));
  }
  rates_.assign(points_.size(), 0.0);
  std::vector<std::string> failures(points_.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < points_.size(); ++i) {
    try {
      rates_[i] = rate_for_source(model, points_[i], D, options_).rate_nats;
    } catch (const Error& e) {
      failures[i] = e.what();
    }
  }
  for (const auto& f : failures)
    if (!f.empty()) throw convergence_error(f);
  max_rate_ = *std::max_element(rates_.begin(), rates_.end());
}

double ExponentOracle::query(double R) const {
  const auto p = model_.P().values();
  auto rate_at = [&](std::span<const double> q) { return rate_for_source(model_, q, d_, options_).rate_nats; };
  if (rate_at(p) >= R) return 0.0;

  double best = kInf;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (rates_[i] < R) continue;
    const double h = kl(points_[i], p);
    if (h < best) {
      best = h;
      best_i = i;
    }
  }
  if (!std::isfinite(best)) return kInf;

  // Plain bisection toward P; H(.||P) decreases along the segment.
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (rate_at(lerp(points_[best_i], p, mid)) >= R)
      lo = mid;
    else
      hi = mid;
  }
  return std::min(best, kl(lerp(points_[best_i], p, lo), p));
}

double exponent_oracle(const Model& model, double R, double D, std::size_t mesh) {
  return ExponentOracle(model, D, mesh).query(R);
}

ExponentCurve exponent_curve(const Model& model, double D, std::span<const double> grid, bool concentration_axis,
                             const ExponentOptions& options) {
  ExponentSolver solver(model, D, options);
  ExponentCurve curve;
  curve.concentration_axis = concentration_axis;
  curve.r_zero = solver.boundaries().r_zero();
  curve.r_infinite = solver.boundaries().r_infinite();
  curve.samples.resize(grid.size());
  std::vector<std::string> failures(grid.size());
  std::vector<int> kinds(grid.size(), 0);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < grid.size(); ++i) {
    try {
      curve.samples[i].axis = grid[i];
      curve.samples[i].result = solver.solve(concentration_axis ? -grid[i] : grid[i]);
    } catch (const Error& e) {
      failures[i] = e.what();
      kinds[i] = e.exit_code();
    } catch (const std::exception& e) {
      failures[i] = e.what();
      kinds[i] = static_cast<int>(ErrorKind::non_convergence);
    }
  }
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (kinds[i] != 0) throw Error(static_cast<ErrorKind>(kinds[i]), failures[i]);
  return curve;
}

ExponentResult hoeffding_exponent(const Distribution& p0, const Distribution& p1, double r,
                                  const ExponentOptions& options) {
  if (p0.size() != p1.size()) throw validation_error("dimension mismatch between P0 and P1");
  if (!p0.strictly_positive() || !p1.strictly_positive())
    throw validation_error("hypothesis distributions must be strictly positive");
  const double limit = relative_entropy(p1, p0).nats();
  if (!(r > 0.0 && r < limit))
    throw validation_error("r = " + std::to_string(r) + " outside (0, H(P1||P0)) = (0, " + std::to_string(limit) + ")");
  const auto ab = Alphabet::numbered(p0.size());
  auto model = validate_model(ab, ab, std::vector<double>(p1.values().begin(), p1.values().end()),
                              std::vector<double>(p0.values().begin(), p0.values().end()),
                              DistortionMatrix::hamming(p0.size()));
  return ExponentSolver(std::move(model), 0.0, options).solve(-r);
}

ExponentResult marton_exponent(const Distribution& p, const DistortionMatrix& rho, double R, double D,
                               const ExponentOptions& options) {
  if (!std::isfinite(R) || R < 0.0) throw validation_error("rate R = " + std::to_string(R) + " out of range");
  auto model = validate_model(Alphabet::numbered(rho.rows()), Alphabet::numbered(rho.cols()),
                              std::vector<double>(p.values().begin(), p.values().end()),
                              std::vector<double>(rho.cols(), 1.0), rho);
  return exponent(model, R, D, options);
}

ExponentResult concentration_exponent(const Distribution& p, const DistortionMatrix& rho, double r, double D,
                                      const ExponentOptions& options) {
  if (!(r > 0.0)) throw validation_error("r must be positive");
  if (rho.rows() != rho.cols()) throw validation_error("concentration exponent needs a square distortion matrix");
  const auto ab = Alphabet::numbered(rho.rows());
  std::vector<double> pv(p.values().begin(), p.values().end());
  auto model = validate_model(ab, ab, pv, pv, rho);
  return exponent(model, -r, D, options);
}

double talagrand_bound(double r, double D) {
  if (!(r >= 0.0) || !(D >= 0.0)) throw validation_error("talagrand bound needs r >= 0 and D >= 0");
  return D * D / 2.0 - r;
}

}  // namespace spherecover
