#include "spherecover/covering.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <string>

#include "kernel_detail.hpp"
#include "spherecover/errors.hpp"
#include "spherecover/kernels.hpp"
#include "spherecover/model_io.hpp"
#include "spherecover/rate.hpp"

namespace spherecover {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Covered iff the per-letter distortion is at most D plus this slack.
constexpr double kDistortionSlack = 1e-12;

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double threshold_for(std::size_t n, double D) { return static_cast<double>(n) * (D + kDistortionSlack); }

std::vector<double> log_source(const Distribution& p) {
  std::vector<double> out;
  for (double v : p.values()) out.push_back(std::log(v));
  return out;
}

void check_source_cap(const Model& model, std::size_t n, const CoverOptions& options) {
  const std::uint64_t states = kernels::power_count(model.source_size(), n);
  if (states == 0 || states > options.max_source_strings)
    throw cap_error("source space |A|^n = " + std::to_string(model.source_size()) + "^" + std::to_string(n) +
                    " exceeds the enumeration cap of " + std::to_string(options.max_source_strings));
}

// Ball membership of every source string, one bitset per reproduction string.
struct CoverageTable {
  std::size_t words = 0;
  std::vector<std::uint64_t> bits;
  std::vector<double> atoms;

  CoverageTable(const Model& model, std::size_t n, std::uint64_t candidates, double D) {
    const std::size_t nx = model.source_size(), ny = model.reproduction_size();
    const std::uint64_t sources = kernels::power_count(nx, n);
    words = static_cast<std::size_t>((sources + 63) / 64);
    bits.assign(static_cast<std::size_t>(candidates) * words, 0);
    const auto lp = log_source(model.P());
    atoms.resize(sources);
    const double threshold = threshold_for(n, D);
    const auto& rho = model.rho();

#pragma omp parallel
    {
      std::vector<Symbol> x(n), y(n);
#pragma omp for schedule(static)
      for (std::int64_t s = 0; s < static_cast<std::int64_t>(sources); ++s) {
        kernels::detail::decode_index(static_cast<std::uint64_t>(s), nx, n, x.data());
        double la = 0.0;
        for (Symbol v : x) la += lp[v];
        atoms[s] = std::exp(la);
      }
#pragma omp for schedule(dynamic)
      for (std::int64_t c = 0; c < static_cast<std::int64_t>(candidates); ++c) {
        kernels::detail::decode_index(static_cast<std::uint64_t>(c), ny, n, y.data());
        std::uint64_t* row = bits.data() + static_cast<std::size_t>(c) * words;
        for (std::uint64_t s = 0; s < sources; ++s) {
          kernels::detail::decode_index(s, nx, n, x.data());
          double d = 0.0;
          std::size_t i = 0;
          for (; i < n; ++i) {
            d += rho(x[i], y[i]);
            if (d > threshold) break;
          }
          if (i == n) row[s / 64] |= std::uint64_t{1} << (s % 64);
        }
      }
    }
  }
};

Word decode_word(std::uint64_t index, std::size_t base, std::size_t n) {
  Word w(n);
  kernels::detail::decode_index(index, base, n, w.data());
  return w;
}

CoverReport make_report(std::size_t n, double D, double R, const Codebook& codebook, double error) {
  CoverReport r;
  r.n = n;
  r.D = D;
  r.R_nats = R;
  r.mass_log = codebook.mass_log();
  r.error_prob = std::clamp(error, 0.0, 1.0);
  r.empirical_exponent = r.error_prob > 0.0 ? -std::log(r.error_prob) / static_cast<double>(n) : kInf;
  r.codewords = codebook.size();
  return r;
}

}  // namespace

// --- Codebook ---------------------------------------------------------------

Codebook::Codebook(const Model& model, std::size_t n) : n_(n) {
  if (n == 0) throw validation_error("block length must be positive");
  for (double m : model.M().values()) log_mass_.push_back(std::log(m));
  reference_ = static_cast<double>(n) * *std::max_element(log_mass_.begin(), log_mass_.end());
}

double Codebook::word_log_mass(std::span<const Symbol> word) const {
  double s = 0.0;
  for (Symbol v : word) s += log_mass_.at(v);
  return s;
}

bool Codebook::add(const Word& word) {
  if (word.size() != n_)
    throw validation_error("codeword length " + std::to_string(word.size()) + " differs from n = " +
                           std::to_string(n_));
  for (Symbol v : word)
    if (v >= log_mass_.size()) throw validation_error("codeword letter out of range: " + std::to_string(v));
  if (!index_.insert(word).second) return false;
  strings_.push_back(word);
  kernels::CompensatedSum s{scaled_sum_, carry_};
  s.add(std::exp(word_log_mass(word) - reference_));
  scaled_sum_ = s.sum;
  carry_ = s.carry;
  return true;
}

double Codebook::mass_log() const noexcept {
  const double total = scaled_sum_ + carry_;
  if (!(total > 0.0)) return -kInf;
  return (reference_ + std::log(total)) / static_cast<double>(n_);
}

double Codebook::recompute_mass_log() const {
  if (strings_.empty()) return -kInf;
  kernels::CompensatedSum s;
  for (const auto& w : strings_) s.add(std::exp(word_log_mass(w) - reference_));
  return (reference_ + std::log(s.value())) / static_cast<double>(n_);
}

std::string Codebook::hash() const {
  std::string bytes = std::to_string(n_) + ":";
  for (const auto& w : strings_) {
    bytes.append(w.begin(), w.end());
    bytes.push_back('\xff');
  }
  return sha256_prefix(bytes);
}

// --- Evaluation -------------------------------------------------------------

CoverReport blowup_error(const Model& model, const Codebook& codebook, double D, const CoverOptions& options) {
  if (!(D >= 0.0)) throw validation_error("distortion level must be nonnegative");
  const std::size_t n = codebook.n();
  check_source_cap(model, n, options);
  std::vector<Symbol> flat;
  flat.reserve(codebook.size() * n);
  for (const auto& w : codebook.strings()) flat.insert(flat.end(), w.begin(), w.end());
  const auto lp = log_source(model.P());
  kernels::CoverInstance inst{n, lp, &model.rho(), flat, threshold_for(n, D)};
  const double error =
      options.parallel ? kernels::uncovered_probability_omp(inst) : kernels::uncovered_probability_serial(inst);
  auto report = make_report(n, D, codebook.mass_log(), codebook, error);
  report.generator = "given";
  return report;
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t n, std::size_t trial) noexcept {
  return splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(n)) ^ static_cast<std::uint64_t>(trial));
}

// --- Generators -------------------------------------------------------------

Codebook type_covering_codebook(const Model& model, std::size_t n, double R, double D, std::uint64_t seed,
                                const TypeCoveringOptions& options) {
  if (!std::isfinite(R)) throw validation_error("codebook rate must be finite");
  const auto target = rate(model, D).output_law;
  const std::size_t ny = target.size();
  std::vector<double> cdf(ny);
  double acc = 0.0;
  for (std::size_t y = 0; y < ny; ++y) cdf[y] = acc += target[y];

  const double radius = options.typicality_constant / std::sqrt(static_cast<double>(n));
  const double budget = static_cast<double>(n) * R;
  const double slack = 1e-12 * std::max(1.0, std::abs(budget));
  const double stop = R - options.margin;
  std::mt19937_64 rng(seed);
  Codebook book(model, n);

  // Typical types: every string of a type has the same mass, so the budget is saturated once no
  // type with unused strings fits. At small n the mass granularity can stop the draw before R - margin.
  struct TypeClass {
    double log_mass;
    double strings;
    std::size_t used = 0;
  };
  std::map<std::vector<std::uint32_t>, TypeClass> typical;
  for (auto& counts : kernels::compositions(n, ny)) {
    double tv = 0.0, lm = 0.0, lg = std::lgamma(static_cast<double>(n) + 1.0);
    bool possible = true;
    for (std::size_t y = 0; y < ny; ++y) {
      if (counts[y] > 0 && target[y] <= 0.0) possible = false;
      tv += std::abs(static_cast<double>(counts[y]) / static_cast<double>(n) - target[y]);
      lm += static_cast<double>(counts[y]) * std::log(model.M()[y]);
      lg -= std::lgamma(static_cast<double>(counts[y]) + 1.0);
    }
    if (possible && 0.5 * tv <= radius) typical.emplace(std::move(counts), TypeClass{lm, std::round(std::exp(lg))});
  }
  auto log_add = [](double a, double b) {
    const double hi = std::max(a, b);
    return hi == -kInf ? -kInf : hi + std::log(std::exp(a - hi) + std::exp(b - hi));
  };
  auto fits = [&](double current, double lm) { return log_add(current, lm) <= budget + slack; };
  auto saturated = [&](double current) {
    for (const auto& [counts, t] : typical)
      if (static_cast<double>(t.used) < t.strings && fits(current, t.log_mass)) return false;
    return true;
  };

  Word w(n);
  std::vector<std::uint32_t> counts(ny);
  std::size_t atypical = 0, duplicate = 0, over_budget = 0, draws = 0;
  double current = -kInf;  // log M^n of the codebook
  auto starved = [&](const std::string& why) {
    return convergence_error("type-covering sampler starved at n = " + std::to_string(n) + " (" + why + ") after " +
                             std::to_string(draws) + " draws: accepted " + std::to_string(book.size()) +
                             ", atypical " + std::to_string(atypical) + ", duplicate " + std::to_string(duplicate) +
                             ", over budget " + std::to_string(over_budget) + "; mass rate " +
                             std::to_string(book.mass_log()) + ", target " + std::to_string(stop));
  };
  if (typical.empty()) throw starved("no type within the typicality radius");

  while (book.mass_log() < stop && !saturated(current)) {
    if (draws >= options.max_draws) throw starved("draw limit reached");
    ++draws;
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = uniform01(rng) * acc;
      std::size_t y = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      if (y >= ny) y = ny - 1;
      w[i] = static_cast<Symbol>(y);
      ++counts[y];
    }
    const auto type = typical.find(counts);
    if (type == typical.end()) {
      ++atypical;
      continue;
    }
    if (book.contains(w)) {
      ++duplicate;
      continue;
    }
    if (!fits(current, type->second.log_mass)) {
      ++over_budget;
      continue;
    }
    book.add(w);
    ++type->second.used;
    current = log_add(current, type->second.log_mass);
  }
  return book;
}

Codebook greedy_codebook(const Model& model, std::size_t n, double R, double D, const CoverOptions& options) {
  check_source_cap(model, n, options);
  const std::uint64_t candidates = kernels::power_count(model.reproduction_size(), n);
  const std::uint64_t sources = kernels::power_count(model.source_size(), n);
  if (candidates == 0 || static_cast<double>(candidates) * static_cast<double>(sources) > 6.7e7)
    throw cap_error("greedy baseline limited to |A^|^n * |A|^n <= 6.7e7");
  CoverageTable table(model, n, candidates, D);
  Codebook book(model, n);
  const double budget = static_cast<double>(n) * R;
  std::vector<std::uint64_t> covered(table.words, 0);

  auto gain = [&](std::uint64_t c) {
    kernels::CompensatedSum s;
    const std::uint64_t* row = table.bits.data() + static_cast<std::size_t>(c) * table.words;
    for (std::size_t k = 0; k < table.words; ++k) {
      std::uint64_t fresh = row[k] & ~covered[k];
      while (fresh) {
        const int b = std::countr_zero(fresh);
        s.add(table.atoms[k * 64 + static_cast<std::size_t>(b)]);
        fresh &= fresh - 1;
      }
    }
    return s.value();
  };

  // Lazy greedy: gains only shrink as coverage grows. Ties go to the smaller index.
  using Entry = std::pair<double, std::uint64_t>;
  auto cmp = [](const Entry& a, const Entry& b) { return a.first < b.first || (a.first == b.first && a.second > b.second); };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
  for (std::uint64_t c = 0; c < candidates; ++c) heap.push({gain(c), c});
  double current = -kInf;
  while (!heap.empty()) {
    auto [stale, c] = heap.top();
    heap.pop();
    const double g = gain(c);
    if (!heap.empty() && cmp({g, c}, heap.top())) {
      heap.push({g, c});
      continue;
    }
    if (!(g > 0.0)) break;
    const Word w = decode_word(c, model.reproduction_size(), n);
    const double lm = book.word_log_mass(w);
    const double hi = std::max(current, lm);
    const double after = hi + std::log(std::exp(current - hi) + std::exp(lm - hi));
    if (after > budget + 1e-12 * std::max(1.0, std::abs(budget))) continue;  // never fits again
    book.add(w);
    current = after;
    const std::uint64_t* row = table.bits.data() + static_cast<std::size_t>(c) * table.words;
    for (std::size_t k = 0; k < table.words; ++k) covered[k] |= row[k];
  }
  return book;
}

ExhaustiveResult exhaustive_optimum(const Model& model, std::size_t n, double R, double D,
                                    const CoverOptions& options) {
  if (!(D >= 0.0)) throw validation_error("distortion level must be nonnegative");
  const std::uint64_t candidates = kernels::power_count(model.reproduction_size(), n);
  if (candidates == 0 || candidates > options.max_exhaustive_candidates)
    throw cap_error("exhaustive optimum needs |A^|^n <= " + std::to_string(options.max_exhaustive_candidates) +
                    ", got " + std::to_string(model.reproduction_size()) + "^" + std::to_string(n));
  check_source_cap(model, n, options);
  CoverageTable table(model, n, candidates, D);

  Codebook probe(model, n);
  std::vector<double> mass(candidates);
  for (std::uint64_t c = 0; c < candidates; ++c)
    mass[c] = std::exp(probe.word_log_mass(decode_word(c, model.reproduction_size(), n)));
  const double cap = std::isinf(R) && R > 0 ? kInf : std::exp(static_cast<double>(n) * R) * (1.0 + 1e-12);

  kernels::SubsetInstance inst{table.words, table.bits, mass, cap, table.atoms};
  const auto best = options.parallel ? kernels::subset_min_omp(inst) : kernels::subset_min_serial(inst);

  ExhaustiveResult out;
  Codebook book(model, n);
  for (std::uint64_t c = 0; c < candidates; ++c)
    if ((best.subset >> c) & 1u) {
      out.codebook.push_back(decode_word(c, model.reproduction_size(), n));
      book.add(out.codebook.back());
    }
  out.report = make_report(n, D, R, book, best.error);
  out.report.generator = "exhaustive";
  return out;
}

// --- Experiments ------------------------------------------------------------

SweepResult empirical_exponent_sweep(const Model& model, std::span<const std::size_t> n_list, double R, double D,
                                     std::size_t trials, std::uint64_t seed, const TypeCoveringOptions& draw,
                                     const CoverOptions& options) {
  if (trials == 0) throw validation_error("trials must be positive");
  for (std::size_t n : n_list) check_source_cap(model, n, options);

  SweepResult result;
  for (std::size_t n : n_list) {
    std::vector<CoverReport> runs(trials);
    std::vector<std::string> failures(trials);
    const auto lp = log_source(model.P());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t t = 0; t < static_cast<std::int64_t>(trials); ++t) {
      try {
        const std::uint64_t s = trial_seed(seed, n, static_cast<std::size_t>(t));
        const Codebook book = type_covering_codebook(model, n, R, D, s, draw);
        std::vector<Symbol> flat;
        for (const auto& w : book.strings()) flat.insert(flat.end(), w.begin(), w.end());
        kernels::CoverInstance inst{n, lp, &model.rho(), flat, threshold_for(n, D)};
        runs[t] = make_report(n, D, R, book, kernels::uncovered_probability_serial(inst));
        runs[t].seed = s;
        runs[t].generator = "type_covering";
      } catch (const std::exception& e) {
        failures[t] = e.what();
      }
    }
    for (const auto& f : failures)
      if (!f.empty()) throw convergence_error(f);
    // Lowest error wins; earlier trials win ties.
    std::size_t best = 0;
    for (std::size_t t = 1; t < trials; ++t)
      if (runs[t].error_prob < runs[best].error_prob) best = t;
    result.reports.push_back(runs[best]);
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : result.reports) {
    if (!(r.error_prob > 0.0)) continue;
    const double x = static_cast<double>(r.n), y = -std::log(r.error_prob);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++result.fitted_points;
  }
  const double k = static_cast<double>(result.fitted_points);
  if (result.fitted_points >= 2 && k * sxx - sx * sx > 0.0) {
    result.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    result.intercept = (sy - result.slope * sx) / k;
  } else if (result.fitted_points == 1) {
    result.intercept = sy;
  }
  return result;
}

std::vector<CoverReport> universality_check(const Model& model, const Codebook& codebook, double D,
                                            std::span<const Distribution> sources, const CoverOptions& options) {
  std::vector<CoverReport> out;
  for (const auto& p : sources) {
    if (!p.strictly_positive()) throw validation_error("universality sources must be strictly positive");
    auto report = blowup_error(model.with_source(p), codebook, D, options);
    report.generator = "universality";
    out.push_back(report);
  }
  return out;
}

}  // namespace spherecover
