#pragma once

// Finite-n covering experiments: exact blowup probabilities, random type-covering
// codebooks, a greedy baseline, and the exhaustive optimum for tiny n.

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "spherecover/model.hpp"

namespace spherecover {

/// A set of distinct reproduction strings of a common length, with its mass tracked in log space.
class Codebook {
 public:
  Codebook(const Model& model, std::size_t n);

  /// Inserts `word` unless already present. Returns true if inserted.
  bool add(const Word& word);
  bool contains(const Word& word) const { return index_.count(word) != 0; }

  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return strings_.size(); }
  bool empty() const noexcept { return strings_.empty(); }
  const std::vector<Word>& strings() const noexcept { return strings_; }

  /// (1/n) log M^n(C); -infinity for the empty codebook.
  double mass_log() const noexcept;
  /// mass_log() recomputed from scratch.
  double recompute_mass_log() const;
  /// log M^n(word).
  double word_log_mass(std::span<const Symbol> word) const;

  /// First 16 hex digits of SHA-256 over the strings in insertion order.
  std::string hash() const;

 private:
  std::size_t n_;
  std::vector<double> log_mass_;  // per reproduction letter
  double reference_;              // n * max log M, an upper bound on every word's log mass
  std::vector<Word> strings_;
  std::set<Word> index_;
  double scaled_sum_ = 0.0;  // sum of exp(log M^n(y) - reference_)
  double carry_ = 0.0;
};

struct CoverReport {
  std::size_t n = 0;
  double D = 0.0;
  double R_nats = 0.0;  ///< mass budget, or the codebook's own mass rate when there is none
  double mass_log = 0.0;
  double error_prob = 1.0;          ///< exact 1 - P^n([C]_D)
  double empirical_exponent = 0.0;  ///< -(1/n) log error_prob; +infinity when error_prob is 0
  std::uint64_t seed = 0;
  std::string generator;
  std::size_t codewords = 0;
};

struct CoverOptions {
  /// Largest |A|^n enumerated by blowup_error.
  std::uint64_t max_source_strings = 2000000;
  /// Largest |A^|^n accepted by exhaustive_optimum.
  std::uint64_t max_exhaustive_candidates = 20;
  bool parallel = true;
};

/// Exact uncovered probability of `codebook` at per-letter distortion D under the model's P.
CoverReport blowup_error(const Model& model, const Codebook& codebook, double D, const CoverOptions& options = {});

struct TypeCoveringOptions {
  double typicality_constant = 1.0;  ///< total-variation radius c / sqrt(n)
  double margin = 0.01;              ///< stop once the mass rate reaches R - margin (nats)
  std::size_t max_draws = 2000000;
};

/// Random codebook from the proof of the direct part: i.i.d. draws from the optimal output law of
/// rate(model, D), kept only when typical, accumulated until the mass rate reaches R - margin
/// without ever exceeding R. Deterministic in `seed`.
Codebook type_covering_codebook(const Model& model, std::size_t n, double R, double D, std::uint64_t seed,
                                const TypeCoveringOptions& options = {});

/// Greedy baseline: repeatedly adds the reproduction string whose ball covers the most uncovered
/// probability while the mass stays within exp(nR).
Codebook greedy_codebook(const Model& model, std::size_t n, double R, double D, const CoverOptions& options = {});

struct ExhaustiveResult {
  CoverReport report;
  std::vector<Word> codebook;
};

/// Minimum uncovered probability over every subset of A^^n with mass at most exp(nR).
ExhaustiveResult exhaustive_optimum(const Model& model, std::size_t n, double R, double D,
                                    const CoverOptions& options = {});

struct SweepResult {
  std::vector<CoverReport> reports;  ///< best of `trials` per n, in the order of n_list
  /// Least-squares fit of -log error_prob against n over reports with positive error.
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t fitted_points = 0;
};

SweepResult empirical_exponent_sweep(const Model& model, std::span<const std::size_t> n_list, double R, double D,
                                     std::size_t trials, std::uint64_t seed, const TypeCoveringOptions& draw = {},
                                     const CoverOptions& options = {});

/// Evaluates the same codebook under each source law.
std::vector<CoverReport> universality_check(const Model& model, const Codebook& codebook, double D,
                                            std::span<const Distribution> sources, const CoverOptions& options = {});

/// Seed of trial `trial` at length n, derived from `seed` by splitmix64 mixing.
std::uint64_t trial_seed(std::uint64_t seed, std::size_t n, std::size_t trial) noexcept;

}  // namespace spherecover
