#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "spherecover/kernels.hpp"

namespace spherecover::kernels::detail {

inline void decode_index(std::uint64_t index, std::size_t base, std::size_t n, Symbol* out) {
  for (std::size_t i = n; i-- > 0;) {
    out[i] = static_cast<Symbol>(index % base);
    index /= base;
  }
}

/// Probability of source string `x` if it is not covered, zero otherwise.
inline double uncovered_atom(const CoverInstance& inst, const Symbol* x) {
  const auto& rho = *inst.rho;
  const std::size_t n = inst.n;
  const std::size_t count = inst.codewords.size() / (n == 0 ? 1 : n);
  for (std::size_t c = 0; c < count; ++c) {
    const Symbol* y = inst.codewords.data() + c * n;
    double d = 0.0;
    std::size_t i = 0;
    for (; i < n; ++i) {
      d += rho(x[i], y[i]);
      if (d > inst.threshold) break;
    }
    if (i == n) return 0.0;
  }
  double log_atom = 0.0;
  for (std::size_t i = 0; i < n; ++i) log_atom += inst.log_source[x[i]];
  return std::exp(log_atom);
}

/// Rate objective of a row-major channel; +inf if the channel violates the budget.
inline double mesh_objective(const ChannelMeshInstance& inst, const double* w, double* py) {
  const auto& rho = *inst.rho;
  const std::size_t nx = rho.rows(), ny = rho.cols();
  double dist = 0.0;
  for (std::size_t y = 0; y < ny; ++y) py[y] = 0.0;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      py[y] += inst.source[x] * w[x * ny + y];
      dist += inst.source[x] * w[x * ny + y] * rho(x, y);
    }
  if (dist > inst.D + 1e-12) return std::numeric_limits<double>::infinity();
  double f = 0.0;
  for (std::size_t x = 0; x < nx; ++x) {
    if (inst.source[x] <= 0.0) continue;
    for (std::size_t y = 0; y < ny; ++y) {
      const double v = w[x * ny + y];
      if (v > 0.0) f += inst.source[x] * v * std::log(v / py[y]);
    }
  }
  for (std::size_t y = 0; y < ny; ++y)
    if (py[y] > 0.0) f += py[y] * inst.log_mass[y];
  return f;
}

inline void fill_channel(const std::vector<std::vector<std::uint32_t>>& comps, std::uint64_t tuple, std::size_t nx,
                         std::size_t ny, double mesh, double* w) {
  const std::uint64_t per_row = comps.size();
  for (std::size_t x = nx; x-- > 0;) {
    const auto& c = comps[tuple % per_row];
    tuple /= per_row;
    for (std::size_t y = 0; y < ny; ++y) w[x * ny + y] = c[y] / mesh;
  }
}

inline bool better(double value, std::uint64_t key, double best_value, std::uint64_t best_key) {
  return value < best_value || (value == best_value && key < best_key);
}

/// Depth-first enumeration of feasible subsets of candidates [index, count).
struct SubsetSearch {
  const SubsetInstance& inst;
  std::size_t count;
  SubsetMinimum best{2.0, std::numeric_limits<std::uint64_t>::max()};

  double leaf_error(const std::vector<std::uint64_t>& covered) const {
    CompensatedSum s;
    for (std::size_t a = 0; a < inst.atom_probability.size(); ++a)
      if (!((covered[a / 64] >> (a % 64)) & 1u)) s.add(inst.atom_probability[a]);
    return s.value();
  }

  void run(std::size_t index, std::uint64_t mask, std::vector<std::uint64_t>& covered, double mass) {
    if (index == count) {
      const double e = leaf_error(covered);
      if (better(e, mask, best.error, best.subset)) best = {e, mask};
      return;
    }
    run(index + 1, mask, covered, mass);
    const double m = mass + inst.candidate_mass[index];
    if (m > inst.mass_cap) return;
    std::vector<std::uint64_t> next(covered);
    for (std::size_t w = 0; w < inst.words_per_set; ++w) next[w] |= inst.coverage[index * inst.words_per_set + w];
    run(index + 1, mask | (std::uint64_t{1} << index), next, m);
  }
};

}  // namespace spherecover::kernels::detail
