#pragma once

// Data-parallel inner loops. Every kernel has a serial reference implementation
// (kernels_serial.cpp) and an OpenMP implementation (kernels_omp.cpp); the two
// are required to agree and are benchmarked against each other.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spherecover/model.hpp"

namespace spherecover::kernels {

/// Neumaier compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) noexcept {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      carry += (sum - t) + v;
    else
      carry += (v - t) + sum;
    sum = t;
  }
  void add(const CompensatedSum& other) noexcept {
    add(other.sum);
    add(other.carry);
  }
  double value() const noexcept { return sum + carry; }
};

/// Exhaustive evaluation of 1 - P^n([C]_D).
struct CoverInstance {
  std::size_t n = 0;
  std::span<const double> log_source;  // log P(x); size |A|
  const DistortionMatrix* rho = nullptr;
  std::span<const Symbol> codewords;   // flattened, n letters per codeword
  double threshold = 0.0;              // x is covered iff sum_i rho(x_i, y_i) <= threshold for some y
};

/// Number of strings of length n over an alphabet of `size` letters, or 0 on overflow.
std::uint64_t power_count(std::size_t size, std::size_t n) noexcept;

double uncovered_probability_serial(const CoverInstance& inst);
double uncovered_probability_omp(const CoverInstance& inst);

/// Exhaustive minimization of the rate objective over row-stochastic matrices on a mesh.
struct ChannelMeshInstance {
  std::span<const double> source;
  const DistortionMatrix* rho = nullptr;
  std::span<const double> log_mass;
  double D = 0.0;
  std::size_t mesh = 0;
};

struct MeshMinimum {
  double value = 0.0;
  std::vector<double> channel;  // row-major
  bool feasible = false;
};

/// All compositions of `total` into `parts` nonnegative integers, lexicographic order.
std::vector<std::vector<std::uint32_t>> compositions(std::size_t total, std::size_t parts);

MeshMinimum channel_mesh_min_serial(const ChannelMeshInstance& inst);
MeshMinimum channel_mesh_min_omp(const ChannelMeshInstance& inst);

/// Minimum uncovered probability over every subset of candidates whose total mass fits the cap.
struct SubsetInstance {
  std::size_t words_per_set = 0;            // 64-bit words per coverage bitset
  std::span<const std::uint64_t> coverage;  // candidates x words_per_set
  std::span<const double> candidate_mass;
  double mass_cap = 0.0;
  std::span<const double> atom_probability;  // per source string
};

struct SubsetMinimum {
  double error = 1.0;
  std::uint64_t subset = 0;  // bit i set iff candidate i chosen; ties broken toward the smaller mask
};

SubsetMinimum subset_min_serial(const SubsetInstance& inst);
SubsetMinimum subset_min_omp(const SubsetInstance& inst);

}  // namespace spherecover::kernels
