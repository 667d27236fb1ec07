#include <cmath>
#include <limits>
#include <string>

#include "kernel_detail.hpp"
#include "spherecover/errors.hpp"
#include "spherecover/kernels.hpp"
#include "spherecover/rate.hpp"

namespace spherecover {

namespace {

// Largest number of mesh channels enumerated exhaustively; finer meshes start
// from the best coarse channel and descend at step 1/mesh.
constexpr std::uint64_t kEnumerationCap = 500000;

std::uint64_t channel_count(std::size_t mesh, std::size_t rows, std::size_t cols) {
  // C(mesh + cols - 1, cols - 1) compositions per row.
  double per_row = 1.0;
  for (std::size_t k = 1; k < cols; ++k) per_row = per_row * static_cast<double>(mesh + k) / static_cast<double>(k);
  const double total = std::pow(std::round(per_row), static_cast<double>(rows));
  return total > 1e18 ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(total);
}

// Feasible compass search. Moves shift mass between two letters of one row, or do so in two rows
// at once with the second shift sized to cancel the change in expected distortion, so the search
// can slide along an active budget constraint.
double pattern_search(const kernels::ChannelMeshInstance& inst, std::vector<double>& w, double step) {
  const std::size_t nx = inst.rho->rows(), ny = inst.rho->cols();
  const auto& rho = *inst.rho;
  std::vector<double> py(ny), trial(w.size());
  double best = kernels::detail::mesh_objective(inst, w.data(), py.data());

  auto try_accept = [&]() {
    const double f = kernels::detail::mesh_objective(inst, trial.data(), py.data());
    if (f < best - 1e-15 * std::max(1.0, std::abs(best))) {
      best = f;
      w = trial;
      return true;
    }
    return false;
  };

  for (; step >= 1e-11; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t x1 = 0; x1 < nx; ++x1) {
        if (inst.source[x1] <= 0.0) continue;
        for (std::size_t a = 0; a < ny; ++a)
          for (std::size_t b = 0; b < ny; ++b) {
            if (a == b) continue;
            const double amount = std::min(step, w[x1 * ny + a]);
            if (amount <= 0.0) continue;
            trial = w;
            trial[x1 * ny + a] -= amount;
            trial[x1 * ny + b] += amount;
            if (try_accept()) {
              improved = true;
              continue;
            }
            const double shift = inst.source[x1] * amount * (rho(x1, b) - rho(x1, a));
            if (shift == 0.0) continue;
            // Stop after the first accepted pair: amount and shift were sized for the old w.
            bool moved = false;
            for (std::size_t x2 = 0; x2 < nx && !moved; ++x2) {
              if (x2 == x1 || inst.source[x2] <= 0.0) continue;
              for (std::size_t c = 0; c < ny && !moved; ++c)
                for (std::size_t d = 0; d < ny && !moved; ++d) {
                  if (c == d) continue;
                  const double slope = inst.source[x2] * (rho(x2, d) - rho(x2, c));
                  if (slope == 0.0 || (slope > 0.0) == (shift > 0.0)) continue;
                  const double other = -shift / slope;
                  if (other > w[x2 * ny + c]) continue;
                  trial = w;
                  trial[x1 * ny + a] -= amount;
                  trial[x1 * ny + b] += amount;
                  trial[x2 * ny + c] -= other;
                  trial[x2 * ny + d] += other;
                  if (trial[x2 * ny + c] < 0.0) trial[x2 * ny + c] = 0.0;
                  if (try_accept()) improved = moved = true;
                }
            }
          }
      }
    }
  }
  return best;
}

}  // namespace

double rate_oracle_for_source(const Model& model, std::span<const double> source, double D, std::size_t mesh) {
  const std::size_t nx = model.source_size(), ny = model.reproduction_size();
  if (nx * ny > 9) throw cap_error("rate oracle is limited to |A|*|A^| <= 9");
  if (mesh < 10) throw validation_error("rate oracle mesh must be at least 10");
  if (!(D >= 0.0)) throw validation_error("distortion level must be nonnegative");
  if (source.size() != nx) throw validation_error("dimension mismatch between source and model");

  std::vector<double> log_mass;
  for (double m : model.M().values()) log_mass.push_back(std::log(m));

  kernels::ChannelMeshInstance inst{source, &model.rho(), log_mass, D, mesh};
  std::size_t enumeration_mesh = mesh;
  while (enumeration_mesh > 1 && channel_count(enumeration_mesh, nx, ny) > kEnumerationCap) --enumeration_mesh;
  inst.mesh = enumeration_mesh;
  auto coarse = kernels::channel_mesh_min_omp(inst);
  if (!coarse.feasible) throw convergence_error("rate oracle found no feasible mesh channel");

  inst.mesh = mesh;
  return pattern_search(inst, coarse.channel, 1.0 / static_cast<double>(enumeration_mesh));
}

double rate_oracle(const Model& model, double D, std::size_t mesh) {
  return rate_oracle_for_source(model, model.P().values(), D, mesh);
}

}  // namespace spherecover
