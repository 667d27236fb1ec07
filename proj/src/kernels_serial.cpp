#include <limits>
#include <stdexcept>

#include "kernel_detail.hpp"
#include "spherecover/errors.hpp"

namespace spherecover::kernels {

std::uint64_t power_count(std::size_t size, std::size_t n) noexcept {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > std::numeric_limits<std::uint64_t>::max() / size) return 0;
    total *= size;
  }
  return total;
}

std::vector<std::vector<std::uint32_t>> compositions(std::size_t total, std::size_t parts) {
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> current(parts, 0);
  // Recursive fill of the first parts-1 entries; the last takes the remainder.
  auto rec = [&](auto&& self, std::size_t pos, std::size_t remaining) -> void {
    if (pos + 1 == parts) {
      current[pos] = static_cast<std::uint32_t>(remaining);
      out.push_back(current);
      return;
    }
    for (std::size_t v = 0; v <= remaining; ++v) {
      current[pos] = static_cast<std::uint32_t>(v);
      self(self, pos + 1, remaining - v);
    }
  };
  if (parts > 0) rec(rec, 0, total);
  return out;
}

double uncovered_probability_serial(const CoverInstance& inst) {
  const std::size_t base = inst.log_source.size();
  const std::uint64_t total = power_count(base, inst.n);
  if (total == 0) throw cap_error("source space too large to enumerate");
  std::vector<Symbol> x(inst.n);
  CompensatedSum sum;
  for (std::uint64_t i = 0; i < total; ++i) {
    detail::decode_index(i, base, inst.n, x.data());
    sum.add(detail::uncovered_atom(inst, x.data()));
  }
  return sum.value();
}

MeshMinimum channel_mesh_min_serial(const ChannelMeshInstance& inst) {
  const std::size_t nx = inst.rho->rows(), ny = inst.rho->cols();
  const auto comps = compositions(inst.mesh, ny);
  const std::uint64_t tuples = power_count(comps.size(), nx);
  std::vector<double> w(nx * ny), py(ny);
  double best = std::numeric_limits<double>::infinity();
  std::uint64_t best_tuple = 0;
  for (std::uint64_t t = 0; t < tuples; ++t) {
    detail::fill_channel(comps, t, nx, ny, static_cast<double>(inst.mesh), w.data());
    const double f = detail::mesh_objective(inst, w.data(), py.data());
    if (f < best) {
      best = f;
      best_tuple = t;
    }
  }
  MeshMinimum result;
  result.feasible = best < std::numeric_limits<double>::infinity();
  result.value = best;
  result.channel.resize(nx * ny);
  detail::fill_channel(comps, best_tuple, nx, ny, static_cast<double>(inst.mesh), result.channel.data());
  return result;
}

SubsetMinimum subset_min_serial(const SubsetInstance& inst) {
  detail::SubsetSearch search{inst, inst.candidate_mass.size()};
  std::vector<std::uint64_t> covered(inst.words_per_set, 0);
  search.run(0, 0, covered, 0.0);
  return search.best;
}

}  // namespace spherecover::kernels
