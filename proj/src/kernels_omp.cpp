#include <omp.h>

#include <algorithm>
#include <limits>

#include "kernel_detail.hpp"
#include "spherecover/errors.hpp"

namespace spherecover::kernels {

namespace {
// Fixed block count so the summation order does not depend on the thread count.
constexpr std::uint64_t kBlocks = 256;
}  // namespace

double uncovered_probability_omp(const CoverInstance& inst) {
  const std::size_t base = inst.log_source.size();
  const std::uint64_t total = power_count(base, inst.n);
  if (total == 0) throw cap_error("source space too large to enumerate");
  const std::uint64_t blocks = std::min(kBlocks, total);
  std::vector<CompensatedSum> partial(blocks);

#pragma omp parallel
  {
    std::vector<Symbol> x(inst.n);
#pragma omp for schedule(dynamic)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
      const std::uint64_t lo = total * static_cast<std::uint64_t>(b) / blocks;
      const std::uint64_t hi = total * static_cast<std::uint64_t>(b + 1) / blocks;
      CompensatedSum s;
      for (std::uint64_t i = lo; i < hi; ++i) {
        detail::decode_index(i, base, inst.n, x.data());
        s.add(detail::uncovered_atom(inst, x.data()));
      }
      partial[b] = s;
    }
  }
  CompensatedSum sum;
  for (const auto& s : partial) sum.add(s);
  return sum.value();
}

MeshMinimum channel_mesh_min_omp(const ChannelMeshInstance& inst) {
  const std::size_t nx = inst.rho->rows(), ny = inst.rho->cols();
  const auto comps = compositions(inst.mesh, ny);
  const std::uint64_t tuples = power_count(comps.size(), nx);
  double best = std::numeric_limits<double>::infinity();
  std::uint64_t best_tuple = std::numeric_limits<std::uint64_t>::max();

#pragma omp parallel
  {
    std::vector<double> w(nx * ny), py(ny);
    double local = std::numeric_limits<double>::infinity();
    std::uint64_t local_tuple = std::numeric_limits<std::uint64_t>::max();
#pragma omp for schedule(static)
    for (std::int64_t t = 0; t < static_cast<std::int64_t>(tuples); ++t) {
      detail::fill_channel(comps, static_cast<std::uint64_t>(t), nx, ny, static_cast<double>(inst.mesh), w.data());
      const double f = detail::mesh_objective(inst, w.data(), py.data());
      if (detail::better(f, static_cast<std::uint64_t>(t), local, local_tuple)) {
        local = f;
        local_tuple = static_cast<std::uint64_t>(t);
      }
    }
#pragma omp critical
    if (detail::better(local, local_tuple, best, best_tuple)) {
      best = local;
      best_tuple = local_tuple;
    }
  }
  MeshMinimum result;
  result.feasible = best < std::numeric_limits<double>::infinity();
  result.value = best;
  result.channel.resize(nx * ny);
  detail::fill_channel(comps, result.feasible ? best_tuple : 0, nx, ny, static_cast<double>(inst.mesh),
                       result.channel.data());
  return result;
}

SubsetMinimum subset_min_omp(const SubsetInstance& inst) {
  const std::size_t count = inst.candidate_mass.size();
  const std::size_t split = std::min<std::size_t>(count, 8);
  const std::uint64_t prefixes = std::uint64_t{1} << split;
  SubsetMinimum best{2.0, std::numeric_limits<std::uint64_t>::max()};

#pragma omp parallel
  {
    SubsetMinimum local = best;
#pragma omp for schedule(dynamic)
    for (std::int64_t p = 0; p < static_cast<std::int64_t>(prefixes); ++p) {
      const auto prefix = static_cast<std::uint64_t>(p);
      std::vector<std::uint64_t> covered(inst.words_per_set, 0);
      double mass = 0.0;
      bool ok = true;
      for (std::size_t i = 0; i < split && ok; ++i) {
        if (!((prefix >> i) & 1u)) continue;
        mass += inst.candidate_mass[i];
        ok = mass <= inst.mass_cap;
        for (std::size_t w = 0; w < inst.words_per_set; ++w) covered[w] |= inst.coverage[i * inst.words_per_set + w];
      }
      if (!ok) continue;
      detail::SubsetSearch search{inst, count};
      search.run(split, prefix, covered, mass);
      if (detail::better(search.best.error, search.best.subset, local.error, local.subset)) local = search.best;
    }
#pragma omp critical
    if (detail::better(local.error, local.subset, best.error, best.subset)) best = local;
  }
  return best;
}

}  // namespace spherecover::kernels
