#pragma once
// Lattice ensembles shared by the CLI and the acceptance runner.
// Replica r uses the web keyed by (seed, substream(r, tag)).

#include <cmath>
#include <cstdint>
#include <vector>

#include "tsrm/estimators.hpp"
#include "tsrm/parallel.hpp"
#include "tsrm/tsrm_contour.hpp"

namespace tsrm {

inline ProfiledWeb replica_web(std::uint64_t seed, std::size_t r, ProfileKind kind, std::uint64_t tag = 0x4C4154u) {
  return ProfiledWeb(ArrowField({seed, substream(r, tag)}, Window::unbounded()), kind);
}

/// Snapshot of every replica at each of `times`; result[r][k].
inline std::vector<std::vector<ContourSnapshot>> lattice_snapshots(std::size_t n, std::uint64_t seed, double mesh,
                                                                   ProfileKind kind, const std::vector<double>& times,
                                                                   unsigned threads = 1) {
  std::vector<std::vector<ContourSnapshot>> out(n);
  parallel_for(n, threads, [&](std::size_t r) { out[r] = walk_snapshots(replica_web(seed, r, kind), times, mesh); });
  return out;
}

/// p-variation of unit-duration traces; result[r][i] for levels[i].
inline std::vector<std::vector<VariationPoint>> lattice_p_variation(std::size_t n, std::uint64_t seed, double mesh,
                                                                   ProfileKind kind, double p, const std::vector<int>& levels,
                                                                   double duration = 1.0, unsigned threads = 1) {
  std::vector<std::vector<VariationPoint>> out(n);
  parallel_for(n, threads, [&](std::size_t r) {
    const TsrmTrace tr = build_contour(replica_web(seed, r, kind), duration, mesh);
    out[r] = p_variation(tr, p, levels);
  });
  return out;
}

/// Running sup X and sup |H| at decade times 10^k, k = first..first+decades-1.
inline std::vector<LilSeries> lattice_lil_series(std::size_t n, std::uint64_t seed, double mesh, ProfileKind kind,
                                                 int first_decade, int decades, unsigned threads = 1) {
  std::vector<double> times;
  for (int k = 0; k < decades; ++k) times.push_back(std::pow(10.0, first_decade + k));
  std::vector<LilSeries> out(n);
  parallel_for(n, threads, [&](std::size_t r) {
    const auto snaps = walk_snapshots(replica_web(seed, r, kind), times, mesh);
    LilSeries s;
    for (const auto& sn : snaps) {
      s.t.push_back(sn.t);
      s.sup_x.push_back(sn.sup_x);
      s.sup_abs_h.push_back(std::max(sn.sup_h, -sn.inf_h));
    }
    out[r] = std::move(s);
  });
  return out;
}

}  // namespace tsrm
