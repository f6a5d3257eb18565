// Walk the contour for one unit of time and report where it ended up,
// together with the local time profile.
//   demo_contour_trace [seed] [log2(1/mesh)]

#include <cmath>
#include <cstdlib>
#include <iostream>

#include "tsrm/csv.hpp"
#include "tsrm/tsrm_contour.hpp"

int main(int argc, char** argv) {
  using namespace tsrm;
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  const int k = argc > 2 ? std::atoi(argv[2]) : 10;
  const double mesh = std::ldexp(1.0, -k);
  const ProfiledWeb web(ArrowField({seed, 0}, Window::unbounded()), ProfileKind::stationary);

  const TsrmTrace tr = build_contour(web, 1.0, mesh);
  const auto& end = tr.samples.back();
  std::cout << "cells " << tr.cells.size() << ", X_1 = " << end.x << ", H_1 = " << end.h << '\n';

  const LocalTimeProfile lp = local_time_profile(tr, tr.duration());
  std::cout << "local time mass " << lp.mass() << " over " << lp.cells.size() << " strips\n";
  if (auto s = hitting_time(tr, 0.25)) std::cout << "sigma(0.25) = " << *s << '\n';
  for (const auto& v : p_variation(tr, 1.5, {6, 8, 10}))
    std::cout << "3/2-variation at level " << v.level << ": " << v.value << '\n';
  write_text_file("contour_trace.csv", trace_table(tr).str());
}
