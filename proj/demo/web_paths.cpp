// Draw a small lattice web and print its forward and dual paths as CSV.
//   demo_web_paths [seed] [half_width] > paths.csv

#include <cstdlib>
#include <iostream>

#include "tsrm/lattice_web.hpp"

int main(int argc, char** argv) {
  using namespace tsrm;
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  const coord w = argc > 2 ? std::atoll(argv[2]) : 8;
  const ProfiledWeb web(ArrowField({seed, 0}, Window::unbounded()), ProfileKind::stationary);

  std::cout << "kind,start,x,h\n";
  for (coord h = -w; h <= w; ++h) {
    if (is_primal({-w, h})) {
      const auto p = forward_path(web, {-w, h}, w);
      for (std::size_t k = 0; k < p.heights.size(); ++k) std::cout << "forward," << h << ',' << p.x_at(k) << ',' << p.heights[k] << '\n';
    }
    if (is_dual({w, h})) {
      const auto p = backward_path(web, {w, h}, -w);
      for (std::size_t k = 0; k < p.heights.size(); ++k) std::cout << "dual," << h << ',' << p.x_at(k) << ',' << p.heights[k] << '\n';
    }
  }
  for (coord x = -w; x <= w; ++x) std::cout << "profile,0," << x << ',' << web.profile().height(x) << '\n';
  std::cerr << "crossings: " << count_crossings(web, {-w, w, -w, w}) << '\n';
}
