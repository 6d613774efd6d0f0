#include "rwm/quadrature.hpp"

namespace rwm::quad {

std::vector<Interval> cells_between(std::span<const double> breakpoints, double lo, double hi) {
  std::vector<Interval> cells;
  if (!(hi > lo)) return cells;
  double prev = lo;
  for (double b : breakpoints) {
    if (b <= prev) continue;
    if (b >= hi) break;
    cells.push_back({prev, b});
    prev = b;
  }
  cells.push_back({prev, hi});
  return cells;
}

}  // namespace rwm::quad
