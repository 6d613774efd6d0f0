#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace rwm::quad {

struct Interval {
  double lo;
  double hi;
};

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  std::size_t max_evals = 1'000'000;
};

template <class V>
struct Result {
  V value{};
  V error{};
  std::size_t evaluations = 0;
  bool converged = false;
};

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class V>
struct Ops;

template <>
struct Ops<double> {
  static constexpr std::size_t size = 1;
  static double& at(double& v, std::size_t) { return v; }
  static double at(const double& v, std::size_t) { return v; }
};

template <std::size_t N>
struct Ops<std::array<double, N>> {
  static constexpr std::size_t size = N;
  static double& at(std::array<double, N>& v, std::size_t i) { return v[i]; }
  static double at(const std::array<double, N>& v, std::size_t i) { return v[i]; }
};

template <class V>
struct Segment {
  double lo;
  double hi;
  V value;
  V error;
};

template <class V, class F>
Segment<V> gk15(F& f, double lo, double hi) {
  using O = Ops<V>;
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  V fc = f(center);
  V kronrod{};
  V gauss{};
  for (std::size_t c = 0; c < O::size; ++c) {
    O::at(kronrod, c) = O::at(fc, c) * kWgk[7];
    O::at(gauss, c) = O::at(fc, c) * kWg[3];
  }
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    V f1 = f(center - dx);
    V f2 = f(center + dx);
    for (std::size_t c = 0; c < O::size; ++c) {
      const double s = O::at(f1, c) + O::at(f2, c);
      O::at(kronrod, c) += kWgk[j] * s;
      if (j % 2 == 1) O::at(gauss, c) += kWg[j / 2] * s;
    }
  }
  Segment<V> seg{lo, hi, {}, {}};
  for (std::size_t c = 0; c < O::size; ++c) {
    O::at(seg.value, c) = O::at(kronrod, c) * half;
    O::at(seg.error, c) = std::fabs((O::at(kronrod, c) - O::at(gauss, c)) * half);
  }
  return seg;
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature over a union of cells.
///
/// Every cell is integrated once; the segment with the largest error relative
/// to its component tolerance is then bisected until every component meets
/// max(abs_tol, rel_tol * |I|) or the evaluation budget runs out. V is double
/// or std::array<double, N>; tolerances apply per component.
template <class V, class F>
Result<V> integrate(F&& f, std::span<const Interval> cells, const Options& opts = {}) {
  using O = detail::Ops<V>;
  using Seg = detail::Segment<V>;
  constexpr std::size_t kEvalsPerSegment = 15;

  Result<V> out;
  std::vector<Seg> segs;
  segs.reserve(cells.size() * 4 + 16);
  for (const auto& cell : cells) {
    if (!(cell.hi > cell.lo)) continue;
    segs.push_back(detail::gk15<V>(f, cell.lo, cell.hi));
    out.evaluations += kEvalsPerSegment;
  }

  auto totals = [&](V& value, V& error) {
    value = V{};
    error = V{};
    for (const auto& s : segs) {
      for (std::size_t c = 0; c < O::size; ++c) {
        O::at(value, c) += O::at(s.value, c);
        O::at(error, c) += O::at(s.error, c);
      }
    }
  };

  while (true) {
    V value{};
    V error{};
    totals(value, error);
    std::array<double, O::size> tol{};
    bool done = true;
    for (std::size_t c = 0; c < O::size; ++c) {
      tol[c] = std::max(opts.abs_tol, opts.rel_tol * std::fabs(O::at(value, c)));
      if (!(O::at(error, c) <= tol[c])) done = false;
    }
    if (done || segs.empty()) {
      out.value = value;
      out.error = error;
      out.converged = true;
      return out;
    }
    if (out.evaluations + 2 * kEvalsPerSegment > opts.max_evals) {
      out.value = value;
      out.error = error;
      out.converged = false;
      return out;
    }
    std::size_t worst = 0;
    double worst_score = -1.0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      double score = 0.0;
      for (std::size_t c = 0; c < O::size; ++c) {
        score = std::max(score, O::at(segs[i].error, c) / tol[c]);
      }
      if (score > worst_score) {
        worst_score = score;
        worst = i;
      }
    }
    const Seg parent = segs[worst];
    const double mid = 0.5 * (parent.lo + parent.hi);
    if (!(mid > parent.lo && mid < parent.hi)) {
      // Cannot subdivide further in floating point.
      out.value = value;
      out.error = error;
      out.converged = false;
      return out;
    }
    segs[worst] = detail::gk15<V>(f, parent.lo, mid);
    segs.push_back(detail::gk15<V>(f, mid, parent.hi));
    out.evaluations += 2 * kEvalsPerSegment;
  }
}

/// Single-interval convenience overload.
template <class V, class F>
Result<V> integrate(F&& f, double lo, double hi, const Options& opts = {}) {
  const Interval cell{lo, hi};
  return integrate<V>(std::forward<F>(f), std::span<const Interval>(&cell, 1), opts);
}

/// Splits the breakpoint sequence into consecutive cells clipped to [lo, hi].
std::vector<Interval> cells_between(std::span<const double> breakpoints, double lo, double hi);

}  // namespace rwm::quad
