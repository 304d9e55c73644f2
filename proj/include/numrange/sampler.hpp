#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "numrange/types.hpp"

namespace numrange {

/// Result of maximizing a continuous objective over a sphere ||x|| = r.
struct SphereExtremum {
  double value = 0.0;
  CVec arg;
  long long samples = 0;
  int refine_iters = 0;
};

namespace detail {

// Unique positive root of x^{d+1} = x + 1; its inverse powers make a good
// rank-1 lattice direction in d dimensions.
inline double harmonious_root(int d) {
  double x = 1.5;
  for (int i = 0; i < 80; ++i) x = std::pow(1.0 + x, 1.0 / (d + 1));
  return x;
}

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Polar-like chart for the real sphere S^{2n-1}: angles a_0..a_{2n-2}, the
// first 2n-2 in [0, pi], the last in [0, 2pi).  Consecutive real pairs form
// the complex coordinates.
inline CVec chart_point(int n, double r, const double* ang) {
  const int m = 2 * n;
  CVec x(n);
  double sines = 1.0;
  double y_prev = 0.0;
  // y_k = (prod_{j<k} sin a_j) * cos a_k, last coordinate all sines.
  for (int k = 0; k < m; ++k) {
    double y;
    if (k + 1 < m) {
      y = sines * std::cos(ang[k]);
      sines *= std::sin(ang[k]);
    } else {
      y = sines;
    }
    if (k % 2 == 0) {
      y_prev = y;
    } else {
      x[k / 2] = Complex(r * y_prev, r * y);
    }
  }
  return x;
}

template <typename F>
double golden_max_1d(F&& f, double lo, double hi, int steps, double* arg,
                     int* used) {
  const double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < steps; ++i) {
    ++*used;
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  if (f1 >= f2) {
    *arg = x1;
    return f1;
  }
  *arg = x2;
  return f2;
}

}  // namespace detail

/// Maximize `objective` over the sphere ||x|| = r in C^n.
///
/// Phase 1 walks a rank-1 lattice (a low-discrepancy sequence, so doubling
/// the budget extends the same point set) over the angle chart; phase 2
/// runs cyclic golden-section refinement from the best starts, at most 200
/// shrink steps per start, stopping once a sweep gains less than 1e-10.
inline SphereExtremum sphere_extremum(
    int n, double r, const std::function<double(const CVec&)>& objective,
    std::uint64_t seed, int phase1 = -1) {
  const int d = 2 * n - 1;
  if (phase1 < 0) phase1 = 4096 * n;
  SphereExtremum out;

  std::vector<double> alpha(d), offset(d), range(d);
  const double phi = detail::harmonious_root(d);
  for (int j = 0; j < d; ++j) {
    alpha[j] = std::fmod(std::pow(1.0 / phi, j + 1), 1.0);
    offset[j] =
        (detail::splitmix64(seed ^ (0x517cc1b727220a95ull * (j + 1))) >> 11) *
        0x1.0p-53;
    range[j] = (j + 1 < d) ? M_PI : 2.0 * M_PI;
  }

  auto eval_angles = [&](const std::vector<double>& ang) {
    return objective(detail::chart_point(n, r, ang.data()));
  };

  const int keep = std::min(12, phase1);
  std::vector<std::pair<double, std::vector<double>>> top;
  std::vector<double> ang(d);
  for (int k = 0; k < phase1; ++k) {
    for (int j = 0; j < d; ++j) {
      double u = offset[j] + k * alpha[j];
      ang[j] = (u - std::floor(u)) * range[j];
    }
    double v = eval_angles(ang);
    ++out.samples;
    if (static_cast<int>(top.size()) < keep) {
      top.emplace_back(v, ang);
      std::sort(top.begin(), top.end(),
                [](const auto& a, const auto& b) { return a.first > b.first; });
    } else if (v > top.back().first) {
      top.back() = {v, ang};
      std::sort(top.begin(), top.end(),
                [](const auto& a, const auto& b) { return a.first > b.first; });
    }
  }

  // Chart spacing estimate: the lattice resolves features down to roughly
  // (cell volume)^{1/d}; brackets twice that wide keep the maximizer inside.
  double cell = 1.0;
  for (int j = 0; j < d; ++j) cell *= range[j];
  const double spacing = std::pow(cell / std::max(1, phase1), 1.0 / d);

  double best = top.empty() ? -1e300 : top.front().first;
  std::vector<double> best_ang = top.empty() ? ang : top.front().second;

  const int budget = 200;
  const int steps = std::max(8, budget / (4 * d));
  for (auto& [v0, a0] : top) {
    std::vector<double> cur = a0;
    double cur_val = v0;
    int used = 0;
    double width = 2.0 * spacing;
    while (used < budget) {
      double before = cur_val;
      for (int j = 0; j < d && used < budget; ++j) {
        auto line = [&](double t) {
          std::vector<double> probe = cur;
          probe[j] = t;
          ++out.samples;
          return eval_angles(probe);
        };
        double arg = cur[j];
        double v = detail::golden_max_1d(line, cur[j] - width, cur[j] + width,
                                         std::min(steps, budget - used), &arg,
                                         &used);
        if (v > cur_val) {
          cur_val = v;
          cur[j] = arg;
        }
      }
      width *= 0.35;
      if (cur_val - before < 1e-10 * std::max(1.0, std::abs(cur_val))) break;
    }
    out.refine_iters += used;
    if (cur_val > best) {
      best = cur_val;
      best_ang = cur;
    }
  }

  out.value = best;
  out.arg = detail::chart_point(n, r, best_ang.data());
  return out;
}

}  // namespace numrange
