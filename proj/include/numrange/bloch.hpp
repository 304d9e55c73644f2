#pragma once

// Bloch-radius calculus for normalized ball maps F(x) = x - h(x) with
// h(0) = 0, plus the starlikeness and spirallikeness radii with their
// differential-equation verification.
//
// The central objects: rho(r) is a lower bound for the radius of a ball
// centered at 0 covered by F over the ball of radius r; r_star is where
// rho crosses zero; rho_s(r) is the conservative variant pinned to a
// working radius s, with A(s), B(s) and the factor Q = K(theta, s) *
// delta controlling its shape; s_star is the zero of A. All closed forms
// are cross-checked against bisection on their defining equations, and
// bisection wins on disagreement.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include <numrange/holo_map.hpp>
#include <numrange/range_oracle.hpp>
#include <numrange/scalar_bounds.hpp>
#include <numrange/types.hpp>

namespace numrange {

/// Directional data for the Bloch calculus on the unit ball.
struct BlochInputs {
  double theta = 0.0;
  double N_theta = 0.0;  // ball sup of Re e^{i theta} <h(x), x*>
  double L = 0.0;        // largest Hermitian-part eigenvalue at theta = 0
  double L_theta = 0.0;
  double l_theta = 0.0;
  double delta = 0.0;    // N_theta - l_theta
};

namespace detail {

inline void validate_bloch(const BlochInputs& in) {
  if (!(in.L < 1.0)) {
    throw DomainError("bloch: the radius formulas need L < 1");
  }
  if (in.delta < -1e-9) {
    throw DomainError("bloch: delta must be nonnegative");
  }
}

// At theta = 0 a sharper centered estimate applies and the effective
// spread is N - L instead of N - l. Everything downstream runs on the
// adjusted copy.
inline BlochInputs effective_bloch(const BlochInputs& in) {
  BlochInputs eff = in;
  eff.delta = std::max(0.0, eff.delta);
  if (std::abs(in.theta) <= 1e-12) {
    eff.theta = 0.0;
    eff.delta = std::max(0.0, in.N_theta - in.L);
  }
  return eff;
}

inline double rho_raw(const BlochInputs& in, double r) {
  // (1 - L)(1 - r^2) - 2 delta r (1 - r cos theta), scaled by r/(1 - r^2).
  // At theta = 0 the (1 - r) factor cancels, which keeps r = 1 usable.
  const double one_m_L = 1.0 - in.L;
  if (std::abs(in.theta) <= 1e-12) {
    return (r / (1.0 + r)) * (one_m_L * (1.0 + r) - 2.0 * in.delta * r);
  }
  return (r / (1.0 - r * r)) *
         (one_m_L * (1.0 - r * r) -
          2.0 * in.delta * r * (1.0 - r * std::cos(in.theta)));
}

}  // namespace detail

/// rho(r): covered-radius lower bound at working radius r.
inline double rho(const BlochInputs& in, double r) {
  detail::validate_bloch(in);
  if (!(r > 0.0) || !(r < 1.0)) {
    throw DomainError("rho: r must lie in (0, 1)");
  }
  return detail::rho_raw(in, r);
}

/// Root result for the radius functions. `value` is the arbitered root
/// (bisection wins when the closed form strays), `closed_form` the
/// printed expression, `no_root` flags the sentinel value 1 returned
/// when the function stays positive on (0, 1).
struct RootResult {
  double value = 1.0;
  bool no_root = false;
  double closed_form = 1.0;
  double discrepancy = 0.0;
};

/// r_star: the zero of rho in (0, 1), with the degenerate-denominator
/// branch detected within 1e-12 and the theta = 0 case handled through
/// the centered variant.
inline RootResult r_star(const BlochInputs& inputs) {
  detail::validate_bloch(inputs);
  const BlochInputs in = detail::effective_bloch(inputs);
  RootResult out;
  if (in.delta <= 1e-14) {
    out.no_root = true;  // rho = r (1 - L) stays positive
    return out;
  }
  const double one_m_L = 1.0 - in.L;
  const double ct = std::cos(in.theta);
  const double den = 2.0 * in.delta * ct - one_m_L;
  if (std::abs(den) <= 1e-12) {
    out.closed_form = one_m_L / (2.0 * in.delta);
  } else {
    const double inner = in.delta * in.delta - den * one_m_L;
    out.closed_form = (in.delta - std::sqrt(std::max(0.0, inner))) / den;
  }

  const auto f = [&](double r) { return detail::rho_raw(in, r); };
  const double hi = 1.0 - 1e-12;
  if (!(f(hi) < 0.0)) {
    out.no_root = true;
    out.value = 1.0;
    out.discrepancy = std::abs(out.closed_form - 1.0);
    return out;
  }
  const double bis = detail::bisect_root(f, 1e-12, hi);
  out.discrepancy = std::abs(bis - out.closed_form);
  out.value = out.discrepancy <= 1e-10 ? out.closed_form : bis;
  return out;
}

/// rho_s(r) = (A(s) r^2 + B(s) r)/(s + r) with A = 1 - L - 2Q,
/// B = s (1 - L), Q = K(theta, s) delta.
inline double rho_s(const BlochInputs& inputs, double s, double r) {
  detail::validate_bloch(inputs);
  const BlochInputs in = detail::effective_bloch(inputs);
  if (!(s > 0.0) || !(s < 1.0) || !(r > 0.0) || !(r <= s)) {
    throw DomainError("rho_s: need 0 < r <= s < 1");
  }
  const double Q = km_factor(in.theta, s, 1.0) * in.delta;
  const double A = 1.0 - in.L - 2.0 * Q;
  const double B = s * (1.0 - in.L);
  return (A * r * r + B * r) / (s + r);
}

/// s_star: minimal positive zero of A(s), i.e. where Q(s) reaches
/// (1 - L)/2; there rho_s(r) degrades to the affine-distortion regime
/// and rho(s_star) = s_star (1 - L)/2.
inline RootResult s_star(const BlochInputs& inputs) {
  detail::validate_bloch(inputs);
  const BlochInputs in = detail::effective_bloch(inputs);
  RootResult out;
  const double one_m_L = 1.0 - in.L;
  if (in.delta <= 1e-14) {
    out.no_root = true;  // A = 1 - L > 0 throughout
    return out;
  }
  const double ct = std::cos(in.theta);
  const double a = 4.0 * in.delta * ct - one_m_L;
  if (std::abs(a) <= 1e-14) {
    out.closed_form = one_m_L / (4.0 * in.delta);
  } else {
    const double disc =
        4.0 * in.delta * in.delta - a * one_m_L;
    if (disc < 0.0) {
      out.no_root = true;
      return out;
    }
    out.closed_form = (2.0 * in.delta - std::sqrt(disc)) / a;
  }

  const auto A_of = [&](double s) {
    return 1.0 - in.L - 2.0 * km_factor(in.theta, s, 1.0) * in.delta;
  };
  const double hi = 1.0 - 1e-12;
  if (!(A_of(hi) < 0.0)) {
    out.no_root = true;
    return out;
  }
  const double bis = detail::bisect_root(A_of, 1e-12, hi);
  out.discrepancy = std::abs(bis - out.closed_form);
  out.value = out.discrepancy <= 1e-10 ? out.closed_form : bis;
  return out;
}

enum class BlochSubBranch { affine, increasing, interior };

/// Where rho_s attains its maximum over (0, s] and what that maximum is.
struct BlochCaseResult {
  double argmax = 0.0;
  double max_value = 0.0;
  BlochSubBranch branch = BlochSubBranch::increasing;
};

/// Case analysis of rho_s on (0, s]: below s_star the function is
/// increasing and the best pair sits at r = s; at s_star the distortion
/// r/rho_s(r) is affine; above s_star an interior maximizer appears once
/// Q clears (2/3)(1 - L), otherwise the endpoint still wins with the
/// guarantee rho(s) >= s (1 - L)/3.
inline BlochCaseResult bloch_case_analysis(const BlochInputs& inputs,
                                           double s) {
  detail::validate_bloch(inputs);
  const BlochInputs in = detail::effective_bloch(inputs);
  const RootResult rs = r_star(inputs);
  if (!(s > 0.0) || !(s < rs.value)) {
    throw DomainError("bloch_case_analysis: s must lie in (0, r_star)");
  }
  const RootResult ss = s_star(inputs);
  BlochCaseResult out;
  const double one_m_L = 1.0 - in.L;
  const double Q = km_factor(in.theta, s, 1.0) * in.delta;
  if (!ss.no_root && std::abs(s - ss.value) <= 1e-12) {
    out.branch = BlochSubBranch::affine;
    out.argmax = s;
    out.max_value = detail::rho_raw(in, s);
    return out;
  }
  if (ss.no_root || s < ss.value) {
    out.branch = BlochSubBranch::increasing;
    out.argmax = s;
    out.max_value = detail::rho_raw(in, s);
    return out;
  }
  out.branch = BlochSubBranch::interior;
  if (Q > (2.0 / 3.0) * one_m_L) {
    const double r0 =
        (std::sqrt(2.0 * Q / (2.0 * Q - one_m_L)) - 1.0) * s;
    out.argmax = r0;
    out.max_value = rho_s(inputs, s, r0);
  } else {
    out.argmax = s;
    out.max_value = detail::rho_raw(in, s);
  }
  return out;
}

/// Bloch pair for the centered theta = 0 data (N, L): the maximizer of
/// rho over (0, 1] and its value, by the closed forms.
struct BlochRadii {
  double r0 = 1.0;
  double rho0 = 0.0;
};

inline BlochRadii bloch_radii_theta0(double N, double L) {
  if (!(L < 1.0)) {
    throw DomainError("bloch_radii_theta0: needs L < 1");
  }
  if (!(N >= L)) {
    throw DomainError("bloch_radii_theta0: needs N >= L");
  }
  BlochInputs in;
  in.theta = 0.0;
  in.N_theta = N;
  in.L = L;
  in.delta = N - L;
  BlochRadii out;
  if (N >= (2.0 + L) / 3.0) {
    out.r0 = std::sqrt(2.0 * (L - N) / (1.0 + L - 2.0 * N)) - 1.0;
    out.rho0 = detail::rho_raw(detail::effective_bloch(in), out.r0);
  } else {
    out.r0 = 1.0;
    out.rho0 = 1.0 - N;
  }
  return out;
}

enum class BlochCase { delta_zero, special_19, generic };

/// Full report: both radii, the covered-radius curve, its maximizer, the
/// per-s case analysis and the distortion table at s_star.
struct BlochReport {
  BlochInputs inputs;
  BlochCase case_branch = BlochCase::generic;
  RootResult r_star;
  RootResult s_star;
  std::vector<std::pair<double, double>> rho_of;
  std::pair<double, double> maximizer{1.0, 0.0};
  struct PerS {
    double s = 0.0;
    double argmax = 0.0;
    double max_value = 0.0;
    BlochSubBranch branch = BlochSubBranch::increasing;
  };
  std::vector<PerS> per_s;
  std::vector<std::pair<double, double>> epsilon;
};

inline BlochReport bloch_report(const BlochInputs& inputs, int num_r = 64,
                                int num_s = 8) {
  detail::validate_bloch(inputs);
  const BlochInputs in = detail::effective_bloch(inputs);
  BlochReport rep;
  rep.inputs = inputs;
  const double one_m_L = 1.0 - in.L;
  if (in.delta <= 1e-14) {
    rep.case_branch = BlochCase::delta_zero;
  } else if (std::abs(2.0 * in.delta * std::cos(in.theta) - one_m_L) <=
             1e-12) {
    rep.case_branch = BlochCase::special_19;
  } else {
    rep.case_branch = BlochCase::generic;
  }
  rep.r_star = r_star(inputs);
  rep.s_star = s_star(inputs);

  const double top = std::min(rep.r_star.value, 1.0 - 1e-9);
  for (int g = 1; g <= num_r; ++g) {
    const double r = top * g / (num_r + 1);
    rep.rho_of.emplace_back(r, detail::rho_raw(in, r));
  }

  if (rep.case_branch == BlochCase::delta_zero) {
    rep.maximizer = {1.0, one_m_L};
  } else if (in.theta == 0.0) {
    const BlochRadii br = bloch_radii_theta0(in.N_theta, in.L);
    rep.maximizer = {br.r0, br.rho0};
  } else {
    // rho is concave here, so a ternary search pins the maximum.
    double lo = 1e-9;
    double hi = top;
    for (int it = 0; it < 200; ++it) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      if (detail::rho_raw(in, m1) < detail::rho_raw(in, m2)) {
        lo = m1;
      } else {
        hi = m2;
      }
    }
    const double r0 = 0.5 * (lo + hi);
    rep.maximizer = {r0, detail::rho_raw(in, r0)};
  }

  for (int j = 1; j <= num_s; ++j) {
    const double s = rep.r_star.value * j / (num_s + 1);
    BlochReport::PerS row;
    row.s = s;
    const BlochCaseResult cr = bloch_case_analysis(inputs, s);
    row.argmax = cr.argmax;
    row.max_value = cr.max_value;
    row.branch = cr.branch;
    rep.per_s.push_back(row);
  }

  if (!rep.s_star.no_root) {
    const double sst = rep.s_star.value;
    for (int g = 1; g <= 16; ++g) {
      const double r = sst * g / 16.0;
      rep.epsilon.emplace_back(r, r / rho_s(inputs, sst, r));
    }
  }
  return rep;
}

/// Oracle-backed inputs for a pinned map on the unit ball.
inline BlochInputs bloch_inputs_from_oracle(const HoloMap& m, double theta,
                                            std::uint64_t seed = kDefaultSeed) {
  if (m.domain().radius != 1.0) {
    throw DomainError("bloch_inputs_from_oracle: needs the unit ball");
  }
  if (eval(m, CVec::Zero(m.dim())).norm() > 1e-12) {
    throw DomainError(
        "bloch_inputs_from_oracle: map must vanish at the origin");
  }
  BlochInputs in;
  in.theta = theta;
  const BallSupEstimate ns = estimate_NR(m, theta, seed);
  if (ns.infinite) {
    throw InfiniteInput(
        "bloch_inputs_from_oracle: directional ball sup is infinite");
  }
  in.N_theta = ns.value;
  in.L = deriv_bounds(m, 0.0).L_theta;
  const DerivBounds db = deriv_bounds(m, theta);
  in.L_theta = db.L_theta;
  in.l_theta = db.l_theta;
  in.delta = std::max(0.0, in.N_theta - in.l_theta);
  return in;
}

/// Radius of starlikeness 1/(cos theta + |sin theta|) for |theta| < pi/2.
inline double starlike_radius(double theta) {
  if (!(std::abs(theta) < M_PI / 2.0)) {
    throw DomainError("starlike_radius: needs |theta| < pi/2");
  }
  return 1.0 / (std::cos(theta) + std::abs(std::sin(theta)));
}

/// Radius of spirallikeness (1 - |sin theta|)/cos theta, the positive
/// root of 2r(1 - r cos theta) = cos theta (1 - r^2).
inline double spiral_radius(double theta) {
  if (!(std::abs(theta) < M_PI / 2.0)) {
    throw DomainError("spiral_radius: needs |theta| < pi/2");
  }
  return (1.0 - std::abs(std::sin(theta))) / std::cos(theta);
}

/// Pointwise evaluator of the generator h(x) = mu f'(x)^{-1} f(x) for a
/// locally biholomorphic f with f(0) = 0. Construction verifies
/// h(0) = 0 and h'(0) = mu I.
struct Generator {
  int dim = 1;
  Complex mu{1.0, 0.0};
  std::function<CVec(const CVec&)> value;
  double origin_norm = 0.0;
  double deriv_gap = 0.0;
};

inline Generator extract_generator(const HoloMap& f, Complex mu) {
  const int n = f.dim();
  if (eval(f, CVec::Zero(n)).norm() > 1e-12) {
    throw DomainError("extract_generator: f must vanish at the origin");
  }
  {
    Eigen::PartialPivLU<CMat> lu0(derivative_at_zero(f));
    if (!(lu0.rcond() > 1e-12)) {
      throw DomainError(
          "extract_generator: derivative at the origin is not invertible");
    }
  }
  Generator g;
  g.dim = n;
  g.mu = mu;
  g.value = [f, mu](const CVec& x) -> CVec {
    Eigen::PartialPivLU<CMat> lu(jacobian(f, x));
    if (!(lu.rcond() > 1e-14)) {
      throw SingularPoint(
          "generator: derivative of f is singular at the probe point");
    }
    return CVec(mu * lu.solve(eval(f, x)));
  };

  g.origin_norm = g.value(CVec::Zero(n)).norm();
  // Circle-average derivative of the generator at the origin, one axis
  // at a time.
  const double rad = 0.1 * f.domain().radius;
  const int K = 64;
  CMat D = CMat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    CVec col = CVec::Zero(n);
    for (int k = 0; k < K; ++k) {
      const Complex zeta = std::polar(rad, 2.0 * M_PI * k / K);
      CVec x = CVec::Zero(n);
      x[j] = zeta;
      col += g.value(x) / zeta;
    }
    D.col(j) = col / static_cast<double>(K);
  }
  g.deriv_gap = (D - mu * CMat::Identity(n, n)).norm();
  if (g.origin_norm > 1e-10 || g.deriv_gap > 1e-8) {
    throw DomainError(
        "extract_generator: generator fails its normalization checks");
  }
  return g;
}

/// Verdict of the spirallikeness test on the ball of radius r.
struct SpiralVerdict {
  bool ok = false;
  double worst_margin = 0.0;
  double worst_radius = 0.0;
  int skipped = 0;
};

/// Checks inf Re <h(x), x*> >= -1e-6 over sphere ladders up to radius r,
/// where h is the extracted generator for the normalized mu. Probe
/// points where f' is singular are skipped and counted.
inline SpiralVerdict verify_spirallike_on_ball(const HoloMap& f, Complex mu,
                                               double r,
                                               std::uint64_t seed = kDefaultSeed) {
  const double R = f.domain().radius;
  if (!(r > 0.0) || !(r <= R)) {
    throw DomainError("verify_spirallike_on_ball: r must lie in (0, R]");
  }
  const Complex mun = mu / std::abs(mu);
  const Generator g = extract_generator(f, mun);
  const int n = g.dim;

  SpiralVerdict out;
  out.worst_margin = 1e300;

  std::mt19937_64 gen(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const auto objective = [&](const CVec& x) -> std::optional<double> {
    try {
      return pairing(g.value(x), x).real();
    } catch (const SingularPoint&) {
      ++out.skipped;
      return std::nullopt;
    } catch (const DomainError&) {
      ++out.skipped;
      return std::nullopt;
    }
  };

  for (int k = 1; k <= 12; ++k) {
    const double s = r * (1.0 - std::pow(2.0, -k));
    double best = 1e300;
    CVec best_x;
    // Axis sweeps cover the n = 1 sphere completely; random directions
    // fill in higher dimensions.
    for (int j = 0; j < n; ++j) {
      for (int t = 0; t < 256; ++t) {
        CVec x = CVec::Zero(n);
        x[j] = std::polar(s, 2.0 * M_PI * t / 256.0);
        const auto v = objective(x);
        if (v && *v < best) {
          best = *v;
          best_x = x;
        }
      }
    }
    for (int t = 0; t < 768; ++t) {
      CVec x(n);
      for (int j = 0; j < n; ++j) x[j] = Complex(gauss(gen), gauss(gen));
      x *= s / x.norm();
      const auto v = objective(x);
      if (v && *v < best) {
        best = *v;
        best_x = x;
      }
    }
    if (best >= 1e300) continue;
    double sigma = 0.2;
    for (int it = 0; it < 80; ++it) {
      CVec x = best_x;
      for (int j = 0; j < n; ++j) {
        x[j] += sigma * s * Complex(gauss(gen), gauss(gen));
      }
      x *= s / x.norm();
      const auto v = objective(x);
      if (v && *v < best) {
        best = *v;
        best_x = x;
      } else {
        sigma *= 0.85;
      }
    }
    if (best < out.worst_margin) {
      out.worst_margin = best;
      out.worst_radius = s;
    }
  }
  out.ok = out.worst_margin >= -1e-6;
  return out;
}

}  // namespace numrange
