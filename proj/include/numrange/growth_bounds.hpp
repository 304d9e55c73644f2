#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <numrange/range_oracle.hpp>
#include <numrange/scalar_bounds.hpp>

// Vector-level growth envelopes.  A handful of scalars measured once per
// map (the eigenvalue range of the symmetrized derivative at the origin,
// ball sups of the boundary pairing) turn into radius-by-radius upper and
// lower envelopes for Re <h(x), x*>, its centered and rotated variants,
// the numerical radius and the sup norm.  The envelope functions are pure
// formula evaluations; everything that samples lives in from_oracle,
// bound_F1's first term, detect_rigidity and build_profile.

namespace numrange {

// Measured scalars feeding the envelopes.  theta fixes the rotation used
// by every *_theta field.  N_R and N_R_theta are ball sups of
// Re e^{i theta} <h(x), x*>; M_R_theta and m_R_theta are the ball sup and
// inf of the centered pairing (h(0) subtracted), hence M_R_theta >= 0 and
// m_R_theta <= 0 always (the pairing vanishes at the origin).  Ladder
// estimates can sit a hair below the true sups, so L <= N_R/R^2 is only
// guaranteed up to that estimation error; nothing here clamps L.
struct BoundInputs {
  double R = 1.0;
  double theta = 0.0;
  double N_R = 0.0;
  bool N_R_finite = true;
  double N_R_theta = 0.0;
  bool N_R_theta_finite = true;
  double h0_norm = 0.0;
  CVec h0_vec;
  double L = 0.0;        // top of the symmetrized derivative range at theta = 0
  double l0 = 0.0;       // bottom of the same
  double L_theta = 0.0;  // and the pair at the chosen theta
  double l_theta = 0.0;
  double m_R_theta = 0.0;
  double M_R_theta = 0.0;
};

namespace detail {

// Ball extremes of the centered pairing Re e^{i theta} <h(x) - h(0), x*>
// over B_R.  The pairing is zero at the origin, and its sphere extremes
// divided by r^2 move monotonically toward their boundary values, so the
// ball figures come from a boundary-refining ladder lifted by (R/r)^2 and
// clamped against the origin value.  Maps that stay finite up to the
// boundary (polynomial bodies) get two near-boundary rungs on top of the
// dyadic ones.
inline std::pair<double, double> centered_ball_extremes(
    const VectorField& h, double theta, std::uint64_t seed,
    bool near_boundary, int phase1 = -1) {
  const double R = h.domain.radius;
  std::vector<double> radii;
  radii.reserve(14);
  for (int k = 1; k <= 12; ++k) {
    radii.push_back(R * (1.0 - std::pow(2.0, -k)));
  }
  if (near_boundary) {
    radii.push_back(R * (1.0 - 1e-9));
    radii.push_back(R * (1.0 - 1e-12));
  }
  double lo = 0.0;
  double hi = 0.0;
  for (double r : radii) {
    const double lift = (R * R) / (r * r);
    hi = std::max(hi, lift * sup_re_pairing_field(h, r, theta, true,
                                                  ExtremeMode::Sup, seed,
                                                  phase1)
                           .value);
    lo = std::min(lo, lift * sup_re_pairing_field(h, r, theta, true,
                                                  ExtremeMode::Inf, seed,
                                                  phase1)
                           .value);
  }
  return {lo, hi};
}

}  // namespace detail

// Measure every input the envelopes need.  Derivative data are exact
// (eigensolver); ball sups come from dyadic ladders.  centered = false
// skips the two centered-ball ladders, which only the two-sided envelope
// and the profile columns built on it consume.
inline BoundInputs from_oracle(const HoloMap& m, double theta,
                               std::uint64_t seed = kDefaultSeed,
                               bool centered = true, int phase1 = -1) {
  BoundInputs in;
  in.R = m.radius();
  in.theta = theta;
  in.h0_vec = eval(m, CVec::Zero(m.dim()));
  in.h0_norm = in.h0_vec.norm();
  const CMat A = derivative_at_zero(m);
  const DerivBounds d0 = deriv_bounds_of(A, 0.0);
  in.L = d0.L_theta;
  in.l0 = d0.l_theta;
  const DerivBounds dt = deriv_bounds_of(A, theta);
  in.L_theta = dt.L_theta;
  in.l_theta = dt.l_theta;
  const VectorField h = as_field(m);
  const BallSupEstimate n0 = estimate_NR(h, 0.0, seed, {}, phase1);
  in.N_R = n0.value;
  in.N_R_finite = !n0.infinite;
  if (theta == 0.0) {
    in.N_R_theta = in.N_R;
    in.N_R_theta_finite = in.N_R_finite;
  } else {
    const BallSupEstimate nt = estimate_NR(h, theta, seed, {}, phase1);
    in.N_R_theta = nt.value;
    in.N_R_theta_finite = !nt.infinite;
  }
  if (centered) {
    const auto [lo, hi] =
        detail::centered_ball_extremes(h, theta, seed, m.is_poly(), phase1);
    in.m_R_theta = lo;
    in.M_R_theta = hi;
  }
  return in;
}

// Sphere envelope for the uncentered pairing: for ||x|| = r,
//   Re <h(x), x*>  <=  F(r) = r ||h(0)|| (1 - r^2/R^2)
//                        + (r^2/(R+r)) [ (R - r) L + 2 r N_R / R^2 ],
// and F(r) -> N_R as r -> R.
inline double bound_F(const BoundInputs& in, double r) {
  const double R = in.R;
  if (r <= 0.0 || r >= R) throw DomainError("bound_F: need 0 < r < R");
  if (!in.N_R_finite) throw InfiniteInput("bound_F: N_R is not finite");
  return r * in.h0_norm * (1.0 - r * r / (R * R)) +
         (r * r / (R + r)) * ((R - r) * in.L + 2.0 * r * in.N_R / (R * R));
}

// Rotated refinement of bound_F.  First term: the sphere sup of
//   Re( <h(0), x*> - (r^2/R^2) conj <e^{i theta} h(0), x*> ),
// sampled over ||x|| = r and reconciled with its closed form
//   r ||h(0)|| |1 - (r^2/R^2) e^{i theta}|
// (a lattice sup can only sit below the true one, so the larger of the
// two is returned).  Second term: r^2 [ L + K (N_R(theta)/R^2 - l(theta)) ]
// with the rotated growth factor K = km_factor(theta, r, R).
inline double bound_F1(const HoloMap& m, const BoundInputs& in, double r,
                       std::uint64_t seed = kDefaultSeed, int phase1 = -1) {
  const double R = in.R;
  const double K = km_factor(in.theta, r, R);  // also enforces 0 < r < R
  if (!in.N_R_theta_finite) {
    throw InfiniteInput("bound_F1: N_R(theta) is not finite");
  }
  double first = 0.0;
  if (in.h0_norm > 1e-15) {
    const Complex rot = std::polar(1.0, in.theta);
    const double w = r * r / (R * R);
    const CVec& h0 = in.h0_vec;
    const SphereExtremum s = sphere_extremum(
        m.dim(), r,
        [&](const CVec& x) {
          const Complex p = pairing(h0, x);
          return p.real() - w * (rot * p).real();
        },
        seed, phase1);
    const double closed = r * in.h0_norm * std::abs(1.0 - w * rot);
    first = std::max(s.value, closed);
  }
  return first + r * r * (in.L + K * (in.N_R_theta / (R * R) - in.l_theta));
}

// Same second term under the triangle-inequality majorant of the first,
// r ||h(0)|| (1 + r^2/R^2); needs no sampling.
inline double bound_F1_loose(const BoundInputs& in, double r) {
  const double R = in.R;
  const double K = km_factor(in.theta, r, R);
  if (!in.N_R_theta_finite) {
    throw InfiniteInput("bound_F1_loose: N_R(theta) is not finite");
  }
  return r * in.h0_norm * (1.0 + r * r / (R * R)) +
         r * r * (in.L + K * (in.N_R_theta / (R * R) - in.l_theta));
}

struct TwoSidedBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// Two-sided envelope for the centered pairing: for ||x|| = r,
//   lower <= Re <h(x) - h(0), x*> <= upper, with
//   lower = r^2 ( l(0) + K (m_R(theta)/R^2 - L(theta)) ),
//   upper = r^2 ( K (M_R(theta)/R^2 - l(theta)) + L(0) ).
inline TwoSidedBounds two_sided_growth_bounds(const BoundInputs& in,
                                              double r) {
  const double R = in.R;
  const double K = km_factor(in.theta, r, R);
  TwoSidedBounds out;
  out.lower = r * r * (in.l0 + K * (in.m_R_theta / (R * R) - in.L_theta));
  out.upper = r * r * (K * (in.M_R_theta / (R * R) - in.l_theta) + in.L);
  return out;
}

// Pointwise envelope through the derivative: for ||x|| = r and h(0) = 0,
//   Re <h(x), x*> <= (1 - K0) Re <h'(0) x, x*> + (r^2/R^2) K0 N_R,
// where K0 = km_factor(0, r, R) = 2r/(R + r) < 1.  The caller measures
// the derivative pairing Re <h'(0) x, x*> at its own probe point.
inline double linearization_probe_bound(const BoundInputs& in,
                                        double re_pairing_h10x, double r) {
  if (in.h0_norm > 1e-12) {
    throw DomainError("linearization_probe_bound: needs h(0) = 0");
  }
  if (!in.N_R_finite) {
    throw InfiniteInput("linearization_probe_bound: N_R is not finite");
  }
  const double R = in.R;
  const double K0 = km_factor(0.0, r, R);
  return (1.0 - K0) * re_pairing_h10x + (r * r / (R * R)) * K0 * in.N_R;
}

struct CorollaryBounds {
  double Vr_bound = 0.0;  // sup of Re e^{i theta} <h(x), x*> over the ball r
  double Wr_bound = 0.0;  // sup of ||h(x)|| over the closed ball r
};

// Directional numerical-range bound.  When h(0) = 0, the rotated map
// e^{i theta} h satisfies the h(0)-free growth envelope with its own
// derivative top L(theta) and ball sup N_R(theta), so for every s <= r
//   sup_{||x|| = s} Re e^{i theta} <h(x), x*>
//     <=  (s^2/(R+s)) [ (R - s) L(theta) + 2 s N_R(theta) / R^2 ].
// The ball sup over ||x|| <= r is then the max of that envelope over
// s in (0, r] (it is not monotone when L(theta) < 0), never below the
// origin value 0; a dense s-scan evaluates it.  One rotation alone says
// nothing about the modulus sup |V_r|: a map can pair imaginarily
// (h(x) = ix has zero real pairing at theta = 0 yet |V_r| = r^2), so a
// modulus bound needs this quantity swept over theta.  Wr_bound controls
// the norm through the full-ball modulus V_R_abs, measured by the caller.
inline CorollaryBounds corollary_bounds(const BoundInputs& in, double V_R_abs,
                                        double r) {
  const double R = in.R;
  if (in.h0_norm > 1e-12) {
    throw DomainError("corollary_bounds: needs h(0) = 0");
  }
  if (r <= 0.0 || r >= R) {
    throw DomainError("corollary_bounds: need 0 < r < R");
  }
  if (!in.N_R_theta_finite) {
    throw InfiniteInput("corollary_bounds: N_R(theta) is not finite");
  }
  CorollaryBounds out;
  double best = 0.0;
  for (int j = 1; j <= 64; ++j) {
    const double s = r * static_cast<double>(j) / 64.0;
    const double env = (s * s / (R + s)) *
                       ((R - s) * in.L_theta + 2.0 * s * in.N_R_theta / (R * R));
    best = std::max(best, env);
  }
  out.Vr_bound = best;
  out.Wr_bound = 2.0 * R * R / ((R - r) * (R - r)) * V_R_abs;
  return out;
}

struct RigidityVerdict {
  bool affine_rigid = false;
  bool sup_side = false;  // M_R(theta) meets R^2 l(theta)
  bool inf_side = false;  // m_R(theta) meets R^2 L(theta)
  double M_R_theta = 0.0;
  double m_R_theta = 0.0;
  double L_theta = 0.0;
  double l_theta = 0.0;
  double gap_sup = 0.0;
  double gap_inf = 0.0;
  double nonlinear_residual = 0.0;
  bool coefficients_affine = false;
};

// Equality detection for the centered-envelope collapse.  Either equality
// (a ball extreme meeting R^2 times the *opposite* derivative extreme)
// squeezes the whole chain m_R = R^2 l = R^2 L = M_R and forces the map
// to be affine.  The equalities can only hold when the symmetrized
// derivative at theta is a multiple of the identity, so an affine map
// with a spread derivative range is not in the detected class; the
// verdict carries the measured gaps plus a direct affinity probe of the
// map so callers can tell "not detected" apart from "not affine".
inline RigidityVerdict detect_rigidity(const HoloMap& m, double theta,
                                       double tol = 1e-9,
                                       std::uint64_t seed = kDefaultSeed) {
  RigidityVerdict v;
  const double R = m.radius();
  const DerivBounds d = deriv_bounds(m, theta);
  v.L_theta = d.L_theta;
  v.l_theta = d.l_theta;
  const VectorField h = as_field(m);
  const auto [lo, hi] =
      detail::centered_ball_extremes(h, theta, seed, m.is_poly());
  v.M_R_theta = hi;
  v.m_R_theta = lo;
  v.gap_sup = std::abs(hi - R * R * d.l_theta);
  v.gap_inf = std::abs(lo - R * R * d.L_theta);
  v.sup_side = v.gap_sup <= tol;
  v.inf_side = v.gap_inf <= tol;
  v.affine_rigid = v.sup_side || v.inf_side;

  // Affinity probe.  Polynomial bodies expose their coefficients; other
  // bodies are probed pointwise against h(0) + h'(0) x.
  if (m.is_poly()) {
    double worst = 0.0;
    for (const auto& comp : m.poly().components) {
      for (const auto& mono : comp) {
        int deg = 0;
        for (int p : mono.powers) deg += p;
        if (deg >= 2) worst = std::max(worst, std::abs(mono.coef));
      }
    }
    v.nonlinear_residual = worst;
  } else {
    const CVec h0 = eval(m, CVec::Zero(m.dim()));
    const CMat A = derivative_at_zero(m);
    double worst = 0.0;
    for (int j = 0; j < m.dim(); ++j) {
      for (double s : {0.5, -0.5, 0.25}) {
        CVec x = CVec::Zero(m.dim());
        x(j) = s * R;
        worst = std::max(worst, (eval(m, x) - h0 - A * x).norm());
        x(j) = Complex(0.0, s * R);
        worst = std::max(worst, (eval(m, x) - h0 - A * x).norm());
      }
    }
    v.nonlinear_residual = worst;
  }
  v.coefficients_affine = v.nonlinear_residual <= tol;
  return v;
}

struct ProfileRow {
  double r = 0.0;
  std::optional<double> F;
  std::optional<double> F1;
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> probe;  // linearization envelope at the top of the
                                // derivative range, Re <h'(0)x, x*> = r^2 L
  std::optional<double> Vr_bound;
  std::optional<double> Wr_bound;
};

struct BoundProfile {
  double theta = 0.0;
  double V_R_abs = 0.0;  // measured only when the origin is fixed
  std::vector<ProfileRow> grid;
};

// Evaluate every envelope on a radius grid.  Columns that require a
// finite ball sup or a fixed origin are left empty when the inputs do not
// qualify, rather than carrying +inf.
inline BoundProfile build_profile(const HoloMap& m, const BoundInputs& in,
                                  const std::vector<double>& radii,
                                  std::uint64_t seed = kDefaultSeed) {
  BoundProfile prof;
  prof.theta = in.theta;
  const double R = in.R;
  const bool pinned = in.h0_norm <= 1e-12;
  if (pinned) {
    const VectorField h = as_field(m);
    double vmax = 0.0;
    std::vector<double> ladder;
    for (int k = 1; k <= 10; ++k) {
      ladder.push_back(R * (1.0 - std::pow(2.0, -k)));
    }
    if (m.is_poly()) ladder.push_back(R * (1.0 - 1e-9));
    for (double s : ladder) {
      const SphereExtremum e = sphere_extremum(
          m.dim(), s,
          [&](const CVec& x) { return std::abs(pairing(h.value(x), x)); },
          seed);
      vmax = std::max(vmax, e.value);
    }
    prof.V_R_abs = vmax;
  }
  prof.grid.reserve(radii.size());
  for (double r : radii) {
    ProfileRow row;
    row.r = r;
    if (in.N_R_finite) row.F = bound_F(in, r);
    if (in.N_R_theta_finite) row.F1 = bound_F1(m, in, r, seed);
    const TwoSidedBounds ts = two_sided_growth_bounds(in, r);
    row.lower = ts.lower;
    row.upper = ts.upper;
    if (pinned && in.N_R_finite) {
      row.probe = linearization_probe_bound(in, r * r * in.L, r);
    }
    if (pinned && in.N_R_theta_finite) {
      const CorollaryBounds cb = corollary_bounds(in, prof.V_R_abs, r);
      row.Vr_bound = cb.Vr_bound;
      row.Wr_bound = cb.Wr_bound;
    }
    prof.grid.push_back(row);
  }
  return prof;
}

}  // namespace numrange
