#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Eigenvalues>

#include "numrange/holo_map.hpp"
#include "numrange/sampler.hpp"
#include "numrange/types.hpp"

namespace numrange {

constexpr std::uint64_t kDefaultSeed = 42;

enum class ExtremeMode { Sup, Inf };

/// One sampled extremum of Re(e^{i theta} <h(x) [- h(0)], x*>) on a sphere.
struct PairingExtremum {
  double value = 0.0;
  double r = 0.0;
  double theta = 0.0;
  CVec arg;
  long long samples = 0;
  int refine_iters = 0;
};

/// Ball supremum estimate from the dyadic radius ladder r = R (1 - 2^{-k}).
struct BallSupEstimate {
  double value = 0.0;
  bool infinite = false;
  std::vector<double> ladder;
  long long samples = 0;
};

/// Oracle snapshot of the numerical-range quantities at one (r, theta).
struct RangeStats {
  double r = 0.0;
  double theta = 0.0;
  double N_r = 0.0;       // sup Re <h(x), x*> on the sphere
  double M_r = 0.0;       // sup Re e^{i theta} <h(x) - h(0), x*>
  double m_r = 0.0;       // inf of the same
  double V_abs = 0.0;     // sup |<h(x), x*>| over the ball of radius r
  double W_r = 0.0;       // sup ||h(x)|| over the ball of radius r
  long long samples = 0;
  int refine_iters = 0;
};

/// Exact spectral bounds of Re e^{i theta} <h'(0) u, u*> over ||u|| = 1.
struct DerivBounds {
  double theta = 0.0;
  double L_theta = 0.0;
  double l_theta = 0.0;
};

struct DissipativeCheck {
  bool dissipative = false;
  double worst = 0.0;
  CVec witness;
};

inline PairingExtremum sup_re_pairing_field(
    const VectorField& h, double r, double theta, bool subtract_h0,
    ExtremeMode mode, std::uint64_t seed = kDefaultSeed, int phase1 = -1) {
  const int n = h.domain.dim;
  if (r <= 0.0 || r >= h.domain.radius) {
    throw DomainError("sup_re_pairing: need 0 < r < R");
  }
  CVec h0 = CVec::Zero(n);
  if (subtract_h0) h0 = h.value(CVec::Zero(n));
  const Complex rot = std::polar(1.0, theta);
  const double sign = (mode == ExtremeMode::Sup) ? 1.0 : -1.0;
  auto objective = [&](const CVec& x) {
    return sign * (rot * pairing(h.value(x) - h0, x)).real();
  };
  SphereExtremum ext = sphere_extremum(n, r, objective, seed, phase1);
  PairingExtremum out;
  out.value = sign * ext.value;
  out.r = r;
  out.theta = theta;
  out.arg = ext.arg;
  out.samples = ext.samples;
  out.refine_iters = ext.refine_iters;
  return out;
}

inline PairingExtremum sup_re_pairing(const HoloMap& m, double r, double theta,
                                      bool subtract_h0, ExtremeMode mode,
                                      std::uint64_t seed = kDefaultSeed,
                                      int phase1 = -1) {
  VectorField f = as_field(m);
  return sup_re_pairing_field(f, r, theta, subtract_h0, mode, seed, phase1);
}

/// Ball sup of Re e^{i theta} <h(x), x*> over B_R.
///
/// The pairing tends to 0 at the origin, so the ball supremum is never
/// negative; the running max starts at 0 to capture suprema approached as
/// x -> 0 (h(x) = -x is the canonical case).  A map is reported infinite
/// when the rung values fail to stabilize: relative change above 1e-3 at the
/// last rung combined with sustained geometric growth across the tail, or an
/// outright blow-up past 1e8.  Polynomially bounded maps change by only
/// O(deg * 2^{-12}) per rung and keep tail growth near 1, so they always
/// land in the finite branch.
inline BallSupEstimate estimate_NR(const VectorField& h, double theta,
                                   std::uint64_t seed = kDefaultSeed,
                                   const std::vector<double>& extra_radii = {},
                                   int phase1 = -1) {
  const double R = h.domain.radius;
  BallSupEstimate out;
  out.value = 0.0;
  for (int k = 1; k <= 12; ++k) {
    double r = R * (1.0 - std::pow(2.0, -k));
    PairingExtremum p =
        sup_re_pairing_field(h, r, theta, false, ExtremeMode::Sup, seed, phase1);
    out.ladder.push_back(p.value);
    out.samples += p.samples;
    out.value = std::max(out.value, p.value);
  }
  for (double r : extra_radii) {
    if (r <= 0.0 || r >= R) continue;
    PairingExtremum p =
        sup_re_pairing_field(h, r, theta, false, ExtremeMode::Sup, seed, phase1);
    out.samples += p.samples;
    out.value = std::max(out.value, p.value);
  }
  const double v12 = out.ladder[11], v11 = out.ladder[10], v10 = out.ladder[9];
  const double v8 = out.ladder[7];
  const double rel = std::abs(v12 - v11) / std::max(1.0, std::abs(v12));
  const bool growing_tail = v12 > v11 && v11 > v10 && v8 > 0.0 && v12 > 2.0 * v8;
  out.infinite = rel > 1e-3 && (v12 > 1e8 || growing_tail);
  return out;
}

inline BallSupEstimate estimate_NR(const HoloMap& m, double theta,
                                   std::uint64_t seed = kDefaultSeed,
                                   const std::vector<double>& extra_radii = {},
                                   int phase1 = -1) {
  VectorField f = as_field(m);
  return estimate_NR(f, theta, seed, extra_radii, phase1);
}

/// L(theta), l(theta): extreme values of Re e^{i theta} <A u, u*> on the unit
/// sphere for A = h'(0).  That quadratic form is the Hermitian part of
/// e^{i theta} A, so the exact answer is its eigenvalue range.
inline DerivBounds deriv_bounds_of(const CMat& A, double theta) {
  const Complex rot = std::polar(1.0, theta);
  CMat H = 0.5 * (rot * A + (rot * A).adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(H);
  DerivBounds out;
  out.theta = theta;
  out.l_theta = es.eigenvalues().minCoeff();
  out.L_theta = es.eigenvalues().maxCoeff();
  return out;
}

inline DerivBounds deriv_bounds(const HoloMap& m, double theta) {
  return deriv_bounds_of(derivative_at_zero(m), theta);
}

/// Full oracle snapshot at one radius.  V_abs and W_r are ball quantities,
/// estimated over the dyadic sub-ladder s = r (1 - 2^{-k}) plus the sphere
/// at r itself, with a quarter of the phase-1 budget per rung.
inline RangeStats range_stats(const HoloMap& m, double r, double theta,
                              std::uint64_t seed = kDefaultSeed) {
  VectorField h = as_field(m);
  const int n = m.dim();
  RangeStats st;
  st.r = r;
  st.theta = theta;

  PairingExtremum nr =
      sup_re_pairing_field(h, r, 0.0, false, ExtremeMode::Sup, seed);
  PairingExtremum mr =
      sup_re_pairing_field(h, r, theta, true, ExtremeMode::Sup, seed);
  PairingExtremum lo =
      sup_re_pairing_field(h, r, theta, true, ExtremeMode::Inf, seed);
  st.N_r = nr.value;
  st.M_r = mr.value;
  st.m_r = lo.value;
  st.samples = nr.samples + mr.samples + lo.samples;
  st.refine_iters = nr.refine_iters + mr.refine_iters + lo.refine_iters;

  auto abs_pairing = [&](const CVec& x) {
    return std::abs(pairing(h.value(x), x));
  };
  auto norm_h = [&](const CVec& x) { return h.value(x).norm(); };
  const int sub_budget = std::max(256, 4096 * n / 4);
  std::vector<double> rungs;
  for (int k = 1; k <= 8; ++k) rungs.push_back(r * (1.0 - std::pow(2.0, -k)));
  rungs.push_back(r * (1.0 - 1e-9));
  for (double s : rungs) {
    SphereExtremum va = sphere_extremum(n, s, abs_pairing, seed, sub_budget);
    SphereExtremum wb = sphere_extremum(n, s, norm_h, seed, sub_budget);
    st.V_abs = std::max(st.V_abs, va.value);
    st.W_r = std::max(st.W_r, wb.value);
    st.samples += va.samples + wb.samples;
    st.refine_iters += va.refine_iters + wb.refine_iters;
  }
  return st;
}

/// Is h (omega, theta)-dissipative: Re e^{i theta} <h(x), x*> <= omega on
/// some inner collar of the boundary sphere?  Checks the collar
/// R - eps < ||x|| < R on a ladder of radii approaching R and reports the
/// worst value with its witness point.
inline DissipativeCheck check_dissipative(const HoloMap& m, double omega,
                                          double theta, double eps,
                                          std::uint64_t seed = kDefaultSeed) {
  const double R = m.radius();
  if (eps <= 0.0 || eps >= R) throw DomainError("check_dissipative: bad eps");
  VectorField h = as_field(m);
  DissipativeCheck out;
  out.worst = -1e300;
  for (int j = 1; j <= 6; ++j) {
    double r = R - eps * std::pow(2.0, -j);
    PairingExtremum p =
        sup_re_pairing_field(h, r, theta, false, ExtremeMode::Sup, seed);
    if (p.value > out.worst) {
      out.worst = p.value;
      out.witness = p.arg;
    }
  }
  out.dissipative = out.worst <= omega + 1e-9;
  return out;
}

}  // namespace numrange
