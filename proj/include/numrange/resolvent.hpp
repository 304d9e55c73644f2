#pragma once

// Nonlinear resolvent machinery on the ball: the radial envelope omega(r)
// and its normalized profile mu(r), semi-completeness intervals from the
// root calculus of mu, a Newton solver for lambda*x - h(x) = z with a
// damped fixed-point fallback, the Phi_lambda null-point iteration, the
// admissible lambda-domain (disc + sector), and the spectrum test via the
// derivative at the origin.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <numrange/growth_bounds.hpp>
#include <numrange/holo_map.hpp>
#include <numrange/range_oracle.hpp>
#include <numrange/types.hpp>

namespace numrange {

/// omega(r): radial growth envelope divided by r. Negative values certify
/// flow invariance of the ball of radius r.
inline double omega_of_r(const BoundInputs& in, double r) {
  if (!(r > 0.0) || !(r < in.R)) {
    throw DomainError("omega_of_r: r must lie in (0, R)");
  }
  if (!in.N_R_finite) {
    throw InfiniteInput("omega_of_r: ball sup of the pairing is infinite");
  }
  const double R = in.R;
  return in.h0_norm * (1.0 - r * r / (R * R)) +
         (r / (R + r)) * ((R - r) * in.L + 2.0 * r * in.N_R / (R * R));
}

/// mu(r) = omega(r)/r, extended to r = R where it equals N_R/R^2.
inline double mu_of_r(const BoundInputs& in, double r) {
  if (!(r > 0.0) || !(r <= in.R)) {
    throw DomainError("mu_of_r: r must lie in (0, R]");
  }
  if (!in.N_R_finite) {
    throw InfiniteInput("mu_of_r: ball sup of the pairing is infinite");
  }
  const double R = in.R;
  const double b = in.N_R / (R * R);
  double v = ((R - r) / (R + r)) * in.L + (2.0 * r / (R + r)) * b;
  if (in.h0_norm > 0.0) {
    v += (in.h0_norm / r) * (1.0 - r * r / (R * R));
  }
  return v;
}

enum class MuBranch {
  c_zero_constant,
  c_zero_increasing,
  no_interior_min,
  interior_min,
};

/// Shape summary of mu(r) on (0, R]: where its interior minimum sits and
/// where it crosses zero. `roots` is the arbitered value (bisection on the
/// defining equation); `trig_roots` is the closed cubic form, kept so the
/// two can be compared, with the largest disagreement in
/// `trig_discrepancy`.
struct MuProfile {
  double R = 1.0;
  double L = 0.0;
  double b = 0.0;
  double c = 0.0;
  std::optional<double> beta;
  std::optional<double> r_star;
  std::optional<std::pair<double, double>> roots;
  std::optional<std::pair<double, double>> trig_roots;
  double trig_discrepancy = 0.0;
  MuBranch branch = MuBranch::c_zero_constant;
};

namespace detail {

// Bisection for a root of f on [lo, hi], assuming f(lo) and f(hi) have
// opposite signs (or either endpoint is already a root).
template <typename F>
double bisect_root(F&& f, double lo, double hi) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  for (int it = 0; it < 120; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

inline MuProfile mu_profile(const BoundInputs& in) {
  if (!in.N_R_finite) {
    throw InfiniteInput("mu_profile: ball sup of the pairing is infinite");
  }
  MuProfile out;
  out.R = in.R;
  out.L = in.L;
  out.b = in.N_R / (in.R * in.R);
  out.c = in.h0_norm;
  const double R = out.R;
  const double L = out.L;
  const double b = out.b;
  const double c = out.c;

  if (c <= 1e-15) {
    out.branch = std::abs(b - L) <= 1e-15 ? MuBranch::c_zero_constant
                                          : MuBranch::c_zero_increasing;
    return out;
  }

  out.beta = (std::sqrt(c * c + 2.0 * R * (b - L) * c) - c) / c;
  if (!(*out.beta > 2.0)) {
    out.branch = MuBranch::no_interior_min;
    return out;
  }
  out.branch = MuBranch::interior_min;
  const double beta = *out.beta;
  out.r_star = R * (beta - std::sqrt(beta * beta - 4.0)) / 2.0;
  const double rs = *out.r_star;
  if (!(mu_of_r(in, rs) < 0.0)) return out;

  const auto mu = [&](double r) { return mu_of_r(in, r); };

  // mu -> +inf as r -> 0 (the c/r term), so a sign change brackets the
  // lower root; at the other end mu(R) = b >= 0 unless b vanishes, in
  // which case R itself is the root.
  double lo = R * 1e-12;
  while (mu(lo) <= 0.0 && lo < rs) lo *= 4.0;
  const double r1 = detail::bisect_root(mu, lo, rs);
  const double r2 = mu(R) <= 1e-15 ? R : detail::bisect_root(mu, rs, R);
  out.roots = {r1, r2};

  // Closed-form roots of the cubic r^3 + m r^2 + p r + q = 0 obtained by
  // clearing denominators in mu(r) = 0.
  const double m = R * (R * L - 2.0 * R * b + c) / c;
  const double Q = (c * m * m + 3.0 * L * R * R * R + 3.0 * c * R * R) /
                   (9.0 * c);
  const double A = (2.0 * c * m * m * m +
                    9.0 * m * (L * R * R * R + c * R * R) -
                    27.0 * c * R * R * R) /
                   (54.0 * c);
  if (Q > 0.0) {
    const double arg = std::clamp(A / std::sqrt(Q * Q * Q), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    const double t1 = -2.0 * std::sqrt(Q) * std::cos(phi) - m / 3.0;
    const double t2 =
        -2.0 * std::sqrt(Q) * std::cos(phi - 2.0 * M_PI / 3.0) - m / 3.0;
    out.trig_roots = {t1, t2};
    out.trig_discrepancy =
        std::max(std::abs(t1 - r1), std::abs(t2 - r2));
  }
  return out;
}

/// Open interval of radii on which the reversed field is certified
/// semi-complete, or nothing when the sufficient conditions fail.
inline std::optional<std::pair<double, double>> semi_complete_interval(
    const BoundInputs& in) {
  if (!in.N_R_finite) {
    throw InfiniteInput(
        "semi_complete_interval: ball sup of the pairing is infinite");
  }
  const double R = in.R;
  const double L = in.L;
  const double c = in.h0_norm;
  const double b = in.N_R / (R * R);
  if (c <= 1e-15) {
    if (L < std::min(0.0, b)) {
      return std::make_pair(0.0,
                            -R * R * R * L / (2.0 * in.N_R - L * R * R));
    }
    return std::nullopt;
  }
  if (!(R * (b - L) > 4.0 * c)) return std::nullopt;
  const MuProfile prof = mu_profile(in);
  if (!prof.roots) return std::nullopt;
  return prof.roots;
}

/// Smaller positive root of c(1+r)^2 + Lr = 0 on the unit ball, defined
/// when L + 4c < 0. This is the radius that confines the null point.
inline std::optional<double> nullp_radius(double h0_norm, double L) {
  if (!(L + 4.0 * h0_norm < 0.0)) return std::nullopt;
  if (h0_norm <= 1e-300) return 0.0;
  const double c = h0_norm;
  return (-(2.0 * c + L) - std::sqrt((L + 4.0 * c) * L)) / (2.0 * c);
}

enum class SolveMethod { fixed_point, newton };

/// Record of one resolvent solve lambda*x - h(x) = z.
struct SolveTrace {
  Complex lambda{0.0, 0.0};
  CVec z;
  CVec solution;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  SolveMethod method = SolveMethod::newton;
  bool certified = false;
};

/// Newton iteration for lambda*x - h(x) = z from x0 = z/lambda, with a
/// damped fixed-point fallback when the Jacobian solve is untrustworthy.
/// The sufficient condition ||z|| + omega(r_cap) < r_cap * Re(lambda) is
/// recorded as `certified`; the solve is attempted either way. Passing
/// precomputed envelope inputs skips the oracle measurement.
inline SolveTrace solve_resolvent(
    const HoloMap& m, Complex lambda, const CVec& z, double r_cap,
    const std::optional<BoundInputs>& inputs = std::nullopt,
    std::uint64_t seed = kDefaultSeed) {
  const int n = m.dim();
  if (z.size() != n) {
    throw DimensionMismatch("solve_resolvent: z has dimension " +
                            std::to_string(z.size()) + ", map expects " +
                            std::to_string(n));
  }
  const double R = m.domain().radius;
  if (!(r_cap > 0.0) || !(r_cap < R)) {
    throw DomainError("solve_resolvent: r_cap must lie in (0, R)");
  }

  SolveTrace tr;
  tr.lambda = lambda;
  tr.z = z;

  const BoundInputs in =
      inputs ? *inputs : from_oracle(m, 0.0, seed, false);
  tr.certified = in.N_R_finite &&
                 z.norm() + omega_of_r(in, r_cap) < r_cap * lambda.real();

  const double tol = 1e-10 * (1.0 + z.norm());
  const CMat I = CMat::Identity(n, n);

  CVec x;
  if (std::abs(lambda) > 1e-12) {
    x = z / lambda;
    if (x.norm() > 0.9 * R) x *= 0.9 * R / x.norm();
  } else {
    x = CVec::Zero(n);
  }

  const auto equation_residual =
      [&](const CVec& p) -> std::optional<CVec> {
    try {
      return CVec(lambda * p - eval(m, p) - z);
    } catch (const SingularPoint&) {
      return std::nullopt;
    }
  };

  std::optional<CVec> fx = equation_residual(x);
  if (!fx) {
    x = CVec::Zero(n);
    fx = equation_residual(x);
  }
  if (!fx) {
    throw SingularPoint("solve_resolvent: map is singular at the origin");
  }
  double res = fx->norm();

  // Iterate down to the machine floor; the convergence flag is still
  // judged against the stated tolerance. The extra polish keeps outer
  // fixed-point loops from stalling on solver noise.
  const double floor = 1e-15 * (1.0 + z.norm());
  int k = 0;
  for (; k < 500 && res > floor; ++k) {
    bool advanced = false;

    CMat J;
    bool have_jacobian = true;
    try {
      J = jacobian(m, x);
    } catch (const SingularPoint&) {
      have_jacobian = false;
    } catch (const DomainError&) {
      have_jacobian = false;
    }
    if (have_jacobian) {
      Eigen::PartialPivLU<CMat> lu(CMat(lambda * I - J));
      const double rc = lu.rcond();
      if (std::isfinite(rc) && rc > 1e-12) {
        const CVec d = lu.solve(-*fx);
        double step = 1.0;
        for (int bt = 0; bt < 40 && !advanced; ++bt, step *= 0.5) {
          const CVec cand = x + step * d;
          if (!m.is_poly() && cand.norm() >= 0.999 * R) continue;
          const auto fc = equation_residual(cand);
          if (fc && fc->norm() < res) {
            x = cand;
            fx = fc;
            res = fc->norm();
            tr.method = SolveMethod::newton;
            advanced = true;
          }
        }
      }
    }

    if (!advanced) {
      if (std::abs(lambda) <= 1e-12) {
        throw SingularPoint(
            "solve_resolvent: singular Jacobian and lambda is zero");
      }
      std::optional<CVec> target;
      try {
        target = CVec((z + eval(m, x)) / lambda);
      } catch (const SingularPoint&) {
        target = std::nullopt;
      }
      if (target) {
        double step = 1.0;
        for (int bt = 0; bt < 40 && !advanced; ++bt, step *= 0.5) {
          CVec cand = x + step * (*target - x);
          if (!m.is_poly() && cand.norm() >= 0.999 * R) {
            cand *= 0.998 * R / cand.norm();
          }
          const auto fc = equation_residual(cand);
          if (fc && fc->norm() < res) {
            x = cand;
            fx = fc;
            res = fc->norm();
            tr.method = SolveMethod::fixed_point;
            advanced = true;
          }
        }
      }
    }

    if (!advanced) break;
  }

  tr.solution = x;
  tr.iterations = k;
  tr.residual = res;
  tr.converged = res <= tol && x.norm() <= r_cap + 1e-12;
  return tr;
}

/// Trace of the Phi_lambda = (lambda*I - h)^{-1} (lambda*I) iteration
/// towards the null point of h.
struct PhiTrace {
  double lambda = 1.0;
  CVec limit;
  int outer_iterations = 0;
  bool converged = false;
  double step_norm = 0.0;
  double null_residual = 0.0;
  std::optional<double> radius_bound;
  bool within_radius = false;
  bool lambda_independent = false;
  double lambda_gap = 0.0;
};

/// Iterates y <- Phi_lambda(y) to the null point of h. Requires the
/// strict-dissipativity condition L + 4||h(0)|| < 0 unless the caller
/// overrides; the limit is recomputed at 2*lambda to witness that it does
/// not depend on lambda.
inline PhiTrace iterate_phi(
    const HoloMap& m, double lambda, const CVec& y0, double r_cap,
    const std::optional<BoundInputs>& inputs = std::nullopt,
    bool override_precondition = false, std::uint64_t seed = kDefaultSeed) {
  if (!(lambda > 0.0)) {
    throw DomainError("iterate_phi: lambda must be positive");
  }
  const BoundInputs in =
      inputs ? *inputs : from_oracle(m, 0.0, seed, false);
  const bool strict = in.L + 4.0 * in.h0_norm < 0.0;
  if (!strict && !override_precondition) {
    throw DomainError(
        "iterate_phi: needs L + 4||h(0)|| < 0; pass the override to force");
  }

  const auto run = [&](double lam, int& iters, bool& conv,
                       double& last_step) -> CVec {
    CVec y = y0;
    conv = false;
    iters = 0;
    for (int k = 0; k < 10000; ++k) {
      const SolveTrace st =
          solve_resolvent(m, Complex(lam, 0.0), CVec(lam * y), r_cap, in);
      last_step = (st.solution - y).norm();
      y = st.solution;
      iters = k + 1;
      if (st.converged && last_step <= 1e-12) {
        conv = true;
        break;
      }
    }
    return y;
  };

  PhiTrace out;
  out.lambda = lambda;
  out.limit = run(lambda, out.outer_iterations, out.converged, out.step_norm);
  if (!out.converged) {
    throw NoConvergence("iterate_phi: no limit after 10000 outer iterations");
  }
  out.null_residual = eval(m, out.limit).norm();
  out.radius_bound = nullp_radius(in.h0_norm, in.L);
  out.within_radius =
      !out.radius_bound || out.limit.norm() <= *out.radius_bound + 1e-6;

  int it2 = 0;
  bool conv2 = false;
  double step2 = 0.0;
  const CVec other = run(2.0 * lambda, it2, conv2, step2);
  out.lambda_gap = (other - out.limit).norm();
  out.lambda_independent = conv2 && out.lambda_gap <= 1e-8;
  return out;
}

/// Result of the self-map fixed-point search.
struct FixedPointResult {
  CVec x0;
  double r1_phi = 0.0;
  double r1_root = 0.0;
  double fix_residual = 0.0;
  int outer_iterations = 0;
};

/// Unique fixed point of a holomorphic self-map F of the unit ball under
/// L_F < 1 - 4||F(0)||, found as the null point of h = F - I. Returns
/// nothing when that condition fails. The confinement radius is computed
/// both as the fixed point of phi(r) = ||F(0)||(1+r)^2 + r L_F and as the
/// root of the equivalent quadratic; the two coincide.
inline std::optional<FixedPointResult> fixed_point_selfmap(
    const HoloMap& F, std::uint64_t seed = kDefaultSeed) {
  if (!F.is_poly()) {
    throw DomainError(
        "fixed_point_selfmap: needs a polynomial body to form F - I");
  }
  const int n = F.dim();
  if (F.domain().radius != 1.0) {
    throw DomainError("fixed_point_selfmap: needs the unit ball");
  }

  // Spot-check that F maps the ball into itself.
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    CVec u(n);
    for (int j = 0; j < n; ++j) u[j] = Complex(gauss(gen), gauss(gen));
    u *= 0.999 / u.norm();
    if (eval(F, u).norm() >= 1.0) {
      throw DomainError(
          "fixed_point_selfmap: F is not a self-map of the unit ball");
    }
  }

  const double cF = eval(F, CVec::Zero(n)).norm();
  const double LF = deriv_bounds_of(derivative_at_zero(F), 0.0).L_theta;
  if (!(LF < 1.0 - 4.0 * cF)) return std::nullopt;

  // h = F - I.
  PolyBody body = F.poly();
  for (int i = 0; i < n; ++i) {
    Monomial mono;
    mono.powers.assign(static_cast<size_t>(n), 0);
    mono.powers[static_cast<size_t>(i)] = 1;
    mono.coef = Complex(-1.0, 0.0);
    body.components[static_cast<size_t>(i)].push_back(mono);
  }
  HoloMap h(F.domain(), std::move(body));

  FixedPointResult out;
  const auto root = nullp_radius(cF, LF - 1.0);
  out.r1_root = root ? *root : 1.0;
  // phi(1) - 1 = 4c + L_F - 1 < 0 under the entry condition, so the
  // bracket [0, 1] always straddles the smaller crossing.
  const auto phi_gap = [&](double r) {
    return cF * (1.0 + r) * (1.0 + r) + r * LF - r;
  };
  out.r1_phi = cF <= 1e-300 ? 0.0 : detail::bisect_root(phi_gap, 0.0, 1.0);

  const PhiTrace tr =
      iterate_phi(h, 1.0, CVec::Zero(n), 0.995, std::nullopt, false, seed);
  out.x0 = tr.limit;
  out.fix_residual = (eval(F, out.x0) - out.x0).norm();
  out.outer_iterations = tr.outer_iterations;
  return out;
}

/// Admissible lambda-domain for resolvent self-mapping at radius r: a disc
/// around the origin and a sector about the positive axis.
struct KeyDomain {
  double r = 0.5;
  double disc_radius = 1.0 / 6.0;
  double sector_half_angle = 0.0;
};

inline KeyDomain key_domain(double r) {
  if (!(r > 0.0) || !(r < 1.0)) {
    throw DomainError("key_domain: r must lie in (0, 1)");
  }
  KeyDomain out;
  out.r = r;
  out.disc_radius = 0.5 * (1.0 - r) / (1.0 + r);
  out.sector_half_angle = std::asin((1.0 - r * r) / (1.0 + r * r));
  return out;
}

/// Sweep report for the self-mapping property of Phi_lambda over the
/// admissible domain.
struct KeyDomainReport {
  KeyDomain domain;
  int lambda_count = 0;
  int point_count = 0;
  int solved = 0;
  double max_phi_norm = 0.0;
  double max_excess = 0.0;
  bool ok = false;
};

/// Checks that Phi_lambda maps the sphere of radius r into the closed ball
/// of radius r for lambda sampled on a 1%-inset boundary of the disc and
/// the sector, plus interior points. The map must vanish at the origin
/// with derivative -I there.
inline KeyDomainReport verify_key_domain(const HoloMap& m, double r,
                                         int lambda_samples = 24,
                                         std::uint64_t seed = kDefaultSeed) {
  const int n = m.dim();
  if (m.domain().radius != 1.0) {
    throw DomainError("verify_key_domain: needs the unit ball");
  }
  KeyDomainReport rep;
  rep.domain = key_domain(r);

  if (eval(m, CVec::Zero(n)).norm() > 1e-12) {
    throw DomainError("verify_key_domain: map must vanish at the origin");
  }
  const CMat A = derivative_at_zero(m);
  if ((A + CMat::Identity(n, n)).norm() > 1e-8) {
    throw DomainError(
        "verify_key_domain: derivative at the origin must be -I");
  }

  const BoundInputs in = from_oracle(m, 0.0, seed, false);

  std::vector<Complex> lambdas;
  const int nd = std::max(4, lambda_samples / 2);
  for (int j = 0; j < nd; ++j) {
    const double phi = 2.0 * M_PI * j / nd;
    lambdas.push_back(std::polar(0.99 * rep.domain.disc_radius, phi));
  }
  const int ns = std::max(4, lambda_samples - nd);
  for (int j = 0; j < ns; ++j) {
    const double mag = 0.1 * std::pow(40.0, double(j) / std::max(1, ns - 1));
    const double ang = (j % 2 == 0 ? 1.0 : -1.0) * 0.99 *
                       rep.domain.sector_half_angle;
    lambdas.push_back(std::polar(mag, ang));
  }
  lambdas.push_back(Complex(0.5 * rep.domain.disc_radius, 0.0));
  lambdas.push_back(Complex(1.0, 0.0));

  std::mt19937_64 gen(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int points = 8;
  rep.lambda_count = static_cast<int>(lambdas.size());
  rep.point_count = points;

  bool all_converged = true;
  for (const Complex& lam : lambdas) {
    for (int t = 0; t < points; ++t) {
      CVec y(n);
      if (t == 0) {
        y = CVec::Zero(n);
        y[0] = 1.0;
      } else {
        for (int j = 0; j < n; ++j) y[j] = Complex(gauss(gen), gauss(gen));
      }
      y *= r / y.norm();
      const SolveTrace st =
          solve_resolvent(m, lam, CVec(lam * y), 0.999, in, seed);
      if (!st.converged) {
        all_converged = false;
        continue;
      }
      ++rep.solved;
      const double nx = st.solution.norm();
      rep.max_phi_norm = std::max(rep.max_phi_norm, nx);
      rep.max_excess = std::max(rep.max_excess, nx - r);
    }
  }
  rep.ok = all_converged && rep.max_excess <= 1e-8;
  return rep;
}

/// True when lambda stays clear of the spectrum, which for ball maps is
/// the spectrum of the derivative at the origin.
inline bool spectrum_check(const HoloMap& m, Complex lambda) {
  Eigen::ComplexEigenSolver<CMat> es(derivative_at_zero(m), false);
  double dist = 1e300;
  const auto& ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    dist = std::min(dist, std::abs(lambda - ev[i]));
  }
  return dist > 1e-10;
}

}  // namespace numrange
