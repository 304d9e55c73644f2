#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "numrange/scalar_bounds.hpp"
#include "util.hpp"

using namespace numrange;
using testutil::Rng;

namespace {

ScalarFn random_scalar_poly(Rng& rng, int deg, double R = 1.0) {
  std::vector<Complex> c(static_cast<size_t>(deg) + 1);
  for (auto& v : c) v = rng.box(1.0);
  return ScalarFn(std::move(c), R);
}

}  // namespace

TEST_CASE("km_factor frozen value and monotonicity") {
  CHECK(km_factor(0.0, 0.5, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  double prev = 0.0;
  for (int i = 1; i < 40; ++i) {
    double r = i * 0.02;
    double v = km_factor(0.0, r, 1.0);
    CHECK(v > prev);
    prev = v;
  }
  CHECK_THROWS_AS((void)km_factor(0.0, 1.5, 1.0), DomainError);
}

TEST_CASE("growth bound on Re g with frozen margin for g(z) = z") {
  ScalarFn g(std::vector<Complex>{{0.0, 0.0}, {1.0, 0.0}}, 1.0);
  // sup Re z over the unit disc is 1.
  double sup = disc_sup_re(g, 42);
  CHECK(sup == doctest::Approx(1.0).epsilon(1e-9));
  BoundCheck chk = check_hbc(g, 0.5, Complex(0.5, 0.0), sup);
  // rhs - lhs = 2r/(1+r) - r = r(1-r)/(1+r) = 1/6 at r = 1/2.
  CHECK(chk.margin == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
}

TEST_CASE("growth bound holds across a seeded polynomial corpus") {
  Rng rng(1101);
  for (int trial = 0; trial < 10; ++trial) {
    ScalarFn g = random_scalar_poly(rng, rng.uniform_int(1, 8));
    double sup = disc_sup_re(g, 42);
    for (int i = 0; i < 16; ++i) {
      double r = 0.05 + 0.9 * i / 15.0;
      for (int k = 0; k < 16; ++k) {
        Complex zeta = std::polar(r, 2.0 * M_PI * k / 16.0);
        CHECK(check_hbc(g, r, zeta, sup).margin >= -1e-9);
      }
    }
  }
}

TEST_CASE("rotated two-sided estimates hold on a seeded corpus") {
  Rng rng(2202);
  for (int trial = 0; trial < 8; ++trial) {
    ScalarFn g = random_scalar_poly(rng, rng.uniform_int(1, 6));
    double sup = disc_sup_re(g, 42);
    double inf = disc_inf_re(g, 42);
    CHECK(sup >= g.f0().real() - 1e-12);
    CHECK(inf <= g.f0().real() + 1e-12);
    for (double theta : {0.0, 0.5, -1.1, 2.4}) {
      for (double r : {0.2, 0.55, 0.9}) {
        for (int k = 0; k < 12; ++k) {
          Complex zeta = std::polar(r, 2.0 * M_PI * k / 12.0);
          CHECK(check_km(g, r, theta, zeta, Side::Upper, sup).margin >= -1e-9);
          CHECK(check_km(g, r, theta, zeta, Side::Lower, inf).margin >= -1e-9);
        }
      }
    }
  }
}

TEST_CASE("lifted pairing bound is exact for linear maps") {
  // f(z) = alpha z with Re alpha > 0: every term collapses and the bound
  // is attained at each point of each circle.
  Complex alpha(0.8, 0.45);
  ScalarFn f(std::vector<Complex>{{0.0, 0.0}, alpha}, 1.0);
  double sup = disc_sup_pairing(f, 42);
  CHECK(sup == doctest::Approx(alpha.real()).epsilon(1e-9));
  for (double r : {0.3, 0.7}) {
    for (int k = 0; k < 8; ++k) {
      Complex zeta = std::polar(r, 2.0 * M_PI * k / 8.0);
      BoundCheck chk = lifted_hbc_bound(f, r, zeta, alpha.real());
      CHECK(std::abs(chk.margin) <= 1e-12);
    }
  }
}

TEST_CASE("lifted pairing bound holds with h(0) terms present") {
  Rng rng(3303);
  for (int trial = 0; trial < 8; ++trial) {
    ScalarFn f = random_scalar_poly(rng, rng.uniform_int(1, 8));
    double sup = disc_sup_pairing(f, 42);
    for (double r : {0.15, 0.5, 0.85}) {
      for (int k = 0; k < 24; ++k) {
        Complex zeta = std::polar(r, 2.0 * M_PI * k / 24.0);
        CHECK(lifted_hbc_bound(f, r, zeta, sup).margin >= -1e-9);
      }
    }
  }
}

TEST_CASE("rotated lifted bound reduces to the unrotated one at theta 0") {
  Rng rng(4404);
  ScalarFn f = random_scalar_poly(rng, 5);
  double sup = disc_sup_pairing(f, 42);
  for (double r : {0.25, 0.6}) {
    for (int k = 0; k < 10; ++k) {
      Complex zeta = std::polar(r, 2.0 * M_PI * k / 10.0);
      BoundCheck a = lifted_hbc_bound(f, r, zeta, sup);
      BoundCheck b = lifted_km_bound(f, r, 0.0, zeta, sup);
      CHECK(std::abs(a.rhs - b.rhs) <= 1e-13 * std::max(1.0, std::abs(a.rhs)));
      CHECK(std::abs(a.lhs - b.lhs) <= 1e-13);
    }
  }
}

TEST_CASE("rotated lifted bound is exact for linear maps and holds rotated") {
  Complex alpha(1.0, 0.5);
  ScalarFn f(std::vector<Complex>{{0.0, 0.0}, alpha}, 1.0);
  double sup = disc_sup_pairing(f, 42);
  for (double theta : {0.3, -0.9, 1.2}) {
    for (int k = 0; k < 8; ++k) {
      Complex zeta = std::polar(0.6, 2.0 * M_PI * k / 8.0);
      BoundCheck chk = lifted_km_bound(f, 0.6, theta, zeta, sup);
      CHECK(std::abs(chk.margin) <= 1e-9);
    }
  }
  Rng rng(5505);
  for (int trial = 0; trial < 6; ++trial) {
    ScalarFn g = random_scalar_poly(rng, rng.uniform_int(1, 8));
    double s = disc_sup_pairing(g, 42);
    for (double theta : {0.0, 0.7, -0.4, 1.3}) {
      for (double r : {0.3, 0.8}) {
        for (int k = 0; k < 16; ++k) {
          Complex zeta = std::polar(r, 2.0 * M_PI * k / 16.0);
          CHECK(lifted_km_bound(g, r, theta, zeta, s).margin >= -1e-9);
        }
      }
    }
  }
}

TEST_CASE("centered lifted bound is exact for linear maps") {
  for (double theta : {0.0, 0.8, -1.0}) {
    // Keep Re(e^{i theta} alpha) > 0 so the rotated centered sup sits on the
    // boundary, R^2 Re(e^{i theta} alpha), and the bound is attained.
    Complex alpha = std::polar(1.0, -theta) * Complex(0.5, 0.2);
    ScalarFn f(std::vector<Complex>{{0.2, -0.3}, alpha}, 1.0);
    double s = disc_sup_centered_rotated(f, theta, 42);
    CHECK(s == doctest::Approx((std::polar(1.0, theta) * alpha).real())
                   .epsilon(1e-8));
    for (int k = 0; k < 8; ++k) {
      Complex zeta = std::polar(0.45, 2.0 * M_PI * k / 8.0);
      BoundCheck chk = lifted_km_centered_bound(f, 0.45, theta, zeta, s);
      CHECK(std::abs(chk.margin) <= 1e-9);
    }
  }
}

TEST_CASE("centered lifted bound with a negative rotated derivative") {
  // When Re(e^{i theta} alpha) < 0 the centered sup clamps at 0 (approached
  // at the origin) and the slack is exactly r^2 K |Re(e^{i theta} alpha)|.
  Complex alpha(-0.4, 0.9);
  double theta = 0.0;
  ScalarFn f(std::vector<Complex>{{0.2, -0.3}, alpha}, 1.0);
  double s = disc_sup_centered_rotated(f, theta, 42);
  CHECK(s == doctest::Approx(0.0).epsilon(1e-12));
  double r = 0.45;
  double expect = r * r * km_factor(theta, r, 1.0) * 0.4;
  for (int k = 0; k < 8; ++k) {
    Complex zeta = std::polar(r, 2.0 * M_PI * k / 8.0);
    BoundCheck chk = lifted_km_centered_bound(f, r, theta, zeta, s);
    CHECK(chk.margin == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("centered lifted bound holds on a seeded corpus") {
  Rng rng(6606);
  for (int trial = 0; trial < 6; ++trial) {
    ScalarFn f = random_scalar_poly(rng, rng.uniform_int(1, 8));
    for (double theta : {0.0, 0.6, -1.2}) {
      double s = disc_sup_centered_rotated(f, theta, 42);
      for (double r : {0.2, 0.65, 0.9}) {
        for (int k = 0; k < 16; ++k) {
          Complex zeta = std::polar(r, 2.0 * M_PI * k / 16.0);
          CHECK(lifted_km_centered_bound(f, r, theta, zeta, s).margin >= -1e-9);
        }
      }
    }
  }
}

TEST_CASE("derivative real part respects the boundary pairing bound") {
  Complex alpha(0.7, -0.2);
  ScalarFn lin(std::vector<Complex>{{0.0, 0.0}, alpha}, 1.0);
  CHECK(deriv_re_upper_bound(lin, 42) ==
        doctest::Approx(alpha.real()).epsilon(1e-9));
  Rng rng(7707);
  for (int trial = 0; trial < 8; ++trial) {
    ScalarFn f = random_scalar_poly(rng, rng.uniform_int(1, 8));
    CHECK(f.deriv0().real() <= deriv_re_upper_bound(f, 42) + 1e-9);
  }
}

TEST_CASE("littlewood sandwich: exact for linear, valid on a corpus") {
  // Linear f = alpha z at R = 1: M_r = r^2 Re alpha and both the sandwich
  // lower value and the upper M12 value collapse onto it.
  double a = 0.6;
  LittlewoodBounds lb = littlewood_lower(a, a, 1.0, 0.4);
  CHECK(lb.littlewood == doctest::Approx(0.16 * a).epsilon(1e-12));
  CHECK(lb.m12_lower == doctest::Approx(0.16 * a).epsilon(1e-12));
  CHECK(lb.m12_upper == doctest::Approx(0.16 * a).epsilon(1e-12));

  Rng rng(8808);
  for (int trial = 0; trial < 8; ++trial) {
    ScalarFn f = random_scalar_poly(rng, rng.uniform_int(1, 6));
    double L = f.deriv0().real();
    double M_R = disc_sup_centered_rotated(f, 0.0, 42);
    for (double r : {0.2, 0.5, 0.8}) {
      // Oracle M_r on the circle of radius r.
      Complex f0 = f.f0();
      auto obj = [&](const CVec& x) {
        return ((f(x[0]) - f0) * std::conj(x[0])).real();
      };
      double M_r = sphere_extremum(1, r, obj, 42, 2048).value;
      LittlewoodBounds s = littlewood_lower(L, M_R, 1.0, r);
      CHECK(s.littlewood <= M_r + 1e-9);
      CHECK(s.m12_lower <= M_r + 1e-9);
      CHECK(M_r <= s.m12_upper + 1e-9);
      if (L <= M_R) {
        // p(r) never exceeds L in this regime.
        CHECK(s.littlewood <= r * r * L + 1e-12);
      }
    }
  }
}

TEST_CASE("line restrictions expose vector maps as scalar functions") {
  BuiltinBody b;
  b.tag = "cayley_i";
  HoloMap h(BallDomain{1, 1.0}, b);
  CVec u(1);
  u[0] = Complex(1.0, 0.0);
  ScalarFn f{LineRestriction{&h, u}};
  CHECK(f.boundary_restricted());
  CHECK(std::abs(f.deriv0() - Complex(0.0, 1.0)) < 1e-10);
  // Pairing sup for the line through cayley_i: 2 r^3 / (1 - r^2), swept up
  // to the 0.99 cap for boundary-singular builtins.
  double expect = 2.0 * std::pow(0.99, 3) / (1.0 - 0.99 * 0.99);
  CHECK(disc_sup_pairing(f, 42) == doctest::Approx(expect).epsilon(1e-6));
}
