#include <doctest.h>

#include <cmath>
#include <complex>

#include "numrange/range_oracle.hpp"
#include "util.hpp"

using namespace numrange;
using testutil::Rng;

namespace {

HoloMap scaled_identity(Complex a, int n = 1) {
  PolyBody body;
  body.components.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    Monomial m;
    m.powers.assign(static_cast<size_t>(n), 0);
    m.powers[static_cast<size_t>(i)] = 1;
    m.coef = a;
    body.components[static_cast<size_t>(i)].push_back(m);
  }
  return HoloMap(BallDomain{n, 1.0}, std::move(body));
}

HoloMap cayley() {
  BuiltinBody b;
  b.tag = "cayley_i";
  return HoloMap(BallDomain{1, 1.0}, b);
}

// Independent n = 1 oracle: a brute million-node sweep of the circle.
double sweep_sup(const HoloMap& m, double r, double theta, bool subtract_h0,
                 bool inf_mode, int nodes = 1000000) {
  CVec h0 = CVec::Zero(1);
  CVec zero = CVec::Zero(1);
  if (subtract_h0) h0 = eval(m, zero);
  Complex rot = std::polar(1.0, theta);
  double best = -1e300;
  double sign = inf_mode ? -1.0 : 1.0;
  CVec x(1);
  for (int k = 0; k < nodes; ++k) {
    x[0] = std::polar(r, 2.0 * M_PI * k / nodes);
    double v = sign * (rot * pairing(eval(m, x) - h0, x)).real();
    best = std::max(best, v);
  }
  return sign * best;
}

}  // namespace

TEST_CASE("n=1 sphere suprema agree with a million-node sweep") {
  Rng rng(555);
  for (int trial = 0; trial < 3; ++trial) {
    HoloMap m = testutil::random_poly_map(rng, 1, 6, 1.0);
    double r = rng.uniform(0.3, 0.9);
    double theta = rng.uniform(-1.2, 1.2);
    double fast =
        sup_re_pairing(m, r, theta, true, ExtremeMode::Sup, 42).value;
    double slow = sweep_sup(m, r, theta, true, false, 1000000);
    CHECK(std::abs(fast - slow) <= 1e-6 * std::max(1.0, std::abs(slow)));
  }
}

TEST_CASE("sup at theta plus pi is minus the inf at theta") {
  Rng rng(808);
  for (int trial = 0; trial < 6; ++trial) {
    int n = rng.uniform_int(1, 3);
    HoloMap m = testutil::random_poly_map(rng, n, 4, 1.0);
    double r = rng.uniform(0.2, 0.9);
    double theta = rng.uniform(-2.0, 2.0);
    double sup_t =
        sup_re_pairing(m, r, theta, false, ExtremeMode::Sup, 42).value;
    double sup_opp =
        sup_re_pairing(m, r, theta + M_PI, false, ExtremeMode::Sup, 42).value;
    // Both runs underestimate their own supremum, so the exact identity
    // sup(theta) = -inf(theta + pi) only survives as an inequality pair.
    CHECK(sup_t + sup_opp >= -1e-9);
    double inf_t =
        sup_re_pairing(m, r, theta, false, ExtremeMode::Inf, 42).value;
    CHECK(std::abs(inf_t + sup_opp) <= 1e-6 * std::max(1.0, std::abs(inf_t)));
  }
}

TEST_CASE("linear maps scale exactly like r^2 L(theta)") {
  Rng rng(99);
  for (int trial = 0; trial < 4; ++trial) {
    int n = rng.uniform_int(1, 2);
    CMat A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = rng.box(1.0);
    BuiltinBody b;
    b.tag = "linear";
    b.matrix = A;
    HoloMap m(BallDomain{n, 1.0}, b);
    double theta = rng.uniform(-1.5, 1.5);
    DerivBounds db = deriv_bounds(m, theta);
    for (double r : {0.25, 0.7}) {
      double sup =
          sup_re_pairing(m, r, theta, true, ExtremeMode::Sup, 42).value;
      CHECK(std::abs(sup - r * r * db.L_theta) <=
            1e-6 * std::max(1.0, std::abs(db.L_theta)));
    }
  }
}

TEST_CASE("deriv_bounds matches brute force on the unit sphere") {
  CMat D = CMat::Zero(2, 2);
  D(0, 0) = Complex(1.0, 0.0);
  D(1, 1) = Complex(-1.0, 0.0);
  DerivBounds db = deriv_bounds_of(D, 0.0);
  CHECK(db.L_theta == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(db.l_theta == doctest::Approx(-1.0).epsilon(1e-12));

  Rng rng(31337);
  CMat A(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) A(i, j) = rng.box(1.0);
  double theta = 0.7;
  DerivBounds ex = deriv_bounds_of(A, theta);
  Complex rot = std::polar(1.0, theta);
  auto quad = [&](const CVec& u) { return (rot * pairing(A * u, u)).real(); };
  SphereExtremum up = sphere_extremum(2, 1.0, quad, 42);
  auto neg = [&](const CVec& u) { return -quad(u); };
  SphereExtremum dn = sphere_extremum(2, 1.0, neg, 42);
  CHECK(std::abs(up.value - ex.L_theta) < 1e-6);
  CHECK(std::abs(-dn.value - ex.l_theta) < 1e-6);
}

TEST_CASE("ball supremum of h(x) = -x is zero, approached at the origin") {
  HoloMap m = scaled_identity(Complex(-1.0, 0.0));
  BallSupEstimate est = estimate_NR(m, 0.0, 42);
  CHECK(!est.infinite);
  CHECK(est.value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(est.ladder.front() < 0.0);
}

TEST_CASE("cayley_i ball supremum splits by direction") {
  HoloMap m = cayley();
  BallSupEstimate unstable = estimate_NR(m, 0.0, 42);
  CHECK(unstable.infinite);
  BallSupEstimate stable = estimate_NR(m, M_PI / 2.0, 42);
  CHECK(!stable.infinite);
  CHECK(stable.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("doubling the phase-1 budget never loses ground") {
  Rng rng(2024);
  for (int trial = 0; trial < 3; ++trial) {
    int n = rng.uniform_int(1, 2);
    HoloMap m = testutil::random_poly_map(rng, n, 4, 1.0);
    double r = rng.uniform(0.3, 0.9);
    double coarse =
        sup_re_pairing(m, r, 0.3, false, ExtremeMode::Sup, 42, 2048 * n).value;
    double fine =
        sup_re_pairing(m, r, 0.3, false, ExtremeMode::Sup, 42, 4096 * n).value;
    CHECK(fine >= coarse - 1e-12);
  }
}

TEST_CASE("range_stats is internally consistent") {
  Rng rng(4242);
  HoloMap m = testutil::random_poly_map(rng, 2, 3, 0.8);
  RangeStats st = range_stats(m, 0.6, 0.4, 42);
  CHECK(st.m_r <= st.M_r + 1e-12);
  // Cauchy-Schwarz: |<h(x), x*>| <= ||h(x)|| ||x||.
  CHECK(st.V_abs <= st.r * st.W_r + 1e-9);
  DerivBounds db = deriv_bounds(m, 0.4);
  const double r2 = st.r * st.r;
  // Centered sphere extrema bracket the derivative bounds.
  CHECK(st.M_r >= r2 * db.L_theta - 1e-6);
  CHECK(st.m_r <= r2 * db.l_theta + 1e-6);
}

TEST_CASE("check_dissipative accepts -x and rejects too-strict omega") {
  HoloMap m = scaled_identity(Complex(-1.0, 0.0));
  DissipativeCheck ok = check_dissipative(m, -0.9, 0.0, 0.1, 42);
  CHECK(ok.dissipative);
  CHECK(ok.worst == doctest::Approx(-0.9025).epsilon(1e-6));
  DissipativeCheck bad = check_dissipative(m, -0.95, 0.0, 0.1, 42);
  CHECK(!bad.dissipative);
  CHECK(bad.witness.size() == 1);
}
