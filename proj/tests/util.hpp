#pragma once

// Shared helpers for the test binaries: a deterministic RNG that does not
// depend on libstdc++ distribution internals, plus small corpus builders.

#include <complex>
#include <random>
#include <vector>

#include "numrange/holo_map.hpp"

namespace testutil {

using numrange::Complex;
using numrange::CVec;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1) with the full 53-bit mantissa, identical on every
  // platform for a given seed.
  double unit() { return (gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  Complex box(double scale) {
    return Complex(uniform(-scale, scale), uniform(-scale, scale));
  }

 private:
  std::mt19937_64 gen_;
};

// Random polynomial map on the unit ball: n components, total degree <= deg,
// coefficients in the centered box of the given scale.
inline numrange::HoloMap random_poly_map(Rng& rng, int n, int deg,
                                         double scale, double R = 1.0) {
  numrange::PolyBody body;
  body.components.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    int terms = rng.uniform_int(2, 6);
    for (int t = 0; t < terms; ++t) {
      numrange::Monomial mono;
      mono.powers.assign(static_cast<size_t>(n), 0);
      int total = rng.uniform_int(0, deg);
      for (int d = 0; d < total; ++d) {
        mono.powers[static_cast<size_t>(rng.uniform_int(0, n - 1))] += 1;
      }
      mono.coef = rng.box(scale);
      body.components[static_cast<size_t>(i)].push_back(mono);
    }
  }
  return numrange::HoloMap(numrange::BallDomain{n, R}, std::move(body));
}

}  // namespace testutil
