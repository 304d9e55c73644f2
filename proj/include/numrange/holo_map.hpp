#pragma once

#include <cmath>
#include <complex>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "numrange/types.hpp"

namespace numrange {

/// Open ball { x in C^n : ||x|| < radius } on which a map lives.
struct BallDomain {
  int dim = 1;
  double radius = 1.0;
};

/// One polynomial term coef * x_1^{p_1} * ... * x_n^{p_n}.
struct Monomial {
  std::vector<int> powers;
  Complex coef;
};

/// Component i of a polynomial map is a sparse list of monomials.
using PolyComponent = std::vector<Monomial>;

struct PolyBody {
  std::vector<PolyComponent> components;
};

/// Named analytic maps that are not polynomials.
///
///   cayley_i      n = 1,  h(x) = i x (1 + x) / (1 - x)
///   spiral_ref    any n,  f(x) = (1 - x_1)^{-(1 + e^{2 i theta})} x
///   moebius_auto  n = 1,  m(x) = e^{i phase} (x - a) / (1 - conj(a) x)
///   linear        any n,  h(x) = A x
struct BuiltinBody {
  std::string tag;
  double theta = 0.0;
  Complex moebius_a{0.0, 0.0};
  double moebius_phase = 0.0;
  CMat matrix;
};

constexpr int kMaxPolyDegree = 64;
constexpr double kSingularTol = 1e-14;

/// A holomorphic map B_R -> C^n, either a sparse polynomial or a builtin.
class HoloMap {
 public:
  HoloMap(BallDomain domain, PolyBody body)
      : domain_(domain), body_(std::move(body)) {}
  HoloMap(BallDomain domain, BuiltinBody body)
      : domain_(domain), body_(std::move(body)) {}

  const BallDomain& domain() const { return domain_; }
  int dim() const { return domain_.dim; }
  double radius() const { return domain_.radius; }

  bool is_poly() const { return std::holds_alternative<PolyBody>(body_); }
  const PolyBody& poly() const { return std::get<PolyBody>(body_); }
  const BuiltinBody& builtin() const { return std::get<BuiltinBody>(body_); }

 private:
  BallDomain domain_;
  std::variant<PolyBody, BuiltinBody> body_;
};

namespace detail {

inline void check_dim(const HoloMap& m, const Eigen::Ref<const CVec>& x) {
  if (x.size() != m.dim()) {
    throw DimensionMismatch("eval: point has dimension " +
                            std::to_string(x.size()) + ", map expects " +
                            std::to_string(m.dim()));
  }
}

inline CVec eval_poly(const PolyBody& body, const Eigen::Ref<const CVec>& x) {
  const int n = static_cast<int>(x.size());
  int max_pow = 0;
  for (const auto& comp : body.components) {
    for (const auto& mono : comp) {
      for (int p : mono.powers) max_pow = std::max(max_pow, p);
    }
  }
  // Power table: pows[j*(max_pow+1) + k] = x_j^k.
  std::vector<Complex> pows(static_cast<size_t>(n) * (max_pow + 1));
  for (int j = 0; j < n; ++j) {
    pows[static_cast<size_t>(j) * (max_pow + 1)] = Complex(1.0, 0.0);
    for (int k = 1; k <= max_pow; ++k) {
      pows[static_cast<size_t>(j) * (max_pow + 1) + k] =
          pows[static_cast<size_t>(j) * (max_pow + 1) + k - 1] * x[j];
    }
  }
  CVec out = CVec::Zero(static_cast<Eigen::Index>(body.components.size()));
  for (size_t i = 0; i < body.components.size(); ++i) {
    Complex acc{0.0, 0.0};
    for (const auto& mono : body.components[i]) {
      Complex term = mono.coef;
      for (int j = 0; j < n; ++j) {
        int p = mono.powers[j];
        if (p > 0) term *= pows[static_cast<size_t>(j) * (max_pow + 1) + p];
      }
      acc += term;
    }
    out[static_cast<Eigen::Index>(i)] = acc;
  }
  return out;
}

inline CVec eval_builtin(const BuiltinBody& b,
                         const Eigen::Ref<const CVec>& x) {
  if (b.tag == "cayley_i") {
    Complex den = Complex(1.0, 0.0) - x[0];
    if (std::abs(den) <= kSingularTol) {
      throw SingularPoint("cayley_i: evaluation at the pole x = 1");
    }
    CVec out(1);
    out[0] = Complex(0.0, 1.0) * x[0] * (Complex(1.0, 0.0) + x[0]) / den;
    return out;
  }
  if (b.tag == "spiral_ref") {
    Complex den = Complex(1.0, 0.0) - x[0];
    if (std::abs(den) <= kSingularTol) {
      throw SingularPoint("spiral_ref: evaluation at the branch point x_1 = 1");
    }
    Complex p = Complex(1.0, 0.0) + std::exp(Complex(0.0, 2.0 * b.theta));
    Complex factor = std::exp(-p * std::log(den));
    return factor * x;
  }
  if (b.tag == "moebius_auto") {
    Complex den = Complex(1.0, 0.0) - std::conj(b.moebius_a) * x[0];
    if (std::abs(den) <= kSingularTol) {
      throw SingularPoint("moebius_auto: evaluation at the pole");
    }
    CVec out(1);
    out[0] = std::exp(Complex(0.0, b.moebius_phase)) * (x[0] - b.moebius_a) / den;
    return out;
  }
  if (b.tag == "linear") {
    return b.matrix * x;
  }
  throw DomainError("unknown builtin tag: " + b.tag);
}

}  // namespace detail

inline CVec eval(const HoloMap& m, const Eigen::Ref<const CVec>& x) {
  detail::check_dim(m, x);
  return m.is_poly() ? detail::eval_poly(m.poly(), x)
                     : detail::eval_builtin(m.builtin(), x);
}

/// Exact Jacobian of a polynomial body at x.
inline CMat jacobian_poly(const PolyBody& body,
                          const Eigen::Ref<const CVec>& x) {
  const int n = static_cast<int>(x.size());
  CMat J = CMat::Zero(static_cast<Eigen::Index>(body.components.size()), n);
  for (size_t i = 0; i < body.components.size(); ++i) {
    for (const auto& mono : body.components[i]) {
      for (int j = 0; j < n; ++j) {
        int p = mono.powers[j];
        if (p == 0) continue;
        Complex term = mono.coef * static_cast<double>(p);
        for (int k = 0; k < n; ++k) {
          int q = mono.powers[k] - (k == j ? 1 : 0);
          for (int rep = 0; rep < q; ++rep) term *= x[k];
        }
        J(static_cast<Eigen::Index>(i), j) += term;
      }
    }
  }
  return J;
}

/// Jacobian by a trapezoid Cauchy integral over a circle of radius
/// 0.5 (R - ||x||) in each coordinate direction.  Trapezoid quadrature on a
/// circle converges geometrically for holomorphic integrands, so 256 nodes
/// give far better than 1e-10 here.
inline CMat jacobian_cauchy(const HoloMap& m, const Eigen::Ref<const CVec>& x,
                            int nodes = 256) {
  const int n = m.dim();
  const double slack = m.radius() - x.norm();
  if (slack <= 0.0) {
    throw DomainError("jacobian: point is not strictly inside the ball");
  }
  const double rho = 0.5 * slack;
  CMat J(n, n);
  for (int j = 0; j < n; ++j) {
    CVec col = CVec::Zero(n);
    for (int k = 0; k < nodes; ++k) {
      double phi = 2.0 * M_PI * k / nodes;
      Complex zeta = std::polar(rho, phi);
      CVec xp = x;
      xp[j] += zeta;
      col += std::polar(1.0, -phi) * eval(m, xp);
    }
    J.col(j) = col / (rho * nodes);
  }
  return J;
}

inline CMat jacobian(const HoloMap& m, const Eigen::Ref<const CVec>& x) {
  detail::check_dim(m, x);
  return m.is_poly() ? jacobian_poly(m.poly(), x) : jacobian_cauchy(m, x);
}

/// h'(0).  Polynomials read the degree-one coefficients off directly;
/// builtins integrate on the circle of radius R/2.
inline CMat derivative_at_zero(const HoloMap& m) {
  const int n = m.dim();
  if (m.is_poly()) {
    CMat A = CMat::Zero(n, n);
    for (size_t i = 0; i < m.poly().components.size(); ++i) {
      for (const auto& mono : m.poly().components[i]) {
        int total = 0;
        int var = -1;
        for (int j = 0; j < n; ++j) {
          total += mono.powers[j];
          if (mono.powers[j] == 1) var = j;
        }
        if (total == 1) A(static_cast<Eigen::Index>(i), var) += mono.coef;
      }
    }
    return A;
  }
  return jacobian_cauchy(m, CVec::Zero(n));
}

// ---------------------------------------------------------------------------
// JSON serialization.  Schema (exactly one of "poly" / "builtin"):
//   {"dim": 2, "R": 1.0, "poly": [[{"idx": [1,0], "re": 1.0, "im": 0.0}]]}
//   {"dim": 1, "R": 1.0, "builtin": "cayley_i"}
//   {"dim": 2, "R": 1.0, "builtin": "spiral_ref", "theta": 0.7853981633974483}
//   {"dim": 1, "R": 1.0, "builtin": "moebius_auto",
//    "params": {"a_re": 0.3, "a_im": 0.0, "phase": 0.0}}
//   {"dim": 2, "R": 1.0, "builtin": "linear",
//    "params": {"matrix": [[{"re":1,"im":0},{"re":0,"im":0}], ...]}}
// ---------------------------------------------------------------------------

namespace detail {

using nlohmann::json;

inline double get_finite_double(const json& j, const std::string& what) {
  if (!j.is_number()) throw ParseError(what + " must be a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(what + " must be finite");
  return v;
}

inline void reject_unknown_keys(const json& obj,
                                const std::vector<std::string>& allowed,
                                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const auto& k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) throw ParseError("unknown key \"" + it.key() + "\" in " + where);
  }
}

inline Complex get_complex(const json& obj, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + " must be {re, im}");
  reject_unknown_keys(obj, {"re", "im"}, where);
  if (!obj.contains("re") || !obj.contains("im")) {
    throw ParseError(where + " must carry both re and im");
  }
  return Complex(get_finite_double(obj.at("re"), where + ".re"),
                 get_finite_double(obj.at("im"), where + ".im"));
}

inline PolyBody parse_poly(const json& arr, int dim) {
  if (!arr.is_array()) throw ParseError("poly must be an array of components");
  if (static_cast<int>(arr.size()) != dim) {
    throw ParseError("poly has " + std::to_string(arr.size()) +
                     " components, dim is " + std::to_string(dim));
  }
  PolyBody body;
  body.components.resize(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) {
    const json& comp = arr[i];
    if (!comp.is_array()) {
      throw ParseError("poly component " + std::to_string(i) +
                       " must be an array of terms");
    }
    for (const json& term : comp) {
      if (!term.is_object()) throw ParseError("poly term must be an object");
      reject_unknown_keys(term, {"idx", "re", "im"}, "poly term");
      if (!term.contains("idx")) throw ParseError("poly term needs idx");
      const json& idx = term.at("idx");
      if (!idx.is_array() || static_cast<int>(idx.size()) != dim) {
        throw ParseError("idx must list one exponent per variable");
      }
      Monomial mono;
      mono.powers.resize(static_cast<size_t>(dim));
      int total = 0;
      for (int j = 0; j < dim; ++j) {
        const json& e = idx[static_cast<size_t>(j)];
        if (!e.is_number_integer() || e.get<long long>() < 0) {
          throw ParseError("idx entries must be nonnegative integers");
        }
        long long p = e.get<long long>();
        if (p > kMaxPolyDegree) throw ParseError("degree cap 64 exceeded");
        mono.powers[static_cast<size_t>(j)] = static_cast<int>(p);
        total += static_cast<int>(p);
      }
      if (total > kMaxPolyDegree) throw ParseError("degree cap 64 exceeded");
      if (!term.contains("re") || !term.contains("im")) {
        throw ParseError("poly term needs re and im");
      }
      mono.coef = Complex(get_finite_double(term.at("re"), "poly term re"),
                          get_finite_double(term.at("im"), "poly term im"));
      body.components[i].push_back(std::move(mono));
    }
  }
  return body;
}

inline BuiltinBody parse_builtin(const json& root, int dim) {
  BuiltinBody b;
  b.tag = root.at("builtin").get<std::string>();
  const bool has_theta = root.contains("theta");
  const bool has_params = root.contains("params");
  if (b.tag == "cayley_i") {
    if (dim != 1) throw ParseError("cayley_i requires dim 1");
    if (has_theta || has_params) throw ParseError("cayley_i takes no parameters");
  } else if (b.tag == "spiral_ref") {
    if (has_params) throw ParseError("spiral_ref takes only theta");
    if (has_theta) b.theta = get_finite_double(root.at("theta"), "theta");
  } else if (b.tag == "moebius_auto") {
    if (dim != 1) throw ParseError("moebius_auto requires dim 1");
    if (has_theta) throw ParseError("moebius_auto takes params, not theta");
    if (!has_params) throw ParseError("moebius_auto needs params");
    const json& p = root.at("params");
    reject_unknown_keys(p, {"a_re", "a_im", "phase"}, "moebius_auto params");
    if (!p.contains("a_re") || !p.contains("a_im")) {
      throw ParseError("moebius_auto params need a_re and a_im");
    }
    b.moebius_a = Complex(get_finite_double(p.at("a_re"), "a_re"),
                          get_finite_double(p.at("a_im"), "a_im"));
    if (std::abs(b.moebius_a) >= 1.0) {
      throw ParseError("moebius_auto needs |a| < 1");
    }
    if (p.contains("phase")) {
      b.moebius_phase = get_finite_double(p.at("phase"), "phase");
    }
  } else if (b.tag == "linear") {
    if (has_theta) throw ParseError("linear takes params, not theta");
    if (!has_params) throw ParseError("linear needs params.matrix");
    const json& p = root.at("params");
    reject_unknown_keys(p, {"matrix"}, "linear params");
    if (!p.contains("matrix")) throw ParseError("linear needs params.matrix");
    const json& rows = p.at("matrix");
    if (!rows.is_array() || static_cast<int>(rows.size()) != dim) {
      throw ParseError("linear matrix must have dim rows");
    }
    b.matrix = CMat::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
      const json& row = rows[static_cast<size_t>(i)];
      if (!row.is_array() || static_cast<int>(row.size()) != dim) {
        throw ParseError("linear matrix must be dim x dim");
      }
      for (int j = 0; j < dim; ++j) {
        b.matrix(i, j) = get_complex(row[static_cast<size_t>(j)],
                                     "linear matrix entry");
      }
    }
  } else {
    throw ParseError("unknown builtin \"" + b.tag + "\"");
  }
  return b;
}

}  // namespace detail

inline HoloMap map_from_json(const nlohmann::json& root) {
  using detail::reject_unknown_keys;
  if (!root.is_object()) throw ParseError("map spec must be a JSON object");
  reject_unknown_keys(root, {"dim", "R", "poly", "builtin", "theta", "params"},
                      "map spec");
  if (!root.contains("dim") || !root.contains("R")) {
    throw ParseError("map spec needs dim and R");
  }
  if (!root.at("dim").is_number_integer()) {
    throw ParseError("dim must be an integer");
  }
  const int dim = root.at("dim").get<int>();
  if (dim < 1 || dim > 64) throw ParseError("dim must be in 1..64");
  const double R = detail::get_finite_double(root.at("R"), "R");
  if (R <= 0.0) throw ParseError("R must be positive");

  const bool has_poly = root.contains("poly");
  const bool has_builtin = root.contains("builtin");
  if (has_poly == has_builtin) {
    throw ParseError("map spec needs exactly one of poly / builtin");
  }
  if (has_poly && (root.contains("theta") || root.contains("params"))) {
    throw ParseError("theta/params are builtin-only keys");
  }

  BallDomain dom{dim, R};
  HoloMap map = has_poly
                    ? HoloMap(dom, detail::parse_poly(root.at("poly"), dim))
                    : HoloMap(dom, detail::parse_builtin(root, dim));

  // Spot-check finiteness at a few interior points so that a map with a
  // singularity inside its declared ball is rejected at load time.
  std::vector<CVec> probes;
  probes.push_back(CVec::Zero(dim));
  CVec e1 = CVec::Zero(dim);
  e1[0] = Complex(0.5 * R, 0.0);
  probes.push_back(e1);
  probes.push_back(-e1);
  CVec ie1 = CVec::Zero(dim);
  ie1[0] = Complex(0.0, 0.5 * R);
  probes.push_back(ie1);
  CVec diag = CVec::Constant(dim, Complex(0.5 * R / std::sqrt(double(dim)), 0.0));
  probes.push_back(diag);
  for (const CVec& x : probes) {
    CVec y;
    try {
      y = eval(map, x);
    } catch (const SingularPoint& e) {
      throw ParseError(std::string("map is singular inside its ball: ") +
                       e.what());
    }
    if (!y.allFinite()) {
      throw ParseError("map evaluates to a non-finite value inside its ball");
    }
  }
  return map;
}

inline nlohmann::json map_to_json(const HoloMap& m) {
  nlohmann::json root;
  root["dim"] = m.dim();
  root["R"] = m.radius();
  if (m.is_poly()) {
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& comp : m.poly().components) {
      nlohmann::json terms = nlohmann::json::array();
      for (const auto& mono : comp) {
        nlohmann::json t;
        t["idx"] = mono.powers;
        t["re"] = mono.coef.real();
        t["im"] = mono.coef.imag();
        terms.push_back(t);
      }
      comps.push_back(terms);
    }
    root["poly"] = comps;
  } else {
    const BuiltinBody& b = m.builtin();
    root["builtin"] = b.tag;
    if (b.tag == "spiral_ref") {
      root["theta"] = b.theta;
    } else if (b.tag == "moebius_auto") {
      root["params"] = {{"a_re", b.moebius_a.real()},
                        {"a_im", b.moebius_a.imag()},
                        {"phase", b.moebius_phase}};
    } else if (b.tag == "linear") {
      nlohmann::json rows = nlohmann::json::array();
      for (int i = 0; i < m.dim(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < m.dim(); ++j) {
          row.push_back({{"re", b.matrix(i, j).real()},
                         {"im", b.matrix(i, j).imag()}});
        }
        rows.push_back(row);
      }
      root["params"] = {{"matrix", rows}};
    }
  }
  return root;
}

inline HoloMap load_map_string(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  return map_from_json(root);
}

inline HoloMap load_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read map file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_map_string(buf.str());
}

inline std::string serialize_map(const HoloMap& m) {
  return map_to_json(m).dump(2);
}

/// A holomorphic vector field presented as callables, so that derived maps
/// (generators extracted from f, h = F - I, ...) run through the same
/// oracles and solvers as HoloMap itself.
struct VectorField {
  BallDomain domain;
  std::function<CVec(const CVec&)> value;
  std::function<CMat(const CVec&)> jac;
};

inline VectorField as_field(const HoloMap& m) {
  return VectorField{
      m.domain(), [&m](const CVec& x) { return eval(m, x); },
      [&m](const CVec& x) { return jacobian(m, x); }};
}

}  // namespace numrange
