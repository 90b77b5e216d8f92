#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "linflow/error.hpp"
#include "linflow/jordan.hpp"

namespace linflow {

using LyapunovSpectrum = std::vector<Rational>;  // nondecreasing, length dim

inline LyapunovSpectrum lyapunov_spectrum(const GeneratorSpec& s) {
  LyapunovSpectrum out;
  out.reserve(s.dim());
  for (const auto& b : s.blocks())
    for (int i = 0; i < b.dim(); ++i) out.push_back(b.re);
  std::sort(out.begin(), out.end());
  return out;
}

struct PartitionDims {
  int d_S = 0, d_C = 0, d_U = 0, d_H = 0, d_D = 0, d_AD = 0;
  friend bool operator==(const PartitionDims&, const PartitionDims&) = default;
};

inline PartitionDims decomposition_dims(const GeneratorSpec& s) {
  PartitionDims p;
  for (const auto& b : s.blocks()) {
    int n = b.dim();
    if (b.re.sign() < 0) p.d_S += n;
    else if (b.re.sign() > 0) p.d_U += n;
    else p.d_C += n;
    (b.m == 1 ? p.d_D : p.d_AD) += n;
  }
  p.d_H = p.d_S + p.d_U;
  return p;
}

enum class Part { S, C, U, H, D, AD };

inline bool in_part(const JordanBlock& b, Part part) {
  switch (part) {
    case Part::S: return b.re.sign() < 0;
    case Part::C: return b.re.sign() == 0;
    case Part::U: return b.re.sign() > 0;
    case Part::H: return b.re.sign() != 0;
    case Part::D: return b.m == 1;
    case Part::AD: return b.m >= 2;
  }
  return false;
}

inline GeneratorSpec subspec(const GeneratorSpec& s, Part part) {
  std::vector<JordanBlock> out;
  for (const auto& b : s.blocks())
    if (in_part(b, part)) out.push_back(b);
  return GeneratorSpec(std::move(out));
}

inline bool is_hyperbolic(const GeneratorSpec& s) { return subspec(s, Part::C).empty(); }
inline bool is_stable(const GeneratorSpec& s) {
  for (const auto& b : s.blocks())
    if (b.re.sign() >= 0) return false;
  return true;
}

// dim L_m(s): decay faster than e^{st} t^m.
inline int refined_dim(const GeneratorSpec& spec, int m, const Rational& s) {
  int n = 0;
  for (const auto& b : spec.blocks()) {
    if (b.re < s) n += b.dim();
    else if (b.re == s) n += std::min(m, b.m) * b.d();
  }
  return n;
}

inline int m_at(const GeneratorSpec& spec, const Rational& s) {
  int m = 0;
  for (const auto& b : spec.blocks())
    if (b.re == s) m = std::max(m, b.m);
  return m;
}

inline Rational top_exponent(const GeneratorSpec& spec) {
  if (spec.empty()) throw PreconditionError("EmptySpec", "top exponent of an empty spec");
  Rational t = spec.blocks().front().re;
  for (const auto& b : spec.blocks()) t = std::max(t, b.re);
  return t;
}

inline int top_m(const GeneratorSpec& spec) { return m_at(spec, top_exponent(spec)); }

struct RefinedDims {
  std::vector<Rational> breakpoints;
  std::vector<std::vector<int>> table;  // table[m][k] = dim L_m(breakpoints[k])
  std::vector<int> m_at;                // per breakpoint
  Rational top_exponent;
  int top_m = 0;
};

inline RefinedDims refined_dims(const GeneratorSpec& spec) {
  RefinedDims r;
  for (const auto& b : spec.blocks())
    if (std::find(r.breakpoints.begin(), r.breakpoints.end(), b.re) == r.breakpoints.end())
      r.breakpoints.push_back(b.re);
  std::sort(r.breakpoints.begin(), r.breakpoints.end());
  const int d = spec.dim();
  r.table.assign(d + 1, std::vector<int>(r.breakpoints.size()));
  for (int m = 0; m <= d; ++m)
    for (std::size_t k = 0; k < r.breakpoints.size(); ++k) r.table[m][k] = refined_dim(spec, m, r.breakpoints[k]);
  for (const auto& s : r.breakpoints) r.m_at.push_back(linflow::m_at(spec, s));
  if (!spec.empty()) {
    r.top_exponent = top_exponent(spec);
    r.top_m = top_m(spec);
  }
  return r;
}

// Distortion subspace in block coordinates of the materialized layout.
struct DistortionSubspace {
  int dimension = 0;
  std::vector<int> coordinates;  // spanning standard basis indices, ascending

  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const {
    for (int i = 0; i < x.size(); ++i)
      if (std::find(coordinates.begin(), coordinates.end(), i) == coordinates.end() && std::abs(x(i)) > tol)
        return false;
    return true;
  }
};

inline DistortionSubspace distortion_subspace(const GeneratorSpec& spec) {
  if (spec.empty() || !is_stable(spec)) throw PreconditionError("NotStable", "distortion subspace needs all a < 0");
  const Rational lam = top_exponent(spec);
  const int mt = top_m(spec);
  DistortionSubspace D;
  int off = 0;
  for (const auto& b : spec.blocks()) {
    if (b.re < lam) {
      for (int i = 0; i < b.dim(); ++i) D.coordinates.push_back(off + i);
    } else {
      // leading chain coordinates u_1..u_k (and v_1..v_k for a rotation block)
      int k = std::min(mt - 1, b.m);
      for (int i = 0; i < k; ++i) D.coordinates.push_back(off + i);
      if (!b.real())
        for (int i = 0; i < k; ++i) D.coordinates.push_back(off + b.m + i);
    }
    off += b.dim();
  }
  std::sort(D.coordinates.begin(), D.coordinates.end());
  D.dimension = static_cast<int>(D.coordinates.size());
  return D;
}

// Exact growth class of x: |Phi_t x| ~ e^{st} t^m. Returns nullopt for x = 0.
struct GrowthClass {
  Rational s;
  int m = 0;
  friend bool operator==(const GrowthClass&, const GrowthClass&) = default;
};

inline std::optional<GrowthClass> growth_class(const GeneratorSpec& spec, const Eigen::VectorXd& x, double tol = 0.0) {
  std::optional<GrowthClass> g;
  int off = 0;
  for (const auto& b : spec.blocks()) {
    int top = -1;  // highest chain position carrying mass
    for (int i = 0; i < b.m; ++i) {
      bool nz = std::abs(x(off + i)) > tol || (!b.real() && std::abs(x(off + b.m + i)) > tol);
      if (nz) top = i;
    }
    if (top >= 0) {
      GrowthClass c{b.re, top};
      if (!g || g->s < c.s || (g->s == c.s && g->m < c.m)) g = c;
    }
    off += b.dim();
  }
  return g;
}

inline GeneratorSpec lipschitz_transform(const GeneratorSpec& s) {
  std::vector<JordanBlock> out;
  for (const auto& b : s.blocks()) {
    if (b.m == 1 && !b.real()) {
      out.emplace_back(1, b.re, 0);
      out.emplace_back(1, b.re, 0);
    } else {
      out.push_back(b);
    }
  }
  return GeneratorSpec(std::move(out));
}

inline GeneratorSpec kinematic_transform(const GeneratorSpec& s) {
  std::vector<JordanBlock> out;
  for (const auto& b : s.blocks()) {
    if (!b.real()) {
      out.emplace_back(b.m, b.re, 0);
      out.emplace_back(b.m, b.re, 0);
    } else {
      out.push_back(b);
    }
  }
  return GeneratorSpec(std::move(out));
}

// Minimal period as a multiple of 2*pi.
struct Period {
  enum class Kind { Zero, Finite, Infinite } kind = Kind::Zero;
  Rational over_two_pi;  // T = 2*pi*over_two_pi when Finite

  double value() const {
    constexpr double two_pi = 6.283185307179586476925286766559;
    if (kind == Kind::Zero) return 0.0;
    if (kind == Kind::Infinite) return std::numeric_limits<double>::infinity();
    return two_pi * over_two_pi.to_double();
  }
};

inline bool is_bounded(const GeneratorSpec& s) {
  for (const auto& b : s.blocks())
    if (!b.re.is_zero() || b.m != 1) return false;
  return true;
}

inline Period minimal_period(const GeneratorSpec& spec, const Eigen::VectorXd& x, double tol = 0.0) {
  if (!is_bounded(spec)) throw PreconditionError("NotBounded", "minimal period needs a diagonal central spec");
  if (x.size() != spec.dim()) throw PreconditionError("DimMismatch", "vector length differs from spec dim");
  Rational g = 0;
  int off = 0;
  for (const auto& b : spec.blocks()) {
    if (!b.real() && (std::abs(x(off)) > tol || std::abs(x(off + 1)) > tol)) g = rational_gcd(g, b.im);
    off += b.dim();
  }
  Period p;
  if (g.is_zero()) return p;
  // rational rates always share a period
  p.kind = Period::Kind::Finite;
  p.over_two_pi = Rational(1) / g;
  return p;
}

// Membership in the generic set: all blocks simple, off the imaginary axis,
// pairwise distinct, at most two spectral points on each vertical line.
inline bool is_generic(const GeneratorSpec& s) {
  std::map<Rational, int> per_line;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& b = s.blocks()[i];
    if (b.re.is_zero() || b.m != 1) return false;
    if (i > 0 && s.blocks()[i - 1] == b) return false;
    per_line[b.re] += b.d();
  }
  for (const auto& [re, n] : per_line)
    if (n > 2) return false;
  return true;
}

}  // namespace linflow
