#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "linflow/invariants.hpp"

namespace linflow {

inline bool similar(const GeneratorSpec& a, const GeneratorSpec& b) { return a == b; }

inline bool lyapunov_similar(const GeneratorSpec& a, const GeneratorSpec& b) {
  return a.dim() == b.dim() && lyapunov_spectrum(a) == lyapunov_spectrum(b);
}

inline bool lipschitz_similar(const GeneratorSpec& a, const GeneratorSpec& b) {
  return lipschitz_transform(a) == lipschitz_transform(b);
}

inline bool kinematic_similar(const GeneratorSpec& a, const GeneratorSpec& b) {
  return kinematic_transform(a) == kinematic_transform(b);
}

struct ScalingCertificate {
  Rational alpha;
  std::string witness;
};

inline void require_same_dim(const GeneratorSpec& a, const GeneratorSpec& b) {
  if (a.dim() != b.dim())
    throw PreconditionError("DimMismatch", "dims " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
}

// Ordered by |alpha| ascending, positive before negative.
inline std::vector<Rational> scaling_candidates(const GeneratorSpec& a, const GeneratorSpec& b) {
  require_same_dim(a, b);
  auto collect = [](const GeneratorSpec& s, bool real_parts) {
    std::set<Rational> v;
    for (const auto& blk : s.blocks()) {
      const Rational& x = real_parts ? blk.re : blk.im;
      if (!x.is_zero()) v.insert(abs(x));
    }
    return v;
  };
  std::set<Rational> ra = collect(a, true), rb = collect(b, true);
  std::set<Rational> mags;
  if (!ra.empty() && !rb.empty()) {
    for (const auto& r : ra)
      for (const auto& s : rb) mags.insert(r / s);
  } else {
    std::set<Rational> ia = collect(a, false), ib = collect(b, false);
    if (!ia.empty() && !ib.empty())
      for (const auto& p : ia)
        for (const auto& q : ib) mags.insert(p / q);
  }
  std::vector<Rational> out;
  if (mags.empty()) {
    out.push_back(1);
    return out;
  }
  for (const auto& m : mags) {
    out.push_back(m);
    out.push_back(-m);
  }
  return out;
}

using ScaledPredicate = std::function<bool(const GeneratorSpec&, const GeneratorSpec&)>;

inline std::optional<ScalingCertificate> find_scaling(const GeneratorSpec& a, const GeneratorSpec& b,
                                                      const ScaledPredicate& pred,
                                                      const std::string& what = "predicate") {
  for (const auto& alpha : scaling_candidates(a, b)) {
    if (pred(a, scale_spec(b, alpha)))
      return ScalingCertificate{alpha, what + " holds between A and " + alpha.str() + "*B"};
  }
  return std::nullopt;
}

}  // namespace linflow
