#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "linflow/flow.hpp"
#include "linflow/invariants.hpp"

namespace linflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// h with h(Phi_t x) = Psi_{tau_x(t)} h(x).
struct HomeoMap {
  std::function<Vec(const Vec&)> forward;
  std::function<Vec(const Vec&)> inverse;
  FlowEvaluator source_flow;
  FlowEvaluator target_flow;
  GeneratorSpec source;
  GeneratorSpec target;
  std::function<double(const Vec&, double)> tau = [](const Vec&, double t) { return t; };
  std::string construction;
  std::map<std::string, double> params;

  int dim() const { return source_flow.dim(); }
};

namespace detail {

// Zero of an increasing function; brackets grown geometrically from [-1, 1],
// then bisection down to 1e-12 relative width.
template <class F>
double root_increasing(F&& f) {
  double lo = -1.0, hi = 1.0;
  for (int i = 0; f(lo) > 0.0; ++i) {
    if (i > 14) throw NumericalError("BracketFailure", "no lower bracket");
    hi = lo;
    lo *= 2.0;
  }
  for (int i = 0; f(hi) < 0.0; ++i) {
    if (i > 14) throw NumericalError("BracketFailure", "no upper bracket");
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(lo)); ++it) {
    double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// Same on [0, inf) for functions only monotone there; needs f(0) <= 0.
template <class F>
double root_increasing_from_zero(F&& f) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; f(hi) < 0.0; ++i) {
    if (i > 14) throw NumericalError("BracketFailure", "no upper bracket");
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, lo); ++it) {
    double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

inline Vec rotate_pairs(const Vec& x, int m, double angle) {
  // x = (u_1..u_m, v_1..v_m); rotate each (u_i, v_i) by angle
  Vec y = x;
  const double c = std::cos(angle), s = std::sin(angle);
  for (int i = 0; i < m; ++i) {
    y(i) = c * x(i) - s * x(m + i);
    y(m + i) = s * x(i) + c * x(m + i);
  }
  return y;
}

// r + sign*sqrt(r^2 - m^2) without cancellation when sign < 0.
inline double branch(double r, double m, double sign) {
  const double root = std::sqrt(std::max(0.0, r * r - m * m));
  if (sign >= 0) return r + (sign > 0 ? root : 0.0);
  return m * m / (r + root);
}

inline double gnorm(const Mat& G, const Vec& x) { return std::sqrt(std::max(0.0, x.dot(G * x))); }

inline bool positive_definite(const Mat& M) {
  Mat S = 0.5 * (M + M.transpose());
  Eigen::LLT<Mat> llt(S);
  if (llt.info() != Eigen::Success) return false;
  return llt.matrixLLT().diagonal().minCoeff() > 1e-10 * std::max(1.0, S.norm());
}

// Solve G A + A^T G = -2 Q through the Kronecker form.
inline Mat lyapunov_solve(const Mat& A, const Mat& Q) {
  const int n = static_cast<int>(A.rows());
  Mat I = Mat::Identity(n, n);
  Mat K = Eigen::kroneckerProduct(A.transpose(), I).eval() + Eigen::kroneckerProduct(I, A.transpose()).eval();
  Eigen::FullPivLU<Mat> lu(K);
  if (!lu.isInvertible()) throw NumericalError("LyapunovSolveFailed", "singular Lyapunov operator");
  Mat rhs = -2.0 * Q;
  Vec g = lu.solve(Eigen::Map<const Vec>(rhs.data(), n * n));
  Mat G = Eigen::Map<Mat>(g.data(), n, n);
  G = 0.5 * (G + G.transpose()).eval();
  double res = (G * A + A.transpose() * G - rhs).norm();
  if (!(res <= 1e-8 * std::max(1.0, rhs.norm()) * std::max(1.0, G.norm())))
    throw NumericalError("LyapunovSolveFailed", "residual " + std::to_string(res));
  return G;
}

// Chain-position weights diag[1, q, .., q^{m-1}] repeated for u and v.
inline Mat chain_weights(const FlowEvaluator& f, double q) {
  Mat Q = Mat::Zero(f.dim(), f.dim());
  int off = 0;
  for (const auto& b : f.blocks()) {
    const int chains = b.b == 0.0 ? 1 : 2;
    for (int c = 0; c < chains; ++c)
      for (int i = 0; i < b.m; ++i) Q(off + c * b.m + i, off + c * b.m + i) = std::pow(q, i);
    off += b.dim();
  }
  return Q;
}

}  // namespace detail

// y -> R_1(a log|y|) y, conjugating J_1(-1+ia) to -I_2.
inline HomeoMap build_h_a(double a) {
  HomeoMap h;
  auto rot = [](double c) {
    return [c](const Vec& y) -> Vec {
      double r = y.norm();
      if (r == 0.0) return y;
      return detail::rotate_pairs(y, 1, c * std::log(r));
    };
  };
  h.forward = rot(a);
  h.inverse = rot(-a);
  if (a == 0.0) h.source_flow = FlowEvaluator(std::vector<FlowBlock>{{1, -1.0, 0.0}, {1, -1.0, 0.0}});
  else h.source_flow = FlowEvaluator(std::vector<FlowBlock>{{1, -1.0, a}});
  h.target_flow = FlowEvaluator(std::vector<FlowBlock>{{1, -1.0, 0.0}, {1, -1.0, 0.0}});
  h.target = GeneratorSpec{{1, -1, 0}, {1, -1, 0}};
  h.source = a == 0.0 ? h.target : GeneratorSpec{{1, -1, best_rational(std::abs(a), 1 << 20)}};
  h.construction = "h_a";
  h.params["a"] = a;
  return h;
}

// Blockwise h_{b_j/|a0|} for a diagonal spec with one negative exponent a0.
inline HomeoMap build_single_exponent_conj(const GeneratorSpec& spec) {
  if (spec.empty()) throw PreconditionError("PreconditionViolated", "empty spec");
  const Rational a0 = spec.blocks().front().re;
  for (const auto& b : spec.blocks())
    if (b.m != 1 || b.re != a0)
      throw PreconditionError("PreconditionViolated", "needs diagonal blocks sharing one exponent");
  if (a0.sign() >= 0) throw PreconditionError("PreconditionViolated", "exponent must be negative");
  const double s = std::abs(a0.to_double());
  std::vector<std::pair<int, double>> rotations;  // (offset, rate)
  int off = 0;
  for (const auto& b : spec.blocks()) {
    if (!b.real()) rotations.emplace_back(off, b.im.to_double() / s);
    off += b.dim();
  }
  auto make = [rotations](double sign) {
    return [rotations, sign](const Vec& x) -> Vec {
      Vec y = x;
      for (auto [o, c] : rotations) {
        Vec p = x.segment(o, 2);
        double r = p.norm();
        if (r > 0.0) y.segment(o, 2) = detail::rotate_pairs(p, 1, sign * c * std::log(r));
      }
      return y;
    };
  };
  HomeoMap h;
  h.forward = make(1.0);
  h.inverse = make(-1.0);
  h.source = spec;
  std::vector<JordanBlock> tb(spec.dim(), JordanBlock(1, a0, 0));
  h.target = GeneratorSpec(tb);
  h.source_flow = FlowEvaluator(h.source);
  h.target_flow = FlowEvaluator(h.target);
  h.construction = "single-exponent";
  h.params["a0"] = a0.to_double();
  return h;
}

// Self-conjugacy of diag[-2,-1]: x -> (x_2^2 f(x_1/x_2^2), x_2) with f(t) = t + c.
inline HomeoMap build_h_f(double c) {
  HomeoMap h;
  auto make = [](double k) {
    return [k](const Vec& x) -> Vec {
      Vec y = x;
      if (x(1) != 0.0) y(0) = x(0) + k * x(1) * x(1);
      return y;
    };
  };
  h.forward = make(c);
  h.inverse = make(-c);
  h.source = h.target = GeneratorSpec{{1, -2, 0}, {1, -1, 0}};
  h.source_flow = h.target_flow = FlowEvaluator(h.source);
  h.construction = "h_f";
  h.params["c"] = c;
  return h;
}

// Pointwise Lipschitz conjugacy of a hyperbolic flow to diag[-I, I], with the
// norm taken from Lyapunov matrices of the stable and unstable factors.
inline HomeoMap build_pw_conj_hyperbolic(const GeneratorSpec& spec) {
  if (spec.empty() || !is_hyperbolic(spec)) throw PreconditionError("NotHyperbolic", "spec has a central part");
  struct Data {
    FlowEvaluator fs, fu;
    Mat Gs, Gu, As, Au;
    int ds = 0, du = 0;
    int attempts = 0;
  };
  auto D = std::make_shared<Data>();
  D->fs = FlowEvaluator(subspec(spec, Part::S));
  D->fu = FlowEvaluator(subspec(spec, Part::U));
  D->ds = D->fs.dim();
  D->du = D->fu.dim();
  D->As = D->fs.generator();
  D->Au = D->fu.generator();

  // G from the Lyapunov equation; certify G, B and C positive definite.
  // Q = I first, then chain weights q = 4^k which make C = -2(A^T Q + Q A) definite.
  auto certify = [&](const Mat& A, const FlowEvaluator& f, double sign, Mat& G) {
    if (A.rows() == 0) return true;
    for (int k = 0; k < 8; ++k) {
      Mat Q = k == 0 ? Mat::Identity(A.rows(), A.cols()) : detail::chain_weights(f, std::pow(4.0, k));
      Mat As = sign * A;  // stable representative
      Mat Gk = detail::lyapunov_solve(As, Q);
      Mat B = -(Gk * As + As.transpose() * Gk);
      Mat C = Gk * As * As + 2.0 * As.transpose() * Gk * As + As.transpose() * As.transpose() * Gk;
      D->attempts = std::max(D->attempts, k + 1);
      if (detail::positive_definite(Gk) && detail::positive_definite(B) && detail::positive_definite(C)) {
        G = Gk;
        return true;
      }
    }
    return false;
  };
  if (!certify(D->As, D->fs, 1.0, D->Gs) || !certify(D->Au, D->fu, -1.0, D->Gu))
    throw NumericalError("DefinitenessCheckFailed", "no certified Lyapunov matrix after 8 attempts");

  auto split = [D](const Vec& x) { return std::make_pair(x.head(D->ds).eval(), x.tail(D->du).eval()); };
  auto nrm2 = [D](const Vec& y, const Vec& z) {
    double a = D->ds ? y.dot(D->Gs * y) : 0.0, b = D->du ? z.dot(D->Gu * z) : 0.0;
    return a + b;
  };
  // Unit-sphere representative of an orbit in one factor.
  auto unit_time_s = [D](const Vec& y) {
    return detail::root_increasing(
        [&](double t) { return -std::log(detail::gnorm(D->Gs, D->fs.apply_unchecked(t, y))); });
  };
  auto unit_time_u = [D](const Vec& z) {
    return detail::root_increasing(
        [&](double t) { return std::log(detail::gnorm(D->Gu, D->fu.apply_unchecked(t, z))); });
  };
  // Time of minimal norm on a mixed orbit.
  auto min_time = [D](const Vec& y, const Vec& z) {
    return detail::root_increasing([&](double t) {
      Vec yt = D->fs.apply_unchecked(t, y), zt = D->fu.apply_unchecked(t, z);
      return yt.dot(D->Gs * D->As * yt) + zt.dot(D->Gu * D->Au * zt);
    });
  };
  auto flow = [D](double t, const Vec& y, const Vec& z) {
    return std::make_pair(D->fs.apply_unchecked(t, y), D->fu.apply_unchecked(t, z));
  };

  HomeoMap h;
  h.forward = [=](const Vec& x) -> Vec {
    auto [y, z] = split(x);
    Vec out = Vec::Zero(x.size());
    const bool ys = y.size() && y.norm() > 0.0, zs = z.size() && z.norm() > 0.0;
    if (!ys && !zs) return out;
    const double r2 = nrm2(y, z);
    if (!zs) {
      out.head(D->ds) = std::sqrt(r2) * D->fs.apply_unchecked(unit_time_s(y), y);
      return out;
    }
    if (!ys) {
      out.tail(D->du) = std::sqrt(r2) * D->fu.apply_unchecked(unit_time_u(z), z);
      return out;
    }
    const double T = min_time(y, z);
    auto [yT, zT] = flow(T, y, z);
    const double m2 = nrm2(yT, zT);
    const double sg = T > 0 ? 1.0 : (T < 0 ? -1.0 : 0.0);
    out.head(D->ds) = std::sqrt(0.5 * detail::branch(r2, m2, sg)) * D->fs.apply_unchecked(unit_time_s(y), y);
    out.tail(D->du) = std::sqrt(0.5 * detail::branch(r2, m2, -sg)) * D->fu.apply_unchecked(unit_time_u(z), z);
    return out;
  };

  h.inverse = [=](const Vec& w) -> Vec {
    auto [p, q] = split(w);
    const double np = D->ds ? detail::gnorm(D->Gs, p) : 0.0, nq = D->du ? detail::gnorm(D->Gu, q) : 0.0;
    Vec out = Vec::Zero(w.size());
    if (np == 0.0 && nq == 0.0) return out;
    const double R = std::sqrt(np * np + nq * nq);
    if (nq == 0.0) {
      Vec us = p / np;  // find y on this orbit with |y| = R
      double s = detail::root_increasing(
          [&](double t) { return std::log(R) - std::log(detail::gnorm(D->Gs, D->fs.apply_unchecked(t, us))); });
      out.head(D->ds) = D->fs.apply_unchecked(s, us);
      return out;
    }
    if (np == 0.0) {
      Vec uu = q / nq;
      double s = detail::root_increasing(
          [&](double t) { return std::log(detail::gnorm(D->Gu, D->fu.apply_unchecked(t, uu))) - std::log(R); });
      out.tail(D->du) = D->fu.apply_unchecked(s, uu);
      return out;
    }
    const Vec us = p / np, uu = q / nq;
    const double m2 = 2.0 * np * nq;  // minimal squared norm of the target orbit
    // Orbit through (us, Phi_delta uu): its minimal norm increases with delta.
    auto orbit_min2 = [&](double delta) {
      Vec z = D->fu.apply_unchecked(delta, uu);
      double T = min_time(us, z);
      auto [yT, zT] = flow(T, us, z);
      return nrm2(yT, zT);
    };
    double delta = detail::root_increasing([&](double d) { return std::log(orbit_min2(d)) - std::log(m2); });
    Vec z0 = D->fu.apply_unchecked(delta, uu);
    const double T0 = min_time(us, z0);
    auto [ys, zs] = flow(T0, us, z0);  // on the cone
    double s = 0.0;
    if (np > nq) {
      // go backward from the cone until the norm is R
      s = -detail::root_increasing_from_zero([&](double t) {
        auto [a, b] = flow(-t, ys, zs);
        return std::log(nrm2(a, b)) - 2.0 * std::log(R);
      });
    } else if (np < nq) {
      s = detail::root_increasing_from_zero([&](double t) {
        auto [a, b] = flow(t, ys, zs);
        return std::log(nrm2(a, b)) - 2.0 * std::log(R);
      });
    }
    auto [y, z] = flow(s, ys, zs);
    out.head(D->ds) = y;
    out.tail(D->du) = z;
    return out;
  };

  h.tau = [=](const Vec& x, double t) -> double {
    auto [y, z] = split(x);
    const bool ys = y.size() && y.norm() > 0.0, zs = z.size() && z.norm() > 0.0;
    if (!ys && !zs) return t;
    auto [yt, zt] = flow(t, y, z);
    const double r2 = nrm2(y, z), rt2 = nrm2(yt, zt);
    if (!zs) return 0.5 * std::log(r2 / rt2);
    if (!ys) return 0.5 * std::log(rt2 / r2);
    const double T = min_time(y, z);
    auto [yT, zT] = flow(T, y, z);
    const double m2 = nrm2(yT, zT);
    auto sg = [](double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); };
    double num = detail::branch(r2, m2, sg(T));
    double den = detail::branch(rt2, m2, sg(T - t));
    return 0.5 * std::log(num / den);
  };

  h.source = spec;
  auto dims = decomposition_dims(spec);
  std::vector<JordanBlock> tb;
  for (int i = 0; i < dims.d_S; ++i) tb.emplace_back(1, -1, 0);
  for (int i = 0; i < dims.d_U; ++i) tb.emplace_back(1, 1, 0);
  h.target = GeneratorSpec(tb);
  h.source_flow = FlowEvaluator(spec);
  h.target_flow = FlowEvaluator(h.target);
  h.construction = "pw-hyp";
  h.params["lyapunov_attempts"] = D->attempts;
  return h;
}

// x -> R_m(b T(x)) x where |Phi_{T(x)} x|_G = 1, source J_m(a+ib),
// target diag[J_m(a), J_m(a)].
inline HomeoMap build_lem66_map(int m, double a, double b) {
  if (m < 1 || a == 0.0 || b == 0.0) throw PreconditionError("PreconditionViolated", "need m >= 1, a != 0, b != 0");
  FlowEvaluator src(std::vector<FlowBlock>{{m, a, b}});
  FlowEvaluator tgt(std::vector<FlowBlock>{{m, a, 0.0}, {m, a, 0.0}});
  const Mat A = src.generator();
  double g = 1.0;
  Mat G;
  bool ok = false;
  for (int k = 0; k <= 40; ++k, g *= 2.0) {
    G = detail::chain_weights(src, g);
    Mat S = G * A + A.transpose() * G;  // d/dt |Phi_t x|_G^2 = x^T S x
    if (detail::positive_definite(a < 0 ? Mat(-S) : S)) {
      ok = true;
      break;
    }
  }
  if (!ok) throw NumericalError("MonotonicityNotAchieved", "no weight g after 40 doublings");
  auto T = [src, G, a](const Vec& x) {
    return detail::root_increasing([&](double t) {
      double l = std::log(detail::gnorm(G, src.apply_unchecked(t, x)));
      return a < 0 ? -l : l;
    });
  };
  HomeoMap h;
  h.forward = [T, m, b](const Vec& x) -> Vec {
    if (x.norm() == 0.0) return x;
    return detail::rotate_pairs(x, m, b * T(x));
  };
  h.inverse = [T, m, b](const Vec& w) -> Vec {
    if (w.norm() == 0.0) return w;
    return detail::rotate_pairs(w, m, -b * T(w));
  };
  h.source_flow = src;
  h.target_flow = tgt;
  Rational ar = best_rational(a, 1 << 20), br = best_rational(std::abs(b), 1 << 20);
  h.source = GeneratorSpec{{m, ar, br}};
  h.target = GeneratorSpec{{m, ar, 0}, {m, ar, 0}};
  h.construction = "lem66";
  h.params = {{"m", m}, {"a", a}, {"b", b}, {"g", g}};
  return h;
}

}  // namespace linflow
