#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "linflow/homeo.hpp"
#include "linflow/random.hpp"

namespace linflow {

struct ProbeReport {
  std::string quantity;
  std::string schedule;
  double estimate = 0.0;
  std::vector<double> grid;    // schedule points (times, radii, ...)
  std::vector<double> series;  // estimate per schedule point
  std::string notes;

  nlohmann::json to_json() const {
    return {{"quantity", quantity}, {"schedule", schedule}, {"estimate", estimate},
            {"grid", grid},         {"series", series},     {"notes", notes}};
  }
};

inline std::vector<double> linear_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return g;
}

inline std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return g;
}

// Sample points: uniform directions, radii log-uniform in [0.1, 3].
inline std::vector<Vec> sample_points(int d, int n, std::uint64_t seed, double rlo = 0.1, double rhi = 3.0) {
  Sampler S(seed);
  std::vector<Vec> pts;
  for (int i = 0; i < n; ++i) pts.push_back(std::exp(S.uniform(std::log(rlo), std::log(rhi))) * S.unit(d));
  return pts;
}

// max |h(Phi_t x) - Psi_{tau_x(t)} h(x)| / (1 + |Psi_{tau_x(t)} h(x)|)
inline ProbeReport verify_conjugacy(const HomeoMap& h, const std::vector<double>& t_grid, int samples,
                                    std::uint64_t seed) {
  ProbeReport rep;
  rep.quantity = "conjugacy residual";
  rep.schedule = std::to_string(samples) + " samples (radius log-uniform in [0.1,3]) x " +
                 std::to_string(t_grid.size()) + " times";
  rep.grid = t_grid;
  auto pts = sample_points(h.dim(), samples, seed);
  std::vector<Vec> hx;
  for (const auto& x : pts) hx.push_back(h.forward(x));
  for (double t : t_grid) {
    double worst = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      Vec lhs = h.forward(h.source_flow.apply_unchecked(t, pts[i]));
      Vec rhs = h.target_flow.apply_unchecked(h.tau(pts[i], t), hx[i]);
      worst = std::max(worst, (lhs - rhs).stableNorm() / (1.0 + rhs.stableNorm()));
    }
    rep.series.push_back(worst);
    rep.estimate = std::max(rep.estimate, worst);
  }
  return rep;
}

// max |h(h^{-1}(x)) - x| / (1 + |x|) on the same kind of samples.
inline ProbeReport verify_inverse(const HomeoMap& h, int samples, std::uint64_t seed) {
  ProbeReport rep;
  rep.quantity = "inverse residual";
  rep.schedule = std::to_string(samples) + " samples (radius log-uniform in [0.1,3])";
  for (const auto& x : sample_points(h.dim(), samples, seed)) {
    double e = std::max((h.forward(h.inverse(x)) - x).stableNorm(), (h.inverse(h.forward(x)) - x).stableNorm());
    rep.estimate = std::max(rep.estimate, e / (1.0 + x.stableNorm()));
  }
  return rep;
}

struct LipschitzOptions {
  int kmax = 40;                // radii 2^{-k}, k = 1..kmax
  int pairs = 16;               // random pairs per radius
  bool mirror_pairs = true;     // reflections across coordinate planes
  int mirror_angles = 32;
  bool include_inverse = true;
  std::uint64_t seed = 1;
};

struct LipschitzReport {
  std::vector<double> radii;
  std::vector<double> uniform;    // (|h x - h y| + |h^-1 x - h^-1 y|) / |x - y|
  std::vector<double> pointwise;  // (|h x| + |h^-1 x|) / |x|
  bool uniform_growing = false;
  bool pointwise_growing = false;
  std::string schedule;

  nlohmann::json to_json() const {
    auto trend = [](bool g) { return g ? "growing" : "bounded"; };
    return {{"quantity", "Lipschitz ratios"}, {"schedule", schedule},
            {"radii", radii},                 {"uniform", uniform},
            {"pointwise", pointwise},         {"uniform_trend", trend(uniform_growing)},
            {"pointwise_trend", trend(pointwise_growing)}};
  }
};

// Growth over the last ten radii: least-squares slope against k, relative
// to the mean, above 1% per step with a net rise above 5%.
inline bool growing_tail(const std::vector<double>& v) {
  const std::size_t n = std::min<std::size_t>(10, v.size());
  if (n < 3) return false;
  std::vector<double> tail(v.end() - n, v.end());
  double mk = (n - 1) / 2.0, mv = 0.0;
  for (double x : tail) mv += x;
  mv /= n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (i - mk) * (tail[i] - mv);
    den += (i - mk) * (i - mk);
  }
  double slope = num / den;
  return mv > 0 && slope / mv > 0.01 && tail.back() > 1.05 * tail.front();
}

inline LipschitzReport lipschitz_probe(const HomeoMap& h, const LipschitzOptions& opt = {}) {
  const int d = h.dim();
  Sampler S(opt.seed);
  // One unit pattern reused at every radius so the trend is not sampling noise.
  std::vector<std::pair<Vec, Vec>> pattern;
  for (int i = 0; i < opt.pairs; ++i) {
    Vec x = S.unit(d);
    Vec y = x + 0.3 * S.unit(d);
    pattern.emplace_back(x, y);
  }
  if (opt.mirror_pairs) {
    auto angles = log_grid(1e-4, 0.78, opt.mirror_angles);
    for (int i = 0; i < d; ++i)
      for (int l = i + 1; l < d; ++l)
        for (double psi : angles) {
          Vec x = Vec::Zero(d), y = Vec::Zero(d);
          x(i) = y(i) = std::cos(psi);
          x(l) = std::sin(psi);
          y(l) = -std::sin(psi);
          pattern.emplace_back(x, y);
        }
  }
  LipschitzReport rep;
  rep.schedule = "r_k = 2^-k, k = 1.." + std::to_string(opt.kmax) + "; " + std::to_string(pattern.size()) +
                 " pairs per radius (" + std::to_string(opt.pairs) + " random, rest coordinate-plane mirrors)";
  for (int k = 1; k <= opt.kmax; ++k) {
    const double r = std::ldexp(1.0, -k);
    double uni = 0.0, pw = 0.0;
    for (const auto& [u, v] : pattern) {
      Vec x = r * u, y = r * v;
      Vec hx = h.forward(x), hy = h.forward(y);
      Vec ix = opt.include_inverse ? h.inverse(x) : Vec::Zero(d);
      Vec iy = opt.include_inverse ? h.inverse(y) : Vec::Zero(d);
      uni = std::max(uni, ((hx - hy).stableNorm() + (ix - iy).stableNorm()) / (x - y).stableNorm());
      pw = std::max(pw, (hx.stableNorm() + ix.stableNorm()) / x.stableNorm());
      pw = std::max(pw, (hy.stableNorm() + iy.stableNorm()) / y.stableNorm());
    }
    rep.radii.push_back(r);
    rep.uniform.push_back(uni);
    rep.pointwise.push_back(pw);
  }
  rep.uniform_growing = growing_tail(rep.uniform);
  rep.pointwise_growing = growing_tail(rep.pointwise);
  return rep;
}

// Ratio |h(y_n) - h(z_n)| / |y_n - z_n| along y_n, z_n = n e^{-n} e_1 +- a e^{-n} e_2,
// divided by n; the maximum over the n-grid estimates the growth slope.
inline ProbeReport witness_slope_probe(const HomeoMap& h, double a, const std::vector<double>& n_grid) {
  ProbeReport rep;
  rep.quantity = "ratio/n along the two-point witness sequence";
  rep.schedule = "n-grid";
  rep.grid = n_grid;
  const int d = h.dim();
  for (double n : n_grid) {
    Vec y = Vec::Zero(d), z = Vec::Zero(d);
    y(0) = z(0) = n * std::exp(-n);
    y(1) = a * std::exp(-n);
    z(1) = -a * std::exp(-n);
    double ratio = (h.forward(y) - h.forward(z)).stableNorm() / (y - z).stableNorm();
    rep.series.push_back(ratio / n);
    rep.estimate = std::max(rep.estimate, ratio / n);
  }
  return rep;
}

struct DistortionReport {
  bool predicted_member = false;  // x in the distortion subspace
  double step1 = 0.0;             // decay test, smallest ball
  double step2 = 0.0;             // witness test, min over the two schedules
  double delta = 0.05;
  std::string verdict;            // distorting / non-distorting / inconclusive
  std::vector<double> grid;
  std::vector<double> step1_by_radius;
  std::string notes;

  bool distorting() const { return verdict == "distorting"; }

  nlohmann::json to_json() const {
    return {{"quantity", "distortion ratios"},
            {"predicted_member", predicted_member},
            {"step1_estimate", step1},
            {"step1_by_radius", step1_by_radius},
            {"step2_estimate", step2},
            {"delta", delta},
            {"verdict", verdict},
            {"grid", grid},
            {"notes", notes}};
  }
};

// Both tests run on every point; the verdict is whichever one fires.
// limsup estimates take the maximum over the tail t >= T_max/4 of a
// logarithmic grid on [1, T_max].
inline DistortionReport distortion_probe(const GeneratorSpec& spec, const Vec& x, double delta = 0.05,
                                         double T_max = 200.0, std::uint64_t seed = 7) {
  if (spec.empty() || !is_stable(spec)) throw PreconditionError("NotStable", "distortion probe needs a stable spec");
  if (x.size() != spec.dim()) throw PreconditionError("DimMismatch", "vector length differs from spec dim");
  if (T_max > kTimeGuard || T_max < 8) throw PreconditionError("RangeGuard", "T_max must lie in [8, 1e3]");
  DistortionReport rep;
  rep.delta = delta;
  rep.predicted_member = distortion_subspace(spec).contains(x);
  FlowEvaluator F(spec);
  const int GRID = 400;
  rep.grid = log_grid(1.0, T_max, GRID);
  auto tail_max = [&](auto&& ratio_at) {
    double best = 0.0;
    for (double t : rep.grid)
      if (t >= T_max / 4) best = std::max(best, ratio_at(t));
    return best;
  };

  // Step I: y = x + eps v on shrinking balls; numerator uses linearity.
  Sampler S(seed);
  std::vector<Vec> dirs;
  for (int i = 0; i < 16; ++i) dirs.push_back(S.unit(spec.dim()));
  const double xn = std::max(x.stableNorm(), 1e-300);
  for (double f : {1e-1, 1e-2, 1e-3}) {
    double eps = f * xn, worst = 0.0;
    for (const auto& v : dirs) {
      Vec y = x + eps * v;
      worst = std::max(worst, tail_max([&](double t) {
        return F.apply_unchecked(t, eps * v).stableNorm() / F.apply_unchecked(t, y).stableNorm();
      }));
    }
    rep.step1_by_radius.push_back(worst);
  }
  rep.step1 = rep.step1_by_radius.back();

  // Step II witness on the top block (largest exponent, largest size).
  const Rational lam = top_exponent(spec);
  const int mt = top_m(spec);
  std::size_t j1 = 0;
  for (std::size_t j = 0; j < spec.size(); ++j)
    if (spec.blocks()[j].re == lam && spec.blocks()[j].m == mt) j1 = j;
  const auto& B1 = spec.blocks()[j1];
  const int off = spec.offset(j1), m = B1.m;
  const double eps = 0.5;
  Vec y = x;
  Vec px = x.segment(off, B1.dim());
  auto Kpow = [&](const Vec& v, int k) {  // K^k on one block: shift chains down by k
    Vec w = Vec::Zero(v.size());
    const int chains = B1.real() ? 1 : 2;
    for (int c = 0; c < chains; ++c)
      for (int i = 0; i + k < m; ++i) w(c * m + i) = v(c * m + i + k);
    return w;
  };
  if (px.stableNorm() == 0.0) {
    y(off + m - 1) += eps / 2;
    rep.notes = "P_1 x = 0: y = x + (eps/2) e_m";
  } else {
    int k = 0;
    for (int j = 0; j <= m - 1; ++j)
      if (Kpow(px, j).stableNorm() > 0.0) k = j;
    Vec w = Kpow(px, k);  // lives on the chain heads u_1 (and v_1)
    double theta = B1.real() ? 0.0 : std::atan2(w(m), w(0));
    double nu = B1.real() ? (w(0) > 0 ? 1.0 : -1.0) : 1.0;
    y(off + m - 1) -= eps / 2 * nu * std::cos(theta);
    if (!B1.real()) y(off + 2 * m - 1) -= eps / 2 * nu * std::sin(theta);
    rep.notes = "witness y = x - (eps/2) nu R(theta) e_m, chain index k = " + std::to_string(k);
  }
  double lgm = std::lgamma(static_cast<double>(m));  // log (m-1)!
  auto rho2 = [&](double t) { return t - (m - 1) * std::log(t) + lgm; };
  auto ratio = [&](double t, double rho) {
    Vec num = F.apply_unchecked(t, x) - F.apply_unchecked(rho, y);
    return num.stableNorm() / F.apply_unchecked(rho, y).stableNorm();
  };
  double s1 = tail_max([&](double t) { return ratio(t, t); });
  double s2 = 0.0;
  const double b1 = B1.im.to_double();
  if (m >= 2 && b1 != 0.0) {
    // admissible times: b_1 (rho(t) - t) in 2 pi Z
    std::vector<double> adm;
    const double tp = 6.283185307179586;
    for (int n = -100000; n <= 100000; ++n) {
      double t = std::exp((lgm - tp * n / b1) / (m - 1));
      if (t >= T_max / 4 && t <= T_max) adm.push_back(t);
    }
    if (!adm.empty()) {
      for (double t : adm) s2 = std::max(s2, ratio(t, rho2(t)));
      rep.notes += "; rho-schedule snapped to " + std::to_string(adm.size()) + " admissible times";
    } else {
      s2 = tail_max([&](double t) { return ratio(t, rho2(t)); });
      rep.notes += "; no admissible snapped times in the tail window, unsnapped grid used";
    }
  } else {
    s2 = tail_max([&](double t) { return ratio(t, rho2(t)); });
  }
  rep.step2 = std::min(s1, s2);

  const bool dist = rep.step2 >= 0.45, decays = rep.step1 < delta;
  rep.verdict = dist == decays ? "inconclusive" : (dist ? "distorting" : "non-distorting");
  return rep;
}

struct DecayEstimate {
  double s_fit = 0.0, m_fit = 0.0;
  Rational s;
  int m = 0;
};

// Fit log|Phi_t x| = s t + m log t + c on a window, then snap s to the
// nearest breakpoint and m to the nearest integer.
inline DecayEstimate decay_rate_probe(const GeneratorSpec& spec, const Vec& x, double t0 = 50.0, double t1 = 200.0,
                                      int samples = 64) {
  if (spec.empty() || !is_stable(spec)) throw PreconditionError("NotStable", "decay probe needs a stable spec");
  FlowEvaluator F(spec);
  Mat X(samples, 3);
  Vec yv(samples);
  auto ts = linear_grid(t0, t1, samples);
  for (int i = 0; i < samples; ++i) {
    X(i, 0) = ts[i];
    X(i, 1) = std::log(ts[i]);
    X(i, 2) = 1.0;
    yv(i) = std::log(F(ts[i], x).stableNorm());
  }
  Vec c = X.colPivHouseholderQr().solve(yv);
  DecayEstimate e;
  e.s_fit = c(0);
  e.m_fit = c(1);
  auto rd = refined_dims(spec);
  double best = 1e300;
  for (const auto& s : rd.breakpoints)
    if (std::abs(s.to_double() - e.s_fit) < best) {
      best = std::abs(s.to_double() - e.s_fit);
      e.s = s;
    }
  e.m = static_cast<int>(std::lround(e.m_fit));
  return e;
}

// Smallest T > 0 with |Phi_T x - x| < 1e-9 (1 + |x|); 0 for fixed points.
inline std::optional<double> period_probe(const GeneratorSpec& spec, const Vec& x, double T_max) {
  if (!is_bounded(spec)) throw PreconditionError("NotBounded", "period probe needs a diagonal central spec");
  FlowEvaluator F(spec);
  const double tol = 1e-9 * (1.0 + x.stableNorm());
  auto f = [&](double t) { return (F.apply_unchecked(t, x) - x).stableNorm(); };
  if (f(1.0) < tol && f(std::sqrt(2.0)) < tol && f(std::exp(1.0)) < tol) return 0.0;
  double bmax = 0.0;
  for (const auto& b : spec.blocks()) bmax = std::max(bmax, b.im.to_double());
  const double h = 6.283185307179586 / (64.0 * bmax);
  const int n = static_cast<int>(std::ceil(T_max / h));
  double fm = f(h), f0 = f(2 * h);
  for (int i = 2; i <= n; ++i) {
    double t = (i + 1) * h, fp = f(t);
    if (f0 <= fm && f0 <= fp) {
      // golden section on [t - 2h, t]
      double lo = t - 2 * h, hi = t;
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
      double fc = f(c), fd = f(d);
      while (hi - lo > 1e-13 * std::max(1.0, hi)) {
        if (fc < fd) {
          hi = d; d = c; fd = fc; c = hi - gr * (hi - lo); fc = f(c);
        } else {
          lo = c; c = d; fc = fd; d = lo + gr * (hi - lo); fd = f(d);
        }
      }
      double tb = 0.5 * (lo + hi);
      if (f(tb) < tol && tb <= T_max) return tb;
    }
    fm = f0;
    f0 = fp;
  }
  return std::nullopt;
}

}  // namespace linflow
