#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "linflow/error.hpp"
#include "linflow/exact_linalg.hpp"
#include "linflow/jordan.hpp"
#include "linflow/spec_io.hpp"

namespace linflow {

struct ApproxSpec {
  GeneratorSpec spec;
  double eigenvalue_residual = 0.0;  // 0 for eigenvalues certified exactly
  double cluster_tolerance = 0.0;
  std::string source;                // FNV-1a fingerprint of the input matrix
  bool exact = false;                // every eigenvalue certified in exact arithmetic
};

struct IngestOptions {
  double tol = 1e-9;
  long long denominator_bound = 1024;
};

namespace detail {

inline std::string fingerprint(const RationalMatrix& M) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : matrix_to_json(M).dump()) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

using cld = std::complex<long double>;

inline std::vector<cld> poly_roots(const exact::Poly& q) {
  const int n = static_cast<int>(q.size()) - 1;
  std::vector<long double> c(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) c[i] = q[i].impl().convert_to<long double>();
  std::vector<cld> roots;
  if (n < 1) return roots;
  if (n == 1) {
    roots.emplace_back(-c[0] / c[1], 0.0L);
    return roots;
  }
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) C(i, n - 1) = static_cast<double>(-c[i] / c[n]);
  Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
  if (es.info() != Eigen::Success) throw NumericalError("EigenFailure", "companion eigenvalues did not converge");
  for (int i = 0; i < n; ++i) {
    cld z(es.eigenvalues()[i].real(), es.eigenvalues()[i].imag());
    // Newton polish; roots of a squarefree polynomial are simple.
    for (int it = 0; it < 8; ++it) {
      cld p = 0, dp = 0;
      for (int k = n; k >= 0; --k) {
        dp = dp * z + p;
        p = p * z + c[k];
      }
      if (std::abs(dp) == 0.0L) break;
      cld step = p / dp;
      z -= step;
      if (std::abs(step) <= 1e-30L * (1.0L + std::abs(z))) break;
    }
    roots.push_back(z);
  }
  return roots;
}

// Complex nullity of (M - lambda I)^k, numerically.
inline int numeric_nullity(const Eigen::MatrixXd& M, std::complex<double> lambda, int k, double tol) {
  const int n = static_cast<int>(M.rows());
  Eigen::MatrixXcd B = M.cast<std::complex<double>>();
  B.diagonal().array() -= lambda;
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(n, n);
  for (int i = 0; i < k; ++i) P = P * B;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(P);
  const auto& s = svd.singularValues();
  double thresh = tol * std::max(1.0, s.size() ? s(0) : 0.0);
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > thresh) ++r;
  return n - r;
}

}  // namespace detail

// Recover the real Jordan structure of a rational matrix. Eigenvalues are
// located numerically on the squarefree part of the characteristic polynomial
// (so defective eigenvalues do not smear), snapped to rationals, and then the
// rank sequence is evaluated exactly whenever the snapped value is a true
// eigenvalue; otherwise it falls back to a numerical rank with the same tol.
inline ApproxSpec spec_from_matrix(const RationalMatrix& M, const IngestOptions& opt = {}) {
  if (!(opt.tol > 0)) throw PreconditionError("BadTolerance", "tol must be positive");
  const int n = M.dim();
  if (n < 1) throw PreconditionError("EmptyMatrix", "matrix must be nonempty");
  const double tol = opt.tol;

  exact::Poly p = exact::charpoly(M);
  exact::Poly q = exact::squarefree(p);
  auto roots = detail::poly_roots(q);

  // Keep one representative per conjugate pair.
  std::vector<std::complex<double>> reps;
  int upper = 0, lower = 0;
  for (const auto& z : roots) {
    std::complex<double> w(static_cast<double>(z.real()), static_cast<double>(z.imag()));
    if (w.imag() > tol) ++upper;
    if (w.imag() < -tol) { ++lower; continue; }
    if (std::abs(w.imag()) <= tol) w.imag(0.0);
    reps.push_back(w);
  }
  if (upper != lower) throw IngestError(IngestError::Kind::ClusterAmbiguity, "unpaired complex eigenvalues");

  // Single-linkage clusters within tol.
  std::vector<std::vector<std::complex<double>>> clusters;
  std::vector<int> label(reps.size(), -1);
  for (std::size_t i = 0; i < reps.size(); ++i) {
    if (label[i] >= 0) continue;
    label[i] = static_cast<int>(clusters.size());
    std::vector<std::size_t> stack{i};
    clusters.emplace_back();
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      clusters.back().push_back(reps[u]);
      for (std::size_t v = 0; v < reps.size(); ++v)
        if (label[v] < 0 && std::abs(reps[u] - reps[v]) <= tol) {
          label[v] = label[i];
          stack.push_back(v);
        }
    }
  }
  for (std::size_t i = 0; i < reps.size(); ++i)
    for (std::size_t j = 0; j < reps.size(); ++j)
      if (label[i] != label[j] && std::abs(reps[i] - reps[j]) <= 3 * tol)
        throw IngestError(IngestError::Kind::ClusterAmbiguity,
                          "eigenvalue clusters within 2*tol of merging");

  Eigen::MatrixXd Md = M.to_eigen();
  std::vector<JordanBlock> blocks;
  double residual = 0.0;
  bool all_exact = true;
  int total = 0;
  for (const auto& cl : clusters) {
    std::complex<double> c(0, 0);
    for (auto z : cl) c += z;
    c /= static_cast<double>(cl.size());
    Rational a = best_rational(c.real(), opt.denominator_bound);
    Rational b = c.imag() > 0 ? best_rational(c.imag(), opt.denominator_bound) : Rational(0);
    double ea = std::abs(a.to_double() - c.real()), eb = std::abs(b.to_double() - c.imag());
    if (ea > tol || eb > tol)
      throw IngestError(IngestError::Kind::SnapFailure,
                        "no rational with denominator <= " + std::to_string(opt.denominator_bound) +
                            " within tol of eigenvalue " + std::to_string(c.real()) + "+" +
                            std::to_string(c.imag()) + "i");
    if (!b.is_zero() && b.sign() <= 0) throw IngestError(IngestError::Kind::SnapFailure, "imaginary part snapped to 0");

    bool exact_root;
    if (b.is_zero()) {
      exact_root = exact::eval(q, a).is_zero();
    } else {
      exact::Poly quad{a * a + b * b, Rational(-2) * a, Rational(1)};
      exact_root = exact::divmod(q, quad).second.empty();
    }

    // nullity[k] in complex dimensions of ker (M - lambda)^k.
    std::vector<int> nullity{0};
    if (exact_root) {
      RationalMatrix B = exact::shift(M, a);
      if (!b.is_zero()) {
        B = exact::multiply(B, B);
        for (int i = 0; i < n; ++i) B(i, i) += b * b;
      }
      RationalMatrix P = B;
      const int per = b.is_zero() ? 1 : 2;
      while (true) {
        int nl = (n - exact::rank(P)) / per;
        if (nl == nullity.back()) break;
        nullity.push_back(nl);
        if (static_cast<int>(nullity.size()) > n + 1) break;
        P = exact::multiply(P, B);
      }
    } else {
      all_exact = false;
      residual = std::max(residual, std::max(ea, eb));
      std::complex<double> lam(a.to_double(), b.to_double());
      for (int k = 1; k <= n; ++k) {
        int nl = detail::numeric_nullity(Md, lam, k, tol);
        if (nl == nullity.back()) break;
        nullity.push_back(nl);
      }
    }
    if (nullity.size() < 2)
      throw IngestError(IngestError::Kind::StructureMismatch, "eigenvalue " + a.str() + "+" + b.str() +
                                                                  "i has trivial eigenspace at tolerance");
    const int K = static_cast<int>(nullity.size()) - 1;
    for (int k = 1; k <= K; ++k) {
      int at_least_k = nullity[k] - nullity[k - 1];
      int at_least_k1 = k < K ? nullity[k + 1] - nullity[k] : 0;
      for (int c2 = 0; c2 < at_least_k - at_least_k1; ++c2) blocks.emplace_back(k, a, b);
    }
    total += nullity[K] * (b.is_zero() ? 1 : 2);
  }
  if (total != n)
    throw IngestError(IngestError::Kind::StructureMismatch,
                      "recovered block dimensions sum to " + std::to_string(total) + ", expected " +
                          std::to_string(n));
  ApproxSpec out;
  out.spec = GeneratorSpec(std::move(blocks));
  out.eigenvalue_residual = residual;
  out.cluster_tolerance = tol;
  out.source = detail::fingerprint(M);
  out.exact = all_exact;
  return out;
}

}  // namespace linflow
