#pragma once

#include <utility>
#include <vector>

#include "linflow/jordan.hpp"

namespace linflow::exact {

inline RationalMatrix identity(int n) {
  RationalMatrix I(n);
  for (int i = 0; i < n; ++i) I(i, i) = 1;
  return I;
}

inline RationalMatrix multiply(const RationalMatrix& A, const RationalMatrix& B) {
  const int n = A.dim();
  RationalMatrix C(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      if (A(i, k).is_zero()) continue;
      for (int j = 0; j < n; ++j)
        if (!B(k, j).is_zero()) C(i, j) += A(i, k) * B(k, j);
    }
  return C;
}

// A - lambda I
inline RationalMatrix shift(const RationalMatrix& A, const Rational& lambda) {
  RationalMatrix B = A;
  for (int i = 0; i < A.dim(); ++i) B(i, i) -= lambda;
  return B;
}

inline int rank(RationalMatrix A) {
  const int n = A.dim();
  int r = 0;
  for (int c = 0; c < n && r < n; ++c) {
    int p = -1;
    for (int i = r; i < n; ++i)
      if (!A(i, c).is_zero()) { p = i; break; }
    if (p < 0) continue;
    if (p != r)
      for (int j = 0; j < n; ++j) std::swap(A(p, j), A(r, j));
    for (int i = r + 1; i < n; ++i) {
      if (A(i, c).is_zero()) continue;
      Rational f = A(i, c) / A(r, c);
      for (int j = c; j < n; ++j)
        if (!A(r, j).is_zero()) A(i, j) -= f * A(r, j);
    }
    ++r;
  }
  return r;
}

// Polynomials are coefficient vectors, lowest degree first, no trailing zeros.
using Poly = std::vector<Rational>;

inline void trim(Poly& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}

// det(x I - A) by Faddeev-LeVerrier.
inline Poly charpoly(const RationalMatrix& A) {
  const int n = A.dim();
  Poly c(n + 1);
  c[n] = 1;
  RationalMatrix Mk(n);
  for (int k = 1; k <= n; ++k) {
    RationalMatrix AM = multiply(A, Mk);
    // M_k = A M_{k-1} + c_{n-k+1} I
    for (int i = 0; i < n; ++i) AM(i, i) += c[n - k + 1];
    Mk = AM;
    RationalMatrix AMk = multiply(A, Mk);
    Rational tr = 0;
    for (int i = 0; i < n; ++i) tr += AMk(i, i);
    c[n - k] = -tr / Rational(k);
  }
  return c;
}

inline Poly derivative(const Poly& p) {
  Poly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * Rational(static_cast<long long>(i)));
  trim(d);
  return d;
}

// Returns (quotient, remainder).
inline std::pair<Poly, Poly> divmod(Poly a, const Poly& b) {
  Poly q;
  if (a.size() >= b.size()) q.assign(a.size() - b.size() + 1, Rational(0));
  while (!a.empty() && a.size() >= b.size()) {
    Rational f = a.back() / b.back();
    std::size_t s = a.size() - b.size();
    q[s] = f;
    for (std::size_t i = 0; i < b.size(); ++i) a[s + i] -= f * b[i];
    a.pop_back();
    trim(a);
  }
  trim(q);
  return {q, a};
}

inline Poly monic(Poly p) {
  trim(p);
  if (p.empty()) return p;
  Rational lc = p.back();
  for (auto& c : p) c /= lc;
  return p;
}

inline Poly gcd(Poly a, Poly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a);
}

inline Rational eval(const Poly& p, const Rational& x) {
  Rational v = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * x + *it;
  return v;
}

// Squarefree part p / gcd(p, p').
inline Poly squarefree(const Poly& p) {
  Poly g = gcd(p, derivative(p));
  return monic(divmod(p, g).first);
}

}  // namespace linflow::exact
