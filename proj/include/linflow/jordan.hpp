#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "linflow/error.hpp"
#include "linflow/rational.hpp"

namespace linflow {

// One real Jordan block J_m(a+ib). A conjugate pair is stored once, b >= 0.
struct JordanBlock {
  int m = 1;
  Rational re;
  Rational im;

  JordanBlock() = default;
  JordanBlock(int size, Rational a, Rational b = 0) : m(size), re(std::move(a)), im(abs(b)) {
    if (size < 1) throw std::invalid_argument("block size must be positive");
  }

  bool real() const { return im.is_zero(); }
  int d() const { return real() ? 1 : 2; }
  int dim() const { return m * d(); }

  friend bool operator==(const JordanBlock& x, const JordanBlock& y) {
    return x.m == y.m && x.re == y.re && x.im == y.im;
  }
  friend bool operator!=(const JordanBlock& x, const JordanBlock& y) { return !(x == y); }
  // Canonical order: real part, then imaginary part, then size.
  friend bool operator<(const JordanBlock& x, const JordanBlock& y) {
    if (x.re != y.re) return x.re < y.re;
    if (x.im != y.im) return x.im < y.im;
    return x.m < y.m;
  }
};

// Multiset of real Jordan blocks, kept sorted so equality is multiset equality.
class GeneratorSpec {
 public:
  GeneratorSpec() = default;
  explicit GeneratorSpec(std::vector<JordanBlock> blocks) : blocks_(std::move(blocks)) {
    std::sort(blocks_.begin(), blocks_.end());
  }
  GeneratorSpec(std::initializer_list<JordanBlock> blocks)
      : GeneratorSpec(std::vector<JordanBlock>(blocks)) {}

  const std::vector<JordanBlock>& blocks() const { return blocks_; }
  std::size_t size() const { return blocks_.size(); }
  bool empty() const { return blocks_.empty(); }

  int dim() const {
    int n = 0;
    for (const auto& b : blocks_) n += b.dim();
    return n;
  }

  // Coordinate offset of block j in the materialized layout.
  int offset(std::size_t j) const {
    int n = 0;
    for (std::size_t i = 0; i < j; ++i) n += blocks_[i].dim();
    return n;
  }

  friend bool operator==(const GeneratorSpec& a, const GeneratorSpec& b) { return a.blocks_ == b.blocks_; }
  friend bool operator!=(const GeneratorSpec& a, const GeneratorSpec& b) { return !(a == b); }

 private:
  std::vector<JordanBlock> blocks_;
};

inline int dim(const GeneratorSpec& s) { return s.dim(); }

// Complex Jordan block of a C-linear generator; im may have either sign.
struct ComplexBlock {
  int m = 1;
  Rational re;
  Rational im;
};

// Represents a generator similar to alpha * A.
inline GeneratorSpec scale_spec(const GeneratorSpec& s, const Rational& alpha) {
  if (alpha.is_zero()) throw PreconditionError("ZeroScaling", "scale_spec requires alpha != 0");
  std::vector<JordanBlock> out;
  out.reserve(s.size());
  Rational mag = abs(alpha);
  for (const auto& b : s.blocks()) out.emplace_back(b.m, alpha * b.re, mag * b.im);
  return GeneratorSpec(std::move(out));
}

inline GeneratorSpec time_reverse(const GeneratorSpec& s) { return scale_spec(s, -1); }

inline GeneratorSpec realify(const std::vector<ComplexBlock>& c) {
  std::vector<JordanBlock> out;
  for (const auto& b : c) {
    if (b.m < 1) throw std::invalid_argument("block size must be positive");
    if (b.im.is_zero()) {
      out.emplace_back(b.m, b.re, 0);
      out.emplace_back(b.m, b.re, 0);
    } else {
      out.emplace_back(b.m, b.re, abs(b.im));
    }
  }
  return GeneratorSpec(std::move(out));
}

// Dense square matrix of rationals, row-major.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  explicit RationalMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n) {}

  int dim() const { return n_; }
  Rational& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  const Rational& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

  Eigen::MatrixXd to_eigen() const {
    Eigen::MatrixXd m(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) m(i, j) = (*this)(i, j).to_double();
    return m;
  }

  friend bool operator==(const RationalMatrix& x, const RationalMatrix& y) {
    return x.n_ == y.n_ && x.a_ == y.a_;
  }

 private:
  int n_ = 0;
  std::vector<Rational> a_;
};

// Block-diagonal real Jordan matrix. Inside a block with b != 0 the
// coordinates are (u_1..u_m, v_1..v_m):  a I + [[J_m, -b I], [b I, J_m]].
inline RationalMatrix materialize(const GeneratorSpec& s) {
  RationalMatrix M(s.dim());
  int off = 0;
  for (const auto& b : s.blocks()) {
    const int m = b.m;
    for (int i = 0; i < b.dim(); ++i) M(off + i, off + i) = b.re;
    for (int i = 0; i + 1 < m; ++i) {
      M(off + i, off + i + 1) = 1;
      if (!b.real()) M(off + m + i, off + m + i + 1) = 1;
    }
    if (!b.real()) {
      for (int i = 0; i < m; ++i) {
        M(off + i, off + m + i) = -b.im;
        M(off + m + i, off + i) = b.im;
      }
    }
    off += b.dim();
  }
  return M;
}

}  // namespace linflow
