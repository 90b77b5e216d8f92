#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "linflow/error.hpp"
#include "linflow/jordan.hpp"

namespace linflow {

// Floating-point block. Unlike JordanBlock the rotation rate keeps its sign,
// so a construction can pin the orientation the formulas were written for.
struct FlowBlock {
  int m = 1;
  double a = 0.0;
  double b = 0.0;
  int dim() const { return b == 0.0 ? m : 2 * m; }
};

inline constexpr double kTimeGuard = 1e3;

// e^{tA} per block as e^{at} R_m(bt) sum_{j<m} t^j/j! K^j.
class FlowEvaluator {
 public:
  FlowEvaluator() = default;
  explicit FlowEvaluator(std::vector<FlowBlock> blocks) : blocks_(std::move(blocks)) {
    for (const auto& b : blocks_) dim_ += b.dim();
  }
  explicit FlowEvaluator(const GeneratorSpec& s) {
    for (const auto& b : s.blocks()) blocks_.push_back({b.m, b.re.to_double(), b.im.to_double()});
    for (const auto& b : blocks_) dim_ += b.dim();
  }

  int dim() const { return dim_; }
  const std::vector<FlowBlock>& blocks() const { return blocks_; }

  Eigen::VectorXd operator()(double t, const Eigen::VectorXd& x) const {
    if (!(std::abs(t) <= kTimeGuard))
      throw PreconditionError("RangeGuard", "|t| must not exceed 1e3, got " + std::to_string(t));
    return apply_unchecked(t, x);
  }

  Eigen::VectorXd apply_unchecked(double t, const Eigen::VectorXd& x) const {
    if (x.size() != dim_) throw PreconditionError("DimMismatch", "vector length differs from flow dimension");
    Eigen::VectorXd y(dim_);
    int off = 0;
    for (const auto& b : blocks_) {
      const int m = b.m;
      const int chains = b.b == 0.0 ? 1 : 2;
      for (int c = 0; c < chains; ++c) {
        const int base = off + c * m;
        for (int i = 0; i < m; ++i) {
          // (K^j x)_i = x_{i+j}
          double acc = 0.0, coef = 1.0;
          for (int j = 0; i + j < m; ++j) {
            acc += coef * x(base + i + j);
            coef *= t / (j + 1);
          }
          y(base + i) = acc;
        }
      }
      const double g = std::exp(b.a * t);
      if (chains == 2) {
        const double cs = std::cos(b.b * t), sn = std::sin(b.b * t);
        for (int i = 0; i < m; ++i) {
          double u = y(off + i), v = y(off + m + i);
          y(off + i) = g * (cs * u - sn * v);
          y(off + m + i) = g * (sn * u + cs * v);
        }
      } else {
        for (int i = 0; i < m; ++i) y(off + i) *= g;
      }
      off += b.dim();
    }
    return y;
  }

  // Generator as a dense matrix, same layout as materialize().
  Eigen::MatrixXd generator() const {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim_, dim_);
    int off = 0;
    for (const auto& b : blocks_) {
      const int m = b.m;
      for (int i = 0; i < b.dim(); ++i) A(off + i, off + i) = b.a;
      for (int i = 0; i + 1 < m; ++i) {
        A(off + i, off + i + 1) = 1.0;
        if (b.b != 0.0) A(off + m + i, off + m + i + 1) = 1.0;
      }
      if (b.b != 0.0)
        for (int i = 0; i < m; ++i) {
          A(off + i, off + m + i) = -b.b;
          A(off + m + i, off + i) = b.b;
        }
      off += b.dim();
    }
    return A;
  }

 private:
  std::vector<FlowBlock> blocks_;
  int dim_ = 0;
};

inline Eigen::VectorXd flow_apply(const GeneratorSpec& s, double t, const Eigen::VectorXd& x) {
  return FlowEvaluator(s)(t, x);
}

}  // namespace linflow
