#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace linflow {

// std::*_distribution output is implementation defined; draws here only use
// the raw mt19937_64 stream so seeds reproduce across standard libraries.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1)); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    while (u <= 0.0) u = uniform();
    double v = uniform();
    double r = std::sqrt(-2.0 * std::log(u));
    spare_ = r * std::sin(6.283185307179586 * v);
    has_spare_ = true;
    return r * std::cos(6.283185307179586 * v);
  }

  Eigen::VectorXd unit(int d) {
    Eigen::VectorXd x(d);
    do {
      for (int i = 0; i < d; ++i) x(i) = normal();
    } while (x.norm() < 1e-12);
    return x / x.norm();
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace linflow
