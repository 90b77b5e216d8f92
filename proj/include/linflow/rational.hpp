#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace linflow {

// Exact rational. Thin wrapper over boost's cpp_rational so the rest of the
// library does not depend on multiprecision spelling.
class Rational {
 public:
  using Int = boost::multiprecision::cpp_int;
  using Impl = boost::multiprecision::cpp_rational;

  Rational() = default;
  Rational(int v) : v_(v) {}            // NOLINT: implicit on purpose
  Rational(long v) : v_(v) {}           // NOLINT
  Rational(long long v) : v_(v) {}      // NOLINT
  Rational(const Int& n, const Int& d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    v_ = Impl(n) / Impl(d);
  }
  explicit Rational(const Impl& v) : v_(v) {}

  Int num() const { return boost::multiprecision::numerator(v_); }
  Int den() const { return boost::multiprecision::denominator(v_); }
  const Impl& impl() const { return v_; }

  bool is_zero() const { return v_ == 0; }
  bool is_integer() const { return den() == 1; }
  int sign() const { return v_.sign(); }

  double to_double() const { return v_.convert_to<double>(); }

  std::string str() const {
    if (is_integer()) return num().str();
    return num().str() + "/" + den().str();
  }

  // Accepts "p", "-p", "p/q", "-p/q" with optional surrounding blanks.
  static Rational parse(std::string_view s) {
    auto trim = [](std::string_view x) {
      while (!x.empty() && (x.front() == ' ' || x.front() == '\t')) x.remove_prefix(1);
      while (!x.empty() && (x.back() == ' ' || x.back() == '\t')) x.remove_suffix(1);
      return x;
    };
    s = trim(s);
    auto slash = s.find('/');
    std::string_view ns = s.substr(0, slash);
    std::string_view ds = slash == std::string_view::npos ? std::string_view("1") : s.substr(slash + 1);
    auto check_int = [](std::string_view x, bool allow_sign) {
      if (x.empty()) return false;
      std::size_t i = 0;
      if (allow_sign && (x[0] == '-' || x[0] == '+')) i = 1;
      if (i == x.size()) return false;
      for (; i < x.size(); ++i)
        if (x[i] < '0' || x[i] > '9') return false;
      return true;
    };
    if (!check_int(ns, true) || !check_int(ds, false))
      throw std::invalid_argument("malformed rational '" + std::string(s) + "'");
    std::string n(ns);
    if (n[0] == '+') n.erase(0, 1);
    Int num(n), den{std::string(ds)};
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(s) + "'");
    return Rational(num, den);
  }

  Rational operator-() const { return Rational(Impl(-v_)); }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::domain_error("rational division by zero");
    v_ /= o.v_;
    return *this;
  }
  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  Impl v_{0};
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

// gcd of two nonnegative rationals: the positive generator of the additive
// group they span (zero if both are zero).
inline Rational rational_gcd(const Rational& a, const Rational& b) {
  using Int = Rational::Int;
  if (a.is_zero()) return abs(b);
  if (b.is_zero()) return abs(a);
  Int l = boost::multiprecision::lcm(a.den(), b.den());
  Int p = boost::multiprecision::abs(a.num() * (l / a.den()));
  Int q = boost::multiprecision::abs(b.num() * (l / b.den()));
  return Rational(boost::multiprecision::gcd(p, q), l);
}

// Best rational approximation to x with denominator <= max_den
// (continued fractions with the semiconvergent check).
inline Rational best_rational(double x, long long max_den) {
  if (!(x == x) || x > 9e15 || x < -9e15) throw std::domain_error("cannot approximate non-finite value");
  bool neg = x < 0;
  double y = neg ? -x : x;
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = y;
  for (int it = 0; it < 64; ++it) {
    double fa = std::floor(r);
    // a partial quotient beyond max_den always overshoots; avoid overflow
    bool over = q1 > 0 && fa > static_cast<double>(max_den);
    long long a = over ? 0 : static_cast<long long>(fa);
    long long q2 = a * q1 + q0;
    if (over || q2 > max_den) {
      long long k = (max_den - q0) / q1;
      long long ps = k * p1 + p0, qs = k * q1 + q0;
      double e1 = std::abs(y - double(p1) / double(q1));
      double e2 = std::abs(y - double(ps) / double(qs));
      if (e2 < e1) { p1 = ps; q1 = qs; }
      break;
    }
    long long p2 = a * p1 + p0;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    double frac = r - fa;
    if (frac < 1e-300) break;
    r = 1.0 / frac;
    if (std::abs(y - double(p1) / double(q1)) == 0.0) break;
  }
  Rational out{Rational::Int(p1), Rational::Int(q1)};
  return neg ? -out : out;
}

}  // namespace linflow
