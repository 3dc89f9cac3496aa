#pragma once
// Scalar that tracks an exact rational representation as long as one exists.
// Scheme coefficients that are rational stay rational through the whole
// order-condition recursion, so residuals for such schemes are exact zeros.
// Coefficients involving surds (sqrt(3), sqrt(7), sqrt(13), sqrt(17)) are
// carried as plain doubles and contaminate everything they touch; those
// schemes are then checked against a 1e-12 residual tolerance instead.

#include <cstdint>
#include <numeric>
#include <string>

namespace dgflow {

class Value {
 public:
  Value() : exact_(true), num_(0), den_(1), d_(0.0) {}
  Value(long long n, long long d) { set_ratio(n, d); }
  static Value approx(double v) {
    Value r;
    r.exact_ = false;
    r.d_ = v;
    return r;
  }
  static Value integer(long long n) { return Value(n, 1); }

  bool exact() const { return exact_; }
  double to_double() const { return d_; }
  long long num() const { return num_; }
  long long den() const { return den_; }

  friend Value operator+(const Value& a, const Value& b) {
    if (a.exact_ && b.exact_) {
      __int128 n = (__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_;
      __int128 d = (__int128)a.den_ * b.den_;
      return from_i128(n, d, a.d_ + b.d_);
    }
    return approx(a.d_ + b.d_);
  }
  friend Value operator-(const Value& a, const Value& b) {
    if (a.exact_ && b.exact_) {
      __int128 n = (__int128)a.num_ * b.den_ - (__int128)b.num_ * a.den_;
      __int128 d = (__int128)a.den_ * b.den_;
      return from_i128(n, d, a.d_ - b.d_);
    }
    return approx(a.d_ - b.d_);
  }
  friend Value operator*(const Value& a, const Value& b) {
    if (a.exact_ && b.exact_) {
      __int128 n = (__int128)a.num_ * b.num_;
      __int128 d = (__int128)a.den_ * b.den_;
      return from_i128(n, d, a.d_ * b.d_);
    }
    return approx(a.d_ * b.d_);
  }
  friend Value operator/(const Value& a, const Value& b) {
    if (a.exact_ && b.exact_ && b.num_ != 0) {
      __int128 n = (__int128)a.num_ * b.den_;
      __int128 d = (__int128)a.den_ * b.num_;
      return from_i128(n, d, a.d_ / b.d_);
    }
    return approx(a.d_ / b.d_);
  }
  Value operator-() const {
    if (exact_) return Value(-num_, den_);
    return approx(-d_);
  }
  bool is_zero() const { return exact_ ? num_ == 0 : d_ == 0.0; }

  std::string str() const {
    if (exact_) {
      if (den_ == 1) return std::to_string(num_);
      return std::to_string(num_) + "/" + std::to_string(den_);
    }
    return std::to_string(d_);
  }

 private:
  void set_ratio(long long n, long long d) {
    if (d < 0) { n = -n; d = -d; }
    long long g = std::gcd(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    exact_ = true;
    num_ = n;
    den_ = d;
    d_ = static_cast<double>(n) / static_cast<double>(d);
  }
  static Value from_i128(__int128 n, __int128 d, double fallback) {
    if (d < 0) { n = -n; d = -d; }
    __int128 an = n < 0 ? -n : n;
    // reduce before the range check
    __int128 a = an, b = d;
    while (b) { __int128 t = a % b; a = b; b = t; }
    if (a > 1) { n /= a; d /= a; }
    constexpr __int128 lim = (__int128)1 << 62;
    if (n > lim || n < -lim || d > lim) return approx(fallback);
    Value r;
    r.exact_ = true;
    r.num_ = (long long)n;
    r.den_ = (long long)d;
    r.d_ = static_cast<double>(r.num_) / static_cast<double>(r.den_);
    return r;
  }

  bool exact_;
  long long num_, den_;
  double d_;
};

} // namespace dgflow
