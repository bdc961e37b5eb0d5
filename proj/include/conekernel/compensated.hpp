#pragma once

// Error-free transformations and compensated accumulators.

#include <cmath>
#include <complex>

namespace conekernel {

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double v) noexcept {
    add(v);
    return *this;
  }

  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Compensated accumulation of complex values, component-wise.
class CompensatedComplexSum {
 public:
  void add(std::complex<double> v) noexcept {
    re_.add(v.real());
    im_.add(v.imag());
  }

  CompensatedComplexSum& operator+=(std::complex<double> v) noexcept {
    add(v);
    return *this;
  }

  std::complex<double> value() const noexcept { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

/// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2 (about 32 significant digits).
struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  constexpr DoubleDouble() = default;
  constexpr DoubleDouble(double h) : hi(h), lo(0.0) {}  // NOLINT(google-explicit-constructor)
  constexpr DoubleDouble(double h, double l) : hi(h), lo(l) {}

  static DoubleDouble two_sum(double a, double b) noexcept {
    const double s = a + b;
    const double bb = s - a;
    const double err = (a - (s - bb)) + (b - bb);
    return {s, err};
  }

  static DoubleDouble quick_two_sum(double a, double b) noexcept {
    const double s = a + b;
    return {s, b - (s - a)};
  }

  static DoubleDouble two_prod(double a, double b) noexcept {
    const double p = a * b;
    return {p, std::fma(a, b, -p)};
  }

  friend DoubleDouble operator+(DoubleDouble a, DoubleDouble b) noexcept {
    DoubleDouble s = two_sum(a.hi, b.hi);
    DoubleDouble t = two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return quick_two_sum(s.hi, s.lo);
  }

  friend DoubleDouble operator-(DoubleDouble a) noexcept { return {-a.hi, -a.lo}; }
  friend DoubleDouble operator-(DoubleDouble a, DoubleDouble b) noexcept { return a + (-b); }

  friend DoubleDouble operator*(DoubleDouble a, DoubleDouble b) noexcept {
    DoubleDouble p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
  }

  friend DoubleDouble operator*(DoubleDouble a, double b) noexcept {
    DoubleDouble p = two_prod(a.hi, b);
    p.lo += a.lo * b;
    return quick_two_sum(p.hi, p.lo);
  }

  friend DoubleDouble operator/(DoubleDouble a, double b) noexcept {
    const double q1 = a.hi / b;
    DoubleDouble r = a - two_prod(q1, b);
    const double q2 = r.hi / b;
    r = r - two_prod(q2, b);
    const double q3 = r.hi / b;
    return DoubleDouble(q1) + DoubleDouble(q2) + DoubleDouble(q3);
  }

  friend DoubleDouble operator/(DoubleDouble a, DoubleDouble b) noexcept {
    const double q1 = a.hi / b.hi;
    DoubleDouble r = a - b * q1;
    const double q2 = r.hi / b.hi;
    r = r - b * q2;
    const double q3 = r.hi / b.hi;
    return DoubleDouble(q1) + DoubleDouble(q2) + DoubleDouble(q3);
  }

  DoubleDouble& operator+=(DoubleDouble b) noexcept { return *this = *this + b; }
  DoubleDouble& operator*=(double b) noexcept { return *this = *this * b; }

  double to_double() const noexcept { return hi + lo; }
};

inline DoubleDouble abs(DoubleDouble a) noexcept { return a.hi < 0.0 ? -a : a; }

}  // namespace conekernel
