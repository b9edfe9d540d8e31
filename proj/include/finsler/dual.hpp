#pragma once

#include <cmath>

// Truncated first-order dual numbers. Nesting Dual<Dual<...>> k times gives
// exact k-th order directional derivatives of any arithmetic expression
// evaluated on them, which is how every y- and x-derivative of the metric
// evaluators in this project is obtained.

namespace finsler {

template <class T>
struct Dual {
  T v{};  // value
  T d{};  // derivative along the seeded direction

  Dual() = default;
  Dual(double c) : v(c), d() {}  // NOLINT: implicit promotion of constants
  Dual(const T& value, const T& deriv) : v(value), d(deriv) {}
};

using D0 = double;
using D1 = Dual<D0>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;
using D4 = Dual<D3>;
using D5 = Dual<D4>;

// Leading (order-zero) value of a nested dual.
inline double leading(double x) { return x; }
template <class T>
double leading(const Dual<T>& x) {
  return leading(x.v);
}

// Largest magnitude over the whole jet (value and every derivative slot).
inline double max_abs_parts(double x) { return x < 0 ? -x : x; }
template <class T>
double max_abs_parts(const Dual<T>& x) {
  double a = max_abs_parts(x.v), b = max_abs_parts(x.d);
  return a > b ? a : b;
}

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  return {a.v + b.v, a.d + b.d};
}
template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
  return {a.v - b.v, a.d - b.d};
}
template <class T>
Dual<T> operator-(const Dual<T>& a) {
  return {-a.v, -a.d};
}
template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return {a.v * b.v, a.v * b.d + a.d * b.v};
}
template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  T q = a.v / b.v;
  return {q, (a.d - q * b.d) / b.v};
}

template <class T>
Dual<T> operator+(const Dual<T>& a, double b) {
  return {a.v + b, a.d};
}
template <class T>
Dual<T> operator+(double a, const Dual<T>& b) {
  return {a + b.v, b.d};
}
template <class T>
Dual<T> operator-(const Dual<T>& a, double b) {
  return {a.v - b, a.d};
}
template <class T>
Dual<T> operator-(double a, const Dual<T>& b) {
  return {a - b.v, -b.d};
}
template <class T>
Dual<T> operator*(const Dual<T>& a, double b) {
  return {a.v * b, a.d * b};
}
template <class T>
Dual<T> operator*(double a, const Dual<T>& b) {
  return {b.v * a, b.d * a};
}
template <class T>
Dual<T> operator/(const Dual<T>& a, double b) {
  return {a.v / b, a.d / b};
}
template <class T>
Dual<T> operator/(double a, const Dual<T>& b) {
  return Dual<T>(a) / b;
}

template <class T>
Dual<T>& operator+=(Dual<T>& a, const Dual<T>& b) {
  a = a + b;
  return a;
}
template <class T>
Dual<T>& operator-=(Dual<T>& a, const Dual<T>& b) {
  a = a - b;
  return a;
}
template <class T>
Dual<T>& operator*=(Dual<T>& a, const Dual<T>& b) {
  a = a * b;
  return a;
}
template <class T>
Dual<T>& operator/=(Dual<T>& a, const Dual<T>& b) {
  a = a / b;
  return a;
}

using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;

template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  T s = sqrt(a.v);
  return {s, a.d / (2.0 * s)};
}
template <class T>
Dual<T> exp(const Dual<T>& a) {
  T e = exp(a.v);
  return {e, a.d * e};
}
template <class T>
Dual<T> log(const Dual<T>& a) {
  return {log(a.v), a.d / a.v};
}
template <class T>
Dual<T> sin(const Dual<T>& a) {
  return {sin(a.v), a.d * cos(a.v)};
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
  return {cos(a.v), -(a.d * sin(a.v))};
}
// Real exponent; base must stay positive along the evaluation.
template <class T>
Dual<T> pow(const Dual<T>& a, double p) {
  return {pow(a.v, p), p * pow(a.v, p - 1.0) * a.d};
}

template <class T>
Dual<T> sq(const Dual<T>& a) {
  return a * a;
}
inline double sq(double a) { return a * a; }

}  // namespace finsler
