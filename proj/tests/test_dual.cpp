#include <doctest.h>

#include "finsler/dual.hpp"

using namespace finsler;

TEST_CASE("first and second derivatives of a polynomial") {
  // f(t) = t^3 + 2t at t = 2: f' = 3t^2 + 2 = 14, f'' = 6t = 12
  D2 t(D1(2.0, 1.0), D1(1.0, 0.0));
  D2 f = t * t * t + 2.0 * t;
  CHECK(f.v.v == doctest::Approx(12.0));
  CHECK(f.v.d == doctest::Approx(14.0));
  CHECK(f.d.v == doctest::Approx(14.0));
  CHECK(f.d.d == doctest::Approx(12.0));
}

TEST_CASE("sqrt, log, pow chain to third order") {
  // f(t) = sqrt(t), derivatives at t = 4: 1/4, -1/32, 3/256
  D3 t(D2(D1(4.0, 1.0), D1(1.0, 0.0)), D2(D1(1.0, 0.0), D1(0.0, 0.0)));
  D3 f = sqrt(t);
  CHECK(f.v.v.v == doctest::Approx(2.0));
  CHECK(f.v.v.d == doctest::Approx(0.25));
  CHECK(f.v.d.d == doctest::Approx(-1.0 / 32));
  CHECK(f.d.d.d == doctest::Approx(3.0 / 256));

  D1 u(3.0, 1.0);
  CHECK(log(u).d == doctest::Approx(1.0 / 3));
  CHECK(pow(u, 2.5).d == doctest::Approx(2.5 * std::pow(3.0, 1.5)));
}

TEST_CASE("division and mixed scalar ops") {
  D1 a(2.0, 1.0);
  D1 r = (1.0 + a * a) / (3.0 * a - 1.0);
  // f = (1+t^2)/(3t-1): f(2) = 1, f'(2) = (2t(3t-1) - 3(1+t^2))/(3t-1)^2 = (20-15)/25
  CHECK(r.v == doctest::Approx(1.0));
  CHECK(r.d == doctest::Approx(0.2));
  CHECK(max_abs_parts(r) == doctest::Approx(1.0));
  CHECK(leading(r) == doctest::Approx(1.0));
}
