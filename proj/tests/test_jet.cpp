#include "doctest.h"

#include <cmath>

#include "pestov/jet.hpp"
#include "test_support.hpp"

using namespace pestov;

namespace {

// smooth reference function with nonvanishing high derivatives
Jet f_ref(const Jet& x) { return sin(x) * exp(0.5 * x) / (1.0 + x * x); }

double f_ref_d(double x) { return f_ref(Jet::variable(x, 0)).coeff(1); }

}  // namespace

TEST_CASE("constants and variables") {
  Jet c(3.5);
  CHECK(c.value() == 3.5);
  CHECK(c.vars() == 0);

  Jet x = Jet::variable(2.0, 1);
  CHECK(x.value() == 2.0);
  CHECK(x.coeff(1u << 1) == 1.0);

  Jet y = x * x;
  CHECK(y.value() == 4.0);
  CHECK(y.coeff(1u << 1) == 4.0);  // d/dx x^2 = 2x
}

TEST_CASE("first derivative matches centered differences at order 2") {
  const double x0 = 0.7;
  const double exact = f_ref(Jet::variable(x0, 0)).coeff(1);
  std::vector<double> hs{1e-2, 5e-3, 2.5e-3};
  std::vector<double> errs;
  for (double h : hs) {
    const double fd =
        (f_ref(Jet(x0 + h)).value() - f_ref(Jet(x0 - h)).value()) / (2 * h);
    errs.push_back(std::abs(fd - exact));
  }
  const double slope = testing::fit_loglog_slope(hs, errs);
  CHECK(slope > 1.9);
  CHECK(errs.back() < 1e-5);
}

TEST_CASE("mixed partials of sin(x*y) are exact") {
  const double x0 = 0.4, y0 = -1.1;
  Jet x = Jet::variable(x0, 0);
  Jet y = Jet::variable(y0, 1);
  Jet f = sin(x * y);
  // d2/dxdy sin(xy) = cos(xy) - xy sin(xy)
  const double expected =
      std::cos(x0 * y0) - x0 * y0 * std::sin(x0 * y0);
  CHECK(f.coeff(0b11) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("fourth-order mixed partial of exp(x0+x1+x2+x3)") {
  Jet s;
  for (int i = 0; i < 4; ++i) s += Jet::variable(0.1 * i, i);
  Jet e = exp(s);
  const double v = std::exp(0.1 * (0 + 1 + 2 + 3));
  CHECK(e.coeff(0b1111) == doctest::Approx(v).epsilon(1e-14));
  // every lower-order coefficient is the same value for exp
  CHECK(e.coeff(0b0111) == doctest::Approx(v).epsilon(1e-14));
  CHECK(e.value() == doctest::Approx(v).epsilon(1e-14));
}

TEST_CASE("division and sqrt invert") {
  Jet x = Jet::variable(1.7, 0) + Jet::variable(0.0, 2) * 3.0;
  Jet y = sqrt(x) * sqrt(x);
  CHECK(y.value() == doctest::Approx(x.value()).epsilon(1e-15));
  CHECK(y.coeff(1) == doctest::Approx(x.coeff(1)).epsilon(1e-14));
  Jet z = x / x;
  CHECK(z.value() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(z.coeff(1)) < 1e-15);

  Jet l = log(exp(x));
  CHECK(l.value() == doctest::Approx(x.value()).epsilon(1e-14));
  CHECK(l.coeff(1) == doctest::Approx(x.coeff(1)).epsilon(1e-13));

  Jet p = pow(x, 2.5);
  CHECK(p.coeff(1) ==
        doctest::Approx(2.5 * std::pow(1.7, 1.5)).epsilon(1e-13));
}

TEST_CASE("extract and without split a jet") {
  Jet x = Jet::variable(0.3, 0);
  Jet y = Jet::variable(0.9, 1);
  Jet f = x * y + 2.0 * y;
  Jet fx = f.extract(0);
  CHECK(fx.value() == doctest::Approx(0.9));  // d/dx (xy + 2y) = y
  CHECK(fx.coeff(1u << 1) == doctest::Approx(1.0));
  Jet f0 = f.without(0);
  CHECK(f0.value() == doctest::Approx(0.3 * 0.9 + 1.8));
  CHECK(f0.coeff(1u << 0) == 0.0);
}

TEST_CASE("variable scopes nest and enforce the depth budget") {
  CHECK(VarScope::live_count() == 0);
  {
    VarScope a(2);
    CHECK(a.var(0) == 0);
    CHECK(a.var(1) == 1);
    {
      VarScope b(3);
      CHECK(b.var(0) == 2);
      CHECK(VarScope::live_count() == 5);
      CHECK_THROWS_AS(VarScope(2), std::logic_error);
    }
    CHECK(VarScope::live_count() == 2);
  }
  CHECK(VarScope::live_count() == 0);
}

TEST_CASE("derivative chain d/dt f(x + t v) equals directional derivative") {
  // one nilpotent parameter embedded in a larger expression
  const double x0 = 0.25;
  Jet t = Jet::variable(0.0, 3);
  Jet val = f_ref(Jet(x0) + t * 2.0);
  CHECK(val.coeff(1u << 3) ==
        doctest::Approx(2.0 * f_ref_d(x0)).epsilon(1e-13));
}
