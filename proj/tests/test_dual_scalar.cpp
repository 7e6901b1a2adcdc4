#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>

#include "dualsvd/dual_scalar.hpp"
#include "dualsvd/rng.hpp"

using dualsvd::DualScalar;

namespace {

// Independent oracle: the product of the 2x2 representative forms
// [[a_s, 0], [a_i, a_s]]; the dual product is the left column of the result.
DualScalar rep_mul(const DualScalar& a, const DualScalar& b) {
  Eigen::Matrix2d ra, rb;
  ra << a.standard, 0.0, a.infinitesimal, a.standard;
  rb << b.standard, 0.0, b.infinitesimal, b.standard;
  Eigen::Matrix2d prod = ra * rb;
  return DualScalar(prod(0, 0), prod(1, 0));
}

}  // namespace

TEST_CASE("dual multiplication expands with eps^2 = 0") {
  DualScalar p = DualScalar(1, 2) * DualScalar(3, 4);
  CHECK(p.standard == 3.0);
  CHECK(p.infinitesimal == 10.0);

  DualScalar q = DualScalar(0, 1) * DualScalar(0, 1);
  CHECK(q.standard == 0.0);
  CHECK(q.infinitesimal == 0.0);
}

TEST_CASE("dual multiplication matches the representative-form oracle") {
  auto eng = dualsvd::make_stream(11, 0);
  for (int i = 0; i < 200; ++i) {
    DualScalar x(dualsvd::gaussian(eng), dualsvd::gaussian(eng));
    DualScalar two(2.0, 0.0);
    DualScalar got = two * x;
    DualScalar expect = rep_mul(two, x);
    CHECK(got.standard == expect.standard);
    CHECK(got.infinitesimal == expect.infinitesimal);

    DualScalar y(dualsvd::gaussian(eng), dualsvd::gaussian(eng));
    DualScalar gxy = x * y;
    DualScalar exy = rep_mul(x, y);
    CHECK(gxy.standard == doctest::Approx(exy.standard).epsilon(1e-15));
    CHECK(gxy.infinitesimal == doctest::Approx(exy.infinitesimal).epsilon(1e-15));
  }
}

TEST_CASE("ring laws hold exactly on small integers and to 4 ulp on floats") {
  DualScalar a(3, -2), b(-5, 7), c(2, 9);
  DualScalar lhs = (a * b) * c;
  DualScalar rhs = a * (b * c);
  CHECK(lhs.standard == rhs.standard);
  CHECK(lhs.infinitesimal == rhs.infinitesimal);
  DualScalar ab = a * b, ba = b * a;
  CHECK(ab.standard == ba.standard);
  CHECK(ab.infinitesimal == ba.infinitesimal);
  DualScalar dist_l = a * (b + c);
  DualScalar dist_r = a * b + a * c;
  CHECK(dist_l.standard == dist_r.standard);
  CHECK(dist_l.infinitesimal == dist_r.infinitesimal);

  auto eng = dualsvd::make_stream(12, 0);
  const double ulp4 = 4.0 * std::numeric_limits<double>::epsilon();
  for (int i = 0; i < 200; ++i) {
    DualScalar x(dualsvd::gaussian(eng), dualsvd::gaussian(eng));
    DualScalar y(dualsvd::gaussian(eng), dualsvd::gaussian(eng));
    DualScalar z(dualsvd::gaussian(eng), dualsvd::gaussian(eng));
    DualScalar l = (x * y) * z, r = x * (y * z);
    CHECK(std::abs(l.standard - r.standard) <=
          ulp4 * std::max(1.0, std::abs(l.standard)));
    CHECK(std::abs(l.infinitesimal - r.infinitesimal) <=
          ulp4 * std::max({1.0, std::abs(l.infinitesimal), std::abs(x.standard * y.standard * z.infinitesimal)}));
  }
}

TEST_CASE("total order on dual numbers") {
  CHECK(dualsvd::dual_less_than({1, 100}, {2, 0}));
  CHECK(dualsvd::dual_less_than({2, 1}, {2, 3}));
  CHECK_FALSE(dualsvd::dual_less_than({2, 3}, {2, 3}));

  // trichotomy over randomized pairs, including forced standard-part ties
  auto eng = dualsvd::make_stream(13, 0);
  for (int i = 0; i < 300; ++i) {
    DualScalar p(dualsvd::gaussian(eng), dualsvd::gaussian(eng));
    DualScalar q = (i % 3 == 0) ? DualScalar(p.standard, dualsvd::gaussian(eng))
                                : DualScalar(dualsvd::gaussian(eng), dualsvd::gaussian(eng));
    int holds = (p < q) + (q < p) + (p == q);
    CHECK(holds == 1);
  }
}

TEST_CASE("appreciability uses the absolute tolerance") {
  CHECK(dualsvd::is_appreciable({3, 0}));
  CHECK_FALSE(dualsvd::is_appreciable({0, 5}));
  CHECK_FALSE(dualsvd::is_appreciable({1e-30, 1}));
}

TEST_CASE("positivity under the total order") {
  CHECK(dualsvd::dual_positive({0, 2}));
  CHECK_FALSE(dualsvd::dual_positive({-1, 9}));
  CHECK_FALSE(dualsvd::dual_positive({0, 0}));
}

TEST_CASE("division by an infinitesimal dual number is an error") {
  CHECK_THROWS_AS(DualScalar(1, 1) / DualScalar(0, 5), std::domain_error);
  CHECK_THROWS_AS(DualScalar(1, 1) / DualScalar(1e-14, 5), std::domain_error);

  DualScalar a(3, -4), b(2, 5);
  DualScalar back = (a / b) * b;
  CHECK(back.standard == doctest::Approx(a.standard).epsilon(1e-15));
  CHECK(back.infinitesimal == doctest::Approx(a.infinitesimal).epsilon(1e-14));
}

TEST_CASE("constructed values must be finite") {
  CHECK_THROWS_AS(DualScalar(std::numeric_limits<double>::quiet_NaN(), 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(DualScalar(0, std::numeric_limits<double>::infinity()),
                  std::invalid_argument);
}

TEST_CASE("textual form round trip") {
  CHECK(dualsvd::to_string(DualScalar(1.5, 2.0), 6) == "1.5+2ε");
  CHECK(dualsvd::to_string(DualScalar(1.0, -0.25), 6) == "1-0.25ε");

  DualScalar p = dualsvd::parse_dual_scalar("3.5+2e-3ε");
  CHECK(p.standard == 3.5);
  CHECK(p.infinitesimal == 2e-3);

  DualScalar q = dualsvd::parse_dual_scalar(" -1.25 - 0.5ε ");
  CHECK(q.standard == -1.25);
  CHECK(q.infinitesimal == -0.5);

  DualScalar bare = dualsvd::parse_dual_scalar("42");
  CHECK(bare.standard == 42.0);
  CHECK(bare.infinitesimal == 0.0);

  auto eng = dualsvd::make_stream(14, 0);
  for (int i = 0; i < 100; ++i) {
    DualScalar x(dualsvd::gaussian(eng), dualsvd::gaussian(eng));
    DualScalar y = dualsvd::parse_dual_scalar(dualsvd::to_string(x));
    CHECK(x.standard == y.standard);
    CHECK(x.infinitesimal == y.infinitesimal);
  }

  CHECK_THROWS_AS(dualsvd::parse_dual_scalar("1.5 + "), std::invalid_argument);
  CHECK_THROWS_AS(dualsvd::parse_dual_scalar("abc"), std::invalid_argument);
}

TEST_CASE("dual complex scalars commute eps with complex factors") {
  using dualsvd::DualComplexScalar;
  using C = std::complex<double>;
  DualComplexScalar a(C(1, 2), C(0, 1));
  DualComplexScalar b(C(0, -1), C(2, 0));
  DualComplexScalar ab = a * b;
  CHECK(ab.standard == C(1, 2) * C(0, -1));
  CHECK(ab.infinitesimal == C(1, 2) * C(2, 0) + C(0, 1) * C(0, -1));
  // eps^2 = 0 with complex coefficients
  DualComplexScalar e(C(0, 0), C(0, 1));
  DualComplexScalar ee = e * e;
  CHECK(ee.standard == C(0, 0));
  CHECK(ee.infinitesimal == C(0, 0));
}
