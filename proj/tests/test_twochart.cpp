#include <catch2/catch_amalgamated.hpp>

#include "liekit/twochart.hpp"

using namespace liekit;

namespace {

TwoChartBundle twisted_extension(int window, bool split) {
  LaurentWindow zero(0, 0);
  LaurentWindow corner = split ? zero : LaurentWindow::monomial(-1, -1, -1);
  return make_bundle(window, {{LaurentWindow::monomial(-2, -2, -2), corner},
                              {zero, LaurentWindow::monomial(0, 0, 0)}});
}

}  // namespace

TEST_CASE("line bundle section counts match the classical values") {
  for (int n = 0; n <= 5; ++n) {
    auto cc = cech_cohomology(line_bundle(6, n));
    CHECK(cc.h0 == n + 1);
    CHECK(cc.h1 == 0);
    CHECK(cc.stable);
  }
  for (int n = 2; n <= 5; ++n) {
    auto cc = cech_cohomology(line_bundle(6, -n));
    CHECK(cc.h0 == 0);
    CHECK(cc.h1 == n - 1);
    CHECK(cc.stable);
  }
  auto minus_one = cech_cohomology(line_bundle(6, -1));
  CHECK(minus_one.h0 == 0);
  CHECK(minus_one.h1 == 0);
  CHECK(minus_one.stable);

  // the only global section of O(0) is a matching pair of chart constants
  auto triv = cech_cohomology(line_bundle(2, 0));
  REQUIRE(triv.h0 == 1);
  auto rep = triv.h[0].reps.col(0);
  std::vector<Rat> expected(6);
  expected[0] = Rat(1);
  expected[3] = Rat(1);
  CHECK(rep == expected);
  CHECK(triv.cx.label(0, 0) == "u0:1");
  CHECK(triv.cx.label(0, 3) == "u1:1");
}

TEST_CASE("H1 representatives are the interior monomials") {
  auto m2 = cech_cohomology(line_bundle(6, -2));
  CHECK(m2.h1_labels == std::vector<std::string>{"t^-1"});
  auto m4 = cech_cohomology(line_bundle(6, -4));
  CHECK(m4.h1_labels == std::vector<std::string>{"t^-3", "t^-2", "t^-1"});

  auto omega = cech_cohomology(cotangent_bundle(6));
  CHECK(omega.h0 == 0);
  CHECK(omega.h1 == 1);
  CHECK(omega.h1_labels == std::vector<std::string>{"t^-1"});

  // vector fields on the rational curve form the three-dimensional sl2
  auto theta = cech_cohomology(tangent_bundle(6));
  CHECK(theta.h0 == 3);
  CHECK(theta.h1 == 0);
  CHECK(theta.stable);
}

TEST_CASE("narrow windows are flagged unstable, never silently wrong") {
  auto tight = cech_cohomology(line_bundle(3, 5));
  CHECK(tight.h0 == 2);  // truncated count, must not be trusted
  CHECK_FALSE(tight.stable);

  auto tight4 = cech_cohomology(line_bundle(3, 4));
  CHECK(tight4.h0 == 3);
  CHECK_FALSE(tight4.stable);

  // interior monomials always fit, so negative twists stay stable early
  auto neg = cech_cohomology(line_bundle(3, -5));
  CHECK(neg.h1 == 4);
  CHECK(neg.stable);
}

TEST_CASE("transition matrices must be invertible over the window ring") {
  LaurentWindow zero(0, 0);
  LaurentWindow one = LaurentWindow::monomial(0, 0, 0);
  LaurentWindow t = LaurentWindow::monomial(0, 1, 1);
  CHECK_THROWS_AS(make_bundle(4, {{t, zero}, {zero, zero}}), std::invalid_argument);
  CHECK_THROWS_AS(make_bundle(4, {{one, one}, {one, one}}), std::invalid_argument);
  LaurentWindow one_plus_t(0, 1);
  one_plus_t.set(0, Rat(1));
  one_plus_t.set(1, Rat(1));
  CHECK_THROWS_AS(make_bundle(4, {{one_plus_t}}), std::invalid_argument);
  CHECK_NOTHROW(monomial_bundle(4, 3, Rat(2)));
  CHECK_NOTHROW(extension_bundle(4, -1, 1));

  // triangular with unit-monomial diagonal stays invertible
  CHECK_NOTHROW(make_bundle(4, {{t, one_plus_t}, {zero, one}}));
}

TEST_CASE("the Atiyah number of a line bundle is its degree") {
  for (int n = -2; n <= 3; ++n) {
    auto at = line_atiyah(n, 6);
    REQUIRE(at.cls.size() == 1);
    CHECK(at.cls[0] == Rat(n));
    CHECK(at.omega.stable);
    CHECK(at.omega.h1_labels == std::vector<std::string>{"t^-1"});
    CHECK(at.omega.h.class_is_zero(1, at.cocycle) == (n == 0));
  }
}

TEST_CASE("extension bundles detect splitting through twisted sections") {
  auto ext = cech_cohomology(extension_bundle(6, -1, 1));
  CHECK(ext.h0 == 2);
  CHECK(ext.h1 == 0);
  CHECK(ext.stable);

  // twist by O(-1): the nonsplit extension of O(1) by O(-1) is O ⊕ O and
  // loses all sections after the twist, the split model keeps one
  CHECK(cech_cohomology(twisted_extension(6, false)).h0 == 0);
  CHECK(cech_cohomology(twisted_extension(6, true)).h0 == 1);
}
