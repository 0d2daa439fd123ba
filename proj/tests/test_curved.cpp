#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "liekit/curved.hpp"

using namespace liekit;

namespace {

PointAlgebroid aff1(const QRing& ring) {
  auto g = PointAlgebroid::make(ring, {"x", "y"});
  g.set_bracket(ring, 0, 1, 1, Rat(1));
  return g;
}

PointAlgebroid gl2(const QRing& ring) {
  auto g = PointAlgebroid::make(ring, {"e", "f", "h", "z"});
  g.set_bracket(ring, 0, 1, 2, Rat(1));
  g.set_bracket(ring, 2, 0, 0, Rat(2));
  g.set_bracket(ring, 2, 1, 1, Rat(-2));
  return g;
}

/// line through aff(1) with the y-line as subalgebroid and a rank-one module
/// where y acts by 1; the unique minimal example with an obstructed extension
EndModel line_fixture(const QRing& ring) {
  auto p = make_pair(ring, aff1(ring), {1});
  RMat<QRing> nx(ring, 1, 1), ny(ring, 1, 1);
  ny.at(0, 0) = 1;
  return end_model(ring, p, {nx, ny});
}

std::vector<RMat<QRing>> std_rep_mats(const QRing& ring) {
  auto E = RMat<QRing>(ring, 2, 2), F = RMat<QRing>(ring, 2, 2), H = RMat<QRing>(ring, 2, 2);
  E.at(0, 1) = 1;
  F.at(1, 0) = 1;
  H.at(0, 0) = 1;
  H.at(1, 1) = -1;
  return {E, F, H};
}

Rat rand_rat(std::mt19937& g) {
  std::uniform_int_distribution<int> num(-3, 3), den(1, 2);
  return rat(num(g), den(g));
}

}  // namespace

TEST_CASE("the endomorphism form algebra is honestly curved") {
  QRing ring;
  std::string why;

  auto mo = line_fixture(ring);
  REQUIRE(check_curved(mo.dg, &why));
  CHECK(mo.sub_flat);
  // R(x,y) = [nabla_x, nabla_y] - nabla_{[x,y]} = -1
  REQUIRE(mo.dg.curv.size() == 1);
  CHECK(mo.dg.curv[0] == Rat(-1));

  // a corrupted differential is rejected
  auto wrong_d = mo.dg;
  wrong_d.d[0](0, 0) += 1;
  CHECK_FALSE(check_curved(wrong_d, &why));
  CHECK(why.find("leibniz") != std::string::npos);
}

TEST_CASE("central pair extensions with a two-dimensional module") {
  QRing ring;
  std::string why;
  auto p = make_pair(ring, gl2(ring), {0, 1, 2});
  auto mats = std_rep_mats(ring);

  // a deliberately bad choice along the center: curvature appears, but only
  // with a quotient leg
  RMat<QRing> X(ring, 2, 2);
  X.at(0, 1) = 1;
  auto mo = end_model(ring, p, {mats[0], mats[1], mats[2], X});
  REQUIRE(check_curved(mo.dg, &why));
  CHECK(mo.sub_flat);
  CHECK_FALSE(detail::vec_zero(mo.dg.curv));
  auto ideal = leg_levels(p, 4, 1);
  CHECK(in_span(ideal[2], mo.dg.curv));

  // here the fibers do not commute, so a wrong curvature element breaks
  // the squared-differential identity
  auto wrong_r = mo.dg;
  wrong_r.curv[1] += 1;
  CHECK_FALSE(check_curved(wrong_r, &why));

  // and a corrupted product table violates the Leibniz rule somewhere
  auto wrong_m = mo.dg;
  wrong_m.mul[{1, 1}](0, 0) += 1;
  CHECK_FALSE(check_curved(wrong_m, &why));
}

TEST_CASE("products of ideal elements fill the deeper leg levels") {
  QRing ring;
  auto p = make_pair(ring, gl2(ring), {2});  // three quotient directions
  auto mats = std_rep_mats(ring);
  RMat<QRing> Z(ring, 2, 2);
  auto mo = end_model(ring, p, {mats[0], mats[1], mats[2], Z});

  auto ideal = leg_levels(p, 4, 1);
  for (int k = 2; k <= 3; ++k) {
    auto pk = ideal_power(mo.dg, ideal, k);
    auto gk = leg_levels(p, 4, k);
    for (int n = 0; n <= 4; ++n) {
      INFO("power " << k << " degree " << n);
      CHECK(rank_of(pk[size_t(n)]) == gk[size_t(n)].cols());
      for (int c = 0; c < pk[size_t(n)].cols(); ++c)
        CHECK(in_span(gk[size_t(n)], pk[size_t(n)].col(c)));
      for (int c = 0; c < gk[size_t(n)].cols(); ++c)
        CHECK(in_span(pk[size_t(n)], gk[size_t(n)].col(c)));
    }
  }
}

TEST_CASE("obstructed extension: the curvature class survives") {
  QRing ring;
  auto mo = line_fixture(ring);
  auto at = curved_atiyah(mo);
  CHECK_FALSE(at.vanishes);
  REQUIRE(at.cls.size() == 1);
  CHECK(at.cls[0] == Rat(-1));
  CHECK(at.h.dim(2) == 1);
  std::string why;
  CHECK(at.quotient.cx.validate(&why));
}

TEST_CASE("unobstructed extension: witness flattens it exactly") {
  QRing ring;
  auto p = make_pair(ring, gl2(ring), {0, 1, 2});
  auto mats = std_rep_mats(ring);
  RMat<QRing> X(ring, 2, 2);
  X.at(0, 1) = 1;
  X.at(1, 1) = rat(1, 2);
  auto mo = end_model(ring, p, {mats[0], mats[1], mats[2], X});

  auto at = curved_atiyah(mo);
  CHECK(at.vanishes);
  for (const auto& c : at.cls) CHECK(c == 0);

  // with a single quotient direction the ideal square is zero, so the
  // twisted extension is flat on the nose
  auto flat = twist(mo.dg, at.witness);
  CHECK(detail::vec_zero(flat.curv));
  std::string why;
  CHECK(check_curved(flat, &why));
}

TEST_CASE("twisting by one-leg forms never moves the class") {
  QRing ring;
  std::mt19937 g(2026);
  auto mo = line_fixture(ring);
  auto base = curved_atiyah(mo);

  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Rat> x(size_t(mo.dg.dim(1)), Rat(0));
    // degree-one basis is (x', y') here; only x' carries a quotient leg
    x[0] = rand_rat(g);
    auto mo2 = mo;
    mo2.dg = twist(mo.dg, x);
    std::string why;
    REQUIRE(check_curved(mo2.dg, &why));
    auto at2 = curved_atiyah(mo2);
    CHECK(at2.quotient.cx.d == base.quotient.cx.d);
    CHECK(at2.cls == base.cls);
    CHECK_FALSE(at2.vanishes);
  }

  // round trip: untwisting restores differential and curvature
  std::vector<Rat> x(size_t(mo.dg.dim(1)), Rat(0));
  x[0] = rat(3, 2);
  std::vector<Rat> nx(x);
  for (auto& v : nx) v = -v;
  auto round = twist(twist(mo.dg, x), nx);
  CHECK(round.d == mo.dg.d);
  CHECK(round.curv == mo.dg.curv);
}

TEST_CASE("twist by a connection change matches rebuilding the model") {
  QRing ring;
  std::mt19937 g(7);
  auto p = make_pair(ring, gl2(ring), {0, 1, 2});
  auto mats = std_rep_mats(ring);
  RMat<QRing> X(ring, 2, 2);
  X.at(0, 1) = 1;
  auto mo = end_model(ring, p, {mats[0], mats[1], mats[2], X});

  // change the extension along the center by a random matrix
  RMat<QRing> Y(ring, 2, 2);
  for (auto& v : Y.a) v = rand_rat(g);
  auto mo2 = end_model(ring, p, {mats[0], mats[1], mats[2], rm_add(ring, X, Y)});

  // the same change as a twist: the one-form z' tensor Y
  std::vector<Rat> x(size_t(mo.dg.dim(1)), Rat(0));
  for (int e = 0; e < 4; ++e) x[size_t(3 * 4 + e)] = Y.a[size_t(e)];
  auto tw = twist(mo.dg, x);
  CHECK(tw.d == mo2.dg.d);
  CHECK(tw.curv == mo2.dg.curv);

  auto a1 = curved_atiyah(mo);
  auto a2 = curved_atiyah(mo2);
  CHECK(a1.vanishes);
  CHECK(a2.vanishes);
  CHECK(a1.cls == a2.cls);
}

TEST_CASE("fiber trace is a chain map killing graded commutators") {
  QRing ring;
  std::string why;

  auto mo = line_fixture(ring);
  auto tm = trace_maps(ring, mo);
  CHECK(check_trace(mo, tm, &why));
  // trace of the curvature is the scalar form -x'^y'
  auto trr = tm.tr[2].apply(mo.dg.curv);
  REQUIRE(trr.size() == 1);
  CHECK(trr[0] == Rat(-1));

  auto p = make_pair(ring, gl2(ring), {2});
  auto mats = std_rep_mats(ring);
  RMat<QRing> Z(ring, 2, 2);
  Z.at(1, 0) = rat(1, 3);
  auto mo2 = end_model(ring, p, {mats[0], mats[1], mats[2], Z});
  auto tm2 = trace_maps(ring, mo2);
  CHECK(check_trace(mo2, tm2, &why));
}
