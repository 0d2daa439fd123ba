#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "liekit/tot.hpp"

using namespace liekit;

namespace {

AltCochain random_alt(const CechLevels& L, int level, int q, std::mt19937& rng) {
  std::uniform_int_distribution<int> pick(-4, 4);
  AltCochain a;
  a.level = level;
  a.q = q;
  for (const auto& t : detail::increasing_tuples(level)) {
    int d = detail::block_dim(L.pieces[size_t(q)], detail::tuple_kind(t));
    std::vector<Rat> blk(size_t(d), Rat(0));
    for (auto& v : blk) v = Rat(pick(rng));
    a.block.push_back(std::move(blk));
  }
  return a;
}

bool tot_equal(const TotElement& a, const TotElement& b) {
  if (a.deg != b.deg || a.x.size() != b.x.size()) return false;
  for (size_t n = 0; n < a.x.size(); ++n)
    for (size_t qi = 0; qi < a.x[n].size(); ++qi)
      for (size_t i = 0; i < a.x[n][qi].size(); ++i)
        if (!detail::sf_sub(a.x[n][qi][i], b.x[n][qi][i]).is_zero()) return false;
  return true;
}

/// component-0 inclusion of a line cover into an extension cover, levelwise
QMat level_inc(const CechLevels& sub, const CechLevels& mid, int n) {
  QMat m(mid.dg.levels[size_t(n)].dim(0), sub.dg.levels[size_t(n)].dim(0));
  for (size_t ti = 0; ti < sub.tuples[size_t(n)].size(); ++ti) {
    int kind = detail::tuple_kind(sub.tuples[size_t(n)][ti]);
    SectionBasis sb = kind == 2 ? overlap_basis(sub.pieces[0]) : chart_basis(sub.pieces[0]);
    SectionBasis mb = kind == 2 ? overlap_basis(mid.pieces[0]) : chart_basis(mid.pieces[0]);
    for (int j = 0; j < sb.dim(); ++j) {
      auto [comp, e] = sb.comp_exp(j);
      m(mid.offs[size_t(n)][0][ti] + mb.index(0, e), sub.offs[size_t(n)][0][ti] + j) = 1;
    }
  }
  return m;
}

/// component-1 projection of an extension cover onto a line cover, levelwise
QMat level_proj(const CechLevels& mid, const CechLevels& quo, int n) {
  QMat m(quo.dg.levels[size_t(n)].dim(0), mid.dg.levels[size_t(n)].dim(0));
  for (size_t ti = 0; ti < quo.tuples[size_t(n)].size(); ++ti) {
    int kind = detail::tuple_kind(quo.tuples[size_t(n)][ti]);
    SectionBasis qb = kind == 2 ? overlap_basis(quo.pieces[0]) : chart_basis(quo.pieces[0]);
    SectionBasis mb = kind == 2 ? overlap_basis(mid.pieces[0]) : chart_basis(mid.pieces[0]);
    for (int j = 0; j < qb.dim(); ++j) {
      auto [comp, e] = qb.comp_exp(j);
      m(quo.offs[size_t(n)][0][ti] + j, mid.offs[size_t(n)][0][ti] + mb.index(1, e)) = 1;
    }
  }
  return m;
}

}  // namespace

TEST_CASE("cover levels satisfy the chain map and cosimplicial identities") {
  std::string why;

  auto L = cech_levels(line_bundle(4, 2), 3);
  REQUIRE(L.dg.validate(&why));
  REQUIRE(L.dg.top() == 3);
  // two chart blocks of dimension 5 plus one overlap block of dimension 7
  // per mixed tuple
  CHECK(L.dg.levels[0].dim(0) == 10);
  CHECK(L.dg.levels[1].dim(0) == 24);
  CHECK(L.dg.levels[2].dim(0) == 52);
  CHECK(L.dg.levels[3].dim(0) == 108);

  auto D = de_rham_levels(4, 4);
  REQUIRE(D.dg.validate(&why));
  REQUIRE(D.dg.degrees() == 2);

  auto bad = L;
  bad.dg.dl[1][0][0](0, 0) += 1;
  CHECK_FALSE(bad.dg.validate(&why));
  CHECK(why.find("cosimplicial") != std::string::npos);

  auto skew = D;
  skew.dg.levels[1].d[0](0, 0) += 1;
  CHECK_FALSE(skew.dg.validate(&why));
  CHECK(why.find("chain map") != std::string::npos);
}

TEST_CASE("the totalization differential squares to zero") {
  auto D = de_rham_levels(4, 4);
  std::mt19937 rng(2026);
  for (int level = 0; level <= 1; ++level)
    for (int q = 0; q <= 1; ++q)
      for (int rep = 0; rep < 3; ++rep) {
        auto a = random_alt(D, level, q, rng);
        auto x = elementary_section(D, a);
        auto dx = d_tot(D.dg, x);
        CHECK(tot_compatible(D.dg, dx));
        CHECK(d_tot(D.dg, dx).is_zero());
      }
}

TEST_CASE("integration is a chain map split by the elementary sections") {
  auto D = de_rham_levels(5, 4);
  auto L = cech_levels(line_bundle(5, -2), 4);
  std::mt19937 rng(77);

  for (int level = 0; level <= 1; ++level)
    for (int q = 0; q <= 1; ++q)
      for (int rep = 0; rep < 4; ++rep) {
        auto a = random_alt(D, level, q, rng);
        auto x = elementary_section(D, a);
        CHECK(x.truncation_exact);

        auto c = whitney_integrate(D.dg, x);
        auto part = alt_part(D, c, level, q);
        REQUIRE(part.size() == a.block.size());
        for (size_t ti = 0; ti < part.size(); ++ti) CHECK(part[ti] == a.block[ti]);

        CHECK(whitney_integrate(D.dg, d_tot(D.dg, x)) == cech_diff(D.dg, c));
      }

  for (int level = 0; level <= 1; ++level)
    for (int rep = 0; rep < 4; ++rep) {
      auto a = random_alt(L, level, 0, rng);
      auto x = elementary_section(L, a);
      CHECK(x.truncation_exact);
      auto c = whitney_integrate(L.dg, x);
      auto part = alt_part(L, c, level, 0);
      for (size_t ti = 0; ti < part.size(); ++ti) CHECK(part[ti] == a.block[ti]);
      CHECK(whitney_integrate(L.dg, d_tot(L.dg, x)) == cech_diff(L.dg, c));
    }

  // the zero cochain lifts to the zero element
  AltCochain z;
  z.level = 1;
  z.q = 0;
  z.block = {std::vector<Rat>(size_t(overlap_basis(D.pieces[0]).dim()), Rat(0))};
  CHECK(elementary_section(D, z).is_zero());

  // a corrupted component is named by its failing face
  auto a = random_alt(D, 0, 0, rng);
  auto x = elementary_section(D, a);
  x.x[1][0][0] = sf_add(x.x[1][0][0], SimplexForm::constant(1, Rat(1)));
  std::string why;
  CHECK_FALSE(tot_compatible(D.dg, x, &why));
  CHECK(why.find("(k=") != std::string::npos);
  CHECK_THROWS_AS(tot_assemble(D.dg, 0, x.x, 3), std::invalid_argument);
}

TEST_CASE("global sections include as constant forms") {
  auto L = cech_levels(line_bundle(4, 2), 4);
  SectionBasis ch = chart_basis(L.pieces[0]);

  // t on chart zero glues with s on chart one across t^2
  AltCochain a;
  a.level = 0;
  a.q = 0;
  a.block.assign(2, std::vector<Rat>(size_t(ch.dim()), Rat(0)));
  a.block[0][size_t(ch.index(0, 1))] = 1;
  a.block[1][size_t(ch.index(0, 1))] = 1;

  auto xi = iota(L, a);
  CHECK(xi.truncation_exact);
  CHECK(tot_equal(xi, elementary_section(L, a)));

  auto c = whitney_integrate(L.dg, xi);
  auto part = alt_part(L, c, 0, 0);
  CHECK(part[0] == a.block[0]);
  CHECK(part[1] == a.block[1]);

  // constants in a flat sheaf are closed
  auto D = de_rham_levels(4, 4);
  AltCochain k;
  k.level = 0;
  k.q = 0;
  k.block.assign(2, std::vector<Rat>(size_t(chart_basis(D.pieces[0]).dim()), Rat(0)));
  k.block[0][0] = 3;
  k.block[1][0] = 3;
  auto xk = iota(D, k);
  CHECK(d_tot(D.dg, xk).is_zero());

  // blocks that do not glue are rejected
  auto bad = a;
  bad.block[1][size_t(ch.index(0, 1))] = 2;
  CHECK_THROWS_AS(iota(L, bad), std::invalid_argument);
}

TEST_CASE("truncation certificates are conservative and honest") {
  auto L = cech_levels(line_bundle(3, 0), 4);

  // degrees beyond the stored levels are never certified
  auto deep = tot_assemble(L.dg, 4, tot_zero(L.dg, 4, 3).x, 3);
  CHECK_FALSE(deep.truncation_exact);

  // t1 t2 dt1 + t1 t2 dt2 restricts to zero on every face of the
  // two-simplex, so faces alone cannot certify it; it lies outside the
  // elementary form span and must be flagged
  SimplexForm ghost = SimplexForm::zero(2, 1);
  ghost.add({{1, 1}, {1}}, Rat(1));
  ghost.add({{1, 1}, {2}}, Rat(1));
  for (int j = 0; j <= 2; ++j) CHECK(coface_pullback(ghost, j).is_zero());

  auto comps = tot_zero(L.dg, 1, 2).x;
  comps[2][0][0] = ghost;
  auto x = tot_assemble(L.dg, 1, std::move(comps), 2);
  CHECK_FALSE(x.truncation_exact);

  // whereas honest elementary data of the same degree is certified
  std::mt19937 rng(5);
  auto a = random_alt(L, 1, 0, rng);
  CHECK(elementary_section(L, a, 2).truncation_exact);
}

TEST_CASE("the connection obstruction integrates to minus the transition class") {
  for (int n = -2; n <= 3; ++n) {
    auto ct = curved_tot_line(n, 5);
    auto at = line_atiyah(n, 5);

    REQUIRE(ct.cech_class.size() == 1);
    CHECK(ct.cech_class[0] == Rat(-n));
    CHECK(at.cls[0] == Rat(n));

    // the integrated curvature cocycle is exactly minus the log derivative
    REQUIRE(ct.integrated.size() == at.cocycle.size());
    for (size_t i = 0; i < ct.integrated.size(); ++i) {
      Rat neg = -at.cocycle[i];
      CHECK(ct.integrated[i] == neg);
    }

    CHECK(d_tot(ct.levels.dg, ct.curvature).is_zero());
    CHECK(ct.curvature.truncation_exact);
    CHECK(ct.background_zero);
    CHECK(ct.central);
    if (n == 0) CHECK(ct.curvature.is_zero());
  }
}

TEST_CASE("the full cover complex computes the alternating cohomology") {
  std::string why;
  for (int n : {-3, -2, 0, 1, 3}) {
    auto b = line_bundle(6, n);
    auto L = cech_levels(b, 4);
    auto full = full_complex(L, 4);
    REQUIRE(full.validate(&why));

    auto H = cohomology(full);
    auto alt = cech_cohomology(b);
    CHECK(H.dim(0) == alt.h0);
    CHECK(H.dim(1) == alt.h1);
    CHECK(H.dim(2) == 0);
    CHECK(H.dim(3) == 0);
  }

  auto L3 = cech_levels(line_bundle(6, 3), 4);
  CHECK(L3.dg.levels[0].dim(0) == 14);
  CHECK(L3.dg.levels[4].dim(0) == 314);
}

TEST_CASE("extension covers are exact levelwise") {
  const int W = 3, N = 2;
  auto sub = cech_levels(line_bundle(W, -1), N);
  auto mid = cech_levels(extension_bundle(W, -1, 1), N);
  auto quo = cech_levels(line_bundle(W, 1), N);

  std::vector<QMat> incs, projs;
  for (int n = 0; n <= N; ++n) {
    incs.push_back(level_inc(sub, mid, n));
    projs.push_back(level_proj(mid, quo, n));
    int ds = sub.dg.levels[size_t(n)].dim(0);
    int dm = mid.dg.levels[size_t(n)].dim(0);
    int dq = quo.dg.levels[size_t(n)].dim(0);
    CHECK(ds + dq == dm);
    CHECK((projs.back() * incs.back()).is_zero());
    CHECK(rank_of(incs.back()) == ds);
    CHECK(rank_of(projs.back()) == dq);
  }

  // both maps commute with every coface
  for (int n = 1; n <= N; ++n)
    for (int k = 0; k <= n; ++k) {
      CHECK(detail::qm_equal(mid.dg.coface(n, k, 0) * incs[size_t(n) - 1],
                             incs[size_t(n)] * sub.dg.coface(n, k, 0)));
      CHECK(detail::qm_equal(quo.dg.coface(n, k, 0) * projs[size_t(n) - 1],
                             projs[size_t(n)] * mid.dg.coface(n, k, 0)));
    }

  auto hs = cohomology(full_complex(sub, 2));
  auto hm = cohomology(full_complex(mid, 2));
  auto hq = cohomology(full_complex(quo, 2));
  CHECK(hs.dim(0) == 0);
  CHECK(hs.dim(1) == 0);
  CHECK(hm.dim(0) == 2);
  CHECK(hm.dim(1) == 0);
  CHECK(hq.dim(0) == 2);
  CHECK(hq.dim(1) == 0);

  auto alt = cech_cohomology(extension_bundle(W, -1, 1));
  CHECK(alt.h0 == hm.dim(0));
  CHECK(alt.h1 == hm.dim(1));
}

TEST_CASE("a point cover collapses to the endomorphism model") {
  QRing ring;
  auto g = PointAlgebroid::make(ring, {"x", "y"});
  g.set_bracket(ring, 0, 1, 1, Rat(1));
  auto p = make_pair(ring, g, {1});
  RMat<QRing> nx(ring, 1, 1), ny(ring, 1, 1);
  ny.at(0, 0) = 1;

  auto mo = end_model(ring, p, {nx, ny});
  auto dg = curved_tot_point(ring, p, {nx, ny});

  std::string why;
  REQUIRE(check_curved(dg, &why));
  CHECK(dg.lo == mo.dg.lo);
  CHECK(dg.dims == mo.dg.dims);
  CHECK(dg.curv == mo.dg.curv);
  REQUIRE(dg.d.size() == mo.dg.d.size());
  for (size_t i = 0; i < dg.d.size(); ++i) CHECK(detail::qm_equal(dg.d[i], mo.dg.d[i]));
}
