#pragma once

#include <liekit/liepair.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace liekit {

/// Curvature of a module connection over a Lie pair, with the block seen by
/// one subalgebroid leg and one quotient leg pulled out. Flatness along the
/// subalgebroid is the vanishing of the (sub, sub) block.
struct PairCurvature {
  PointForm full;
  bool flat_along_sub = false;
  std::vector<std::vector<RMat<QRing>>> mixed;  // [a][u] = R(sub[a], comp[u])
};

inline PairCurvature pair_curvature(const QRing& ring, const LiePair& p,
                                    const ModuleAction<QRing>& act) {
  PairCurvature pc;
  pc.full = curvature(ring, p.L, act);
  pc.flat_along_sub = true;
  for (size_t a = 0; a < p.sub.size(); ++a)
    for (size_t b = a + 1; b < p.sub.size(); ++b)
      if (!pc.full.at({p.sub[a], p.sub[b]}).is_zero(ring)) pc.flat_along_sub = false;
  const int m = act.m;
  pc.mixed.assign(p.sub.size(),
                  std::vector<RMat<QRing>>(size_t(p.q()), RMat<QRing>(ring, m, m)));
  for (size_t a = 0; a < p.sub.size(); ++a)
    for (size_t u = 0; u < p.comp.size(); ++u) {
      int i = p.sub[a], j = p.comp[u];
      pc.mixed[a][u] =
          i < j ? pc.full.at({i, j}) : rm_neg(ring, pc.full.at({j, i}));
    }
  return pc;
}

/// Subalgebroid action on (L/A)^dual tensor End(E): minus-transpose Bott on
/// the first factor, commutator with the restricted connection on the second.
inline ModuleAction<QRing> atiyah_coefficients(const QRing& ring, const LiePair& p,
                                               const ModuleAction<QRing>& act) {
  const int m = act.m;
  auto wdual = bott_dual(ring, p);
  std::vector<RMat<QRing>> conn;
  for (size_t i = 0; i < p.sub.size(); ++i) {
    const auto& cm = act.conn[size_t(p.sub[i])];
    RMat<QRing> ct(ring, m, m);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) ct.at(c, r) = ring.neg(cm.at(r, c));
    conn.push_back(kron_sum(ring, wdual[i], kron_sum(ring, cm, ct)));
  }
  std::vector<std::string> fiber_names;
  for (int u = 0; u < p.q(); ++u) {
    std::string base = p.L.names[size_t(p.comp[size_t(u)])] + "'";
    for (int e = 0; e < m * m; ++e)
      fiber_names.push_back(m > 1 ? base + ":e" + std::to_string(e) : base);
  }
  return ModuleAction<QRing>::module_action(std::move(conn), std::move(fiber_names));
}

/// Obstruction to choosing an extension whose curvature has no mixed block.
/// The cocycle lives in degree one of C^*(A; (L/A)^dual tensor End E); its
/// class does not depend on the values of the connection on the quotient
/// directions. When the class vanishes, `witness[u]` added to the connection
/// on the u-th quotient direction kills the mixed block outright, and that is
/// verified entry by entry before returning.
struct AtiyahClass {
  PairCurvature curv;
  CochainComplex target;
  Cohomology h;
  std::vector<Rat> cocycle;
  std::vector<Rat> cls;
  bool vanishes = false;
  std::vector<RMat<QRing>> witness;
};

inline AtiyahClass atiyah_class(const QRing& ring, const LiePair& p,
                                const ModuleAction<QRing>& act) {
  if (act.kind == ActionKind::scalar || int(act.conn.size()) != p.L.rank)
    throw std::domain_error("atiyah_class: need a connection on every generator");
  AtiyahClass out;
  out.curv = pair_curvature(ring, p, act);
  if (!out.curv.flat_along_sub)
    throw std::domain_error("atiyah_class: connection is not flat along the subalgebroid");
  const int m = act.m;
  const int q = p.q();
  const int fiber = q * m * m;
  out.target = standard_complex(ring, p.subalgebroid(ring), atiyah_coefficients(ring, p, act));

  std::vector<Rat> z(size_t(int(p.sub.size()) * fiber), Rat(0));
  for (size_t a = 0; a < p.sub.size(); ++a)
    for (int u = 0; u < q; ++u)
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
          z[a * size_t(fiber) + size_t(u * m * m + r * m + c)] =
              out.curv.mixed[a][size_t(u)].at(r, c);
  out.cocycle = z;
  {
    std::vector<Rat> dz = out.target.diff(1).apply(z);
    for (const Rat& x : dz)
      if (x != 0) throw std::logic_error("atiyah_class: mixed curvature is not a cocycle");
  }
  out.h = cohomology(out.target);
  out.cls = out.h.class_coords(1, z);

  std::vector<Rat> mz(z.size());
  for (size_t i = 0; i < z.size(); ++i) mz[i] = -z[i];
  auto w = solve(out.target.diff(0), mz);
  out.vanishes = w.has_value();
  if (w) {
    for (int u = 0; u < q; ++u) {
      RMat<QRing> delta(ring, m, m);
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) delta.at(r, c) = (*w)[size_t(u * m * m + r * m + c)];
      out.witness.push_back(delta);
    }
    ModuleAction<QRing> fixed = act;
    for (int u = 0; u < q; ++u)
      fixed.conn[size_t(p.comp[size_t(u)])] =
          rm_add(ring, fixed.conn[size_t(p.comp[size_t(u)])], out.witness[size_t(u)]);
    auto check = pair_curvature(ring, p, fixed);
    for (const auto& row : check.mixed)
      for (const auto& mat : row)
        if (!mat.is_zero(ring))
          throw std::logic_error("atiyah_class: witness fails the exact mixed-curvature check");
  }
  return out;
}

/// Connection on every generator built from a projection onto the
/// subalgebroid that is the identity on it and commutes with its brackets.
/// The mixed curvature of the result vanishes identically.
inline std::vector<RMat<QRing>> extend_by_projection(const QRing& ring, const LiePair& p,
                                                     const std::vector<RMat<QRing>>& subconn,
                                                     const QMat& proj) {
  const int n = p.L.rank;
  const int na = int(p.sub.size());
  if (proj.rows() != na || proj.cols() != n)
    throw std::domain_error("extend_by_projection: projection has the wrong shape");
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j)
      if (proj(i, p.sub[size_t(j)]) != Rat(i == j ? 1 : 0))
        throw std::domain_error("extend_by_projection: not the identity on the subalgebroid");
  for (int ai = 0; ai < na; ++ai)
    for (int y = 0; y < n; ++y) {
      // proj[sub[ai], y] against [sub[ai], proj(y)], both in subalgebroid coordinates
      for (int b = 0; b < na; ++b) {
        Rat lhs(0), rhs(0);
        for (int k = 0; k < n; ++k)
          lhs += proj(b, k) * p.L.c[size_t(p.sub[size_t(ai)])][size_t(y)][size_t(k)];
        for (int u = 0; u < na; ++u)
          rhs += proj(u, y) *
                 p.L.c[size_t(p.sub[size_t(ai)])][size_t(p.sub[size_t(u)])][size_t(p.sub[size_t(b)])];
        if (lhs != rhs)
          throw std::domain_error("extend_by_projection: projection does not commute with brackets");
      }
    }
  const int m = subconn.empty() ? 0 : subconn[0].rows;
  std::vector<RMat<QRing>> conn(size_t(n), RMat<QRing>(ring, m, m));
  for (int i = 0; i < n; ++i)
    for (int b = 0; b < na; ++b)
      if (proj(b, i) != 0)
        conn[size_t(i)] =
            rm_add(ring, conn[size_t(i)], rm_scale(ring, proj(b, i), subconn[size_t(b)]));
  return conn;
}

/// Deterministic bounded hunt for a pair and module whose class is nonzero.
/// Structure constants, connection entries, and subalgebroid choices are all
/// swept in a fixed order, so the first find never moves between runs.
struct SearchBounds {
  int max_rank = 4;
  int max_module_dim = 2;
  long budget = 5000;
};

struct SearchHit {
  PointAlgebroid L;
  std::vector<int> sub;
  int module_dim = 0;
  std::vector<RMat<QRing>> conn;
  std::vector<Rat> cls;
  long examined = 0;
};

namespace detail {

inline const std::vector<Rat>& search_constants() {
  static const std::vector<Rat> order = {Rat(0), Rat(1), Rat(-1), Rat(2), Rat(-2)};
  return order;
}

/// Odometer over `digits` positions, each running through search_constants in
/// order, last position fastest. Returns false once every combination is done.
inline bool next_assignment(std::vector<int>& digits) {
  const int base = int(search_constants().size());
  for (int i = int(digits.size()) - 1; i >= 0; --i) {
    if (++digits[size_t(i)] < base) return true;
    digits[size_t(i)] = 0;
  }
  return false;
}

inline bool closes_under_bracket(const PointAlgebroid& L, const std::vector<int>& sub) {
  std::vector<bool> in(size_t(L.rank), false);
  for (int i : sub) in[size_t(i)] = true;
  for (int a : sub)
    for (int b : sub)
      for (int k = 0; k < L.rank; ++k)
        if (!in[size_t(k)] && L.c[size_t(a)][size_t(b)][size_t(k)] != 0) return false;
  return true;
}

inline bool flat_on_sub(const QRing& ring, const LiePair& p,
                        const std::vector<RMat<QRing>>& sc) {
  for (size_t a = 0; a < p.sub.size(); ++a)
    for (size_t b = a + 1; b < p.sub.size(); ++b) {
      RMat<QRing> r = rm_commutator(ring, sc[a], sc[b]);
      for (size_t u = 0; u < p.sub.size(); ++u)
        r = rm_sub(ring, r,
                   rm_scale(ring,
                            p.L.c[size_t(p.sub[a])][size_t(p.sub[b])][size_t(p.sub[u])],
                            sc[u]));
      if (!r.is_zero(ring)) return false;
    }
  return true;
}

}  // namespace detail

inline std::optional<SearchHit> search_nonvanishing(const QRing& ring,
                                                    SearchBounds bounds = {}) {
  const auto& consts = detail::search_constants();
  long examined = 0;
  static const std::vector<std::string> pool = {"x", "y", "z", "w"};
  for (int rank = 2; rank <= bounds.max_rank; ++rank) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < rank; ++i)
      for (int j = i + 1; j < rank; ++j) pairs.push_back({i, j});
    std::vector<int> digits(pairs.size() * size_t(rank), 0);
    bool more = true;
    while (more) {
      if (++examined > bounds.budget) return std::nullopt;
      PointAlgebroid L = PointAlgebroid::make(
          ring, std::vector<std::string>(pool.begin(), pool.begin() + rank));
      for (size_t pi = 0; pi < pairs.size(); ++pi)
        for (int k = 0; k < rank; ++k)
          L.set_bracket(ring, pairs[pi].first, pairs[pi].second, k,
                        consts[size_t(digits[pi * size_t(rank) + size_t(k)])]);
      if (check_algebroid(ring, L).ok) {
        // subsets by size then by position, smallest first
        for (int sz = 1; sz < rank; ++sz)
          for (const auto& sub : combinations(rank, sz)) {
            if (!detail::closes_under_bracket(L, sub)) continue;
            LiePair p = make_pair(ring, L, sub);
            for (int me = 1; me <= bounds.max_module_dim; ++me) {
              std::vector<int> cd(sub.size() * size_t(me) * size_t(me), 0);
              bool cmore = true;
              while (cmore) {
                if (++examined > bounds.budget) return std::nullopt;
                std::vector<RMat<QRing>> sc;
                for (size_t a = 0; a < sub.size(); ++a) {
                  RMat<QRing> mat(ring, me, me);
                  for (int r = 0; r < me; ++r)
                    for (int c = 0; c < me; ++c)
                      mat.at(r, c) =
                          consts[size_t(cd[(a * size_t(me) + size_t(r)) * size_t(me) + size_t(c)])];
                  sc.push_back(mat);
                }
                if (detail::flat_on_sub(ring, p, sc)) {
                  std::vector<RMat<QRing>> conn(size_t(rank), RMat<QRing>(ring, me, me));
                  for (size_t a = 0; a < sub.size(); ++a) conn[size_t(sub[a])] = sc[a];
                  auto at = atiyah_class(ring, p, ModuleAction<QRing>::module_action(conn, {}));
                  if (!at.vanishes) {
                    SearchHit hit;
                    hit.L = L;
                    hit.sub = sub;
                    hit.module_dim = me;
                    hit.conn = conn;
                    hit.cls = at.cls;
                    hit.examined = examined;
                    return hit;
                  }
                }
                cmore = detail::next_assignment(cd);
              }
            }
          }
      }
      more = detail::next_assignment(digits);
    }
  }
  return std::nullopt;
}

}  // namespace liekit
