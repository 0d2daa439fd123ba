#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "algebroid.hpp"
#include "spectral.hpp"

namespace liekit {

/// An algebroid together with a subalgebroid spanned by a subset of its
/// generators. `sub` and `comp` are complementary increasing index sets.
struct LiePair {
  PointAlgebroid L;
  std::vector<int> sub;
  std::vector<int> comp;

  int q() const { return int(comp.size()); }

  /// The subalgebroid on its own generators (point tier: anchors trivial).
  PointAlgebroid subalgebroid(const QRing& ring) const {
    std::vector<std::string> names;
    for (int i : sub) names.push_back(L.names[size_t(i)]);
    auto a = PointAlgebroid::make(ring, names);
    for (size_t i = 0; i < sub.size(); ++i)
      for (size_t j = 0; j < sub.size(); ++j)
        for (size_t k = 0; k < sub.size(); ++k)
          a.c[i][j][k] = L.c[size_t(sub[i])][size_t(sub[j])][size_t(sub[k])];
    return a;
  }
};

/// Builds the pair and checks that `sub` really spans a subalgebroid:
/// brackets of sub generators may not leave the span.
inline LiePair make_pair(const QRing& ring, PointAlgebroid L, std::vector<int> sub) {
  std::sort(sub.begin(), sub.end());
  LiePair p;
  std::vector<bool> in(size_t(L.rank), false);
  for (int i : sub) {
    if (i < 0 || i >= L.rank || in[size_t(i)]) throw std::domain_error("make_pair: bad index set");
    in[size_t(i)] = true;
  }
  for (int i = 0; i < L.rank; ++i)
    if (!in[size_t(i)]) p.comp.push_back(i);
  for (int i : sub)
    for (int j : sub)
      for (int k : p.comp)
        if (!ring.is_zero(L.c[size_t(i)][size_t(j)][size_t(k)]))
          throw std::domain_error("make_pair: generators do not span a subalgebroid ([" +
                                  L.names[size_t(i)] + "," + L.names[size_t(j)] + "] leaves it)");
  p.L = std::move(L);
  p.sub = std::move(sub);
  return p;
}

/// Flat action of the subalgebroid on the quotient: the class of [a, b] for
/// any lift b. One q x q matrix per sub generator, columns over comp.
inline std::vector<RMat<QRing>> bott_connection(const QRing& ring, const LiePair& p) {
  std::vector<RMat<QRing>> out;
  const int q = p.q();
  for (int a : p.sub) {
    RMat<QRing> m(ring, q, q);
    for (int v = 0; v < q; ++v)
      for (int u = 0; u < q; ++u)
        m.at(u, v) = p.L.c[size_t(a)][size_t(p.comp[size_t(v)])][size_t(p.comp[size_t(u)])];
    out.push_back(m);
  }
  return out;
}

/// Dual action on the annihilator side: minus the transpose.
inline std::vector<RMat<QRing>> bott_dual(const QRing& ring, const LiePair& p) {
  auto b = bott_connection(ring, p);
  for (auto& m : b) {
    RMat<QRing> t(ring, m.cols, m.rows);
    for (int i = 0; i < m.rows; ++i)
      for (int j = 0; j < m.cols; ++j) t.at(j, i) = ring.neg(m.at(i, j));
    m = t;
  }
  return b;
}

/// Derivation extension of a q x q matrix action to the r-th wedge power.
inline RMat<QRing> wedge_power_action(const QRing& ring, int q, int r, const RMat<QRing>& m) {
  auto tuples = combinations(q, r);
  RMat<QRing> out(ring, int(tuples.size()), int(tuples.size()));
  for (int col = 0; col < int(tuples.size()); ++col) {
    const auto& t = tuples[size_t(col)];
    for (int pos = 0; pos < r; ++pos)
      for (int u = 0; u < q; ++u) {
        const Rat& coeff = m.at(u, t[size_t(pos)]);
        if (coeff == 0) continue;
        std::vector<int> rest;
        for (int z = 0; z < r; ++z)
          if (z != pos) rest.push_back(t[size_t(z)]);
        std::vector<int> merged;
        int sgn = tuple_insert(rest, u, merged);
        if (sgn == 0) continue;
        // the new leg starts in slot pos, so sorting it costs pos more swaps
        if (pos % 2) sgn = -sgn;
        out.at(comb_index(merged, q), col) += Rat(sgn) * coeff;
      }
  }
  return out;
}

inline RMat<QRing> kron(const QRing& ring, const RMat<QRing>& x, const RMat<QRing>& y) {
  RMat<QRing> out(ring, x.rows * y.rows, x.cols * y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) {
      if (x.at(i, j) == 0) continue;
      for (int a = 0; a < y.rows; ++a)
        for (int b = 0; b < y.cols; ++b)
          out.at(i * y.rows + a, j * y.cols + b) = x.at(i, j) * y.at(a, b);
    }
  return out;
}

/// A (x) I + I (x) B on a tensor product, first factor major.
inline RMat<QRing> kron_sum(const QRing& ring, const RMat<QRing>& x, const RMat<QRing>& y) {
  return rm_add(ring, kron(ring, x, RMat<QRing>::identity(ring, y.rows)),
                kron(ring, RMat<QRing>::identity(ring, x.rows), y));
}

namespace detail {

inline int compcount(const LiePair& p, const std::vector<int>& t) {
  int r = 0;
  size_t ci = 0;
  for (int x : t) {
    while (ci < p.comp.size() && p.comp[ci] < x) ++ci;
    if (ci < p.comp.size() && p.comp[ci] == x) ++r;
  }
  return r;
}

inline bool is_comp(const LiePair& p, int i) {
  return std::binary_search(p.comp.begin(), p.comp.end(), i);
}

/// position of i inside p.sub or p.comp
inline int pos_in(const std::vector<int>& v, int i) {
  return int(std::lower_bound(v.begin(), v.end(), i) - v.begin());
}

}  // namespace detail

/// Coordinate spans, per degree, of the basis forms with at least k
/// quotient-direction legs, for a complex with `fiber` coefficients per tuple.
inline std::vector<QMat> leg_levels(const LiePair& p, int fiber, int k) {
  std::vector<QMat> out;
  for (int n = 0; n <= p.L.rank; ++n) {
    std::vector<int> cols;
    int col = 0;
    for (const auto& t : combinations(p.L.rank, n)) {
      int cc = detail::compcount(p, t);
      for (int a = 0; a < fiber; ++a, ++col)
        if (cc >= k) cols.push_back(col);
    }
    QMat m(int(binom(p.L.rank, n)) * fiber, int(cols.size()));
    for (int j = 0; j < int(cols.size()); ++j) m(cols[size_t(j)], j) = 1;
    out.push_back(m);
  }
  return out;
}

/// Filtration of the standard complex by the number of quotient-direction
/// legs: level p is spanned by basis forms with at least p of them.
inline FilteredComplex leray_filtration(const QRing& ring, const LiePair& p,
                                        const ModuleAction<QRing>& act) {
  FilteredComplex fc;
  fc.c = standard_complex(ring, p.L, act);
  const int fiber = act.crows() * act.ccols();
  fc.levels.resize(size_t(p.q()) + 1);
  for (int lv = 0; lv <= p.q(); ++lv) fc.levels[size_t(lv)] = leg_levels(p, fiber, lv);
  return fc;
}

/// The r-th graded piece of the filtration, rebased to live in degrees
/// 0..rank(sub), together with the comparison to the standard complex of the
/// subalgebroid with coefficients in wedge^r of the dual quotient tensor E.
struct GradedPiece {
  int r = 0;
  CochainComplex piece;        // induced differential times (-1)^r
  CochainComplex target;
  std::vector<QMat> phi;       // piece degree k -> target degree k
  bool chain_map = false;      // phi d_piece == d_target phi, all degrees
  bool bijective = false;
};

inline GradedPiece graded_piece(const QRing& ring, const LiePair& p,
                                const ModuleAction<QRing>& act, int r) {
  GradedPiece gp;
  gp.r = r;
  const int q = p.q();
  const int na = int(p.sub.size());
  const int m = act.crows() * act.ccols();
  if (r < 0 || r > q) throw std::domain_error("graded_piece: level out of range");

  // basis of the piece at degree k: tuples of size r+k with exactly r
  // quotient legs, times the fiber
  std::vector<std::vector<std::vector<int>>> basis(size_t(na) + 1);
  for (int k = 0; k <= na; ++k)
    for (const auto& t : combinations(p.L.rank, r + k))
      if (detail::compcount(p, t) == r) basis[size_t(k)].push_back(t);

  gp.piece.lo = 0;
  for (int k = 0; k <= na; ++k) gp.piece.dims.push_back(int(basis[size_t(k)].size()) * m);
  gp.piece.labels.resize(size_t(na) + 1);
  for (int k = 0; k <= na; ++k)
    for (const auto& t : basis[size_t(k)])
      for (int a = 0; a < m; ++a) {
        std::string lbl = detail::tuple_label(p.L.names, t);
        if (m > 1) lbl += ":e" + std::to_string(a);
        gp.piece.labels[size_t(k)].push_back(lbl);
      }

  auto row_of = [&](int k, const std::vector<int>& t, int a) -> int {
    const auto& bs = basis[size_t(k)];
    auto it = std::lower_bound(bs.begin(), bs.end(), t);
    return int(it - bs.begin()) * m + a;
  };

  const Rat shift_sign = (r % 2 == 0) ? Rat(1) : Rat(-1);
  for (int k = 0; k <= na; ++k) {
    if (k == na) {
      gp.piece.d.push_back(QMat(0, gp.piece.dims[size_t(k)]));
      continue;
    }
    QMat d(gp.piece.dims[size_t(k + 1)], gp.piece.dims[size_t(k)]);
    int col = 0;
    for (const auto& t : basis[size_t(k)])
      for (int a = 0; a < m; ++a, ++col) {
        PointForm w = PointForm::zero(ring, p.L.rank, r + k, act.crows(), act.ccols());
        w.at(t).a[size_t(a)] = 1;
        auto dw = derham(ring, p.L, act, w);
        for (const auto& tt : combinations(p.L.rank, r + k + 1)) {
          if (detail::compcount(p, tt) != r) continue;  // deeper terms die in the quotient
          const auto& mat = dw.at(tt);
          for (int b = 0; b < m; ++b)
            if (mat.a[size_t(b)] != 0) d(row_of(k + 1, tt, b), col) += shift_sign * mat.a[size_t(b)];
        }
      }
    gp.piece.d.push_back(d);
  }

  // target: subalgebroid acting on wedge^r dual quotient tensor the module
  auto A = p.subalgebroid(ring);
  auto wdual = bott_dual(ring, p);
  std::vector<RMat<QRing>> conn;
  std::vector<std::string> fiber_names;
  const int wr = int(binom(q, r));
  for (size_t i = 0; i < p.sub.size(); ++i) {
    RMat<QRing> w = wedge_power_action(ring, q, r, wdual[i]);
    RMat<QRing> c = (act.kind == ActionKind::scalar)
                        ? RMat<QRing>(ring, 1, 1)
                        : (act.kind == ActionKind::vect
                               ? act.conn[size_t(p.sub[i])]
                               : RMat<QRing>(ring, m, m));  // endo handled below
    if (act.kind == ActionKind::endo) {
      // commutator action on matrix entries, row-major: C (x) I - I (x) C^T
      const auto& cm = act.conn[size_t(p.sub[i])];
      RMat<QRing> ct(ring, cm.cols, cm.rows);
      for (int ii = 0; ii < cm.rows; ++ii)
        for (int jj = 0; jj < cm.cols; ++jj) ct.at(jj, ii) = -cm.at(ii, jj);
      c = kron_sum(ring, cm, ct);
    }
    conn.push_back(kron_sum(ring, w, c));
  }
  {
    auto wedge_tuples = combinations(q, r);
    for (const auto& pt : wedge_tuples) {
      std::vector<int> full;
      for (int z : pt) full.push_back(p.comp[size_t(z)]);
      std::string base = detail::tuple_label(p.L.names, full);
      for (int a = 0; a < m; ++a)
        fiber_names.push_back(m > 1 ? base + ":e" + std::to_string(a) : base);
    }
  }
  gp.target = standard_complex(ring, A, ModuleAction<QRing>::module_action(conn, fiber_names));

  // comparison: split each tuple into quotient legs (to the front) and sub
  // legs, with the unshuffle sign
  for (int k = 0; k <= na; ++k) {
    QMat f(gp.target.dim(k), gp.piece.dims[size_t(k)]);
    int col = 0;
    for (const auto& t : basis[size_t(k)])
      for (int a = 0; a < m; ++a, ++col) {
        std::vector<bool> mark;
        std::vector<int> ppart, spart;
        for (int x : t) {
          bool c = detail::is_comp(p, x);
          mark.push_back(c);
          if (c)
            ppart.push_back(detail::pos_in(p.comp, x));
          else
            spart.push_back(detail::pos_in(p.sub, x));
        }
        int sgn = unshuffle_sign(mark);
        int fiber_idx = comb_index(ppart, q) * m + a;
        int row = comb_index(spart, na) * (wr * m) + fiber_idx;
        f(row, col) = sgn;
      }
    gp.phi.push_back(f);
  }

  gp.chain_map = true;
  for (int k = 0; k < na; ++k) {
    QMat lhs = gp.phi[size_t(k + 1)] * gp.piece.d[size_t(k)];
    QMat rhs = gp.target.diff(k) * gp.phi[size_t(k)];
    if (!(lhs - rhs).is_zero()) gp.chain_map = false;
  }
  gp.bijective = true;
  for (int k = 0; k <= na; ++k) {
    const QMat& f = gp.phi[size_t(k)];
    if (f.rows() != f.cols() || rank_of(f) != f.rows()) gp.bijective = false;
  }
  return gp;
}

/// First page dimensions computed piece by piece, keyed by (p, q).
inline std::map<std::pair<int, int>, int> leray_E1_dims(const QRing& ring, const LiePair& p,
                                                        const ModuleAction<QRing>& act) {
  std::map<std::pair<int, int>, int> out;
  for (int r = 0; r <= p.q(); ++r) {
    auto gp = graded_piece(ring, p, act, r);
    auto co = cohomology(gp.target);
    for (int k = 0; k <= int(p.sub.size()); ++k)
      if (co.dim(k) > 0) out[{r, k}] = co.dim(k);
  }
  return out;
}

}  // namespace liekit
