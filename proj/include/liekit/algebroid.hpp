#pragma once

#include <functional>
#include <string>
#include <vector>

#include "complex.hpp"
#include "graded.hpp"
#include "laurent.hpp"
#include "matrix.hpp"

namespace liekit {

/// Coefficient ring of the point tier: plain rationals, no derivations.
struct QRing {
  using Elem = Rat;
  struct Deriv {};

  Elem zero() const { return Rat(0); }
  Elem one() const { return Rat(1); }
  Elem add(const Elem& a, const Elem& b) const { return a + b; }
  Elem sub(const Elem& a, const Elem& b) const { return a - b; }
  Elem mul(const Elem& a, const Elem& b) const { return a * b; }
  Elem neg(const Elem& a) const { return -a; }
  Elem scale(const Rat& s, const Elem& a) const { return s * a; }
  bool is_zero(const Elem& a) const { return a == 0; }
  bool flagged(const Elem&) const { return false; }

  Elem apply(const Deriv&, const Elem&) const { return Rat(0); }
  Deriv zero_deriv() const { return {}; }
  Deriv bracket_deriv(const Deriv&, const Deriv&) const { return {}; }
  Deriv combine_deriv(const std::vector<Elem>&, const std::vector<Deriv>&) const { return {}; }
  bool deriv_equal(const Deriv&, const Deriv&) const { return true; }

  int qdim() const { return 1; }
  std::vector<Rat> coords(const Elem& a) const { return {a}; }
  Elem from_coord(int i, const Rat& v) const { return i == 0 ? v : Rat(0); }
  std::string coord_label(int) const { return ""; }
};

/// Coefficient ring of the chart tier: Laurent polynomials in one chart
/// coordinate, truncated to a fixed exponent window. Derivations are
/// multiples of d/dt.
struct WindowRing {
  int lo = 0;
  int hi = 0;

  using Elem = LaurentWindow;
  struct Deriv {
    LaurentWindow coeff;  // coeff(t) * d/dt
  };

  Elem zero() const { return LaurentWindow(lo, hi); }
  Elem one() const { return LaurentWindow::monomial(lo, hi, 0); }
  Elem monomial(int e, const Rat& v = Rat(1)) const {
    return LaurentWindow::monomial(lo, hi, e, v);
  }
  Elem add(const Elem& a, const Elem& b) const { return lw_add(a, b); }
  Elem sub(const Elem& a, const Elem& b) const { return lw_sub(a, b); }
  Elem mul(const Elem& a, const Elem& b) const { return lw_mul_into(a, b, lo, hi); }
  Elem neg(const Elem& a) const { return lw_neg(a); }
  Elem scale(const Rat& s, const Elem& a) const { return lw_scale(s, a); }
  bool is_zero(const Elem& a) const { return a.is_zero(); }
  bool flagged(const Elem& a) const { return a.truncated; }

  Elem apply(const Deriv& d, const Elem& f) const {
    return lw_mul_into(d.coeff, lw_derivative(f), lo, hi);
  }
  Deriv zero_deriv() const { return {zero()}; }
  /// [p d/dt, q d/dt] = (p q' - q p') d/dt
  Deriv bracket_deriv(const Deriv& a, const Deriv& b) const {
    Elem pq = lw_mul_into(a.coeff, lw_derivative(b.coeff), lo, hi);
    Elem qp = lw_mul_into(b.coeff, lw_derivative(a.coeff), lo, hi);
    return {lw_sub(pq, qp)};
  }
  Deriv combine_deriv(const std::vector<Elem>& coeffs, const std::vector<Deriv>& ds) const {
    Elem acc = zero();
    for (size_t i = 0; i < ds.size(); ++i) acc = add(acc, mul(coeffs[i], ds[i].coeff));
    return {acc};
  }
  bool deriv_equal(const Deriv& a, const Deriv& b) const {
    return lw_sub(a.coeff, b.coeff).is_zero();
  }

  int qdim() const { return hi - lo + 1; }
  std::vector<Rat> coords(const Elem& a) const {
    std::vector<Rat> v(size_t(qdim()), Rat(0));
    for (int k = lo; k <= hi; ++k) v[size_t(k - lo)] = a.get(k);
    return v;
  }
  Elem from_coord(int i, const Rat& v) const { return monomial(lo + i, v); }
  std::string coord_label(int i) const { return "t^" + std::to_string(lo + i); }
};

/// Matrix over a coefficient ring; fibers of modules and connection data.
template <class R>
struct RMat {
  int rows = 0, cols = 0;
  std::vector<typename R::Elem> a;

  RMat() = default;
  RMat(const R& ring, int r, int c) : rows(r), cols(c), a(size_t(r) * c, ring.zero()) {}

  typename R::Elem& at(int i, int j) { return a[size_t(i) * cols + j]; }
  const typename R::Elem& at(int i, int j) const { return a[size_t(i) * cols + j]; }

  static RMat identity(const R& ring, int n) {
    RMat m(ring, n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = ring.one();
    return m;
  }

  bool is_zero(const R& ring) const {
    for (const auto& x : a)
      if (!ring.is_zero(x)) return false;
    return true;
  }

  bool flagged(const R& ring) const {
    for (const auto& x : a)
      if (ring.flagged(x)) return true;
    return false;
  }
};

template <class R>
RMat<R> rm_add(const R& ring, const RMat<R>& x, const RMat<R>& y) {
  RMat<R> m(ring, x.rows, x.cols);
  for (size_t i = 0; i < m.a.size(); ++i) m.a[i] = ring.add(x.a[i], y.a[i]);
  return m;
}

template <class R>
RMat<R> rm_sub(const R& ring, const RMat<R>& x, const RMat<R>& y) {
  RMat<R> m(ring, x.rows, x.cols);
  for (size_t i = 0; i < m.a.size(); ++i) m.a[i] = ring.sub(x.a[i], y.a[i]);
  return m;
}

template <class R>
RMat<R> rm_neg(const R& ring, const RMat<R>& x) {
  RMat<R> m(ring, x.rows, x.cols);
  for (size_t i = 0; i < m.a.size(); ++i) m.a[i] = ring.neg(x.a[i]);
  return m;
}

template <class R>
RMat<R> rm_mul(const R& ring, const RMat<R>& x, const RMat<R>& y) {
  RMat<R> m(ring, x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      if (ring.is_zero(x.at(i, k))) continue;
      for (int j = 0; j < y.cols; ++j)
        m.at(i, j) = ring.add(m.at(i, j), ring.mul(x.at(i, k), y.at(k, j)));
    }
  return m;
}

template <class R>
RMat<R> rm_scale_elem(const R& ring, const typename R::Elem& s, const RMat<R>& x) {
  RMat<R> m(ring, x.rows, x.cols);
  for (size_t i = 0; i < m.a.size(); ++i) m.a[i] = ring.mul(s, x.a[i]);
  return m;
}

template <class R>
RMat<R> rm_scale(const R& ring, const Rat& s, const RMat<R>& x) {
  RMat<R> m(ring, x.rows, x.cols);
  for (size_t i = 0; i < m.a.size(); ++i) m.a[i] = ring.scale(s, x.a[i]);
  return m;
}

template <class R>
RMat<R> rm_commutator(const R& ring, const RMat<R>& x, const RMat<R>& y) {
  return rm_sub(ring, rm_mul(ring, x, y), rm_mul(ring, y, x));
}

template <class R>
RMat<R> rm_dmap(const R& ring, const typename R::Deriv& d, const RMat<R>& x) {
  RMat<R> m(ring, x.rows, x.cols);
  for (size_t i = 0; i < m.a.size(); ++i) m.a[i] = ring.apply(d, x.a[i]);
  return m;
}

template <class R>
typename R::Elem rm_trace(const R& ring, const RMat<R>& x) {
  typename R::Elem t = ring.zero();
  for (int i = 0; i < x.rows && i < x.cols; ++i) t = ring.add(t, x.at(i, i));
  return t;
}

/// Lie algebroid presented by generators: bracket structure coefficients
/// c[i][j][k] with [l_i, l_j] = sum_k c[i][j][k] l_k, and the anchor as one
/// derivation of the coefficient ring per generator.
template <class R>
struct Algebroid {
  int rank = 0;
  std::vector<std::string> names;
  std::vector<std::vector<std::vector<typename R::Elem>>> c;
  std::vector<typename R::Deriv> anchor;

  static Algebroid make(const R& ring, std::vector<std::string> gens) {
    Algebroid a;
    a.rank = int(gens.size());
    a.names = std::move(gens);
    const size_t n = size_t(a.rank);
    a.c.assign(n, std::vector<std::vector<typename R::Elem>>(
                      n, std::vector<typename R::Elem>(n, ring.zero())));
    a.anchor.assign(n, ring.zero_deriv());
    return a;
  }

  /// Sets [l_i, l_j] coefficient of l_k, maintaining antisymmetry.
  void set_bracket(const R& ring, int i, int j, int k, const typename R::Elem& v) {
    c[size_t(i)][size_t(j)][size_t(k)] = v;
    c[size_t(j)][size_t(i)][size_t(k)] = ring.neg(v);
  }
};

using PointAlgebroid = Algebroid<QRing>;

struct AlgebroidCheck {
  bool ok = true;
  std::string violation;  // first failing identity, with indices
};

/// Antisymmetry, Jacobi (with anchor derivative terms) and compatibility of
/// the anchor with the bracket. Reports the first violated identity by name.
template <class R>
AlgebroidCheck check_algebroid(const R& ring, const Algebroid<R>& g) {
  AlgebroidCheck out;
  auto fail = [&](std::string w) {
    out.ok = false;
    out.violation = std::move(w);
    return out;
  };
  int n = g.rank;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        auto s = ring.add(g.c[size_t(i)][size_t(j)][size_t(k)], g.c[size_t(j)][size_t(i)][size_t(k)]);
        if (!ring.is_zero(s))
          return fail("antisymmetry(" + std::to_string(i) + "," + std::to_string(j) + ")->" +
                      std::to_string(k));
      }
  // anchor is a morphism: [a(l_i), a(l_j)] = a([l_i, l_j])
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      auto lhs = ring.bracket_deriv(g.anchor[size_t(i)], g.anchor[size_t(j)]);
      auto rhs = ring.combine_deriv(g.c[size_t(i)][size_t(j)], g.anchor);
      if (!ring.deriv_equal(lhs, rhs))
        return fail("anchor_bracket(" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
  // Jacobi with anchor terms on structure coefficients
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          auto acc = ring.apply(g.anchor[size_t(i)], g.c[size_t(j)][size_t(k)][size_t(l)]);
          acc = ring.sub(acc, ring.apply(g.anchor[size_t(j)], g.c[size_t(i)][size_t(k)][size_t(l)]));
          acc = ring.add(acc, ring.apply(g.anchor[size_t(k)], g.c[size_t(i)][size_t(j)][size_t(l)]));
          for (int m = 0; m < n; ++m) {
            acc = ring.add(acc, ring.mul(g.c[size_t(j)][size_t(k)][size_t(m)],
                                         g.c[size_t(i)][size_t(m)][size_t(l)]));
            acc = ring.sub(acc, ring.mul(g.c[size_t(i)][size_t(k)][size_t(m)],
                                         g.c[size_t(j)][size_t(m)][size_t(l)]));
            acc = ring.add(acc, ring.mul(g.c[size_t(i)][size_t(j)][size_t(m)],
                                         g.c[size_t(k)][size_t(m)][size_t(l)]));
          }
          if (!ring.is_zero(acc))
            return fail("jacobi(" + std::to_string(i) + "," + std::to_string(j) + "," +
                        std::to_string(k) + ")->" + std::to_string(l));
        }
  return out;
}

/// Bracket of sections X = sum_i X_i l_i extended by the Leibniz rule:
/// [X, Y]_l = sum_{i,j} X_i Y_j c_ij^l + sum_i X_i a_i(Y_l) - sum_j Y_j a_j(X_l).
template <class R>
std::vector<typename R::Elem> section_bracket(const R& ring, const Algebroid<R>& g,
                                              const std::vector<typename R::Elem>& x,
                                              const std::vector<typename R::Elem>& y) {
  std::vector<typename R::Elem> out(size_t(g.rank), ring.zero());
  for (int l = 0; l < g.rank; ++l) {
    auto acc = ring.zero();
    for (int i = 0; i < g.rank; ++i) {
      for (int j = 0; j < g.rank; ++j)
        acc = ring.add(acc, ring.mul(ring.mul(x[size_t(i)], y[size_t(j)]),
                                     g.c[size_t(i)][size_t(j)][size_t(l)]));
      acc = ring.add(acc, ring.mul(x[size_t(i)], ring.apply(g.anchor[size_t(i)], y[size_t(l)])));
      acc = ring.sub(acc, ring.mul(y[size_t(i)], ring.apply(g.anchor[size_t(i)], x[size_t(l)])));
    }
    out[size_t(l)] = acc;
  }
  return out;
}

/// Forms on the algebroid with matrix coefficients, stored on strictly
/// increasing generator tuples. Coefficient shape 1x1 holds scalar forms,
/// m x 1 module-valued forms, m x m endomorphism-valued forms.
template <class R>
struct RForm {
  int rank = 0, k = 0, rows = 1, cols = 1;
  std::vector<RMat<R>> c;  // indexed by comb_index over combinations(rank, k)

  static RForm zero(const R& ring, int rank, int k, int rows = 1, int cols = 1) {
    RForm f;
    f.rank = rank;
    f.k = k;
    f.rows = rows;
    f.cols = cols;
    f.c.assign(size_t(binom(rank, k)), RMat<R>(ring, rows, cols));
    return f;
  }

  RMat<R>& at(const std::vector<int>& t) { return c[size_t(comb_index(t, rank))]; }
  const RMat<R>& at(const std::vector<int>& t) const { return c[size_t(comb_index(t, rank))]; }

  bool is_zero(const R& ring) const {
    for (const auto& m : c)
      if (!m.is_zero(ring)) return false;
    return true;
  }

  bool flagged(const R& ring) const {
    for (const auto& m : c)
      if (m.flagged(ring)) return true;
    return false;
  }
};

using PointForm = RForm<QRing>;

template <class R>
RForm<R> form_add(const R& ring, const RForm<R>& x, const RForm<R>& y) {
  RForm<R> f = x;
  for (size_t i = 0; i < f.c.size(); ++i) f.c[i] = rm_add(ring, x.c[i], y.c[i]);
  return f;
}

template <class R>
RForm<R> form_sub(const R& ring, const RForm<R>& x, const RForm<R>& y) {
  RForm<R> f = x;
  for (size_t i = 0; i < f.c.size(); ++i) f.c[i] = rm_sub(ring, x.c[i], y.c[i]);
  return f;
}

template <class R>
RForm<R> form_neg(const R& ring, const RForm<R>& x) {
  RForm<R> f = x;
  for (size_t i = 0; i < f.c.size(); ++i) f.c[i] = rm_neg(ring, x.c[i]);
  return f;
}

template <class R>
RForm<R> form_scale(const R& ring, const Rat& s, const RForm<R>& x) {
  RForm<R> f = x;
  for (size_t i = 0; i < f.c.size(); ++i) f.c[i] = rm_scale(ring, s, x.c[i]);
  return f;
}

/// Wedge product over (k, j)-unshuffles with the Koszul sign; matrix
/// coefficients compose, so endomorphism-valued factors multiply in order.
template <class R>
RForm<R> wedge(const R& ring, const RForm<R>& x, const RForm<R>& y) {
  if (x.cols != y.rows) throw std::domain_error("wedge: coefficient shapes do not compose");
  RForm<R> f = RForm<R>::zero(ring, x.rank, x.k + y.k, x.rows, y.cols);
  if (x.k + y.k > x.rank) return f;
  auto tuples = combinations(x.rank, x.k + y.k);
  for (const auto& t : tuples) {
    RMat<R> acc(ring, x.rows, y.cols);
    // choose which positions of t go to the left factor
    for (const auto& pick : combinations(x.k + y.k, x.k)) {
      std::vector<bool> mark(size_t(x.k + y.k), false);
      for (int p : pick) mark[size_t(p)] = true;
      std::vector<int> s1, s2;
      for (int p = 0; p < x.k + y.k; ++p)
        (mark[size_t(p)] ? s1 : s2).push_back(t[size_t(p)]);
      int sgn = unshuffle_sign(mark);
      RMat<R> prod = rm_mul(ring, x.at(s1), y.at(s2));
      acc = (sgn > 0) ? rm_add(ring, acc, prod) : rm_sub(ring, acc, prod);
    }
    f.at(t) = acc;
  }
  return f;
}

/// Contraction with a section X: (X -| w)(...) = w(X, ...), extended
/// coefficient-linearly in X.
template <class R>
RForm<R> contract(const R& ring, const RForm<R>& w,
                  const std::vector<typename R::Elem>& x) {
  if (w.k == 0) throw std::domain_error("contract: degree is already zero");
  RForm<R> f = RForm<R>::zero(ring, w.rank, w.k - 1, w.rows, w.cols);
  for (const auto& s : combinations(w.rank, w.k - 1)) {
    RMat<R> acc(ring, w.rows, w.cols);
    for (int i = 0; i < w.rank; ++i) {
      if (ring.is_zero(x[size_t(i)])) continue;
      std::vector<int> merged;
      int sgn = tuple_insert(s, i, merged);
      if (sgn == 0) continue;
      RMat<R> term = rm_scale_elem(ring, x[size_t(i)], w.at(merged));
      acc = (sgn > 0) ? rm_add(ring, acc, term) : rm_sub(ring, acc, term);
    }
    f.at(s) = acc;
  }
  return f;
}

enum class ActionKind { scalar, vect, endo };

/// How covariant derivatives act on form coefficients: anchor derivation for
/// scalars, plus left multiplication (module) or commutator (endomorphisms)
/// by the connection matrices.
template <class R>
struct ModuleAction {
  ActionKind kind = ActionKind::scalar;
  int m = 1;
  std::vector<RMat<R>> conn;  // one matrix per generator; empty for scalars
  std::vector<std::string> fiber_names;

  static ModuleAction scalar_action() { return {}; }

  static ModuleAction module_action(std::vector<RMat<R>> matrices,
                                    std::vector<std::string> names = {}) {
    ModuleAction a;
    a.kind = ActionKind::vect;
    a.m = matrices.empty() ? 1 : matrices[0].rows;
    a.conn = std::move(matrices);
    a.fiber_names = std::move(names);
    return a;
  }

  static ModuleAction endo_action(std::vector<RMat<R>> matrices) {
    ModuleAction a;
    a.kind = ActionKind::endo;
    a.m = matrices.empty() ? 1 : matrices[0].rows;
    a.conn = std::move(matrices);
    return a;
  }

  int crows() const { return kind == ActionKind::scalar ? 1 : m; }
  int ccols() const { return kind == ActionKind::endo ? m : 1; }

  RMat<R> nabla(const R& ring, const Algebroid<R>& g, int i, const RMat<R>& coeff) const {
    RMat<R> out = rm_dmap(ring, g.anchor[size_t(i)], coeff);
    if (kind == ActionKind::vect) out = rm_add(ring, out, rm_mul(ring, conn[size_t(i)], coeff));
    if (kind == ActionKind::endo)
      out = rm_add(ring, out, rm_commutator(ring, conn[size_t(i)], coeff));
    return out;
  }
};

/// Covariant Chevalley-Eilenberg differential
///   (dw)(l_0..l_k) = sum_i (-1)^i nabla_{l_i} w(..^i..)
///                  + sum_{i<j} (-1)^{i+j} w([l_i,l_j], ..^i..^j..).
template <class R>
RForm<R> derham(const R& ring, const Algebroid<R>& g, const ModuleAction<R>& act,
                const RForm<R>& w) {
  RForm<R> f = RForm<R>::zero(ring, w.rank, w.k + 1, w.rows, w.cols);
  if (w.k + 1 > w.rank) return f;
  for (const auto& t : combinations(w.rank, w.k + 1)) {
    RMat<R> acc(ring, w.rows, w.cols);
    for (int i = 0; i < int(t.size()); ++i) {
      std::vector<int> rest;
      for (int u = 0; u < int(t.size()); ++u)
        if (u != i) rest.push_back(t[size_t(u)]);
      RMat<R> term = act.nabla(ring, g, t[size_t(i)], w.at(rest));
      acc = (i % 2 == 0) ? rm_add(ring, acc, term) : rm_sub(ring, acc, term);
    }
    for (int i = 0; i < int(t.size()); ++i)
      for (int j = i + 1; j < int(t.size()); ++j) {
        std::vector<int> rest;
        for (int u = 0; u < int(t.size()); ++u)
          if (u != i && u != j) rest.push_back(t[size_t(u)]);
        int base_sgn = ((i + j) % 2 == 0) ? 1 : -1;
        for (int u = 0; u < g.rank; ++u) {
          const auto& coeff = g.c[size_t(t[size_t(i)])][size_t(t[size_t(j)])][size_t(u)];
          if (ring.is_zero(coeff)) continue;
          std::vector<int> merged;
          int isgn = tuple_insert(rest, u, merged);
          if (isgn == 0) continue;
          RMat<R> term = rm_scale_elem(ring, coeff, w.at(merged));
          acc = (base_sgn * isgn > 0) ? rm_add(ring, acc, term) : rm_sub(ring, acc, term);
        }
      }
    f.at(t) = acc;
  }
  return f;
}

/// Curvature two-form of a connection, with the anchor derivative terms:
/// R(l_i, l_j) = a_i(C_j) - a_j(C_i) + [C_i, C_j] - sum_u c_ij^u C_u.
template <class R>
RForm<R> curvature(const R& ring, const Algebroid<R>& g, const ModuleAction<R>& act) {
  RForm<R> f = RForm<R>::zero(ring, g.rank, 2, act.m, act.m);
  if (act.kind == ActionKind::scalar) return f;
  for (const auto& t : combinations(g.rank, 2)) {
    int i = t[0], j = t[1];
    RMat<R> r = rm_dmap(ring, g.anchor[size_t(i)], act.conn[size_t(j)]);
    r = rm_sub(ring, r, rm_dmap(ring, g.anchor[size_t(j)], act.conn[size_t(i)]));
    r = rm_add(ring, r, rm_commutator(ring, act.conn[size_t(i)], act.conn[size_t(j)]));
    for (int u = 0; u < g.rank; ++u)
      r = rm_sub(ring, r,
                 rm_scale_elem(ring, g.c[size_t(i)][size_t(j)][size_t(u)], act.conn[size_t(u)]));
    f.at(t) = r;
  }
  return f;
}

template <class R>
bool rm_is_scalar(const R& ring, const RMat<R>& x) {
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) {
      if (i != j && !ring.is_zero(x.at(i, j))) return false;
      if (i == j && !ring.is_zero(ring.sub(x.at(i, i), x.at(0, 0)))) return false;
    }
  return true;
}

/// Trace of an endomorphism-valued form, as a scalar form.
template <class R>
RForm<R> trace_form(const R& ring, const RForm<R>& w) {
  RForm<R> f = RForm<R>::zero(ring, w.rank, w.k, 1, 1);
  for (size_t i = 0; i < w.c.size(); ++i) f.c[i].at(0, 0) = rm_trace(ring, w.c[i]);
  return f;
}

namespace detail {

inline std::string tuple_label(const std::vector<std::string>& names, const std::vector<int>& t) {
  if (t.empty()) return "1";
  std::string s;
  for (size_t i = 0; i < t.size(); ++i) {
    if (i) s += "^";
    s += names[size_t(t[size_t(i)])] + "'";
  }
  return s;
}

}  // namespace detail

/// Flattens a point-tier form into rational coordinates, tuple-major and then
/// row-major inside each coefficient matrix.
inline std::vector<Rat> form_coords(const PointForm& w) {
  std::vector<Rat> v;
  v.reserve(w.c.size() * size_t(w.rows) * size_t(w.cols));
  for (const auto& m : w.c)
    for (const auto& x : m.a) v.push_back(x);
  return v;
}

inline PointForm form_from_coords(const QRing& ring, int rank, int k, int rows, int cols,
                                  const std::vector<Rat>& v) {
  PointForm f = PointForm::zero(ring, rank, k, rows, cols);
  size_t idx = 0;
  for (auto& m : f.c)
    for (auto& x : m.a) x = v[idx++];
  return f;
}

/// Standard complex of a flat point-tier module (or the scalar complex when
/// the action is trivial): basis tuples x fiber, differential by `derham`.
inline CochainComplex standard_complex(const QRing& ring, const PointAlgebroid& g,
                                       const ModuleAction<QRing>& act,
                                       bool require_flat = true) {
  if (act.kind != ActionKind::scalar && require_flat) {
    auto rv = curvature(ring, g, act);
    bool flat = true;
    if (act.kind == ActionKind::vect) {
      flat = rv.is_zero(ring);
    } else {
      // the commutator action is flat iff the curvature is central
      for (const auto& mat : rv.c) flat = flat && rm_is_scalar(ring, mat);
    }
    if (!flat) throw std::domain_error("standard_complex: module is not flat");
  }
  int m = act.crows();
  int cols = act.ccols();
  CochainComplex cx;
  cx.lo = 0;
  for (int k = 0; k <= g.rank; ++k) cx.dims.push_back(int(binom(g.rank, k)) * m * cols);
  cx.labels.resize(size_t(g.rank) + 1);
  for (int k = 0; k <= g.rank; ++k) {
    for (const auto& t : combinations(g.rank, k))
      for (int a = 0; a < m * cols; ++a) {
        std::string lbl = detail::tuple_label(g.names, t);
        if (m * cols > 1) {
          std::string fn = (a < int(act.fiber_names.size())) ? act.fiber_names[size_t(a)]
                                                             : "e" + std::to_string(a);
          lbl += ":" + fn;
        }
        cx.labels[size_t(k)].push_back(lbl);
      }
  }
  for (int k = 0; k <= g.rank; ++k) {
    if (k == g.rank) {
      cx.d.push_back(QMat(0, cx.dims[size_t(k)]));
      continue;
    }
    QMat d(cx.dims[size_t(k + 1)], cx.dims[size_t(k)]);
    int col = 0;
    for (const auto& t : combinations(g.rank, k))
      for (int a = 0; a < m * cols; ++a, ++col) {
        PointForm w = PointForm::zero(ring, g.rank, k, m, cols);
        w.at(t).a[size_t(a)] = 1;
        auto dw = derham(ring, g, act, w);
        auto coords = form_coords(dw);
        for (int row = 0; row < int(coords.size()); ++row) d(row, col) = coords[size_t(row)];
      }
    cx.d.push_back(d);
  }
  return cx;
}

/// Chart-tier analogue over a Laurent window: basis tuples x fiber x monomial.
/// Returns the complex and whether any step truncated.
struct WindowComplex {
  CochainComplex cx;
  bool truncated = false;
};

inline WindowComplex window_complex(const WindowRing& ring, const Algebroid<WindowRing>& g,
                                    const ModuleAction<WindowRing>& act) {
  WindowComplex out;
  int m = act.crows() * act.ccols();
  int q = ring.qdim();
  CochainComplex& cx = out.cx;
  cx.lo = 0;
  for (int k = 0; k <= g.rank; ++k) cx.dims.push_back(int(binom(g.rank, k)) * m * q);
  cx.labels.resize(size_t(g.rank) + 1);
  for (int k = 0; k <= g.rank; ++k)
    for (const auto& t : combinations(g.rank, k))
      for (int a = 0; a < m; ++a)
        for (int e = 0; e < q; ++e) {
          std::string lbl = detail::tuple_label(g.names, t);
          if (m > 1) lbl += ":e" + std::to_string(a);
          lbl += "*" + ring.coord_label(e);
          cx.labels[size_t(k)].push_back(lbl);
        }
  for (int k = 0; k <= g.rank; ++k) {
    if (k == g.rank) {
      cx.d.push_back(QMat(0, cx.dims[size_t(k)]));
      continue;
    }
    QMat d(cx.dims[size_t(k + 1)], cx.dims[size_t(k)]);
    int col = 0;
    for (const auto& t : combinations(g.rank, k))
      for (int a = 0; a < m; ++a)
        for (int e = 0; e < q; ++e, ++col) {
          RForm<WindowRing> w =
              RForm<WindowRing>::zero(ring, g.rank, k, act.crows(), act.ccols());
          w.at(t).a[size_t(a)] = ring.from_coord(e, Rat(1));
          auto dw = derham(ring, g, act, w);
          if (dw.flagged(ring)) out.truncated = true;
          int row = 0;
          for (const auto& cm : dw.c)
            for (const auto& el : cm.a) {
              auto cc = ring.coords(el);
              for (int ee = 0; ee < q; ++ee, ++row) d(row, col) = cc[size_t(ee)];
            }
        }
    cx.d.push_back(d);
  }
  return out;
}

}  // namespace liekit
