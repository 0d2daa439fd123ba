#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "atiyah.hpp"
#include "curved.hpp"

namespace liekit {

/// Quotient of a rational polynomial ring by a monomial ideal of finite
/// codimension. The surviving monomials, ordered by degree and then by
/// variable order, form the basis; basis[0] is the unit.
struct ArtinRing {
  std::vector<std::string> names;
  std::vector<std::vector<int>> gens;     // exponent vectors generating the ideal
  std::vector<std::vector<int>> basis;    // monomials outside the ideal
  std::map<std::vector<int>, int> index;  // basis monomial -> slot
  int nilpotency = 1;                     // least N with m^N = 0

  int dim() const { return int(basis.size()); }

  bool in_ideal(const std::vector<int>& e) const {
    for (const auto& g : gens) {
      bool divides = true;
      for (size_t i = 0; i < e.size(); ++i)
        if (g[i] > e[i]) divides = false;
      if (divides) return true;
    }
    return false;
  }

  /// Slot of basis[i] * basis[j], or -1 when the product falls in the ideal.
  int mul_index(int i, int j) const {
    std::vector<int> e = basis[size_t(i)];
    const std::vector<int>& f = basis[size_t(j)];
    for (size_t v = 0; v < e.size(); ++v) e[v] += f[v];
    if (in_ideal(e)) return -1;
    return index.at(e);
  }

  std::string monomial_label(int slot) const {
    const std::vector<int>& e = basis[size_t(slot)];
    std::string s;
    for (size_t v = 0; v < e.size(); ++v) {
      if (e[v] == 0) continue;
      if (!s.empty()) s += "*";
      s += names[v];
      if (e[v] > 1) s += "^" + std::to_string(e[v]);
    }
    return s.empty() ? "1" : s;
  }
};

inline ArtinRing artin_ring(std::vector<std::string> names, std::vector<std::vector<int>> gens) {
  ArtinRing b;
  b.names = std::move(names);
  b.gens = std::move(gens);
  const int nv = int(b.names.size());
  std::vector<int> bound(size_t(nv), 1);
  std::vector<bool> pure(size_t(nv), false);
  for (const auto& g : b.gens) {
    if (int(g.size()) != nv) throw std::domain_error("artin_ring: generator has the wrong arity");
    int support = -1;
    bool single = true;
    for (int v = 0; v < nv; ++v) {
      if (g[size_t(v)] < 0) throw std::domain_error("artin_ring: negative exponent");
      if (g[size_t(v)] > 0) {
        if (support >= 0) single = false;
        support = v;
      }
    }
    if (support < 0) throw std::domain_error("artin_ring: the ideal contains a unit");
    if (single) {
      pure[size_t(support)] = true;
      bound[size_t(support)] = std::max(bound[size_t(support)], g[size_t(support)]);
    }
  }
  for (int v = 0; v < nv; ++v)
    if (!pure[size_t(v)])
      throw std::domain_error("artin_ring: no pure power of " + b.names[size_t(v)] +
                              " in the ideal, the quotient is infinite dimensional");
  // enumerate candidates below the pure-power bounds
  std::vector<int> e(size_t(nv), 0);
  while (true) {
    if (!b.in_ideal(e)) b.basis.push_back(e);
    int pos = nv - 1;
    while (pos >= 0 && ++e[size_t(pos)] == bound[size_t(pos)]) {
      e[size_t(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  auto deg = [](const std::vector<int>& m) {
    int d = 0;
    for (int x : m) d += x;
    return d;
  };
  std::sort(b.basis.begin(), b.basis.end(),
            [&](const std::vector<int>& x, const std::vector<int>& y) {
              int dx = deg(x), dy = deg(y);
              if (dx != dy) return dx < dy;
              return x > y;  // earlier variables first within a degree
            });
  for (int i = 0; i < int(b.basis.size()); ++i) b.index[b.basis[size_t(i)]] = i;
  int maxdeg = 0;
  for (const auto& m : b.basis) maxdeg = std::max(maxdeg, deg(m));
  b.nilpotency = maxdeg + 1;
  return b;
}

/// Rationals with one nilpotent variable u, truncated at u^order.
inline ArtinRing jet_ring(int order) {
  if (order <= 0) throw std::domain_error("jet_ring: order must be positive");
  return artin_ring({"u"}, {{order}});
}

/// Surjection of Artin rings with one-dimensional kernel killed by the
/// maximal ideal. The quotient keeps the surviving monomials of the total
/// ring in their original order; `embed` maps quotient slots back.
struct SmallExtension {
  ArtinRing total;
  ArtinRing quotient;
  int socle = 0;           // slot of the kernel monomial in the total ring
  std::vector<int> embed;  // quotient slot -> total slot
};

inline SmallExtension small_extension(const ArtinRing& b, const std::vector<int>& mu) {
  if (mu.size() != b.names.size())
    throw std::domain_error("small_extension: kernel monomial has the wrong arity");
  auto it = b.index.find(mu);
  if (it == b.index.end())
    throw std::domain_error("small_extension: the kernel monomial is already zero");
  if (it->second == 0) throw std::domain_error("small_extension: the kernel cannot be the unit");
  for (size_t v = 0; v < mu.size(); ++v) {
    std::vector<int> e = mu;
    ++e[v];
    if (!b.in_ideal(e))
      throw std::domain_error("small_extension: the kernel is not annihilated by the maximal ideal");
  }
  SmallExtension ext;
  ext.total = b;
  ext.socle = it->second;
  auto gens = b.gens;
  gens.push_back(mu);
  ext.quotient = artin_ring(b.names, gens);
  for (const auto& m : ext.quotient.basis) ext.embed.push_back(b.index.at(m));
  return ext;
}

namespace detail {

inline std::vector<Rat> vec_scale(const Rat& s, const std::vector<Rat>& v) {
  std::vector<Rat> o(v);
  for (auto& x : o) x *= s;
  return o;
}

inline std::vector<Rat> vec_neg(const std::vector<Rat>& v) {
  std::vector<Rat> o(v);
  for (auto& x : o) x = -x;
  return o;
}

}  // namespace detail

/// Differential graded Lie algebra presented through a flat associative
/// model: the bracket is the graded commutator of the stored product. The
/// coordinate lists locate each basis slot inside the algebra the model was
/// cut from, so representatives can be re-embedded.
struct DGLA {
  CurvedDG alg;                          // flat: zero curvature element
  std::vector<std::vector<int>> coords;  // ambient coordinate per slot, per degree

  int lo() const { return alg.lo; }
  int hi() const { return alg.hi(); }
  int dim(int n) const { return alg.dim(n); }

  std::vector<Rat> d(int n, const std::vector<Rat>& x) const { return alg.apply_d(n, x); }

  std::vector<Rat> bracket(int n1, const std::vector<Rat>& x, int n2,
                           const std::vector<Rat>& y) const {
    std::vector<Rat> xy = alg.product(n1, x, n2, y);
    std::vector<Rat> yx = alg.product(n2, y, n1, x);
    if ((n1 % 2 != 0) && (n2 % 2 != 0)) return detail::vec_add(xy, yx);
    return detail::vec_sub(xy, yx);
  }

  CochainComplex complex() const {
    CochainComplex cx;
    cx.lo = alg.lo;
    cx.dims = alg.dims;
    cx.d = alg.d;
    return cx;
  }
};

inline DGLA dgla_from_flat(const CurvedDG& a) {
  if (a.lo != 0) throw std::domain_error("dgla_from_flat: degrees must start at zero");
  if (!detail::vec_zero(a.curv))
    throw std::domain_error("dgla_from_flat: the curvature element is nonzero");
  DGLA g;
  g.alg = a;
  for (int n = 0; n <= a.hi(); ++n) {
    std::vector<int> ix(size_t(a.dim(n)));
    for (int i = 0; i < a.dim(n); ++i) ix[size_t(i)] = i;
    g.coords.push_back(ix);
  }
  return g;
}

/// Quotient of the curved endomorphism model by the forms with at least one
/// quotient-direction leg. Flatness along the subalgebroid puts the
/// curvature element inside the ideal, so the quotient is an honest flat
/// differential graded algebra; its commutator controls deformations of the
/// module structure.
inline DGLA module_dgla(const EndModel& mo) {
  if (!mo.sub_flat)
    throw std::domain_error("module_dgla: the connection is curved along the subalgebroid");
  const LiePair& p = mo.pair;
  const int rank = p.L.rank;
  const int na = int(p.sub.size());
  const int f = mo.m * mo.m;
  DGLA g;
  g.alg.lo = 0;
  for (int n = 0; n <= na; ++n) {
    std::vector<int> ix;
    int col = 0;
    for (const auto& t : combinations(rank, n)) {
      bool pure = detail::compcount(p, t) == 0;
      for (int a = 0; a < f; ++a, ++col)
        if (pure) ix.push_back(col);
    }
    g.coords.push_back(ix);
    g.alg.dims.push_back(int(ix.size()));
  }
  auto reduce = [&](int n, const std::vector<Rat>& full) {
    const auto& ix = g.coords[size_t(n)];
    std::vector<Rat> out;
    out.reserve(ix.size());
    for (int c : ix) out.push_back(full[size_t(c)]);
    return out;
  };
  auto embed = [&](int n, int slot) {
    std::vector<Rat> full(size_t(mo.dg.dim(n)), Rat(0));
    full[size_t(g.coords[size_t(n)][size_t(slot)])] = 1;
    return full;
  };
  // differentials of pure forms have no pure component coming back from the
  // dropped legs (sub brackets stay in the sub), so slicing is a chain map
  for (int n = 0; n <= na; ++n) {
    if (n == na) {
      g.alg.d.push_back(QMat(0, g.alg.dims[size_t(n)]));
      continue;
    }
    QMat dn(g.alg.dims[size_t(n) + 1], g.alg.dims[size_t(n)]);
    for (int j = 0; j < g.alg.dims[size_t(n)]; ++j) {
      std::vector<Rat> colv = reduce(n + 1, mo.dg.apply_d(n, embed(n, j)));
      for (int r = 0; r < dn.rows(); ++r) dn(r, j) = colv[size_t(r)];
    }
    g.alg.d.push_back(dn);
  }
  // products of pure forms are pure, so the table restricts exactly
  for (int n1 = 0; n1 <= na; ++n1)
    for (int n2 = 0; n1 + n2 <= na; ++n2) {
      QMat t(g.alg.dims[size_t(n1 + n2)], g.alg.dims[size_t(n1)] * g.alg.dims[size_t(n2)]);
      for (int i = 0; i < g.alg.dims[size_t(n1)]; ++i)
        for (int j = 0; j < g.alg.dims[size_t(n2)]; ++j) {
          std::vector<Rat> colv =
              reduce(n1 + n2, mo.dg.product(n1, embed(n1, i), n2, embed(n2, j)));
          int col = i * g.alg.dims[size_t(n2)] + j;
          for (int r = 0; r < t.rows(); ++r) t(r, col) = colv[size_t(r)];
        }
      g.alg.mul[{n1, n2}] = t;
    }
  g.alg.unit = mo.dg.unit;
  g.alg.curv.assign(size_t(g.alg.dim(2)), Rat(0));
  if (na >= 2 && !detail::vec_zero(reduce(2, mo.dg.curv)))
    throw std::logic_error("module_dgla: curvature survives the quotient");
  return g;
}

/// Element of (the degree-n part of) a differential graded Lie algebra with
/// coefficients extended by an Artin ring: one coordinate block per ring
/// basis monomial.
using ArtinElem = std::vector<std::vector<Rat>>;

inline ArtinElem ae_zero(const DGLA& g, const ArtinRing& b, int n) {
  return ArtinElem(size_t(b.dim()), std::vector<Rat>(size_t(g.dim(n)), Rat(0)));
}

inline bool ae_is_zero(const ArtinElem& x) {
  for (const auto& blk : x)
    if (!detail::vec_zero(blk)) return false;
  return true;
}

inline bool ae_equal(const ArtinElem& x, const ArtinElem& y) {
  return x == y;
}

inline ArtinElem ae_add(const ArtinElem& x, const ArtinElem& y) {
  ArtinElem o(x);
  for (size_t i = 0; i < o.size(); ++i) o[i] = detail::vec_add(o[i], y[i]);
  return o;
}

inline ArtinElem ae_sub(const ArtinElem& x, const ArtinElem& y) {
  ArtinElem o(x);
  for (size_t i = 0; i < o.size(); ++i) o[i] = detail::vec_sub(o[i], y[i]);
  return o;
}

inline ArtinElem ae_scale(const Rat& s, const ArtinElem& x) {
  ArtinElem o(x);
  for (auto& blk : o) blk = detail::vec_scale(s, blk);
  return o;
}

inline ArtinElem ae_d(const DGLA& g, const ArtinRing&, int n, const ArtinElem& x) {
  ArtinElem o(x.size());
  for (size_t i = 0; i < x.size(); ++i) o[i] = g.d(n, x[i]);
  return o;
}

inline ArtinElem ae_bracket(const DGLA& g, const ArtinRing& b, int n1, const ArtinElem& x,
                            int n2, const ArtinElem& y) {
  ArtinElem o = ae_zero(g, b, n1 + n2);
  for (int i = 0; i < b.dim(); ++i) {
    if (detail::vec_zero(x[size_t(i)])) continue;
    for (int j = 0; j < b.dim(); ++j) {
      if (detail::vec_zero(y[size_t(j)])) continue;
      int k = b.mul_index(i, j);
      if (k < 0) continue;
      o[size_t(k)] = detail::vec_add(o[size_t(k)], g.bracket(n1, x[size_t(i)], n2, y[size_t(j)]));
    }
  }
  return o;
}

/// True when every coefficient block past the unit is the only possibly
/// nonzero part, i.e. the element lies in the maximal ideal.
inline bool ae_in_radical(const ArtinElem& x) {
  return !x.empty() && detail::vec_zero(x[0]);
}

/// Degree-one element marked with whether its flatness equation holds.
struct MCElement {
  ArtinElem x;
  bool solved = false;
};

/// Residual of the flatness equation, dx + [x,x]/2. Zero exactly when the
/// twisted differential d + [x,-] squares to zero; when `cross_check` is set
/// the square is compared against the bracket with the residual on every
/// basis element, which exercises the Leibniz and Jacobi identities of the
/// stored tables.
inline ArtinElem mc_residual(const DGLA& g, const ArtinRing& b, const ArtinElem& x,
                             bool cross_check = true) {
  if (int(x.size()) != b.dim())
    throw std::domain_error("mc_residual: coefficient block count mismatch");
  for (const auto& blk : x)
    if (int(blk.size()) != g.dim(1))
      throw std::domain_error("mc_residual: coordinate block has the wrong dimension");
  if (!ae_in_radical(x))
    throw std::domain_error("mc_residual: coefficients are not in the maximal ideal");
  const Rat half = Rat(1) / Rat(2);
  ArtinElem r = ae_add(ae_d(g, b, 1, x), ae_scale(half, ae_bracket(g, b, 1, x, 1, x)));
  if (cross_check) {
    auto tw = [&](int deg, const ArtinElem& y) {
      return ae_add(ae_d(g, b, deg, y), ae_bracket(g, b, 1, x, deg, y));
    };
    for (int n = g.lo(); n <= g.hi(); ++n)
      for (int i = 0; i < g.dim(n); ++i) {
        ArtinElem e = ae_zero(g, b, n);
        e[0][size_t(i)] = 1;
        ArtinElem lhs = tw(n + 1, tw(n, e));
        ArtinElem rhs = ae_bracket(g, b, 2, r, n, e);
        if (!ae_equal(lhs, rhs))
          throw std::logic_error("mc_residual: twisted square disagrees with the residual");
      }
  }
  return r;
}

inline MCElement mc_element(const DGLA& g, const ArtinRing& b, const ArtinElem& x,
                            bool cross_check = true) {
  MCElement e;
  e.x = x;
  e.solved = ae_is_zero(mc_residual(g, b, x, cross_check));
  return e;
}

/// Exponential gauge action of a degree-zero parameter:
///   e^a . x = x + sum_{n>=0} ad_a^n([a,x] - da) / (n+1)!
/// The series terminates because a multiplies by the maximal ideal.
inline MCElement gauge_act(const DGLA& g, const ArtinRing& b, const ArtinElem& a,
                           const MCElement& x) {
  if (int(a.size()) != b.dim() || !ae_in_radical(a))
    throw std::domain_error("gauge_act: parameter is not in the maximal ideal");
  ArtinElem out = x.x;
  ArtinElem cur = ae_sub(ae_bracket(g, b, 0, a, 1, x.x), ae_d(g, b, 0, a));
  Rat fact(1);
  int n = 0;
  while (!ae_is_zero(cur)) {
    if (n > b.nilpotency) throw std::logic_error("gauge_act: adjoint series failed to terminate");
    fact *= Rat(n + 1);
    out = ae_add(out, ae_scale(Rat(1) / fact, cur));
    cur = ae_bracket(g, b, 0, a, 1, cur);
    ++n;
  }
  return {out, x.solved};
}

/// Closed composition form for gauge parameters, truncated after the
/// fourth-order bracket; exact while fifth powers of the maximal ideal
/// vanish.
inline ArtinElem bch(const DGLA& g, const ArtinRing& b, const ArtinElem& x, const ArtinElem& y) {
  if (b.nilpotency > 5)
    throw std::domain_error("bch: truncation at fourth brackets needs fifth powers to vanish");
  if (!ae_in_radical(x) || !ae_in_radical(y))
    throw std::domain_error("bch: parameters are not in the maximal ideal");
  auto br = [&](const ArtinElem& u, const ArtinElem& v) { return ae_bracket(g, b, 0, u, 0, v); };
  ArtinElem xy = br(x, y);
  ArtinElem c = ae_add(ae_add(x, y), ae_scale(Rat(1) / Rat(2), xy));
  c = ae_add(c, ae_scale(Rat(1) / Rat(12), br(x, xy)));
  c = ae_add(c, ae_scale(Rat(1) / Rat(12), br(y, br(y, x))));
  c = ae_sub(c, ae_scale(Rat(1) / Rat(24), br(y, br(x, xy))));
  return c;
}

/// First-order deformations over one square-zero parameter, with the
/// verification that flat elements are exactly the cocycles and gauge moves
/// translate by exact terms, so orbits biject with degree-one cohomology.
struct FirstOrder {
  Cohomology h;
  std::vector<std::vector<Rat>> reps;  // degree-one representatives, one per class
  bool mc_equals_cocycles = false;
  bool gauge_is_translation = false;
  bool orbit_well_defined = false;
  bool orbit_injective = false;
  bool orbit_surjective = false;

  bool verified() const {
    return mc_equals_cocycles && gauge_is_translation && orbit_well_defined && orbit_injective &&
           orbit_surjective;
  }
};

inline FirstOrder first_order_classes(const DGLA& g) {
  FirstOrder out;
  CochainComplex cx = g.complex();
  out.h = cohomology(cx);
  for (int i = 0; i < out.h.dim(1); ++i) out.reps.push_back(out.h[1].reps.col(i));
  ArtinRing b = jet_ring(2);
  QMat d0 = cx.diff(0);
  QMat d1 = cx.diff(1);

  out.mc_equals_cocycles = true;
  for (int i = 0; i < g.dim(1); ++i) {
    ArtinElem x = ae_zero(g, b, 1);
    x[1][size_t(i)] = 1;
    ArtinElem r = mc_residual(g, b, x, false);
    if (!detail::vec_zero(r[0]) || !detail::vec_zero(detail::vec_sub(r[1], d1.col(i))))
      out.mc_equals_cocycles = false;
  }

  out.gauge_is_translation = true;
  for (int j = 0; j < g.dim(0); ++j) {
    ArtinElem a = ae_zero(g, b, 0);
    a[1][size_t(j)] = 1;
    std::vector<Rat> da = d0.col(j);
    MCElement zero{ae_zero(g, b, 1), true};
    ArtinElem y = gauge_act(g, b, a, zero).x;
    if (!detail::vec_zero(y[0]) || !detail::vec_zero(detail::vec_add(y[1], da)))
      out.gauge_is_translation = false;
    for (int i = 0; i < g.dim(1); ++i) {
      ArtinElem x = ae_zero(g, b, 1);
      x[1][size_t(i)] = 1;
      ArtinElem moved = gauge_act(g, b, a, MCElement{x, false}).x;
      std::vector<Rat> want = detail::vec_sub(g.alg.basis_vec(1, i), da);
      if (!detail::vec_zero(moved[0]) || !detail::vec_zero(detail::vec_sub(moved[1], want)))
        out.gauge_is_translation = false;
    }
  }

  out.orbit_well_defined = true;
  for (const auto& rep : out.reps) {
    ArtinElem x = ae_zero(g, b, 1);
    x[1] = rep;
    std::vector<Rat> cls = out.h.class_coords(1, rep);
    for (int j = 0; j < g.dim(0); ++j) {
      ArtinElem a = ae_zero(g, b, 0);
      a[1][size_t(j)] = 1;
      ArtinElem moved = gauge_act(g, b, a, MCElement{x, true}).x;
      if (out.h.class_coords(1, moved[1]) != cls) out.orbit_well_defined = false;
    }
  }

  out.orbit_injective = true;
  for (size_t i = 0; i < out.reps.size(); ++i) {
    if (solve(d0, out.reps[i])) out.orbit_injective = false;
    for (size_t j = i + 1; j < out.reps.size(); ++j)
      if (solve(d0, detail::vec_sub(out.reps[i], out.reps[j]))) out.orbit_injective = false;
  }

  out.orbit_surjective = true;
  for (size_t i = 0; i < out.reps.size(); ++i) {
    ArtinElem x = ae_zero(g, b, 1);
    x[1] = out.reps[i];
    if (!ae_is_zero(mc_residual(g, b, x, false))) out.orbit_surjective = false;
    std::vector<Rat> cls = out.h.class_coords(1, out.reps[i]);
    for (size_t t = 0; t < cls.size(); ++t) {
      Rat want = (t == i) ? Rat(1) : Rat(0);
      if (cls[t] != want) out.orbit_surjective = false;
    }
  }
  return out;
}

/// Degree-two cohomology class blocking a lift across a small extension.
/// Classes made by `lift_obstruction` carry the extension datum; classes
/// wrapped for exploration do not, and the annihilation certificate treats
/// them as reports rather than theorems.
struct ObstructionClass {
  std::optional<SmallExtension> ext;
  std::vector<Rat> rep;  // socle coefficient of the lifted residual
  std::vector<Rat> cls;  // coordinates in degree-two cohomology

  bool genuine() const { return ext.has_value(); }
};

struct LiftResult {
  bool lifted = false;
  MCElement lift;  // corrected lift when it exists, the attempted set lift otherwise
  ObstructionClass ob;
};

/// Lifts a flat element across a small extension when possible. The residual
/// of any set lift concentrates in the socle line; its class is independent
/// of the chosen set lift (a second, shifted lift is compared to make sure)
/// and vanishes exactly when a correcting term exists.
inline LiftResult lift_obstruction(const DGLA& g, const SmallExtension& ext, const MCElement& x,
                                   const std::vector<Rat>* slack = nullptr) {
  const ArtinRing& bt = ext.total;
  const ArtinRing& bq = ext.quotient;
  if (ext.socle <= 0 || ext.socle >= bt.dim() || int(ext.embed.size()) != bq.dim() ||
      bq.dim() + 1 != bt.dim())
    throw std::domain_error("lift_obstruction: malformed small extension");
  for (size_t v = 0; v < bt.names.size(); ++v) {
    std::vector<int> e = bt.basis[size_t(ext.socle)];
    ++e[v];
    if (!bt.in_ideal(e))
      throw std::domain_error("lift_obstruction: malformed small extension");
  }
  if (int(x.x.size()) != bq.dim())
    throw std::domain_error("lift_obstruction: element lives over the wrong ring");
  if (!ae_is_zero(mc_residual(g, bq, x.x, false)))
    throw std::domain_error("lift_obstruction: the element is not flat over the base");
  if (slack && int(slack->size()) != g.dim(1))
    throw std::domain_error("lift_obstruction: slack has the wrong dimension");

  auto set_lift = [&](const std::vector<Rat>& s) {
    ArtinElem lx = ae_zero(g, bt, 1);
    for (int j = 0; j < bq.dim(); ++j) lx[size_t(ext.embed[size_t(j)])] = x.x[size_t(j)];
    lx[size_t(ext.socle)] = s;
    return lx;
  };
  std::vector<Rat> s0(size_t(g.dim(1)), Rat(0));
  if (slack) s0 = *slack;
  ArtinElem lx = set_lift(s0);
  ArtinElem h = mc_residual(g, bt, lx, false);
  for (int j = 0; j < bt.dim(); ++j)
    if (j != ext.socle && !detail::vec_zero(h[size_t(j)]))
      throw std::logic_error("lift_obstruction: residual escapes the socle line");
  std::vector<Rat> rep = h[size_t(ext.socle)];

  CochainComplex cx = g.complex();
  if (!detail::vec_zero(cx.diff(2).apply(rep)))
    throw std::logic_error("lift_obstruction: obstruction representative is not closed");
  Cohomology hh = cohomology(cx);

  std::vector<Rat> s1 = s0;
  for (size_t i = 0; i < s1.size(); ++i) s1[i] += Rat(int(i) + 1);
  ArtinElem h2 = mc_residual(g, bt, set_lift(s1), false);
  if (!hh.class_is_zero(2, detail::vec_sub(h2[size_t(ext.socle)], rep)))
    throw std::logic_error("lift_obstruction: class depends on the chosen set lift");

  LiftResult out;
  out.ob.ext = ext;
  out.ob.rep = rep;
  out.ob.cls = hh.class_coords(2, rep);
  auto y = solve(cx.diff(1), detail::vec_neg(rep));
  if (y) {
    lx[size_t(ext.socle)] = detail::vec_add(lx[size_t(ext.socle)], *y);
    if (!ae_is_zero(mc_residual(g, bt, lx, false)))
      throw std::logic_error("lift_obstruction: corrected lift fails the flatness equation");
    out.lifted = true;
    out.lift = MCElement{lx, true};
  } else {
    out.lifted = false;
    out.lift = MCElement{lx, false};
  }
  return out;
}

/// Wraps an arbitrary degree-two cocycle for the pairing and certificate
/// machinery without claiming it obstructs anything.
inline ObstructionClass exploratory_class(const DGLA& g, const std::vector<Rat>& rep) {
  CochainComplex cx = g.complex();
  if (int(rep.size()) != cx.dim(2) || !detail::vec_zero(cx.diff(2).apply(rep)))
    throw std::domain_error("exploratory_class: representative is not a degree-two cocycle");
  ObstructionClass ob;
  ob.rep = rep;
  ob.cls = cohomology(cx).class_coords(2, rep);
  return ob;
}

/// A module over a pair, bundled with everything its deformations need: the
/// curved endomorphism model, the controlling quotient algebra, the mixed
/// curvature blocks and the trace.
struct DeformProblem {
  QRing ring;
  EndModel mo;
  DGLA gla;
  PairCurvature curv;
  TraceMaps tr;

  const LiePair& pair() const { return mo.pair; }
};

inline DeformProblem deform_problem(const QRing& ring, const LiePair& p,
                                    const std::vector<RMat<QRing>>& nabla) {
  if (int(nabla.size()) != p.L.rank)
    throw std::domain_error("deform_problem: need a connection on every generator");
  DeformProblem pr;
  pr.ring = ring;
  pr.mo = end_model(ring, p, nabla);
  if (!pr.mo.sub_flat)
    throw std::domain_error("deform_problem: connection is not flat along the subalgebroid");
  pr.gla = module_dgla(pr.mo);
  pr.curv = pair_curvature(ring, p, ModuleAction<QRing>::module_action(nabla));
  pr.tr = trace_maps(ring, pr.mo);
  return pr;
}

/// Cochain-level pairing of a degree-two representative with k copies of the
/// mixed curvature: sum over placements of the curvature legs inside a
/// subalgebroid tuple and over quotient directions, with unshuffle signs,
/// of Tr(R(t_1,u_1) ... R(t_k,u_k) z(s_1,s_2)) / k!. The value is a
/// (k+2)-cochain on the subalgebroid with k-th wedge dual-quotient
/// coefficients, laid out tuple-major.
inline std::vector<Rat> atiyah_pairing(const DeformProblem& prob, const std::vector<Rat>& z,
                                       int k) {
  if (k < 0) throw std::domain_error("atiyah_pairing: negative level");
  const LiePair& p = prob.mo.pair;
  const QRing& ring = prob.ring;
  const int na = int(p.sub.size());
  const int q = p.q();
  const int m = prob.mo.m;
  const int f = m * m;
  const int wr = int(binom(q, k));
  std::vector<Rat> out(size_t(binom(na, k + 2)) * size_t(wr), Rat(0));
  if (out.empty()) return out;

  auto zmat = [&](int alpha, int beta) {
    RMat<QRing> zm(ring, m, m);
    int base = comb_index({alpha, beta}, na) * f;
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) zm.at(r, c) = z[size_t(base + r * m + c)];
    return zm;
  };
  auto inv_sign = [](const std::vector<int>& v) {
    int s = 1;
    for (size_t i = 0; i < v.size(); ++i)
      for (size_t j = i + 1; j < v.size(); ++j)
        if (v[i] > v[j]) s = -s;
    return s;
  };
  Rat fact(1);
  for (int i = 2; i <= k; ++i) fact *= Rat(i);
  const Rat scale = Rat(1) / fact;

  for (const auto& t : combinations(na, k + 2)) {
    const int tix = comb_index(t, na) * wr;
    for (const auto& spos : combinations(k + 2, k)) {
      std::vector<bool> mark(size_t(k + 2), false);
      for (int s : spos) mark[size_t(s)] = true;
      int eps = unshuffle_sign(mark);
      std::vector<int> zpos;
      for (int i = 0; i < k + 2; ++i)
        if (!mark[size_t(i)]) zpos.push_back(i);
      RMat<QRing> zm = zmat(t[size_t(zpos[0])], t[size_t(zpos[1])]);

      std::vector<int> ord(spos);
      do {
        int sgn = eps * inv_sign(ord);
        std::vector<int> u(size_t(k), 0);
        bool more = true;
        if (q == 0 && k > 0) more = false;
        while (more) {
          bool distinct = true;
          for (size_t i = 0; i < u.size() && distinct; ++i)
            for (size_t j = i + 1; j < u.size(); ++j)
              if (u[i] == u[j]) distinct = false;
          if (distinct) {
            RMat<QRing> acc = zm;
            for (int i = k - 1; i >= 0; --i)
              acc = rm_mul(ring, prob.curv.mixed[size_t(t[size_t(ord[size_t(i)])])][size_t(u[size_t(i)])],
                           acc);
            std::vector<int> su(u);
            std::sort(su.begin(), su.end());
            int usgn = inv_sign(u);
            Rat term = scale * Rat(sgn * usgn) * rm_trace(ring, acc);
            out[size_t(tix + comb_index(su, q))] += term;
          }
          int pos = k - 1;
          while (pos >= 0 && ++u[size_t(pos)] == q) {
            u[size_t(pos)] = 0;
            --pos;
          }
          if (pos < 0) more = false;
          if (k == 0) more = false;
        }
        if (k == 0) break;
      } while (std::next_permutation(ord.begin(), ord.end()));
    }
  }
  return out;
}

/// Value of the k-fold pairing on a class: the cochain, its class in the
/// subalgebroid cohomology with wedge dual-quotient coefficients, and
/// whether that class vanishes.
struct SemiregularityValue {
  int k = 0;
  CochainComplex target;
  std::vector<Rat> cochain;
  std::vector<Rat> cls;
  bool zero = true;
};

inline SemiregularityValue tau_k(const DeformProblem& prob, const ObstructionClass& ob, int k) {
  if (k < 0) throw std::domain_error("tau_k: negative level");
  const LiePair& p = prob.mo.pair;
  CochainComplex gcx = prob.gla.complex();
  if (int(ob.rep.size()) != gcx.dim(2) || !detail::vec_zero(gcx.diff(2).apply(ob.rep)))
    throw std::domain_error("tau_k: representative is not a degree-two cocycle");
  SemiregularityValue out;
  out.k = k;
  if (k <= p.q()) {
    out.target = graded_piece(prob.ring, p, ModuleAction<QRing>::scalar_action(), k).target;
  } else {
    out.target.lo = 0;
    out.target.dims.assign(p.sub.size() + 1, 0);
    out.target.d.assign(p.sub.size() + 1, QMat(0, 0));
  }
  out.cochain = atiyah_pairing(prob, ob.rep, k);
  if (k + 2 > out.target.hi()) {
    out.zero = true;
    return out;
  }
  if (!detail::vec_zero(out.target.diff(k + 2).apply(out.cochain)))
    throw std::logic_error("tau_k: the pairing is not closed");
  Cohomology h = cohomology(out.target);
  out.cls = h.class_coords(k + 2, out.cochain);
  out.zero = h.class_is_zero(k + 2, out.cochain);
  return out;
}

/// Scalar forms with at most `maxlegs` quotient-direction legs. Forms with
/// more legs span a differential ideal, so slicing rows and columns of the
/// scalar differential gives the quotient complex.
struct LegQuotient {
  CochainComplex cx;
  std::vector<std::vector<int>> coords;  // ambient scalar coordinate per slot, per degree

  std::vector<Rat> reduce(int n, const std::vector<Rat>& full) const {
    const auto& ix = coords[size_t(n)];
    std::vector<Rat> out;
    out.reserve(ix.size());
    for (int c : ix) out.push_back(full[size_t(c)]);
    return out;
  }
};

inline LegQuotient leg_quotient(const QRing& ring, const LiePair& p, int maxlegs) {
  CochainComplex full = standard_complex(ring, p.L, ModuleAction<QRing>::scalar_action());
  const int rank = p.L.rank;
  LegQuotient out;
  out.cx.lo = 0;
  out.cx.labels.resize(size_t(rank) + 1);
  for (int n = 0; n <= rank; ++n) {
    std::vector<int> ix;
    int col = 0;
    for (const auto& t : combinations(rank, n)) {
      if (detail::compcount(p, t) <= maxlegs) {
        ix.push_back(col);
        out.cx.labels[size_t(n)].push_back(full.label(n, col));
      }
      ++col;
    }
    out.coords.push_back(ix);
    out.cx.dims.push_back(int(ix.size()));
  }
  for (int n = 0; n <= rank; ++n) {
    if (n == rank) {
      out.cx.d.push_back(QMat(0, out.cx.dims[size_t(n)]));
      continue;
    }
    QMat dn(out.cx.dims[size_t(n) + 1], out.cx.dims[size_t(n)]);
    QMat fn = full.diff(n);
    for (int j = 0; j < dn.cols(); ++j)
      for (int r = 0; r < dn.rows(); ++r)
        dn(r, j) = fn(out.coords[size_t(n) + 1][size_t(r)], out.coords[size_t(n)][size_t(j)]);
    out.cx.d.push_back(dn);
  }
  return out;
}

/// Trace route for the same pairing: re-embed the representative, multiply
/// by k powers of the ambient curvature element, trace, and reduce modulo
/// forms with more than k quotient legs. Each curvature factor contributes a
/// distinct quotient leg, so the trace never drops below level k.
inline std::vector<Rat> curvature_pairing(const DeformProblem& prob, const LegQuotient& lq,
                                          const std::vector<Rat>& z, int k) {
  if (k < 0) throw std::domain_error("curvature_pairing: negative level");
  const CurvedDG& a = prob.mo.dg;
  const LiePair& p = prob.mo.pair;
  const int rank = p.L.rank;
  std::vector<Rat> w(size_t(a.dim(2)), Rat(0));
  const auto& ix = prob.gla.coords[2];
  for (size_t j = 0; j < ix.size(); ++j) w[size_t(ix[j])] = z[j];
  int deg = 2;
  for (int t = 0; t < k; ++t) {
    w = a.product(2, a.curv, deg, w);
    deg += 2;
  }
  if (deg > rank) return {};
  Rat fact(1);
  for (int i = 2; i <= k; ++i) fact *= Rat(i);
  for (auto& v : w) v /= fact;
  std::vector<Rat> s = prob.tr.tr[size_t(deg)].apply(w);
  int col = 0;
  for (const auto& t : combinations(rank, deg)) {
    if (detail::compcount(p, t) < k && s[size_t(col)] != 0)
      throw std::logic_error("curvature_pairing: the trace dropped below its leg level");
    ++col;
  }
  return lq.reduce(deg, s);
}

/// True when the first-page dimensions of the leg filtration already add up
/// to the scalar cohomology in every total degree.
inline bool leray_degenerate(const QRing& ring, const LiePair& p) {
  auto act = ModuleAction<QRing>::scalar_action();
  auto e1 = leray_E1_dims(ring, p, act);
  Cohomology h = cohomology(standard_complex(ring, p.L, act));
  for (int n = 0; n <= p.L.rank; ++n) {
    int sum = 0;
    for (const auto& kv : e1)
      if (kv.first.first + kv.first.second == n) sum += kv.second;
    if (sum != h.dim(n)) return false;
  }
  return true;
}

/// Certificate that the trace pairing of an obstruction class is exact in
/// the leg quotient. For classes born from lifting problems the theorem
/// asserts it; for exploratory classes the result is a report. When the
/// filtration degenerates at the first page a genuine class must already
/// have vanishing wedge-route pairing, and `pass` includes that.
struct AnnihilationCheck {
  int k = 0;
  bool exploratory = false;
  LegQuotient quotient;
  std::vector<Rat> value;      // trace pairing, degree 2k+2 in the quotient
  bool closed = false;
  bool exact = false;
  std::vector<Rat> primitive;  // degree 2k+1 solution when exact
  bool degenerate = false;
  SemiregularityValue tau;
  bool pass = false;
};

inline AnnihilationCheck annihilation_check(const DeformProblem& prob, const ObstructionClass& ob,
                                            int k, bool exploratory = false) {
  if (k < 0) throw std::domain_error("annihilation_check: negative level");
  if (!ob.genuine() && !exploratory)
    throw std::domain_error(
        "annihilation_check: class was not produced by a lifting problem; "
        "pass exploratory to report on it anyway");
  const LiePair& p = prob.mo.pair;
  const int rank = p.L.rank;
  const int na = int(p.sub.size());
  AnnihilationCheck out;
  out.k = k;
  out.exploratory = !ob.genuine();
  out.tau = tau_k(prob, ob, k);
  out.quotient = leg_quotient(prob.ring, p, k);
  out.value = curvature_pairing(prob, out.quotient, ob.rep, k);
  const int n = 2 * k + 2;

  // The trace route must agree with the wedge route pushed through the
  // graded comparison; the sign is the unshuffle of k quotient legs past
  // the k+2 subalgebroid legs.
  if (k <= p.q() && k + 2 <= na && n <= rank) {
    GradedPiece gp = graded_piece(prob.ring, p, ModuleAction<QRing>::scalar_action(), k);
    if (!gp.chain_map || !gp.bijective)
      throw std::logic_error("annihilation_check: graded comparison is not an isomorphism");
    const QMat& ph = gp.phi[size_t(k + 2)];
    std::vector<Rat> piece_v(size_t(ph.cols()), Rat(0));
    for (int j = 0; j < ph.cols(); ++j)
      for (int r = 0; r < ph.rows(); ++r)
        if (ph(r, j) != 0) piece_v[size_t(j)] += ph(r, j) * out.tau.cochain[size_t(r)];
    const Rat legsign = ((k * (k + 1) / 2) % 2 == 0) ? Rat(1) : Rat(-1);
    size_t qslot = 0, pslot = 0;
    for (const auto& t : combinations(rank, n)) {
      int cc = detail::compcount(p, t);
      if (cc > k) continue;
      Rat want(0);
      if (cc == k) want = legsign * piece_v[pslot++];
      if (out.value[qslot] != want)
        throw std::logic_error("annihilation_check: trace route and graded route disagree");
      ++qslot;
    }
  }

  out.closed = detail::vec_zero(out.quotient.cx.diff(n).apply(out.value));
  auto prim = solve(out.quotient.cx.diff(n - 1), out.value);
  if (prim) {
    out.exact = true;
    out.primitive = *prim;
  }
  out.degenerate = leray_degenerate(prob.ring, p);
  out.pass = out.closed && out.exact && (out.exploratory || !out.degenerate || out.tau.zero);
  return out;
}

}  // namespace liekit
