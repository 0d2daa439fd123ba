#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "liepair.hpp"

namespace liekit {

/// Finite-dimensional curved differential graded algebra, given by bases per
/// degree, a multiplication table, the differential, and the curvature
/// element. The defining identities are d(1) = 0, d(R) = 0 and
/// d^2 = [R, -]; they are checked, not assumed.
struct CurvedDG {
  int lo = 0;
  std::vector<int> dims;
  std::vector<QMat> d;                        // d[n - lo]: dim(n+1) x dim(n)
  std::map<std::pair<int, int>, QMat> mul;    // dim(n1+n2) x (dim(n1) * dim(n2))
  std::vector<Rat> curv;                      // degree-2 coordinates
  std::vector<Rat> unit;                      // degree-0 coordinates

  int hi() const { return lo + int(dims.size()) - 1; }
  int dim(int n) const { return (n < lo || n > hi()) ? 0 : dims[size_t(n - lo)]; }

  std::vector<Rat> apply_d(int n, const std::vector<Rat>& x) const {
    if (n < lo || n > hi() || n == hi()) return std::vector<Rat>(size_t(dim(n + 1)), Rat(0));
    return d[size_t(n - lo)].apply(x);
  }

  /// Product of coordinate vectors in degrees n1 and n2.
  std::vector<Rat> product(int n1, const std::vector<Rat>& x, int n2,
                           const std::vector<Rat>& y) const {
    std::vector<Rat> out(size_t(dim(n1 + n2)), Rat(0));
    auto it = mul.find({n1, n2});
    if (it == mul.end()) return out;
    const QMat& t = it->second;
    const int d2 = dim(n2);
    for (int i = 0; i < int(x.size()); ++i) {
      if (x[size_t(i)] == 0) continue;
      for (int j = 0; j < d2; ++j) {
        if (y[size_t(j)] == 0) continue;
        Rat c = x[size_t(i)] * y[size_t(j)];
        int col = i * d2 + j;
        for (int r = 0; r < t.rows(); ++r)
          if (t(r, col) != 0) out[size_t(r)] += c * t(r, col);
      }
    }
    return out;
  }

  std::vector<Rat> basis_vec(int n, int i) const {
    std::vector<Rat> v(size_t(dim(n)), Rat(0));
    v[size_t(i)] = 1;
    return v;
  }
};

namespace detail {

inline bool vec_zero(const std::vector<Rat>& v) {
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

inline std::vector<Rat> vec_sub(const std::vector<Rat>& a, const std::vector<Rat>& b) {
  std::vector<Rat> o(a);
  for (size_t i = 0; i < o.size(); ++i) o[i] -= b[i];
  return o;
}

inline std::vector<Rat> vec_add(const std::vector<Rat>& a, const std::vector<Rat>& b) {
  std::vector<Rat> o(a);
  for (size_t i = 0; i < o.size(); ++i) o[i] += b[i];
  return o;
}

}  // namespace detail

/// Verifies unit, Leibniz, d(R) = 0 and d^2 = [R, -] on all basis elements,
/// and associativity on basis triples unless skipped.
inline bool check_curved(const CurvedDG& a, std::string* why = nullptr,
                         bool check_assoc = true) {
  auto fail = [&](const std::string& w) {
    if (why) *why = w;
    return false;
  };
  using detail::vec_sub;
  using detail::vec_zero;

  if (a.dim(0) == 0 || detail::vec_zero(a.unit)) return fail("no unit");
  for (int n = a.lo; n <= a.hi(); ++n)
    for (int i = 0; i < a.dim(n); ++i) {
      auto e = a.basis_vec(n, i);
      if (!vec_zero(vec_sub(a.product(0, a.unit, n, e), e))) return fail("unit fails on the left");
      if (!vec_zero(vec_sub(a.product(n, e, 0, a.unit), e))) return fail("unit fails on the right");
    }

  for (int n1 = a.lo; n1 <= a.hi(); ++n1)
    for (int n2 = a.lo; n2 + n1 <= a.hi(); ++n2)
      for (int i = 0; i < a.dim(n1); ++i)
        for (int j = 0; j < a.dim(n2); ++j) {
          auto ei = a.basis_vec(n1, i), ej = a.basis_vec(n2, j);
          auto p = a.product(n1, ei, n2, ej);
          auto lhs = a.apply_d(n1 + n2, p);
          auto rhs = a.product(n1 + 1, a.apply_d(n1, ei), n2, ej);
          auto second = a.product(n1, ei, n2 + 1, a.apply_d(n2, ej));
          rhs = (n1 % 2 == 0) ? detail::vec_add(rhs, second) : vec_sub(rhs, second);
          if (!vec_zero(vec_sub(lhs, rhs)))
            return fail("leibniz fails at degrees (" + std::to_string(n1) + "," +
                        std::to_string(n2) + ") basis (" + std::to_string(i) + "," +
                        std::to_string(j) + ")");
        }

  if (!vec_zero(a.apply_d(2, a.curv))) return fail("curvature is not closed");

  for (int n = a.lo; n <= a.hi(); ++n)
    for (int i = 0; i < a.dim(n); ++i) {
      auto e = a.basis_vec(n, i);
      auto dd = a.apply_d(n + 1, a.apply_d(n, e));
      auto comm = vec_sub(a.product(2, a.curv, n, e), a.product(n, e, 2, a.curv));
      if (!vec_zero(vec_sub(dd, comm)))
        return fail("d^2 != [R,-] at degree " + std::to_string(n) + " basis " + std::to_string(i));
    }

  if (check_assoc) {
    for (int n1 = a.lo; n1 <= a.hi(); ++n1)
      for (int n2 = a.lo; n1 + n2 <= a.hi(); ++n2)
        for (int n3 = a.lo; n1 + n2 + n3 <= a.hi(); ++n3) {
          // deterministic stride keeps the cubic sweep bounded per block
          long total = long(a.dim(n1)) * a.dim(n2) * a.dim(n3);
          long step = total > 200 ? total / 200 : 1;
          long idx = 0;
          for (int i = 0; i < a.dim(n1); ++i)
            for (int j = 0; j < a.dim(n2); ++j) {
              auto pij = a.product(n1, a.basis_vec(n1, i), n2, a.basis_vec(n2, j));
              for (int k = 0; k < a.dim(n3); ++k, ++idx) {
                if (idx % step != 0) continue;
                auto ek = a.basis_vec(n3, k);
                auto lhs = a.product(n1 + n2, pij, n3, ek);
                auto rhs = a.product(n1, a.basis_vec(n1, i), n2 + n3,
                                     a.product(n2, a.basis_vec(n2, j), n3, ek));
                if (!vec_zero(vec_sub(lhs, rhs)))
                  return fail("associativity fails at degrees (" + std::to_string(n1) + "," +
                              std::to_string(n2) + "," + std::to_string(n3) + ")");
              }
            }
        }
  }
  return true;
}

/// Conjugates the differential by a degree-one element: d' = d + [x, -],
/// R' = R + dx + x x. The result is curved differential graded again, with
/// the same underlying algebra.
inline CurvedDG twist(const CurvedDG& a, const std::vector<Rat>& x) {
  CurvedDG out = a;
  for (int n = a.lo; n < a.hi(); ++n) {
    QMat add(a.dim(n + 1), a.dim(n));
    for (int i = 0; i < a.dim(n); ++i) {
      auto e = a.basis_vec(n, i);
      auto xe = a.product(1, x, n, e);
      auto ex = a.product(n, e, 1, x);
      auto br = (n % 2 == 0) ? detail::vec_sub(xe, ex) : detail::vec_add(xe, ex);
      for (int r = 0; r < int(br.size()); ++r) add(r, i) = br[size_t(r)];
    }
    out.d[size_t(n - a.lo)] = a.d[size_t(n - a.lo)] + add;
  }
  out.curv = detail::vec_add(detail::vec_add(a.curv, a.apply_d(1, x)), a.product(1, x, 1, x));
  return out;
}

/// The endomorphism-valued form algebra of a pair extension: forms on L with
/// End(E) coefficients, multiplication by wedge-compose, differential from
/// the extended connection, curvature element its curvature.
struct EndModel {
  LiePair pair;
  int m = 1;
  std::vector<RMat<QRing>> nabla;  // one E-connection matrix per L generator
  CurvedDG dg;
  bool sub_flat = true;  // no curvature component along two subalgebroid legs
};

inline EndModel end_model(const QRing& ring, const LiePair& p,
                          const std::vector<RMat<QRing>>& nabla) {
  EndModel mo;
  mo.pair = p;
  mo.nabla = nabla;
  mo.m = nabla.empty() ? 1 : nabla[0].rows;
  const int rank = p.L.rank;
  const int f = mo.m * mo.m;
  auto eact = ModuleAction<QRing>::endo_action(nabla);

  CurvedDG& a = mo.dg;
  a.lo = 0;
  for (int n = 0; n <= rank; ++n) a.dims.push_back(int(binom(rank, n)) * f);

  for (int n = 0; n <= rank; ++n) {
    if (n == rank) {
      a.d.push_back(QMat(0, a.dims[size_t(n)]));
      continue;
    }
    QMat d(a.dims[size_t(n + 1)], a.dims[size_t(n)]);
    int col = 0;
    for (const auto& t : combinations(rank, n))
      for (int e = 0; e < f; ++e, ++col) {
        PointForm w = PointForm::zero(ring, rank, n, mo.m, mo.m);
        w.at(t).a[size_t(e)] = 1;
        auto coords = form_coords(derham(ring, p.L, eact, w));
        for (int r = 0; r < int(coords.size()); ++r) d(r, col) = coords[size_t(r)];
      }
    a.d.push_back(d);
  }

  // multiplication table from tuple merges and matrix-unit composition:
  // (T1, E_{uv}) (T2, E_{wz}) = sign(T1, T2) delta_{vw} (T1 cup T2, E_{uz})
  for (int n1 = 0; n1 <= rank; ++n1)
    for (int n2 = 0; n1 + n2 <= rank; ++n2) {
      auto t1s = combinations(rank, n1);
      auto t2s = combinations(rank, n2);
      QMat t(a.dims[size_t(n1 + n2)], a.dims[size_t(n1)] * a.dims[size_t(n2)]);
      for (int i1 = 0; i1 < int(t1s.size()); ++i1)
        for (int i2 = 0; i2 < int(t2s.size()); ++i2) {
          const auto& T1 = t1s[size_t(i1)];
          const auto& T2 = t2s[size_t(i2)];
          std::vector<int> merged(T1.size() + T2.size());
          std::merge(T1.begin(), T1.end(), T2.begin(), T2.end(), merged.begin());
          bool dup = false;
          for (size_t z = 0; z + 1 < merged.size(); ++z)
            if (merged[z] == merged[z + 1]) dup = true;
          if (dup) continue;
          std::vector<bool> mark;
          {
            size_t p1 = 0;
            for (int x : merged) {
              bool from1 = p1 < T1.size() && T1[p1] == x;
              if (from1) ++p1;
              mark.push_back(from1);
            }
          }
          int sgn = unshuffle_sign(mark);
          int row_tuple = comb_index(merged, rank);
          for (int u = 0; u < mo.m; ++u)
            for (int v = 0; v < mo.m; ++v)
              for (int z = 0; z < mo.m; ++z) {
                int e1 = u * mo.m + v, e2 = v * mo.m + z;
                int col = (i1 * f + e1) * a.dims[size_t(n2)] + (i2 * f + e2);
                t(row_tuple * f + u * mo.m + z, col) += Rat(sgn);
              }
        }
      a.mul[{n1, n2}] = t;
    }

  auto R = curvature(ring, p.L, eact);
  a.curv = form_coords(R);
  a.unit.assign(size_t(f), Rat(0));
  for (int u = 0; u < mo.m; ++u) a.unit[size_t(u * mo.m + u)] = 1;

  for (const auto& t : combinations(rank, 2))
    if (detail::compcount(p, t) == 0 && !R.at(t).is_zero(ring)) mo.sub_flat = false;
  return mo;
}

/// Span of k-fold products of ideal elements, degree by degree.
inline std::vector<QMat> ideal_power(const CurvedDG& a, const std::vector<QMat>& ideal, int k) {
  if (k <= 1) return ideal;
  auto prev = ideal_power(a, ideal, k - 1);
  std::vector<QMat> out;
  for (int n = a.lo; n <= a.hi(); ++n) {
    std::vector<std::vector<Rat>> cols;
    for (int n1 = a.lo; n1 <= a.hi(); ++n1) {
      int n2 = n - n1;
      if (n2 < a.lo || n2 > a.hi()) continue;
      const QMat& s1 = prev[size_t(n1 - a.lo)];
      const QMat& s2 = ideal[size_t(n2 - a.lo)];
      for (int c1 = 0; c1 < s1.cols(); ++c1)
        for (int c2 = 0; c2 < s2.cols(); ++c2) {
          auto v = a.product(n1, s1.col(c1), n2, s2.col(c2));
          if (!detail::vec_zero(v)) cols.push_back(v);
        }
    }
    QMat m(a.dim(n), int(cols.size()));
    for (int j = 0; j < int(cols.size()); ++j)
      for (int r = 0; r < a.dim(n); ++r) m(r, j) = cols[size_t(j)][size_t(r)];
    // reduce to a canonical column basis of the span
    out.push_back(span_echelon(m).transposed());
  }
  return out;
}

inline bool span_contains(const QMat& span, const std::vector<Rat>& v) {
  return in_span(span, v);
}

/// The quotient of the one-leg-or-more ideal by its square, as a complex on
/// the exactly-one-leg coordinate basis.
struct IdealQuotient {
  CochainComplex cx;
  std::vector<std::vector<int>> coords;  // ambient coordinate of each basis slot, per degree

  std::vector<Rat> reduce(int n, const std::vector<Rat>& full) const {
    const auto& ix = coords[size_t(n)];
    std::vector<Rat> out;
    out.reserve(ix.size());
    for (int c : ix) out.push_back(full[size_t(c)]);
    return out;
  }
};

inline IdealQuotient ideal_quotient(const EndModel& mo) {
  const LiePair& p = mo.pair;
  const int rank = p.L.rank;
  const int f = mo.m * mo.m;
  IdealQuotient q;
  q.cx.lo = 0;
  q.coords.resize(size_t(rank) + 1);
  q.cx.labels.resize(size_t(rank) + 1);
  for (int n = 0; n <= rank; ++n) {
    int col = 0;
    for (const auto& t : combinations(rank, n)) {
      bool one_leg = detail::compcount(p, t) == 1;
      for (int e = 0; e < f; ++e, ++col)
        if (one_leg) {
          q.coords[size_t(n)].push_back(col);
          q.cx.labels[size_t(n)].push_back(detail::tuple_label(p.L.names, t) + ":m" +
                                           std::to_string(e));
        }
    }
    q.cx.dims.push_back(int(q.coords[size_t(n)].size()));
  }
  for (int n = 0; n <= rank; ++n) {
    if (n == rank) {
      q.cx.d.push_back(QMat(0, q.cx.dim(n)));
      continue;
    }
    QMat d(q.cx.dim(n + 1), q.cx.dim(n));
    for (int j = 0; j < q.cx.dim(n); ++j) {
      auto full = mo.dg.apply_d(n, mo.dg.basis_vec(n, q.coords[size_t(n)][size_t(j)]));
      auto red = q.reduce(n + 1, full);
      for (int r = 0; r < int(red.size()); ++r) d(r, j) = red[size_t(r)];
    }
    q.cx.d.push_back(d);
  }
  return q;
}

/// Linearized vanishing of the curvature class modulo the ideal square: the
/// class of R in H^2(I/I^2) is zero exactly when some one-leg one-form x
/// has R + dx in I^2; then R + dx + x x lands in I^2 on the nose and the
/// twist by x is the flat-to-second-order extension.
struct CurvedAtiyah {
  bool vanishes = false;
  std::vector<Rat> witness;  // degree-1 coordinates, supported on one-leg forms
  std::vector<Rat> cls;      // class of R in the degree-2 cohomology representatives
  IdealQuotient quotient;
  Cohomology h;
};

inline CurvedAtiyah curved_atiyah(const EndModel& mo) {
  if (!mo.sub_flat)
    throw std::domain_error("curved_atiyah: extension is not flat along the subalgebroid");
  CurvedAtiyah out;
  out.quotient = ideal_quotient(mo);
  out.h = cohomology(out.quotient.cx);
  auto rbar = out.quotient.reduce(2, mo.dg.curv);
  out.cls = out.h.class_coords(2, rbar);

  const auto& q1 = out.quotient.coords[1];
  auto ideal2 = leg_levels(mo.pair, mo.m * mo.m, 2);
  QMat dcols(mo.dg.dim(2), int(q1.size()));
  for (int j = 0; j < int(q1.size()); ++j) {
    auto dv = mo.dg.apply_d(1, mo.dg.basis_vec(1, q1[size_t(j)]));
    for (int r = 0; r < int(dv.size()); ++r) dcols(r, j) = dv[size_t(r)];
  }
  QMat sys = dcols.hstack(ideal2[2]);
  std::vector<Rat> rhs(mo.dg.curv);
  for (auto& v : rhs) v = -v;
  auto sol = solve(sys, rhs);
  if (!sol) return out;

  out.vanishes = true;
  out.witness.assign(size_t(mo.dg.dim(1)), Rat(0));
  for (int j = 0; j < int(q1.size()); ++j) out.witness[size_t(q1[size_t(j)])] = (*sol)[size_t(j)];

  // exact verification: the twisted curvature R + dx + x x lies in the
  // ideal square, not merely modulo it
  auto rx = detail::vec_add(detail::vec_add(mo.dg.curv, mo.dg.apply_d(1, out.witness)),
                            mo.dg.product(1, out.witness, 1, out.witness));
  if (!in_span(ideal2[2], rx))
    throw std::domain_error("curved_atiyah: witness fails the exact ideal-square check");
  return out;
}

/// Fiberwise trace down to scalar forms; a chain map onto the standard
/// complex even when the connection is curved, since traces of commutators
/// vanish.
struct TraceMaps {
  std::vector<QMat> tr;  // per degree: scalar dim x endomorphism dim
  CochainComplex scalar;
};

inline TraceMaps trace_maps(const QRing& ring, const EndModel& mo) {
  TraceMaps tm;
  tm.scalar = standard_complex(ring, mo.pair.L, ModuleAction<QRing>::scalar_action());
  const int rank = mo.pair.L.rank;
  const int f = mo.m * mo.m;
  for (int n = 0; n <= rank; ++n) {
    int nt = int(binom(rank, n));
    QMat t(nt, nt * f);
    for (int i = 0; i < nt; ++i)
      for (int u = 0; u < mo.m; ++u) t(i, i * f + u * mo.m + u) = 1;
    tm.tr.push_back(t);
  }
  return tm;
}

inline bool check_trace(const EndModel& mo, const TraceMaps& tm, std::string* why = nullptr) {
  auto fail = [&](const std::string& w) {
    if (why) *why = w;
    return false;
  };
  const CurvedDG& a = mo.dg;
  for (int n = a.lo; n < a.hi(); ++n) {
    QMat lhs = tm.scalar.diff(n) * tm.tr[size_t(n - a.lo)];
    QMat rhs = tm.tr[size_t(n + 1 - a.lo)] * a.d[size_t(n - a.lo)];
    if (!(lhs - rhs).is_zero()) return fail("trace is not a chain map at degree " + std::to_string(n));
  }
  for (int n1 = a.lo; n1 <= a.hi(); ++n1)
    for (int n2 = a.lo; n1 + n2 <= a.hi(); ++n2)
      for (int i = 0; i < a.dim(n1); ++i)
        for (int j = 0; j < a.dim(n2); ++j) {
          auto p = a.product(n1, a.basis_vec(n1, i), n2, a.basis_vec(n2, j));
          auto q = a.product(n2, a.basis_vec(n2, j), n1, a.basis_vec(n1, i));
          auto tp = tm.tr[size_t(n1 + n2 - a.lo)].apply(p);
          auto tq = tm.tr[size_t(n1 + n2 - a.lo)].apply(q);
          bool sign = (n1 * n2) % 2 != 0;
          auto difv = sign ? detail::vec_add(tp, tq) : detail::vec_sub(tp, tq);
          if (!detail::vec_zero(difv))
            return fail("graded commutators have nonzero trace at degrees (" +
                        std::to_string(n1) + "," + std::to_string(n2) + ")");
        }
  // the trace of a k-fold ideal product keeps at least k quotient legs
  auto ideal = leg_levels(mo.pair, mo.m * mo.m, 1);
  for (int k = 1; k <= 2; ++k) {
    auto pk = (k == 1) ? ideal : ideal_power(a, ideal, k);
    auto gk = leg_levels(mo.pair, 1, k);
    for (int n = a.lo; n <= a.hi(); ++n) {
      const QMat& s = pk[size_t(n - a.lo)];
      for (int c = 0; c < s.cols(); ++c)
        if (!in_span(gk[size_t(n - a.lo)], tm.tr[size_t(n - a.lo)].apply(s.col(c))))
          return fail("trace of ideal power " + std::to_string(k) + " leaves its level");
    }
  }
  return true;
}

}  // namespace liekit
