#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "complex.hpp"
#include "laurent.hpp"

namespace liekit {

/// Free sheaf of finite rank on the rational curve glued from two affine
/// charts, coordinates t and s with s = t^{-1} on the overlap. Sections over
/// each chart are polynomials of degree <= window in the chart coordinate;
/// overlap sections are Laurent polynomials in t. The transition matrix
/// rewrites a chart-1 section in chart-0 coordinates: component j of g(s)
/// contributes trans[i][j](t) * g_j(t^{-1}) to component i.
struct TwoChartBundle {
  int rank = 1;
  int window = 6;
  std::vector<std::vector<LaurentWindow>> trans;
};

namespace detail {

/// Nonzero-coefficient exponent bounds; false when the entry is zero.
inline bool lw_support(const LaurentWindow& f, int* lo, int* hi) {
  bool any = false;
  for (int k = f.lo; k <= f.hi; ++k) {
    if (f.get(k) == 0) continue;
    if (!any) *lo = k;
    *hi = k;
    any = true;
  }
  return any;
}

/// Laplace expansion; `span` bounds every partial product of entry exponents.
inline LaurentWindow lw_det(const std::vector<std::vector<LaurentWindow>>& m,
                            std::vector<int> cols, int row, int span) {
  if (cols.size() == 1) return lw_clip(m[size_t(row)][size_t(cols[0])], -span, span);
  LaurentWindow acc(-span, span);
  for (size_t j = 0; j < cols.size(); ++j) {
    std::vector<int> rest;
    for (size_t u = 0; u < cols.size(); ++u)
      if (u != j) rest.push_back(cols[u]);
    LaurentWindow minor = lw_det(m, rest, row + 1, span);
    LaurentWindow term = lw_mul_into(m[size_t(row)][size_t(cols[j])], minor, -span, span);
    acc = lw_add(acc, j % 2 ? lw_neg(term) : term);
  }
  return acc;
}

}  // namespace detail

/// Validates rank, window, and invertibility: the determinant of the
/// transition matrix must be a unit, i.e. a single nonzero monomial.
inline TwoChartBundle make_bundle(int window, std::vector<std::vector<LaurentWindow>> trans) {
  TwoChartBundle b;
  b.rank = int(trans.size());
  b.window = window;
  if (window < 1) throw std::invalid_argument("make_bundle: window must be positive");
  if (b.rank < 1) throw std::invalid_argument("make_bundle: empty transition matrix");
  for (const auto& row : trans)
    if (int(row.size()) != b.rank)
      throw std::invalid_argument("make_bundle: transition matrix is not square");
  int span = 1;
  for (const auto& row : trans) {
    bool any = false;
    for (const auto& e : row) {
      int elo, ehi;
      if (!detail::lw_support(e, &elo, &ehi)) continue;
      span = std::max({span, -elo * b.rank, ehi * b.rank});
      any = true;
    }
    if (!any) throw std::invalid_argument("make_bundle: transition matrix has a zero row");
  }
  std::vector<int> cols(size_t(b.rank));
  for (int j = 0; j < b.rank; ++j) cols[size_t(j)] = j;
  LaurentWindow det = detail::lw_det(trans, cols, 0, span);
  int nonzero = 0;
  for (int k = det.lo; k <= det.hi; ++k)
    if (det.get(k) != 0) ++nonzero;
  if (det.truncated || nonzero != 1)
    throw std::invalid_argument("make_bundle: transition determinant is not a unit monomial");
  b.trans = std::move(trans);
  return b;
}

inline TwoChartBundle monomial_bundle(int window, int deg, const Rat& coeff = Rat(1)) {
  LaurentWindow e = LaurentWindow::monomial(deg, deg, deg, coeff);
  return make_bundle(window, {{e}});
}

/// O(n): transition t^n, global sections the polynomials of degree <= n.
inline TwoChartBundle line_bundle(int window, int n) { return monomial_bundle(window, n); }

/// Vector fields p(t) d/dt; the chart-1 generator d/ds pulls back to -t^2 d/dt.
inline TwoChartBundle tangent_bundle(int window) {
  return monomial_bundle(window, 2, Rat(-1));
}

/// One-forms p(t) dt; ds = -t^{-2} dt on the overlap.
inline TwoChartBundle cotangent_bundle(int window) {
  return monomial_bundle(window, -2, Rat(-1));
}

/// Rank-two extension of O(b) by O(a) with unit corner: [[t^a, 1], [0, t^b]].
inline TwoChartBundle extension_bundle(int window, int a, int b) {
  LaurentWindow zero(0, 0);
  return make_bundle(window, {{LaurentWindow::monomial(a, a, a), LaurentWindow::monomial(0, 0, 0)},
                              {zero, LaurentWindow::monomial(b, b, b)}});
}

/// Monomial basis of a section space: component i carries exponents
/// lo[i]..hi[i] of the chart variable, blocks concatenated in component order.
struct SectionBasis {
  std::vector<int> lo, hi;

  int rank() const { return int(lo.size()); }

  int dim() const {
    int d = 0;
    for (size_t i = 0; i < lo.size(); ++i) d += hi[i] - lo[i] + 1;
    return d;
  }

  int index(int comp, int exp) const {
    int off = 0;
    for (int i = 0; i < comp; ++i) off += hi[size_t(i)] - lo[size_t(i)] + 1;
    return off + exp - lo[size_t(comp)];
  }

  std::pair<int, int> comp_exp(int idx) const {
    for (size_t i = 0; i < lo.size(); ++i) {
      int w = hi[i] - lo[i] + 1;
      if (idx < w) return {int(i), lo[i] + idx};
      idx -= w;
    }
    throw std::out_of_range("SectionBasis: index out of range");
  }

  std::string label(int idx, const std::string& var) const {
    auto [comp, exp] = comp_exp(idx);
    std::string mon = exp == 0 ? "1" : exp == 1 ? var : var + "^" + std::to_string(exp);
    if (rank() == 1) return mon;
    return "e" + std::to_string(comp) + (exp == 0 ? "" : "*" + mon);
  }
};

/// Chart sections: every component polynomial of degree <= window.
inline SectionBasis chart_basis(const TwoChartBundle& b) {
  SectionBasis s;
  s.lo.assign(size_t(b.rank), 0);
  s.hi.assign(size_t(b.rank), b.window);
  return s;
}

/// Overlap sections, windowed so that both chart restrictions land without
/// truncation: the hull of [0, window] and of the shifted transition support.
inline SectionBasis overlap_basis(const TwoChartBundle& b) {
  SectionBasis s;
  s.lo.resize(size_t(b.rank));
  s.hi.resize(size_t(b.rank));
  for (int i = 0; i < b.rank; ++i) {
    int lo = 0, hi = b.window;
    for (int j = 0; j < b.rank; ++j) {
      int elo, ehi;
      if (!detail::lw_support(b.trans[size_t(i)][size_t(j)], &elo, &ehi)) continue;
      lo = std::min(lo, elo - b.window);
      hi = std::max(hi, ehi);
    }
    s.lo[size_t(i)] = lo;
    s.hi[size_t(i)] = hi;
  }
  return s;
}

/// Restriction of chart sections to the overlap, in chart-0 coordinates.
/// Chart 0 includes monomials as they are; chart 1 substitutes s = t^{-1} and
/// applies the transition matrix.
inline QMat restrict_chart(const TwoChartBundle& b, int which) {
  SectionBasis ch = chart_basis(b), ov = overlap_basis(b);
  QMat m(ov.dim(), ch.dim());
  for (int j = 0; j < b.rank; ++j) {
    for (int e = 0; e <= b.window; ++e) {
      int src = ch.index(j, e);
      if (which == 0) {
        m(ov.index(j, e), src) = Rat(1);
        continue;
      }
      const auto& col = b.trans;
      for (int i = 0; i < b.rank; ++i) {
        const LaurentWindow& f = col[size_t(i)][size_t(j)];
        for (int k = f.lo; k <= f.hi; ++k) {
          Rat c = f.get(k);
          if (c == 0) continue;
          m(ov.index(i, k - e), src) += c;
        }
      }
    }
  }
  return m;
}

/// Alternating Čech complex of the two-open cover: degree 0 is
/// Γ(U_0) ⊕ Γ(U_1), degree 1 the overlap sections, d(f, g) = g|_t - f|_t.
inline CochainComplex cech_complex(const TwoChartBundle& b) {
  SectionBasis ch = chart_basis(b), ov = overlap_basis(b);
  CochainComplex cx;
  cx.lo = 0;
  cx.dims = {2 * ch.dim(), ov.dim()};
  QMat r0 = restrict_chart(b, 0), r1 = restrict_chart(b, 1);
  QMat d(ov.dim(), 2 * ch.dim());
  for (int i = 0; i < ov.dim(); ++i) {
    for (int j = 0; j < ch.dim(); ++j) {
      d(i, j) = -r0(i, j);
      d(i, ch.dim() + j) = r1(i, j);
    }
  }
  cx.d = {d, QMat(0, ov.dim())};
  cx.labels.resize(2);
  for (int j = 0; j < ch.dim(); ++j) cx.labels[0].push_back("u0:" + ch.label(j, "t"));
  for (int j = 0; j < ch.dim(); ++j) cx.labels[0].push_back("u1:" + ch.label(j, "s"));
  for (int i = 0; i < ov.dim(); ++i) cx.labels[1].push_back(ov.label(i, "t"));
  return cx;
}

inline std::string section_str(const SectionBasis& basis, const std::vector<Rat>& v,
                               const std::string& var) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    if (!out.empty()) out += " + ";
    std::string mon = basis.label(int(i), var);
    if (v[i] == 1)
      out += mon;
    else
      out += rat_str(v[i]) + (mon == "1" ? "" : "*" + mon);
  }
  return out.empty() ? "0" : out;
}

/// Čech cohomology of the bundle with deterministic representatives. The
/// window is a truncation, so the dimensions are recomputed at a half-again
/// wider window; `stable` records whether they agreed. Unstable results must
/// be surfaced to the caller, never silently used.
struct CechCohomology {
  TwoChartBundle bundle;
  CochainComplex cx;
  Cohomology h;
  int h0 = 0, h1 = 0;
  bool stable = false;
  std::vector<std::string> h1_labels;
};

inline CechCohomology cech_cohomology(const TwoChartBundle& b) {
  CechCohomology out;
  out.bundle = b;
  out.cx = cech_complex(b);
  out.h = cohomology(out.cx);
  out.h0 = out.h.dim(0);
  out.h1 = out.h.dim(1);
  SectionBasis ov = overlap_basis(b);
  for (int k = 0; k < out.h1; ++k)
    out.h1_labels.push_back(section_str(ov, out.h[1].reps.col(k), "t"));
  TwoChartBundle wide = b;
  wide.window = b.window + (b.window + 1) / 2;
  CochainComplex wcx = cech_complex(wide);
  Cohomology wh = cohomology(wcx);
  out.stable = wh.dim(0) == out.h0 && wh.dim(1) == out.h1;
  return out;
}

/// Logarithmic derivative phi'/phi of a rank-one transition, as a Čech
/// 1-cocycle with values in one-forms: coordinates in overlap_basis(omega).
/// For phi = c t^n this is n t^{-1} dt, the curvature cocycle of the pair of
/// coordinate connections on the two charts.
inline std::vector<Rat> transition_log_derivative(const TwoChartBundle& line,
                                                  const TwoChartBundle& omega) {
  if (line.rank != 1 || omega.rank != 1)
    throw std::invalid_argument("transition_log_derivative: rank-one bundles only");
  const LaurentWindow& phi = line.trans[0][0];
  int lo, hi;
  if (!detail::lw_support(phi, &lo, &hi) || lo != hi)
    throw std::invalid_argument("transition_log_derivative: transition is not a unit monomial");
  SectionBasis ov = overlap_basis(omega);
  std::vector<Rat> c(size_t(ov.dim()));
  c[size_t(ov.index(0, -1))] = Rat(lo);
  return c;
}

/// Atiyah data of O(n) against the tangent directions: the cocycle n t^{-1} dt
/// and its class in H^1 of the one-forms, in the representative basis there.
struct LineAtiyah {
  std::vector<Rat> cocycle;
  std::vector<Rat> cls;
  CechCohomology omega;
};

inline LineAtiyah line_atiyah(int n, int window) {
  LineAtiyah out;
  out.omega = cech_cohomology(cotangent_bundle(window));
  out.cocycle = transition_log_derivative(line_bundle(window, n), out.omega.bundle);
  out.cls = out.omega.h.class_coords(1, out.cocycle);
  return out;
}

}  // namespace liekit
