#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "complex.hpp"

namespace liekit {

/// Decreasing filtration F_0 >= F_1 >= ... >= F_pmax >= F_{pmax+1} = 0 of a
/// cochain complex by subcomplexes, each level given by spanning columns per
/// degree. F_0 must be the whole complex and d must preserve every level.
struct FilteredComplex {
  CochainComplex c;
  std::vector<std::vector<QMat>> levels;  // levels[p][n - c.lo]

  int pmax() const { return int(levels.size()) - 1; }

  QMat level(int p, int n) const {
    if (n < c.lo || n > c.hi()) return QMat(c.dim(n), 0);
    if (p <= 0) return QMat::identity(c.dim(n));
    if (p > pmax()) return QMat(c.dim(n), 0);
    return levels[size_t(p)][size_t(n - c.lo)];
  }

  bool validate(std::string* why = nullptr) const {
    std::string w;
    if (!c.validate(&w)) {
      if (why) *why = w;
      return false;
    }
    for (int p = 0; p <= pmax(); ++p)
      for (int n = c.lo; n <= c.hi(); ++n) {
        QMat f = level(p, n);
        if (f.rows() != c.dim(n)) {
          if (why)
            *why = "filtration level " + std::to_string(p) + " has wrong ambient dim at degree " +
                   std::to_string(n);
          return false;
        }
        if (p == 0 && rank_of(f) != c.dim(n)) {
          if (why) *why = "F_0 is not the full complex at degree " + std::to_string(n);
          return false;
        }
        QMat up = level(p - 1, n);
        for (int j = 0; j < f.cols(); ++j)
          if (!in_span(up, f.col(j))) {
            if (why)
              *why = "filtration not decreasing at level " + std::to_string(p) + ", degree " +
                     std::to_string(n);
            return false;
          }
        QMat df = c.diff(n) * f;
        QMat fn1 = level(p, n + 1);
        for (int j = 0; j < df.cols(); ++j)
          if (!in_span(fn1, df.col(j))) {
            if (why)
              *why = "differential leaves level " + std::to_string(p) + " at degree " +
                     std::to_string(n);
            return false;
          }
      }
    return true;
  }
};

struct PageEntry {
  int dim = 0;
  QMat z;     // columns spanning Z_r^{p,q} in ambient coordinates
  QMat den;   // columns spanning the subspace quotiented out
  QMat reps;  // representative columns extending den inside z
};

struct SpectralPage {
  int r = 0;
  std::map<std::pair<int, int>, PageEntry> entries;
  std::map<std::pair<int, int>, QMat> d;  // d_r: (p,q) -> (p+r, q-r+1), in rep coordinates

  int dim(int p, int q) const {
    auto it = entries.find({p, q});
    return it == entries.end() ? 0 : it->second.dim;
  }
};

struct SpectralSequence {
  std::vector<SpectralPage> pages;  // pages[r] is E_r, r = 0..r_stop
  bool degenerates_at_E1 = false;
  std::vector<int> h_dims;  // dim H^n for n = lo..hi
  int lo = 0;

  const SpectralPage& infinity() const { return pages.back(); }
};

namespace detail {

/// Columns spanning Z_r^{p,q} = { x in F_p^{p+q} : dx in F_{p+r} }.
inline QMat z_space(const FilteredComplex& fc, int r, int p, int n) {
  QMat f = fc.level(p, n);
  if (f.cols() == 0) return QMat(fc.c.dim(n), 0);
  Quotient q = quotient_basis(fc.level(p + r, n + 1), fc.c.dim(n + 1));
  QMat cond = q.projection_matrix() * (fc.c.diff(n) * f);
  auto ker = rank_kernel_image(cond).kernel;
  return f * ker;
}

}  // namespace detail

/// Pages E_0 .. E_{pmax+1} by the standard subquotient formulas
///   E_r^{p,q} = Z_r^{p,q} / (Z_{r-1}^{p+1,q-1} + d Z_{r-1}^{p-r+1,q+r-2}).
/// For a filtration of finite length the last computed page is E_infinity.
inline SpectralSequence spectral_sequence(const FilteredComplex& fc) {
  SpectralSequence ss;
  ss.lo = fc.c.lo;
  auto h = cohomology(fc.c);
  for (int n = fc.c.lo; n <= fc.c.hi(); ++n) ss.h_dims.push_back(h.dim(n));

  int r_stop = fc.pmax() + 1;
  for (int r = 0; r <= r_stop; ++r) {
    SpectralPage page;
    page.r = r;
    for (int p = 0; p <= fc.pmax(); ++p)
      for (int n = fc.c.lo; n <= fc.c.hi(); ++n) {
        int q = n - p;
        QMat z = detail::z_space(fc, r, p, n);
        QMat den(fc.c.dim(n), 0);
        if (r >= 1) {
          den = den.hstack(detail::z_space(fc, r - 1, p + 1, n));
          den = den.hstack(fc.c.diff(n - 1) * detail::z_space(fc, r - 1, p - r + 1, n - 1));
        } else {
          den = den.hstack(fc.level(p + 1, n));
        }
        int dim = rank_of(den.hstack(z)) - rank_of(den);
        if (dim == 0 && z.cols() == 0) continue;
        PageEntry e;
        e.dim = dim;
        e.z = z;
        e.den = den;
        auto chosen = extend_basis(den, z);
        e.reps = QMat(fc.c.dim(n), int(chosen.size()));
        for (int k = 0; k < int(chosen.size()); ++k) {
          auto col = z.col(chosen[k]);
          for (int i = 0; i < fc.c.dim(n); ++i) e.reps(i, k) = col[i];
        }
        if (e.dim > 0) page.entries[{p, q}] = e;
      }

    // d_r in representative coordinates.
    for (auto& [pq, e] : page.entries) {
      auto [p, q] = pq;
      auto tgt = page.entries.find({p + r, q - r + 1});
      if (tgt == page.entries.end()) {
        // target is zero; nothing to record, but d(reps) must die there
        continue;
      }
      const PageEntry& t = tgt->second;
      QMat basis = t.reps.hstack(t.den);
      QMat m(t.dim, e.dim);
      for (int j = 0; j < e.dim; ++j) {
        auto dx = fc.c.diff(p + q).apply(e.reps.col(j));
        auto coords = solve(basis, dx);
        if (!coords) throw std::domain_error("d_r image escapes the target page entry");
        for (int i = 0; i < t.dim; ++i) m(i, j) = (*coords)[i];
      }
      page.d[pq] = m;
    }
    ss.pages.push_back(std::move(page));
  }

  const SpectralPage& e1 = ss.pages.size() > 1 ? ss.pages[1] : ss.pages[0];
  ss.degenerates_at_E1 = true;
  for (int n = fc.c.lo; n <= fc.c.hi(); ++n) {
    int total = 0;
    for (auto& [pq, e] : e1.entries)
      if (pq.first + pq.second == n) total += e.dim;
    if (total != ss.h_dims[size_t(n - fc.c.lo)]) {
      ss.degenerates_at_E1 = false;
      break;
    }
  }
  return ss;
}

/// True when the final page totals match the cohomology of the underlying
/// complex in every degree.
inline bool converges(const SpectralSequence& ss) {
  const SpectralPage& last = ss.infinity();
  for (int i = 0; i < int(ss.h_dims.size()); ++i) {
    int n = ss.lo + i;
    int total = 0;
    for (auto& [pq, e] : last.entries)
      if (pq.first + pq.second == n) total += e.dim;
    if (total != ss.h_dims[size_t(i)]) return false;
  }
  return true;
}

}  // namespace liekit
