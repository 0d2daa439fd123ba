#pragma once

#include <map>
#include <string>
#include <vector>

#include "matrix.hpp"

namespace liekit {

/// Bounded cochain complex of finite-dimensional rational vector spaces.
/// Degrees run over [lo, lo + dims.size() - 1]; d[n] maps degree n to n+1.
struct CochainComplex {
  int lo = 0;
  std::vector<int> dims;
  std::vector<QMat> d;                       // d[i]: degree lo+i -> lo+i+1
  std::vector<std::vector<std::string>> labels;  // optional basis names

  int hi() const { return lo + int(dims.size()) - 1; }

  int dim(int n) const {
    if (n < lo || n > hi()) return 0;
    return dims[size_t(n - lo)];
  }

  /// Differential out of degree n, sized dim(n+1) x dim(n).
  QMat diff(int n) const {
    if (n < lo || n > hi()) return QMat(dim(n + 1), 0);
    const QMat& m = d[size_t(n - lo)];
    if (m.rows() == 0 && m.cols() == 0) return QMat(dim(n + 1), dim(n));
    return m;
  }

  std::string label(int n, int i) const {
    if (n < lo || n > hi()) return "";
    const auto& ls = labels;
    if (size_t(n - lo) < ls.size() && i < int(ls[size_t(n - lo)].size()))
      return ls[size_t(n - lo)][size_t(i)];
    return "b" + std::to_string(n) + "_" + std::to_string(i);
  }

  /// Shape consistency and d2 = 0.
  bool validate(std::string* why = nullptr) const {
    for (int n = lo; n <= hi(); ++n) {
      QMat dn = diff(n);
      if (dn.rows() != dim(n + 1) || dn.cols() != dim(n)) {
        if (why) *why = "differential shape mismatch at degree " + std::to_string(n);
        return false;
      }
      if (n > lo) {
        QMat sq = dn * diff(n - 1);
        if (!sq.is_zero()) {
          if (why) *why = "d^2 != 0 at degree " + std::to_string(n - 1);
          return false;
        }
      }
    }
    return true;
  }
};

/// Degree shift: shift(C, p) has degree-n piece C^{n+p} and differential
/// (-1)^p d.
inline CochainComplex shift(const CochainComplex& c, int p) {
  CochainComplex s = c;
  s.lo = c.lo - p;
  if (p % 2 != 0)
    for (auto& m : s.d) m = -m;
  return s;
}

struct DegreeCohomology {
  int dim = 0;
  QMat cocycles;    // columns: kernel basis
  QMat boundaries;  // columns: image basis from the previous differential
  QMat reps;        // columns: representative cocycles completing boundaries
  Quotient mod_boundaries;  // quotient of the ambient degree space by boundaries
};

/// Cohomology with deterministic representatives and a projection-to-class map
/// defined on cocycles.
struct Cohomology {
  int lo = 0;
  std::vector<DegreeCohomology> at;

  int dim(int n) const {
    int i = n - lo;
    if (i < 0 || i >= int(at.size())) return 0;
    return at[size_t(i)].dim;
  }

  const DegreeCohomology& operator[](int n) const { return at[size_t(n - lo)]; }

  /// Class coordinates of a cocycle v in degree n, in the representative basis.
  std::vector<Rat> class_coords(int n, const std::vector<Rat>& v) const {
    const DegreeCohomology& h = at[size_t(n - lo)];
    if (h.dim == 0) return {};
    QMat basis = h.reps.hstack(h.boundaries);
    auto x = solve(basis, v);
    if (!x) throw std::domain_error("vector is not a cocycle of the stored complex");
    return std::vector<Rat>(x->begin(), x->begin() + h.dim);
  }

  bool class_is_zero(int n, const std::vector<Rat>& v) const {
    const DegreeCohomology& h = at[size_t(n - lo)];
    if (h.boundaries.cols() == 0) {
      for (const auto& x : v)
        if (x != 0) return false;
      return true;
    }
    return in_span(h.boundaries, v);
  }
};

inline Cohomology cohomology(const CochainComplex& c) {
  Cohomology out;
  out.lo = c.lo;
  out.at.resize(c.dims.size());
  for (int n = c.lo; n <= c.hi(); ++n) {
    DegreeCohomology& h = out.at[size_t(n - c.lo)];
    auto kin = rank_kernel_image(c.diff(n));
    h.cocycles = kin.kernel;
    h.boundaries = (n == c.lo) ? QMat(c.dim(n), 0) : rank_kernel_image(c.diff(n - 1)).image;
    auto chosen = extend_basis(h.boundaries, h.cocycles);
    h.dim = int(chosen.size());
    h.reps = QMat(c.dim(n), h.dim);
    for (int k = 0; k < h.dim; ++k) {
      auto col = h.cocycles.col(chosen[k]);
      for (int i = 0; i < c.dim(n); ++i) h.reps(i, k) = col[i];
    }
    h.mod_boundaries = quotient_basis(h.boundaries, c.dim(n));
  }
  return out;
}

}  // namespace liekit
