#pragma once

#include <algorithm>
#include <cassert>
#include <map>
#include <optional>
#include <vector>

#include "rational.hpp"

namespace liekit {

/// Dense matrix over the rationals. All eliminations pick the first nonzero
/// pivot in row order, so every derived basis is deterministic.
class QMat {
 public:
  QMat() : r_(0), c_(0) {}
  QMat(int rows, int cols) : r_(rows), c_(cols), a_(size_t(rows) * cols) {}

  static QMat identity(int n) {
    QMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static QMat from_cols(const std::vector<std::vector<Rat>>& cols, int rows) {
    QMat m(rows, int(cols.size()));
    for (int j = 0; j < int(cols.size()); ++j) {
      assert(int(cols[j].size()) == rows);
      for (int i = 0; i < rows; ++i) m(i, j) = cols[j][i];
    }
    return m;
  }

  int rows() const { return r_; }
  int cols() const { return c_; }

  Rat& operator()(int i, int j) { return a_[size_t(i) * c_ + j]; }
  const Rat& operator()(int i, int j) const { return a_[size_t(i) * c_ + j]; }

  std::vector<Rat> col(int j) const {
    std::vector<Rat> v(r_);
    for (int i = 0; i < r_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  bool is_zero() const {
    for (const auto& x : a_)
      if (x != 0) return false;
    return true;
  }

  friend bool operator==(const QMat& x, const QMat& y) {
    return x.r_ == y.r_ && x.c_ == y.c_ && x.a_ == y.a_;
  }

  QMat operator*(const QMat& o) const {
    assert(c_ == o.r_);
    QMat m(r_, o.c_);
    for (int i = 0; i < r_; ++i)
      for (int k = 0; k < c_; ++k) {
        const Rat& x = (*this)(i, k);
        if (x == 0) continue;
        for (int j = 0; j < o.c_; ++j)
          if (o(k, j) != 0) m(i, j) += x * o(k, j);
      }
    return m;
  }

  QMat operator+(const QMat& o) const {
    assert(r_ == o.r_ && c_ == o.c_);
    QMat m(r_, c_);
    for (size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] + o.a_[i];
    return m;
  }

  QMat operator-(const QMat& o) const {
    assert(r_ == o.r_ && c_ == o.c_);
    QMat m(r_, c_);
    for (size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] - o.a_[i];
    return m;
  }

  QMat operator-() const {
    QMat m(r_, c_);
    for (size_t i = 0; i < a_.size(); ++i) m.a_[i] = -a_[i];
    return m;
  }

  QMat scaled(const Rat& s) const {
    QMat m(r_, c_);
    for (size_t i = 0; i < a_.size(); ++i) m.a_[i] = s * a_[i];
    return m;
  }

  QMat transposed() const {
    QMat m(c_, r_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }

  std::vector<Rat> apply(const std::vector<Rat>& v) const {
    assert(int(v.size()) == c_);
    std::vector<Rat> w(r_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j)
        if ((*this)(i, j) != 0 && v[j] != 0) w[i] += (*this)(i, j) * v[j];
    return w;
  }

  QMat hstack(const QMat& o) const {
    assert(r_ == o.r_ || c_ == 0 || o.c_ == 0);
    int rr = c_ == 0 ? o.r_ : r_;
    QMat m(rr, c_ + o.c_);
    for (int i = 0; i < rr; ++i) {
      for (int j = 0; j < c_; ++j) m(i, j) = (*this)(i, j);
      for (int j = 0; j < o.c_; ++j) m(i, c_ + j) = o(i, j);
    }
    return m;
  }

 private:
  int r_, c_;
  std::vector<Rat> a_;
};

/// Reduced row echelon form; returns pivot column indices. Pivot choice is the
/// first row with a nonzero entry scanning columns left to right.
inline std::vector<int> rref(QMat& m) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < m.cols() && row < m.rows(); ++col) {
    int sel = -1;
    for (int i = row; i < m.rows(); ++i)
      if (m(i, col) != 0) {
        sel = i;
        break;
      }
    if (sel < 0) continue;
    if (sel != row)
      for (int j = 0; j < m.cols(); ++j) std::swap(m(sel, j), m(row, j));
    Rat inv = Rat(1) / m(row, col);
    for (int j = col; j < m.cols(); ++j) m(row, j) *= inv;
    for (int i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, col) == 0) continue;
      Rat f = m(i, col);
      for (int j = col; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

struct RankKernelImage {
  int rank = 0;
  QMat kernel;             // columns form a basis of ker(M)
  QMat image;              // columns form a basis of im(M)
  std::vector<int> pivot_cols;
  std::vector<int> free_cols;
};

/// Exact rank, kernel basis and image basis of M. The kernel basis comes from
/// the RREF free columns; the image basis is M restricted to the pivot columns.
inline RankKernelImage rank_kernel_image(const QMat& m) {
  QMat r = m;
  RankKernelImage out;
  out.pivot_cols = rref(r);
  out.rank = int(out.pivot_cols.size());
  std::vector<bool> is_pivot(m.cols(), false);
  for (int p : out.pivot_cols) is_pivot[p] = true;
  for (int j = 0; j < m.cols(); ++j)
    if (!is_pivot[j]) out.free_cols.push_back(j);

  out.kernel = QMat(m.cols(), int(out.free_cols.size()));
  for (int k = 0; k < int(out.free_cols.size()); ++k) {
    int f = out.free_cols[k];
    out.kernel(f, k) = 1;
    for (int p = 0; p < out.rank; ++p) out.kernel(out.pivot_cols[p], k) = -r(p, f);
  }

  out.image = QMat(m.rows(), out.rank);
  for (int p = 0; p < out.rank; ++p)
    for (int i = 0; i < m.rows(); ++i) out.image(i, p) = m(i, out.pivot_cols[p]);
  return out;
}

inline int rank_of(const QMat& m) {
  QMat r = m;
  return int(rref(r).size());
}

/// One solution of M x = b, if any.
inline std::optional<std::vector<Rat>> solve(const QMat& m, const std::vector<Rat>& b) {
  assert(int(b.size()) == m.rows());
  QMat aug(m.rows(), m.cols() + 1);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
    aug(i, m.cols()) = b[i];
  }
  auto pivots = rref(aug);
  if (!pivots.empty() && pivots.back() == m.cols()) return std::nullopt;
  std::vector<Rat> x(m.cols());
  for (int p = 0; p < int(pivots.size()); ++p) x[pivots[p]] = aug(p, m.cols());
  return x;
}

/// Echelon basis of a subspace spanned by the given columns, as rows with unit
/// pivots; the unique RREF presentation of the span.
inline QMat span_echelon(const QMat& cols) {
  QMat t = cols.transposed();
  auto pivots = rref(t);
  QMat b(int(pivots.size()), cols.rows());
  for (int i = 0; i < int(pivots.size()); ++i)
    for (int j = 0; j < cols.rows(); ++j) b(i, j) = t(i, j);
  return b;
}

struct Quotient {
  int ambient_dim = 0;
  QMat sub_echelon;          // rows: RREF basis of the subspace
  std::vector<int> pivot_coords;
  std::vector<int> rep_coords;  // ambient coordinates carried by representatives
  QMat reps;                 // columns: standard vectors e_i, i in rep_coords

  /// Coordinates of v in the quotient; zero exactly on the subspace.
  std::vector<Rat> project(const std::vector<Rat>& v) const {
    std::vector<Rat> w = v;
    for (int r = 0; r < sub_echelon.rows(); ++r) {
      Rat f = w[pivot_coords[r]];
      if (f == 0) continue;
      for (int j = 0; j < sub_echelon.cols(); ++j) w[j] -= f * sub_echelon(r, j);
    }
    std::vector<Rat> out(rep_coords.size());
    for (int k = 0; k < int(rep_coords.size()); ++k) out[k] = w[rep_coords[k]];
    return out;
  }

  QMat projection_matrix() const {
    QMat p(int(rep_coords.size()), ambient_dim);
    for (int j = 0; j < ambient_dim; ++j) {
      std::vector<Rat> e(ambient_dim);
      e[j] = 1;
      auto pe = project(e);
      for (int i = 0; i < int(pe.size()); ++i) p(i, j) = pe[i];
    }
    return p;
  }

  int dim() const { return int(rep_coords.size()); }
};

/// Quotient of K^n by the span of the given columns, with deterministic
/// standard-vector representatives at the non-pivot coordinates.
inline Quotient quotient_basis(const QMat& sub_cols, int ambient_dim) {
  Quotient q;
  q.ambient_dim = ambient_dim;
  q.sub_echelon = span_echelon(sub_cols);
  for (int r = 0; r < q.sub_echelon.rows(); ++r) {
    int p = -1;
    for (int j = 0; j < ambient_dim; ++j)
      if (q.sub_echelon(r, j) != 0) {
        p = j;
        break;
      }
    q.pivot_coords.push_back(p);
  }
  std::vector<bool> is_pivot(ambient_dim, false);
  for (int p : q.pivot_coords) is_pivot[p] = true;
  for (int j = 0; j < ambient_dim; ++j)
    if (!is_pivot[j]) q.rep_coords.push_back(j);
  q.reps = QMat(ambient_dim, int(q.rep_coords.size()));
  for (int k = 0; k < int(q.rep_coords.size()); ++k) q.reps(q.rep_coords[k], k) = 1;
  return q;
}

/// Indices of columns of `cand` that extend span(`base`), greedily in order.
/// Keeps an echelon accumulator keyed by leading index, so each candidate
/// costs one forward elimination instead of a fresh rank computation.
inline std::vector<int> extend_basis(const QMat& base, const QMat& cand) {
  int n = base.cols() > 0 ? base.rows() : cand.rows();
  std::map<int, std::vector<Rat>> rows;
  auto absorb = [&](std::vector<Rat> v) {
    for (const auto& [lead, row] : rows) {
      Rat f = v[size_t(lead)];
      if (f == 0) continue;
      for (int j = lead; j < n; ++j) v[size_t(j)] -= f * row[size_t(j)];
    }
    int lead = -1;
    for (int j = 0; j < n; ++j)
      if (v[size_t(j)] != 0) {
        lead = j;
        break;
      }
    if (lead < 0) return false;
    Rat inv = Rat(1) / v[size_t(lead)];
    for (int j = lead; j < n; ++j) v[size_t(j)] *= inv;
    rows.emplace(lead, std::move(v));
    return true;
  };
  for (int j = 0; j < base.cols(); ++j) absorb(base.col(j));
  std::vector<int> chosen;
  for (int j = 0; j < cand.cols(); ++j)
    if (absorb(cand.col(j))) chosen.push_back(j);
  return chosen;
}

/// True if v lies in the column span of S.
inline bool in_span(const QMat& s, const std::vector<Rat>& v) {
  return solve(s, v).has_value();
}

}  // namespace liekit
