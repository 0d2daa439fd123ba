#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "curved.hpp"
#include "simplex.hpp"
#include "twochart.hpp"

namespace liekit {

namespace detail {

inline bool qm_equal(const QMat& a, const QMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (a(i, j) != b(i, j)) return false;
  return true;
}

}  // namespace detail

/// Semicosimplicial DG-vector space: cochain complexes V_0..V_N with coface
/// chain maps δ_k: V_{n-1} -> V_n for 0 <= k <= n, subject to the
/// cosimplicial identities δ_j δ_i = δ_i δ_{j-1} for i < j.
struct SemicosimplicialDG {
  std::vector<CochainComplex> levels;
  // dl[n-1][k][q - lo]: degree-q block of δ_k into level n
  std::vector<std::vector<std::vector<QMat>>> dl;

  int top() const { return int(levels.size()) - 1; }
  int lo() const { return levels.empty() ? 0 : levels[0].lo; }
  int degrees() const { return levels.empty() ? 0 : int(levels[0].dims.size()); }

  const QMat& coface(int n, int k, int q) const {
    return dl[size_t(n - 1)][size_t(k)][size_t(q - lo())];
  }

  bool validate(std::string* why = nullptr) const {
    auto fail = [&](const std::string& msg) {
      if (why) *why = msg;
      return false;
    };
    if (levels.empty()) return fail("no levels");
    for (const auto& v : levels) {
      std::string sub;
      if (v.lo != lo() || int(v.dims.size()) != degrees())
        return fail("levels must share one degree range");
      if (!v.validate(&sub)) return fail("level complex: " + sub);
    }
    if (int(dl.size()) != top()) return fail("coface table size mismatch");
    for (int n = 1; n <= top(); ++n) {
      if (int(dl[size_t(n - 1)].size()) != n + 1)
        return fail("level " + std::to_string(n) + " needs " + std::to_string(n + 1) +
                    " cofaces");
      for (int k = 0; k <= n; ++k) {
        for (int q = lo(); q < lo() + degrees(); ++q) {
          const QMat& m = coface(n, k, q);
          if (m.rows() != levels[size_t(n)].dim(q) || m.cols() != levels[size_t(n - 1)].dim(q))
            return fail("coface shape at (k=" + std::to_string(k) +
                        ", n=" + std::to_string(n) + ", q=" + std::to_string(q) + ")");
          if (q + 1 < lo() + degrees()) {
            QMat lhs = coface(n, k, q + 1) * levels[size_t(n - 1)].diff(q);
            QMat rhs = levels[size_t(n)].diff(q) * m;
            if (!detail::qm_equal(lhs, rhs))
              return fail("coface is not a chain map at (k=" + std::to_string(k) +
                          ", n=" + std::to_string(n) + ", q=" + std::to_string(q) + ")");
          }
        }
      }
    }
    for (int n = 2; n <= top(); ++n)
      for (int j = 1; j <= n; ++j)
        for (int i = 0; i < j; ++i)
          for (int q = lo(); q < lo() + degrees(); ++q) {
            QMat lhs = coface(n, j, q) * coface(n - 1, i, q);
            QMat rhs = coface(n, i, q) * coface(n - 1, j - 1, q);
            if (!detail::qm_equal(lhs, rhs))
              return fail("cosimplicial identity fails at (i=" + std::to_string(i) +
                          ", j=" + std::to_string(j) + ", n=" + std::to_string(n) + ")");
          }
    return true;
  }
};

/// Čech semicosimplicial object of the two-open cover: level n is the direct
/// sum over all tuples (i_0..i_n) in {0,1}^{n+1} of the sections over the
/// tuple's intersection (the chart itself for a constant tuple, the overlap
/// otherwise). Several graded pieces stack into one cochain complex per
/// level; cofaces restrict along the dropped index.
struct CechLevels {
  std::vector<TwoChartBundle> pieces;  // inner degrees 0..pieces.size()-1
  SemicosimplicialDG dg;
  std::vector<std::vector<std::vector<int>>> tuples;       // [n][idx] = digits
  std::vector<std::vector<std::vector<int>>> offs, bdims;  // [n][q][idx]

  int top() const { return dg.top(); }

  int tuple_index(int n, const std::vector<int>& t) const {
    const auto& row = tuples[size_t(n)];
    auto it = std::find(row.begin(), row.end(), t);
    if (it == row.end()) throw std::out_of_range("tuple_index: no such tuple");
    return int(it - row.begin());
  }
};

namespace detail {

inline std::vector<std::vector<int>> all_tuples(int n) {
  std::vector<std::vector<int>> out;
  for (int code = 0; code < (1 << (n + 1)); ++code) {
    std::vector<int> t(size_t(n) + 1);
    for (int a = 0; a <= n; ++a) t[size_t(a)] = (code >> (n - a)) & 1;
    out.push_back(std::move(t));
  }
  return out;
}

/// 0 or 1 for a constant tuple, 2 for a genuinely mixed one.
inline int tuple_kind(const std::vector<int>& t) {
  bool has0 = false, has1 = false;
  for (int d : t) (d ? has1 : has0) = true;
  return has0 && has1 ? 2 : (has1 ? 1 : 0);
}

inline int block_dim(const TwoChartBundle& piece, int kind) {
  return kind == 2 ? overlap_basis(piece).dim() : chart_basis(piece).dim();
}

/// Sections over the larger open restricted into the smaller: identity when
/// the kinds agree, chart-to-overlap restriction when a constant tuple grows
/// a second index.
inline QMat block_map(const TwoChartBundle& piece, int src_kind, int dst_kind) {
  if (src_kind == dst_kind) return QMat::identity(block_dim(piece, src_kind));
  return restrict_chart(piece, src_kind);
}

inline std::vector<int> drop_pos(const std::vector<int>& t, int k) {
  std::vector<int> s;
  for (size_t a = 0; a < t.size(); ++a)
    if (int(a) != k) s.push_back(t[a]);
  return s;
}

}  // namespace detail

/// Levels 0..N for a stack of graded pieces sharing one window, with zero
/// inner differential. Callers with a genuine inner differential fill the
/// level complexes afterwards.
inline CechLevels cech_levels_of(std::vector<TwoChartBundle> pieces, int N = 4) {
  if (pieces.empty()) throw std::invalid_argument("cech_levels_of: no graded pieces");
  for (const auto& p : pieces)
    if (p.window != pieces[0].window)
      throw std::invalid_argument("cech_levels_of: pieces must share one window");
  CechLevels L;
  L.pieces = std::move(pieces);
  const int P = int(L.pieces.size());
  L.tuples.resize(size_t(N) + 1);
  L.offs.resize(size_t(N) + 1);
  L.bdims.resize(size_t(N) + 1);
  L.dg.levels.resize(size_t(N) + 1);
  for (int n = 0; n <= N; ++n) {
    L.tuples[size_t(n)] = detail::all_tuples(n);
    const auto& ts = L.tuples[size_t(n)];
    CochainComplex& cx = L.dg.levels[size_t(n)];
    cx.lo = 0;
    L.offs[size_t(n)].resize(size_t(P));
    L.bdims[size_t(n)].resize(size_t(P));
    for (int q = 0; q < P; ++q) {
      int off = 0;
      for (const auto& t : ts) {
        int d = detail::block_dim(L.pieces[size_t(q)], detail::tuple_kind(t));
        L.offs[size_t(n)][size_t(q)].push_back(off);
        L.bdims[size_t(n)][size_t(q)].push_back(d);
        off += d;
      }
      cx.dims.push_back(off);
    }
    for (int q = 0; q < P; ++q)
      cx.d.push_back(QMat(cx.dim(q + 1), cx.dim(q)));
  }
  L.dg.dl.resize(size_t(N));
  for (int n = 1; n <= N; ++n) {
    auto& row = L.dg.dl[size_t(n - 1)];
    row.resize(size_t(n) + 1);
    for (int k = 0; k <= n; ++k) {
      row[size_t(k)].resize(size_t(P));
      for (int q = 0; q < P; ++q) {
        QMat m(L.dg.levels[size_t(n)].dim(q), L.dg.levels[size_t(n - 1)].dim(q));
        for (size_t ti = 0; ti < L.tuples[size_t(n)].size(); ++ti) {
          const auto& t = L.tuples[size_t(n)][ti];
          std::vector<int> s = detail::drop_pos(t, k);
          int si = L.tuple_index(n - 1, s);
          QMat blk = detail::block_map(L.pieces[size_t(q)], detail::tuple_kind(s),
                                       detail::tuple_kind(t));
          int ro = L.offs[size_t(n)][size_t(q)][ti];
          int co = L.offs[size_t(n - 1)][size_t(q)][size_t(si)];
          for (int i = 0; i < blk.rows(); ++i)
            for (int j = 0; j < blk.cols(); ++j) m(ro + i, co + j) = blk(i, j);
        }
        row[size_t(k)][size_t(q)] = std::move(m);
      }
    }
  }
  return L;
}

inline CechLevels cech_levels(const TwoChartBundle& b, int N = 4) {
  return cech_levels_of({b}, N);
}

/// Endomorphism-valued de Rham levels of a line bundle: End is canonically
/// trivial, so the inner complex is functions -> one-forms with the honest
/// derivative, glued by the chart rules. This underlies the curved algebra
/// of the two-chart tier.
inline CechLevels de_rham_levels(int window, int N = 4) {
  CechLevels L = cech_levels_of({line_bundle(window, 0), cotangent_bundle(window)}, N);
  const TwoChartBundle& fn = L.pieces[0];
  const TwoChartBundle& om = L.pieces[1];
  SectionBasis fch = chart_basis(fn), fov = overlap_basis(fn);
  SectionBasis och = chart_basis(om), oov = overlap_basis(om);
  auto derivative = [](const SectionBasis& src, const SectionBasis& dst) {
    QMat m(dst.dim(), src.dim());
    for (int j = 0; j < src.dim(); ++j) {
      auto [comp, e] = src.comp_exp(j);
      if (e != 0) m(dst.index(comp, e - 1), j) = Rat(e);
    }
    return m;
  };
  QMat dch = derivative(fch, och), dov = derivative(fov, oov);
  for (int n = 0; n <= L.top(); ++n) {
    QMat m(L.dg.levels[size_t(n)].dim(1), L.dg.levels[size_t(n)].dim(0));
    for (size_t ti = 0; ti < L.tuples[size_t(n)].size(); ++ti) {
      const QMat& blk = detail::tuple_kind(L.tuples[size_t(n)][ti]) == 2 ? dov : dch;
      int ro = L.offs[size_t(n)][1][ti];
      int co = L.offs[size_t(n)][0][ti];
      for (int i = 0; i < blk.rows(); ++i)
        for (int j = 0; j < blk.cols(); ++j) m(ro + i, co + j) = blk(i, j);
    }
    L.dg.levels[size_t(n)].d[0] = std::move(m);
  }
  return L;
}

/// Element of the totalization, truncated at n_max: per level n <= n_max a
/// sum of polynomial forms on the n-simplex tensored with level-n basis
/// vectors, satisfying the face compatibility
/// (δ*_k ⊗ Id) x_n = (Id ⊗ δ_k) x_{n-1}. The form degree at inner degree q
/// is deg - q throughout.
struct TotElement {
  int deg = 0;
  int n_max = 3;
  // x[n][q - lo][i]: form attached to basis vector i
  std::vector<std::vector<std::vector<SimplexForm>>> x;
  bool truncation_exact = false;

  bool is_zero() const {
    for (const auto& lvl : x)
      for (const auto& blk : lvl)
        for (const auto& f : blk)
          if (!f.is_zero()) return false;
    return true;
  }
};

namespace detail {

inline int form_degree(int deg, int q) { return std::max(deg - q, 0); }

inline SimplexForm sf_sub(const SimplexForm& a, const SimplexForm& b) {
  return sf_add(a, sf_scale(Rat(-1), b));
}

}  // namespace detail

inline TotElement tot_zero(const SemicosimplicialDG& V, int deg, int n_max = 3) {
  if (n_max > V.top()) throw std::invalid_argument("tot_zero: not enough levels");
  TotElement e;
  e.deg = deg;
  e.n_max = n_max;
  e.x.resize(size_t(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    e.x[size_t(n)].resize(size_t(V.degrees()));
    for (int qi = 0; qi < V.degrees(); ++qi) {
      int q = V.lo() + qi;
      e.x[size_t(n)][size_t(qi)].assign(
          size_t(V.levels[size_t(n)].dim(q)),
          SimplexForm::zero(n, detail::form_degree(deg, q)));
    }
  }
  return e;
}

inline bool tot_compatible(const SemicosimplicialDG& V, const TotElement& e,
                           std::string* why = nullptr) {
  for (int n = 1; n <= e.n_max; ++n) {
    for (int k = 0; k <= n; ++k) {
      for (int qi = 0; qi < V.degrees(); ++qi) {
        int q = V.lo() + qi;
        const QMat& m = V.coface(n, k, q);
        for (int i = 0; i < V.levels[size_t(n)].dim(q); ++i) {
          SimplexForm lhs = coface_pullback(e.x[size_t(n)][size_t(qi)][size_t(i)], k);
          SimplexForm rhs = SimplexForm::zero(n - 1, detail::form_degree(e.deg, q));
          for (int j = 0; j < m.cols(); ++j) {
            if (m(i, j) == 0) continue;
            rhs = sf_add(rhs, sf_scale(m(i, j), e.x[size_t(n - 1)][size_t(qi)][size_t(j)]));
          }
          if (!detail::sf_sub(lhs, rhs).is_zero()) {
            if (why)
              *why = "face compatibility fails at (k=" + std::to_string(k) +
                     ", n=" + std::to_string(n) + ")";
            return false;
          }
        }
      }
    }
  }
  return true;
}

namespace detail {

/// Whitney family on the n-simplex in form degree d: the elementary forms of
/// the (d+1)-subsets of vertices and the differentials of those of the
/// d-subsets. Closed under the form differential; everything the
/// constructions here produce lives in its span.
inline std::vector<SimplexForm> whitney_family(int n, int d) {
  std::vector<SimplexForm> fam;
  std::vector<int> pick;
  auto subsets = [&](int size, auto&& emit) {
    pick.assign(size_t(size), 0);
    if (size == 0) return;
    auto rec = [&](auto&& self, int pos, int from) -> void {
      if (pos == size) {
        emit(pick);
        return;
      }
      for (int v = from; v <= n; ++v) {
        pick[size_t(pos)] = v;
        self(self, pos + 1, v + 1);
      }
    };
    rec(rec, 0, 0);
  };
  subsets(d + 1, [&](const std::vector<int>& t) { fam.push_back(elementary_form(n, t)); });
  if (d >= 1)
    subsets(d, [&](const std::vector<int>& t) { fam.push_back(sf_d(elementary_form(n, t))); });
  return fam;
}

/// Writes forms as coordinate columns over their joint monomial support.
inline QMat forms_matrix(const std::vector<SimplexForm>& forms,
                         std::vector<std::pair<std::vector<int>, std::vector<int>>>* keys) {
  std::map<std::pair<std::vector<int>, std::vector<int>>, int> row;
  for (const auto& f : forms)
    for (const auto& [key, v] : f.c)
      if (!row.count(key)) {
        int r = int(row.size());
        row[key] = r;
      }
  QMat m(int(row.size()), int(forms.size()));
  for (size_t j = 0; j < forms.size(); ++j)
    for (const auto& [key, v] : forms[j].c) m(row[key], int(j)) = v;
  if (keys) {
    keys->resize(row.size());
    for (const auto& [key, r] : row) (*keys)[size_t(r)] = key;
  }
  return m;
}

inline bool in_whitney_span(const SimplexForm& f) {
  if (f.is_zero()) return true;
  auto fam = whitney_family(f.n, f.k);
  std::vector<SimplexForm> all = fam;
  all.push_back(f);
  QMat m = forms_matrix(all, nullptr);
  std::vector<Rat> target(size_t(m.rows()));
  QMat cols(m.rows(), int(fam.size()));
  for (int i = 0; i < m.rows(); ++i) {
    for (size_t j = 0; j < fam.size(); ++j) cols(i, int(j)) = m(i, int(j));
    target[size_t(i)] = m(i, int(fam.size()));
  }
  return bool(solve(cols, target));
}

/// Joint restriction to all faces of the (m)-simplex is injective on the
/// Whitney family span in form degrees below m; with that, a compatible
/// element whose components lie in the span is determined above the
/// truncation level by its faces, inductively in the level.
inline bool family_faces_injective(int m, int d) {
  if (d >= m) return false;
  auto fam = whitney_family(m, d);
  QMat famm = forms_matrix(fam, nullptr);
  // stack the per-face restriction coordinates and compare ranks
  std::vector<QMat> blocks;
  int rows = 0;
  for (int j = 0; j <= m; ++j) {
    std::vector<SimplexForm> imgs;
    for (const auto& f : fam) imgs.push_back(coface_pullback(f, j));
    QMat b = forms_matrix(imgs, nullptr);
    rows += b.rows();
    blocks.push_back(std::move(b));
  }
  QMat stacked(rows, int(fam.size()));
  int at = 0;
  for (const auto& b : blocks) {
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j) stacked(at + i, j) = b(i, j);
    at += b.rows();
  }
  return rank_of(stacked) == rank_of(famm);
}

}  // namespace detail

/// Assembles and verifies a totalization element: degree bookkeeping, exact
/// face compatibility (naming the failing face on rejection), and the
/// truncation certificate: when every component lies in the Whitney family
/// span and the joint face restriction is injective there one level up, the
/// levels beyond n_max are determined by the stored ones.
inline TotElement tot_assemble(const SemicosimplicialDG& V, int deg,
                               std::vector<std::vector<std::vector<SimplexForm>>> comps,
                               int n_max = 3) {
  TotElement e = tot_zero(V, deg, n_max);
  if (comps.size() != e.x.size())
    throw std::invalid_argument("tot_assemble: wrong number of levels");
  for (size_t n = 0; n < comps.size(); ++n) {
    if (comps[n].size() != e.x[n].size())
      throw std::invalid_argument("tot_assemble: wrong number of graded pieces");
    for (size_t qi = 0; qi < comps[n].size(); ++qi) {
      if (comps[n][qi].size() != e.x[n][qi].size())
        throw std::invalid_argument("tot_assemble: component size mismatch at level " +
                                    std::to_string(n));
      for (size_t i = 0; i < comps[n][qi].size(); ++i) {
        const SimplexForm& f = comps[n][qi][i];
        if (f.is_zero()) continue;
        if (deg - (V.lo() + int(qi)) < 0)
          throw std::invalid_argument("tot_assemble: nonzero component at negative form degree");
        if (f.n != int(n) || f.k != e.x[n][qi][i].k)
          throw std::invalid_argument("tot_assemble: form shape mismatch at level " +
                                      std::to_string(n));
        e.x[n][qi][i] = f;
      }
    }
  }
  std::string why;
  if (!tot_compatible(V, e, &why)) throw std::invalid_argument("tot_assemble: " + why);
  e.truncation_exact = deg <= n_max;
  if (e.truncation_exact) {
    for (int n = 0; n <= n_max && e.truncation_exact; ++n)
      for (int qi = 0; qi < V.degrees() && e.truncation_exact; ++qi)
        for (const auto& f : e.x[size_t(n)][size_t(qi)])
          if (!detail::in_whitney_span(f)) {
            e.truncation_exact = false;
            break;
          }
    for (int qi = 0; qi < V.degrees() && e.truncation_exact; ++qi) {
      int d = detail::form_degree(deg, V.lo() + qi);
      if (!detail::family_faces_injective(n_max + 1, d)) e.truncation_exact = false;
    }
  }
  return e;
}

/// d_Tot: the form differential plus the inner differential with a Koszul
/// sign by form degree.
inline TotElement d_tot(const SemicosimplicialDG& V, const TotElement& e) {
  TotElement out = tot_zero(V, e.deg + 1, e.n_max);
  for (int n = 0; n <= e.n_max; ++n) {
    for (int qi = 0; qi < V.degrees(); ++qi) {
      int q = V.lo() + qi;
      for (size_t i = 0; i < e.x[size_t(n)][size_t(qi)].size(); ++i) {
        const SimplexForm& f = e.x[size_t(n)][size_t(qi)][size_t(i)];
        if (!f.is_zero())
          out.x[size_t(n)][size_t(qi)][i] = sf_add(out.x[size_t(n)][size_t(qi)][i], sf_d(f));
      }
      if (qi + 1 < V.degrees()) {
        const QMat& m = V.levels[size_t(n)].diff(q);
        int sgn = detail::form_degree(e.deg, q) % 2 ? -1 : 1;
        for (int i = 0; i < m.rows(); ++i)
          for (int j = 0; j < m.cols(); ++j) {
            if (m(i, j) == 0) continue;
            const SimplexForm& f = e.x[size_t(n)][size_t(qi)][size_t(j)];
            if (f.is_zero()) continue;
            out.x[size_t(n)][size_t(qi) + 1][size_t(i)] = sf_add(
                out.x[size_t(n)][size_t(qi) + 1][size_t(i)], sf_scale(Rat(sgn) * m(i, j), f));
          }
      }
    }
  }
  return out;
}

/// Full Čech cochain: one coordinate block per level and inner degree.
struct CechCochain {
  std::vector<std::vector<std::vector<Rat>>> c;  // [n][q - lo][i]

  friend bool operator==(const CechCochain& a, const CechCochain& b) { return a.c == b.c; }
};

inline CechCochain cochain_zero(const SemicosimplicialDG& V, int n_max = 3) {
  CechCochain c;
  c.c.resize(size_t(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    c.c[size_t(n)].resize(size_t(V.degrees()));
    for (int qi = 0; qi < V.degrees(); ++qi)
      c.c[size_t(n)][size_t(qi)].assign(size_t(V.levels[size_t(n)].dim(V.lo() + qi)), Rat(0));
  }
  return c;
}

/// Whitney integration: the level-n component integrates the form part over
/// the n-simplex, so only components of form degree n survive. A chain map
/// onto the Čech hypercomplex with differential δ + (-1)^n d_inner.
inline CechCochain whitney_integrate(const SemicosimplicialDG& V, const TotElement& e) {
  CechCochain c = cochain_zero(V, e.n_max);
  for (int n = 0; n <= e.n_max; ++n)
    for (int qi = 0; qi < V.degrees(); ++qi) {
      if (detail::form_degree(e.deg, V.lo() + qi) != n) continue;
      for (size_t i = 0; i < e.x[size_t(n)][size_t(qi)].size(); ++i)
        c.c[size_t(n)][size_t(qi)][i] = sf_integrate(e.x[size_t(n)][size_t(qi)][i]);
    }
  return c;
}

/// Differential of the Čech hypercomplex on full cochains: the alternating
/// coface sum plus the inner differential signed by the level.
inline CechCochain cech_diff(const SemicosimplicialDG& V, const CechCochain& c) {
  int n_max = int(c.c.size()) - 1;
  CechCochain out = cochain_zero(V, n_max);
  for (int n = 1; n <= n_max; ++n)
    for (int k = 0; k <= n; ++k)
      for (int qi = 0; qi < V.degrees(); ++qi) {
        const QMat& m = V.coface(n, k, V.lo() + qi);
        auto img = m.apply(c.c[size_t(n - 1)][size_t(qi)]);
        for (size_t i = 0; i < img.size(); ++i) {
          if (k % 2)
            out.c[size_t(n)][size_t(qi)][i] -= img[i];
          else
            out.c[size_t(n)][size_t(qi)][i] += img[i];
        }
      }
  for (int n = 0; n <= n_max; ++n)
    for (int qi = 0; qi + 1 < V.degrees(); ++qi) {
      const QMat& m = V.levels[size_t(n)].diff(V.lo() + qi);
      auto img = m.apply(c.c[size_t(n)][size_t(qi)]);
      for (size_t i = 0; i < img.size(); ++i) {
        if (n % 2)
          out.c[size_t(n)][size_t(qi) + 1][i] -= img[i];
        else
          out.c[size_t(n)][size_t(qi) + 1][i] += img[i];
      }
    }
  return out;
}

/// Cochain of the alternating Čech complex: one block per strictly
/// increasing tuple, at a single Čech level and inner degree.
struct AltCochain {
  int level = 0;
  int q = 0;
  std::vector<std::vector<Rat>> block;
};

namespace detail {

inline std::vector<std::vector<int>> increasing_tuples(int k) {
  if (k == 0) return {{0}, {1}};
  if (k == 1) return {{0, 1}};
  return {};
}

}  // namespace detail

/// Extracts the strictly-increasing-tuple blocks of a full cochain.
inline std::vector<std::vector<Rat>> alt_part(const CechLevels& L, const CechCochain& c,
                                              int level, int qi) {
  std::vector<std::vector<Rat>> out;
  for (const auto& t : detail::increasing_tuples(level)) {
    int ti = L.tuple_index(level, t);
    int off = L.offs[size_t(level)][size_t(qi)][size_t(ti)];
    int d = L.bdims[size_t(level)][size_t(qi)][size_t(ti)];
    out.emplace_back(c.c[size_t(level)][size_t(qi)].begin() + off,
                     c.c[size_t(level)][size_t(qi)].begin() + off + d);
  }
  return out;
}

/// Inclusion of a global section: a degree-0 alternating cocycle spreads to
/// every level as the constant form 1 tensored with its restrictions.
inline TotElement iota(const CechLevels& L, const AltCochain& a, int n_max = 3) {
  if (a.level != 0) throw std::invalid_argument("iota: needs a degree-0 cochain");
  const TwoChartBundle& piece = L.pieces[size_t(a.q)];
  if (a.block.size() != 2) throw std::invalid_argument("iota: needs one block per chart");
  QMat r0 = restrict_chart(piece, 0), r1 = restrict_chart(piece, 1);
  auto v0 = r0.apply(a.block[0]);
  auto v1 = r1.apply(a.block[1]);
  if (v0 != v1) throw std::invalid_argument("iota: the blocks do not glue to a global section");
  auto comps = tot_zero(L.dg, a.q, n_max).x;
  for (int n = 0; n <= n_max; ++n)
    for (size_t ti = 0; ti < L.tuples[size_t(n)].size(); ++ti) {
      int kind = detail::tuple_kind(L.tuples[size_t(n)][ti]);
      const std::vector<Rat>& vals = kind == 2 ? v0 : a.block[size_t(kind)];
      int off = L.offs[size_t(n)][size_t(a.q)][ti];
      for (size_t b = 0; b < vals.size(); ++b)
        if (vals[b] != 0)
          comps[size_t(n)][size_t(a.q)][size_t(off) + b] = SimplexForm::constant(n, vals[b]);
    }
  return tot_assemble(L.dg, a.q, std::move(comps), n_max);
}

/// Section of the integration map through Whitney elementary forms: the
/// level-n component sums k!-normalized elementary forms of the increasing
/// position tuples against the alternating cochain values at the matching
/// opens. Satisfies whitney_integrate ∘ elementary_section = id exactly.
inline TotElement elementary_section(const CechLevels& L, const AltCochain& a, int n_max = 3) {
  const int k = a.level;
  const TwoChartBundle& piece = L.pieces[size_t(a.q)];
  auto inc = detail::increasing_tuples(k);
  if (a.block.size() != inc.size())
    throw std::invalid_argument("elementary_section: wrong number of blocks");
  auto comps = tot_zero(L.dg, a.q + k, n_max).x;
  for (int n = 0; n <= n_max; ++n) {
    const auto& ts = L.tuples[size_t(n)];
    std::vector<int> pos(size_t(k) + 1);
    // iterate increasing position tuples 0 <= pos_0 < .. < pos_k <= n
    auto rec = [&](auto&& self, int depth, int from) -> void {
      if (depth == k + 1) {
        for (size_t ti = 0; ti < ts.size(); ++ti) {
          const auto& t = ts[ti];
          std::vector<int> opens;
          for (int a = 0; a <= k; ++a) opens.push_back(t[size_t(pos[size_t(a)])]);
          // alternating value at the chosen opens
          int sign = 1;
          std::vector<Rat> val;
          if (k == 0) {
            val = a.block[size_t(opens[0])];
          } else {
            if (opens[0] == opens[1]) continue;
            sign = opens[0] < opens[1] ? 1 : -1;
            val = a.block[0];
          }
          int kind = detail::tuple_kind(t);
          if (k == 0 && kind == 2) val = restrict_chart(piece, opens[0]).apply(val);
          SimplexForm w = elementary_form(n, pos);
          int off = L.offs[size_t(n)][size_t(a.q)][ti];
          for (size_t b = 0; b < val.size(); ++b) {
            if (val[b] == 0) continue;
            comps[size_t(n)][size_t(a.q)][size_t(off) + b] = sf_add(
                comps[size_t(n)][size_t(a.q)][size_t(off) + b],
                sf_scale(Rat(sign) * val[b], w));
          }
        }
        return;
      }
      for (int v = from; v <= n; ++v) {
        pos[size_t(depth)] = v;
        self(self, depth + 1, v + 1);
      }
    };
    if (k <= n) rec(rec, 0, 0);
  }
  return tot_assemble(L.dg, a.q + k, std::move(comps), n_max);
}

/// The obstruction element of a family of chart-local connections: for the
/// simplicial connection x_n = Σ_a t_a ⊗ ∇_{j_a}, its d_Tot is
/// Σ_{a>=1} dt_a ⊗ (∇_{j_a} - ∇_{j_0}), encoded through the overlap section
/// dif = ∇_1 - ∇_0 in inner degree one. Closed and face compatible.
inline TotElement connection_obstruction(const CechLevels& L, const std::vector<Rat>& dif,
                                         int n_max = 3) {
  if (L.pieces.size() < 2)
    throw std::invalid_argument("connection_obstruction: needs an inner degree-one piece");
  SectionBasis ov = overlap_basis(L.pieces[1]);
  if (int(dif.size()) != ov.dim())
    throw std::invalid_argument("connection_obstruction: difference has the wrong size");
  auto comps = tot_zero(L.dg, 2, n_max).x;
  for (int n = 1; n <= n_max; ++n) {
    const auto& ts = L.tuples[size_t(n)];
    for (size_t ti = 0; ti < ts.size(); ++ti) {
      const auto& t = ts[ti];
      int off = L.offs[size_t(n)][1][ti];
      for (int a = 1; a <= n; ++a) {
        int sgn = t[size_t(a)] - t[0];
        if (sgn == 0) continue;
        SimplexForm dta = sf_differential(n, a);
        for (size_t b = 0; b < dif.size(); ++b) {
          if (dif[b] == 0) continue;
          comps[size_t(n)][1][size_t(off) + b] = sf_add(
              comps[size_t(n)][1][size_t(off) + b], sf_scale(Rat(sgn) * dif[b], dta));
        }
      }
    }
  }
  return tot_assemble(L.dg, 2, std::move(comps), n_max);
}

/// Curved algebra data of a line bundle over the two-chart curve against the
/// tangent directions, at the coordinate connections: the endomorphism
/// coefficients are canonically trivial, so the bracket with the curvature
/// vanishes identically and the background term is zero; the curvature is
/// the connection obstruction, closed under d_Tot, and its integrated class
/// is minus the transition class (the face orientation pairs the chart-1
/// connection against chart 0).
struct TwoChartCurved {
  CechLevels levels;
  TotElement curvature;
  std::vector<Rat> integrated;      // overlap coordinates of the curvature cocycle
  std::vector<Rat> cech_class;      // its class in H^1 of the one-forms
  bool background_zero = true;
  bool central = true;
};

inline TwoChartCurved curved_tot_line(int n, int window, int n_max = 3) {
  TwoChartCurved out;
  out.levels = de_rham_levels(window, 4);
  auto log_d = transition_log_derivative(line_bundle(window, n), out.levels.pieces[1]);
  std::vector<Rat> dif(log_d.size());
  for (size_t i = 0; i < log_d.size(); ++i) dif[i] = -log_d[i];
  out.curvature = connection_obstruction(out.levels, dif, n_max);
  if (!d_tot(out.levels.dg, out.curvature).is_zero())
    throw std::logic_error("curved_tot_line: curvature is not closed");
  CechCochain integ = whitney_integrate(out.levels.dg, out.curvature);
  out.integrated = alt_part(out.levels, integ, 1, 1)[0];
  auto omega = cech_cohomology(out.levels.pieces[1]);
  out.cech_class = omega.h.class_coords(1, out.integrated);
  return out;
}

/// One-open collapse: over a point cover the totalization is the
/// endomorphism-valued form algebra itself.
inline CurvedDG curved_tot_point(const QRing& ring, const LiePair& p,
                                 const std::vector<RMat<QRing>>& nabla) {
  return end_model(ring, p, nabla).dg;
}

/// Total complex of the all-tuples Čech object of a single sheaf, degrees
/// 0..top; its cohomology agrees with the alternating complex.
inline CochainComplex full_complex(const CechLevels& L, int top = 3) {
  if (L.pieces.size() != 1)
    throw std::invalid_argument("full_complex: single graded piece only");
  if (top > L.top()) throw std::invalid_argument("full_complex: not enough levels");
  CochainComplex cx;
  cx.lo = 0;
  for (int n = 0; n <= top; ++n) cx.dims.push_back(L.dg.levels[size_t(n)].dim(0));
  for (int n = 0; n < top; ++n) {
    QMat d(cx.dims[size_t(n) + 1], cx.dims[size_t(n)]);
    for (int k = 0; k <= n + 1; ++k) {
      const QMat& m = L.dg.coface(n + 1, k, 0);
      for (int i = 0; i < d.rows(); ++i)
        for (int j = 0; j < d.cols(); ++j)
          if (k % 2)
            d(i, j) -= m(i, j);
          else
            d(i, j) += m(i, j);
    }
    cx.d.push_back(std::move(d));
  }
  cx.d.push_back(QMat(0, cx.dims[size_t(top)]));
  return cx;
}

}  // namespace liekit
