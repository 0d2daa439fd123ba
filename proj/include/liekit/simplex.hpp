#pragma once

#include <liekit/graded.hpp>
#include <liekit/rational.hpp>

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace liekit {

/// Polynomial differential form on the n-simplex, written in the reduced
/// coordinates t_1..t_n with t_0 = 1 - sum t_i and dt_0 = -sum dt_i. Each
/// term pairs a monomial exponent vector with a strictly increasing set of
/// dt indices drawn from 1..n.
struct SimplexForm {
  int n = 0;
  int k = 0;
  std::map<std::pair<std::vector<int>, std::vector<int>>, Rat> c;

  static SimplexForm zero(int n, int k) {
    SimplexForm f;
    f.n = n;
    f.k = k;
    return f;
  }

  static SimplexForm constant(int n, const Rat& v) {
    SimplexForm f = zero(n, 0);
    f.add({std::vector<int>(size_t(n), 0), {}}, v);
    return f;
  }

  void add(std::pair<std::vector<int>, std::vector<int>> key, const Rat& v) {
    if (v == 0) return;
    auto it = c.find(key);
    if (it == c.end()) {
      c.emplace(std::move(key), v);
      return;
    }
    it->second += v;
    if (it->second == 0) c.erase(it);
  }

  bool is_zero() const { return c.empty(); }
};

inline SimplexForm sf_add(const SimplexForm& a, const SimplexForm& b) {
  if (a.n != b.n || a.k != b.k) throw std::domain_error("sf_add: shape mismatch");
  SimplexForm f = a;
  for (const auto& [key, v] : b.c) f.add(key, v);
  return f;
}

inline SimplexForm sf_scale(const Rat& s, const SimplexForm& a) {
  SimplexForm f = SimplexForm::zero(a.n, a.k);
  for (const auto& [key, v] : a.c) f.add(key, s * v);
  return f;
}

namespace detail {

/// Sign of interleaving two disjoint increasing dt sets, left then right.
inline int merge_sign(const std::vector<int>& s, const std::vector<int>& t,
                      std::vector<int>& merged) {
  int inv = 0;
  for (int x : s)
    for (int y : t)
      if (x > y) ++inv;
  merged.clear();
  merged.reserve(s.size() + t.size());
  merged.insert(merged.end(), s.begin(), s.end());
  merged.insert(merged.end(), t.begin(), t.end());
  std::sort(merged.begin(), merged.end());
  return inv % 2 ? -1 : 1;
}

}  // namespace detail

inline SimplexForm sf_mul(const SimplexForm& a, const SimplexForm& b) {
  if (a.n != b.n) throw std::domain_error("sf_mul: different simplices");
  SimplexForm f = SimplexForm::zero(a.n, a.k + b.k);
  if (f.k > f.n) return f;
  for (const auto& [ka, va] : a.c)
    for (const auto& [kb, vb] : b.c) {
      bool clash = false;
      for (int x : ka.second)
        for (int y : kb.second)
          if (x == y) clash = true;
      if (clash) continue;
      std::vector<int> expo(size_t(a.n));
      for (int i = 0; i < a.n; ++i) expo[size_t(i)] = ka.first[size_t(i)] + kb.first[size_t(i)];
      std::vector<int> merged;
      int sgn = detail::merge_sign(ka.second, kb.second, merged);
      Rat prod = va * vb;
      f.add({std::move(expo), std::move(merged)}, sgn > 0 ? prod : Rat(-prod));
    }
  return f;
}

inline SimplexForm sf_d(const SimplexForm& a) {
  SimplexForm f = SimplexForm::zero(a.n, a.k + 1);
  if (f.k > f.n) return f;
  for (const auto& [key, v] : a.c)
    for (int i = 1; i <= a.n; ++i) {
      int e = key.first[size_t(i - 1)];
      if (e == 0) continue;
      if (std::binary_search(key.second.begin(), key.second.end(), i)) continue;
      std::vector<int> expo = key.first;
      expo[size_t(i - 1)] -= 1;
      // dt_i moves past the smaller indices already present
      int before = int(std::lower_bound(key.second.begin(), key.second.end(), i) -
                       key.second.begin());
      std::vector<int> dts = key.second;
      dts.insert(dts.begin() + before, i);
      Rat dv = v * e;
      f.add({std::move(expo), std::move(dts)}, before % 2 ? Rat(-dv) : dv);
    }
  return f;
}

/// Coordinate t_i (0 <= i <= n) as a reduced form; t_0 expands affinely.
inline SimplexForm sf_coordinate(int n, int i) {
  SimplexForm f = SimplexForm::zero(n, 0);
  if (i == 0) {
    f.add({std::vector<int>(size_t(n), 0), {}}, 1);
    for (int u = 1; u <= n; ++u) {
      std::vector<int> e(size_t(n), 0);
      e[size_t(u - 1)] = 1;
      f.add({std::move(e), {}}, -1);
    }
  } else {
    std::vector<int> e(size_t(n), 0);
    e[size_t(i - 1)] = 1;
    f.add({std::move(e), {}}, 1);
  }
  return f;
}

/// Differential dt_i as a reduced one-form; dt_0 = -(dt_1 + .. + dt_n).
inline SimplexForm sf_differential(int n, int i) {
  SimplexForm f = SimplexForm::zero(n, 1);
  std::vector<int> e(size_t(n), 0);
  if (i == 0) {
    for (int u = 1; u <= n; ++u) f.add({e, {u}}, -1);
  } else {
    f.add({e, {i}}, 1);
  }
  return f;
}

/// Pullback along the j-th coface, the face inclusion hitting t_j = 0.
inline SimplexForm coface_pullback(const SimplexForm& a, int j) {
  if (a.n == 0) throw std::domain_error("coface_pullback: no faces below a point");
  if (j < 0 || j > a.n) throw std::domain_error("coface_pullback: face index out of range");
  const int m = a.n - 1;
  // t_i and dt_i of the big simplex as forms on the face
  std::vector<SimplexForm> tsub(size_t(a.n) + 1), dsub(size_t(a.n) + 1);
  for (int i = 1; i <= a.n; ++i) {
    int pre = i < j ? i : (i == j ? -1 : i - 1);
    if (pre < 0) {
      tsub[size_t(i)] = SimplexForm::zero(m, 0);
      dsub[size_t(i)] = SimplexForm::zero(m, 1);
    } else {
      tsub[size_t(i)] = sf_coordinate(m, pre);
      dsub[size_t(i)] = sf_differential(m, pre);
    }
  }
  SimplexForm out = SimplexForm::zero(m, a.k);
  for (const auto& [key, v] : a.c) {
    SimplexForm term = SimplexForm::constant(m, v);
    for (int i = 1; i <= a.n && !term.is_zero(); ++i)
      for (int e = 0; e < key.first[size_t(i - 1)]; ++e) term = sf_mul(term, tsub[size_t(i)]);
    for (int s : key.second) {
      if (term.is_zero()) break;
      term = sf_mul(term, dsub[size_t(s)]);
    }
    if (!term.is_zero()) out = sf_add(out, term);
  }
  return out;
}

/// Exact integral of a top form over the simplex:
/// the monomial t^a dt_1..dt_n contributes (prod a_i!) / (n + sum a_i)!.
inline Rat sf_integrate(const SimplexForm& a) {
  if (a.k != a.n) throw std::domain_error("sf_integrate: not a top degree form");
  Rat total(0);
  for (const auto& [key, v] : a.c) {
    BigInt num = 1;
    int s = 0;
    for (int e : key.first) {
      num *= factorial(e);
      s += e;
    }
    total += v * Rat(num) / Rat(factorial(a.n + s));
  }
  return total;
}

/// Whitney elementary form of an increasing vertex tuple:
/// k! sum_r (-1)^r t_{i_r} dt_{i_0} .. (drop r) .. dt_{i_k}.
inline SimplexForm elementary_form(int n, const std::vector<int>& idx) {
  const int k = int(idx.size()) - 1;
  if (k < 0) throw std::domain_error("elementary_form: empty vertex tuple");
  SimplexForm out = SimplexForm::zero(n, k);
  for (int r = 0; r <= k; ++r) {
    SimplexForm term = sf_coordinate(n, idx[size_t(r)]);
    for (int s = 0; s <= k; ++s)
      if (s != r) term = sf_mul(term, sf_differential(n, idx[size_t(s)]));
    out = sf_add(out, sf_scale(Rat(r % 2 ? -1 : 1), term));
  }
  return sf_scale(Rat(factorial(k)), out);
}

}  // namespace liekit
