#pragma once

#include <cassert>
#include <string>
#include <vector>

#include "rational.hpp"

namespace liekit {

/// Laurent polynomial truncated to the exponent window [lo, hi]. Coefficients
/// outside the window are implicitly zero; any operation that would produce a
/// nonzero coefficient outside the window sets the sticky `truncated` flag on
/// its result.
struct LaurentWindow {
  int lo = 0;
  int hi = 0;
  std::vector<Rat> c;   // c[k - lo] is the coefficient of t^k
  bool truncated = false;

  LaurentWindow() : c(1) {}
  LaurentWindow(int lo_, int hi_) : lo(lo_), hi(hi_), c(size_t(hi_ - lo_ + 1)) {
    assert(lo_ <= hi_);
  }

  static LaurentWindow monomial(int lo_, int hi_, int exp, const Rat& coeff = Rat(1)) {
    LaurentWindow f(lo_, hi_);
    f.set(exp, coeff);
    return f;
  }

  Rat get(int exp) const {
    if (exp < lo || exp > hi) return Rat(0);
    return c[size_t(exp - lo)];
  }

  /// Assign a coefficient; flags truncation if a nonzero value falls outside.
  void set(int exp, const Rat& v) {
    if (exp < lo || exp > hi) {
      if (v != 0) truncated = true;
      return;
    }
    c[size_t(exp - lo)] = v;
  }

  void add_to(int exp, const Rat& v) {
    if (v == 0) return;
    if (exp < lo || exp > hi) {
      truncated = true;
      return;
    }
    c[size_t(exp - lo)] += v;
  }

  bool is_zero() const {
    for (const auto& x : c)
      if (x != 0) return false;
    return true;
  }

  bool same_window(const LaurentWindow& o) const { return lo == o.lo && hi == o.hi; }

  friend bool operator==(const LaurentWindow& a, const LaurentWindow& b) {
    if (!a.same_window(b)) return false;
    return a.c == b.c;
  }

  std::string str(const std::string& var = "t") const {
    std::string out;
    for (int k = lo; k <= hi; ++k) {
      Rat v = get(k);
      if (v == 0) continue;
      if (!out.empty()) out += " + ";
      out += rat_str(v);
      if (k != 0) out += "*" + var + "^" + std::to_string(k);
    }
    return out.empty() ? "0" : out;
  }
};

inline LaurentWindow lw_add(const LaurentWindow& a, const LaurentWindow& b) {
  assert(a.same_window(b));
  LaurentWindow r(a.lo, a.hi);
  for (size_t i = 0; i < r.c.size(); ++i) r.c[i] = a.c[i] + b.c[i];
  r.truncated = a.truncated || b.truncated;
  return r;
}

inline LaurentWindow lw_sub(const LaurentWindow& a, const LaurentWindow& b) {
  assert(a.same_window(b));
  LaurentWindow r(a.lo, a.hi);
  for (size_t i = 0; i < r.c.size(); ++i) r.c[i] = a.c[i] - b.c[i];
  r.truncated = a.truncated || b.truncated;
  return r;
}

inline LaurentWindow lw_neg(const LaurentWindow& a) {
  LaurentWindow r(a.lo, a.hi);
  for (size_t i = 0; i < r.c.size(); ++i) r.c[i] = -a.c[i];
  r.truncated = a.truncated;
  return r;
}

inline LaurentWindow lw_scale(const Rat& s, const LaurentWindow& a) {
  LaurentWindow r(a.lo, a.hi);
  for (size_t i = 0; i < r.c.size(); ++i) r.c[i] = s * a.c[i];
  r.truncated = a.truncated;
  return r;
}

/// Product clipped to the target window; flags when a nonzero product
/// coefficient leaves [lo, hi].
inline LaurentWindow lw_mul_into(const LaurentWindow& a, const LaurentWindow& b, int lo,
                                 int hi) {
  LaurentWindow r(lo, hi);
  r.truncated = a.truncated || b.truncated;
  for (int i = a.lo; i <= a.hi; ++i) {
    Rat ai = a.get(i);
    if (ai == 0) continue;
    for (int j = b.lo; j <= b.hi; ++j) {
      Rat bj = b.get(j);
      if (bj == 0) continue;
      r.add_to(i + j, ai * bj);
    }
  }
  return r;
}

inline LaurentWindow lw_mul(const LaurentWindow& a, const LaurentWindow& b) {
  assert(a.same_window(b));
  return lw_mul_into(a, b, a.lo, a.hi);
}

/// d/dt within the same window; t^lo with lo != 0 drops below and flags.
inline LaurentWindow lw_derivative(const LaurentWindow& a) {
  LaurentWindow r(a.lo, a.hi);
  r.truncated = a.truncated;
  for (int k = a.lo; k <= a.hi; ++k) {
    Rat v = a.get(k);
    if (v == 0 || k == 0) continue;
    r.add_to(k - 1, Rat(k) * v);
  }
  return r;
}

/// Substitution t -> t^{-1} into the target window.
inline LaurentWindow lw_invert_var(const LaurentWindow& a, int lo, int hi) {
  LaurentWindow r(lo, hi);
  r.truncated = a.truncated;
  for (int k = a.lo; k <= a.hi; ++k) {
    Rat v = a.get(k);
    if (v == 0) continue;
    r.add_to(-k, v);
  }
  return r;
}

/// Re-window into [lo, hi]; flags if a nonzero coefficient is dropped.
inline LaurentWindow lw_clip(const LaurentWindow& a, int lo, int hi) {
  LaurentWindow r(lo, hi);
  r.truncated = a.truncated;
  for (int k = a.lo; k <= a.hi; ++k) r.add_to(k, a.get(k));
  return r;
}

}  // namespace liekit
