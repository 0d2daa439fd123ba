#pragma once

#include <cassert>
#include <stdexcept>
#include <vector>

#include "rational.hpp"

namespace liekit {

/// Koszul sign of reordering the listed elements into ascending index order.
/// `images` lists element indices in their current order; `degrees[i]` is the
/// degree of element i. Each adjacent swap of elements with degrees d, e
/// contributes (-1)^(d*e).
inline int koszul_sign(std::vector<int> images, const std::vector<int>& degrees) {
  int n = int(images.size());
  {
    std::vector<bool> seen(n, false);
    for (int v : images) {
      if (v < 0 || v >= n || seen[v]) throw std::domain_error("not a permutation");
      seen[v] = true;
    }
  }
  int sign = 1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j + 1 < n - i; ++j)
      if (images[j] > images[j + 1]) {
        if ((degrees[images[j]] & 1) && (degrees[images[j + 1]] & 1)) sign = -sign;
        std::swap(images[j], images[j + 1]);
      }
  return sign;
}

/// Sign of a plain permutation, as the all-degrees-odd Koszul sign.
inline int perm_sign(std::vector<int> images) {
  std::vector<int> odd(images.size(), 1);
  return koszul_sign(std::move(images), odd);
}

inline long long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Strictly increasing k-tuples from {0..n-1} in lexicographic order.
inline std::vector<std::vector<int>> combinations(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > n) return out;
  std::vector<int> t(k);
  for (int i = 0; i < k; ++i) t[i] = i;
  while (true) {
    out.push_back(t);
    int i = k - 1;
    while (i >= 0 && t[i] == n - k + i) --i;
    if (i < 0) break;
    ++t[i];
    for (int j = i + 1; j < k; ++j) t[j] = t[j - 1] + 1;
  }
  if (k == 0) out = {{}};
  return out;
}

/// Lexicographic rank of an increasing tuple among combinations(n, k).
inline int comb_index(const std::vector<int>& t, int n) {
  int k = int(t.size());
  long long idx = 0;
  int prev = -1;
  for (int i = 0; i < k; ++i) {
    for (int v = prev + 1; v < t[i]; ++v) idx += binom(n - 1 - v, k - 1 - i);
    prev = t[i];
  }
  return int(idx);
}

/// Insert idx into the increasing tuple t. Returns the sign (-1)^(position)
/// and writes the merged tuple; zero sign when idx already occurs.
inline int tuple_insert(const std::vector<int>& t, int idx, std::vector<int>& merged) {
  int pos = 0;
  while (pos < int(t.size()) && t[pos] < idx) ++pos;
  if (pos < int(t.size()) && t[pos] == idx) return 0;
  merged = t;
  merged.insert(merged.begin() + pos, idx);
  return (pos % 2 == 0) ? 1 : -1;
}

/// Sign of the unshuffle moving the marked subset to the front, keeping both
/// blocks in their original relative order; all entries treated as odd.
inline int unshuffle_sign(const std::vector<bool>& to_front) {
  int sign = 1;
  int behind = 0;  // unmarked entries passed so far
  for (bool m : to_front) {
    if (m) {
      if (behind % 2 == 1) sign = -sign;
    } else {
      ++behind;
    }
  }
  return sign;
}

}  // namespace liekit
