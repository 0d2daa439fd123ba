#pragma once

#include <tuple>
#include <vector>

#include "liekit/complex.hpp"
#include "liekit/graded.hpp"

namespace oracle {

// Chevalley-Eilenberg differential with trivial coefficients, built directly
// from structure constants as an independent reference for higher layers.
inline liekit::CochainComplex ce_trivial(int n,
                                         const std::vector<std::vector<std::vector<liekit::Rat>>>& c) {
  using namespace liekit;
  CochainComplex cx;
  cx.lo = 0;
  for (int k = 0; k <= n; ++k) cx.dims.push_back(int(binom(n, k)));
  for (int k = 0; k <= n; ++k) {
    if (k == n) {
      cx.d.push_back(QMat(0, cx.dims[size_t(k)]));
      continue;
    }
    auto source = combinations(n, k);
    auto target = combinations(n, k + 1);
    QMat d(int(target.size()), int(source.size()));
    // (d w)(x_{t_0},...,x_{t_k}) = sum_{i<j} (-1)^{i+j} w([x_i, x_j], rest)
    for (int tj = 0; tj < int(target.size()); ++tj) {
      const auto& T = target[size_t(tj)];
      for (int i = 0; i < int(T.size()); ++i)
        for (int j = i + 1; j < int(T.size()); ++j) {
          std::vector<int> rest;
          for (int u = 0; u < int(T.size()); ++u)
            if (u != i && u != j) rest.push_back(T[size_t(u)]);
          int sgn = ((i + j) % 2 == 0) ? 1 : -1;
          for (int u = 0; u < n; ++u) {
            Rat coeff = c[size_t(T[size_t(i)])][size_t(T[size_t(j)])][size_t(u)];
            if (coeff == 0) continue;
            std::vector<int> merged;
            int isgn = tuple_insert(rest, u, merged);
            if (isgn == 0) continue;
            d(tj, comb_index(merged, n)) += Rat(sgn * isgn) * coeff;
          }
        }
    }
    cx.d.push_back(d);
  }
  return cx;
}

inline std::vector<std::vector<std::vector<liekit::Rat>>> structure_constants(
    int n, const std::vector<std::tuple<int, int, int, liekit::Rat>>& entries) {
  const size_t nn = size_t(n);
  std::vector<std::vector<std::vector<liekit::Rat>>> c(
      nn, std::vector<std::vector<liekit::Rat>>(nn, std::vector<liekit::Rat>(nn)));
  for (auto& [i, j, k, v] : entries) {
    c[size_t(i)][size_t(j)][size_t(k)] = v;
    c[size_t(j)][size_t(i)][size_t(k)] = -v;
  }
  return c;
}

}  // namespace oracle
