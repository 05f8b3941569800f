// Copyright 2026 The TheftSentry Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Reference implementations used as test oracles. They favour directness
// over speed and share no code with the library.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

// ---- mutual information on explicit grids --------------------------------

// Bin of v given sorted cut values: number of cuts strictly below v.
inline std::size_t bin_of(double v, const std::vector<double>& cuts) {
  std::size_t b = 0;
  while (b < cuts.size() && cuts[b] < v) ++b;
  return b;
}

inline double grid_mi_bits(const std::vector<double>& x, const std::vector<double>& y,
                           const std::vector<double>& xcuts, const std::vector<double>& ycuts) {
  const std::size_t a = xcuts.size() + 1, b = ycuts.size() + 1, n = x.size();
  std::vector<std::vector<double>> joint(a, std::vector<double>(b, 0.0));
  for (std::size_t i = 0; i < n; ++i) joint[bin_of(x[i], xcuts)][bin_of(y[i], ycuts)] += 1.0;
  std::vector<double> px(a, 0.0), py(b, 0.0);
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < b; ++j) {
      px[i] += joint[i][j];
      py[j] += joint[i][j];
    }
  double mi = 0.0;
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < b; ++j) {
      if (joint[i][j] == 0.0) continue;
      const double pij = joint[i][j] / static_cast<double>(n);
      mi += pij * std::log(pij / ((px[i] / n) * (py[j] / n)));
    }
  return mi / std::log(2.0);
}

// All subsets of `candidates` with at most `max_size` elements, in order.
inline void subsets(const std::vector<double>& candidates, std::size_t max_size, std::size_t from,
                    std::vector<double>& current, std::vector<std::vector<double>>& out) {
  out.push_back(current);
  if (current.size() == max_size) return;
  for (std::size_t k = from; k < candidates.size(); ++k) {
    current.push_back(candidates[k]);
    subsets(candidates, max_size, k + 1, current, out);
    current.pop_back();
  }
}

// Every boundary between consecutive distinct values, as an upper-inclusive cut.
inline std::vector<double> cut_candidates(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  if (!v.empty()) v.pop_back();
  return v;
}

// Largest MI over all grids with at most a x-bins and at most b y-bins.
inline double best_mi(const std::vector<double>& x, const std::vector<double>& y, std::size_t a,
                      std::size_t b) {
  std::vector<std::vector<double>> xs, ys;
  std::vector<double> cur;
  subsets(cut_candidates(x), a - 1, 0, cur, xs);
  subsets(cut_candidates(y), b - 1, 0, cur, ys);
  double best = 0.0;
  for (const auto& xc : xs)
    for (const auto& yc : ys) best = std::max(best, grid_mi_bits(x, y, xc, yc));
  return best;
}

// Exhaustive MIC: max over a*b < n^alpha (a, b >= 2) of best_mi / log2 min(a, b);
// the 2x2 grid when no shape qualifies.
inline double mic(const std::vector<double>& x, const std::vector<double>& y, double alpha = 0.6) {
  const double bound = std::pow(static_cast<double>(x.size()), alpha);
  std::vector<std::pair<std::size_t, std::size_t>> shapes;
  for (std::size_t a = 2; a < 64; ++a)
    for (std::size_t b = 2; b < 64; ++b)
      if (static_cast<double>(a * b) < bound) shapes.emplace_back(a, b);
  if (shapes.empty()) shapes.emplace_back(2, 2);
  double best = 0.0;
  for (auto [a, b] : shapes)
    best = std::max(best, best_mi(x, y, a, b) / std::log2(static_cast<double>(std::min(a, b))));
  return best;
}

// ---- density peaks, full distance matrix --------------------------------

// Squared differences accumulated in four lanes (t mod 4), lanes combined as
// (l0 + l1) + (l2 + l3): the summation convention the library documents.
inline double distance(const std::vector<double>& u, const std::vector<double>& v) {
  double lane[4] = {0, 0, 0, 0};
  const std::size_t full = u.size() / 4 * 4;
  for (std::size_t t = 0; t < full; ++t) lane[t % 4] += (u[t] - v[t]) * (u[t] - v[t]);
  for (std::size_t t = full; t < u.size(); ++t) lane[0] += (u[t] - v[t]) * (u[t] - v[t]);
  return std::sqrt((lane[0] + lane[1]) + (lane[2] + lane[3]));
}

struct Peaks {
  double dc = 0.0;
  std::vector<double> rho, delta, zeta;
  std::vector<long> nearest;  // -1 for the densest point
};

inline Peaks density_peaks(const std::vector<std::vector<double>>& pts, bool gaussian,
                           double fraction, double fixed_dc = 0.0) {
  const std::size_t n = pts.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  std::vector<double> all;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      d[p][q] = distance(pts[p], pts[q]);
      if (p < q) all.push_back(d[p][q]);
    }
  Peaks out;
  if (fixed_dc > 0.0) {
    out.dc = fixed_dc;
  } else {
    std::sort(all.begin(), all.end());
    std::size_t pos = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(all.size())));
    pos = std::max<std::size_t>(pos, 1);
    out.dc = all[pos - 1];
    if (out.dc == 0.0)
      for (double v : all)
        if (v > 0.0) {
          out.dc = v;
          break;
        }
  }
  out.rho.assign(n, 0.0);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      if (gaussian)
        out.rho[p] += std::exp(-(d[p][q] / out.dc) * (d[p][q] / out.dc));
      else if (d[p][q] < out.dc)
        out.rho[p] += 1.0;
    }
  out.delta.assign(n, 0.0);
  out.nearest.assign(n, -1);
  for (std::size_t p = 0; p < n; ++p) {
    double best = std::numeric_limits<double>::infinity();
    long arg = -1;
    for (std::size_t q = 0; q < n; ++q) {
      const bool denser = out.rho[q] > out.rho[p] || (out.rho[q] == out.rho[p] && q < p);
      if (denser && d[p][q] < best) {
        best = d[p][q];
        arg = static_cast<long>(q);
      }
    }
    if (arg < 0) {
      best = 0.0;
      for (std::size_t q = 0; q < n; ++q) best = std::max(best, d[p][q]);
    }
    out.delta[p] = best;
    out.nearest[p] = arg;
  }
  out.zeta.resize(n);
  for (std::size_t p = 0; p < n; ++p) out.zeta[p] = out.delta[p] / (out.rho[p] + 1.0);
  return out;
}

// ---- ranking metrics --------------------------------------------------------

// Area under the ROC curve traced by lowering a threshold on the score, with
// tied scores entering together (diagonal segment).
inline double roc_auc(const std::vector<double>& score, const std::vector<int>& positive) {
  std::vector<std::size_t> idx(score.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return score[a] > score[b]; });
  double P = 0, N = 0;
  for (int p : positive) (p ? P : N) += 1;
  double tp = 0, fp = 0, area = 0, prev_tpr = 0, prev_fpr = 0;
  for (std::size_t k = 0; k < idx.size();) {
    std::size_t e = k;
    while (e < idx.size() && score[idx[e]] == score[idx[k]]) {
      (positive[idx[e]] ? tp : fp) += 1;
      ++e;
    }
    const double tpr = tp / P, fpr = fp / N;
    area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
    prev_tpr = tpr;
    prev_fpr = fpr;
    k = e;
  }
  return area;
}

// Probability that a random positive outscores a random negative, ties half.
inline double mann_whitney(const std::vector<double>& score, const std::vector<int>& positive) {
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < score.size(); ++i) {
    if (!positive[i]) continue;
    for (std::size_t j = 0; j < score.size(); ++j) {
      if (positive[j]) continue;
      pairs += 1;
      if (score[i] > score[j]) wins += 1;
      else if (score[i] == score[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

// Precision at every thief position among the first N, averaged over those
// thieves. Order: score descending, then index ascending.
inline double map_at(const std::vector<double>& score, const std::vector<int>& positive,
                     std::size_t n_top) {
  std::vector<std::size_t> idx(score.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) {
    return score[a] != score[b] ? score[a] > score[b] : a < b;
  });
  std::vector<double> precisions;
  for (std::size_t k = 1; k <= std::min(n_top, idx.size()); ++k) {
    if (!positive[idx[k - 1]]) continue;
    std::size_t hits = 0;
    for (std::size_t q = 0; q < k; ++q) hits += positive[idx[q]] ? 1 : 0;
    precisions.push_back(static_cast<double>(hits) / static_cast<double>(k));
  }
  if (precisions.empty()) return 0.0;
  return std::accumulate(precisions.begin(), precisions.end(), 0.0) /
         static_cast<double>(precisions.size());
}

// Average ranks, 1-based: 1 + #smaller + (#equal others) / 2.
inline std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (j == i) continue;
      if (v[j] < v[i]) less += 1;
      else if (v[j] == v[i]) equal += 1;
    }
    r[i] = 1.0 + less + equal / 2.0;
  }
  return r;
}

// ---- two-group split ----------------------------------------------------------

// Tries every bipartition; returns the membership (1 = suspicious) of the
// SSE-optimal one, the suspicious group having the larger mean.
inline std::vector<int> best_bipartition(const std::vector<double>& v) {
  const std::size_t m = v.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> arg(m, 1);
  for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << m); ++mask) {
    double s[2] = {0, 0}, c[2] = {0, 0};
    for (std::size_t i = 0; i < m; ++i) {
      const int g = (mask >> i) & 1;
      s[g] += v[i];
      c[g] += 1;
    }
    const double mean[2] = {s[0] / c[0], s[1] / c[1]};
    double sse = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const int g = (mask >> i) & 1;
      sse += (v[i] - mean[g]) * (v[i] - mean[g]);
    }
    if (sse < best) {
      best = sse;
      const int high = mean[1] > mean[0] ? 1 : 0;
      for (std::size_t i = 0; i < m; ++i) arg[i] = (((mask >> i) & 1) == static_cast<std::uint64_t>(high)) ? 1 : 0;
    }
  }
  return arg;
}

}  // namespace oracle
