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

#include "correlate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "error.hpp"

namespace theftsentry::correlate {

PairSample::PairSample(std::span<const double> x, std::span<const double> y) : x_(x), y_(y) {
  require(x.size() == y.size(), ErrorKind::shape,
          "paired sample has " + std::to_string(x.size()) + " x values and " +
              std::to_string(y.size()) + " y values");
  for (std::size_t i = 0; i < x.size(); ++i)
    require(std::isfinite(x[i]) && std::isfinite(y[i]), ErrorKind::domain,
            "paired sample value " + std::to_string(i) + " is not finite");
}

namespace {

// Sorted view of one coordinate. Points with equal values share a rank.
struct Axis {
  std::vector<std::uint32_t> order;        // point indices by ascending value
  std::vector<std::uint32_t> rank;         // per point, dense rank of its value
  std::vector<std::uint32_t> group_size;   // per rank, number of points
  std::vector<double> group_value;         // per rank, the value

  std::size_t distinct() const noexcept { return group_size.size(); }
};

Axis prepare_axis(std::span<const double> values) {
  Axis axis;
  const std::size_t n = values.size();
  axis.order.resize(n);
  std::iota(axis.order.begin(), axis.order.end(), 0u);
  std::stable_sort(axis.order.begin(), axis.order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return values[a] < values[b]; });
  axis.rank.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint32_t p = axis.order[k];
    if (k == 0 || values[p] != axis.group_value.back()) {
      axis.group_value.push_back(values[p]);
      axis.group_size.push_back(0);
    }
    axis.rank[p] = static_cast<std::uint32_t>(axis.group_size.size() - 1);
    ++axis.group_size.back();
  }
  return axis;
}

// Assigns consecutive groups to k bins so that the cumulative count at the end
// of bin j is as close as possible to (j+1) n / k. Requires k <= groups.
std::vector<std::uint32_t> equipartition_groups(std::span<const std::uint32_t> sizes,
                                                std::size_t k) {
  const std::size_t groups = sizes.size();
  const double n = std::accumulate(sizes.begin(), sizes.end(), 0.0);
  std::vector<std::uint32_t> bin_of(groups, 0);
  std::size_t bin = 0;
  double cum = 0.0;
  double in_bin = 0.0;
  for (std::size_t g = 0; g < groups; ++g) {
    const double size = sizes[g];
    if (in_bin > 0.0 && bin + 1 < k) {
      const double target = static_cast<double>(bin + 1) * n / static_cast<double>(k);
      const bool forced = groups - g == k - 1 - bin;
      const bool closer = std::abs(cum + size - target) < std::abs(cum - target);
      if (forced || !closer) {
        ++bin;
        in_bin = 0.0;
      }
    }
    bin_of[g] = static_cast<std::uint32_t>(bin);
    cum += size;
    in_bin += size;
  }
  return bin_of;
}

// c * log2(c) for integer counts 0..n.
class EntropyTable {
 public:
  explicit EntropyTable(std::size_t n) : table_(n + 1, 0.0) {
    for (std::size_t c = 2; c <= n; ++c) {
      const double v = static_cast<double>(c);
      table_[c] = v * std::log2(v);
    }
  }
  double operator()(std::size_t c) const noexcept { return table_[c]; }

 private:
  std::vector<double> table_;
};

std::size_t binomial_capped(std::size_t n, std::size_t k, std::size_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t result = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > cap) return cap + 1;
  }
  return result;
}

// Best mutual information for 1..max_cols columns along `cols`, given the row
// of every point. Index c of the result holds the best value with at most c
// columns (index 0 unused).
std::vector<double> optimize_columns(const Axis& cols, std::span<const std::uint32_t> row_of,
                                     std::size_t rows, std::size_t max_cols,
                                     std::size_t superclump_limit, const EntropyTable& g) {
  const std::size_t n = cols.order.size();

  // Clumps: tie groups along the column axis, merging neighbours that are
  // entirely in the same row. Cutting inside such a run never helps.
  std::vector<std::uint32_t> counts;  // clumps x rows
  std::vector<std::uint32_t> sizes;
  std::vector<std::int64_t> pure_row;
  {
    std::vector<std::uint32_t> hist(rows);
    std::size_t k = 0;
    while (k < n) {
      const std::uint32_t rank = cols.rank[cols.order[k]];
      std::fill(hist.begin(), hist.end(), 0u);
      std::uint32_t size = 0;
      for (; k < n && cols.rank[cols.order[k]] == rank; ++k) {
        ++hist[row_of[cols.order[k]]];
        ++size;
      }
      std::int64_t pure = -1;
      for (std::size_t r = 0; r < rows; ++r)
        if (hist[r] == size) pure = static_cast<std::int64_t>(r);
      if (pure >= 0 && !pure_row.empty() && pure_row.back() == pure) {
        counts[(sizes.size() - 1) * rows + static_cast<std::size_t>(pure)] += size;
        sizes.back() += size;
        continue;
      }
      counts.insert(counts.end(), hist.begin(), hist.end());
      sizes.push_back(size);
      pure_row.push_back(pure);
    }
  }

  if (superclump_limit > 0 && sizes.size() > superclump_limit) {
    const auto bin_of = equipartition_groups(sizes, superclump_limit);
    const std::size_t merged = bin_of.back() + 1;
    std::vector<std::uint32_t> merged_counts(merged * rows, 0u);
    std::vector<std::uint32_t> merged_sizes(merged, 0u);
    for (std::size_t c = 0; c < sizes.size(); ++c) {
      merged_sizes[bin_of[c]] += sizes[c];
      for (std::size_t r = 0; r < rows; ++r)
        merged_counts[bin_of[c] * rows + r] += counts[c * rows + r];
    }
    counts = std::move(merged_counts);
    sizes = std::move(merged_sizes);
  }

  const std::size_t k = sizes.size();
  // Prefix sums of row counts over clumps.
  std::vector<std::uint32_t> prefix((k + 1) * rows, 0u);
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t r = 0; r < rows; ++r)
      prefix[(c + 1) * rows + r] = prefix[c * rows + r] + counts[c * rows + r];
  std::vector<std::uint32_t> prefix_size(k + 1, 0u);
  for (std::size_t c = 0; c < k; ++c) prefix_size[c + 1] = prefix_size[c] + sizes[c];

  // score(i, j): sum_r g(n_r) - g(n) for the column made of clumps i..j-1.
  std::vector<double> score((k + 1) * (k + 1), 0.0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j <= k; ++j) {
      double s = -g(prefix_size[j] - prefix_size[i]);
      for (std::size_t r = 0; r < rows; ++r)
        s += g(prefix[j * rows + r] - prefix[i * rows + r]);
      score[i * (k + 1) + j] = s;
    }

  // Row entropy term: log2 n - (1/n) sum_r g(n_r); folded into the final value.
  double row_term = 0.0;
  for (std::size_t r = 0; r < rows; ++r) row_term += g(prefix[k * rows + r]);
  const double inv_n = 1.0 / static_cast<double>(n);
  auto to_mi = [&](double best) { return (best - row_term + g(n)) * inv_n; };

  const double neg_inf = -std::numeric_limits<double>::infinity();
  const std::size_t usable = std::min(max_cols, k);
  std::vector<double> prev(k + 1, neg_inf), cur(k + 1, neg_inf);
  for (std::size_t j = 1; j <= k; ++j) prev[j] = score[j];  // one column: clumps 0..j-1

  std::vector<double> best(max_cols + 1, 0.0);
  best[1] = std::max(0.0, to_mi(prev[k]));
  for (std::size_t l = 2; l <= usable; ++l) {
    std::fill(cur.begin(), cur.end(), neg_inf);
    for (std::size_t j = l; j <= k; ++j) {
      double top = neg_inf;
      for (std::size_t i = l - 1; i < j; ++i) {
        const double v = prev[i] + score[i * (k + 1) + j];
        if (v > top) top = v;
      }
      cur[j] = top;
    }
    std::swap(prev, cur);
    best[l] = std::max(best[l - 1], to_mi(prev[k]));
  }
  for (std::size_t l = usable + 1; l <= max_cols; ++l) best[l] = best[usable];
  return best;
}

// Best mutual information with `rows` rows on `row_axis` and 1..max_cols
// columns on `col_axis`.
std::vector<double> best_over_columns(const Axis& row_axis, const Axis& col_axis,
                                      std::size_t rows, std::size_t max_cols,
                                      const MicOptions& options, const EntropyTable& g) {
  const std::size_t n = row_axis.order.size();
  const std::size_t distinct = row_axis.distinct();
  std::vector<std::uint32_t> row_of(n);

  auto rows_from_groups = [&](std::span<const std::uint32_t> bin_of_group) {
    for (std::size_t p = 0; p < n; ++p) row_of[p] = bin_of_group[row_axis.rank[p]];
  };

  if (distinct <= rows) {
    std::vector<std::uint32_t> identity(distinct);
    std::iota(identity.begin(), identity.end(), 0u);
    rows_from_groups(identity);
    return optimize_columns(col_axis, row_of, distinct, max_cols, 0, g);
  }

  const std::size_t placements =
      binomial_capped(distinct - 1, rows - 1, options.exhaustive_row_limit);
  if (placements <= options.exhaustive_row_limit) {
    // Every way to cut the distinct row values into `rows` contiguous bins.
    std::vector<double> best(max_cols + 1, 0.0);
    std::vector<std::size_t> cuts(rows - 1);  // cut after group cuts[i]
    std::iota(cuts.begin(), cuts.end(), 0);
    std::vector<std::uint32_t> bin_of(distinct);
    for (;;) {
      std::size_t bin = 0;
      for (std::size_t grp = 0; grp < distinct; ++grp) {
        bin_of[grp] = static_cast<std::uint32_t>(bin);
        if (bin < cuts.size() && cuts[bin] == grp) ++bin;
      }
      rows_from_groups(bin_of);
      const auto candidate = optimize_columns(col_axis, row_of, rows, max_cols, 0, g);
      for (std::size_t c = 1; c <= max_cols; ++c) best[c] = std::max(best[c], candidate[c]);

      // next combination of rows-1 cut positions out of distinct-1
      std::size_t i = cuts.size();
      while (i > 0 && cuts[i - 1] == distinct - 2 - (cuts.size() - i)) --i;
      if (i == 0) break;
      ++cuts[i - 1];
      for (std::size_t j = i; j < cuts.size(); ++j) cuts[j] = cuts[j - 1] + 1;
    }
    return best;
  }

  rows_from_groups(equipartition_groups(row_axis.group_size, rows));
  return optimize_columns(col_axis, row_of, rows, max_cols, options.clump_factor * max_cols, g);
}

}  // namespace

std::vector<double> equipartition(std::span<const double> values, std::size_t k) {
  require(k >= 2, ErrorKind::parameter, "equipartition needs k >= 2");
  require(k <= values.size(), ErrorKind::parameter,
          "cannot split " + std::to_string(values.size()) + " values into " +
              std::to_string(k) + " bins");
  for (double v : values)
    require(std::isfinite(v), ErrorKind::domain, "equipartition values must be finite");
  const Axis axis = prepare_axis(values);
  require(axis.distinct() >= k, ErrorKind::degenerate,
          "only " + std::to_string(axis.distinct()) + " distinct values for " +
              std::to_string(k) + " bins");
  const auto bin_of = equipartition_groups(axis.group_size, k);
  std::vector<double> cuts;
  for (std::size_t grp = 0; grp + 1 < axis.distinct(); ++grp)
    if (bin_of[grp] != bin_of[grp + 1]) cuts.push_back(axis.group_value[grp]);
  return cuts;
}

std::vector<std::size_t> assign_bins(std::span<const double> values,
                                     std::span<const double> cuts) {
  std::vector<std::size_t> bins(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    bins[i] = static_cast<std::size_t>(
        std::lower_bound(cuts.begin(), cuts.end(), values[i]) - cuts.begin());
  return bins;
}

double grid_mutual_information(const PairSample& sample, std::span<const double> x_cuts,
                               std::span<const double> y_cuts) {
  const std::size_t n = sample.size();
  if (n == 0) return 0.0;
  const std::size_t a = x_cuts.size() + 1;
  const std::size_t b = y_cuts.size() + 1;
  const auto xb = assign_bins(sample.x(), x_cuts);
  const auto yb = assign_bins(sample.y(), y_cuts);
  std::vector<std::size_t> cell(a * b, 0), col(a, 0), row(b, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++cell[xb[i] * b + yb[i]];
    ++col[xb[i]];
    ++row[yb[i]];
  }
  const double total = static_cast<double>(n);
  double mi = 0.0;
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < b; ++j) {
      const std::size_t c = cell[i * b + j];
      if (c == 0) continue;
      const double p = static_cast<double>(c) / total;
      mi += p * std::log2(p * total * total /
                          (static_cast<double>(col[i]) * static_cast<double>(row[j])));
    }
  return std::max(0.0, mi);
}

std::vector<std::pair<std::size_t, std::size_t>> admissible_shapes(std::size_t n,
                                                                   double alpha) {
  const double bound = std::pow(static_cast<double>(n), alpha);
  std::vector<std::pair<std::size_t, std::size_t>> shapes;
  for (std::size_t a = 2; static_cast<double>(2 * a) < bound; ++a)
    for (std::size_t b = 2; static_cast<double>(a * b) < bound; ++b) shapes.emplace_back(a, b);
  return shapes;
}

double max_mi(const PairSample& sample, std::size_t a, std::size_t b,
              const MicOptions& options) {
  require(a >= 2 && b >= 2, ErrorKind::parameter, "grid needs at least 2 columns and 2 rows");
  const Axis x = prepare_axis(sample.x());
  const Axis y = prepare_axis(sample.y());
  if (x.distinct() < 2 || y.distinct() < 2) return 0.0;
  const EntropyTable g(sample.size());
  const double rows_on_y = best_over_columns(y, x, b, a, options, g)[a];
  const double rows_on_x = best_over_columns(x, y, a, b, options, g)[b];
  return std::max(rows_on_y, rows_on_x);
}

namespace {

CharacteristicMatrix characteristic_matrix_impl(const Axis& x, const Axis& y, std::size_t n,
                                                std::span<const std::pair<std::size_t, std::size_t>> shapes,
                                                double bound, const MicOptions& options) {
  CharacteristicMatrix m;
  m.bound = bound;
  if (shapes.empty()) return m;
  const EntropyTable g(n);

  // Largest partner count per row count, for each orientation.
  std::map<std::size_t, std::size_t> max_a_for_b, max_b_for_a;
  for (const auto& [a, b] : shapes) {
    max_a_for_b[b] = std::max(max_a_for_b[b], a);
    max_b_for_a[a] = std::max(max_b_for_a[a], b);
  }
  std::map<std::size_t, std::vector<double>> rows_on_y, rows_on_x;
  for (const auto& [b, max_a] : max_a_for_b)
    rows_on_y[b] = best_over_columns(y, x, b, max_a, options, g);
  for (const auto& [a, max_b] : max_b_for_a)
    rows_on_x[a] = best_over_columns(x, y, a, max_b, options, g);

  for (const auto& [a, b] : shapes) {
    const double best = std::max(rows_on_y[b][a], rows_on_x[a][b]);
    const double value = best / std::log2(static_cast<double>(std::min(a, b)));
    m.entries[{a, b}] = std::clamp(value, 0.0, 1.0);
  }
  return m;
}

}  // namespace

CharacteristicMatrix characteristic_matrix(const PairSample& sample, const MicOptions& options) {
  const Axis x = prepare_axis(sample.x());
  const Axis y = prepare_axis(sample.y());
  const double bound = std::pow(static_cast<double>(sample.size()), options.alpha);
  if (x.distinct() < 2 || y.distinct() < 2) {
    CharacteristicMatrix m;
    m.bound = bound;
    for (const auto& shape : admissible_shapes(sample.size(), options.alpha))
      m.entries[shape] = 0.0;
    return m;
  }
  const auto shapes = admissible_shapes(sample.size(), options.alpha);
  return characteristic_matrix_impl(x, y, sample.size(), shapes, bound, options);
}

MicResult mic(const PairSample& sample, const MicOptions& options) {
  require(sample.size() >= 4, ErrorKind::parameter,
          "MIC needs at least 4 points, got " + std::to_string(sample.size()));
  require(options.alpha > 0.0 && options.alpha <= 1.0, ErrorKind::parameter,
          "MIC bound exponent must be in (0, 1]");
  MicResult result;
  const Axis x = prepare_axis(sample.x());
  const Axis y = prepare_axis(sample.y());
  if (x.distinct() < 2 || y.distinct() < 2) {
    result.degenerate = true;
    return result;
  }
  const double bound = std::pow(static_cast<double>(sample.size()), options.alpha);
  auto shapes = admissible_shapes(sample.size(), options.alpha);
  if (shapes.empty()) {
    result.small_sample = true;
    shapes.emplace_back(2, 2);
  }
  const auto matrix = characteristic_matrix_impl(x, y, sample.size(), shapes, bound, options);
  for (const auto& [shape, value] : matrix.entries) result.value = std::max(result.value, value);
  return result;
}

PccResult pcc(const PairSample& sample) {
  const std::size_t n = sample.size();
  PccResult result;
  if (n < 2) {
    result.degenerate = true;
    return result;
  }
  const auto x = sample.x();
  const auto y = sample.y();
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    result.degenerate = true;
    return result;
  }
  result.value = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  return result;
}

}  // namespace theftsentry::correlate
