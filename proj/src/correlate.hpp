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

// Dependence measures between a load profile and the NTL series of the same
// day: the maximal information coefficient (MIC) and Pearson's r.
//
// MIC(D) = max over a*b < |D|^alpha of I*(D, a, b) / log2 min(a, b), where
// I*(D, a, b) is the largest mutual information of D over grids with a
// columns and b rows. All mutual information is in bits.
//
// I* is found per axis orientation: one axis is cut into rows, the other
// axis's columns are optimized exactly by dynamic programming over clumps
// (maximal runs of points, in column order, that fall in the same row). Rows
// are enumerated exhaustively when there are at most
// `MicOptions::exhaustive_row_limit` ways to place them, otherwise the row
// axis is equipartitioned and the column axis coarsened to at most
// clump_factor * columns superclumps. Both orientations are evaluated and the
// larger value kept. Only value ranks enter, so MIC is invariant under
// strictly increasing transforms of either coordinate.

#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace theftsentry::correlate {

/// Non-owning view of |D| paired observations; both spans must outlive it.
class PairSample {
 public:
  /// Throws a shape error on length mismatch and a domain error on
  /// non-finite values.
  PairSample(std::span<const double> x, std::span<const double> y);

  std::span<const double> x() const noexcept { return x_; }
  std::span<const double> y() const noexcept { return y_; }
  std::size_t size() const noexcept { return x_.size(); }
  PairSample swapped() const noexcept { return PairSample(y_, x_, 0); }

 private:
  PairSample(std::span<const double> x, std::span<const double> y, int) noexcept
      : x_(x), y_(y) {}
  std::span<const double> x_;
  std::span<const double> y_;
};

/// Rank-based partition of `values` into k contiguous bins of near-equal
/// size. Equal values always share a bin. Returns the k-1 cut values; bin j
/// holds the values v with cut[j-1] < v <= cut[j]. Throws a degenerate error
/// when there are fewer than k distinct values, a parameter error for k < 2.
std::vector<double> equipartition(std::span<const double> values, std::size_t k);

/// Bin index of every value under the cuts returned by equipartition().
std::vector<std::size_t> assign_bins(std::span<const double> values,
                                     std::span<const double> cuts);

/// Mutual information (bits) of the empirical cell distribution of the
/// sample on the grid defined by the cut lists (a = x_cuts.size() + 1
/// columns, b = y_cuts.size() + 1 rows).
double grid_mutual_information(const PairSample& sample, std::span<const double> x_cuts,
                               std::span<const double> y_cuts);

struct MicOptions {
  double alpha = 0.6;                     // grid bound B(n) = n^alpha
  std::size_t clump_factor = 15;          // superclumps per requested column
  std::size_t exhaustive_row_limit = 32;  // enumerate rows up to this many placements
};

/// Grid shapes (a, b) with a, b >= 2 and a*b < n^alpha, ordered by a then b.
std::vector<std::pair<std::size_t, std::size_t>> admissible_shapes(std::size_t n,
                                                                   double alpha);

/// Best mutual information over grids with at most a columns and b rows.
/// Returns 0 when either coordinate is constant.
double max_mi(const PairSample& sample, std::size_t a, std::size_t b,
              const MicOptions& options = {});

struct CharacteristicMatrix {
  double bound = 0.0;
  std::map<std::pair<std::size_t, std::size_t>, double> entries;  // (a, b) -> M
};

CharacteristicMatrix characteristic_matrix(const PairSample& sample,
                                           const MicOptions& options = {});

struct MicResult {
  double value = 0.0;
  bool degenerate = false;    // a coordinate is constant; value is 0
  bool small_sample = false;  // no shape satisfies the bound; 2x2 was used
};

/// Throws a parameter error for fewer than 4 points.
MicResult mic(const PairSample& sample, const MicOptions& options = {});

struct PccResult {
  double value = 0.0;
  bool degenerate = false;  // a coordinate is constant; value is 0
};

PccResult pcc(const PairSample& sample);

}  // namespace theftsentry::correlate
