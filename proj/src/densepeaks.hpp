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

// Density-peak outlier scores over a pool of profiles.
//
//   rho_p   = #{q != p : d(p,q) < d_c}             (cutoff kernel)
//           = sum_{q != p} exp(-(d(p,q)/d_c)^2)    (Gaussian kernel)
//   delta_p = min { d(p,q) : q denser than p }, or max_q d(p,q) for the
//             densest point
//   zeta_p  = delta_p / (rho_p + 1)
//
// "Denser" is the strict order rho_q > rho_p, with equal rho resolved in
// favour of the lower index. Distances are Euclidean and recomputed on every
// pass, so memory stays O(N) while time is O(N^2).

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace theftsentry::densepeaks {

enum class Kernel { cutoff, gaussian };

/// Row-major pool of equal-length profiles.
class ProfileMatrix {
 public:
  explicit ProfileMatrix(std::size_t dim) : dim_(dim) {}

  /// Throws a shape error when the row length differs from dim().
  void push_back(std::span<const double> row);

  std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * dim_, dim_};
  }

 private:
  std::size_t dim_;
  std::vector<double> data_;
};

/// Euclidean distance. Throws a shape error on length mismatch.
double profile_distance(std::span<const double> u, std::span<const double> v);

struct CutoffOptions {
  double target_fraction = 0.02;
  std::size_t exact_pair_limit = 10'000'000;  // above this, sample pairs
  std::size_t sampled_pairs = 1'000'000;
  std::uint64_t seed = 0x6a09e667f3bcc909ULL;
};

/// d_c as the ceil(fraction * P)-th smallest of the P = N(N-1)/2 pairwise
/// distances, so a point has on average about `fraction` of N neighbours.
/// Throws a degenerate error when every distance is 0.
double select_dc(const ProfileMatrix& profiles, const CutoffOptions& options = {});

/// Same rule over `sampled_pairs` random pairs, regardless of N.
double select_dc_sampled(const ProfileMatrix& profiles, const CutoffOptions& options = {});

std::vector<double> local_density(const ProfileMatrix& profiles, double dc, Kernel kernel,
                                  unsigned threads = 1);

struct Separation {
  std::vector<double> delta;
  std::vector<std::optional<std::size_t>> nearest_denser;
};

Separation separation(const ProfileMatrix& profiles, std::span<const double> rho,
                      unsigned threads = 1);

std::vector<double> abnormality(std::span<const double> rho, std::span<const double> delta);

struct DensityRecord {
  std::size_t index = 0;
  double rho = 0.0;
  double delta = 0.0;
  std::optional<std::size_t> nearest_denser;
  double zeta = 0.0;
};

struct DensityOptions {
  Kernel kernel = Kernel::cutoff;
  CutoffOptions cutoff;
  std::optional<double> dc;  // overrides the rule of thumb
  unsigned threads = 1;
};

struct DensityResult {
  double dc = 0.0;
  std::vector<DensityRecord> records;
};

/// Full pass: d_c, rho, delta and zeta for every profile. Needs N >= 2.
DensityResult score_profiles(const ProfileMatrix& profiles, const DensityOptions& options = {});

}  // namespace theftsentry::densepeaks
