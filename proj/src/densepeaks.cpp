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

#include "densepeaks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace theftsentry::densepeaks {
namespace {

// Four interleaved accumulators; the summation order is fixed, so the
// result is symmetric in (a, b) and independent of the caller.
inline double distance_unchecked(const double* a, const double* b, std::size_t n) noexcept {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t t = 0;
  for (; t + 4 <= n; t += 4) {
    const double d0 = a[t] - b[t];
    const double d1 = a[t + 1] - b[t + 1];
    const double d2 = a[t + 2] - b[t + 2];
    const double d3 = a[t + 3] - b[t + 3];
    s0 += d0 * d0;
    s1 += d1 * d1;
    s2 += d2 * d2;
    s3 += d3 * d3;
  }
  for (; t < n; ++t) {
    const double d = a[t] - b[t];
    s0 += d * d;
  }
  return std::sqrt((s0 + s1) + (s2 + s3));
}

// Rows are handed out in chunks; the upper triangle makes early rows longer.
constexpr std::size_t kRowChunk = 16;

std::size_t quantile_position(double fraction, std::size_t count) {
  const double pos = std::ceil(fraction * static_cast<double>(count));
  return std::clamp<std::size_t>(static_cast<std::size_t>(pos), 1, count) - 1;
}

double pick_quantile(std::vector<double>& distances, double fraction) {
  const double largest = *std::max_element(distances.begin(), distances.end());
  require(largest > 0.0, ErrorKind::degenerate,
          "all profiles are identical; no cut-off distance exists");
  const std::size_t k = quantile_position(fraction, distances.size());
  std::nth_element(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(k),
                   distances.end());
  double dc = distances[k];
  if (dc <= 0.0) {
    // Heavy duplication: fall back to the smallest positive distance.
    dc = largest;
    for (double d : distances)
      if (d > 0.0) dc = std::min(dc, d);
  }
  return dc;
}

void check_fraction(double fraction) {
  require(fraction > 0.0 && fraction < 1.0, ErrorKind::parameter,
          "cut-off target fraction must be in (0, 1)");
}

}  // namespace

void ProfileMatrix::push_back(std::span<const double> row) {
  require(row.size() == dim_, ErrorKind::shape,
          "profile has " + std::to_string(row.size()) + " values, pool dimension is " +
              std::to_string(dim_));
  data_.insert(data_.end(), row.begin(), row.end());
}

double profile_distance(std::span<const double> u, std::span<const double> v) {
  require(u.size() == v.size(), ErrorKind::shape,
          "profiles have different lengths (" + std::to_string(u.size()) + " vs " +
              std::to_string(v.size()) + ")");
  return distance_unchecked(u.data(), v.data(), u.size());
}

double select_dc(const ProfileMatrix& profiles, const CutoffOptions& options) {
  check_fraction(options.target_fraction);
  const std::size_t n = profiles.size();
  require(n >= 2, ErrorKind::parameter, "cut-off selection needs at least 2 profiles");
  const std::size_t pairs = n * (n - 1) / 2;
  if (pairs > options.exact_pair_limit) return select_dc_sampled(profiles, options);

  std::vector<double> distances;
  distances.reserve(pairs);
  const std::size_t dim = profiles.dim();
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p + 1; q < n; ++q)
      distances.push_back(distance_unchecked(profiles.row(p).data(), profiles.row(q).data(), dim));
  return pick_quantile(distances, options.target_fraction);
}

double select_dc_sampled(const ProfileMatrix& profiles, const CutoffOptions& options) {
  check_fraction(options.target_fraction);
  const std::size_t n = profiles.size();
  require(n >= 2, ErrorKind::parameter, "cut-off selection needs at least 2 profiles");
  require(options.sampled_pairs >= 1, ErrorKind::parameter, "sampled_pairs must be >= 1");
  Rng rng = make_rng(options.seed);
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  std::uniform_int_distribution<std::size_t> second(0, n - 2);
  std::vector<double> distances(options.sampled_pairs);
  const std::size_t dim = profiles.dim();
  for (double& d : distances) {
    const std::size_t p = first(rng);
    std::size_t q = second(rng);
    if (q >= p) ++q;
    d = distance_unchecked(profiles.row(p).data(), profiles.row(q).data(), dim);
  }
  return pick_quantile(distances, options.target_fraction);
}

std::vector<double> local_density(const ProfileMatrix& profiles, double dc, Kernel kernel,
                                  unsigned threads) {
  require(dc > 0.0 && std::isfinite(dc), ErrorKind::parameter, "d_c must be finite and > 0");
  const std::size_t n = profiles.size();
  const std::size_t dim = profiles.dim();
  std::vector<double> rho(n, 0.0);
  if (n == 0) return rho;

  if (kernel == Kernel::cutoff) {
    // Integer counts over the upper triangle; each pair credits both ends, so
    // per-worker partial counts can be added in any order.
    const unsigned workers = worker_count(n, threads, kRowChunk);
    std::vector<std::vector<std::uint32_t>> counts(workers, std::vector<std::uint32_t>(n, 0));
    parallel_for(n, threads, kRowChunk, [&](std::size_t begin, std::size_t end, unsigned w) {
      auto& local = counts[w];
      for (std::size_t p = begin; p < end; ++p) {
        const double* u = profiles.row(p).data();
        std::uint32_t own = 0;
        for (std::size_t q = p + 1; q < n; ++q) {
          if (distance_unchecked(u, profiles.row(q).data(), dim) < dc) {
            ++own;
            ++local[q];
          }
        }
        local[p] += own;
      }
    });
    for (std::size_t p = 0; p < n; ++p) {
      std::uint64_t total = 0;
      for (const auto& local : counts) total += local[p];
      rho[p] = static_cast<double>(total);
    }
    return rho;
  }

  // Gaussian: each rho_p is summed over q in index order.
  parallel_for(n, threads, kRowChunk, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t p = begin; p < end; ++p) {
      const double* u = profiles.row(p).data();
      double sum = 0.0;
      for (std::size_t q = 0; q < n; ++q) {
        if (q == p) continue;
        const double r = distance_unchecked(u, profiles.row(q).data(), dim) / dc;
        sum += std::exp(-r * r);
      }
      rho[p] = sum;
    }
  });
  return rho;
}

Separation separation(const ProfileMatrix& profiles, std::span<const double> rho,
                      unsigned threads) {
  const std::size_t n = profiles.size();
  require(rho.size() == n, ErrorKind::shape, "rho does not match the profile pool");
  const std::size_t dim = profiles.dim();
  Separation out;
  out.delta.assign(n, 0.0);
  out.nearest_denser.assign(n, std::nullopt);
  if (n == 0) return out;

  auto denser = [&](std::size_t q, std::size_t p) {
    return rho[q] > rho[p] || (rho[q] == rho[p] && q < p);
  };

  struct Best {
    double distance = std::numeric_limits<double>::infinity();
    std::size_t index = std::numeric_limits<std::size_t>::max();
    void offer(double d, std::size_t q) noexcept {
      if (d < distance || (d == distance && q < index)) {
        distance = d;
        index = q;
      }
    }
  };

  const unsigned workers = worker_count(n, threads, kRowChunk);
  std::vector<std::vector<Best>> partial(workers, std::vector<Best>(n));
  parallel_for(n, threads, kRowChunk, [&](std::size_t begin, std::size_t end, unsigned w) {
    auto& local = partial[w];
    for (std::size_t p = begin; p < end; ++p) {
      const double* u = profiles.row(p).data();
      for (std::size_t q = p + 1; q < n; ++q) {
        const double d = distance_unchecked(u, profiles.row(q).data(), dim);
        if (denser(q, p))
          local[p].offer(d, q);
        else
          local[q].offer(d, p);
      }
    }
  });

  std::size_t peak = 0;
  for (std::size_t p = 1; p < n; ++p)
    if (denser(p, peak)) peak = p;

  for (std::size_t p = 0; p < n; ++p) {
    if (p == peak) continue;
    Best best;
    for (const auto& local : partial) best.offer(local[p].distance, local[p].index);
    if (best.index >= n) fail(ErrorKind::internal, "point without a denser neighbour");
    out.delta[p] = best.distance;
    out.nearest_denser[p] = best.index;
  }

  double farthest = 0.0;
  const double* u = profiles.row(peak).data();
  for (std::size_t q = 0; q < n; ++q)
    if (q != peak) farthest = std::max(farthest, distance_unchecked(u, profiles.row(q).data(), dim));
  out.delta[peak] = farthest;
  return out;
}

std::vector<double> abnormality(std::span<const double> rho, std::span<const double> delta) {
  require(rho.size() == delta.size(), ErrorKind::shape, "rho and delta differ in length");
  std::vector<double> zeta(rho.size());
  for (std::size_t p = 0; p < rho.size(); ++p) zeta[p] = delta[p] / (rho[p] + 1.0);
  return zeta;
}

DensityResult score_profiles(const ProfileMatrix& profiles, const DensityOptions& options) {
  require(profiles.size() >= 2, ErrorKind::degenerate,
          "density scoring needs at least 2 profiles");
  DensityResult result;
  result.dc = options.dc ? *options.dc : select_dc(profiles, options.cutoff);
  const auto rho = local_density(profiles, result.dc, options.kernel, options.threads);
  const auto sep = separation(profiles, rho, options.threads);
  const auto zeta = abnormality(rho, sep.delta);
  result.records.resize(profiles.size());
  for (std::size_t p = 0; p < profiles.size(); ++p)
    result.records[p] = DensityRecord{p, rho[p], sep.delta[p], sep.nearest_denser[p], zeta[p]};
  return result;
}

}  // namespace theftsentry::densepeaks
