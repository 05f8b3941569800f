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

// False-data-injection (FDI) attack models and labeled tamper scenarios.
//
//   FDI1  x~_t = alpha * x_t                      alpha in (0.2, 0.8)
//   FDI2  x~_t = min(x_t, gamma)                  gamma < max x
//   FDI3  x~_t = max(x_t - gamma, 0)              gamma < max x
//   FDI4  x~_t = 0 inside [begin, end), else x_t  window longer than 4 hours
//   FDI5  x~_t = alpha_t * x_t                    alpha_t in (0.2, 0.8)
//   FDI6  x~_t = alpha_t * mean(x)                alpha_t in (0.2, 0.8)

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "meterdata.hpp"
#include "rng.hpp"

namespace theftsentry::fdi {

using meterdata::AreaDataset;
using meterdata::ConsumerSeries;
using meterdata::DayProfile;

enum class FdiType : int { fdi1 = 1, fdi2, fdi3, fdi4, fdi5, fdi6 };

inline constexpr std::array<FdiType, 6> kAllTypes{FdiType::fdi1, FdiType::fdi2,
                                                  FdiType::fdi3, FdiType::fdi4,
                                                  FdiType::fdi5, FdiType::fdi6};

std::string_view to_string(FdiType type) noexcept;
/// Accepts "FDI1".."FDI6" (any case) or "1".."6".
FdiType parse_fdi_type(std::string_view text);

inline constexpr double kAlphaLow = 0.2;
inline constexpr double kAlphaHigh = 0.8;

/// Smallest zeroed window, in intervals, that is strictly longer than four
/// hours for a day split into `intervals` equal slots.
std::size_t min_window_intervals(std::size_t intervals) noexcept;

struct FdiParams {
  FdiType type = FdiType::fdi1;
  std::optional<double> alpha;              // FDI1
  std::optional<double> gamma;              // FDI2, FDI3
  std::optional<std::size_t> window_begin;  // FDI4, zeroed intervals are
  std::optional<std::size_t> window_end;    //   [window_begin, window_end)
  std::vector<double> alpha_t;              // FDI5, FDI6
  std::optional<double> day_mean;           // FDI6

  /// Throws a parameter error when the fields do not fit `day`.
  void validate(const DayProfile& day) const;

  friend bool operator==(const FdiParams&, const FdiParams&) = default;
};

/// Returns the tampered copy of `day`.
DayProfile apply_fdi(const DayProfile& day, const FdiParams& params);

/// Draws parameters for `type` against `day`: alpha and alpha_t uniform on
/// (0.2, 0.8), gamma uniform on (0.2 max, 0.8 max), the FDI4 window uniform over
/// all windows of at least min_window_intervals() and at most T-1 intervals,
/// and the FDI6 mean taken from `day`.
FdiParams sample_params(FdiType type, const DayProfile& day, Rng& rng);

/// Nonnegative weights over FDI1..FDI6.
struct FdiMix {
  std::array<double, 6> weights{1, 1, 1, 1, 1, 1};

  static FdiMix uniform() { return {}; }
  static FdiMix only(FdiType type);
  /// "FDI1".."FDI6" select one type, "MIX" the uniform mix.
  static FdiMix from_label(std::string_view label);

  /// "FDI3" for a single type, "MIX" for the uniform mix, else "CUSTOM".
  std::string label() const;
  void validate() const;
};

struct ScenarioOptions {
  std::size_t n_areas = 10;
  std::size_t thieves_per_area = 5;
  FdiMix mix;
  double tampered_day_fraction = 0.5;
  double noise_sigma = 0.0;
  std::uint64_t seed = 1;
};

struct TamperRecord {
  std::string consumer_id;
  std::size_t day = 0;
  FdiParams params;
};

struct TamperScenario {
  std::uint64_t seed = 0;
  std::vector<std::string> area_names;
  std::vector<std::vector<std::string>> areas;  // consumer ids per area
  std::vector<std::vector<std::string>> fraud;  // fraud ids per area
  std::map<std::string, FdiType> thief_type;
  std::vector<TamperRecord> records;            // ordered by (area, thief, day)

  std::vector<std::string> fraud_ids() const;
};

struct BuiltScenario {
  std::vector<AreaDataset> areas;
  TamperScenario scenario;
};

/// Splits consumers evenly into areas, picks thieves in each area, tampers a
/// random subset of each thief's days and assembles the areas with observer
/// totals taken from ground truth. The random stream is split by purpose and
/// then per consumer and per day, so results only depend on the inputs.
BuiltScenario build_scenario(std::span<const ConsumerSeries> ground_truth,
                             const ScenarioOptions& options);

std::string scenario_to_json(const TamperScenario& scenario);
TamperScenario scenario_from_json(std::string_view text);

}  // namespace theftsentry::fdi
