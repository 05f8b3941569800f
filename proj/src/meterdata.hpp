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

// Smart-meter data model: daily load profiles, consumers, areas with an
// observer meter, and the non-technical loss (NTL) derived from them.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace theftsentry::meterdata {

inline constexpr std::size_t kDefaultIntervals = 48;

/// One day of interval energy readings (kWh per interval). Readings are finite
/// and nonnegative, and a day has at least two intervals.
class DayProfile {
 public:
  DayProfile() = default;
  explicit DayProfile(std::vector<double> readings);

  std::span<const double> readings() const noexcept { return readings_; }
  std::size_t size() const noexcept { return readings_.size(); }
  double operator[](std::size_t t) const noexcept { return readings_[t]; }

  double max() const noexcept;
  double mean() const noexcept;
  double total() const noexcept;

  friend bool operator==(const DayProfile&, const DayProfile&) = default;

 private:
  std::vector<double> readings_;
};

struct ConsumerSeries {
  std::string id;
  std::vector<DayProfile> days;  // recorded
  std::optional<std::vector<DayProfile>> ground_truth;

  std::size_t day_count() const noexcept { return days.size(); }
  std::size_t intervals() const noexcept {
    return days.empty() ? 0 : days.front().size();
  }

  /// Throws a shape error if days disagree on T or ground truth does not
  /// mirror the recorded shape.
  void validate() const;

  friend bool operator==(const ConsumerSeries&, const ConsumerSeries&) = default;
};

/// Consumers behind one observer meter. `ntl[j][t]` is the signed loss
/// E_t - sum of recorded readings for day j; it is filled by compute_ntl.
struct AreaDataset {
  std::string name;
  std::vector<ConsumerSeries> consumers;
  std::vector<DayProfile> observer;
  std::vector<std::vector<double>> ntl;

  std::size_t day_count() const noexcept { return observer.size(); }
  std::size_t intervals() const noexcept {
    return observer.empty() ? 0 : observer.front().size();
  }
};

struct NormalizedProfile {
  std::vector<double> values;
  std::size_t consumer = 0;
  std::size_t day = 0;
  bool degenerate = false;  // source day was all zero
};

// -- CSV ingestion ----------------------------------------------------------

struct ColumnSpec {
  enum class Layout {
    wide,  // consumer_id,day,v1,...,vT
    tall,  // consumer_id,day,t,value
  };
  Layout layout = Layout::wide;
  char delimiter = ',';
};

struct ConsumerCsv {
  std::vector<ConsumerSeries> consumers;
  std::vector<long> day_labels;  // day column values, ascending; aligned with days
  std::vector<std::string> warnings;
};

struct ObserverCsv {
  std::vector<DayProfile> days;
  std::vector<long> day_labels;
};

/// Missing cells are rejected, never imputed. Every consumer must carry every
/// day label present anywhere in the file.
ConsumerCsv load_consumers_csv(const std::filesystem::path& path,
                               const ColumnSpec& schema = {});
ConsumerCsv parse_consumers_csv(std::string_view text,
                                const ColumnSpec& schema = {});

ObserverCsv load_observer_csv(const std::filesystem::path& path);
ObserverCsv parse_observer_csv(std::string_view text);

/// Wide layout. With `ground_truth` set the consumers' ground-truth days are
/// written instead of the recorded ones.
void write_consumers_csv(const std::filesystem::path& path,
                         std::span<const ConsumerSeries> consumers,
                         bool ground_truth = false);
void write_observer_csv(const std::filesystem::path& path,
                        std::span<const DayProfile> observer);

/// Shortest decimal text that round-trips the value.
std::string format_number(double value);

// -- Synthetic ground truth -------------------------------------------------

struct SynthOptions {
  std::size_t n_consumers = 391;
  std::size_t m_days = 30;
  std::size_t intervals = kDefaultIntervals;
  std::uint64_t seed = 1;
};

/// Deterministic stand-in for a real metering dataset: each consumer has a
/// base shape built from a morning-peak and an evening-peak template with
/// consumer-specific weights, timing jitter and scale, and every day is that
/// shape under multiplicative day-level and per-reading noise, with random
/// appliance bursts and occasional away days at base load. Both `days` and
/// `ground_truth` hold the same (untampered) values.
std::vector<ConsumerSeries> synth_ground_truth(const SynthOptions& options);

// -- Areas and NTL ------------------------------------------------------------

/// Builds an area whose observer reads the sum of the consumers' ground truth
/// (recorded days when no ground truth is attached), plus optional zero-mean
/// Gaussian noise of standard deviation `noise_sigma` per interval, clamped at
/// zero. NTL is computed before returning.
AreaDataset assemble_area(std::string name, std::vector<ConsumerSeries> consumers,
                          double noise_sigma = 0.0, std::uint64_t noise_seed = 0);

/// e_t = E_t - sum_i recorded x_{i,t}, for every day. Stores the result on the
/// area and returns it.
const std::vector<std::vector<double>>& compute_ntl(AreaDataset& area);

NormalizedProfile normalize_profile(const DayProfile& day, std::size_t consumer = 0,
                                    std::size_t day_index = 0);

}  // namespace theftsentry::meterdata
