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

// Detection framework. Per (consumer, day) scores are reduced to one
// suspicion degree per consumer by a two-group split of the consumer's days,
// degrees become ascending ranks (most suspicious = highest rank), and the
// MIC and density-peak ranks are merged by their arithmetic or geometric mean.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "correlate.hpp"
#include "densepeaks.hpp"
#include "meterdata.hpp"

namespace theftsentry::pipeline {

using meterdata::AreaDataset;

enum class ScoreKind { mic, zeta, pcc };

/// consumers x days, row-major. Consumers follow the areas' order.
struct ScoreMatrix {
  ScoreKind kind = ScoreKind::mic;
  std::vector<std::string> consumer_ids;
  std::size_t days = 0;
  std::vector<double> scores;
  std::vector<std::uint8_t> masked;  // 1 where the entry carries no information

  std::size_t consumers() const noexcept { return consumer_ids.size(); }
  double at(std::size_t i, std::size_t j) const noexcept { return scores[i * days + j]; }
  bool is_masked(std::size_t i, std::size_t j) const noexcept { return masked[i * days + j] != 0; }
  std::span<const double> row(std::size_t i) const noexcept { return {scores.data() + i * days, days}; }
  std::span<const std::uint8_t> mask_row(std::size_t i) const noexcept {
    return {masked.data() + i * days, days};
  }
};

/// MIC between each normalized profile and its area's NTL for that day.
/// Entries with an all-zero profile or a constant NTL are masked with score 0.
ScoreMatrix score_mic(std::span<const AreaDataset> areas, const correlate::MicOptions& options = {},
                      unsigned threads = 1);
/// Pearson's r instead of MIC; same masking rules.
ScoreMatrix score_pcc(std::span<const AreaDataset> areas, unsigned threads = 1);

enum class ZetaScope { global, per_area };

/// Density-peak abnormality of every normalized profile, pooled over all areas
/// (or per area). All-zero days are left out of the pool, masked and scored 0.
/// Throws a degenerate error when a pool has fewer than 2 usable profiles.
ScoreMatrix score_zeta(std::span<const AreaDataset> areas,
                       const densepeaks::DensityOptions& options = {},
                       ZetaScope scope = ZetaScope::global);

struct TwoGroupSplit {
  std::vector<std::size_t> suspicious;  // indices into the input, ascending
  std::vector<std::size_t> normal;
};

/// Exact one-dimensional two-means: the cut between consecutive sorted values
/// with the least within-group sum of squares. The group with the larger mean
/// is suspicious; all-equal input is a single, suspicious group.
TwoGroupSplit split_two_groups(std::span<const double> values);

/// Mean of the suspicious group of the unmasked entries; 0 if all are masked.
double suspicion_degree(std::span<const double> scores, std::span<const std::uint8_t> mask = {});

struct SuspicionRanking {
  std::vector<std::string> consumer_ids;
  std::vector<double> degree;
  std::vector<double> rank;  // 1..n ascending, average rank on ties
};

SuspicionRanking rank_consumers(std::vector<std::string> consumer_ids,
                                std::span<const double> degrees);

/// Degrees of every consumer in the matrix, then ranks.
SuspicionRanking rank_scores(const ScoreMatrix& scores);

enum class CombineMode { arith, geo };

/// Per consumer (R1 + R2) / 2 or sqrt(R1 R2), then re-ranked. The combined
/// score is kept as the degree.
SuspicionRanking combine_ranks(const SuspicionRanking& first, const SuspicionRanking& second,
                               CombineMode mode);

enum class Method { mic, cfsfdp, pcc, arith, geo };

std::string_view to_string(Method method) noexcept;
Method parse_method(std::string_view text);

struct DetectOptions {
  std::vector<Method> methods{Method::mic, Method::cfsfdp, Method::arith, Method::geo};
  correlate::MicOptions mic;
  densepeaks::DensityOptions density;
  ZetaScope zeta_scope = ZetaScope::global;
  unsigned threads = 1;
};

struct Detection {
  std::vector<std::string> consumer_ids;
  std::optional<SuspicionRanking> mic;
  std::optional<SuspicionRanking> zeta;
  std::optional<SuspicionRanking> pcc;
  std::optional<SuspicionRanking> arith;
  std::optional<SuspicionRanking> geo;
  std::map<Method, double> seconds;  // wall clock per method

  /// Ranking produced for a method, or nullptr when it was not run.
  const SuspicionRanking* ranking(Method method) const noexcept;
};

/// Runs the requested methods. arith or geo pulls in mic and cfsfdp, and
/// both combinations are produced whenever mic and cfsfdp both run.
Detection detect(std::span<const AreaDataset> areas, const DetectOptions& options = {});

/// consumer_id,mic_degree,mic_rank,zeta_degree,zeta_rank,combined_arith,combined_geo
/// with only the columns of the methods that ran; pcc_degree,pcc_rank are
/// appended when Pearson's r ran. The combined columns hold re-ranked ranks.
std::string ranking_csv(const Detection& detection);
void write_ranking_csv(const std::filesystem::path& path, const Detection& detection);

struct RankingTable {
  std::vector<std::string> consumer_ids;
  std::map<std::string, std::vector<double>> columns;
};

RankingTable parse_ranking_csv(std::string_view text);
RankingTable load_ranking_csv(const std::filesystem::path& path);

/// Column of ranking.csv that holds the rank for a method.
std::string_view rank_column(Method method) noexcept;

}  // namespace theftsentry::pipeline
