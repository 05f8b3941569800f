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

#include "pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>

#include "csv.hpp"
#include "error.hpp"
#include "parallel.hpp"

namespace theftsentry::pipeline {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::size_t common_days(std::span<const AreaDataset> areas) {
  require(!areas.empty(), ErrorKind::parameter, "no areas to score");
  const std::size_t m = areas.front().day_count();
  for (const auto& area : areas) {
    require(area.day_count() == m, ErrorKind::shape,
            "area " + area.name + " covers " + std::to_string(area.day_count()) +
                " days, expected " + std::to_string(m));
    require(area.ntl.size() == m, ErrorKind::shape,
            "NTL has not been computed for area " + area.name);
  }
  return m;
}

ScoreMatrix empty_matrix(std::span<const AreaDataset> areas, ScoreKind kind) {
  ScoreMatrix out;
  out.kind = kind;
  out.days = common_days(areas);
  for (const auto& area : areas)
    for (const auto& c : area.consumers) out.consumer_ids.push_back(c.id);
  out.scores.assign(out.consumer_ids.size() * out.days, 0.0);
  out.masked.assign(out.consumer_ids.size() * out.days, 0);
  return out;
}

// Calls score(area, consumer, row) for each consumer, rows numbered across areas.
template <typename Score>
void for_each_consumer(std::span<const AreaDataset> areas, unsigned threads, Score&& score) {
  std::vector<std::pair<std::size_t, std::size_t>> index;
  for (std::size_t a = 0; a < areas.size(); ++a)
    for (std::size_t i = 0; i < areas[a].consumers.size(); ++i) index.emplace_back(a, i);
  parallel_for(index.size(), threads, 8, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t r = begin; r < end; ++r) score(areas[index[r].first], index[r].second, r);
  });
}

template <typename Measure>
ScoreMatrix score_correlation(std::span<const AreaDataset> areas, ScoreKind kind, unsigned threads,
                              Measure&& measure) {
  ScoreMatrix out = empty_matrix(areas, kind);
  const std::size_t m = out.days;
  for_each_consumer(areas, threads, [&](const AreaDataset& area, std::size_t i, std::size_t row) {
    const auto& consumer = area.consumers[i];
    for (std::size_t j = 0; j < m; ++j) {
      const auto u = meterdata::normalize_profile(consumer.days[j], i, j);
      const std::size_t cell = row * m + j;
      if (u.degenerate) {
        out.masked[cell] = 1;
        continue;
      }
      const correlate::PairSample sample(u.values, area.ntl[j]);
      const auto [value, degenerate] = measure(sample);
      out.scores[cell] = degenerate ? 0.0 : value;
      out.masked[cell] = degenerate ? 1 : 0;
    }
  });
  return out;
}

}  // namespace

ScoreMatrix score_mic(std::span<const AreaDataset> areas, const correlate::MicOptions& options,
                      unsigned threads) {
  return score_correlation(areas, ScoreKind::mic, threads, [&](const correlate::PairSample& s) {
    const auto r = correlate::mic(s, options);
    return std::pair{r.value, r.degenerate};
  });
}

ScoreMatrix score_pcc(std::span<const AreaDataset> areas, unsigned threads) {
  return score_correlation(areas, ScoreKind::pcc, threads, [](const correlate::PairSample& s) {
    const auto r = correlate::pcc(s);
    return std::pair{r.value, r.degenerate};
  });
}

ScoreMatrix score_zeta(std::span<const AreaDataset> areas, const densepeaks::DensityOptions& options,
                       ZetaScope scope) {
  ScoreMatrix out = empty_matrix(areas, ScoreKind::zeta);
  const std::size_t m = out.days;

  auto score_pool = [&](std::span<const AreaDataset> pool_areas, std::size_t first_row) {
    const std::size_t dim = pool_areas.front().intervals();
    densepeaks::ProfileMatrix pool(dim);
    std::vector<std::size_t> cells;
    std::size_t row = first_row;
    for (const auto& area : pool_areas) {
      require(area.intervals() == dim, ErrorKind::shape,
              "areas disagree on the number of intervals per day");
      for (std::size_t i = 0; i < area.consumers.size(); ++i, ++row)
        for (std::size_t j = 0; j < m; ++j) {
          const auto u = meterdata::normalize_profile(area.consumers[i].days[j], i, j);
          const std::size_t cell = row * m + j;
          if (u.degenerate) {
            out.masked[cell] = 1;
            continue;
          }
          pool.push_back(u.values);
          cells.push_back(cell);
        }
    }
    require(pool.size() >= 2, ErrorKind::degenerate,
            "density scoring needs at least 2 non-zero profiles, found " +
                std::to_string(pool.size()));
    const auto result = densepeaks::score_profiles(pool, options);
    for (std::size_t p = 0; p < cells.size(); ++p) out.scores[cells[p]] = result.records[p].zeta;
  };

  if (scope == ZetaScope::global) {
    score_pool(areas, 0);
  } else {
    std::size_t row = 0;
    for (std::size_t a = 0; a < areas.size(); ++a) {
      score_pool(areas.subspan(a, 1), row);
      row += areas[a].consumers.size();
    }
  }
  return out;
}

TwoGroupSplit split_two_groups(std::span<const double> values) {
  TwoGroupSplit out;
  const std::size_t m = values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  if (m < 2 || values[order.front()] == values[order.back()]) {
    out.suspicious = order;
    std::sort(out.suspicious.begin(), out.suspicious.end());
    return out;
  }

  auto sse = [&](std::size_t begin, std::size_t end) {
    double mean = 0.0;
    for (std::size_t k = begin; k < end; ++k) mean += values[order[k]];
    mean /= static_cast<double>(end - begin);
    double s = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      const double d = values[order[k]] - mean;
      s += d * d;
    }
    return s;
  };

  std::size_t best_cut = 1;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t cut = 1; cut < m; ++cut) {
    // Equal values stay together.
    if (values[order[cut - 1]] == values[order[cut]]) continue;
    const double total = sse(0, cut) + sse(cut, m);
    if (total < best) {
      best = total;
      best_cut = cut;
    }
  }
  out.normal.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(best_cut));
  out.suspicious.assign(order.begin() + static_cast<std::ptrdiff_t>(best_cut), order.end());
  std::sort(out.normal.begin(), out.normal.end());
  std::sort(out.suspicious.begin(), out.suspicious.end());
  return out;
}

double suspicion_degree(std::span<const double> scores, std::span<const std::uint8_t> mask) {
  require(mask.empty() || mask.size() == scores.size(), ErrorKind::shape,
          "mask does not match the score row");
  std::vector<double> kept;
  kept.reserve(scores.size());
  for (std::size_t j = 0; j < scores.size(); ++j)
    if (mask.empty() || mask[j] == 0) kept.push_back(scores[j]);
  if (kept.empty()) return 0.0;
  const auto split = split_two_groups(kept);
  double sum = 0.0;
  for (std::size_t k : split.suspicious) sum += kept[k];
  return sum / static_cast<double>(split.suspicious.size());
}

SuspicionRanking rank_consumers(std::vector<std::string> consumer_ids,
                                std::span<const double> degrees) {
  require(consumer_ids.size() == degrees.size(), ErrorKind::shape,
          "consumer ids and degrees differ in length");
  const std::size_t n = degrees.size();
  SuspicionRanking out;
  out.consumer_ids = std::move(consumer_ids);
  out.degree.assign(degrees.begin(), degrees.end());
  out.rank.assign(n, 0.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return degrees[a] < degrees[b]; });
  for (std::size_t k = 0; k < n;) {
    std::size_t end = k + 1;
    while (end < n && degrees[order[end]] == degrees[order[k]]) ++end;
    // positions k..end-1 share the average of ranks k+1..end
    const double rank = 0.5 * static_cast<double>(k + 1 + end);
    for (std::size_t q = k; q < end; ++q) out.rank[order[q]] = rank;
    k = end;
  }
  return out;
}

SuspicionRanking rank_scores(const ScoreMatrix& scores) {
  std::vector<double> degrees(scores.consumers());
  for (std::size_t i = 0; i < degrees.size(); ++i)
    degrees[i] = suspicion_degree(scores.row(i), scores.mask_row(i));
  return rank_consumers(scores.consumer_ids, degrees);
}

SuspicionRanking combine_ranks(const SuspicionRanking& first, const SuspicionRanking& second,
                               CombineMode mode) {
  require(first.consumer_ids == second.consumer_ids, ErrorKind::parameter,
          "rankings cover different consumers");
  std::vector<double> combined(first.rank.size());
  for (std::size_t i = 0; i < combined.size(); ++i)
    combined[i] = mode == CombineMode::arith ? 0.5 * (first.rank[i] + second.rank[i])
                                             : std::sqrt(first.rank[i] * second.rank[i]);
  return rank_consumers(first.consumer_ids, combined);
}

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::mic: return "mic";
    case Method::cfsfdp: return "cfsfdp";
    case Method::pcc: return "pcc";
    case Method::arith: return "arith";
    case Method::geo: return "geo";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  for (Method m : {Method::mic, Method::cfsfdp, Method::pcc, Method::arith, Method::geo})
    if (text == to_string(m)) return m;
  if (text == "zeta") return Method::cfsfdp;
  fail(ErrorKind::config, "unknown method '" + std::string(text) +
                              "' (expected mic, cfsfdp, pcc, arith or geo)");
}

std::string_view rank_column(Method method) noexcept {
  switch (method) {
    case Method::mic: return "mic_rank";
    case Method::cfsfdp: return "zeta_rank";
    case Method::pcc: return "pcc_rank";
    case Method::arith: return "combined_arith";
    case Method::geo: return "combined_geo";
  }
  return "";
}

const SuspicionRanking* Detection::ranking(Method method) const noexcept {
  const std::optional<SuspicionRanking>* slot = nullptr;
  switch (method) {
    case Method::mic: slot = &mic; break;
    case Method::cfsfdp: slot = &zeta; break;
    case Method::pcc: slot = &pcc; break;
    case Method::arith: slot = &arith; break;
    case Method::geo: slot = &geo; break;
  }
  return slot && *slot ? &**slot : nullptr;
}

Detection detect(std::span<const AreaDataset> areas, const DetectOptions& options) {
  const std::set<Method> wanted(options.methods.begin(), options.methods.end());
  require(!wanted.empty(), ErrorKind::config, "no detection method selected");
  // Both combinations come with either one, and with mic + cfsfdp.
  const bool combine = wanted.count(Method::arith) || wanted.count(Method::geo) ||
                       (wanted.count(Method::mic) && wanted.count(Method::cfsfdp));
  const bool need_mic = combine || wanted.count(Method::mic);
  const bool need_zeta = combine || wanted.count(Method::cfsfdp);

  Detection out;
  for (const auto& area : areas)
    for (const auto& c : area.consumers) out.consumer_ids.push_back(c.id);

  if (need_mic) {
    const auto start = Clock::now();
    out.mic = rank_scores(score_mic(areas, options.mic, options.threads));
    out.seconds[Method::mic] = seconds_since(start);
  }
  if (need_zeta) {
    const auto start = Clock::now();
    auto density = options.density;
    density.threads = options.threads;
    out.zeta = rank_scores(score_zeta(areas, density, options.zeta_scope));
    out.seconds[Method::cfsfdp] = seconds_since(start);
  }
  if (wanted.count(Method::pcc)) {
    const auto start = Clock::now();
    out.pcc = rank_scores(score_pcc(areas, options.threads));
    out.seconds[Method::pcc] = seconds_since(start);
  }
  if (combine) {
    // Both combinations are cheap once the two ranks exist.
    auto start = Clock::now();
    out.arith = combine_ranks(*out.mic, *out.zeta, CombineMode::arith);
    const double arith_seconds = seconds_since(start);
    start = Clock::now();
    out.geo = combine_ranks(*out.mic, *out.zeta, CombineMode::geo);
    const double geo_seconds = seconds_since(start);
    const double base = out.seconds[Method::mic] + out.seconds[Method::cfsfdp];
    out.seconds[Method::arith] = base + arith_seconds;
    out.seconds[Method::geo] = base + geo_seconds;
  }
  return out;
}

std::string ranking_csv(const Detection& d) {
  std::string out = "consumer_id";
  if (d.mic) out += ",mic_degree,mic_rank";
  if (d.zeta) out += ",zeta_degree,zeta_rank";
  if (d.arith) out += ",combined_arith";
  if (d.geo) out += ",combined_geo";
  if (d.pcc) out += ",pcc_degree,pcc_rank";
  out += '\n';
  using meterdata::format_number;
  for (std::size_t i = 0; i < d.consumer_ids.size(); ++i) {
    out += d.consumer_ids[i];
    auto pair = [&](const std::optional<SuspicionRanking>& r) {
      if (!r) return;
      out += ',' + format_number(r->degree[i]) + ',' + format_number(r->rank[i]);
    };
    pair(d.mic);
    pair(d.zeta);
    if (d.arith) out += ',' + format_number(d.arith->rank[i]);
    if (d.geo) out += ',' + format_number(d.geo->rank[i]);
    pair(d.pcc);
    out += '\n';
  }
  return out;
}

void write_ranking_csv(const std::filesystem::path& path, const Detection& detection) {
  csv::write_file(path, ranking_csv(detection));
}

RankingTable parse_ranking_csv(std::string_view text) {
  const auto rows = csv::split(text);
  require(!rows.empty(), ErrorKind::parse, "ranking CSV is empty");
  const auto& header = rows.front();
  require(!header.fields.empty() && header.fields[0] == "consumer_id", ErrorKind::parse,
          "ranking CSV header must start with consumer_id");
  RankingTable table;
  std::vector<std::string> names;
  for (std::size_t c = 1; c < header.fields.size(); ++c) {
    names.emplace_back(header.fields[c]);
    table.columns[names.back()];
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    require(row.fields.size() == names.size() + 1, ErrorKind::shape,
            "line " + std::to_string(row.line) + ": expected " +
                std::to_string(names.size() + 1) + " fields");
    table.consumer_ids.emplace_back(row.fields[0]);
    for (std::size_t c = 0; c < names.size(); ++c)
      table.columns[names[c]].push_back(csv::parse_double(row.fields[c + 1], row.line, names[c]));
  }
  return table;
}

RankingTable load_ranking_csv(const std::filesystem::path& path) {
  return parse_ranking_csv(csv::read_file(path));
}

}  // namespace theftsentry::pipeline
