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

#include "meterdata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "csv.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace theftsentry::meterdata {

DayProfile::DayProfile(std::vector<double> readings) : readings_(std::move(readings)) {
  require(readings_.size() >= 2, ErrorKind::shape,
          "a day profile needs at least 2 intervals, got " +
              std::to_string(readings_.size()));
  for (std::size_t t = 0; t < readings_.size(); ++t) {
    const double v = readings_[t];
    if (!std::isfinite(v) || v < 0.0)
      fail(ErrorKind::domain, "reading " + std::to_string(t) + " is " +
                                  format_number(v) + "; readings must be finite and >= 0");
  }
}

double DayProfile::max() const noexcept {
  return readings_.empty() ? 0.0 : *std::max_element(readings_.begin(), readings_.end());
}

double DayProfile::total() const noexcept {
  return std::accumulate(readings_.begin(), readings_.end(), 0.0);
}

double DayProfile::mean() const noexcept {
  return readings_.empty() ? 0.0 : total() / static_cast<double>(readings_.size());
}

void ConsumerSeries::validate() const {
  const std::size_t t = intervals();
  for (std::size_t j = 0; j < days.size(); ++j)
    require(days[j].size() == t, ErrorKind::shape,
            "consumer " + id + " day " + std::to_string(j) + " has " +
                std::to_string(days[j].size()) + " intervals, expected " + std::to_string(t));
  if (!ground_truth) return;
  require(ground_truth->size() == days.size(), ErrorKind::shape,
          "consumer " + id + ": ground truth has " + std::to_string(ground_truth->size()) +
              " days, recorded has " + std::to_string(days.size()));
  for (std::size_t j = 0; j < days.size(); ++j)
    require((*ground_truth)[j].size() == t, ErrorKind::shape,
            "consumer " + id + ": ground truth day " + std::to_string(j) +
                " has the wrong interval count");
}

// -- CSV ----------------------------------------------------------------------

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) return std::to_string(value);
  return std::string(buf, ptr);
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

double parse_reading(std::string_view field, std::size_t line, const std::string& consumer,
                     long day, std::size_t t) {
  if (field.empty())
    fail(ErrorKind::shape, "line " + std::to_string(line) + ": missing reading v" +
                               std::to_string(t + 1) + " for consumer " + consumer +
                               " day " + std::to_string(day));
  const double v = csv::parse_double(field, line, "reading");
  if (!std::isfinite(v) || v < 0.0)
    fail(ErrorKind::domain, "line " + std::to_string(line) + ": reading " +
                                std::string(field) + " for consumer " + consumer + " day " +
                                std::to_string(day) + " must be finite and >= 0");
  return v;
}

// Cells collected per consumer before shape checks.
struct PendingConsumer {
  std::string id;
  std::map<long, std::vector<std::optional<double>>> days;
};

ConsumerCsv assemble(std::vector<PendingConsumer> pending, std::size_t intervals) {
  ConsumerCsv out;
  std::set<long> labels;
  for (const auto& c : pending)
    for (const auto& [day, _] : c.days) labels.insert(day);
  out.day_labels.assign(labels.begin(), labels.end());

  for (auto& c : pending) {
    ConsumerSeries series;
    series.id = c.id;
    for (long day : out.day_labels) {
      auto it = c.days.find(day);
      if (it == c.days.end())
        fail(ErrorKind::shape,
             "consumer " + c.id + " has no readings for day " + std::to_string(day));
      std::vector<double> readings(intervals);
      for (std::size_t t = 0; t < intervals; ++t) {
        if (t >= it->second.size() || !it->second[t])
          fail(ErrorKind::shape, "consumer " + c.id + " day " + std::to_string(day) +
                                     " is missing interval " + std::to_string(t));
        readings[t] = *it->second[t];
      }
      series.days.emplace_back(std::move(readings));
    }
    out.consumers.push_back(std::move(series));
  }
  return out;
}

}  // namespace

ConsumerCsv parse_consumers_csv(std::string_view text, const ColumnSpec& schema) {
  const auto rows = csv::split(text, schema.delimiter);
  if (rows.size() <= 1) {
    ConsumerCsv empty;
    empty.warnings.push_back(rows.empty() ? "consumer CSV is empty"
                                          : "consumer CSV has a header but no rows");
    return empty;
  }

  const auto& header = rows.front();
  const bool wide = schema.layout == ColumnSpec::Layout::wide;
  if (header.fields.size() < 3 || lower(header.fields[0]) != "consumer_id" ||
      lower(header.fields[1]) != "day")
    fail(ErrorKind::parse, "line " + std::to_string(header.line) +
                               ": header must start with consumer_id,day");

  std::vector<PendingConsumer> pending;
  std::unordered_map<std::string, std::size_t> index;
  auto consumer_slot = [&](std::string_view id) -> PendingConsumer& {
    auto [it, inserted] = index.try_emplace(std::string(id), pending.size());
    if (inserted) pending.push_back(PendingConsumer{std::string(id), {}});
    return pending[it->second];
  };

  if (wide) {
    const std::size_t intervals = header.fields.size() - 2;
    if (intervals < 2)
      fail(ErrorKind::shape, "wide CSV needs at least 2 interval columns");
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (row.fields.size() < 2 || row.fields[0].empty())
        fail(ErrorKind::parse, "line " + std::to_string(row.line) + ": malformed row");
      const std::string id(row.fields[0]);
      const long day = csv::parse_long(row.fields[1], row.line, "day");
      if (row.fields.size() != intervals + 2)
        fail(ErrorKind::shape, "line " + std::to_string(row.line) + ": consumer " + id +
                                   " day " + std::to_string(day) + " has " +
                                   std::to_string(row.fields.size() - 2) +
                                   " readings, expected " + std::to_string(intervals));
      auto& slot = consumer_slot(id);
      if (slot.days.count(day))
        fail(ErrorKind::shape, "line " + std::to_string(row.line) + ": duplicate day " +
                                   std::to_string(day) + " for consumer " + id);
      std::vector<std::optional<double>> cells(intervals);
      for (std::size_t t = 0; t < intervals; ++t)
        cells[t] = parse_reading(row.fields[t + 2], row.line, id, day, t);
      slot.days.emplace(day, std::move(cells));
    }
    return assemble(std::move(pending), intervals);
  }

  // tall layout: consumer_id,day,t,value
  if (header.fields.size() != 4)
    fail(ErrorKind::parse, "tall CSV header must be consumer_id,day,t,value");
  std::size_t intervals = 0;
  struct Cell {
    std::size_t consumer;
    long day;
    std::size_t t;
    double value;
    std::size_t line;
  };
  std::vector<Cell> cells;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != 4 || row.fields[0].empty())
      fail(ErrorKind::parse, "line " + std::to_string(row.line) + ": expected 4 fields");
    const std::string id(row.fields[0]);
    const long day = csv::parse_long(row.fields[1], row.line, "day");
    const long t = csv::parse_long(row.fields[2], row.line, "interval index");
    if (t < 0) fail(ErrorKind::parse, "line " + std::to_string(row.line) + ": negative interval index");
    const double v = parse_reading(row.fields[3], row.line, id, day, static_cast<std::size_t>(t));
    consumer_slot(id);
    cells.push_back({index.at(id), day, static_cast<std::size_t>(t), v, row.line});
    intervals = std::max(intervals, static_cast<std::size_t>(t) + 1);
  }
  if (intervals < 2) fail(ErrorKind::shape, "tall CSV needs at least 2 intervals per day");
  for (const auto& cell : cells) {
    auto& day = pending[cell.consumer].days[cell.day];
    day.resize(intervals);
    if (day[cell.t])
      fail(ErrorKind::shape, "line " + std::to_string(cell.line) + ": duplicate cell for consumer " +
                                 pending[cell.consumer].id + " day " + std::to_string(cell.day));
    day[cell.t] = cell.value;
  }
  return assemble(std::move(pending), intervals);
}

ConsumerCsv load_consumers_csv(const std::filesystem::path& path, const ColumnSpec& schema) {
  return parse_consumers_csv(csv::read_file(path), schema);
}

ObserverCsv parse_observer_csv(std::string_view text) {
  const auto rows = csv::split(text);
  ObserverCsv out;
  if (rows.size() <= 1) return out;
  const auto& header = rows.front();
  if (header.fields.size() < 3 || lower(header.fields[0]) != "day")
    fail(ErrorKind::parse, "line " + std::to_string(header.line) +
                               ": observer header must be day,v1,...,vT");
  const std::size_t intervals = header.fields.size() - 1;

  std::map<long, DayProfile> days;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const long day = csv::parse_long(row.fields[0], row.line, "day");
    if (row.fields.size() != intervals + 1)
      fail(ErrorKind::shape, "line " + std::to_string(row.line) + ": observer day " +
                                 std::to_string(day) + " has " +
                                 std::to_string(row.fields.size() - 1) +
                                 " readings, expected " + std::to_string(intervals));
    std::vector<double> readings(intervals);
    for (std::size_t t = 0; t < intervals; ++t)
      readings[t] = parse_reading(row.fields[t + 1], row.line, "observer", day, t);
    if (!days.emplace(day, DayProfile(std::move(readings))).second)
      fail(ErrorKind::shape, "line " + std::to_string(row.line) + ": duplicate observer day " +
                                 std::to_string(day));
  }
  for (auto& [label, day] : days) {
    out.day_labels.push_back(label);
    out.days.push_back(std::move(day));
  }
  return out;
}

ObserverCsv load_observer_csv(const std::filesystem::path& path) {
  return parse_observer_csv(csv::read_file(path));
}

void write_consumers_csv(const std::filesystem::path& path,
                         std::span<const ConsumerSeries> consumers, bool ground_truth) {
  const std::size_t intervals = consumers.empty() ? kDefaultIntervals : consumers.front().intervals();
  std::string out = "consumer_id,day";
  for (std::size_t t = 1; t <= intervals; ++t) out += ",v" + std::to_string(t);
  out += '\n';
  for (const auto& c : consumers) {
    const auto& days = ground_truth && c.ground_truth ? *c.ground_truth : c.days;
    for (std::size_t j = 0; j < days.size(); ++j) {
      out += c.id;
      out += ',';
      out += std::to_string(j);
      for (double v : days[j].readings()) {
        out += ',';
        out += format_number(v);
      }
      out += '\n';
    }
  }
  csv::write_file(path, out);
}

void write_observer_csv(const std::filesystem::path& path, std::span<const DayProfile> observer) {
  const std::size_t intervals = observer.empty() ? kDefaultIntervals : observer.front().size();
  std::string out = "day";
  for (std::size_t t = 1; t <= intervals; ++t) out += ",v" + std::to_string(t);
  out += '\n';
  for (std::size_t j = 0; j < observer.size(); ++j) {
    out += std::to_string(j);
    for (double v : observer[j].readings()) {
      out += ',';
      out += format_number(v);
    }
    out += '\n';
  }
  csv::write_file(path, out);
}

// -- Synthetic ground truth ---------------------------------------------------

namespace {

// Generator constants. Hours are on a 24 h clock.
constexpr double kMorningPeakHour = 8.5;
constexpr double kEveningPeakHour = 18.5;
constexpr double kPeakJitterHours = 1.5;
constexpr double kMinPeakWidth = 1.0;
constexpr double kMaxPeakWidth = 2.5;
constexpr double kScaleLogSigma = 0.8;
constexpr double kDayLevelLogSigma = 0.10;
constexpr double kMinReadingLogSigma = 0.10;
constexpr double kMaxReadingLogSigma = 0.40;
// Appliance events: short bursts on top of the routine shape.
constexpr double kMaxEventsPerDay = 3.0;
constexpr std::size_t kMaxEventIntervals = 4;
constexpr double kMinEventAmplitude = 0.5;
constexpr double kMaxEventAmplitude = 1.5;
// Days away from home: base load only.
constexpr double kMaxAwayProbability = 0.10;

double bump(double hour, double centre, double width) {
  double d = std::abs(hour - centre);
  d = std::min(d, 24.0 - d);
  return std::exp(-0.5 * (d / width) * (d / width));
}

}  // namespace

std::vector<ConsumerSeries> synth_ground_truth(const SynthOptions& options) {
  require(options.n_consumers >= 1, ErrorKind::parameter, "n_consumers must be >= 1");
  require(options.m_days >= 1, ErrorKind::parameter, "m_days must be >= 1");
  require(options.intervals >= 2, ErrorKind::parameter, "intervals must be >= 2");

  const std::size_t width = std::max<std::size_t>(4, std::to_string(options.n_consumers).size());
  std::vector<ConsumerSeries> out;
  out.reserve(options.n_consumers);
  for (std::size_t i = 0; i < options.n_consumers; ++i) {
    const std::uint64_t consumer_seed = mix_seed(options.seed, i);
    Rng rng = make_rng(consumer_seed);

    const double scale = std::lognormal_distribution<double>(0.0, kScaleLogSigma)(rng);
    const double base = uniform(rng, 0.15, 0.5);
    const double w_morning = uniform(rng, 0.2, 1.0);
    const double w_evening = uniform(rng, 0.2, 1.0);
    const double morning = kMorningPeakHour + uniform(rng, -kPeakJitterHours, kPeakJitterHours);
    const double evening = kEveningPeakHour + uniform(rng, -kPeakJitterHours, kPeakJitterHours);
    const double morning_width = uniform(rng, kMinPeakWidth, kMaxPeakWidth);
    const double evening_width = uniform(rng, kMinPeakWidth, kMaxPeakWidth);
    const double reading_sigma = uniform(rng, kMinReadingLogSigma, kMaxReadingLogSigma);
    const double event_rate = uniform(rng, 0.0, kMaxEventsPerDay);
    const double away_probability = uniform(rng, 0.0, kMaxAwayProbability);

    std::vector<double> shape(options.intervals);
    for (std::size_t t = 0; t < options.intervals; ++t) {
      const double hour = (static_cast<double>(t) + 0.5) * 24.0 / static_cast<double>(options.intervals);
      shape[t] = scale * (base + w_morning * bump(hour, morning, morning_width) +
                          w_evening * bump(hour, evening, evening_width));
    }

    ConsumerSeries series;
    std::string id = std::to_string(i + 1);
    series.id = "C" + std::string(width - id.size(), '0') + id;
    series.days.reserve(options.m_days);
    for (std::size_t j = 0; j < options.m_days; ++j) {
      Rng day_rng = make_rng(mix_seed(consumer_seed, j));
      const double level = std::lognormal_distribution<double>(0.0, kDayLevelLogSigma)(day_rng);
      const bool away = std::bernoulli_distribution(away_probability)(day_rng);
      std::lognormal_distribution<double> reading_noise(0.0, reading_sigma);
      std::vector<double> readings(options.intervals);
      for (std::size_t t = 0; t < options.intervals; ++t)
        readings[t] = (away ? scale * base : shape[t]) * level * reading_noise(day_rng);
      const int events = away ? 0 : std::poisson_distribution<int>(event_rate)(day_rng);
      std::uniform_int_distribution<std::size_t> start_at(0, options.intervals - 1);
      std::uniform_int_distribution<std::size_t> duration(1, kMaxEventIntervals);
      for (int e = 0; e < events; ++e) {
        const std::size_t start = start_at(day_rng);
        const std::size_t length = duration(day_rng);
        const double amplitude = scale * uniform(day_rng, kMinEventAmplitude, kMaxEventAmplitude);
        for (std::size_t t = start; t < std::min(start + length, options.intervals); ++t)
          readings[t] += amplitude;
      }
      series.days.emplace_back(std::move(readings));
    }
    series.ground_truth = series.days;
    out.push_back(std::move(series));
  }
  return out;
}

// -- Areas --------------------------------------------------------------------

AreaDataset assemble_area(std::string name, std::vector<ConsumerSeries> consumers,
                          double noise_sigma, std::uint64_t noise_seed) {
  require(!consumers.empty(), ErrorKind::parameter, "an area needs at least one consumer");
  require(noise_sigma >= 0.0 && std::isfinite(noise_sigma), ErrorKind::parameter,
          "noise_sigma must be finite and >= 0");
  const std::size_t m = consumers.front().day_count();
  const std::size_t t_count = consumers.front().intervals();
  for (const auto& c : consumers) {
    c.validate();
    require(c.day_count() == m && c.intervals() == t_count, ErrorKind::shape,
            "consumer " + c.id + " does not match the area's shape");
  }

  AreaDataset area;
  area.name = std::move(name);
  std::vector<std::vector<double>> totals(m, std::vector<double>(t_count, 0.0));
  for (const auto& c : consumers) {
    const auto& source = c.ground_truth ? *c.ground_truth : c.days;
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t t = 0; t < t_count; ++t) totals[j][t] += source[j][t];
  }
  if (noise_sigma > 0.0) {
    Rng rng = make_rng(noise_seed);
    std::normal_distribution<double> noise(0.0, noise_sigma);
    for (auto& day : totals)
      for (double& v : day) v = std::max(0.0, v + noise(rng));
  }
  area.observer.reserve(m);
  for (auto& day : totals) area.observer.emplace_back(std::move(day));
  area.consumers = std::move(consumers);
  compute_ntl(area);
  return area;
}

const std::vector<std::vector<double>>& compute_ntl(AreaDataset& area) {
  const std::size_t m = area.observer.size();
  const std::size_t t_count = area.intervals();
  for (const auto& c : area.consumers) {
    require(c.day_count() == m, ErrorKind::shape,
            "consumer " + c.id + " has " + std::to_string(c.day_count()) +
                " days but the observer has " + std::to_string(m));
    require(c.intervals() == t_count, ErrorKind::shape,
            "consumer " + c.id + " has " + std::to_string(c.intervals()) +
                " intervals but the observer has " + std::to_string(t_count));
  }
  std::vector<std::vector<double>> ntl(m);
  for (std::size_t j = 0; j < m; ++j) {
    auto readings = area.observer[j].readings();
    ntl[j].assign(readings.begin(), readings.end());
    for (const auto& c : area.consumers)
      for (std::size_t t = 0; t < t_count; ++t) ntl[j][t] -= c.days[j][t];
  }
  area.ntl = std::move(ntl);
  return area.ntl;
}

NormalizedProfile normalize_profile(const DayProfile& day, std::size_t consumer,
                                    std::size_t day_index) {
  NormalizedProfile out;
  out.consumer = consumer;
  out.day = day_index;
  const auto readings = day.readings();
  const double peak = day.max();
  out.values.resize(readings.size(), 0.0);
  if (peak <= 0.0) {
    out.degenerate = true;
    return out;
  }
  for (std::size_t t = 0; t < readings.size(); ++t) out.values[t] = readings[t] / peak;
  return out;
}

}  // namespace theftsentry::meterdata
