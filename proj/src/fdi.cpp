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

#include "fdi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "error.hpp"

namespace theftsentry::fdi {

std::string_view to_string(FdiType type) noexcept {
  switch (type) {
    case FdiType::fdi1: return "FDI1";
    case FdiType::fdi2: return "FDI2";
    case FdiType::fdi3: return "FDI3";
    case FdiType::fdi4: return "FDI4";
    case FdiType::fdi5: return "FDI5";
    case FdiType::fdi6: return "FDI6";
  }
  return "FDI?";
}

FdiType parse_fdi_type(std::string_view text) {
  std::string_view digits = text;
  if (text.size() == 4 && (text[0] == 'F' || text[0] == 'f') &&
      (text[1] == 'D' || text[1] == 'd') && (text[2] == 'I' || text[2] == 'i'))
    digits = text.substr(3);
  if (digits.size() == 1 && digits[0] >= '1' && digits[0] <= '6')
    return static_cast<FdiType>(digits[0] - '0');
  fail(ErrorKind::config, "unknown FDI type '" + std::string(text) + "'");
}

std::size_t min_window_intervals(std::size_t intervals) noexcept {
  return intervals / 6 + 1;
}

void FdiParams::validate(const DayProfile& day) const {
  const std::size_t n = day.size();
  auto check_band = [](double v, const char* name) {
    require(std::isfinite(v) && v > 0.0, ErrorKind::parameter,
            std::string(name) + " must be finite and > 0");
  };
  switch (type) {
    case FdiType::fdi1:
      require(alpha.has_value(), ErrorKind::parameter, "FDI1 needs alpha");
      check_band(*alpha, "alpha");
      break;
    case FdiType::fdi2:
    case FdiType::fdi3:
      require(gamma.has_value(), ErrorKind::parameter, "FDI2/FDI3 need gamma");
      require(std::isfinite(*gamma) && *gamma >= 0.0, ErrorKind::parameter,
              "gamma must be finite and >= 0");
      require(*gamma < day.max(), ErrorKind::parameter,
              "gamma " + meterdata::format_number(*gamma) + " must be below the day maximum " +
                  meterdata::format_number(day.max()));
      break;
    case FdiType::fdi4:
      require(window_begin && window_end, ErrorKind::parameter, "FDI4 needs a window");
      require(*window_begin < *window_end && *window_end <= n, ErrorKind::parameter,
              "FDI4 window [" + std::to_string(*window_begin) + ", " +
                  std::to_string(*window_end) + ") is empty or outside the day");
      break;
    case FdiType::fdi6:
      require(day_mean.has_value() && std::isfinite(*day_mean) && *day_mean >= 0.0,
              ErrorKind::parameter, "FDI6 needs a finite, nonnegative day mean");
      [[fallthrough]];
    case FdiType::fdi5:
      require(alpha_t.size() == n, ErrorKind::parameter,
              "alpha_t has " + std::to_string(alpha_t.size()) + " entries, day has " +
                  std::to_string(n));
      for (double a : alpha_t) check_band(a, "alpha_t");
      break;
  }
}

DayProfile apply_fdi(const DayProfile& day, const FdiParams& params) {
  params.validate(day);
  const auto x = day.readings();
  std::vector<double> out(x.begin(), x.end());
  switch (params.type) {
    case FdiType::fdi1:
      for (double& v : out) v *= *params.alpha;
      break;
    case FdiType::fdi2:
      for (double& v : out) v = std::min(v, *params.gamma);
      break;
    case FdiType::fdi3:
      for (double& v : out) v = std::max(v - *params.gamma, 0.0);
      break;
    case FdiType::fdi4:
      for (std::size_t t = *params.window_begin; t < *params.window_end; ++t) out[t] = 0.0;
      break;
    case FdiType::fdi5:
      for (std::size_t t = 0; t < out.size(); ++t) out[t] *= params.alpha_t[t];
      break;
    case FdiType::fdi6:
      for (std::size_t t = 0; t < out.size(); ++t) out[t] = params.alpha_t[t] * *params.day_mean;
      break;
  }
  return DayProfile(std::move(out));
}

FdiParams sample_params(FdiType type, const DayProfile& day, Rng& rng) {
  const double peak = day.max();
  require(peak > 0.0, ErrorKind::parameter, "cannot tamper an all-zero day");

  FdiParams p;
  p.type = type;
  switch (type) {
    case FdiType::fdi1:
      p.alpha = uniform(rng, kAlphaLow, kAlphaHigh);
      break;
    case FdiType::fdi2:
    case FdiType::fdi3:
      p.gamma = uniform(rng, kAlphaLow * peak, kAlphaHigh * peak);
      break;
    case FdiType::fdi4: {
      const std::size_t n = day.size();
      const std::size_t shortest = min_window_intervals(n);
      const std::size_t longest = n - 1;
      require(shortest <= longest, ErrorKind::parameter,
              "day too short for an FDI4 window");
      // Windows of length L have n - L + 1 starts; draw uniformly over all.
      std::size_t total = 0;
      for (std::size_t len = shortest; len <= longest; ++len) total += n - len + 1;
      std::size_t pick = std::uniform_int_distribution<std::size_t>(0, total - 1)(rng);
      for (std::size_t len = shortest; len <= longest; ++len) {
        const std::size_t starts = n - len + 1;
        if (pick < starts) {
          p.window_begin = pick;
          p.window_end = pick + len;
          break;
        }
        pick -= starts;
      }
      break;
    }
    case FdiType::fdi6:
      p.day_mean = day.mean();
      [[fallthrough]];
    case FdiType::fdi5:
      p.alpha_t.resize(day.size());
      for (double& a : p.alpha_t) a = uniform(rng, kAlphaLow, kAlphaHigh);
      break;
  }
  return p;
}

FdiMix FdiMix::only(FdiType type) {
  FdiMix mix;
  mix.weights.fill(0.0);
  mix.weights[static_cast<std::size_t>(type) - 1] = 1.0;
  return mix;
}

FdiMix FdiMix::from_label(std::string_view label) {
  std::string upper(label);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "MIX") return uniform();
  return only(parse_fdi_type(upper));
}

std::string FdiMix::label() const {
  std::size_t nonzero = 0;
  std::size_t last = 0;
  for (std::size_t k = 0; k < weights.size(); ++k)
    if (weights[k] > 0.0) {
      ++nonzero;
      last = k;
    }
  if (nonzero == 1) return std::string(to_string(static_cast<FdiType>(last + 1)));
  if (std::all_of(weights.begin(), weights.end(),
                  [&](double w) { return w == weights.front(); }))
    return "MIX";
  return "CUSTOM";
}

void FdiMix::validate() const {
  double sum = 0.0;
  for (double w : weights) {
    require(std::isfinite(w) && w >= 0.0, ErrorKind::config,
            "fdi_mix weights must be finite and >= 0");
    sum += w;
  }
  require(sum > 0.0, ErrorKind::config, "fdi_mix weights must sum to > 0");
}

std::vector<std::string> TamperScenario::fraud_ids() const {
  std::vector<std::string> out;
  for (const auto& area : fraud) out.insert(out.end(), area.begin(), area.end());
  return out;
}

BuiltScenario build_scenario(std::span<const ConsumerSeries> ground_truth,
                             const ScenarioOptions& options) {
  options.mix.validate();
  const std::size_t n = ground_truth.size();
  require(options.n_areas >= 1, ErrorKind::parameter, "n_areas must be >= 1");
  require(options.n_areas <= n, ErrorKind::parameter,
          "cannot split " + std::to_string(n) + " consumers into " +
              std::to_string(options.n_areas) + " areas");
  const std::size_t smallest_area = n / options.n_areas;
  require(options.thieves_per_area < smallest_area, ErrorKind::parameter,
          std::to_string(options.thieves_per_area) +
              " thieves per area needs more than that many consumers per area; the smallest "
              "area has " + std::to_string(smallest_area));
  require(options.tampered_day_fraction > 0.0 && options.tampered_day_fraction <= 1.0,
          ErrorKind::parameter, "tampered_day_fraction must be in (0, 1]");

  const std::size_t m = ground_truth.front().day_count();
  for (const auto& c : ground_truth) {
    c.validate();
    require(c.day_count() == m && c.intervals() == ground_truth.front().intervals(),
            ErrorKind::shape, "consumer " + c.id + " does not match the dataset shape");
  }
  const auto tampered_days =
      static_cast<std::size_t>(std::floor(options.tampered_day_fraction * static_cast<double>(m)));
  require(options.thieves_per_area == 0 || tampered_days >= 1, ErrorKind::parameter,
          "tampered_day_fraction leaves no day to tamper with");

  BuiltScenario built;
  auto& scenario = built.scenario;
  scenario.seed = options.seed;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  {
    Rng rng = make_rng(mix_seed(options.seed, "areas"));
    std::shuffle(order.begin(), order.end(), rng);
  }

  const std::array<double, 6>& w = options.mix.weights;
  std::discrete_distribution<int> pick_type(w.begin(), w.end());

  std::size_t cursor = 0;
  for (std::size_t a = 0; a < options.n_areas; ++a) {
    const std::size_t size = n / options.n_areas + (a < n % options.n_areas ? 1 : 0);
    std::vector<std::size_t> members(order.begin() + static_cast<std::ptrdiff_t>(cursor),
                                     order.begin() + static_cast<std::ptrdiff_t>(cursor + size));
    cursor += size;

    // Thieves: a random subset of the area, chosen by shuffling positions.
    std::vector<std::size_t> positions(size);
    std::iota(positions.begin(), positions.end(), 0);
    Rng area_rng = make_rng(mix_seed(mix_seed(options.seed, "thieves"), a));
    std::shuffle(positions.begin(), positions.end(), area_rng);
    std::vector<std::size_t> thief_positions(positions.begin(),
                                             positions.begin() + static_cast<std::ptrdiff_t>(options.thieves_per_area));
    std::sort(thief_positions.begin(), thief_positions.end());

    std::vector<ConsumerSeries> consumers;
    consumers.reserve(size);
    for (std::size_t idx : members) consumers.push_back(ground_truth[idx]);

    std::vector<std::string> ids;
    for (const auto& c : consumers) ids.push_back(c.id);
    std::vector<std::string> fraud;

    for (std::size_t pos : thief_positions) {
      ConsumerSeries& thief = consumers[pos];
      const std::size_t global = members[pos];
      const std::uint64_t thief_seed = mix_seed(mix_seed(options.seed, "tamper"), global);
      Rng rng = make_rng(thief_seed);
      const auto type = static_cast<FdiType>(pick_type(rng) + 1);

      std::vector<std::size_t> days(m);
      std::iota(days.begin(), days.end(), 0);
      std::shuffle(days.begin(), days.end(), rng);
      days.resize(tampered_days);
      std::sort(days.begin(), days.end());

      const auto& truth = thief.ground_truth ? *thief.ground_truth : thief.days;
      if (!thief.ground_truth) thief.ground_truth = thief.days;

      // alpha (FDI1) and gamma (FDI2/3) model a fixed meter modification and
      // are drawn once per thief. gamma is drawn against the tampered day with
      // the smallest peak so it stays below every tampered day's maximum.
      std::optional<FdiParams> fixed;
      if (type == FdiType::fdi1 || type == FdiType::fdi2 || type == FdiType::fdi3) {
        std::size_t reference = days.front();
        for (std::size_t d : days)
          if (truth[d].max() < truth[reference].max()) reference = d;
        fixed = sample_params(type, truth[reference], rng);
      }

      for (std::size_t d : days) {
        Rng day_rng = make_rng(mix_seed(thief_seed, d));
        FdiParams params = fixed ? *fixed : sample_params(type, truth[d], day_rng);
        thief.days[d] = apply_fdi(truth[d], params);
        scenario.records.push_back(TamperRecord{thief.id, d, std::move(params)});
      }
      scenario.thief_type.emplace(thief.id, type);
      fraud.push_back(thief.id);
    }

    std::string name = "area_" + std::to_string(a);
    built.areas.push_back(meterdata::assemble_area(
        name, std::move(consumers), options.noise_sigma,
        mix_seed(mix_seed(options.seed, "observer-noise"), a)));
    scenario.area_names.push_back(std::move(name));
    scenario.areas.push_back(std::move(ids));
    scenario.fraud.push_back(std::move(fraud));
  }
  return built;
}

// -- JSON ---------------------------------------------------------------------

namespace {

nlohmann::json params_to_json(const FdiParams& p) {
  nlohmann::json j;
  j["type"] = to_string(p.type);
  if (p.alpha) j["alpha"] = *p.alpha;
  if (p.gamma) j["gamma"] = *p.gamma;
  if (p.window_begin) j["window_begin"] = *p.window_begin;
  if (p.window_end) j["window_end"] = *p.window_end;
  if (!p.alpha_t.empty()) j["alpha_t"] = p.alpha_t;
  if (p.day_mean) j["day_mean"] = *p.day_mean;
  return j;
}

FdiParams params_from_json(const nlohmann::json& j) {
  FdiParams p;
  p.type = parse_fdi_type(j.at("type").get<std::string>());
  if (j.contains("alpha")) p.alpha = j["alpha"].get<double>();
  if (j.contains("gamma")) p.gamma = j["gamma"].get<double>();
  if (j.contains("window_begin")) p.window_begin = j["window_begin"].get<std::size_t>();
  if (j.contains("window_end")) p.window_end = j["window_end"].get<std::size_t>();
  if (j.contains("alpha_t")) p.alpha_t = j["alpha_t"].get<std::vector<double>>();
  if (j.contains("day_mean")) p.day_mean = j["day_mean"].get<double>();
  return p;
}

}  // namespace

std::string scenario_to_json(const TamperScenario& scenario) {
  nlohmann::json root;
  root["seed"] = scenario.seed;
  nlohmann::json areas = nlohmann::json::array();
  for (std::size_t a = 0; a < scenario.areas.size(); ++a) {
    nlohmann::json area;
    area["name"] = a < scenario.area_names.size() ? scenario.area_names[a]
                                                  : "area_" + std::to_string(a);
    area["consumers"] = scenario.areas[a];
    area["fraud"] = a < scenario.fraud.size() ? scenario.fraud[a] : std::vector<std::string>{};
    areas.push_back(std::move(area));
  }
  root["areas"] = std::move(areas);
  root["fraud_ids"] = scenario.fraud_ids();
  nlohmann::json thieves = nlohmann::json::object();
  for (const auto& [id, type] : scenario.thief_type) thieves[id] = to_string(type);
  root["thief_types"] = std::move(thieves);
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : scenario.records) {
    nlohmann::json rec = params_to_json(r.params);
    rec["consumer_id"] = r.consumer_id;
    rec["day"] = r.day;
    records.push_back(std::move(rec));
  }
  root["records"] = std::move(records);
  return root.dump(2) + "\n";
}

TamperScenario scenario_from_json(std::string_view text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parse, std::string("scenario JSON: ") + e.what());
  }
  try {
    TamperScenario s;
    s.seed = root.value("seed", std::uint64_t{0});
    for (const auto& area : root.at("areas")) {
      s.area_names.push_back(area.value("name", "area_" + std::to_string(s.areas.size())));
      s.areas.push_back(area.at("consumers").get<std::vector<std::string>>());
      s.fraud.push_back(area.value("fraud", std::vector<std::string>{}));
    }
    if (root.contains("thief_types"))
      for (const auto& [id, type] : root["thief_types"].items())
        s.thief_type.emplace(id, parse_fdi_type(type.get<std::string>()));
    if (root.contains("records"))
      for (const auto& rec : root["records"])
        s.records.push_back(TamperRecord{rec.at("consumer_id").get<std::string>(),
                                         rec.at("day").get<std::size_t>(),
                                         params_from_json(rec)});
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parse, std::string("scenario JSON: ") + e.what());
  }
}

}  // namespace theftsentry::fdi
