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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "correlate.hpp"
#include "error.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace theftsentry;
using namespace theftsentry::correlate;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::internal;
}

double mic_of(const std::vector<double>& x, const std::vector<double>& y, const MicOptions& o = {}) {
  return mic(PairSample(x, y), o).value;
}

}  // namespace

TEST_CASE("paired samples validate their input") {
  const std::vector<double> a{1, 2, 3}, b{1, 2}, c{1, std::nan(""), 3};
  CHECK(kind_of([&] { PairSample(a, b); }) == ErrorKind::shape);
  CHECK(kind_of([&] { PairSample(a, c); }) == ErrorKind::domain);
}

TEST_CASE("equipartition") {
  const std::vector<double> v{5, 1, 3, 2, 4, 6};
  CHECK(equipartition(v, 2) == std::vector<double>{3});
  CHECK(equipartition(v, 3) == std::vector<double>{2, 4});
  // ties stay together
  const std::vector<double> t{1, 1, 1, 2, 3, 3};
  const auto cuts = equipartition(t, 2);
  REQUIRE(cuts.size() == 1);
  const auto bins = assign_bins(t, cuts);
  CHECK(bins[0] == bins[1]);
  CHECK(bins[1] == bins[2]);
  CHECK(kind_of([&] { equipartition(std::vector<double>{1, 1, 1, 2}, 3); }) == ErrorKind::degenerate);
  CHECK(kind_of([&] { equipartition(v, 1); }) == ErrorKind::parameter);
}

TEST_CASE("grid mutual information") {
  const std::vector<double> x{0, 0, 1, 1}, y{0, 0, 1, 1}, z{0, 1, 0, 1};
  const std::vector<double> cut{0};
  CHECK(grid_mutual_information(PairSample(x, y), cut, cut) == doctest::Approx(1.0));
  CHECK(grid_mutual_information(PairSample(x, z), cut, cut) == doctest::Approx(0.0));
  gen::Rng rng(2);
  for (int k = 0; k < 50; ++k) {
    const auto a = gen::uniform_vector(rng, 30), b = gen::uniform_vector(rng, 30);
    const std::vector<double> xc{0.3, 0.7}, yc{0.5};
    CHECK(grid_mutual_information(PairSample(a, b), xc, yc) ==
          doctest::Approx(oracle::grid_mi_bits(a, b, xc, yc)).epsilon(1e-12));
  }
}

TEST_CASE("admissible shapes follow the n^alpha bound") {
  CHECK(admissible_shapes(10, 0.6).empty());
  CHECK(admissible_shapes(11, 0.6) == std::vector<std::pair<std::size_t, std::size_t>>{{2, 2}});
  const auto s48 = admissible_shapes(48, 0.6);  // bound 10.2
  for (auto [a, b] : s48) CHECK(static_cast<double>(a * b) < std::pow(48.0, 0.6));
  CHECK(s48.size() == 8);
}

TEST_CASE("MIC equals exhaustive search for n <= 12") {
  gen::Rng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 4 + trial % 9;
    const bool ties = trial % 3 == 0;
    const auto x = ties ? gen::tied_vector(rng, n, 4) : gen::uniform_vector(rng, n);
    const auto y = ties ? gen::tied_vector(rng, n, 3) : gen::uniform_vector(rng, n);
    const auto r = mic(PairSample(x, y));
    CHECK(r.small_sample == (n < 11));
    CHECK(r.value == doctest::Approx(oracle::mic(x, y)).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("with exhaustive rows MIC is exact beyond the smallest samples") {
  MicOptions exact;
  exact.exhaustive_row_limit = 1u << 20;
  gen::Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 13 + trial % 8;  // shapes up to 2x3 and 3x2
    const auto x = trial % 2 ? gen::tied_vector(rng, n, 6) : gen::uniform_vector(rng, n);
    const auto y = gen::uniform_vector(rng, n);
    const double truth = oracle::mic(x, y);
    CHECK(mic_of(x, y, exact) == doctest::Approx(truth).epsilon(1e-9).scale(1.0));
    CHECK(mic_of(x, y) <= truth + 1e-12);
  }
}

TEST_CASE("MIC properties") {
  gen::Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 20 + trial % 40;
    const auto x = gen::uniform_vector(rng, n);
    const auto y = trial % 4 == 0 ? gen::tied_vector(rng, n, 5) : gen::uniform_vector(rng, n);
    const double m = mic_of(x, y);
    CHECK((m >= 0.0 && m <= 1.0));
    CHECK(mic_of(y, x) == doctest::Approx(m).epsilon(1e-12).scale(1.0));
    // only ranks matter
    std::vector<double> fx(n), gy(n);
    for (std::size_t i = 0; i < n; ++i) {
      fx[i] = std::exp(3.0 * x[i]) - 7.0;
      gy[i] = y[i] * y[i] * y[i] + 2.0;
    }
    CHECK(mic_of(fx, gy) == m);
  }
}

TEST_CASE("MIC of a function of x is 1") {
  gen::Rng rng(3);
  for (std::size_t n : {12u, 30u, 48u, 100u}) {
    const auto x = gen::uniform_vector(rng, n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = std::exp(-x[i]);
    CHECK(mic_of(x, x) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mic_of(x, y) == doctest::Approx(1.0).epsilon(1e-9));
    // Rising then falling needs three columns, which 2x2 grids lack.
    if (n < 48) continue;
    for (std::size_t i = 0; i < n; ++i) y[i] = std::sin(4.0 * x[i]);
    CHECK(mic_of(x, y) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("constant coordinates and tiny samples") {
  const std::vector<double> x{1, 2, 3, 4, 5}, c{2, 2, 2, 2, 2};
  const auto r = mic(PairSample(x, c));
  CHECK(r.degenerate);
  CHECK(r.value == 0.0);
  const std::vector<double> three{1, 2, 3};
  CHECK(kind_of([&] { mic(PairSample(three, three)); }) == ErrorKind::parameter);
}

TEST_CASE("characteristic matrix entries are normalized MI") {
  gen::Rng rng(8);
  const auto x = gen::uniform_vector(rng, 60), y = gen::uniform_vector(rng, 60);
  const PairSample s(x, y);
  const auto m = characteristic_matrix(s);
  CHECK(m.bound == doctest::Approx(std::pow(60.0, 0.6)));
  CHECK(m.entries.size() == admissible_shapes(60, 0.6).size());
  double best = 0.0;
  for (const auto& [shape, v] : m.entries) {
    CHECK((v >= 0.0 && v <= 1.0));
    const double mi = max_mi(s, shape.first, shape.second);
    CHECK(v == doctest::Approx(mi / std::log2(static_cast<double>(std::min(shape.first, shape.second)))));
    best = std::max(best, v);
  }
  CHECK(mic(s).value == best);
}

TEST_CASE("Pearson's r") {
  const std::vector<double> x{1, 2, 3, 4}, y{2, 4, 6, 8}, z{4, 3, 2, 1}, c{1, 1, 1, 1};
  CHECK(pcc(PairSample(x, y)).value == doctest::Approx(1.0));
  CHECK(pcc(PairSample(x, z)).value == doctest::Approx(-1.0));
  CHECK(pcc(PairSample(x, c)).degenerate);
}
