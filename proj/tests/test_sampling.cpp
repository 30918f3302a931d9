#include <doctest.h>

#include <cmath>
#include <set>

#include "rtcur/error.hpp"
#include "rtcur/sampling.hpp"
#include "support.hpp"

using namespace rtcur;

TEST_CASE("sample sizes") {
  SUBCASE("d=300 r=3 upsilon=3") {
    const SampleSizes s = sample_sizes({300, 300, 300}, {3, 3, 3}, 3.0, Strategy::Fiber);
    CHECK(s.rows == std::vector<std::size_t>{52, 52, 52});
    const auto j = static_cast<std::size_t>(std::ceil(9.0 * std::log(90000.0)));
    CHECK(s.cols == std::vector<std::size_t>{j, j, j});
  }
  SUBCASE("huge upsilon clamps to the dimension") {
    const SampleSizes s = sample_sizes({5, 6, 7}, {2, 2, 2}, 1e6, Strategy::Fiber);
    CHECK(s.rows == std::vector<std::size_t>{5, 6, 7});
    CHECK(s.cols == std::vector<std::size_t>{42, 35, 30});
  }
  SUBCASE("tiny upsilon clamps to the rank") {
    const SampleSizes s = sample_sizes({50, 50}, {4, 3}, 1e-6, Strategy::Fiber);
    CHECK(s.rows == std::vector<std::size_t>{4, 3});
    CHECK(s.cols == std::vector<std::size_t>{4, 3});
  }
  SUBCASE("Chidori columns are products of the other row counts") {
    // 6 rows per mode: ceil(u * 2 * ln 40) = 6 for u = 0.8
    const SampleSizes s = sample_sizes({40, 40, 40}, {2, 2, 2}, 0.8, Strategy::Chidori);
    CHECK(s.rows == std::vector<std::size_t>{6, 6, 6});
    CHECK(s.cols == std::vector<std::size_t>{36, 36, 36});
  }
}

TEST_CASE("Chidori columns") {
  CHECK(chidori_columns({{0}, {1}}, 1, {3, 3}) == std::vector<std::size_t>{1});
  CHECK(chidori_columns({{0}, {0, 2}, {1}}, 1, {3, 3, 3}) == std::vector<std::size_t>{3, 5});
  const auto all = chidori_columns({{0, 1}, {0, 1, 2}, {0, 1, 2, 3}}, 2, {2, 3, 4});
  CHECK(all.size() == 8);
  for (std::size_t c = 0; c < 8; ++c) CHECK(all[c] == c);
}

TEST_CASE("property: Chidori blocks of X are unfoldings of the core") {
  testing::Gen g(31);
  for (int trial = 0; trial < 30; ++trial) {
    const Dims dims = g.dims(4, 6);
    const DenseTensor x = g.tensor(dims);
    IndexSets rows;
    for (auto d : dims) rows.push_back(g.subset(d, g.size(1, d)));
    const DenseTensor core = subtensor(x, rows);
    for (int k = 1; k <= static_cast<int>(dims.size()); ++k) {
      const auto cols = chidori_columns(rows, k, dims);
      const Matrix c = unfolding_columns(x, k, cols);
      Matrix u(rows[k - 1].size(), c.cols());
      for (std::size_t i = 0; i < rows[k - 1].size(); ++i) u.row(i) = c.row(rows[k - 1][i]);
      CHECK(u == unfold(core, k));
    }
  }
}

TEST_CASE("draws are sorted, unique, in range and reproducible") {
  const Dims dims{30, 20, 25};
  for (Strategy s : {Strategy::Fiber, Strategy::Chidori}) {
    SamplingConfig cfg{2.0, {2, 3, 2}, s, false, 99};
    const SampleIndices a = draw_indices(cfg, dims, 4);
    CHECK_NOTHROW(validate(a, dims));
    CHECK(a == draw_indices(cfg, dims, 4));
    CHECK_FALSE(a == draw_indices(cfg, dims, 5));
    const SampleSizes sz = sample_sizes(dims, cfg.ranks, cfg.upsilon, s);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(a.rows[i].size() == sz.rows[i]);
      CHECK(a.cols[i].size() == sz.cols[i]);
      CHECK(std::is_sorted(a.rows[i].begin(), a.rows[i].end()));
    }
    if (s == Strategy::Chidori) {
      for (int k = 1; k <= 3; ++k) CHECK(a.cols[k - 1] == chidori_columns(a.rows, k, dims));
    }
  }
}

TEST_CASE("full-size draws take every index") {
  SamplingConfig cfg{1e6, {1, 1}, Strategy::Fiber, false, 1};
  const SampleIndices a = draw_indices(cfg, {4, 3});
  CHECK(a.rows[0] == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(a.rows[1] == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("inclusion frequencies are uniform") {
  // 10000 draws of 4 out of 10: every count within 3 standard errors.
  const std::size_t d = 10, s = 4, draws = 10000;
  std::vector<std::size_t> hits(d, 0);
  for (std::size_t t = 0; t < draws; ++t) {
    for (auto i : sample_without_replacement(d, s, derive_seed(2024, t))) ++hits[i];
  }
  const double p = static_cast<double>(s) / d;
  const double se = std::sqrt(p * (1 - p) / draws);
  for (auto h : hits) CHECK(std::abs(static_cast<double>(h) / draws - p) <= 3 * se);
}

TEST_CASE("validation") {
  const Dims dims{4, 4};
  SampleIndices ok{{{0, 1}, {2, 3}}, {{0, 1}, {1, 3}}, Strategy::Fiber};
  CHECK_NOTHROW(validate(ok, dims));
  SampleIndices unsorted = ok;
  unsorted.rows[0] = {1, 0};
  CHECK_THROWS_AS(validate(unsorted, dims), IndexError);
  SampleIndices dup = ok;
  dup.cols[1] = {2, 2};
  CHECK_THROWS_AS(validate(dup, dims), IndexError);
  SampleIndices range = ok;
  range.cols[0] = {4};
  CHECK_THROWS_AS(validate(range, dims), IndexError);
  SampleIndices chidori = ok;
  chidori.strategy = Strategy::Chidori;
  CHECK_THROWS_AS(validate(chidori, dims), IndexError);
  chidori.cols = {chidori_columns(chidori.rows, 1, dims), chidori_columns(chidori.rows, 2, dims)};
  CHECK_NOTHROW(validate(chidori, dims));
  CHECK_THROWS_AS(sample_without_replacement(3, 4, 0), ConfigError);
}

TEST_CASE("strategy names") {
  CHECK(parse_strategy(to_string(Strategy::Chidori)) == Strategy::Chidori);
  CHECK(parse_strategy(to_string(Strategy::Fiber)) == Strategy::Fiber);
  CHECK_THROWS_AS(parse_strategy("grid"), ConfigError);
}

TEST_CASE("derived seeds differ across coordinates") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 20; ++a) {
    for (std::uint64_t b = 0; b < 20; ++b) seen.insert(derive_seed(7, a, b));
  }
  CHECK(seen.size() == 400);
  CHECK(derive_seed(7, 1, 2) == derive_seed(7, 1, 2));
}
