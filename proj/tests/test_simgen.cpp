#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "ewad/baselines/baselines.hpp"
#include "ewad/common/error.hpp"
#include "ewad/common/rng.hpp"
#include "ewad/core/types.hpp"
#include "ewad/simgen/simgen.hpp"

using namespace ewad;

TEST_SUITE_BEGIN("simgen");

TEST_CASE("gen_rate_matrix: shape, positivity, exact grand mean, rank") {
  Rng rng = make_rng(12);
  const RateMatrix rates = gen_rate_matrix(40, 30, 3, 7.5, rng);
  REQUIRE(rates.rows() == 40);
  REQUIRE(rates.cols() == 30);
  CHECK(rates.values.minCoeff() >= 0.0);
  CHECK(rates.values.mean() == doctest::Approx(7.5).epsilon(1e-12));
  CHECK(numerical_rank(rates.values) == 3);
}

TEST_CASE("gen_observation: cell statistics match the probabilities") {
  Rng rng = make_rng(77);
  const RateMatrix rates = gen_rate_matrix(120, 120, 2, 5.0, rng);
  auto model = make_anomaly_model("poisson-thinned");
  const std::vector<double> alpha = {0.2};
  const ObservationDraw draw =
      gen_observation(rates, 0.7, 0.1, alpha, *model, rng);

  validate_instance(draw.obs, &rates, &draw.mask);
  const double total = 120.0 * 120.0;
  const double fill = static_cast<double>(draw.obs.size()) / total;
  CHECK(std::abs(fill - 0.7) <= 5.0 * std::sqrt(0.7 * 0.3 / total));

  const double anom_share = static_cast<double>(draw.mask.cells.size()) /
                            static_cast<double>(draw.obs.size());
  CHECK(std::abs(anom_share - 0.1) <=
        5.0 * std::sqrt(0.1 * 0.9 / static_cast<double>(draw.obs.size())));

  // Normal entries average to the local rate; anomalous ones to alpha * rate.
  double normal_sum = 0.0, normal_rate = 0.0;
  double anom_sum = 0.0, anom_rate = 0.0;
  for (const Entry& e : draw.obs.entries) {
    if (draw.mask.contains(e.row, e.col)) {
      anom_sum += static_cast<double>(e.count);
      anom_rate += rates.values(e.row, e.col);
    } else {
      normal_sum += static_cast<double>(e.count);
      normal_rate += rates.values(e.row, e.col);
    }
  }
  CHECK(normal_sum / normal_rate == doctest::Approx(1.0).epsilon(0.05));
  CHECK(anom_sum / anom_rate == doctest::Approx(0.2).epsilon(0.2));
}

TEST_CASE("gen_instance is deterministic in the seed") {
  GenerationSpec spec;
  spec.rows = 25;
  spec.cols = 35;
  spec.rank = 2;
  spec.mean_level = 4.0;
  spec.observe_prob = 0.8;
  spec.anom_prob = 0.15;
  spec.alpha = {0.4};
  spec.model = "exp-onset";
  spec.seed = 909;

  const Instance a = gen_instance(spec);
  const Instance b = gen_instance(spec);
  REQUIRE(a.obs.entries.size() == b.obs.entries.size());
  for (std::size_t i = 0; i < a.obs.entries.size(); ++i) {
    CHECK(a.obs.entries[i].row == b.obs.entries[i].row);
    CHECK(a.obs.entries[i].col == b.obs.entries[i].col);
    CHECK(a.obs.entries[i].count == b.obs.entries[i].count);
  }
  CHECK(a.rates.values == b.rates.values);
  CHECK(a.mask.cells == b.mask.cells);
  CHECK(a.params.p_anom == spec.anom_prob);
  CHECK(a.params.alpha == spec.alpha);
  validate_instance(a.obs, &a.rates, &a.mask, &a.params);

  spec.seed = 910;
  const Instance c = gen_instance(spec);
  CHECK(a.rates.values != c.rates.values);
}

TEST_CASE("gen_ensemble: member seeds are master ^ index") {
  EnsembleRanges ranges;
  ranges.rows = 20;
  ranges.cols = 20;
  const std::vector<Instance> ensemble = gen_ensemble(5, ranges, 4242);
  REQUIRE(ensemble.size() == 5);
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const Instance member =
        gen_ensemble_member(ranges, 4242ull ^ static_cast<std::uint64_t>(i));
    CHECK(ensemble[i].rates.values == member.rates.values);
    CHECK(ensemble[i].mask.cells == member.mask.cells);
    // Sampled parameters respect the ranges.
    CHECK(ensemble[i].spec.rank >= ranges.rank_range.first);
    CHECK(ensemble[i].spec.rank <= ranges.rank_range.second);
    CHECK(ensemble[i].spec.mean_level >= ranges.mean_range.first);
    CHECK(ensemble[i].spec.mean_level <= ranges.mean_range.second);
    CHECK(ensemble[i].spec.observe_prob >= ranges.observe_range.first);
    CHECK(ensemble[i].spec.observe_prob <= ranges.observe_range.second);
    CHECK(ensemble[i].spec.anom_prob >= ranges.anom_range.first);
    CHECK(ensemble[i].spec.anom_prob <= ranges.anom_range.second);
    CHECK(ensemble[i].spec.model == ranges.model);
  }
}

TEST_CASE("thin_perturb: keeps the pattern, thins only flagged entries") {
  Rng rng = make_rng(55);
  const RateMatrix base = gen_rate_matrix(60, 60, 2, 6.0, rng);
  GenerationSpec spec;
  spec.rows = 60;
  spec.cols = 60;
  spec.rank = 2;
  spec.observe_prob = 0.75;
  spec.seed = 3;
  const Instance pattern_source = gen_instance(spec);

  const ObservationDraw draw =
      thin_perturb(base, pattern_source.obs, 0.2, 0.3, rng);
  REQUIRE(draw.obs.entries.size() == pattern_source.obs.entries.size());
  for (std::size_t i = 0; i < draw.obs.entries.size(); ++i) {
    CHECK(draw.obs.entries[i].row == pattern_source.obs.entries[i].row);
    CHECK(draw.obs.entries[i].col == pattern_source.obs.entries[i].col);
    CHECK(draw.obs.entries[i].count >= 0);
  }
  for (const auto& [r, c] : draw.mask.cells) {
    bool in_pattern = false;
    for (const Entry& e : pattern_source.obs.entries) {
      in_pattern |= (e.row == r && e.col == c);
    }
    CHECK(in_pattern);
  }
  // Thinned entries are depressed on average.
  double anom_sum = 0.0, anom_rate = 0.0;
  for (const Entry& e : draw.obs.entries) {
    if (draw.mask.contains(e.row, e.col)) {
      anom_sum += static_cast<double>(e.count);
      anom_rate += base.values(e.row, e.col);
    }
  }
  CHECK(anom_sum / anom_rate == doctest::Approx(0.3).epsilon(0.25));
}

TEST_CASE("lower-bound family: structure of the hard instances") {
  CHECK(LowerBoundSpec::kGamma ==
        doctest::Approx(1.0 / (2.0 * std::exp(1.0))).epsilon(1e-15));
  CHECK(LowerBoundSpec::kAnomProb == 0.5);

  LowerBoundSpec spec;
  spec.n = 50;
  spec.c_star = 0.4;
  std::vector<std::uint8_t> bits(25, 0);
  bits[3] = 1;
  bits[10] = 1;
  spec.bits = bits;

  Rng rng = make_rng(31);
  const LowerBoundInstance inst = gen_lowerbound_instance(spec, rng);

  // Rank-1 rate matrix with row pairs (1, 1 - c*/sqrt(n)) arranged by bits.
  const double low = 1.0 - 0.4 / std::sqrt(50.0);
  REQUIRE(inst.rates.rows() == 50);
  for (int i = 0; i < 25; ++i) {
    const double top = bits[static_cast<std::size_t>(i)] == 0 ? 1.0 : low;
    const double bottom = bits[static_cast<std::size_t>(i)] == 0 ? low : 1.0;
    for (int j = 0; j < 50; ++j) {
      CHECK(inst.rates.values(2 * i, j) == top);
      CHECK(inst.rates.values(2 * i + 1, j) == bottom);
    }
  }
  CHECK(numerical_rank(inst.rates.values) == 1);

  // Fully observed; anomalous cells report zero counts.
  CHECK(inst.obs.entries.size() == 2500);
  for (const Entry& e : inst.obs.entries) {
    if (inst.mask.contains(e.row, e.col)) CHECK(e.count == 0);
  }
  // Roughly half the cells are anomalous.
  const double share = static_cast<double>(inst.mask.cells.size()) / 2500.0;
  CHECK(std::abs(share - 0.5) <= 5.0 * std::sqrt(0.25 / 2500.0));

  CHECK(inst.params.p_anom == 0.5);
  CHECK(inst.params.alpha.empty());
  CHECK(inst.bits == bits);
}

TEST_CASE("lower-bound spec validation") {
  LowerBoundSpec spec;
  Rng rng = make_rng(1);
  spec.n = 7;
  CHECK_THROWS_AS(validate_lowerbound_spec(spec), ValidationError);
  spec.n = 10;
  spec.c_star = 0.0;
  CHECK_THROWS_AS(validate_lowerbound_spec(spec), ValidationError);
  spec.c_star = 0.6;
  CHECK_THROWS_AS(validate_lowerbound_spec(spec), ValidationError);
  spec.c_star = 0.4;
  spec.bits = std::vector<std::uint8_t>(4, 0);  // needs length 5
  CHECK_THROWS_AS(gen_lowerbound_instance(spec, rng), ValidationError);
  spec.bits = std::vector<std::uint8_t>(5, 0);
  CHECK_NOTHROW(gen_lowerbound_instance(spec, rng));
}

TEST_CASE("generation spec validation") {
  GenerationSpec spec;
  spec.rows = 0;
  CHECK_THROWS_AS(validate_generation_spec(spec), ValidationError);
  spec.rows = 10;
  spec.rank = 11;
  spec.cols = 10;
  CHECK_THROWS_AS(validate_generation_spec(spec), ValidationError);
  spec.rank = 2;
  spec.observe_prob = 0.0;
  CHECK_THROWS_AS(validate_generation_spec(spec), ValidationError);
  spec.observe_prob = 0.5;
  spec.anom_prob = 1.5;
  CHECK_THROWS_AS(validate_generation_spec(spec), ValidationError);
  spec.anom_prob = 0.1;
  // The model id is resolved (and rejected) when the instance is realized.
  spec.model = "bogus";
  CHECK_NOTHROW(validate_generation_spec(spec));
  CHECK_THROWS_AS(gen_instance(spec), ValidationError);
}

TEST_SUITE_END();
