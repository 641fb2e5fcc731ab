#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"

using namespace rarerules;
using namespace testsupport;

namespace {

PlantSpec two_attr_spec(std::size_t n, double base, std::uint64_t seed) {
  PlantSpec spec;
  spec.schema.class_column = "y";
  spec.schema.positive_label = "1";
  spec.schema.negative_label = "0";
  spec.schema.attributes = {{"a", {"u", "v", "w"}}, {"b", {"u", "v", "w"}}};
  spec.n = n;
  spec.base_positive_rate = base;
  spec.noise_seed = seed;
  return spec;
}

}  // namespace

TEST_CASE("without planted patterns the positive rate tracks the base rate") {
  auto spec = two_attr_spec(20000, 0.05, 1234);
  const auto [ts, truth] = generate(spec);
  const double rate = static_cast<double>(ts.n_pos) / static_cast<double>(ts.n);
  const double sigma = std::sqrt(0.05 * 0.95 / 20000.0);
  CHECK(std::abs(rate - 0.05) < 3.0 * sigma);
  CHECK(truth.planted.empty());
  CHECK(truth.n_pos == ts.n_pos);
}

TEST_CASE("a planted pattern realizes its target relative risk") {
  auto spec = two_attr_spec(50000, 0.02, 42);
  spec.marginals = {{0.25, 0.375, 0.375}, {0.25, 0.375, 0.375}};
  spec.planted = {{Itemset({{0, 0}, {1, 0}}), 10.0}};
  const auto [ts, truth] = generate(spec);
  REQUIRE(truth.planted.size() == 1);
  const auto& rep = truth.planted[0];
  CHECK(rep.match_count > 0);
  CHECK(rep.realized_rr >= 8.0);
  CHECK(rep.realized_rr <= 12.5);
  CHECK(rep.elevated_rate < 1.0);
}

TEST_CASE("generation is deterministic given the seed") {
  auto spec = two_attr_spec(5000, 0.03, 777);
  spec.planted = {{Itemset({{0, 0}}), 4.0}};
  const auto [ts1, t1] = generate(spec);
  const auto [ts2, t2] = generate(spec);
  CHECK(fingerprint(ts1) == fingerprint(ts2));
  CHECK(t1.n_pos == t2.n_pos);
  CHECK(t1.planted[0].match_pos_count == t2.planted[0].match_pos_count);

  spec.noise_seed = 778;
  const auto [ts3, t3] = generate(spec);
  CHECK(fingerprint(ts1) != fingerprint(ts3));
}

TEST_CASE("ground-truth RRs equal the stats module on the emitted dataset") {
  const auto spec = recovery_spec(20000, 4242);
  const auto [ts, truth] = generate(spec);
  for (const auto& rep : truth.planted) {
    const auto counted = count_pass(ts, {rep.items});
    REQUIRE(counted.size() == 1);
    CHECK(counted[0].supp_count == rep.match_count);
    CHECK(counted[0].conf_count == rep.match_pos_count);
    const auto m = metrics(counted[0], ts.n_pos, ts.n_neg);
    CHECK(m.relative_risk == rep.realized_rr);  // bit-identical on equal counts
  }
}

TEST_CASE("overlapping planted patterns still hit their targets") {
  PlantSpec spec;
  spec.schema.class_column = "y";
  spec.schema.positive_label = "1";
  spec.schema.negative_label = "0";
  spec.schema.attributes = {
      {"a", {"u", "v", "w"}}, {"b", {"u", "v", "w"}}, {"c", {"u", "v", "w"}}};
  spec.n = 30000;
  spec.base_positive_rate = 0.03;
  spec.noise_seed = 31415;
  spec.planted = {{Itemset({{0, 0}, {1, 0}}), 5.0},
                  {Itemset({{0, 0}, {2, 0}}), 8.0}};  // share attribute a
  const auto [ts, truth] = generate(spec);
  for (const auto& rep : truth.planted) {
    CHECK(std::abs(rep.realized_rr - rep.target_rr) / rep.target_rr < 0.2);
  }
}

TEST_CASE("infeasible targets are rejected") {
  auto spec = two_attr_spec(1000, 0.3, 1);
  spec.planted = {{Itemset({{0, 0}}), 10.0}};  // would need P(Y|match) = 3
  CHECK_THROWS_WITH(generate(spec), Catch::Matchers::ContainsSubstring("infeasible"));
}

TEST_CASE("plant specs are validated") {
  auto spec = two_attr_spec(1000, 0.02, 1);
  spec.base_positive_rate = 0.6;
  CHECK_THROWS_AS(generate(spec), DataError);

  spec = two_attr_spec(1000, 0.02, 1);
  spec.planted = {{Itemset({{0, 0}}), 0.9}};
  CHECK_THROWS_AS(generate(spec), DataError);

  spec = two_attr_spec(1000, 0.02, 1);
  spec.marginals = {{0.5, 0.5}, {0.3, 0.3, 0.4}};  // arity mismatch on attribute a
  CHECK_THROWS_AS(generate(spec), DataError);

  spec = two_attr_spec(1000, 0.02, 1);
  spec.marginals = {{0.5, 0.3, 0.3}, {0.3, 0.3, 0.4}};  // does not sum to 1
  CHECK_THROWS_AS(generate(spec), DataError);
}
