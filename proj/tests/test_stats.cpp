#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"

using namespace rarerules;
using namespace testsupport;
using Catch::Matchers::WithinAbs;

namespace {

// RR as an exact rational over counts: conf*(n-supp) / (supp*(n_pos-conf)).
// Returns {num, den}; den == 0 with num > 0 encodes the +infinity sentinel.
struct RationalRR {
  unsigned __int128 num;
  unsigned __int128 den;
};

RationalRR rational_rr(const ClassRule& r, std::size_t n, std::size_t n_pos) {
  const unsigned __int128 a = r.conf_count;
  const unsigned __int128 s = r.supp_count;
  const unsigned __int128 c = n_pos - r.conf_count;
  return {a * (n - r.supp_count), s * c};
}

bool rr_leq(const RationalRR& x, const RationalRR& y) {
  if (x.num == 0) return true;             // RR(x) == 0
  if (y.den == 0) return true;             // RR(y) == +inf
  if (x.den == 0) return false;            // RR(x) == +inf, RR(y) finite
  return x.num * y.den <= y.num * x.den;
}

}  // namespace

TEST_CASE("metrics on balanced two-by-two counts gives RR 1") {
  // 1 matched positive, 1 matched negative, 1 unmatched positive, 1 unmatched negative
  ClassRule r{Itemset({{0, 0}}), 2, 1};
  const auto m = metrics(r, 2, 2);
  CHECK(m.relative_risk == 1.0);
  CHECK(m.tpr == 0.5);
  CHECK(m.fpr == 0.5);
  CHECK(m.confidence == 0.5);
  CHECK(m.local_support == m.tpr);
  CHECK(m.tpr + m.fnr == 1.0);
  CHECK(m.tnr + m.fpr == 1.0);
}

TEST_CASE("metrics matches a direct count on a constructed 10-row dataset") {
  // First 4 rows match the pattern (3 positive, 1 negative); among the other
  // 6 rows exactly 1 is positive.
  RawData d = make_raw(1, {2});
  d.rows = {{0}, {0}, {0}, {0}, {1}, {1}, {1}, {1}, {1}, {1}};
  d.labels = {1, 1, 1, 0, 1, 0, 0, 0, 0, 0};
  const auto rule = scan_count(d, Itemset({{0, 0}}));
  CHECK(rule.supp_count == 4);
  CHECK(rule.conf_count == 3);
  const auto m = metrics(rule, d.n_pos(), d.n() - d.n_pos());
  CHECK_THAT(m.relative_risk, WithinAbs(4.5, 1e-12));
  CHECK_THAT(m.confidence, WithinAbs(0.75, 0.0));
}

TEST_CASE("metrics returns the infinity sentinel when every positive is matched") {
  ClassRule r{Itemset({{0, 0}}), 10, 4};
  const auto m = metrics(r, 4, 16);
  CHECK(std::isinf(m.relative_risk));
  CHECK(m.relative_risk > 1e308);
}

TEST_CASE("Haldane smoothing keeps degenerate relative risks finite") {
  ClassRule r{Itemset({{0, 0}}), 10, 4};
  const auto m = metrics(r, 4, 16, RrEstimate::haldane);
  // (4.5/11) / (0.5/11) = 9
  CHECK_THAT(m.relative_risk, WithinAbs(9.0, 1e-12));
  CHECK(m.tpr == 1.0);  // rates stay raw; only the RR estimate is smoothed

  ClassRule balanced{Itemset({{0, 0}}), 2, 1};
  const auto raw = metrics(balanced, 2, 2).relative_risk;
  const auto smoothed = metrics(balanced, 2, 2, RrEstimate::haldane).relative_risk;
  CHECK(raw == 1.0);
  CHECK_THAT(smoothed, WithinAbs(1.0, 1e-12));
}

TEST_CASE("metrics rejects impossible inputs") {
  CHECK_THROWS_AS(metrics(ClassRule{Itemset({{0, 0}}), 6, 3}, 3, 3), DataError);  // supp == n
  CHECK_THROWS_AS(metrics(ClassRule{Itemset({{0, 0}}), 4, 4}, 3, 5), DataError);  // conf > n_pos
  CHECK_THROWS_AS(metrics(ClassRule{Itemset({{0, 0}}), 2, 1}, 0, 5), DataError);
}

TEST_CASE("count_test follows the margin arithmetic") {
  const auto equal = count_test(7, 7, 1);
  CHECK_FALSE(equal.reject);
  CHECK(equal.diff_count == 0);

  CHECK(count_test(10, 7, 3).reject);
  CHECK_FALSE(count_test(10, 8, 3).reject);

  CHECK_THROWS_AS(count_test(5, 7, 1), DataError);
  CHECK_THROWS_AS(count_test(7, 5, 0), DataError);
}

TEST_CASE("count_test never rejects equal counts for any margin") {
  for (std::size_t count : {0ul, 1ul, 7ul, 500ul, 123456ul})
    for (int k = 1; k <= 10; ++k) CHECK_FALSE(count_test(count, count, k).reject);
}

TEST_CASE("power statistic matches the high-precision worked example") {
  // n=100, pi(U)=0.20, pi(U')=0.15, k=3, pi1=0.25
  const double un = power_un(100, 0.20, 0.15, 3, 0.25);
  CHECK_THAT(un, WithinAbs(-10.09429229030471769991722143630647836853, 1e-9));
  CHECK(power_bound(100, 0.20, 0.15, 3, 0.25) > 1.0 - 1e-12);
}

TEST_CASE("power bound is one half when k/n hits pi1") {
  CHECK(power_un(100, 0.20, 0.15, 25, 0.25) == 0.0);
  CHECK(power_bound(100, 0.20, 0.15, 25, 0.25) == 0.5);
}

TEST_CASE("power bound grows with n when k/n stays below pi1") {
  const double b1 = power_bound(100, 0.20, 0.15, 1, 0.02);
  const double b2 = power_bound(1000, 0.20, 0.15, 1, 0.02);
  const double b3 = power_bound(10000, 0.20, 0.15, 1, 0.02);
  CHECK(b1 < b2);
  CHECK(b2 <= b3);
}

TEST_CASE("power bound preconditions") {
  CHECK_THROWS_AS(power_un(100, 0.15, 0.15, 3, 0.25), DataError);
  CHECK_THROWS_AS(power_un(100, 0.20, 0.15, 3, 0.0), DataError);
  CHECK_THROWS_AS(power_un(0, 0.20, 0.15, 3, 0.25), DataError);
}

TEST_CASE("standard normal cdf hits its anchors") {
  CHECK(std_normal_cdf(0.0) == 0.5);
  CHECK_THAT(std_normal_cdf(1.959964), WithinAbs(0.9750000009035576, 1e-9));
  const double tail = std_normal_cdf(-8.0);
  CHECK(tail < 1e-14);
  CHECK_THAT(tail / 6.220960574271784e-16, WithinAbs(1.0, 1e-10));
}

TEST_CASE("standard normal cdf is symmetric and monotone") {
  double prev = -1.0;
  for (double x = -8.0; x <= 8.0; x += 0.125) {
    const double v = std_normal_cdf(x);
    CHECK(v >= prev);
    CHECK(std::abs(std_normal_cdf(-x) - (1.0 - v)) <= 1e-12);
    prev = v;
  }
}

TEST_CASE("nested rule pairs satisfy the three ordering propositions") {
  std::mt19937_64 rng(777);
  std::size_t pairs_seen = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const RawData d = random_raw(rng, 5, 3, 300);
    MiningParams p;
    p.min_local_support = 0.02;
    p.min_conf_ratio = 1.0;
    p.max_length = std::min<std::size_t>(3, d.attr_names.size());
    const auto rs = mine(to_ts(d), p);
    const std::size_t n = rs.n;
    const std::size_t n_pos = rs.n_pos;

    for (const auto& sub : rs.rules)
      for (const auto& sup : rs.rules) {
        if (sub.antecedent.length() >= sup.antecedent.length()) continue;
        if (!sub.antecedent.is_subset_of(sup.antecedent)) continue;
        if (sub.supp_count == n || sup.supp_count == n) continue;  // RR undefined
        ++pairs_seen;

        // Inclusion inequalities on integer counts.
        REQUIRE(sup.conf_count <= sub.conf_count);
        REQUIRE(sup.neg_count() <= sub.neg_count());

        const auto rr_sub = rational_rr(sub, n, n_pos);
        const auto rr_sup = rational_rr(sup, n, n_pos);
        if (sub.neg_count() == sup.neg_count())  // Proposition 1
          REQUIRE(rr_leq(rr_sup, rr_sub));
        if (sub.supp_count == sup.supp_count) {  // Proposition 2
          REQUIRE(sub.conf_count == sup.conf_count);
          REQUIRE(sub.neg_count() == sup.neg_count());
        }
        if (sub.conf_count == sup.conf_count)  // Proposition 3
          REQUIRE(rr_leq(rr_sub, rr_sup));
      }
  }
  CHECK(pairs_seen > 100);
}
