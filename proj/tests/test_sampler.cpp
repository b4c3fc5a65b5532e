#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "skewrec/sampler.hpp"
#include "test_support.hpp"

using namespace skewrec;

TEST_CASE("forced triple on a one-positive user") {
    auto data = build_interactions({{"u", "a"}, {"u2", "b"}, {"u2", "c"}});
    // user u: positives {a}; items {a, b, c}
    TripleSampler s(data, 5);
    for (int k = 0; k < 200; ++k) {
        const auto t = s.sample();
        CHECK(data.has(t.u, t.i));
        CHECK(!data.has(t.u, t.j));
    }
}

TEST_CASE("negative frequencies are uniform on a 2-negative instance") {
    Interactions data = build_interactions({{"u", "p"}, {"v", "n1"}, {"v", "n2"}});
    const auto u = data.user_ids.at("u");
    TripleSampler s(data, 17);
    int first = 0, draws = 0;
    const auto n1 = data.item_ids.at("n1");
    for (int k = 0; k < 100000; ++k) {
        const auto t = s.sample();
        if (t.u != u) continue;
        ++draws;
        if (t.j == n1) ++first;
    }
    // binomial(draws, 0.5)
    const double sd = std::sqrt(draws * 0.25);
    CHECK(std::abs(first - draws * 0.5) < 3.0 * sd);
}

TEST_CASE("all-positive single user errors") {
    const auto data = build_interactions({{"u", "a"}, {"u", "b"}});
    CHECK_THROWS_AS(TripleSampler(data, 1), std::runtime_error);
}

TEST_CASE("saturated users are skipped when others are usable") {
    // u holds every item; v has a negative
    const auto data = build_interactions({{"u", "a"}, {"u", "b"}, {"u", "c"}, {"v", "a"}});
    TripleSampler s(data, 9);
    const auto v = data.user_ids.at("v");
    for (int k = 0; k < 100; ++k) CHECK(s.sample().u == v);
}

TEST_CASE("same seed gives the same stream") {
    const auto data = build_interactions(
        {{"u", "a"}, {"u", "b"}, {"v", "b"}, {"v", "c"}, {"w", "a"}, {"w", "c"}});
    TripleSampler s1(data, 77);
    TripleSampler s2(data, 77);
    TripleSampler s3(data, 78);
    bool all_same = true, any_diff = false;
    for (int k = 0; k < 500; ++k) {
        const auto a = s1.sample();
        const auto b = s2.sample();
        const auto c = s3.sample();
        all_same = all_same && a.u == b.u && a.i == b.i && a.j == b.j;
        any_diff = any_diff || a.u != c.u || a.i != c.i || a.j != c.j;
    }
    CHECK(all_same);
    CHECK(any_diff);
}

TEST_CASE("user marginal is uniform over eligible users") {
    // 5 users with different positive-set sizes; u is drawn uniformly anyway
    std::vector<std::pair<std::string, std::string>> pairs;
    for (int u = 0; u < 5; ++u)
        for (int i = 0; i <= u; ++i)
            pairs.emplace_back("u" + std::to_string(u), "i" + std::to_string(i));
    for (int i = 0; i < 8; ++i) pairs.emplace_back("u0", "pad" + std::to_string(i));
    const auto data = build_interactions(pairs);

    TripleSampler s(data, 4242);
    const int draws = 100000;
    std::vector<int> counts(5, 0);
    for (int k = 0; k < draws; ++k) ++counts[s.sample().u];
    double chi2 = 0.0;
    const double expect = draws / 5.0;
    for (int c : counts) chi2 += (c - expect) * (c - expect) / expect;
    // chi-square df=4 critical value at 1%
    CHECK(chi2 < 13.2767);
}

TEST_CASE("every draw satisfies the triple constraints") {
    const auto raw = testsup::latent_ratings(20, 30, 4, 10, 3);
    const auto data = build_interactions(binarize(raw, BinarizeMode::rating, 3.5));
    TripleSampler s(data, 1);
    for (int k = 0; k < 20000; ++k) {
        const auto t = s.sample();
        CHECK(data.has(t.u, t.i));
        CHECK(!data.has(t.u, t.j));
        CHECK(!data.pos[t.u].empty());
    }
}

TEST_CASE("epoch_size is the positive-pair total") {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (int u = 0; u < 3; ++u)
        for (int i = 0; i < 2; ++i)
            pairs.emplace_back("u" + std::to_string(u), "i" + std::to_string(u * 2 + i));
    const auto data = build_interactions(pairs);
    CHECK(TripleSampler::epoch_size(data) == 6);

    // independent sum
    std::int64_t total = 0;
    for (const auto& p : data.pos) total += static_cast<std::int64_t>(p.size());
    CHECK(TripleSampler::epoch_size(data) == total);

    const auto empty = data.empty_copy();
    CHECK_THROWS_AS(TripleSampler::epoch_size(empty), std::runtime_error);
}
