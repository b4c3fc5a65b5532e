#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "doctest.h"
#include "skewrec/embed.hpp"
#include "test_support.hpp"

using namespace skewrec;
using testsup::TempDir;

TEST_CASE("init stays inside the +-0.5/sqrt(d) bound and is seed-deterministic") {
    const auto m = init_model(10, 12, 4, 7);
    for (double v : m.user_vecs) {
        CHECK(v >= -0.25);
        CHECK(v <= 0.25);
    }
    for (double v : m.item_vecs) {
        CHECK(v >= -0.25);
        CHECK(v <= 0.25);
    }
    const auto m2 = init_model(10, 12, 4, 7);
    CHECK(m.user_vecs == m2.user_vecs);
    CHECK(m.item_vecs == m2.item_vecs);
    const auto m3 = init_model(10, 12, 4, 8);
    CHECK(m.user_vecs != m3.user_vecs);
}

TEST_CASE("init entries average to zero") {
    // 1e6 entries from U[-a, a]: mean has sd a/sqrt(3)/1000
    const auto m = init_model(1000, 1000, 500, 123);
    double sum = 0.0;
    for (double v : m.user_vecs) sum += v;
    for (double v : m.item_vecs) sum += v;
    const double n = 2.0 * 1000 * 500;
    const double a = 0.5 / std::sqrt(500.0);
    const double se = a / std::sqrt(3.0) / std::sqrt(n);
    CHECK(std::abs(sum / n) < 3.0 * se);
}

TEST_CASE("init rejects empty axes") {
    CHECK_THROWS_AS(init_model(0, 5, 4, 1), std::invalid_argument);
    CHECK_THROWS_AS(init_model(5, 0, 4, 1), std::invalid_argument);
    CHECK_THROWS_AS(init_model(5, 5, 0, 1), std::invalid_argument);
}

TEST_CASE("score is the plain dot product") {
    EmbeddingModel m;
    m.d = 2;
    m.n_users = 1;
    m.n_items = 2;
    m.user_vecs = {1.0, 2.0};
    m.item_vecs = {3.0, 4.0, 0.0, 0.0};
    m.user_keys = {"u"};
    m.item_keys = {"a", "b"};
    CHECK(score(m, 0, 0) == 11.0);
    CHECK(score(m, 0, 1) == 0.0);
    CHECK_THROWS_AS(score(m, 1, 0), std::out_of_range);
    CHECK_THROWS_AS(score(m, 0, 2), std::out_of_range);
}

TEST_CASE("score_pair antisymmetry and agreement with two dot products") {
    const auto m = init_model(6, 9, 5, 21);
    std::mt19937_64 g(3);
    for (int k = 0; k < 50; ++k) {
        const auto u = static_cast<std::uint32_t>(g() % m.n_users);
        const auto i = static_cast<std::uint32_t>(g() % m.n_items);
        const auto j = static_cast<std::uint32_t>(g() % m.n_items);
        CHECK(score_pair(m, u, i, j) == score(m, u, i) - score(m, u, j));
        CHECK(score_pair(m, u, i, j) == -score_pair(m, u, j, i));
        CHECK(score_pair(m, u, i, i) == 0.0);
    }
}

TEST_CASE("score is bilinear in the user vector") {
    auto m = init_model(2, 4, 6, 5);
    const double base = score(m, 0, 2);
    for (double& v : m.user_row(0)) v *= 3.0;
    const double scaled = score(m, 0, 2);
    CHECK(std::abs(scaled - 3.0 * base) <= 1e-12 * std::max(1.0, std::abs(scaled)));
}

TEST_CASE("top_n basic ordering and exclusion") {
    EmbeddingModel m;
    m.d = 1;
    m.n_users = 1;
    m.n_items = 3;
    m.user_vecs = {1.0};
    m.item_vecs = {0.5, 0.9, 0.1};
    m.user_keys = {"u"};
    m.item_keys = {"a", "b", "c"};
    CHECK(top_n(m, 0, 2, {}) == std::vector<std::uint32_t>{1, 0});
    const std::vector<std::uint32_t> all{0, 1, 2};
    CHECK(top_n(m, 0, 2, all).empty());
    const std::vector<std::uint32_t> exc{1};
    CHECK(top_n(m, 0, 5, exc) == std::vector<std::uint32_t>{0, 2});
}

TEST_CASE("top_n ties break by ascending item ID") {
    EmbeddingModel m;
    m.d = 1;
    m.n_users = 1;
    m.n_items = 4;
    m.user_vecs = {0.0};  // every score is 0
    m.item_vecs = {0.3, 0.1, 0.2, 0.4};
    m.user_keys = {"u"};
    m.item_keys = {"a", "b", "c", "d"};
    CHECK(top_n(m, 0, 3, {}) == std::vector<std::uint32_t>{0, 1, 2});
}

TEST_CASE("top_n matches a full-sort oracle on 1000 items") {
    const auto m = init_model(3, 1000, 8, 99);
    for (std::uint32_t u = 0; u < m.n_users; ++u) {
        std::vector<std::pair<double, std::uint32_t>> all;
        for (std::uint32_t i = 0; i < m.n_items; ++i) all.emplace_back(score(m, u, i), i);
        std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        std::vector<std::uint32_t> expect;
        for (int r = 0; r < 10; ++r) expect.push_back(all[r].second);
        CHECK(top_n(m, u, 10, {}) == expect);
    }
}

TEST_CASE("save/load round-trips bit-exactly") {
    TempDir tmp;
    auto m = init_model(7, 11, 5, 31);
    m.user_keys[3] = "weird key with spaces";
    m.item_keys[0] = "";
    save_model(m, tmp.file("m.bin"));
    const auto back = load_model(tmp.file("m.bin"));
    CHECK(back.d == m.d);
    CHECK(back.n_users == m.n_users);
    CHECK(back.n_items == m.n_items);
    CHECK(back.user_vecs == m.user_vecs);
    CHECK(back.item_vecs == m.item_vecs);
    CHECK(back.user_keys == m.user_keys);
    CHECK(back.item_keys == m.item_keys);
}

TEST_CASE("load rejects corrupted magic") {
    TempDir tmp;
    const auto m = init_model(2, 2, 2, 1);
    save_model(m, tmp.file("m.bin"));
    auto bytes = testsup::read_file(tmp.file("m.bin"));
    bytes[0] = 'X';
    testsup::write_file(tmp.file("bad.bin"), bytes);
    CHECK_THROWS_WITH_AS(load_model(tmp.file("bad.bin")), doctest::Contains("magic"),
                         std::runtime_error);
}

TEST_CASE("load rejects header/payload size mismatch") {
    TempDir tmp;
    const auto m = init_model(3, 3, 4, 1);
    save_model(m, tmp.file("m.bin"));
    auto bytes = testsup::read_file(tmp.file("m.bin"));

    // truncated payload
    testsup::write_file(tmp.file("short.bin"), bytes.substr(0, bytes.size() - 9));
    CHECK_THROWS_WITH_AS(load_model(tmp.file("short.bin")), doctest::Contains("truncated"),
                         std::runtime_error);

    // extra trailing bytes contradict the header's d
    testsup::write_file(tmp.file("long.bin"), bytes + std::string(16, '\0'));
    CHECK_THROWS_WITH_AS(load_model(tmp.file("long.bin")), doctest::Contains("longer"),
                         std::runtime_error);
}

TEST_CASE("load rejects missing files") {
    CHECK_THROWS_AS(load_model("/nonexistent/model.bin"), std::runtime_error);
}
