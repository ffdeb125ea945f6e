#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "adapt/preprocess.hpp"

using namespace adapt;

TEST_CASE("difference basics") {
    auto d = difference({5, 5, 5}, 1);
    CHECK(std::isnan(d[0]));
    CHECK(d[1] == 0.0);
    CHECK(d[2] == 0.0);

    d = difference({1, 3, 6}, 1);
    CHECK(d[1] == 2.0);
    CHECK(d[2] == 3.0);

    CHECK_THROWS_AS(difference({1, 2}, 2), Error);
}

TEST_CASE("difference of a prefix sum restores the tail") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> val(-5, 5);
    std::vector<double> s(50);
    for (auto& v : s) v = val(rng);
    std::vector<double> prefix(s.size());
    std::partial_sum(s.begin(), s.end(), prefix.begin());
    auto d = difference(prefix, 1);
    for (std::size_t i = 1; i < s.size(); ++i)
        CHECK(d[i] == doctest::Approx(s[i]).epsilon(1e-12));
}

TEST_CASE("smooth basics") {
    std::vector<double> s{4, 9, 16, 25};
    CHECK(smooth(s, 1) == s); // identity window

    auto m = smooth({3, 6, 9}, 3);
    CHECK(std::isnan(m[0]));
    CHECK(std::isnan(m[1]));
    CHECK(m[2] == 6.0);

    m = smooth({2, 2, 2, 2}, 2);
    CHECK(std::isnan(m[0]));
    CHECK(m[1] == 2.0);
    CHECK(m[2] == 2.0);
    CHECK(m[3] == 2.0);
}

TEST_CASE("smooth is shift-equivariant") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> val(-5, 5);
    std::vector<double> s(30), shifted(30);
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = val(rng);
        shifted[i] = s[i] + 17.5;
    }
    auto a = smooth(s, 4);
    auto b = smooth(shifted, 4);
    for (std::size_t i = 3; i < s.size(); ++i)
        CHECK(b[i] == doctest::Approx(a[i] + 17.5).epsilon(1e-12));
}

TEST_CASE("lag basics") {
    CHECK(lag({1, 2, 3}, 0).empty());

    auto cols = lag({7, 8, 9}, 1);
    REQUIRE(cols.size() == 1);
    CHECK(std::isnan(cols[0][0]));
    CHECK(cols[0][1] == 7.0);
    CHECK(cols[0][2] == 8.0);

    cols = lag({1, 2, 3, 4, 5}, 2);
    REQUIRE(cols.size() == 2);
    CHECK(std::isnan(cols[1][0]));
    CHECK(std::isnan(cols[1][1]));
    CHECK(cols[1][2] == 1.0);
    CHECK(cols[1][3] == 2.0);
    CHECK(cols[1][4] == 3.0);
}

TEST_CASE("pipeline drops the undefined prefix") {
    std::vector<double> series(9, 42.0);
    std::vector<double> times(9);
    std::iota(times.begin(), times.end(), 0.0);

    auto out = run_pipeline(series, times, {});
    CHECK(out.dropped_prefix == 8); // 1 + (3-1) + 5
    REQUIRE(out.timestamps.size() == 1);
    CHECK(out.timestamps[0] == 8.0);
    CHECK(out.value[0] == 42.0);
    CHECK(out.diff[0] == 0.0);
    CHECK(out.smooth[0] == 0.0);
    for (const auto& col : out.lags)
        CHECK(col[0] == 0.0);

    std::vector<double> eight(8, 1.0), t8(8);
    CHECK_THROWS_AS(run_pipeline(eight, t8, {}), Error);
}

TEST_CASE("pipeline output has no NaNs and suffix timestamps") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> val(0, 100);
    std::vector<double> series(40), times(40);
    for (std::size_t i = 0; i < series.size(); ++i) {
        series[i] = val(rng);
        times[i] = 0.5 * i;
    }
    for (bool independent : {false, true}) {
        PreprocessConfig cfg;
        cfg.independent_columns = independent;
        auto out = run_pipeline(series, times, cfg);
        REQUIRE(out.timestamps.size() == series.size() - out.dropped_prefix);
        for (std::size_t i = 0; i < out.timestamps.size(); ++i) {
            CHECK(out.timestamps[i] == times[i + out.dropped_prefix]);
            CHECK_FALSE(std::isnan(out.diff[i]));
            CHECK_FALSE(std::isnan(out.smooth[i]));
            for (const auto& col : out.lags)
                CHECK_FALSE(std::isnan(col[i]));
        }
    }
}
