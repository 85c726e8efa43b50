#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "mg/rng.hpp"

using namespace mg;

TEST_CASE("same seed reproduces the exact stream") {
    Rng a(12345), b(12345);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derived sample seeds are distinct and stable") {
    CHECK(derive_seed(42, 0) == derive_seed(42, 0));
    std::vector<std::uint64_t> seen;
    for (int i = 0; i < 200; ++i) seen.push_back(derive_seed(42, i));
    for (std::size_t i = 0; i < seen.size(); ++i)
        for (std::size_t j = i + 1; j < seen.size(); ++j) CHECK(seen[i] != seen[j]);
    CHECK(derive_seed(42, 1) != derive_seed(43, 1));
}

TEST_CASE("uniform01 moments") {
    Rng rng(7);
    const int n = 1000000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.uniform01();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean - 0.5) < 0.002);
    CHECK(std::abs(sum_sq / n - mean * mean - 1.0 / 12.0) < 0.002);
}

TEST_CASE("below(n) is in range and roughly uniform") {
    Rng rng(11);
    const int n = 100000;
    std::vector<int> counts(4, 0);
    for (int i = 0; i < n; ++i) {
        const auto x = rng.below(4);
        REQUIRE(x < 4);
        ++counts[x];
    }
    for (int c : counts) CHECK(std::abs(c / static_cast<double>(n) - 0.25) < 0.01);
}

TEST_CASE("normal moments") {
    Rng rng(3);
    const int n = 1000000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean) < 0.005);
    CHECK(std::abs(sum_sq / n - mean * mean - 1.0) < 0.01);
}
