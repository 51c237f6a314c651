#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "phlb/rng.hpp"

using phlb::Philox;

TEST_CASE("philox known answers") {
    // Reference vectors for philox4x32-10.
    auto r0 = Philox::block({0u, 0u, 0u, 0u}, {0u, 0u});
    CHECK(r0[0] == 0x6627e8d5u);
    CHECK(r0[1] == 0xe169c58du);
    CHECK(r0[2] == 0xbc57ac4cu);
    CHECK(r0[3] == 0x9b00dbd8u);

    auto r1 = Philox::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                            {0xffffffffu, 0xffffffffu});
    CHECK(r1[0] == 0x408f276du);
    CHECK(r1[1] == 0x41c83b0eu);
    CHECK(r1[2] == 0xa20bc7c6u);
    CHECK(r1[3] == 0x6d5451fdu);

    auto r2 = Philox::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                            {0xa4093822u, 0x299f31d0u});
    CHECK(r2[0] == 0xd16cfe09u);
    CHECK(r2[1] == 0x94fdccebu);
    CHECK(r2[2] == 0x5001e420u);
    CHECK(r2[3] == 0x24126ea1u);
}

TEST_CASE("stream output matches raw blocks") {
    Philox g(0, 0);
    auto b0 = Philox::block({0u, 0u, 0u, 0u}, {0u, 0u});
    auto b1 = Philox::block({1u, 0u, 0u, 0u}, {0u, 0u});
    for (unsigned w : b0) CHECK(g.next_u32() == w);
    for (unsigned w : b1) CHECK(g.next_u32() == w);
}

TEST_CASE("seed and stream determinism") {
    Philox a(42, 3), b(42, 3), c(42, 4), d(43, 3);
    bool stream_differs = false, seed_differs = false;
    for (int i = 0; i < 64; ++i) {
        const std::uint32_t x = a.next_u32();
        CHECK(x == b.next_u32());
        stream_differs |= (x != c.next_u32());
        seed_differs |= (x != d.next_u32());
    }
    CHECK(stream_differs);
    CHECK(seed_differs);
}

TEST_CASE("uniform lies in (0,1] with the right mean and variance") {
    Philox g(7, 0);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = g.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u <= 1.0);
        sum += u;
        sumsq += u * u;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean - 0.5) < 0.005);
    CHECK(std::abs(var - 1.0 / 12.0) < 0.005);
}

TEST_CASE("exponential sampling hits its mean") {
    Philox g(11, 2);
    const int n = 200000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = g.exponential(2.0);
        REQUIRE(x >= 0.0);
        sum += x;
    }
    CHECK(std::abs(sum / n - 0.5) < 0.01);
}

TEST_CASE("below is bounded and close to uniform") {
    Philox g(13, 0);
    const std::uint32_t n = 7;
    const int draws = 70000;
    std::vector<int> counts(n, 0);
    for (int i = 0; i < draws; ++i) {
        const std::uint32_t v = g.below(n);
        REQUIRE(v < n);
        ++counts[v];
    }
    const double expected = static_cast<double>(draws) / n;
    for (std::uint32_t k = 0; k < n; ++k)
        CHECK(std::abs(counts[k] - expected) < 5.0 * std::sqrt(expected));

    for (int i = 0; i < 100; ++i) CHECK(g.below(1) == 0u);
}
