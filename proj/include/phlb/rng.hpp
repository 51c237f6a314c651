#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace phlb {

// Philox4x32-10 counter-based generator. Each (seed, stream) pair yields an
// independent sequence; streams never overlap because the stream id occupies
// the high counter words. Replications map to streams, which keeps parallel
// runs reproducible from a single master seed.
class Philox {
public:
    explicit Philox(std::uint64_t seed, std::uint64_t stream = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          hi_{static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

    std::uint32_t next_u32() {
        if (have_ == 0) {
            buf_ = block({static_cast<std::uint32_t>(n_), static_cast<std::uint32_t>(n_ >> 32),
                          hi_[0], hi_[1]},
                         key_);
            ++n_;
            have_ = 4;
        }
        return buf_[4 - have_--];
    }

    std::uint64_t next_u64() {
        const std::uint64_t lo = next_u32();
        const std::uint64_t hi = next_u32();
        return lo | (hi << 32);
    }

    // uniform on (0, 1]; never returns 0 so -log is always finite
    double uniform() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    // unbiased integer in [0, n)
    std::uint32_t below(std::uint32_t n) {
        std::uint64_t m = std::uint64_t{next_u32()} * n;
        auto lo = static_cast<std::uint32_t>(m);
        if (lo < n) {
            const std::uint32_t t = (0u - n) % n;
            while (lo < t) {
                m = std::uint64_t{next_u32()} * n;
                lo = static_cast<std::uint32_t>(m);
            }
        }
        return static_cast<std::uint32_t>(m >> 32);
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 2> hi_;
    std::uint64_t n_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int have_ = 0;
};

}  // namespace phlb
