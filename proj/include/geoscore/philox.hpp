#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
// numbers: as easy as 1, 2, 3", SC'11). A stream is fully determined by its
// key and counter, so independent replicates never share mutable state.

#include <array>
#include <cstdint>
#include <limits>

namespace geoscore {

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

constexpr PhiloxBlock philox4x32_10(PhiloxBlock ctr, PhiloxKey key) noexcept {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
               static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
               static_cast<std::uint32_t>(p0)};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

/// Random substream keyed by (master seed, replicate, stratum). Word 0 of the
/// counter enumerates blocks within the substream; the other words carry the
/// stratum and the 64-bit replicate index.
class PhiloxStream {
  public:
    using result_type = std::uint64_t;

    PhiloxStream(std::uint64_t master_seed, std::uint64_t replicate, std::uint32_t stratum) noexcept
        : key_{static_cast<std::uint32_t>(master_seed),
               static_cast<std::uint32_t>(master_seed >> 32)},
          ctr_{0u, stratum, static_cast<std::uint32_t>(replicate),
               static_cast<std::uint32_t>(replicate >> 32)} {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        if (used_ == 2) refill();
        const auto lo = block_[2 * used_];
        const auto hi = block_[2 * used_ + 1];
        ++used_;
        return (std::uint64_t{hi} << 32) | lo;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  private:
    void refill() noexcept {
        block_ = philox4x32_10(ctr_, key_);
        ++ctr_[0];
        used_ = 0;
    }

    PhiloxKey key_;
    PhiloxBlock ctr_;
    PhiloxBlock block_{};
    int used_ = 2;
};

}  // namespace geoscore
