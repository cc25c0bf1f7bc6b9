#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace hcnet {

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Counter-based stream: key = root seed, counter = (block, stream id).
/// Stream i of a given seed is the same sequence no matter which thread
/// draws it or in which order the streams are consumed.
class Rng {
public:
    using result_type = std::uint32_t;

    Rng(std::uint64_t seed, std::uint64_t stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

    /// Uniform on (0, 1), 53 random bits, never 0 or 1.
    double uniform();
    /// Exponential with the given rate.
    double exponential(double rate);
    /// Number of failures before the first success, success probability p.
    std::int64_t geometric(double p);

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
};

}  // namespace hcnet
