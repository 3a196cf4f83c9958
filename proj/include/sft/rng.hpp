#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace sft {

// Philox4x32-10 counter-based generator.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

// A stream keyed on (seed, chunk, lane). Distinct keys give independent
// streams; the sequence depends on nothing else.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint32_t chunk, std::uint32_t lane = 0);

    // UniformRandomBitGenerator interface
    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type(0); }
    result_type operator()() { return next_u64(); }

    std::uint64_t next_u64();
    // uniform on (0, 1), never exactly 0 or 1
    double uniform();
    // standard normal (ziggurat)
    double normal();
    void fill_normal(std::span<double> out);

private:
    void refill();

    PhiloxKey key_;
    PhiloxCounter ctr_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buf_{};
    int pos_ = 2;
};

}  // namespace sft
