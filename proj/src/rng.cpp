#include "sft/rng.hpp"

#include <boost/random/normal_distribution.hpp>

namespace sft {

namespace {
constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = std::uint64_t(a) * b;
    hi = std::uint32_t(p >> 32);
    lo = std::uint32_t(p);
}
}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter c, PhiloxKey k) {
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            k[0] += W0;
            k[1] += W1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(M0, c[0], hi0, lo0);
        mulhilo(M1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
}

Stream::Stream(std::uint64_t seed, std::uint32_t chunk, std::uint32_t lane)
    : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)}, ctr_{0, 0, chunk, lane} {}

void Stream::refill() {
    ctr_[0] = std::uint32_t(block_);
    ctr_[1] = std::uint32_t(block_ >> 32);
    ++block_;
    const PhiloxCounter r = philox4x32_10(ctr_, key_);
    buf_[0] = (std::uint64_t(r[0]) << 32) | r[1];
    buf_[1] = (std::uint64_t(r[2]) << 32) | r[3];
    pos_ = 0;
}

std::uint64_t Stream::next_u64() {
    if (pos_ == 2) refill();
    return buf_[pos_++];
}

double Stream::uniform() {
    return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::normal() {
    // stateless, so the stream position alone determines the next variate
    boost::random::normal_distribution<double> nd;
    return nd(*this);
}

void Stream::fill_normal(std::span<double> out) {
    for (double& x : out) x = normal();
}

}  // namespace sft
