#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sft/rng.hpp"

namespace sft {

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    // largest |sample| over sum of |sample|
    double max_weight_fraction = 0.0;
    double unreliable_threshold = 0.05;

    bool reliable() const { return max_weight_fraction <= unreliable_threshold; }
};

// Streaming mean / variance (Welford) with pairwise merge (Chan et al.).
struct Accumulator {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double max_abs = 0.0;
    double sum_abs = 0.0;

    void push(double x);
    void merge(const Accumulator& o);
    double variance() const { return n > 1 ? m2 / double(n - 1) : 0.0; }
};

struct RunConfig {
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
    std::uint32_t n_chunks = 64;
    unsigned workers = 1;
    // separates independent estimators sharing a seed
    std::uint32_t lane = 0;
    double unreliable_threshold = 0.05;
};

// Fills `out` with one sample of a vector-valued functional.
using SampleFn = std::function<void(Stream&, std::span<double>)>;

// Chunk c draws its samples from Stream(seed, c, lane); chunks are reduced in
// index order, so the result does not depend on the number of workers.
std::vector<MCEstimate> estimate_many(const RunConfig& cfg, std::size_t dim, const SampleFn& fn);

MCEstimate estimate(const RunConfig& cfg, const std::function<double(Stream&)>& fn);

// Samples handled by chunk c.
std::uint64_t chunk_size(const RunConfig& cfg, std::uint32_t c);

MCEstimate to_estimate(const Accumulator& acc, const RunConfig& cfg);

struct BiasProbe {
    MCEstimate coarse;      // grid N
    MCEstimate fine;        // grid 2N, same paths refined
    MCEstimate difference;  // fine - coarse, per path
    double richardson;      // 2 fine - coarse
};

// fn writes (value on grid N, value on grid 2N) for one coupled path pair.
BiasProbe bias_probe(const RunConfig& cfg, const std::function<void(Stream&, double&, double&)>& fn);

}  // namespace sft
