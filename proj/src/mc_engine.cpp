#include "sft/mc_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "sft/errors.hpp"

namespace sft {

void Accumulator::push(double x) {
    ++n;
    const double d = x - mean;
    mean += d / double(n);
    m2 += d * (x - mean);
    const double ax = std::abs(x);
    max_abs = std::max(max_abs, ax);
    sum_abs += ax;
}

void Accumulator::merge(const Accumulator& o) {
    if (o.n == 0) return;
    if (n == 0) {
        *this = o;
        return;
    }
    const double na = double(n), nb = double(o.n);
    const double tot = na + nb;
    const double d = o.mean - mean;
    mean += d * nb / tot;
    m2 += o.m2 + d * d * na * nb / tot;
    n += o.n;
    max_abs = std::max(max_abs, o.max_abs);
    sum_abs += o.sum_abs;
}

std::uint64_t chunk_size(const RunConfig& cfg, std::uint32_t c) {
    const std::uint64_t base = cfg.n_samples / cfg.n_chunks;
    const std::uint64_t rem = cfg.n_samples % cfg.n_chunks;
    return base + (c < rem ? 1 : 0);
}

MCEstimate to_estimate(const Accumulator& acc, const RunConfig& cfg) {
    MCEstimate e;
    e.mean = acc.mean;
    e.n = acc.n;
    e.seed = cfg.seed;
    e.std_error = acc.n > 1 ? std::sqrt(acc.variance() / double(acc.n)) : 0.0;
    e.max_weight_fraction = acc.sum_abs > 0 ? acc.max_abs / acc.sum_abs : 0.0;
    e.unreliable_threshold = cfg.unreliable_threshold;
    return e;
}

std::vector<MCEstimate> estimate_many(const RunConfig& cfg, std::size_t dim, const SampleFn& fn) {
    if (cfg.n_samples < 2) throw ParameterError("estimate: need at least 2 samples");
    if (cfg.n_chunks < 1) throw ParameterError("estimate: need at least 1 chunk");
    if (dim < 1) throw ParameterError("estimate: dimension must be positive");

    std::vector<std::uint64_t> first(cfg.n_chunks + 1, 0);
    for (std::uint32_t c = 0; c < cfg.n_chunks; ++c) first[c + 1] = first[c] + chunk_size(cfg, c);

    std::vector<std::vector<Accumulator>> acc(cfg.n_chunks, std::vector<Accumulator>(dim));
    std::vector<std::exception_ptr> errs(cfg.n_chunks);
    std::atomic<std::uint32_t> next{0};

    auto work = [&] {
        std::vector<double> out(dim);
        for (;;) {
            const std::uint32_t c = next.fetch_add(1);
            if (c >= cfg.n_chunks) return;
            try {
                Stream s(cfg.seed, c, cfg.lane);
                for (std::uint64_t i = first[c]; i < first[c + 1]; ++i) {
                    fn(s, out);
                    for (std::size_t k = 0; k < dim; ++k) {
                        if (!std::isfinite(out[k])) throw NonFiniteSampleError(c, i);
                        acc[c][k].push(out[k]);
                    }
                }
            } catch (...) {
                errs[c] = std::current_exception();
            }
        }
    };

    const unsigned nw = std::max(1u, std::min<unsigned>(cfg.workers, cfg.n_chunks));
    if (nw == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < nw; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);

    std::vector<MCEstimate> res(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        Accumulator tot;
        for (std::uint32_t c = 0; c < cfg.n_chunks; ++c) tot.merge(acc[c][k]);
        res[k] = to_estimate(tot, cfg);
    }
    return res;
}

MCEstimate estimate(const RunConfig& cfg, const std::function<double(Stream&)>& fn) {
    return estimate_many(cfg, 1, [&](Stream& s, std::span<double> out) { out[0] = fn(s); })[0];
}

BiasProbe bias_probe(const RunConfig& cfg, const std::function<void(Stream&, double&, double&)>& fn) {
    const auto r = estimate_many(cfg, 3, [&](Stream& s, std::span<double> out) {
        double a = 0, b = 0;
        fn(s, a, b);
        out[0] = a;
        out[1] = b;
        out[2] = b - a;
    });
    return {r[0], r[1], r[2], 2.0 * r[1].mean - r[0].mean};
}

}  // namespace sft
