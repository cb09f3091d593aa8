#pragma once

// Counter-based deterministic random number generation.
//
// Every variate is addressed by (seed, trial, stream, position), so trial
// ranges can be partitioned across workers and merged in any order while
// reproducing the single-threaded results bit for bit.

#include <array>
#include <atomic>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "special.hpp"

namespace icdisp {

/// Philox-4x32 block function, 10 rounds.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key) {
        constexpr std::uint32_t kMul0 = 0xD2511F53u;
        constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
        constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
        constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }
};

/// One stream of uniforms/gaussians keyed by (seed, trial, stream).
/// Gaussians are produced by inverse-CDF of the uniform stream so the
/// sampler is reproducible from the counter addressing alone.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t trial, std::uint32_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          trial_(static_cast<std::uint32_t>(trial)), stream_(stream) {
        if (trial > 0xFFFFFFFFull)
            throw std::invalid_argument("CounterRng: trial index must fit in 32 bits");
    }

    /// Uniform double in the open interval (0,1).
    double next_uniform() {
        if (have_ == 0) refill();
        return buf_[--have_];
    }

    double next_gaussian() { return std_normal_quantile(next_uniform()); }

    void fill_gaussian(double* dst, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) dst[i] = next_gaussian();
    }

private:
    void refill() {
        const Philox4x32::Counter ctr = {static_cast<std::uint32_t>(pos_),
                                         static_cast<std::uint32_t>(pos_ >> 32), trial_,
                                         stream_};
        const auto w = Philox4x32::block(ctr, key_);
        ++pos_;
        buf_[1] = to_unit(w[0], w[1]);
        buf_[0] = to_unit(w[2], w[3]);
        have_ = 2;
    }

    static double to_unit(std::uint32_t hi, std::uint32_t lo) {
        const std::uint64_t u = (static_cast<std::uint64_t>(hi) << 32) | lo;
        // 53 significant bits, shifted into (0,1) strictly
        return static_cast<double>(u >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    Philox4x32::Key key_;
    std::uint32_t trial_;
    std::uint32_t stream_;
    std::uint64_t pos_ = 0;
    int have_ = 0;
    double buf_[2]{};
};

/// Fixed chunk width used by all Monte-Carlo accumulators. Partial results
/// are stored per chunk and merged in chunk order, which makes the reduction
/// independent of the number of workers.
inline constexpr std::uint64_t kTrialChunk = 1024;

/// Runs fn(chunk_index, first, last) over [0, total) split into kTrialChunk
/// pieces. Workers pull chunks from an atomic counter; results must be keyed
/// by chunk_index by the caller.
inline void run_chunked(std::uint64_t total, int threads,
                        const std::function<void(std::size_t, std::uint64_t, std::uint64_t)>& fn) {
    const std::size_t chunks =
        static_cast<std::size_t>((total + kTrialChunk - 1) / kTrialChunk);
    if (threads <= 1 || chunks <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) {
            const std::uint64_t first = static_cast<std::uint64_t>(c) * kTrialChunk;
            fn(c, first, std::min(total, first + kTrialChunk));
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunks) return;
            const std::uint64_t first = static_cast<std::uint64_t>(c) * kTrialChunk;
            fn(c, first, std::min(total, first + kTrialChunk));
        }
    };
    std::vector<std::thread> pool;
    const int nw = std::min<int>(threads, static_cast<int>(chunks));
    pool.reserve(static_cast<std::size_t>(nw));
    for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

} // namespace icdisp
