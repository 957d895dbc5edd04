#pragma once

#include "gwci/parallel.hpp"
#include "gwci/polar.hpp"
#include "gwci/sc_coding.hpp"
#include "gwci/record.hpp"
#include "gwci/rng.hpp"

#include <chrono>

namespace gwci {

inline constexpr std::uint64_t kSourceTag = 0x736f75726365ULL;
inline constexpr std::uint64_t kSharedTag = 0x736861726564ULL;

// Shared randomness of one coding stage inside one block.
inline polar::SharedSeed stage_seed(std::uint64_t seed, std::uint64_t block, unsigned stage)
{
    return {derive_stream(kSharedTag, seed), block * 64 + stage};
}

inline CounterRng source_rng(std::uint64_t seed, std::uint64_t block, std::uint64_t sub = 0)
{
    return CounterRng(seed, derive_stream(kSourceTag, block, sub));
}

// Runs fn(seed, block, engine, result) over every (seed, block) pair; results come
// back in seed-major order regardless of the thread count.
template <class Fn>
std::vector<BlockResult> run_blocks(const PipelineContext& ctx, std::size_t N, Fn&& fn)
{
    std::size_t nb = ctx.blocks;
    std::vector<BlockResult> out(ctx.seeds.size() * nb);
    parallel_for(out.size(), ctx.threads, [&](std::size_t t) {
        auto t0 = std::chrono::steady_clock::now();
        BlockResult& r = out[t];
        r.seed = ctx.seeds[t / nb];
        r.block = t % nb;
        polar::ScEngine eng(N);
        fn(r.seed, r.block, eng, r);
        if (ctx.timing)
            r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    });
    return out;
}

inline double hamming_fraction(const polar::Bits& a, const polar::Bits& b)
{
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d += a[i] != b[i];
    return a.empty() ? 0.0 : static_cast<double>(d) / static_cast<double>(a.size());
}

} // namespace gwci
