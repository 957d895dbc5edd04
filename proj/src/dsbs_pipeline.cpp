#include "gwci/blocks.hpp"
#include "gwci/dsbs.hpp"
#include "gwci/error.hpp"
#include "gwci/numerics.hpp"
#include "gwci/sc_coding.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <memory>

namespace gwci::dsbs {

using polar::Bits;
using polar::SideInfoChannel;
using polar::SourceCodeProfile;

namespace {

struct Lossy {
    SideInfoChannel ch;
    SourceCodeProfile prof;
};

struct Lossless {
    SideInfoChannel ch;
    polar::LosslessCode code;
};

struct Stages {
    polar::ProfileStore* store;
    const PipelineContext& ctx;
    std::size_t N;
    std::vector<std::string>& ids;

    std::shared_ptr<const SourceCodeProfile> profile(const SideInfoChannel& ch)
    {
        ids.push_back("profile-" + polar::ProfileStore::profile_key(ch.id(), N, ctx.polar_beta, ctx.samples,
                                                                     ctx.construction_seed));
        return store->get(ch, N, ctx.polar_beta, ctx.samples, ctx.construction_seed, ctx.threads);
    }

    Lossy lossy(SideInfoChannel ch, double mutual_info)
    {
        auto p = profile(ch);
        if (mutual_info <= 1e-12)
            return {std::move(ch), polar::with_info_count(*p, 0)};
        return {std::move(ch), *p};
    }

    Lossless lossless(SideInfoChannel ch, double entropy)
    {
        auto p = profile(ch);
        double rate = std::min(1.0, entropy + ctx.margins.lossless);
        return {std::move(ch), polar::make_lossless_code(*p, rate)};
    }
};

SideInfoChannel bsc_side(double p, const char* what)
{
    char label[64];
    std::snprintf(label, sizeof label, "%s(%.6g)", what, p);
    return SideInfoChannel::from_backward({0.5, 0.5}, {{1.0 - p, p}, {p, 1.0 - p}}, label);
}

// Test channel for a Ber-distributed source S = V xor Ber(d) with V ~ Ber(q).
SideInfoChannel binary_test_channel(double q, double d)
{
    char label[80];
    std::snprintf(label, sizeof label, "bin-test(q=%.6g,d=%.6g)", q, d);
    return SideInfoChannel::from_backward({1.0 - q, q}, {{1.0 - d, d}, {d, 1.0 - d}}, label);
}

std::vector<std::uint32_t> widen(const Bits& b) { return {b.begin(), b.end()}; }

std::vector<std::uint32_t> pair_symbols(const Bits& x, const Bits& y)
{
    std::vector<std::uint32_t> o(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        o[i] = 2u * x[i] + y[i];
    return o;
}

Bits xor_bits(const Bits& a, const Bits& b)
{
    Bits o(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        o[i] = a[i] ^ b[i];
    return o;
}

// Lossy stage; returns the reconstruction and adds the rate.
Bits lossy_pass(const Lossy& L, const std::vector<std::uint32_t>& src, polar::SharedSeed sh, polar::ScEngine& eng,
                double& rate)
{
    auto enc = polar::sc_lossy_encode(L.ch, src, L.prof, sh, eng);
    Bits rec = polar::sc_lossy_reconstruct(L.ch, enc.message, L.prof, sh, eng);
    if (rec != enc.codeword)
        throw InvariantError("lossy reconstruction differs from the encoder codeword");
    rate += enc.message.rate();
    return rec;
}

double lossless_pass(const Lossless& L, const Bits& x, const std::vector<std::uint32_t>& side, polar::ScEngine& eng)
{
    auto msg = polar::sc_lossless_encode(L.ch, x, side, L.code, eng);
    if (polar::sc_lossless_decode(L.ch, msg, side, L.code, eng) != x)
        throw InvariantError("lossless decode failed to reproduce the block");
    return msg.rate();
}

void require_region(const DsbsPoint& p, const DsbsModel& m, Region want)
{
    Region r = classify_dsbs(p.delta1, p.delta2, m);
    if (r != want)
        throw RegionMismatch(std::string("point ") + p.label() + " lies in " + region_name(r) + ", not " +
                             region_name(want));
}

} // namespace

void dsbs_source(const DsbsModel& m, std::uint64_t seed, std::uint64_t block, std::size_t N, Bits& x, Bits& y)
{
    CounterRng rng = source_rng(seed, block);
    x.resize(N);
    y.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        x[i] = static_cast<std::uint8_t>(rng.next_u64() & 1u);
        y[i] = x[i] ^ static_cast<std::uint8_t>(rng.bernoulli(m.a0));
    }
}

ExperimentRecord run_dsbs_pipeline(const DsbsPoint& p, const DsbsModel& m, std::size_t N, const PipelineContext& ctx)
{
    polar::block_exponent(N);
    auto t0 = std::chrono::steady_clock::now();
    polar::ProfileStore local;
    ExperimentRecord rec;
    rec.N = N;
    rec.theory = dsbs_theory(p, m);
    Stages st{ctx.store ? ctx.store : &local, ctx, N, rec.cache_ids};
    const double C = wyner_ci_dsbs(m), ha1 = binary_entropy(m.a1);
    using K = DsbsPoint::Kind;

    std::function<void(std::uint64_t, std::uint64_t, polar::ScEngine&, BlockResult&)> body;

    switch (p.kind) {
    case K::A: {
        auto z = std::make_shared<Lossless>(st.lossless(SideInfoChannel::bernoulli(m.a0), binary_entropy(m.a0)));
        body = [=, &m](std::uint64_t seed, std::uint64_t block, polar::ScEngine& eng, BlockResult& r) {
            Bits x, y;
            dsbs_source(m, seed, block, N, x, y);
            r.R0 = 1.0 + lossless_pass(*z, xor_bits(x, y), {}, eng);
        };
        break;
    }
    case K::G:
    case K::GB: {
        std::shared_ptr<Lossy> w;
        std::shared_ptr<Lossless> side;
        if (p.kind == K::G) {
            w = std::make_shared<Lossy>(st.lossy(build_point_g_channel(m), C));
            side = std::make_shared<Lossless>(st.lossless(bsc_side(m.a1, "bsc-side"), ha1));
        } else {
            auto g = build_gb_channel(m, p.beta);
            w = std::make_shared<Lossy>(st.lossy(g.channel, g.theory.R0));
            side = std::make_shared<Lossless>(st.lossless(bsc_side(p.beta, "bsc-side"), g.theory.R1));
        }
        body = [=, &m](std::uint64_t seed, std::uint64_t block, polar::ScEngine& eng, BlockResult& r) {
            Bits x, y;
            dsbs_source(m, seed, block, N, x, y);
            Bits wb = lossy_pass(*w, pair_symbols(x, y), stage_seed(seed, block, 0), eng, r.R0);
            auto ws = widen(wb);
            r.R1 = lossless_pass(*side, x, ws, eng);
            r.R2 = lossless_pass(*side, y, ws, eng);
        };
        break;
    }
    case K::AG:
    case K::LossyE10: {
        double dx, dy;
        if (p.kind == K::AG) {
            dx = dy = p.d1;
        } else {
            require_region(p, m, Region::E10);
            dx = p.delta1;
            dy = p.delta2;
        }
        auto w = std::make_shared<Lossy>(st.lossy(build_point_g_channel(m), C));
        auto vx = std::make_shared<Lossy>(st.lossy(binary_test_channel(ag_partner(m.a1, dx), dx),
                                                   ha1 - binary_entropy(dx)));
        auto vy = std::make_shared<Lossy>(st.lossy(binary_test_channel(ag_partner(m.a1, dy), dy),
                                                   ha1 - binary_entropy(dy)));
        std::shared_ptr<Lossless> ex;
        if (p.kind == K::AG)
            ex = std::make_shared<Lossless>(st.lossless(SideInfoChannel::bernoulli(dx), binary_entropy(dx)));
        // AG charges the refinements to the common branch; E10 sends them privately
        bool ag = p.kind == K::AG;
        body = [=, &m](std::uint64_t seed, std::uint64_t block, polar::ScEngine& eng, BlockResult& r) {
            Bits x, y;
            dsbs_source(m, seed, block, N, x, y);
            Bits wb = lossy_pass(*w, pair_symbols(x, y), stage_seed(seed, block, 0), eng, r.R0);
            Bits xr = xor_bits(wb, lossy_pass(*vx, widen(xor_bits(x, wb)), stage_seed(seed, block, 1), eng,
                                              ag ? r.R0 : r.R1));
            Bits yr = xor_bits(wb, lossy_pass(*vy, widen(xor_bits(y, wb)), stage_seed(seed, block, 2), eng,
                                              ag ? r.R0 : r.R2));
            if (ag) {
                r.R1 = lossless_pass(*ex, xor_bits(x, xr), {}, eng);
                r.R2 = lossless_pass(*ex, xor_bits(y, yr), {}, eng);
            } else {
                r.dist_x = hamming_fraction(x, xr);
                r.dist_y = hamming_fraction(y, yr);
            }
        };
        break;
    }
    case K::LossyE2: {
        require_region(p, m, Region::E2);
        auto w = std::make_shared<Lossy>(
            st.lossy(build_eps2_channel(p.delta1, p.delta2, m).channel(), r_xy_dsbs(p.delta1, p.delta2, m)));
        body = [=, &m](std::uint64_t seed, std::uint64_t block, polar::ScEngine& eng, BlockResult& r) {
            Bits x, y;
            dsbs_source(m, seed, block, N, x, y);
            Bits wb = lossy_pass(*w, pair_symbols(x, y), stage_seed(seed, block, 0), eng, r.R0);
            r.dist_x = hamming_fraction(x, wb);
            r.dist_y = hamming_fraction(y, wb);
        };
        break;
    }
    case K::LossyE3: {
        require_region(p, m, Region::E3);
        bool keep_x = p.delta1 <= p.delta2;
        double d = std::min({p.delta1, p.delta2, 0.5});
        auto w = std::make_shared<Lossy>(st.lossy(binary_test_channel(0.5, d), 1.0 - binary_entropy(d)));
        body = [=, &m](std::uint64_t seed, std::uint64_t block, polar::ScEngine& eng, BlockResult& r) {
            Bits x, y;
            dsbs_source(m, seed, block, N, x, y);
            Bits wb = lossy_pass(*w, widen(keep_x ? x : y), stage_seed(seed, block, 0), eng, r.R0);
            r.dist_x = hamming_fraction(x, wb);
            r.dist_y = hamming_fraction(y, wb);
        };
        break;
    }
    }

    rec.blocks = run_blocks(ctx, N, body);
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    std::sort(rec.cache_ids.begin(), rec.cache_ids.end());
    rec.cache_ids.erase(std::unique(rec.cache_ids.begin(), rec.cache_ids.end()), rec.cache_ids.end());
    return rec;
}

} // namespace gwci::dsbs
