#include "gwci/sc_coding.hpp"

#include "gwci/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gwci::polar {

namespace {

constexpr std::uint64_t kFrozenTag = 0x66726f7a656eULL;
constexpr std::uint64_t kRoundTag = 0x726f756e64ULL;

void check_length(std::size_t got, std::size_t N, const char* what)
{
    if (got != N)
        throw DomainError(std::string(what) + ": block length does not match the profile");
}

} // namespace

std::uint8_t shared_frozen_bit(SharedSeed s, std::size_t i)
{
    return static_cast<std::uint8_t>(philox_u64(s.seed, derive_stream(kFrozenTag, s.block), i) & 1u);
}

LosslessCode make_lossless_code(const SourceCodeProfile& profile, double rate)
{
    if (!(rate >= 0.0 && rate <= 1.0))
        throw DomainError("make_lossless_code: rate must lie in [0,1]");
    LosslessCode code;
    code.profile = profile;
    std::size_t N = profile.N;
    std::size_t K = static_cast<std::size_t>(std::ceil(rate * static_cast<double>(N) - 1e-9));
    std::vector<std::size_t> order(N);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return profile.h_cond[a] > profile.h_cond[b]; });
    code.stored.assign(N, 0);
    for (std::size_t k = 0; k < K; ++k)
        code.stored[order[k]] = 1;
    code.stored_count = K;
    return code;
}

double LosslessMessage::rate() const
{
    if (N == 0)
        return 0.0;
    double per_flip = std::log2(static_cast<double>(N)) + 1.0;
    return (static_cast<double>(stored_bits.size()) + static_cast<double>(flips.size()) * per_flip) /
           static_cast<double>(N);
}

LosslessMessage sc_lossless_encode(const Bits& x, const double* cond_llr, const LosslessCode& code, ScEngine& eng)
{
    const std::size_t N = code.profile.N;
    check_length(x.size(), N, "sc_lossless_encode");
    check_length(eng.size(), N, "sc_lossless_encode");
    Bits u = polar_transform(x);
    LosslessMessage msg;
    msg.channel_id = code.profile.channel_id;
    msg.N = N;
    msg.stored_bits.reserve(code.stored_count);
    Bits uhat(N), xhat(N);
    eng.run(
        cond_llr, nullptr,
        [&](std::size_t i, double lc, double) -> std::uint8_t {
            if (code.stored[i]) {
                msg.stored_bits.push_back(u[i]);
                return u[i];
            }
            std::uint8_t est = lc < 0.0 ? 1 : 0;
            if (est != u[i])
                msg.flips.push_back(static_cast<std::uint32_t>(i));
            return u[i];
        },
        uhat.data(), xhat.data());
    return msg;
}

Bits sc_lossless_decode(const LosslessMessage& msg, const double* cond_llr, const LosslessCode& code, ScEngine& eng)
{
    const std::size_t N = code.profile.N;
    if (msg.channel_id != code.profile.channel_id)
        throw ProfileMismatch("sc_lossless_decode: message was encoded for channel " + msg.channel_id +
                              " but the profile belongs to " + code.profile.channel_id);
    check_length(msg.N, N, "sc_lossless_decode");
    check_length(eng.size(), N, "sc_lossless_decode");
    if (msg.stored_bits.size() != code.stored_count)
        throw DomainError("sc_lossless_decode: stored payload length does not match the code");
    std::size_t si = 0, fi = 0;
    Bits u(N), x(N);
    eng.run(
        cond_llr, nullptr,
        [&](std::size_t i, double lc, double) -> std::uint8_t {
            if (code.stored[i])
                return msg.stored_bits[si++];
            std::uint8_t est = lc < 0.0 ? 1 : 0;
            if (fi < msg.flips.size() && msg.flips[fi] == i) {
                est ^= 1u;
                ++fi;
            }
            return est;
        },
        u.data(), x.data());
    return x;
}

static std::vector<double> side_llrs(const SideInfoChannel& ch, const std::vector<std::uint32_t>& side, std::size_t N)
{
    if (ch.observation_free()) {
        if (!side.empty())
            throw DomainError("side information supplied for a channel without observations");
        return std::vector<double>(N, ch.cond_llr(0));
    }
    if (side.size() != N)
        throw DomainError("side information length does not match the block");
    return ch.leaf_llrs(side);
}

LosslessMessage sc_lossless_encode(const SideInfoChannel& ch, const Bits& x, const std::vector<std::uint32_t>& side_info,
                                   const LosslessCode& code, ScEngine& eng)
{
    if (ch.id() != code.profile.channel_id)
        throw ProfileMismatch("sc_lossless_encode: channel does not match the profile");
    auto L = side_llrs(ch, side_info, code.profile.N);
    return sc_lossless_encode(x, L.data(), code, eng);
}

Bits sc_lossless_decode(const SideInfoChannel& ch, const LosslessMessage& msg,
                        const std::vector<std::uint32_t>& side_info, const LosslessCode& code, ScEngine& eng)
{
    if (ch.id() != code.profile.channel_id)
        throw ProfileMismatch("sc_lossless_decode: channel does not match the profile");
    auto L = side_llrs(ch, side_info, code.profile.N);
    return sc_lossless_decode(msg, L.data(), code, eng);
}

LossyEncoding sc_lossy_encode(const double* cond_llr, const double* prior_llr, const SourceCodeProfile& profile,
                              SharedSeed shared, ScEngine& eng)
{
    const std::size_t N = profile.N;
    check_length(eng.size(), N, "sc_lossy_encode");
    bool need_prior = profile.count(BitClass::FrozenDeterministic) > 0;
    if (need_prior && !prior_llr)
        throw DomainError("sc_lossy_encode: profile has deterministic indices but no prior LLRs were given");
    LossyEncoding enc;
    enc.message.channel_id = profile.channel_id;
    enc.message.N = N;
    enc.message.info_bits.reserve(profile.count(BitClass::Info));
    enc.u.resize(N);
    enc.codeword.resize(N);
    CounterRng rounding(shared.seed, derive_stream(kRoundTag, shared.block));
    eng.run(
        cond_llr, need_prior ? prior_llr : nullptr,
        [&](std::size_t i, double lc, double lp) -> std::uint8_t {
            switch (profile.classes[i]) {
            case BitClass::Info: {
                double p1 = 1.0 / (1.0 + std::exp(lc));
                std::uint8_t b = rounding.uniform() < p1 ? 1 : 0;
                enc.message.info_bits.push_back(b);
                return b;
            }
            case BitClass::FrozenRandom:
                return shared_frozen_bit(shared, i);
            case BitClass::FrozenDeterministic:
                break;
            }
            if (std::fabs(lp) < kWeakPriorLlr) {
                double p1 = 1.0 / (1.0 + std::exp(lc));
                std::uint8_t b = rounding.uniform() < p1 ? 1 : 0;
                enc.message.info_bits.push_back(b);
                return b;
            }
            return lp < 0.0 ? 1 : 0;
        },
        enc.u.data(), enc.codeword.data());
    return enc;
}

Bits sc_lossy_reconstruct(const LossyMessage& msg, const SourceCodeProfile& profile, SharedSeed shared,
                          const double* prior_llr, ScEngine& eng)
{
    const std::size_t N = profile.N;
    if (msg.channel_id != profile.channel_id)
        throw ProfileMismatch("sc_lossy_reconstruct: message was encoded for a different channel");
    check_length(msg.N, N, "sc_lossy_reconstruct");
    if (msg.info_bits.size() < profile.count(BitClass::Info))
        throw DomainError("sc_lossy_reconstruct: payload is shorter than the information set");
    std::size_t k = 0;
    Bits u(N), x(N);
    if (profile.count(BitClass::FrozenDeterministic) == 0) {
        if (msg.info_bits.size() != profile.count(BitClass::Info))
            throw DomainError("sc_lossy_reconstruct: payload length does not match the information set");
        for (std::size_t i = 0; i < N; ++i)
            u[i] = profile.classes[i] == BitClass::Info ? msg.info_bits[k++] : shared_frozen_bit(shared, i);
        polar_transform(std::span<std::uint8_t>(u));
        return u;
    }
    if (!prior_llr)
        throw DomainError("sc_lossy_reconstruct: profile has deterministic indices but no prior LLRs were given");
    check_length(eng.size(), N, "sc_lossy_reconstruct");
    auto next = [&]() -> std::uint8_t {
        if (k >= msg.info_bits.size())
            throw DomainError("sc_lossy_reconstruct: payload ended early");
        return msg.info_bits[k++];
    };
    eng.run(
        nullptr, prior_llr,
        [&](std::size_t i, double, double lp) -> std::uint8_t {
            switch (profile.classes[i]) {
            case BitClass::Info:
                return next();
            case BitClass::FrozenRandom:
                return shared_frozen_bit(shared, i);
            case BitClass::FrozenDeterministic:
                break;
            }
            if (std::fabs(lp) < kWeakPriorLlr)
                return next();
            return lp < 0.0 ? 1 : 0;
        },
        u.data(), x.data());
    if (k != msg.info_bits.size())
        throw DomainError("sc_lossy_reconstruct: payload has unused bits");
    return x;
}

LossyEncoding sc_lossy_encode(const SideInfoChannel& ch, const std::vector<std::uint32_t>& source,
                              const SourceCodeProfile& profile, SharedSeed shared, ScEngine& eng)
{
    if (ch.id() != profile.channel_id)
        throw ProfileMismatch("sc_lossy_encode: channel does not match the profile");
    check_length(source.size(), profile.N, "sc_lossy_encode");
    auto L = ch.leaf_llrs(source);
    std::vector<double> prior(profile.N, ch.prior_llr());
    return sc_lossy_encode(L.data(), prior.data(), profile, shared, eng);
}

Bits sc_lossy_reconstruct(const SideInfoChannel& ch, const LossyMessage& msg, const SourceCodeProfile& profile,
                          SharedSeed shared, ScEngine& eng)
{
    if (ch.id() != profile.channel_id)
        throw ProfileMismatch("sc_lossy_reconstruct: channel does not match the profile");
    std::vector<double> prior(profile.N, ch.prior_llr());
    return sc_lossy_reconstruct(msg, profile, shared, prior.data(), eng);
}

} // namespace gwci::polar
