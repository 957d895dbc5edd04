#pragma once

#include "gwci/channel.hpp"
#include "gwci/polar.hpp"
#include "gwci/profile.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gwci::polar {

// Shared randomness for frozen-random bits, addressed by (seed, block, bit index).
struct SharedSeed {
    std::uint64_t seed = 0;
    std::uint64_t block = 0;
};

std::uint8_t shared_frozen_bit(SharedSeed s, std::size_t i);

// ---- lossless -------------------------------------------------------------

struct LosslessCode {
    SourceCodeProfile profile;
    std::vector<std::uint8_t> stored; // 1 for indices in F
    std::size_t stored_count = 0;
};

// F = the ceil(rate*N) indices with the largest conditional entropy estimates.
LosslessCode make_lossless_code(const SourceCodeProfile& profile, double rate);

struct LosslessMessage {
    std::string channel_id;
    std::size_t N = 0;
    Bits stored_bits;                 // u_F in index order
    std::vector<std::uint32_t> flips; // T, ascending

    // (|F| + |T| (log2 N + 1)) / N
    double rate() const;
};

LosslessMessage sc_lossless_encode(const Bits& x, const double* cond_llr, const LosslessCode& code, ScEngine& eng);
Bits sc_lossless_decode(const LosslessMessage& msg, const double* cond_llr, const LosslessCode& code, ScEngine& eng);

// Channel-driven forms; side_info must be empty iff the channel observes nothing.
LosslessMessage sc_lossless_encode(const SideInfoChannel& ch, const Bits& x, const std::vector<std::uint32_t>& side_info,
                                   const LosslessCode& code, ScEngine& eng);
Bits sc_lossless_decode(const SideInfoChannel& ch, const LosslessMessage& msg,
                        const std::vector<std::uint32_t>& side_info, const LosslessCode& code, ScEngine& eng);

// ---- lossy ----------------------------------------------------------------

struct LossyMessage {
    std::string channel_id;
    std::size_t N = 0;
    Bits info_bits; // u_I in index order

    double rate() const { return N ? static_cast<double>(info_bits.size()) / static_cast<double>(N) : 0.0; }
};

struct LossyEncoding {
    LossyMessage message;
    Bits u;
    Bits codeword; // u G_N, the reconstruction labels
};

// A deterministic index whose prior LLR magnitude falls below this value at run
// time is coded like an information bit; the decoder sees the same prior and
// reads the bit from the payload.
inline constexpr double kWeakPriorLlr = 10.0;

// prior_llr may be null only when the profile has no deterministic indices.
LossyEncoding sc_lossy_encode(const double* cond_llr, const double* prior_llr, const SourceCodeProfile& profile,
                              SharedSeed shared, ScEngine& eng);
Bits sc_lossy_reconstruct(const LossyMessage& msg, const SourceCodeProfile& profile, SharedSeed shared,
                          const double* prior_llr, ScEngine& eng);

LossyEncoding sc_lossy_encode(const SideInfoChannel& ch, const std::vector<std::uint32_t>& source,
                              const SourceCodeProfile& profile, SharedSeed shared, ScEngine& eng);
Bits sc_lossy_reconstruct(const SideInfoChannel& ch, const LossyMessage& msg, const SourceCodeProfile& profile,
                          SharedSeed shared, ScEngine& eng);

} // namespace gwci::polar
