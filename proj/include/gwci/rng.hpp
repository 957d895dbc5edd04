#pragma once

#include <array>
#include <cstdint>

namespace gwci {

// Philox4x32-10 block function (Salmon et al., Random123).
// Counter words: {counter lo, counter hi, stream lo, stream hi}; key: {seed lo, seed hi}.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

// Stateless 64-bit draw addressed by (seed, stream, index). Index i uses
// block floor(i/2) and the word pair (2(i mod 2), 2(i mod 2)+1), low word first.
std::uint64_t philox_u64(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// SplitMix64 finalizer, used to fold several integers into one stream id.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_stream(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

// Sequential view of one (seed, stream) pair.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0)
        : seed_(seed), stream_(stream), index_(index)
    {
    }

    std::uint64_t next_u64() { return philox_u64(seed_, stream_, index_++); }
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double normal();
    bool bernoulli(double p) { return uniform() < p; }
    std::uint64_t position() const { return index_; }

private:
    std::uint64_t seed_, stream_, index_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace gwci
