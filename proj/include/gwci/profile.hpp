#pragma once

#include "gwci/channel.hpp"
#include "gwci/polar.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gwci::polar {

enum class BitClass : std::uint8_t { Info = 0, FrozenRandom = 1, FrozenDeterministic = 2 };

struct SourceCodeProfile {
    static constexpr int kVersion = 1;

    std::string channel_id;
    std::size_t N = 0;
    double beta = 0.25;
    // log2 of the classification threshold delta; -N^beta for threshold-built profiles
    double log2_delta = 0.0;
    // threshold on z_prior for the deterministic class; equal to log2_delta unless split
    double log2_delta_det = 0.0;
    std::size_t sample_count = 0;
    std::uint64_t seed = 0;

    std::vector<double> z_cond, omz_cond, z_prior, h_cond, h_prior;
    std::vector<BitClass> classes;

    // single-letter entropies measured on the same sample stream
    double leaf_h_cond = 0.0, leaf_h_prior = 0.0;

    std::size_t count(BitClass c) const;
    double info_rate() const { return static_cast<double>(count(BitClass::Info)) / static_cast<double>(N); }
    double mean_h_cond() const;
    double mean_h_prior() const;
};

inline double threshold_log2_delta(std::size_t N, double beta) { return -std::pow(static_cast<double>(N), beta); }

// log2 min(1 - z_cond_i, z_prior_i): an index is INFO iff this exceeds log2 delta.
double info_margin_log2(const SourceCodeProfile& p, std::size_t i);

void classify(SourceCodeProfile& p, double log2_delta);
void classify(SourceCodeProfile& p, double log2_delta, double log2_delta_det);

// Same estimates, threshold moved so that exactly the K largest margins are INFO
// (fewer when margins tie at the cut).
SourceCodeProfile with_info_count(const SourceCodeProfile& p, std::size_t K);
SourceCodeProfile with_info_rate(const SourceCodeProfile& p, double rate);

// Throws InvariantError on any violation of the profile invariants.
void check_profile(const SourceCodeProfile& p);

enum class PriorMode { Uniform, SameAsCond, Separate };

// Genie-aided accumulation of per-index Bhattacharyya and entropy estimates.
class ProfileAccumulator {
public:
    ProfileAccumulator(std::size_t N, PriorMode mode);

    // b: true values of the transformed variable; cond, prior: leaf LLRs.
    void add(ScEngine& eng, const std::uint8_t* b, const double* cond, const double* prior);
    void merge(const ProfileAccumulator& other);
    SourceCodeProfile finish(const std::string& channel_id, double beta, std::uint64_t seed) const;
    std::size_t samples() const { return samples_; }

private:
    std::size_t N_;
    PriorMode mode_;
    std::size_t samples_ = 0;
    std::vector<double> zc_, oc_, hc_, zp_, op_, hp_;
    double leaf_hc_ = 0.0, leaf_hp_ = 0.0;
    Bits u_, uhat_, x_;
};

// Monte-Carlo construction; deterministic in (channel, N, beta, sample_count, seed)
// for any thread count.
SourceCodeProfile construct_profile(const SideInfoChannel& ch, std::size_t N, double beta, std::size_t sample_count,
                                    std::uint64_t seed, unsigned threads = 1);

nlohmann::json profile_to_json(const SourceCodeProfile& p);
SourceCodeProfile profile_from_json(const nlohmann::json& j);

} // namespace gwci::polar
