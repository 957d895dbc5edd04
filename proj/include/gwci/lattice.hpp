#pragma once

#include "gwci/profile.hpp"
#include "gwci/profile_store.hpp"
#include "gwci/sc_coding.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gwci::lattice {

// Chain sZ / 2sZ / ... / 2^r sZ. The label of lattice point s*k at level l is
// bit l-1 of k; level 1 is the finest partition.
struct PartitionChainSpec {
    double s = 1.0;
    int r = 4;
    double sigma_r = 1.0;
};

struct MmseParams {
    double sigma_s2 = 1.0;
    double sigma_r2 = 0.5;
    double alpha = 0.5;
    double sigma_tilde2 = 0.25;
};

// Throws DomainError unless 0 < sigma_r2 < sigma_s2.
MmseParams mmse_params(double sigma_s2, double sigma_r2);

// Truncation half-width, in units of sigma, for a relative tail below 1e-14.
inline constexpr double kLlrTailSigmas = 8.1;

// Per-level likelihood ratios for one chain. lower holds labels of levels 1..l-1.
class LevelModel {
public:
    LevelModel(const PartitionChainSpec& chain, const MmseParams& mmse);

    const PartitionChainSpec& chain() const { return chain_; }
    const MmseParams& mmse() const { return mmse_; }

    // log P(bit 0 | t, lower) / P(bit 1 | t, lower) with weights exp(-(s k - alpha t)^2 / 2 sigma_tilde^2)
    double cond_llr(int level, double t, std::uint32_t lower) const;
    // Same with weights exp(-(s k)^2 / 2 sigma_r^2); independent of t.
    double prior_llr(int level, std::uint32_t lower) const { return prior_[level - 1][lower]; }

    // Reconstruction point for an r-bit label, taken from [-2^{r-1}, 2^{r-1}).
    double representative(std::uint32_t label) const;
    std::int64_t label_index(std::uint32_t label) const;

private:
    double coset_llr(int level, double center, double sd, std::uint32_t lower) const;

    PartitionChainSpec chain_;
    MmseParams mmse_;
    std::vector<std::vector<double>> prior_;
};

double level_llr(int level, double t, std::uint32_t lower, const PartitionChainSpec& chain, const MmseParams& mmse);

// Exact per-level information I(T; bit l | bits < l) and prior entropy
// H(bit l | bits < l) under the discrete-Gaussian test channel, by quadrature.
struct LevelInformation {
    std::vector<double> mutual_info;
    std::vector<double> prior_entropy;
    double total() const;
};
LevelInformation level_information(const PartitionChainSpec& chain, const MmseParams& mmse);

struct ChainChoice {
    std::optional<int> levels;       // fixed r; automatic when empty
    double target_flatness = 1e-3;
    double top_capacity = 0.01;      // bits allowed on the finest level
    double bottom_entropy = 0.01;    // prior entropy allowed on the coarsest level
    int min_levels = 4;
    int max_levels = 12;
};

// Largest s meeting the flatness and top-level limits, then the level count.
// Throws FlatnessError if no scale qualifies.
PartitionChainSpec choose_chain(const MmseParams& mmse, const ChainChoice& choice = {});

struct BuildOptions {
    double target_flatness = 1e-3;
    double rate_margin = 0.05;
    unsigned threads = 1;
    polar::ProfileStore* store = nullptr;
};

struct MultilevelLatticeCode {
    PartitionChainSpec chain;
    MmseParams mmse;
    std::size_t N = 0;
    double flatness = 0.0;
    // threshold-classified estimates as constructed, one per level
    std::vector<polar::SourceCodeProfile> constructed;
    // rate-targeted profiles used for coding
    std::vector<polar::SourceCodeProfile> levels;
    std::vector<double> level_rates;
    // Monte-Carlo single-letter I(T; bit l | bits < l) and I(T; all r labels)
    std::vector<double> level_mi;
    double direct_mi = 0.0;
    double total_rate = 0.0;
    std::vector<std::string> cache_ids;
};

// Throws FlatnessError when the chain misses the flatness target.
MultilevelLatticeCode build_multilevel_code(const PartitionChainSpec& chain, const MmseParams& mmse, std::size_t N,
                                            double beta, std::size_t sample_count, std::uint64_t seed,
                                            const BuildOptions& opt = {});

// Re-targets the information sets of all levels with one shared threshold so that
// the total information count is ceil(rate N).
void set_total_rate(MultilevelLatticeCode& code, double rate);

struct LatticeQuantization {
    std::vector<polar::Bits> payloads; // per level, INFO bits in index order
    std::vector<std::uint32_t> labels; // r-bit label per coordinate
    std::vector<double> reconstruction;
    double rate = 0.0;
};

LatticeQuantization lattice_quantize(const std::vector<double>& t, const MultilevelLatticeCode& code,
                                     polar::SharedSeed shared, polar::ScEngine& eng);
std::vector<double> lattice_reconstruct(const std::vector<polar::Bits>& payloads, const MultilevelLatticeCode& code,
                                        polar::SharedSeed shared, polar::ScEngine& eng);

} // namespace gwci::lattice
