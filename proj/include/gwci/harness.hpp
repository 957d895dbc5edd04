#pragma once

#include "gwci/gaussian.hpp"
#include "gwci/profile_store.hpp"
#include "gwci/record.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gwci::harness {

enum class Scenario { DsbsLossless, DsbsLossy, Gaussian, GaussianL, LemmaCheck, PropertySuite };

const char* scenario_name(Scenario s);

struct ExperimentConfig {
    Scenario scenario = Scenario::DsbsLossless;

    // source parameters
    double a0 = 0.11;
    double rho = 0.8;
    int L = 2;
    double rho_L = 0.5; // lemma-check only: correlation of the L-source case

    // operating point: A|G|AG|GB for dsbs-lossless, eps10|eps2|eps3 for dsbs-lossy,
    // common|eps10|eps2|eps3 for gaussian
    std::string point = "G";
    double delta1 = 0.3, delta2 = 0.3;
    double beta = 0.2; // GB
    double d1 = 0.02;  // AG

    std::vector<std::size_t> N{4096};
    std::size_t blocks = 1;
    std::vector<std::uint64_t> seeds{1};

    double rate_margin = 0.04;  // lossless stages
    double lossy_margin = 0.05; // lattice levels; binary lossy stages use the polar_beta threshold
    double target_flatness = 1e-3;
    std::size_t samples = 1000;
    std::uint64_t construction_seed = 1;
    double polar_beta = 0.25;
    std::optional<int> levels;

    // lemma-check
    double lemma_epsilon = 0.005;
    int resolution = 401;
    int resolution_3d = 121;
    std::size_t mc_samples = 200000;

    std::string output = "results";
    unsigned threads = 1;
    bool timing = false;

    // Parameters that determine the results; excludes output, threads and timing.
    nlohmann::json science_json() const;
    nlohmann::json to_json() const;
    std::string hash() const;
};

// Throws ConfigError on unknown keys, wrong types or violated invariants.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
void validate(const ExperimentConfig& c);

PipelineContext make_context(const ExperimentConfig& c, polar::ProfileStore* store);

// Runs every block length of a pipeline scenario. With construct_only the codes are
// built (and cached) but no blocks are simulated.
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& c, polar::ProfileStore& store,
                                             bool construct_only = false);

std::vector<gaussian::LemmaReport> run_lemma_check(const ExperimentConfig& c);

struct PropertyResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct PropertyOptions {
    std::uint64_t seed = 1;
    std::size_t region_points = 100000;
    std::size_t llr_samples = 10000;
};

std::vector<PropertyResult> run_property_suite(const PropertyOptions& opt = {});

// Individual properties, also used by the tests.
PropertyResult check_transform_involution(std::uint64_t seed);
PropertyResult check_chain_rule(std::uint64_t seed);
PropertyResult check_region_partition(std::uint64_t seed, std::size_t points);
PropertyResult check_rxy_continuity(std::uint64_t seed);
PropertyResult check_discrete_gaussian_normalization();
PropertyResult check_flatness_monotonicity();
PropertyResult check_eps2_covariance(std::uint64_t seed);
PropertyResult check_llr_equivalence(double rho, std::uint64_t seed, std::size_t samples);

// ---- output ---------------------------------------------------------------

inline constexpr const char* kCsvHeader =
    "scenario,N,seed,block,R0,R1,R2,R_total,dist_x,dist_y,theory_R,theory_CI,runtime_ms";

std::string records_csv(const std::vector<ExperimentRecord>& recs);
nlohmann::json records_json(const ExperimentConfig& c, const std::vector<ExperimentRecord>& recs);
std::string lemma_csv(const std::vector<gaussian::LemmaReport>& reps);
std::string properties_csv(const std::vector<PropertyResult>& props);

struct OutputFiles {
    std::filesystem::path csv, json;
};
OutputFiles write_records(const ExperimentConfig& c, const std::vector<ExperimentRecord>& recs);

// ---- cache maintenance ----------------------------------------------------

struct CacheEntry {
    std::string id; // file stem
    std::string kind; // "profile", "multilevel" or "other"
    std::uintmax_t bytes = 0;
    double age_days = 0.0;
    bool referenced = false;
};

// Ids referenced by record JSON files under results_dir, closed under bundle references.
std::vector<std::string> referenced_cache_ids(const std::filesystem::path& cache_dir,
                                              const std::filesystem::path& results_dir);
std::vector<CacheEntry> cache_list(const std::filesystem::path& cache_dir,
                                   const std::optional<std::filesystem::path>& results_dir = std::nullopt);

struct GcOptions {
    double min_age_days = 0.0;       // only entries at least this old are candidates
    std::vector<std::string> hashes; // when nonempty, only ids containing one of these
    bool dry_run = false;
};
// Returns the removed ids. Never removes an id referenced from results_dir.
std::vector<std::string> cache_gc(const std::filesystem::path& cache_dir, const std::filesystem::path& results_dir,
                                  const GcOptions& opt);

} // namespace gwci::harness
