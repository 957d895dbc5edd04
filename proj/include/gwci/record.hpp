#pragma once

#include "gwci/profile_store.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace gwci {

struct BlockResult {
    std::uint64_t seed = 0;
    std::uint64_t block = 0;
    double R0 = 0.0, R1 = 0.0, R2 = 0.0;
    double dist_x = 0.0, dist_y = 0.0;
    double runtime_ms = 0.0;

    double total() const { return R0 + R1 + R2; }
};

struct TheoryTargets {
    double R0 = 0.0, R1 = 0.0, R2 = 0.0;
    double R_total = 0.0;
    // NaN where the common information is not known in closed form
    double CI = std::numeric_limits<double>::quiet_NaN();
    double dist_x = 0.0, dist_y = 0.0;
};

struct ExperimentRecord {
    std::string scenario;
    std::string config_hash;
    std::size_t N = 0;
    TheoryTargets theory;
    std::vector<BlockResult> blocks;
    std::vector<std::string> cache_ids;
    std::map<std::string, double> extra;
    double wall_ms = 0.0;

    template <class F>
    double mean(F field) const
    {
        if (blocks.empty())
            return 0.0;
        double s = 0.0;
        for (const auto& b : blocks)
            s += field(b);
        return s / static_cast<double>(blocks.size());
    }

    template <class F>
    double std_error(F field) const
    {
        std::size_t n = blocks.size();
        if (n < 2)
            return 0.0;
        double m = mean(field), ss = 0.0;
        for (const auto& b : blocks)
            ss += (field(b) - m) * (field(b) - m);
        return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    }
};

struct Margins {
    double lossless = 0.04; // added to the conditional entropy for stored-set size
    double lossy = 0.05;    // added to the level rate targets of lattice quantizers
};

// Shared settings of every simulated pipeline.
struct PipelineContext {
    polar::ProfileStore* store = nullptr;
    std::size_t samples = 1000;
    std::uint64_t construction_seed = 1;
    double polar_beta = 0.25;
    unsigned threads = 1;
    Margins margins;
    std::vector<std::uint64_t> seeds{1};
    std::size_t blocks = 10;
    bool timing = false;
};

} // namespace gwci
