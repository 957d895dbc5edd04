#pragma once

#include "gwci/channel.hpp"
#include "gwci/record.hpp"

#include <array>
#include <optional>
#include <string>

namespace gwci::dsbs {

// Uniform X, Y = X xor Z with Z ~ Ber(a0).
struct DsbsModel {
    double a0 = 0.11;
    double a1 = 0.0;

    explicit DsbsModel(double a0);
};

// a1 = 1/2 - (1/2) sqrt(1 - 2 a0), the solution of a1 * a1 = a0 in [0, 1/2].
double derive_a1(double a0);

struct RateTriple {
    double R0 = 0.0, R1 = 0.0, R2 = 0.0;
    double total() const { return R0 + R1 + R2; }
};

double joint_entropy(const DsbsModel& m);
double wyner_ci_dsbs(const DsbsModel& m);

// The three Gray-Wyner cut-set inequalities, with slack tol.
bool satisfies_gray_wyner(const RateTriple& r, const DsbsModel& m, double tol = 1e-9);

enum class Region { E10, E11, E2, E3, BeyondHalf };
const char* region_name(Region r);

Region classify_dsbs(double d1, double d2, const DsbsModel& m);
double r_xy_dsbs(double d1, double d2, const DsbsModel& m);
// Empty on E11, where the value is not known.
std::optional<double> lossy_ci_dsbs(double d1, double d2, const DsbsModel& m);

// P(x,y|w) = BSC(a1)(x|w) BSC(a1)(y|w); observation index 2x + y.
polar::SideInfoChannel build_point_g_channel(const DsbsModel& m);

struct GbChannel {
    polar::SideInfoChannel channel;
    double beta = 0.0;
    double rho = 0.0; // beta = a1 * rho
    RateTriple theory;
};
// Throws DomainError unless a1 <= beta <= 1/2.
GbChannel build_gb_channel(const DsbsModel& m, double beta);

struct DsbsEps2Channel {
    double d1 = 0.0, d2 = 0.0;
    // pz[z1][z2] = P(X xor W = z1, Y xor W = z2)
    std::array<std::array<double, 2>, 2> pz{};

    double prob(unsigned x, unsigned y, unsigned w) const { return pz[x ^ w][y ^ w]; }
    polar::SideInfoChannel channel() const;
};
// Throws RegionMismatch outside E2.
DsbsEps2Channel build_eps2_channel(double d1, double d2, const DsbsModel& m);

// d2 with a1 = d1 * d2, for 0 <= d1 <= a1.
double ag_partner(double a1, double d1);

struct DsbsPoint {
    enum class Kind { A, G, AG, GB, LossyE10, LossyE2, LossyE3 };
    Kind kind = Kind::G;
    double d1 = 0.0;   // AG knob
    double beta = 0.0; // GB knob
    double delta1 = 0.0, delta2 = 0.0;

    std::string label() const;
};

// Theory triple and distortion targets of one operating point.
TheoryTargets dsbs_theory(const DsbsPoint& p, const DsbsModel& m);

ExperimentRecord run_dsbs_pipeline(const DsbsPoint& p, const DsbsModel& m, std::size_t N, const PipelineContext& ctx);

// One DSBS source block, reproducible from (seed, block).
void dsbs_source(const DsbsModel& m, std::uint64_t seed, std::uint64_t block, std::size_t N, polar::Bits& x,
                 polar::Bits& y);

} // namespace gwci::dsbs
