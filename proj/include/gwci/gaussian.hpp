#pragma once

#include "gwci/lattice.hpp"
#include "gwci/numerics.hpp"
#include "gwci/record.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace gwci::gaussian {

// Unit-variance pair with correlation rho.
struct GaussianPairModel {
    double rho = 0.8;
    explicit GaussianPairModel(double rho);
};

// L unit-variance sources with common pairwise correlation rho.
struct LGaussianModel {
    int L = 2;
    double rho = 0.5;
    LGaussianModel(int L, double rho);

    std::vector<double> covariance() const; // row-major L x L
};

// (1 + (L-1) rho) (1 - rho)^{L-1}
double det_closed_form(const LGaussianModel& m);
// Determinant by Cholesky factorization; throws DomainError if not positive definite.
double det_numeric(const std::vector<double>& K, int n);
// Lower-triangular factor, row-major.
std::vector<double> cholesky(const std::vector<double>& K, int n);

enum class Region { E10, E11, E2, E3, Zero };
const char* region_name(Region r);

Region classify_gaussian(double d1, double d2, const GaussianPairModel& m);
double r_xy_gaussian(double d1, double d2, const GaussianPairModel& m);
std::optional<double> lossy_ci_gaussian(double d1, double d2, const GaussianPairModel& m);
double wyner_ci_pair(const GaussianPairModel& m);
double wyner_ci_L(const LGaussianModel& m);

using Mat2 = std::array<std::array<double, 2>, 2>;

struct Eps2GaussianChannel {
    double delta1 = 0.0, delta2 = 0.0; // 1 - distortion
    Mat2 k_rec{};                      // covariance of (X', Y')
    Mat2 k_noise{};                    // covariance of (Z1, Z2)
    double slope = 1.0;                // Y' = slope X'
};
// Throws RegionMismatch outside E2.
Eps2GaussianChannel eps2_channel(double d1, double d2, const GaussianPairModel& m);

struct ReductionResult {
    std::vector<double> weights; // combined source U = sum_i weights[i] X_i
    double sigma_s2 = 0.0;
    double sigma_r2 = 0.0;
    lattice::MmseParams mmse;
    double slope = 1.0; // second reconstruction = slope * first (E2 only)
};

ReductionResult reduce_pair(const GaussianPairModel& m);
ReductionResult reduce_L(const LGaussianModel& m);
ReductionResult reduce_eps2(double d1, double d2, const GaussianPairModel& m);

// Level LLR computed from the pair (x, y) directly: brute-force coset sums of
// exp(-(sk)^2 / 2 rho - ((x - sk)^2 + (y - sk)^2) / 2 (1 - rho)). Clamped like level_llr.
double pair_level_llr(int level, double x, double y, std::uint32_t lower, const lattice::PartitionChainSpec& chain,
                      double rho);

// Lattice settings shared by the Gaussian pipelines.
struct LatticeSettings {
    double target_flatness = 1e-3;
    std::optional<int> levels;
};

struct GaussianTask {
    enum class Kind { Common, CommonL, Eps10, Eps2, Eps3 };
    Kind kind = Kind::Common;
    double rho = 0.8;
    int L = 2;
    double delta1 = 0.0, delta2 = 0.0;

    std::string label() const;
};

TheoryTargets gaussian_theory(const GaussianTask& t);

// Common-message extraction (pair, L sources, E2 and E3 reductions).
ExperimentRecord extract_common(const GaussianTask& task, std::size_t N, const PipelineContext& ctx,
                                const LatticeSettings& ls = {});
// Common message plus private residual refinements on E10.
ExperimentRecord refine_private_eps10(const GaussianTask& task, std::size_t N, const PipelineContext& ctx,
                                      const LatticeSettings& ls = {});
// Dispatches on task.kind.
ExperimentRecord run_gaussian_pipeline(const GaussianTask& task, std::size_t N, const PipelineContext& ctx,
                                       const LatticeSettings& ls = {});

// Seeded correlated normals through the Cholesky factor; out is n x dim, row-major.
void gaussian_source(const std::vector<double>& chol, int dim, std::uint64_t seed, std::uint64_t block, std::size_t n,
                     std::vector<double>& out);

// ---- numeric lemma checks -------------------------------------------------

struct LemmaReport {
    std::string name;
    double s = 0.0;
    double sigma = 0.0;   // argument of the flatness factor
    double epsilon = 0.0; // flatness factor at (s, sigma)
    bool vd_computed = false;
    double vd = 0.0, vd_error = 0.0;
    double mi_gap = 0.0, mi_error = 0.0;

    double vd_bound() const { return 4.0 * epsilon; }
    double mi_bound() const { return 5.0 * epsilon * kLog2e; }
    bool vd_ok() const { return !vd_computed || vd <= vd_bound(); }
    bool mi_ok() const { return mi_gap <= mi_bound(); }
};

// Largest s on a fine grid with flatness_factor(s, sigma) <= eps_target.
double scale_for_flatness(double sigma, double eps_target);

double pair_bound_sigma(const GaussianPairModel& m);
double multi_bound_sigma(const LGaussianModel& m);
double eps2_bound_sigma(double d1, double d2, const GaussianPairModel& m);

LemmaReport verify_pair_bound(const GaussianPairModel& m, double s, int resolution = 401);
// Quadrature for L <= 3; Monte-Carlo entropy estimate only for larger L.
LemmaReport verify_multi_bound(const LGaussianModel& m, double s, int resolution = 121, std::size_t mc_samples = 200000);
LemmaReport verify_eps2_bound(double d1, double d2, const GaussianPairModel& m, double s, int resolution = 401);

} // namespace gwci::gaussian
