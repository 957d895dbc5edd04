#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

namespace gwci {

inline constexpr double kLog2e = 1.4426950408889634074;

// Binary entropy in bits. Throws DomainError for p outside [0,1].
double binary_entropy(double p);

// a*b = a(1-b) + b(1-a)
double binary_convolve(double a, double b);

// Entropy in bits of the Bernoulli law with log-likelihood ratio L = log P(0)/P(1).
double entropy_from_llr(double L);

// Bhattacharyya factor 2 sqrt(p(1-p)) and its complement, both from an LLR.
double bhattacharyya_from_llr(double L);
double one_minus_bhattacharyya_from_llr(double L);

struct LlrStats {
    double z, omz, h;
};
// All three of the above from one LLR.
LlrStats llr_stats(double L);

double log_sum_exp(const double* v, std::size_t n);
double normal_cdf(double x);

struct DiscreteGaussianSpec {
    double s = 1.0;
    double sigma = 1.0;
    double center = 0.0;
    long K = 0; // lattice points kept on each side of the point nearest the center
};

struct DiscreteGaussianPmf {
    DiscreteGaussianSpec spec;
    long k_first = 0; // lattice index of points[0]
    std::vector<double> points;
    std::vector<double> prob;
    double tail_bound = 0.0;

    double at_index(long k) const;
};

// Smallest K meeting the relative tail bound via the geometric Gaussian tail inequality.
long discrete_gaussian_radius(double s, double sigma, double center, double tail = 1e-12);
double discrete_gaussian_tail_bound(double s, double sigma, double center, long K);

// Throws TruncationError when spec.K does not meet the tail bound.
DiscreteGaussianPmf discrete_gaussian_pmf(const DiscreteGaussianSpec& spec, double tail = 1e-12);
DiscreteGaussianPmf discrete_gaussian_pmf(double s, double sigma, double center = 0.0, double tail = 1e-12);

struct FlatnessQuery {
    double s = 1.0;
    double sigma = 1.0;
    int grid_resolution = 64;
};

// s * f_{sigma, sZ}(x), the aliased Gaussian scaled by the lattice volume.
double aliased_gaussian(double s, double sigma, double x);

double flatness_factor(const FlatnessQuery& q);
double flatness_factor(double s, double sigma);

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

struct Box {
    std::vector<double> lo, hi;
};

// Tensor trapezoid rule with n points per axis; the error estimate compares
// against the rule on every other point.
QuadResult integrate_box(const Box& box, int n, const std::function<double(const double*)>& fn);

using Density2 = std::function<double(double, double)>;

// Throws QuadratureError if the box holds less than 1 - 1e-9 of either mass.
QuadResult variation_distance_2d(const Density2& f, const Density2& g, const Box& box, int resolution);

// 64-bit FNV-1a, used for content hashes of channel descriptions and configs.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

} // namespace gwci
