#include "gwci/numerics.hpp"

#include "gwci/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace gwci {

double binary_entropy(double p)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw DomainError("binary_entropy: p must lie in [0,1], got " + std::to_string(p));
    if (p == 0.0 || p == 1.0)
        return 0.0;
    return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
}

double binary_convolve(double a, double b)
{
    if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0))
        throw DomainError("binary_convolve: arguments must lie in [0,1]");
    return a * (1.0 - b) + b * (1.0 - a);
}

double entropy_from_llr(double L)
{
    double a = std::fabs(L);
    double e = std::exp(-a);
    double p = e / (1.0 + e);
    return (p * a + std::log1p(e)) * kLog2e;
}

double bhattacharyya_from_llr(double L)
{
    double x = 0.5 * std::fabs(L);
    double e = std::exp(-x);
    return 2.0 * e / (1.0 + e * e);
}

double one_minus_bhattacharyya_from_llr(double L)
{
    // (sqrt(q) - sqrt(p))^2 with p = e/(1+e), e = exp(-|L|)
    double a = std::fabs(L);
    double m = std::expm1(-0.5 * a);
    return m * m / (1.0 + std::exp(-a));
}

LlrStats llr_stats(double L)
{
    double a = std::fabs(L);
    double r = std::exp(-0.5 * a);
    double e = r * r;
    double m = a < 1.0 ? std::expm1(-0.5 * a) : r - 1.0;
    double inv = 1.0 / (1.0 + e);
    return {2.0 * r * inv, m * m * inv, (e * inv * a + std::log1p(e)) * kLog2e};
}

double log_sum_exp(const double* v, std::size_t n)
{
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        m = std::max(m, v[i]);
    if (!std::isfinite(m))
        return m;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += std::exp(v[i] - m);
    return m + std::log(s);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double DiscreteGaussianPmf::at_index(long k) const
{
    long j = k - k_first;
    if (j < 0 || j >= static_cast<long>(prob.size()))
        return 0.0;
    return prob[j];
}

static void check_dg_args(double s, double sigma)
{
    if (!(s > 0.0) || !(sigma > 0.0) || !std::isfinite(s) || !std::isfinite(sigma))
        throw DomainError("discrete Gaussian: scale and sigma must be positive and finite");
}

double discrete_gaussian_tail_bound(double s, double sigma, double center, long K)
{
    check_dg_args(s, sigma);
    (void)center; // the bound only uses |k0 s - c| <= s/2
    double v = sigma * sigma;
    double R = (static_cast<double>(K) + 0.5) * s;
    double log_b = std::log(2.0) - R * R / (2.0 * v) + s * s / (8.0 * v) - std::log1p(-std::exp(-R * s / v));
    return std::exp(log_b);
}

long discrete_gaussian_radius(double s, double sigma, double center, double tail)
{
    check_dg_args(s, sigma);
    if (!(tail > 0.0 && tail < 1.0))
        throw DomainError("discrete Gaussian: tail bound must lie in (0,1)");
    // jump close to the answer, then walk
    double v = sigma * sigma;
    long K = std::max(0L, static_cast<long>(std::sqrt(2.0 * v * std::log(2.0 / tail)) / s) - 2);
    while (discrete_gaussian_tail_bound(s, sigma, center, K) > tail)
        ++K;
    return K;
}

DiscreteGaussianPmf discrete_gaussian_pmf(const DiscreteGaussianSpec& spec, double tail)
{
    check_dg_args(spec.s, spec.sigma);
    if (spec.K < 0)
        throw DomainError("discrete Gaussian: truncation radius must be nonnegative");
    double bound = discrete_gaussian_tail_bound(spec.s, spec.sigma, spec.center, spec.K);
    if (bound > tail)
        throw TruncationError("discrete Gaussian: radius K=" + std::to_string(spec.K) + " leaves tail bound " +
                              std::to_string(bound) + " above " + std::to_string(tail));
    DiscreteGaussianPmf out;
    out.spec = spec;
    out.tail_bound = bound;
    long k0 = std::lround(spec.center / spec.s);
    out.k_first = k0 - spec.K;
    std::size_t n = static_cast<std::size_t>(2 * spec.K + 1);
    out.points.resize(n);
    out.prob.resize(n);
    double v = spec.sigma * spec.sigma;
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double lam = static_cast<double>(out.k_first + static_cast<long>(j)) * spec.s;
        double d = lam - spec.center;
        out.points[j] = lam;
        out.prob[j] = std::exp(-d * d / (2.0 * v));
        z += out.prob[j];
    }
    for (double& p : out.prob)
        p /= z;
    return out;
}

DiscreteGaussianPmf discrete_gaussian_pmf(double s, double sigma, double center, double tail)
{
    DiscreteGaussianSpec spec{s, sigma, center, discrete_gaussian_radius(s, sigma, center, tail)};
    return discrete_gaussian_pmf(spec, tail);
}

double aliased_gaussian(double s, double sigma, double x)
{
    check_dg_args(s, sigma);
    // terms beyond 9 sigma fall below 1e-17 relative to the peak
    long M = static_cast<long>(std::ceil(9.0 * sigma / s)) + 2;
    long kc = std::lround(x / s);
    double v = sigma * sigma;
    double acc = 0.0;
    for (long k = kc - M; k <= kc + M; ++k) {
        double d = x - static_cast<double>(k) * s;
        acc += std::exp(-d * d / (2.0 * v));
    }
    return acc * s / (std::sqrt(2.0 * M_PI) * sigma);
}

double flatness_factor(const FlatnessQuery& q)
{
    check_dg_args(q.s, q.sigma);
    if (q.grid_resolution < 64)
        throw DomainError("flatness_factor: grid resolution must be at least 64");
    auto dev = [&](double x) { return std::fabs(aliased_gaussian(q.s, q.sigma, x) - 1.0); };
    int n = q.grid_resolution;
    double h = q.s / n;
    int best = 0;
    double best_v = -1.0;
    for (int j = 0; j < n; ++j) {
        double v = dev(j * h);
        if (v > best_v) {
            best_v = v;
            best = j;
        }
    }
    // golden-section refinement on the bracketing cells
    double a = (best - 1) * h, b = (best + 1) * h;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = dev(c), fd = dev(d);
    for (int it = 0; it < 80 && (b - a) > 1e-15 * q.s; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = dev(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = dev(d);
        }
    }
    return std::max({best_v, fc, fd});
}

double flatness_factor(double s, double sigma) { return flatness_factor(FlatnessQuery{s, sigma, 64}); }

namespace {

struct GridAxis {
    double lo, h;
    int n;
};

template <class Fn>
void walk_grid(const Box& box, int n, Fn&& visit)
{
    std::size_t dim = box.lo.size();
    if (dim == 0 || box.hi.size() != dim)
        throw DomainError("integrate_box: malformed box");
    if (n < 3 || n % 2 == 0)
        throw DomainError("integrate_box: resolution must be odd and at least 3");
    std::vector<GridAxis> ax(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        if (!(box.hi[d] > box.lo[d]))
            throw DomainError("integrate_box: empty box");
        ax[d] = {box.lo[d], (box.hi[d] - box.lo[d]) / (n - 1), n};
    }
    std::vector<int> idx(dim, 0);
    std::vector<double> x(dim);
    double cell_fine = 1.0, cell_coarse = 1.0;
    for (auto& a : ax) {
        cell_fine *= a.h;
        cell_coarse *= 2.0 * a.h;
    }
    for (;;) {
        double wf = cell_fine, wc = cell_coarse;
        for (std::size_t d = 0; d < dim; ++d) {
            int i = idx[d];
            x[d] = ax[d].lo + i * ax[d].h;
            bool end = (i == 0 || i == n - 1);
            if (end) {
                wf *= 0.5;
                wc *= 0.5;
            }
            if (i % 2)
                wc = 0.0;
        }
        visit(x.data(), wf, wc);
        std::size_t d = 0;
        while (d < dim && ++idx[d] == n) {
            idx[d] = 0;
            ++d;
        }
        if (d == dim)
            break;
    }
}

} // namespace

QuadResult integrate_box(const Box& box, int n, const std::function<double(const double*)>& fn)
{
    double fine = 0.0, coarse = 0.0;
    walk_grid(box, n, [&](const double* x, double wf, double wc) {
        double v = fn(x);
        fine += wf * v;
        coarse += wc * v;
    });
    return {fine, std::fabs(fine - coarse)};
}

QuadResult variation_distance_2d(const Density2& f, const Density2& g, const Box& box, int resolution)
{
    if (box.lo.size() != 2)
        throw DomainError("variation_distance_2d: box must be two-dimensional");
    double v_f = 0, v_c = 0, mf_f = 0, mf_c = 0, mg_f = 0, mg_c = 0;
    walk_grid(box, resolution, [&](const double* x, double wf, double wc) {
        double a = f(x[0], x[1]), b = g(x[0], x[1]);
        double d = std::fabs(a - b);
        v_f += wf * d;
        v_c += wc * d;
        mf_f += wf * a;
        mf_c += wc * a;
        mg_f += wf * b;
        mg_c += wc * b;
    });
    double tol = 1e-9;
    if (mf_f < 1.0 - tol - std::fabs(mf_f - mf_c) || mg_f < 1.0 - tol - std::fabs(mg_f - mg_c)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "variation_distance_2d: box holds only %.12f / %.12f of the masses", mf_f, mg_f);
        throw QuadratureError(buf);
    }
    return {v_f, std::fabs(v_f - v_c)};
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h)
{
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace gwci
