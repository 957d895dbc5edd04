#include "gwci/gaussian.hpp"

#include "gwci/blocks.hpp"
#include "gwci/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace gwci::gaussian {

GaussianPairModel::GaussianPairModel(double r) : rho(r)
{
    if (!(r > 0.0 && r < 1.0))
        throw DomainError("correlation rho must lie in (0,1)");
}

LGaussianModel::LGaussianModel(int l, double r) : L(l), rho(r)
{
    if (l < 2)
        throw DomainError("L must be at least 2");
    if (!(r > 0.0 && r < 1.0))
        throw DomainError("correlation rho must lie in (0,1)");
}

std::vector<double> LGaussianModel::covariance() const
{
    std::vector<double> K(static_cast<std::size_t>(L) * L, rho);
    for (int i = 0; i < L; ++i)
        K[static_cast<std::size_t>(i) * L + i] = 1.0;
    return K;
}

double det_closed_form(const LGaussianModel& m)
{
    return (1.0 + (m.L - 1) * m.rho) * std::pow(1.0 - m.rho, m.L - 1);
}

std::vector<double> cholesky(const std::vector<double>& K, int n)
{
    if (K.size() != static_cast<std::size_t>(n) * n)
        throw DomainError("cholesky: matrix size mismatch");
    std::vector<double> C(K.size(), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            double s = K[i * n + j];
            for (int k = 0; k < j; ++k)
                s -= C[i * n + k] * C[j * n + k];
            if (i == j) {
                if (!(s > 0.0))
                    throw DomainError("cholesky: matrix is not positive definite");
                C[i * n + i] = std::sqrt(s);
            } else {
                C[i * n + j] = s / C[j * n + j];
            }
        }
    return C;
}

double det_numeric(const std::vector<double>& K, int n)
{
    auto C = cholesky(K, n);
    double d = 1.0;
    for (int i = 0; i < n; ++i)
        d *= C[i * n + i] * C[i * n + i];
    return d;
}

const char* region_name(Region r)
{
    switch (r) {
    case Region::E10: return "eps10";
    case Region::E11: return "eps11";
    case Region::E2: return "eps2";
    case Region::E3: return "eps3";
    case Region::Zero: return "zero";
    }
    return "?";
}

Region classify_gaussian(double d1, double d2, const GaussianPairModel& m)
{
    if (!(d1 >= 0.0 && d2 >= 0.0))
        throw DomainError("distortions must be nonnegative");
    const double rho = m.rho;
    if (d1 >= 1.0 && d2 >= 1.0)
        return Region::Zero;
    if (d1 <= 1.0 - rho && d2 <= 1.0 - rho)
        return Region::E10;
    if (d1 >= 1.0 || d2 >= 1.0)
        return Region::E3;
    if (d1 + d2 - d1 * d2 <= 1.0 - rho * rho)
        return Region::E11;
    double e1 = 1.0 - d1, e2 = 1.0 - d2, r2 = rho * rho;
    return (e1 >= r2 * e2 && e2 >= r2 * e1) ? Region::E2 : Region::E3;
}

double r_xy_gaussian(double d1, double d2, const GaussianPairModel& m)
{
    const double rho = m.rho;
    switch (classify_gaussian(d1, d2, m)) {
    case Region::E10:
    case Region::E11:
        return 0.5 * std::log2((1.0 - rho * rho) / (d1 * d2));
    case Region::E2: {
        double c = rho - std::sqrt((1.0 - d1) * (1.0 - d2));
        return 0.5 * std::log2((1.0 - rho * rho) / (d1 * d2 - c * c));
    }
    case Region::E3:
        return 0.5 * std::log2(1.0 / std::min(d1, d2));
    case Region::Zero:
        return 0.0;
    }
    return 0.0;
}

double wyner_ci_pair(const GaussianPairModel& m) { return 0.5 * std::log2((1.0 + m.rho) / (1.0 - m.rho)); }

double wyner_ci_L(const LGaussianModel& m) { return 0.5 * std::log2(1.0 + m.L * m.rho / (1.0 - m.rho)); }

std::optional<double> lossy_ci_gaussian(double d1, double d2, const GaussianPairModel& m)
{
    switch (classify_gaussian(d1, d2, m)) {
    case Region::E10: return wyner_ci_pair(m);
    case Region::E11: return std::nullopt;
    case Region::E2:
    case Region::E3: return r_xy_gaussian(d1, d2, m);
    case Region::Zero: return 0.0;
    }
    return std::nullopt;
}

Eps2GaussianChannel eps2_channel(double d1, double d2, const GaussianPairModel& m)
{
    Region r = classify_gaussian(d1, d2, m);
    if (r != Region::E2)
        throw RegionMismatch(std::string("distortion pair lies in ") + region_name(r) + ", not eps2");
    Eps2GaussianChannel c;
    c.delta1 = 1.0 - d1;
    c.delta2 = 1.0 - d2;
    double g = std::sqrt(c.delta1 * c.delta2);
    c.k_rec = {{{c.delta1, g}, {g, c.delta2}}};
    c.k_noise = {{{d1, m.rho - g}, {m.rho - g, d2}}};
    c.slope = std::sqrt(c.delta2 / c.delta1);
    return c;
}

ReductionResult reduce_pair(const GaussianPairModel& m)
{
    ReductionResult r;
    r.weights = {0.5, 0.5};
    r.sigma_s2 = (1.0 + m.rho) / 2.0;
    r.sigma_r2 = m.rho;
    r.mmse = lattice::mmse_params(r.sigma_s2, r.sigma_r2);
    return r;
}

ReductionResult reduce_L(const LGaussianModel& m)
{
    ReductionResult r;
    r.weights.assign(m.L, 1.0 / m.L);
    r.sigma_s2 = (1.0 + (m.L - 1) * m.rho) / m.L;
    r.sigma_r2 = m.rho;
    r.mmse = lattice::mmse_params(r.sigma_s2, r.sigma_r2);
    return r;
}

ReductionResult reduce_eps2(double d1, double d2, const GaussianPairModel& m)
{
    auto ch = eps2_channel(d1, d2, m);
    double e1 = ch.delta1, e2 = ch.delta2, g = std::sqrt(e1 * e2), rho = m.rho;
    double den = e1 + e2 - 2.0 * rho * g;
    ReductionResult r;
    r.weights = {(e1 - rho * g) / den, (g - rho * e1) / den};
    r.sigma_r2 = e1;
    r.sigma_s2 = e1 * (1.0 - rho * rho) / den;
    r.mmse = lattice::mmse_params(r.sigma_s2, r.sigma_r2);
    r.slope = ch.slope;
    return r;
}

double pair_level_llr(int level, double x, double y, std::uint32_t lower, const lattice::PartitionChainSpec& chain,
                      double rho)
{
    if (level < 1 || level > chain.r)
        throw DomainError("pair_level_llr: level outside the chain");
    if (!(rho > 0.0 && rho < 1.0))
        throw DomainError("pair_level_llr: rho must lie in (0,1)");
    const double s = chain.s, v = 1.0 - rho;
    const double spread = std::sqrt(rho) + std::sqrt(v) + std::fabs(x) + std::fabs(y);
    const std::int64_t K = static_cast<std::int64_t>(std::ceil(40.0 * spread / s)) + (std::int64_t{1} << level);
    const std::int64_t mod = std::int64_t{1} << level;
    std::vector<double> e[2];
    for (std::int64_t k = -K; k <= K; ++k) {
        std::int64_t res = ((k % mod) + mod) % mod;
        if (static_cast<std::uint32_t>(res & (mod / 2 - 1)) != lower)
            continue;
        double p = s * static_cast<double>(k);
        double val = -p * p / (2.0 * rho) - ((x - p) * (x - p) + (y - p) * (y - p)) / (2.0 * v);
        e[(res >> (level - 1)) & 1].push_back(val);
    }
    double L = log_sum_exp(e[0].data(), e[0].size()) - log_sum_exp(e[1].data(), e[1].size());
    if (std::isnan(L))
        return 0.0;
    return std::clamp(L, -polar::kLlrClamp, polar::kLlrClamp);
}

std::string GaussianTask::label() const
{
    char buf[96];
    switch (kind) {
    case Kind::Common: std::snprintf(buf, sizeof buf, "common(rho=%.6g)", rho); break;
    case Kind::CommonL: std::snprintf(buf, sizeof buf, "common-L(L=%d,rho=%.6g)", L, rho); break;
    case Kind::Eps10: std::snprintf(buf, sizeof buf, "eps10(%.6g,%.6g)", delta1, delta2); break;
    case Kind::Eps2: std::snprintf(buf, sizeof buf, "eps2(%.6g,%.6g)", delta1, delta2); break;
    case Kind::Eps3: std::snprintf(buf, sizeof buf, "eps3(%.6g,%.6g)", delta1, delta2); break;
    }
    return buf;
}

TheoryTargets gaussian_theory(const GaussianTask& t)
{
    TheoryTargets th;
    using K = GaussianTask::Kind;
    switch (t.kind) {
    case K::Common: {
        GaussianPairModel m(t.rho);
        th.R0 = th.CI = wyner_ci_pair(m);
        th.dist_x = th.dist_y = 1.0 - t.rho;
        break;
    }
    case K::CommonL: {
        LGaussianModel m(t.L, t.rho);
        th.R0 = th.CI = wyner_ci_L(m);
        th.dist_x = th.dist_y = 1.0 - t.rho;
        break;
    }
    case K::Eps10: {
        GaussianPairModel m(t.rho);
        th.R0 = th.CI = wyner_ci_pair(m);
        th.R1 = 0.5 * std::log2((1.0 - t.rho) / t.delta1);
        th.R2 = 0.5 * std::log2((1.0 - t.rho) / t.delta2);
        th.dist_x = t.delta1;
        th.dist_y = t.delta2;
        break;
    }
    case K::Eps2:
    case K::Eps3: {
        GaussianPairModel m(t.rho);
        th.R0 = th.CI = r_xy_gaussian(t.delta1, t.delta2, m);
        th.dist_x = t.delta1;
        th.dist_y = t.delta2;
        break;
    }
    }
    th.R_total = th.R0 + th.R1 + th.R2;
    return th;
}

void gaussian_source(const std::vector<double>& chol, int dim, std::uint64_t seed, std::uint64_t block, std::size_t n,
                     std::vector<double>& out)
{
    CounterRng rng = source_rng(seed, block);
    out.assign(n * dim, 0.0);
    std::vector<double> z(dim);
    for (std::size_t j = 0; j < n; ++j) {
        for (int i = 0; i < dim; ++i)
            z[i] = rng.normal();
        for (int i = 0; i < dim; ++i) {
            double v = 0.0;
            for (int k = 0; k <= i; ++k)
                v += chol[i * dim + k] * z[k];
            out[j * dim + i] = v;
        }
    }
}

} // namespace gwci::gaussian
