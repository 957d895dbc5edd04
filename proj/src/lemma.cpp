#include "gwci/error.hpp"
#include "gwci/gaussian.hpp"
#include "gwci/numerics.hpp"
#include "gwci/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace gwci::gaussian {

namespace {

constexpr double kBox = 9.0;

struct GridSums {
    double vd = 0.0, mass_f = 0.0, mass_g = 0.0, hf = 0.0, hg = 0.0;

    void add(double w, double f, double g)
    {
        vd += w * std::fabs(f - g);
        mass_f += w * f;
        mass_g += w * g;
        if (f > 0.0)
            hf -= w * f * std::log2(f);
        if (g > 0.0)
            hg -= w * g * std::log2(g);
    }
};

double trap(int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }

void fill_report(LemmaReport& r, const GridSums& fine, const GridSums& coarse)
{
    double err_f = std::fabs(fine.mass_f - coarse.mass_f), err_g = std::fabs(fine.mass_g - coarse.mass_g);
    if (fine.mass_f < 1.0 - 1e-9 - err_f || fine.mass_g < 1.0 - 1e-9 - err_g)
        throw QuadratureError("lemma check: integration box misses part of the probability mass");
    r.vd_computed = true;
    r.vd = fine.vd;
    r.vd_error = std::fabs(fine.vd - coarse.vd);
    r.mi_gap = std::fabs(fine.hf - fine.hg);
    r.mi_error = std::fabs(r.mi_gap - std::fabs(coarse.hf - coarse.hg));
}

// Tensor trapezoid sums of f and g over [-kBox, kBox]^2; f, g indexed by grid point.
template <class F, class G>
void grid2(int n, F f, G g, GridSums& fine, GridSums& coarse)
{
    double h = 2.0 * kBox / (n - 1);
    int nc = (n + 1) / 2;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double fv = f(i, j), gv = g(i, j);
            fine.add(trap(i, n) * trap(j, n) * h * h, fv, gv);
            if (i % 2 == 0 && j % 2 == 0)
                coarse.add(trap(i / 2, nc) * trap(j / 2, nc) * 4.0 * h * h, fv, gv);
        }
}

double grid_x(int i, int n) { return -kBox + 2.0 * kBox * i / (n - 1); }

int odd(int n) { return n % 2 ? n : n + 1; }

double normal_pdf(double x, double var) { return std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * M_PI * var); }

} // namespace

double scale_for_flatness(double sigma, double eps_target)
{
    for (int i = 400; i >= 10; --i) {
        double s = sigma * i / 100.0;
        if (flatness_factor(s, sigma) <= eps_target)
            return s;
    }
    throw FlatnessError("no lattice scale reaches the requested flatness", flatness_factor(0.1 * sigma, sigma));
}

double pair_bound_sigma(const GaussianPairModel& m) { return std::sqrt(m.rho * (1.0 - m.rho) / (1.0 + m.rho)); }

double multi_bound_sigma(const LGaussianModel& m) { return std::sqrt(m.rho * (1.0 - m.rho) / (1.0 + (m.L - 1) * m.rho)); }

double eps2_bound_sigma(double d1, double d2, const GaussianPairModel& m)
{
    double e1 = 1.0 - d1, e2 = 1.0 - d2, c = m.rho - std::sqrt(e1 * e2);
    return std::sqrt(e1 * (d1 * d2 - c * c) / (1.0 - m.rho * m.rho));
}

LemmaReport verify_pair_bound(const GaussianPairModel& m, double s, int resolution)
{
    LemmaReport r;
    r.name = "pair";
    r.s = s;
    r.sigma = pair_bound_sigma(m);
    r.epsilon = flatness_factor(s, r.sigma);
    int n = odd(resolution);
    const double rho = m.rho, v = 1.0 - rho;
    auto D = discrete_gaussian_pmf(s, std::sqrt(rho), 0.0, 1e-14);
    std::size_t K = D.prob.size();
    std::vector<double> tab(static_cast<std::size_t>(n) * K);
    for (int i = 0; i < n; ++i)
        for (std::size_t k = 0; k < K; ++k)
            tab[i * K + k] = normal_pdf(grid_x(i, n) - D.points[k], v);
    const double det = 1.0 - rho * rho, nf = 1.0 / (2.0 * M_PI * std::sqrt(det));
    auto f = [&](int i, int j) {
        double x = grid_x(i, n), y = grid_x(j, n);
        return nf * std::exp(-(x * x - 2.0 * rho * x * y + y * y) / (2.0 * det));
    };
    auto g = [&](int i, int j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < K; ++k)
            acc += D.prob[k] * tab[i * K + k] * tab[j * K + k];
        return acc;
    };
    GridSums fine, coarse;
    grid2(n, f, g, fine, coarse);
    fill_report(r, fine, coarse);
    return r;
}

LemmaReport verify_eps2_bound(double d1, double d2, const GaussianPairModel& m, double s, int resolution)
{
    auto ch = eps2_channel(d1, d2, m);
    LemmaReport r;
    r.name = "eps2";
    r.s = s;
    r.sigma = eps2_bound_sigma(d1, d2, m);
    r.epsilon = flatness_factor(s, r.sigma);
    int n = odd(resolution);
    const double rho = m.rho;
    auto D = discrete_gaussian_pmf(s, std::sqrt(ch.delta1), 0.0, 1e-14);
    const auto& Kz = ch.k_noise;
    double dz = Kz[0][0] * Kz[1][1] - Kz[0][1] * Kz[1][0];
    if (!(dz > 0.0))
        throw DomainError("lemma check: noise covariance is singular");
    double ia = Kz[1][1] / dz, ib = -Kz[0][1] / dz, ic = Kz[0][0] / dz, nz = 1.0 / (2.0 * M_PI * std::sqrt(dz));
    const double det = 1.0 - rho * rho, nf = 1.0 / (2.0 * M_PI * std::sqrt(det));
    auto f = [&](int i, int j) {
        double x = grid_x(i, n), y = grid_x(j, n);
        return nf * std::exp(-(x * x - 2.0 * rho * x * y + y * y) / (2.0 * det));
    };
    auto g = [&](int i, int j) {
        double x = grid_x(i, n), y = grid_x(j, n), acc = 0.0;
        for (std::size_t k = 0; k < D.prob.size(); ++k) {
            double a = x - D.points[k], b = y - ch.slope * D.points[k];
            acc += D.prob[k] * nz * std::exp(-0.5 * (ia * a * a + 2.0 * ib * a * b + ic * b * b));
        }
        return acc;
    };
    GridSums fine, coarse;
    grid2(n, f, g, fine, coarse);
    fill_report(r, fine, coarse);
    return r;
}

LemmaReport verify_multi_bound(const LGaussianModel& m, double s, int resolution, std::size_t mc_samples)
{
    LemmaReport r;
    r.name = "L=" + std::to_string(m.L);
    r.s = s;
    r.sigma = multi_bound_sigma(m);
    r.epsilon = flatness_factor(s, r.sigma);
    const double rho = m.rho, v = 1.0 - rho;
    auto D = discrete_gaussian_pmf(s, std::sqrt(rho), 0.0, 1e-14);
    const std::size_t K = D.prob.size();
    const int L = m.L;
    auto Kmat = m.covariance();
    auto C = cholesky(Kmat, L);
    double logdet = 0.0;
    for (int i = 0; i < L; ++i)
        logdet += 2.0 * std::log(C[i * L + i]);

    if (L == 2) {
        GaussianPairModel pm(rho);
        auto rep = verify_pair_bound(pm, s, resolution);
        rep.name = r.name;
        rep.sigma = r.sigma;
        rep.epsilon = r.epsilon;
        return rep;
    }
    if (L == 3) {
        int n = odd(resolution);
        double h = 2.0 * kBox / (n - 1);
        int nc = (n + 1) / 2;
        std::vector<double> tab(static_cast<std::size_t>(n) * K);
        for (int i = 0; i < n; ++i)
            for (std::size_t k = 0; k < K; ++k)
                tab[i * K + k] = normal_pdf(grid_x(i, n) - D.points[k], v);
        // K_3^{-1} = (I - c J) / (1 - rho) with c = rho / (1 + 2 rho)
        double c = rho / (1.0 + 2.0 * rho), nf = std::exp(-0.5 * logdet) / std::pow(2.0 * M_PI, 1.5);
        std::vector<double> pq(K);
        GridSums fine, coarse;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                for (std::size_t k = 0; k < K; ++k)
                    pq[k] = D.prob[k] * tab[i * K + k] * tab[j * K + k];
                for (int l = 0; l < n; ++l) {
                    double x = grid_x(i, n), y = grid_x(j, n), z = grid_x(l, n);
                    double sum = x + y + z, sq = x * x + y * y + z * z;
                    double fv = nf * std::exp(-0.5 * (sq - c * sum * sum) / v);
                    double gv = 0.0;
                    for (std::size_t k = 0; k < K; ++k)
                        gv += pq[k] * tab[l * K + k];
                    double w = trap(i, n) * trap(j, n) * trap(l, n) * h * h * h;
                    fine.add(w, fv, gv);
                    if (i % 2 == 0 && j % 2 == 0 && l % 2 == 0)
                        coarse.add(trap(i / 2, nc) * trap(j / 2, nc) * trap(l / 2, nc) * 8.0 * w /
                                       (trap(i, n) * trap(j, n) * trap(l, n)),
                                   fv, gv);
                }
            }
        fill_report(r, fine, coarse);
        return r;
    }

    // Monte-Carlo estimate of E_g[log g - log f] plus the exact second-moment correction.
    CounterRng rng(0x6c656d6d61ULL, static_cast<std::uint64_t>(L));
    std::vector<double> cdf(K);
    double acc = 0.0, mean_k = 0.0, var_k = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        cdf[k] = acc += D.prob[k];
        mean_k += D.prob[k] * D.points[k];
        var_k += D.prob[k] * D.points[k] * D.points[k];
    }
    var_k -= mean_k * mean_k;
    const double c = rho / (1.0 + (L - 1) * rho);
    const double tr = (var_k * L + v * L - c * var_k * L * L - c * v * L) / v;
    const double correction = 0.5 * kLog2e * (L - tr);
    const double log_nf = -0.5 * (L * std::log(2.0 * M_PI) + logdet);
    std::vector<double> x(L), lw(K);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t t = 0; t < mc_samples; ++t) {
        double u = rng.uniform() * acc;
        std::size_t k0 = std::min<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin(), K - 1);
        double sx = 0.0, sq = 0.0;
        for (int i = 0; i < L; ++i) {
            x[i] = D.points[k0] + std::sqrt(v) * rng.normal();
            sx += x[i];
            sq += x[i] * x[i];
        }
        for (std::size_t k = 0; k < K; ++k) {
            double e = 0.0;
            for (int i = 0; i < L; ++i)
                e += (x[i] - D.points[k]) * (x[i] - D.points[k]);
            lw[k] = std::log(D.prob[k]) - 0.5 * e / v;
        }
        double lg = log_sum_exp(lw.data(), K) - 0.5 * L * std::log(2.0 * M_PI * v);
        double lf = log_nf - 0.5 * (sq - c * sx * sx) / v;
        double val = (lg - lf) * kLog2e;
        sum += val;
        sum2 += val * val;
    }
    double n = static_cast<double>(mc_samples);
    double mean = sum / n, var = std::max(0.0, sum2 / n - mean * mean);
    r.vd_computed = false;
    r.mi_gap = std::fabs(mean + correction);
    r.mi_error = 3.0 * std::sqrt(var / n);
    return r;
}

} // namespace gwci::gaussian
