#include "gwci/dsbs.hpp"
#include "gwci/error.hpp"
#include "gwci/gaussian.hpp"
#include "gwci/harness.hpp"
#include "gwci/lattice.hpp"
#include "gwci/polar.hpp"
#include "gwci/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

namespace gwci::harness {

namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// Region predicates written out as disjoint conditions, independent of the
// precedence order used by the classifiers.
int gaussian_truth(double d1, double d2, double rho, int& hits)
{
    using R = gaussian::Region;
    double sum = d1 + d2 - d1 * d2, r2 = rho * rho;
    bool both_lt = d1 < 1.0 && d2 < 1.0;
    bool ratio_ok = (1.0 - d1) >= r2 * (1.0 - d2) && (1.0 - d2) >= r2 * (1.0 - d1);
    bool e10 = d1 <= 1.0 - rho && d2 <= 1.0 - rho;
    bool pred[5] = {
        e10,
        !e10 && both_lt && sum <= 1.0 - r2,
        both_lt && sum > 1.0 - r2 && ratio_ok,
        ((d1 >= 1.0) != (d2 >= 1.0)) || (both_lt && sum > 1.0 - r2 && !ratio_ok),
        d1 >= 1.0 && d2 >= 1.0,
    };
    const R order[5] = {R::E10, R::E11, R::E2, R::E3, R::Zero};
    hits = 0;
    int which = -1;
    for (int i = 0; i < 5; ++i)
        if (pred[i]) {
            ++hits;
            which = static_cast<int>(order[i]);
        }
    return which;
}

int dsbs_truth(double d1, double d2, const dsbs::DsbsModel& m, int& hits)
{
    using R = dsbs::Region;
    bool both_lt = d1 < 0.5 && d2 < 0.5;
    double conv = binary_convolve(d1, d2);
    bool ratio_ok = both_lt && (d2 - d1) / (1.0 - 2.0 * d1) <= m.a0 && (d1 - d2) / (1.0 - 2.0 * d2) <= m.a0;
    bool e10 = d1 <= m.a1 && d2 <= m.a1;
    bool pred[5] = {
        e10,
        !e10 && both_lt && conv <= m.a0,
        both_lt && conv > m.a0 && ratio_ok,
        ((d1 >= 0.5) != (d2 >= 0.5)) || (both_lt && conv > m.a0 && !ratio_ok),
        d1 >= 0.5 && d2 >= 0.5,
    };
    const R order[5] = {R::E10, R::E11, R::E2, R::E3, R::BeyondHalf};
    hits = 0;
    int which = -1;
    for (int i = 0; i < 5; ++i)
        if (pred[i]) {
            ++hits;
            which = static_cast<int>(order[i]);
        }
    return which;
}

struct Crossings {
    std::map<std::pair<int, int>, int> count;
    double max_jump = 0.0;
    int total = 0;
};

// Bisects short random segments whose endpoints carry different labels and
// compares the rate function on both sides of the boundary.
void scan_boundaries(CounterRng& rng, double lo, double hi, int segments, const std::function<int(double, double)>& label,
                     const std::function<double(double, double)>& rate, Crossings& out)
{
    for (int t = 0; t < segments; ++t) {
        double ax = lo + (hi - lo) * rng.uniform(), ay = lo + (hi - lo) * rng.uniform();
        double ang = 2.0 * M_PI * rng.uniform(), len = 0.02 * (hi - lo);
        double bx = std::clamp(ax + len * std::cos(ang), lo, hi), by = std::clamp(ay + len * std::sin(ang), lo, hi);
        int la = label(ax, ay), lb = label(bx, by);
        if (la == lb)
            continue;
        for (int it = 0; it < 80; ++it) {
            double mx = 0.5 * (ax + bx), my = 0.5 * (ay + by);
            if (mx == ax && my == ay)
                break;
            if (mx == bx && my == by)
                break;
            int lm = label(mx, my);
            if (lm == la) {
                ax = mx;
                ay = my;
            } else {
                bx = mx;
                by = my;
                lb = lm;
            }
        }
        out.count[{std::min(la, lb), std::max(la, lb)}]++;
        out.max_jump = std::max(out.max_jump, std::fabs(rate(ax, ay) - rate(bx, by)));
        ++out.total;
    }
}

} // namespace

PropertyResult check_transform_involution(std::uint64_t seed)
{
    PropertyResult r{"polar_transform_involution", true, ""};
    CounterRng rng(seed, derive_stream(0x696e766f6cULL));
    std::size_t tested = 0;
    for (std::size_t N = 1; N <= 1024; N *= 2)
        for (int rep = 0; rep < 8; ++rep) {
            polar::Bits x(N);
            for (auto& b : x)
                b = static_cast<std::uint8_t>(rng.next_u64() & 1);
            if (polar::polar_transform(polar::polar_transform(x)) != x) {
                r.passed = false;
                r.detail = "G_N G_N != I at N=" + std::to_string(N);
                return r;
            }
            ++tested;
        }
    r.detail = std::to_string(tested) + " vectors up to N=1024";
    return r;
}

PropertyResult check_chain_rule(std::uint64_t seed)
{
    PropertyResult r{"chain_rule_rate", false, ""};
    auto red = gaussian::reduce_pair(gaussian::GaussianPairModel(0.8));
    auto chain = lattice::choose_chain(red.mmse);
    lattice::BuildOptions opt;
    auto code = lattice::build_multilevel_code(chain, red.mmse, 1024, 0.25, 1000, seed, opt);
    double sum = 0.0;
    for (double v : code.level_mi)
        sum += v;
    double rel = std::fabs(sum - code.direct_mi) / code.direct_mi;
    auto exact = lattice::level_information(chain, red.mmse);
    double rel_exact = std::fabs(sum - exact.total()) / exact.total();
    r.passed = rel <= 0.01 && rel_exact <= 0.01;
    r.detail = fmt("sum of level MI %.6f vs direct %.6f (rel %.2e)", sum, code.direct_mi, rel) +
               fmt("; quadrature %.6f (rel %.2e)", exact.total(), rel_exact);
    return r;
}

PropertyResult check_region_partition(std::uint64_t seed, std::size_t points)
{
    PropertyResult r{"region_partition", true, ""};
    CounterRng rng(seed, derive_stream(0x726567696f6eULL));
    std::size_t bad = 0;
    for (double a0 : {0.11, 0.05, 0.3}) {
        dsbs::DsbsModel m(a0);
        for (std::size_t i = 0; i < points; ++i) {
            double d1 = 0.7 * rng.uniform(), d2 = 0.7 * rng.uniform();
            int hits = 0;
            int want = dsbs_truth(d1, d2, m, hits);
            if (hits != 1 || want != static_cast<int>(dsbs::classify_dsbs(d1, d2, m)))
                ++bad;
        }
    }
    for (double rho : {0.8, 0.5, 0.3}) {
        gaussian::GaussianPairModel m(rho);
        for (std::size_t i = 0; i < points; ++i) {
            double d1 = 1.2 * rng.uniform(), d2 = 1.2 * rng.uniform();
            int hits = 0;
            int want = gaussian_truth(d1, d2, rho, hits);
            if (hits != 1 || want != static_cast<int>(gaussian::classify_gaussian(d1, d2, m)))
                ++bad;
        }
    }
    r.passed = bad == 0;
    r.detail = std::to_string(6 * points) + " points, " + std::to_string(bad) + " without exactly one matching label";
    return r;
}

PropertyResult check_rxy_continuity(std::uint64_t seed)
{
    PropertyResult r{"rxy_boundary_continuity", true, ""};
    CounterRng rng(seed, derive_stream(0x636f6e74ULL));
    Crossings cd, cg;
    dsbs::DsbsModel dm(0.11);
    scan_boundaries(
        rng, 0.0, 0.7, 40000, [&](double a, double b) { return static_cast<int>(dsbs::classify_dsbs(a, b, dm)); },
        [&](double a, double b) { return dsbs::r_xy_dsbs(a, b, dm); }, cd);
    gaussian::GaussianPairModel gm(0.8);
    scan_boundaries(
        rng, 0.0, 1.2, 40000, [&](double a, double b) { return static_cast<int>(gaussian::classify_gaussian(a, b, gm)); },
        [&](double a, double b) { return gaussian::r_xy_gaussian(a, b, gm); }, cg);
    double jump = std::max(cd.max_jump, cg.max_jump);
    r.passed = jump <= 1e-9 && cd.total >= 100 && cg.total >= 100;
    r.detail = std::to_string(cd.total) + " dsbs and " + std::to_string(cg.total) +
               " gaussian boundary points over " + std::to_string(cd.count.size() + cg.count.size()) +
               " boundary types" + fmt("; max jump %.3e", jump);
    return r;
}

PropertyResult check_discrete_gaussian_normalization()
{
    PropertyResult r{"discrete_gaussian_normalization", true, ""};
    double worst = 0.0;
    for (double s : {0.25, 0.5, 1.0, 2.0})
        for (double sigma : {0.3, 0.9, 2.5})
            for (double c : {0.0, 0.37, -1.1}) {
                auto pmf = discrete_gaussian_pmf(s, sigma, c);
                double total = 0.0;
                for (double p : pmf.prob)
                    total += p;
                // reference mass from a much wider direct sum
                long K = static_cast<long>(std::ceil(60.0 * sigma / s)) + 2;
                long kc = std::lround(c / s);
                double z = 0.0;
                for (long k = kc - K; k <= kc + K; ++k) {
                    double d = (s * k - c) / sigma;
                    z += std::exp(-0.5 * d * d);
                }
                double dev = std::fabs(total - 1.0);
                for (std::size_t i = 0; i < pmf.prob.size(); ++i) {
                    double d = (pmf.points[i] - c) / sigma;
                    dev = std::max(dev, std::fabs(pmf.prob[i] - std::exp(-0.5 * d * d) / z));
                }
                worst = std::max(worst, dev);
            }
    r.passed = worst <= 1e-12;
    r.detail = fmt("max deviation %.3e over 36 (s, sigma, center) triples", worst);
    return r;
}

PropertyResult check_flatness_monotonicity()
{
    PropertyResult r{"flatness_sigma_monotone", true, ""};
    std::size_t violations = 0, tested = 0;
    for (double s : {0.5, 1.0, 3.0}) {
        double prev = flatness_factor(s, 0.1 * s);
        for (int i = 1; i <= 60; ++i) {
            double sigma = s * (0.1 + 0.025 * i);
            double f = flatness_factor(s, sigma);
            if (f > prev + 1e-15)
                ++violations;
            prev = f;
            ++tested;
        }
    }
    r.passed = violations == 0;
    r.detail = std::to_string(tested) + " steps, " + std::to_string(violations) + " increases";
    return r;
}

PropertyResult check_eps2_covariance(std::uint64_t seed)
{
    PropertyResult r{"eps2_covariance_sum", true, ""};
    CounterRng rng(seed, derive_stream(0x636f76ULL));
    double worst_sum = 0.0, worst_det = 0.0;
    std::size_t tested = 0;
    while (tested < 2000) {
        double rho = 0.05 + 0.9 * rng.uniform();
        double d1 = rng.uniform(), d2 = rng.uniform();
        gaussian::GaussianPairModel m(rho);
        if (gaussian::classify_gaussian(d1, d2, m) != gaussian::Region::E2)
            continue;
        auto ch = gaussian::eps2_channel(d1, d2, m);
        const double K2[2][2] = {{1.0, rho}, {rho, 1.0}};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                worst_sum = std::max(worst_sum, std::fabs(ch.k_rec[i][j] + ch.k_noise[i][j] - K2[i][j]));
        worst_det = std::max(worst_det, std::fabs(ch.k_rec[0][0] * ch.k_rec[1][1] - ch.k_rec[0][1] * ch.k_rec[1][0]));
        ++tested;
    }
    r.passed = worst_sum <= 1e-12 && worst_det <= 1e-12;
    r.detail = fmt("2000 eps2 points; max |K_rec + K_noise - K2| %.3e; max |det K_rec| %.3e", worst_sum, worst_det);
    return r;
}

PropertyResult check_llr_equivalence(double rho, std::uint64_t seed, std::size_t samples)
{
    PropertyResult r{fmt("llr_equivalence_rho_%.2g", rho), true, ""};
    auto red = gaussian::reduce_pair(gaussian::GaussianPairModel(rho));
    auto chain = lattice::choose_chain(red.mmse);
    lattice::LevelModel model(chain, red.mmse);
    CounterRng rng(seed, derive_stream(0x6c6c72ULL, static_cast<std::uint64_t>(rho * 1000)));
    const double a = std::sqrt(1.0 + rho) / std::sqrt(2.0), b = std::sqrt(1.0 - rho) / std::sqrt(2.0);
    double worst = 0.0;
    for (std::size_t t = 0; t < samples; ++t) {
        double z1 = rng.normal(), z2 = rng.normal();
        double x = a * z1 + b * z2, y = a * z1 - b * z2;
        std::uint32_t label = static_cast<std::uint32_t>(rng.next_u64());
        for (int l = 1; l <= chain.r; ++l) {
            std::uint32_t lower = label & ((1u << (l - 1)) - 1u);
            double pair = gaussian::pair_level_llr(l, x, y, lower, chain, rho);
            double reduced = model.cond_llr(l, 0.5 * (x + y), lower);
            worst = std::max(worst, std::fabs(pair - reduced));
        }
    }
    r.passed = worst <= 1e-9;
    r.detail = std::to_string(samples) + " samples x " + std::to_string(chain.r) + " levels" +
               fmt("; max |pair - reduced| %.3e", worst);
    return r;
}

std::vector<PropertyResult> run_property_suite(const PropertyOptions& opt)
{
    std::vector<PropertyResult> out;
    auto guarded = [&](const char* name, const std::function<PropertyResult()>& fn) {
        try {
            out.push_back(fn());
        } catch (const std::exception& e) {
            out.push_back({name, false, std::string("threw: ") + e.what()});
        }
    };
    guarded("polar_transform_involution", [&] { return check_transform_involution(opt.seed); });
    guarded("chain_rule_rate", [&] { return check_chain_rule(opt.seed); });
    guarded("region_partition", [&] { return check_region_partition(opt.seed, opt.region_points); });
    guarded("rxy_boundary_continuity", [&] { return check_rxy_continuity(opt.seed); });
    guarded("discrete_gaussian_normalization", [] { return check_discrete_gaussian_normalization(); });
    guarded("flatness_sigma_monotone", [] { return check_flatness_monotonicity(); });
    guarded("eps2_covariance_sum", [&] { return check_eps2_covariance(opt.seed); });
    guarded("llr_equivalence_rho_0.5", [&] { return check_llr_equivalence(0.5, opt.seed, opt.llr_samples); });
    guarded("llr_equivalence_rho_0.8", [&] { return check_llr_equivalence(0.8, opt.seed, opt.llr_samples); });
    return out;
}

} // namespace gwci::harness
