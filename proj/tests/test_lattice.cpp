#include "doctest.h"

#include "gwci/error.hpp"
#include "gwci/lattice.hpp"
#include "gwci/numerics.hpp"
#include "gwci/rng.hpp"

#include <cmath>

using namespace gwci;
using namespace gwci::lattice;

namespace {

// Two-coset sum over a wide index range, straight from the definition.
double brute_llr(int level, double t, std::uint32_t lower, const PartitionChainSpec& c, const MmseParams& m)
{
    double acc[2] = {0, 0}, center = m.alpha * t, sd = std::sqrt(m.sigma_tilde2);
    for (long k = -3000; k <= 3000; ++k) {
        long mod = 1L << level;
        long res = ((k % mod) + mod) % mod;
        if ((res & ((1L << (level - 1)) - 1)) != static_cast<long>(lower))
            continue;
        double d = (c.s * k - center) / sd;
        acc[(res >> (level - 1)) & 1] += std::exp(-0.5 * d * d);
    }
    return std::log(acc[0] / acc[1]);
}

MmseParams pair_mmse() { return mmse_params(0.9, 0.8); }

} // namespace

TEST_CASE("MMSE constants")
{
    auto m = pair_mmse();
    CHECK(m.alpha == doctest::Approx(8.0 / 9.0));
    CHECK(m.sigma_tilde2 == doctest::Approx(0.8 * 0.2 / 1.8));
    int L = 4;
    double rho = 0.5;
    auto ml = mmse_params((1 + (L - 1) * rho) / L, rho);
    CHECK(ml.alpha == doctest::Approx(L * rho / (1 + (L - 1) * rho)));
    CHECK(mmse_params(1.0, 1.0 - 1e-9).sigma_tilde2 < 1e-8);
    CHECK_THROWS_AS(mmse_params(0.5, 0.9), DomainError);
}

TEST_CASE("level LLRs against brute-force coset sums")
{
    auto m = pair_mmse();
    PartitionChainSpec c{0.35, 4, std::sqrt(0.8)};
    LevelModel model(c, m);
    CounterRng rng(2, 9);
    for (int t = 0; t < 50; ++t) {
        double x = 3.0 * rng.normal();
        std::uint32_t lab = static_cast<std::uint32_t>(rng.next_u64());
        for (int l = 1; l <= c.r; ++l) {
            std::uint32_t lower = lab & ((1u << (l - 1)) - 1);
            double want = brute_llr(l, x, lower, c, m);
            CHECK(model.cond_llr(l, x, lower) == doctest::Approx(want).epsilon(1e-9).scale(1.0));
        }
    }
    // midway between the two level-1 cosets the channel is silent
    CHECK(std::fabs(level_llr(1, 0.5 * c.s / m.alpha, 0, c, m)) < 1e-9);
    // deep level with tiny noise relative to the coset spacing
    PartitionChainSpec deep{0.35, 6, 1.0};
    CHECK(std::fabs(level_llr(6, 0.0, 0, deep, m)) > 50.0);
    CHECK_THROWS_AS(level_llr(5, 0.0, 0, c, m), DomainError);
}

TEST_CASE("labels and representatives")
{
    PartitionChainSpec c{0.5, 3, 1.0};
    LevelModel model(c, pair_mmse());
    CHECK(model.label_index(0) == 0);
    CHECK(model.label_index(3) == 3);
    CHECK(model.label_index(4) == -4);
    CHECK(model.label_index(7) == -1);
    CHECK(model.representative(7) == doctest::Approx(-0.5));
}

TEST_CASE("level information sums to the test-channel information")
{
    auto m = pair_mmse();
    auto c = choose_chain(m);
    CHECK(flatness_factor(c.s, std::sqrt(m.sigma_tilde2)) <= 1e-3);
    auto info = level_information(c, m);
    CHECK(info.total() == doctest::Approx(0.5 * std::log2(9.0)).epsilon(0.01));
    CHECK(info.mutual_info.front() < 0.01);
    CHECK(info.prior_entropy.back() <= 0.01);
    ChainChoice fixed;
    fixed.levels = 4;
    CHECK(choose_chain(m, fixed).r == 4);
    ChainChoice impossible;
    impossible.target_flatness = 1e-300;
    CHECK_THROWS_AS(choose_chain(m, impossible), FlatnessError);
}

TEST_CASE("multilevel code quantizes and reconstructs")
{
    auto m = pair_mmse();
    auto c = choose_chain(m);
    const std::size_t N = 1024;
    auto code = build_multilevel_code(c, m, N, 0.25, 1000, 3);
    CHECK(code.flatness == flatness_factor(c.s, std::sqrt(m.sigma_tilde2)));
    CHECK(code.levels.size() == static_cast<std::size_t>(c.r));
    double sum = 0;
    for (double v : code.level_rates)
        sum += v;
    CHECK(sum == doctest::Approx(code.total_rate));
    double mi = 0;
    for (double v : code.level_mi)
        mi += v;
    CHECK(mi == doctest::Approx(code.direct_mi).epsilon(0.02));

    CounterRng rng(4, 4);
    std::vector<double> t(N);
    for (auto& v : t)
        v = std::sqrt(0.9) * rng.normal();
    polar::ScEngine eng(N);
    auto q = lattice_quantize(t, code, {1, 0}, eng);
    REQUIRE(q.payloads.size() == code.levels.size());
    for (std::size_t l = 0; l < q.payloads.size(); ++l)
        CHECK(q.payloads[l].size() >= code.levels[l].count(polar::BitClass::Info));
    CHECK(lattice_reconstruct(q.payloads, code, {1, 0}, eng) == q.reconstruction);
    double mse = 0;
    for (std::size_t j = 0; j < N; ++j)
        mse += (t[j] - q.reconstruction[j]) * (t[j] - q.reconstruction[j]);
    mse /= N;
    CHECK(mse == doctest::Approx(0.1).epsilon(0.5));

    auto bad = q.payloads;
    bad.pop_back();
    CHECK_THROWS_AS(lattice_reconstruct(bad, code, {1, 0}, eng), DomainError);

    BuildOptions strict;
    strict.target_flatness = code.flatness / 2;
    CHECK_THROWS_AS(build_multilevel_code(c, m, N, 0.25, 1000, 3, strict), FlatnessError);
}

TEST_CASE("scaling s and sigma together scales the reconstruction")
{
    auto m = pair_mmse();
    auto c = choose_chain(m);
    const std::size_t N = 512;
    auto a = build_multilevel_code(c, m, N, 0.25, 1000, 8);
    PartitionChainSpec c2 = c;
    c2.s *= 2.0;
    c2.sigma_r *= 2.0;
    auto m2 = mmse_params(4.0 * m.sigma_s2, 4.0 * m.sigma_r2);
    auto b = build_multilevel_code(c2, m2, N, 0.25, 1000, 8);
    CounterRng rng(6, 1);
    std::vector<double> t(N), t2(N);
    for (std::size_t j = 0; j < N; ++j) {
        t[j] = std::sqrt(0.9) * rng.normal();
        t2[j] = 2.0 * t[j];
    }
    polar::ScEngine eng(N);
    auto qa = lattice_quantize(t, a, {2, 2}, eng);
    auto qb = lattice_quantize(t2, b, {2, 2}, eng);
    double ea = 0, eb = 0;
    for (std::size_t j = 0; j < N; ++j) {
        CHECK(qb.reconstruction[j] == doctest::Approx(2.0 * qa.reconstruction[j]));
        ea += std::pow(t[j] - qa.reconstruction[j], 2);
        eb += std::pow(t2[j] - qb.reconstruction[j], 2);
    }
    CHECK(eb == doctest::Approx(4.0 * ea));
}

TEST_CASE("constant source sitting on a lattice point")
{
    // coset spacing far above the test-channel noise: every level sees a sharp posterior at t = 0
    auto m = pair_mmse();
    PartitionChainSpec c{8.0 * std::sqrt(m.sigma_tilde2), 3, std::sqrt(m.sigma_r2)};
    BuildOptions opt;
    opt.target_flatness = 1e9;
    const std::size_t N = 256;
    auto code = build_multilevel_code(c, m, N, 0.25, 1000, 5, opt);
    set_total_rate(code, 10.0);
    std::vector<double> t(N, 0.0);
    polar::ScEngine eng(N);
    auto q = lattice_quantize(t, code, {3, 0}, eng);
    for (double v : q.reconstruction)
        CHECK(v == 0.0);
}
