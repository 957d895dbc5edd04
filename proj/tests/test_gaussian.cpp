#include "doctest.h"

#include "gwci/error.hpp"
#include "gwci/gaussian.hpp"
#include "gwci/numerics.hpp"
#include "gwci/rng.hpp"

#include <cmath>

using namespace gwci;
using namespace gwci::gaussian;

TEST_CASE("model construction and determinants")
{
    CHECK_THROWS_AS(GaussianPairModel(1.0), DomainError);
    CHECK_THROWS_AS(LGaussianModel(1, 0.5), DomainError);
    for (int L : {2, 3, 5, 8})
        for (double rho : {0.1, 0.5, 0.9}) {
            LGaussianModel m(L, rho);
            CHECK(det_numeric(m.covariance(), L) == doctest::Approx(det_closed_form(m)).epsilon(1e-10));
        }
    auto C = cholesky({4, 2, 2, 3}, 2);
    CHECK(C[0] == doctest::Approx(2.0));
    CHECK(C[2] == doctest::Approx(1.0));
    CHECK(C[3] == doctest::Approx(std::sqrt(2.0)));
    CHECK_THROWS_AS(cholesky({1, 2, 2, 1}, 2), DomainError);
}

TEST_CASE("Gaussian regions and rate-distortion values")
{
    GaussianPairModel m(0.8);
    CHECK(classify_gaussian(0.1, 0.1, m) == Region::E10);
    CHECK(classify_gaussian(0.5, 0.5, m) == Region::E2);
    CHECK(classify_gaussian(0.9, 0.1, m) == Region::E3);
    CHECK(classify_gaussian(1.2, 1.2, m) == Region::Zero);
    CHECK(classify_gaussian(0.25, 0.1, m) == Region::E11);
    CHECK(r_xy_gaussian(0.1, 0.1, m) == doctest::Approx(0.5 * std::log2(0.36 / 0.01)));
    CHECK(r_xy_gaussian(0.5, 0.5, m) == doctest::Approx(0.5 * std::log2(2.25)));
    CHECK(*lossy_ci_gaussian(0.1, 0.1, m) == doctest::Approx(0.5 * std::log2(9.0)));
    CHECK(*lossy_ci_gaussian(0.5, 0.5, m) == doctest::Approx(0.5 * std::log2(2.25)));
    CHECK(*lossy_ci_gaussian(1.2, 1.2, m) == 0.0);
    CHECK_FALSE(lossy_ci_gaussian(0.25, 0.1, m).has_value());
    CHECK(wyner_ci_L(LGaussianModel(2, 0.8)) == doctest::Approx(wyner_ci_pair(m)).epsilon(1e-12));
    CHECK(wyner_ci_L(LGaussianModel(4, 0.5)) == doctest::Approx(0.5 * std::log2(5.0)));
    CHECK(wyner_ci_L(LGaussianModel(4, 1e-9)) < 1e-8);
}

TEST_CASE("reductions")
{
    GaussianPairModel m(0.8);
    auto p = reduce_pair(m);
    CHECK(p.sigma_s2 == doctest::Approx(0.9));
    CHECK(p.mmse.alpha == doctest::Approx(0.8888888889));
    CHECK(p.mmse.sigma_tilde2 == doctest::Approx(0.0888888889));

    auto l2 = reduce_L(LGaussianModel(2, 0.8));
    CHECK(l2.sigma_s2 == doctest::Approx(p.sigma_s2));
    CHECK(l2.mmse.sigma_tilde2 == doctest::Approx(p.mmse.sigma_tilde2));
    auto l4 = reduce_L(LGaussianModel(4, 0.5));
    CHECK(l4.sigma_s2 == doctest::Approx(0.625));
    CHECK(l4.mmse.alpha == doctest::Approx(4 * 0.5 / 2.5));
    CHECK(reduce_L(LGaussianModel(5, 0.5)).mmse.sigma_tilde2 < l4.mmse.sigma_tilde2);

    auto e = reduce_eps2(0.5, 0.5, m);
    CHECK(std::fabs(e.weights[0] - 0.5) < 1e-12);
    CHECK(std::fabs(e.weights[1] - 0.5) < 1e-12);
    CHECK(e.sigma_s2 == doctest::Approx(0.9));
    CHECK(e.mmse.alpha == doctest::Approx(0.2 / 0.36));
    CHECK(e.mmse.sigma_tilde2 == doctest::Approx(0.5 * 0.16 / 0.36));
    CHECK(e.mmse.sigma_tilde2 == doctest::Approx(eps2_bound_sigma(0.5, 0.5, m) * eps2_bound_sigma(0.5, 0.5, m)));
    CHECK_THROWS_AS(reduce_eps2(0.1, 0.1, m), RegionMismatch);

    // sample variance of the combined source
    const int n = 1000000;
    auto C = cholesky(LGaussianModel(2, 0.8).covariance(), 2);
    std::vector<double> src;
    gaussian_source(C, 2, 1, 0, n, src);
    double s = 0, s2 = 0;
    for (int j = 0; j < n; ++j) {
        double u = 0.5 * (src[2 * j] + src[2 * j + 1]);
        s += u;
        s2 += u * u;
    }
    double var = s2 / n - (s / n) * (s / n);
    double se = 0.9 * std::sqrt(2.0 / n);
    CHECK(std::fabs(var - 0.9) < 3 * se);
}

TEST_CASE("eps2 channel decomposition")
{
    GaussianPairModel m(0.8);
    auto ch = eps2_channel(0.4, 0.55, m);
    const double K2[2][2] = {{1, 0.8}, {0.8, 1}};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(std::fabs(ch.k_rec[i][j] + ch.k_noise[i][j] - K2[i][j]) < 1e-12);
    CHECK(std::fabs(ch.k_rec[0][0] * ch.k_rec[1][1] - ch.k_rec[0][1] * ch.k_rec[1][0]) < 1e-12);
    CHECK(ch.slope == doctest::Approx(std::sqrt(0.45 / 0.6)));
}

TEST_CASE("pair-form LLRs agree with the reduced form")
{
    for (double rho : {0.5, 0.8}) {
        auto red = reduce_pair(GaussianPairModel(rho));
        auto chain = lattice::choose_chain(red.mmse);
        lattice::LevelModel model(chain, red.mmse);
        CounterRng rng(7, static_cast<std::uint64_t>(rho * 10));
        for (int t = 0; t < 300; ++t) {
            double x = 2 * rng.normal(), y = x + 0.5 * rng.normal();
            std::uint32_t lab = static_cast<std::uint32_t>(rng.next_u64());
            for (int l = 1; l <= chain.r; ++l) {
                std::uint32_t lower = lab & ((1u << (l - 1)) - 1);
                CHECK(std::fabs(pair_level_llr(l, x, y, lower, chain, rho) -
                                model.cond_llr(l, 0.5 * (x + y), lower)) < 1e-9);
            }
        }
    }
}

TEST_CASE("lemma checks")
{
    GaussianPairModel m(0.8);
    double sigma = pair_bound_sigma(m);
    CHECK(sigma == doctest::Approx(std::sqrt(0.8 * 0.2 / 1.8)));
    double s = scale_for_flatness(sigma, 0.005);
    CHECK(flatness_factor(s, sigma) <= 0.005);
    auto r = verify_pair_bound(m, s, 201);
    CHECK(r.vd_computed);
    CHECK(r.vd <= r.vd_bound());
    CHECK(r.mi_gap <= r.mi_bound());

    // halving the scale collapses the flatness factor and the distance with it
    auto half = verify_pair_bound(m, s / 2, 201);
    CHECK(half.epsilon < 1e-6 * r.epsilon);
    CHECK(half.vd < 1e-2 * r.vd + half.vd_error + 1e-9);

    LGaussianModel l3(3, 0.5);
    double s3 = scale_for_flatness(multi_bound_sigma(l3), 0.005);
    auto r3 = verify_multi_bound(l3, s3, 61);
    CHECK(r3.vd_ok());
    CHECK(r3.mi_ok());

    LGaussianModel l5(5, 0.5);
    auto r5 = verify_multi_bound(l5, scale_for_flatness(multi_bound_sigma(l5), 0.005), 61, 20000);
    CHECK_FALSE(r5.vd_computed);
    CHECK(r5.mi_ok());

    auto e = verify_eps2_bound(0.5, 0.5, m, scale_for_flatness(eps2_bound_sigma(0.5, 0.5, m), 0.005), 201);
    CHECK(e.vd_ok());
    CHECK(e.mi_ok());
    CHECK_THROWS_AS(scale_for_flatness(1.0, 1e-300), FlatnessError);
}

TEST_CASE("variation distance of shifted Gaussians")
{
    auto f = [](double x, double y) { return std::exp(-0.5 * (x * x + y * y)) / (2 * M_PI); };
    auto g = [](double x, double y) { return std::exp(-0.5 * ((x - 0.1) * (x - 0.1) + y * y)) / (2 * M_PI); };
    Box b{{-9, -9}, {9, 9}};
    auto r = variation_distance_2d(f, g, b, 401);
    CHECK(r.value == doctest::Approx(2 * (2 * normal_cdf(0.05) - 1)).epsilon(1e-4));
    CHECK(variation_distance_2d(f, f, b, 101).value < 1e-12);
    Box small{{-1, -1}, {1, 1}};
    CHECK_THROWS_AS(variation_distance_2d(f, g, small, 101), QuadratureError);
}

TEST_CASE("Gaussian pipelines at small block length")
{
    PipelineContext ctx;
    ctx.seeds = {1};
    ctx.blocks = 2;
    GaussianTask common;
    auto rc = run_gaussian_pipeline(common, 1024, ctx);
    CHECK(rc.theory.R0 == doctest::Approx(0.5 * std::log2(9.0)));
    for (const auto& b : rc.blocks) {
        CHECK(b.R0 == doctest::Approx(1.585).epsilon(0.15));
        CHECK(b.dist_x == doctest::Approx(0.2).epsilon(0.5));
    }

    GaussianTask e10;
    e10.kind = GaussianTask::Kind::Eps10;
    e10.delta1 = e10.delta2 = 0.1;
    CHECK(gaussian_theory(e10).R_total == doctest::Approx(r_xy_gaussian(0.1, 0.1, GaussianPairModel(0.8))));
    auto r10 = run_gaussian_pipeline(e10, 1024, ctx);
    CHECK(r10.extra.at("residual_var_x") == doctest::Approx(0.2).epsilon(0.3));
    for (const auto& b : r10.blocks) {
        CHECK(b.R1 > 0.0);
        CHECK(b.dist_x < 0.2);
    }
    GaussianTask edge = e10;
    edge.delta1 = edge.delta2 = 0.2;
    CHECK(gaussian_theory(edge).R1 == doctest::Approx(0.0));

    GaussianTask wrong;
    wrong.kind = GaussianTask::Kind::Eps2;
    wrong.delta1 = wrong.delta2 = 0.1;
    CHECK_THROWS_AS(run_gaussian_pipeline(wrong, 1024, ctx), RegionMismatch);
}
