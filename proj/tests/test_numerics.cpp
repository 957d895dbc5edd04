#include "doctest.h"

#include "gwci/error.hpp"
#include "gwci/numerics.hpp"
#include "gwci/rng.hpp"

#include <cmath>
#include <set>

using namespace gwci;

namespace {

double h2(double p) { return -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

} // namespace

TEST_CASE("binary entropy and convolution")
{
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(binary_entropy(0.11) == doctest::Approx(0.4999159582).epsilon(1e-9));
    CHECK_THROWS_AS(binary_entropy(-0.1), DomainError);
    CHECK_THROWS_AS(binary_entropy(1.5), DomainError);
    CHECK(binary_convolve(0.1, 0.2) == doctest::Approx(0.1 * 0.8 + 0.2 * 0.9));
    CHECK(binary_convolve(0.0, 0.3) == doctest::Approx(0.3));
    CHECK(binary_convolve(0.5, 0.3) == doctest::Approx(0.5));
}

TEST_CASE("LLR statistics agree with the probability forms")
{
    for (double p : {1e-6, 0.01, 0.11, 0.3, 0.5, 0.77, 0.999}) {
        double L = std::log((1 - p) / p);
        double z = 2 * std::sqrt(p * (1 - p));
        CHECK(entropy_from_llr(L) == doctest::Approx(h2(p)).epsilon(1e-12));
        CHECK(bhattacharyya_from_llr(L) == doctest::Approx(z).epsilon(1e-12));
        CHECK(one_minus_bhattacharyya_from_llr(L) == doctest::Approx(1 - z).epsilon(1e-9));
        auto s = llr_stats(L);
        CHECK(s.z == doctest::Approx(z).epsilon(1e-12));
        CHECK(s.h == doctest::Approx(h2(p)).epsilon(1e-12));
    }
    // the complement keeps relative precision where 1 - z underflows naive evaluation
    CHECK(one_minus_bhattacharyya_from_llr(1e-6) == doctest::Approx(1e-12 / 8).epsilon(1e-6));
}

TEST_CASE("log-sum-exp")
{
    double v[3] = {1000.0, 1000.0, -1e300};
    CHECK(log_sum_exp(v, 3) == doctest::Approx(1000.0 + std::log(2.0)));
    double w[2] = {-INFINITY, -INFINITY};
    CHECK(std::isinf(log_sum_exp(w, 2)));
}

TEST_CASE("discrete Gaussian pmf against a direct wide sum")
{
    double s = 0.7, sigma = 1.3, c = 0.25;
    auto pmf = discrete_gaussian_pmf(s, sigma, c);
    double z = 0.0;
    for (long k = -400; k <= 400; ++k)
        z += std::exp(-0.5 * std::pow((s * k - c) / sigma, 2));
    double total = 0.0;
    for (std::size_t i = 0; i < pmf.prob.size(); ++i) {
        total += pmf.prob[i];
        CHECK(pmf.points[i] == doctest::Approx(s * (pmf.k_first + static_cast<long>(i))));
        CHECK(pmf.prob[i] == doctest::Approx(std::exp(-0.5 * std::pow((pmf.points[i] - c) / sigma, 2)) / z).epsilon(1e-12));
    }
    CHECK(std::fabs(total - 1.0) < 1e-12);
    CHECK(pmf.tail_bound <= 1e-12);
    CHECK(pmf.at_index(pmf.k_first - 1) == 0.0);

    DiscreteGaussianSpec tight{s, sigma, c, 1};
    CHECK_THROWS_AS(discrete_gaussian_pmf(tight), TruncationError);
}

TEST_CASE("flatness factor")
{
    // for s << sigma the aliased Gaussian is flat; by Poisson summation the deviation
    // is dominated by 2 exp(-2 pi^2 sigma^2 / s^2)
    double s = 1.0, sigma = 0.5;
    double lead = 2.0 * std::exp(-2.0 * M_PI * M_PI * sigma * sigma / (s * s));
    CHECK(flatness_factor(s, sigma) == doctest::Approx(lead).epsilon(0.01));
    CHECK(flatness_factor(1.0, 0.2) > flatness_factor(1.0, 0.3));
    // volume-normalized density integrates to one over a period
    double acc = 0.0;
    int n = 2000;
    for (int i = 0; i < n; ++i)
        acc += aliased_gaussian(s, 0.3, s * (i + 0.5) / n) / n;
    CHECK(acc == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(flatness_factor(FlatnessQuery{1.0, 1.0, 8}), DomainError);
}

TEST_CASE("quadrature over a box")
{
    Box b{{-1.0, 0.0}, {1.0, 2.0}};
    auto q = integrate_box(b, 201, [](const double* x) { return x[0] * x[0] + x[1]; });
    CHECK(q.value == doctest::Approx(4.0 / 3.0 + 4.0).epsilon(1e-4));
    CHECK(q.error < 1e-3);
}

TEST_CASE("FNV-1a reference values")
{
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
    CHECK(hex64(0x1aULL) == "000000000000001a");
}

TEST_CASE("Philox4x32-10 known-answer vectors")
{
    using A4 = std::array<std::uint32_t, 4>;
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("counter addressing")
{
    auto blk = philox4x32_10({0, 0, 7, 0}, {5, 0});
    CHECK(philox_u64(5, 7, 0) == (std::uint64_t(blk[1]) << 32 | blk[0]));
    CHECK(philox_u64(5, 7, 1) == (std::uint64_t(blk[3]) << 32 | blk[2]));
    CounterRng a(5, 7), b(5, 7, 3);
    for (int i = 0; i < 3; ++i)
        a.next_u64();
    CHECK(a.next_u64() == b.next_u64());
    std::set<std::uint64_t> streams;
    for (std::uint64_t i = 0; i < 1000; ++i)
        streams.insert(derive_stream(1, i));
    CHECK(streams.size() == 1000);
}

TEST_CASE("normal draws have unit moments")
{
    CounterRng r(42, 1);
    double m = 0, v = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double x = r.normal();
        m += x;
        v += x * x;
    }
    m /= n;
    v = v / n - m * m;
    CHECK(std::fabs(m) < 5.0 / std::sqrt(n));
    CHECK(std::fabs(v - 1.0) < 0.02);
}
