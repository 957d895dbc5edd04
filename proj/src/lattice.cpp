#include "gwci/lattice.hpp"

#include "gwci/error.hpp"
#include "gwci/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gwci::lattice {

MmseParams mmse_params(double sigma_s2, double sigma_r2)
{
    if (!(sigma_r2 > 0.0 && sigma_r2 < sigma_s2))
        throw DomainError("mmse_params: need 0 < sigma_r2 < sigma_s2");
    MmseParams m;
    m.sigma_s2 = sigma_s2;
    m.sigma_r2 = sigma_r2;
    m.alpha = sigma_r2 / sigma_s2;
    m.sigma_tilde2 = m.alpha * (sigma_s2 - sigma_r2);
    return m;
}

LevelModel::LevelModel(const PartitionChainSpec& chain, const MmseParams& mmse) : chain_(chain), mmse_(mmse)
{
    if (!(chain.s > 0.0) || chain.r < 1 || chain.r > 24)
        throw DomainError("partition chain needs s > 0 and 1 <= r <= 24");
    prior_.resize(chain.r);
    double sr = std::sqrt(mmse.sigma_r2);
    for (int l = 1; l <= chain.r; ++l) {
        prior_[l - 1].resize(std::size_t{1} << (l - 1));
        for (std::uint32_t c = 0; c < prior_[l - 1].size(); ++c)
            prior_[l - 1][c] = coset_llr(l, 0.0, sr, c);
    }
}

double LevelModel::coset_llr(int level, double center, double sd, std::uint32_t lower) const
{
    const double s = chain_.s;
    const std::int64_t step = std::int64_t{1} << (level - 1);
    double x = center / s;
    std::int64_t k0 = lower + step * static_cast<std::int64_t>(std::llround((x - lower) / static_cast<double>(step)));
    std::int64_t M = static_cast<std::int64_t>(std::ceil(kLlrTailSigmas * sd / (s * static_cast<double>(step)))) + 1;
    thread_local std::vector<double> val;
    thread_local std::vector<std::uint8_t> bit;
    val.clear();
    bit.clear();
    double mx[2] = {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (std::int64_t m = -M; m <= M; ++m) {
        std::int64_t k = k0 + m * step;
        double d = (s * static_cast<double>(k) - center) / sd;
        int b = static_cast<int>((k >> (level - 1)) & 1);
        val.push_back(-0.5 * d * d);
        bit.push_back(static_cast<std::uint8_t>(b));
        mx[b] = std::max(mx[b], val.back());
    }
    double acc[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < val.size(); ++i)
        acc[bit[i]] += std::exp(val[i] - mx[bit[i]]);
    double lse[2] = {mx[0] + std::log(acc[0]), mx[1] + std::log(acc[1])};
    double L = lse[0] - lse[1];
    if (std::isnan(L))
        return 0.0;
    return std::clamp(L, -polar::kLlrClamp, polar::kLlrClamp);
}

double LevelModel::cond_llr(int level, double t, std::uint32_t lower) const
{
    return coset_llr(level, mmse_.alpha * t, std::sqrt(mmse_.sigma_tilde2), lower);
}

std::int64_t LevelModel::label_index(std::uint32_t label) const
{
    std::int64_t k = label;
    std::int64_t half = std::int64_t{1} << (chain_.r - 1);
    return k >= half ? k - 2 * half : k;
}

double LevelModel::representative(std::uint32_t label) const
{
    return chain_.s * static_cast<double>(label_index(label));
}

double level_llr(int level, double t, std::uint32_t lower, const PartitionChainSpec& chain, const MmseParams& mmse)
{
    if (level < 1 || level > chain.r)
        throw DomainError("level_llr: level outside the chain");
    return LevelModel(chain, mmse).cond_llr(level, t, lower);
}

double LevelInformation::total() const
{
    double s = 0.0;
    for (double v : mutual_info)
        s += v;
    return s;
}

LevelInformation level_information(const PartitionChainSpec& chain, const MmseParams& mmse)
{
    auto pmf = discrete_gaussian_pmf(chain.s, std::sqrt(mmse.sigma_r2), 0.0, 1e-14);
    const int r = chain.r;
    const std::size_t mod = std::size_t{1} << r;
    const std::size_t K = pmf.prob.size();
    double v = mmse.sigma_s2 - mmse.sigma_r2;
    double sd = std::sqrt(v);
    double h = std::min(sd, std::sqrt(mmse.sigma_tilde2)) / 16.0;
    double lo = pmf.points.front() - 9.0 * sd, hi = pmf.points.back() + 9.0 * sd;
    std::size_t steps = static_cast<std::size_t>(std::ceil((hi - lo) / h));

    auto residue = [&](std::size_t i) {
        std::int64_t k = pmf.k_first + static_cast<std::int64_t>(i);
        return static_cast<std::size_t>(k & static_cast<std::int64_t>(mod - 1));
    };
    auto entropy_by_level = [&](const std::vector<double>& p, std::vector<double>& H) {
        // p indexed by residue mod 2^r; H[l] = entropy of the residue mod 2^l
        std::vector<double> q = p;
        for (int l = r; l >= 0; --l) {
            std::size_t m = std::size_t{1} << l;
            double e = 0.0;
            for (std::size_t c = 0; c < m; ++c)
                if (q[c] > 0.0)
                    e -= q[c] * std::log2(q[c]);
            H[l] += e;
            if (l > 0)
                for (std::size_t c = 0; c < m / 2; ++c)
                    q[c] += q[c + m / 2];
        }
    };

    std::vector<double> prior_res(mod, 0.0);
    for (std::size_t i = 0; i < K; ++i)
        prior_res[residue(i)] += pmf.prob[i];
    std::vector<double> Hp(r + 1, 0.0), Hc(r + 1, 0.0);
    entropy_by_level(prior_res, Hp);

    std::vector<double> post(mod), Ht(r + 1);
    const double norm = 1.0 / (std::sqrt(2.0 * M_PI) * sd);
    for (std::size_t j = 0; j <= steps; ++j) {
        double t = lo + h * static_cast<double>(j);
        std::fill(post.begin(), post.end(), 0.0);
        double pt = 0.0;
        for (std::size_t i = 0; i < K; ++i) {
            double d = (t - pmf.points[i]) / sd;
            double w = pmf.prob[i] * norm * std::exp(-0.5 * d * d);
            post[residue(i)] += w;
            pt += w;
        }
        if (pt < 1e-300)
            continue;
        for (double& x : post)
            x /= pt;
        std::fill(Ht.begin(), Ht.end(), 0.0);
        entropy_by_level(post, Ht);
        double wgt = (j == 0 || j == steps ? 0.5 : 1.0) * h * pt;
        for (int l = 0; l <= r; ++l)
            Hc[l] += wgt * Ht[l];
    }
    LevelInformation info;
    for (int l = 1; l <= r; ++l) {
        double Il = (Hp[l] - Hc[l]) - (Hp[l - 1] - Hc[l - 1]);
        info.mutual_info.push_back(std::max(0.0, Il));
        info.prior_entropy.push_back(std::max(0.0, Hp[l] - Hp[l - 1]));
    }
    return info;
}

PartitionChainSpec choose_chain(const MmseParams& mmse, const ChainChoice& choice)
{
    double st = std::sqrt(mmse.sigma_tilde2);
    PartitionChainSpec c;
    c.sigma_r = std::sqrt(mmse.sigma_r2);
    bool found = false;
    double best_eps = std::numeric_limits<double>::infinity();
    for (int i = 250; i >= 20; --i) {
        c.s = st * i / 100.0;
        double eps = flatness_factor(c.s, st);
        best_eps = std::min(best_eps, eps);
        if (eps > choice.target_flatness)
            continue;
        c.r = 1;
        if (level_information(c, mmse).mutual_info[0] >= choice.top_capacity)
            continue;
        found = true;
        break;
    }
    if (!found)
        throw FlatnessError("no partition scale meets the flatness target", best_eps);
    if (choice.levels) {
        c.r = *choice.levels;
        if (c.r < 1)
            throw DomainError("level count must be positive");
        return c;
    }
    for (c.r = choice.min_levels; c.r < choice.max_levels; ++c.r)
        if (level_information(c, mmse).prior_entropy.back() <= choice.bottom_entropy)
            break;
    return c;
}

} // namespace gwci::lattice
