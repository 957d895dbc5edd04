#include "gwci/error.hpp"
#include "gwci/lattice.hpp"
#include "gwci/numerics.hpp"
#include "gwci/parallel.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdio>

namespace gwci::lattice {

namespace {

constexpr std::uint64_t kLatticeTag = 0x6c617474696365ULL;
constexpr std::size_t kChunks = 8;
constexpr int kBundleVersion = 1;

std::string chain_description(const PartitionChainSpec& c, const MmseParams& m)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, "lattice|s=%.17g|r=%d|ss2=%.17g|sr2=%.17g", c.s, c.r, m.sigma_s2, m.sigma_r2);
    return buf;
}

std::string level_channel_id(const std::string& desc, int level)
{
    return "lat-" + hex64(fnv1a64(desc + "|level=" + std::to_string(level)));
}

class DiscreteSampler {
public:
    explicit DiscreteSampler(const DiscreteGaussianPmf& p) : k_first_(p.k_first), cdf_(p.prob.size())
    {
        double acc = 0.0;
        for (std::size_t i = 0; i < p.prob.size(); ++i)
            cdf_[i] = acc += p.prob[i];
        cdf_.back() = 1.0;
    }
    std::int64_t operator()(CounterRng& rng) const
    {
        double u = rng.uniform();
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return k_first_ + static_cast<std::int64_t>(std::min<std::size_t>(it - cdf_.begin(), cdf_.size() - 1));
    }

private:
    std::int64_t k_first_;
    std::vector<double> cdf_;
};

// Entropy in bits of the label (k mod 2^r) given t, from the posterior over nearby k.
double label_entropy_given(double t, const LevelModel& model)
{
    const auto& c = model.chain();
    const auto& m = model.mmse();
    double sd = std::sqrt(m.sigma_tilde2), center = m.alpha * t;
    std::int64_t k0 = std::llround(center / c.s);
    std::int64_t W = static_cast<std::int64_t>(std::ceil(kLlrTailSigmas * sd / c.s)) + 1;
    std::size_t mod = std::size_t{1} << c.r;
    thread_local std::vector<double> p;
    p.assign(mod, 0.0);
    double tot = 0.0;
    for (std::int64_t k = k0 - W; k <= k0 + W; ++k) {
        double d = (c.s * static_cast<double>(k) - center) / sd;
        double w = std::exp(-0.5 * d * d);
        p[static_cast<std::size_t>(k & static_cast<std::int64_t>(mod - 1))] += w;
        tot += w;
    }
    double H = 0.0;
    for (double v : p)
        if (v > 0.0)
            H -= (v / tot) * std::log2(v / tot);
    return H;
}

double label_entropy_prior(const PartitionChainSpec& c, const MmseParams& m)
{
    auto pmf = discrete_gaussian_pmf(c.s, std::sqrt(m.sigma_r2), 0.0, 1e-14);
    std::size_t mod = std::size_t{1} << c.r;
    std::vector<double> p(mod, 0.0);
    for (std::size_t i = 0; i < pmf.prob.size(); ++i)
        p[static_cast<std::size_t>((pmf.k_first + static_cast<std::int64_t>(i)) & static_cast<std::int64_t>(mod - 1))] +=
            pmf.prob[i];
    double H = 0.0;
    for (double v : p)
        if (v > 0.0)
            H -= v * std::log2(v);
    return H;
}

struct ChunkState {
    std::vector<polar::ProfileAccumulator> acc;
    double direct_h = 0.0;
};

} // namespace

MultilevelLatticeCode build_multilevel_code(const PartitionChainSpec& chain, const MmseParams& mmse, std::size_t N,
                                            double beta, std::size_t sample_count, std::uint64_t seed,
                                            const BuildOptions& opt)
{
    polar::block_exponent(N);
    if (sample_count < 1000)
        throw DomainError("build_multilevel_code: sample_count must be at least 1000");
    MultilevelLatticeCode code;
    code.chain = chain;
    code.mmse = mmse;
    code.N = N;
    code.flatness = flatness_factor(chain.s, std::sqrt(mmse.sigma_tilde2));
    if (code.flatness > opt.target_flatness)
        throw FlatnessError("flatness factor " + std::to_string(code.flatness) + " exceeds the target " +
                                std::to_string(opt.target_flatness),
                            code.flatness);
    LevelModel model(chain, mmse);
    const int r = chain.r;
    const std::string desc = chain_description(chain, mmse);
    std::vector<std::string> keys(r);
    for (int l = 1; l <= r; ++l)
        keys[l - 1] = polar::ProfileStore::profile_key(level_channel_id(desc, l), N, beta, sample_count, seed);
    char tail[128];
    std::snprintf(tail, sizeof tail, "|N=%zu|beta=%.17g|S=%zu|seed=%llu", N, beta, sample_count,
                  static_cast<unsigned long long>(seed));
    std::string bundle = "multilevel-" + hex64(fnv1a64(desc + tail));

    polar::ProfileStore local;
    polar::ProfileStore* store = opt.store ? opt.store : &local;
    if (auto j = store->load_json(bundle)) {
        try {
            if (j->at("version").get<int>() == kBundleVersion) {
                std::vector<polar::SourceCodeProfile> prof;
                for (const auto& k : keys)
                    if (auto p = store->find(k))
                        prof.push_back(*p);
                if (prof.size() == keys.size()) {
                    code.constructed = std::move(prof);
                    code.level_mi = j->at("level_mi").get<std::vector<double>>();
                    code.direct_mi = j->at("direct_mi").get<double>();
                }
            }
        } catch (const nlohmann::json::exception& e) {
            throw CacheError(std::string("multilevel cache entry is malformed: ") + e.what());
        }
    }

    if (code.constructed.empty()) {
        auto pmf = discrete_gaussian_pmf(chain.s, std::sqrt(mmse.sigma_r2), 0.0, 1e-14);
        DiscreteSampler draw(pmf);
        const double noise = std::sqrt(mmse.sigma_s2 - mmse.sigma_r2);
        const std::uint32_t mask = static_cast<std::uint32_t>((std::uint64_t{1} << r) - 1);
        ChunkState total;
        total.acc.assign(r, polar::ProfileAccumulator(N, polar::PriorMode::Separate));
        unsigned nt = std::max(1u, opt.threads);
        for (std::size_t g = 0; g < kChunks; g += nt) {
            std::size_t gn = std::min<std::size_t>(nt, kChunks - g);
            std::vector<ChunkState> part(gn);
            parallel_for(gn, nt, [&](std::size_t q) {
                std::size_t c = g + q;
                ChunkState& st = part[q];
                st.acc.assign(r, polar::ProfileAccumulator(N, polar::PriorMode::Separate));
                polar::ScEngine eng(N);
                std::vector<std::uint32_t> lab(N);
                std::vector<double> t(N), cond(N), prior(N);
                polar::Bits b(N);
                std::size_t lo = sample_count * c / kChunks, hi = sample_count * (c + 1) / kChunks;
                for (std::size_t s = lo; s < hi; ++s) {
                    CounterRng rng(seed, derive_stream(kLatticeTag, s));
                    for (std::size_t j = 0; j < N; ++j) {
                        std::int64_t k = draw(rng);
                        t[j] = chain.s * static_cast<double>(k) + noise * rng.normal();
                        lab[j] = static_cast<std::uint32_t>(k) & mask;
                        st.direct_h += label_entropy_given(t[j], model);
                    }
                    for (int l = 1; l <= r; ++l) {
                        std::uint32_t lm = (std::uint32_t{1} << (l - 1)) - 1;
                        for (std::size_t j = 0; j < N; ++j) {
                            std::uint32_t lower = lab[j] & lm;
                            b[j] = static_cast<std::uint8_t>((lab[j] >> (l - 1)) & 1u);
                            cond[j] = model.cond_llr(l, t[j], lower);
                            prior[j] = model.prior_llr(l, lower);
                        }
                        st.acc[l - 1].add(eng, b.data(), cond.data(), prior.data());
                    }
                }
            });
            for (auto& p : part) {
                for (int l = 0; l < r; ++l)
                    total.acc[l].merge(p.acc[l]);
                total.direct_h += p.direct_h;
            }
        }
        for (int l = 1; l <= r; ++l) {
            auto p = total.acc[l - 1].finish(level_channel_id(desc, l), beta, seed);
            code.level_mi.push_back(p.leaf_h_prior - p.leaf_h_cond);
            store->put(keys[l - 1], p);
            code.constructed.push_back(std::move(p));
        }
        code.direct_mi = label_entropy_prior(chain, mmse) -
                         total.direct_h / (static_cast<double>(sample_count) * static_cast<double>(N));
        nlohmann::json j;
        j["version"] = kBundleVersion;
        j["chain"] = {{"s", chain.s}, {"r", chain.r}, {"sigma_r", chain.sigma_r}};
        j["mmse"] = {{"sigma_s2", mmse.sigma_s2},
                     {"sigma_r2", mmse.sigma_r2},
                     {"alpha", mmse.alpha},
                     {"sigma_tilde2", mmse.sigma_tilde2}};
        j["N"] = N;
        j["beta"] = beta;
        j["sample_count"] = sample_count;
        j["seed"] = seed;
        j["flatness"] = code.flatness;
        std::vector<std::string> refs;
        for (const auto& k : keys)
            refs.push_back("profile-" + k);
        j["level_profiles"] = refs;
        j["level_mi"] = code.level_mi;
        j["direct_mi"] = code.direct_mi;
        store->save_json(bundle, j);
    }
    code.cache_ids.push_back(bundle);
    for (const auto& k : keys)
        code.cache_ids.push_back("profile-" + k);
    double target = 0.0;
    for (double v : code.level_mi)
        target += v;
    set_total_rate(code, target + opt.rate_margin);
    return code;
}

void set_total_rate(MultilevelLatticeCode& code, double rate)
{
    if (!(rate >= 0.0))
        throw DomainError("set_total_rate: rate must be nonnegative");
    const std::size_t N = code.N;
    std::vector<double> m;
    m.reserve(N * code.constructed.size());
    for (std::size_t l = 0; l < code.constructed.size(); ++l) {
        const auto& p = code.constructed[l];
        double det_cut = polar::threshold_log2_delta(N, p.beta);
        for (std::size_t i = 0; i < N; ++i)
            if (p.z_prior[i] > 0.0 && std::log2(p.z_prior[i]) > det_cut)
                m.push_back(std::log2(std::max(p.omz_cond[i], DBL_MIN)));
    }
    std::size_t K = static_cast<std::size_t>(std::max(0.0, std::ceil(rate * static_cast<double>(N) - 1e-9)));
    double cut;
    if (K >= m.size()) {
        cut = -DBL_MAX;
    } else {
        std::nth_element(m.begin(), m.begin() + K, m.end(), std::greater<>());
        cut = m[K];
        if (K == 0)
            cut = *std::max_element(m.begin(), m.end());
    }
    code.levels.clear();
    code.level_rates.clear();
    code.total_rate = 0.0;
    for (std::size_t l = 0; l < code.constructed.size(); ++l) {
        polar::SourceCodeProfile q = code.constructed[l];
        polar::classify(q, cut, polar::threshold_log2_delta(N, q.beta));
        code.level_rates.push_back(q.info_rate());
        code.total_rate += q.info_rate();
        code.levels.push_back(std::move(q));
    }
}

LatticeQuantization lattice_quantize(const std::vector<double>& t, const MultilevelLatticeCode& code,
                                     polar::SharedSeed shared, polar::ScEngine& eng)
{
    const std::size_t N = code.N;
    if (t.size() != N)
        throw DomainError("lattice_quantize: block length does not match the code");
    LevelModel model(code.chain, code.mmse);
    LatticeQuantization q;
    q.labels.assign(N, 0);
    std::vector<double> cond(N), prior(N);
    for (int l = 1; l <= code.chain.r; ++l) {
        std::uint32_t lm = (std::uint32_t{1} << (l - 1)) - 1;
        for (std::size_t j = 0; j < N; ++j) {
            std::uint32_t lower = q.labels[j] & lm;
            cond[j] = model.cond_llr(l, t[j], lower);
            prior[j] = model.prior_llr(l, lower);
        }
        polar::SharedSeed sh{shared.seed, derive_stream(shared.block, static_cast<std::uint64_t>(l))};
        auto enc = polar::sc_lossy_encode(cond.data(), prior.data(), code.levels[l - 1], sh, eng);
        for (std::size_t j = 0; j < N; ++j)
            q.labels[j] |= static_cast<std::uint32_t>(enc.codeword[j]) << (l - 1);
        q.rate += enc.message.rate();
        q.payloads.push_back(std::move(enc.message.info_bits));
    }
    q.reconstruction.resize(N);
    for (std::size_t j = 0; j < N; ++j)
        q.reconstruction[j] = model.representative(q.labels[j]);
    return q;
}

std::vector<double> lattice_reconstruct(const std::vector<polar::Bits>& payloads, const MultilevelLatticeCode& code,
                                        polar::SharedSeed shared, polar::ScEngine& eng)
{
    const std::size_t N = code.N;
    if (payloads.size() != static_cast<std::size_t>(code.chain.r))
        throw DomainError("lattice_reconstruct: one payload per level is required");
    LevelModel model(code.chain, code.mmse);
    std::vector<std::uint32_t> labels(N, 0);
    std::vector<double> prior(N);
    for (int l = 1; l <= code.chain.r; ++l) {
        std::uint32_t lm = (std::uint32_t{1} << (l - 1)) - 1;
        for (std::size_t j = 0; j < N; ++j)
            prior[j] = model.prior_llr(l, labels[j] & lm);
        polar::LossyMessage msg{code.levels[l - 1].channel_id, N, payloads[l - 1]};
        polar::SharedSeed sh{shared.seed, derive_stream(shared.block, static_cast<std::uint64_t>(l))};
        auto w = polar::sc_lossy_reconstruct(msg, code.levels[l - 1], sh, prior.data(), eng);
        for (std::size_t j = 0; j < N; ++j)
            labels[j] |= static_cast<std::uint32_t>(w[j]) << (l - 1);
    }
    std::vector<double> out(N);
    for (std::size_t j = 0; j < N; ++j)
        out[j] = model.representative(labels[j]);
    return out;
}

} // namespace gwci::lattice
