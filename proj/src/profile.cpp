#include "gwci/profile.hpp"

#include "gwci/error.hpp"
#include "gwci/numerics.hpp"
#include "gwci/parallel.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <string>

namespace gwci::polar {

namespace {

constexpr std::uint64_t kConstructTag = 0x636f6e7374727563ULL;
constexpr std::size_t kChunks = 8;

double safe_log2(double v) { return v > 0.0 ? std::log2(v) : -std::numeric_limits<double>::infinity(); }

double mean(const std::vector<double>& v)
{
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

} // namespace

std::size_t SourceCodeProfile::count(BitClass c) const
{
    return static_cast<std::size_t>(std::count(classes.begin(), classes.end(), c));
}

double SourceCodeProfile::mean_h_cond() const { return mean(h_cond); }
double SourceCodeProfile::mean_h_prior() const { return mean(h_prior); }

double info_margin_log2(const SourceCodeProfile& p, std::size_t i)
{
    return std::min(safe_log2(p.omz_cond[i]), safe_log2(p.z_prior[i]));
}

void classify(SourceCodeProfile& p, double log2_delta) { classify(p, log2_delta, log2_delta); }

void classify(SourceCodeProfile& p, double log2_delta, double log2_delta_det)
{
    p.log2_delta = std::max(log2_delta, -DBL_MAX);
    p.log2_delta_det = std::max(log2_delta_det, -DBL_MAX);
    p.classes.resize(p.N);
    for (std::size_t i = 0; i < p.N; ++i) {
        bool det = safe_log2(p.z_prior[i]) <= p.log2_delta_det;
        bool rnd = safe_log2(p.omz_cond[i]) <= p.log2_delta;
        p.classes[i] = det ? BitClass::FrozenDeterministic : rnd ? BitClass::FrozenRandom : BitClass::Info;
    }
}

SourceCodeProfile with_info_count(const SourceCodeProfile& p, std::size_t K)
{
    SourceCodeProfile q = p;
    std::vector<double> m(p.N);
    for (std::size_t i = 0; i < p.N; ++i)
        m[i] = info_margin_log2(p, i);
    std::sort(m.begin(), m.end(), std::greater<>());
    double cut;
    if (K == 0)
        cut = m.front() == -std::numeric_limits<double>::infinity() ? -DBL_MAX : m.front();
    else if (K >= p.N)
        cut = -DBL_MAX;
    else
        cut = m[K];
    classify(q, cut);
    return q;
}

SourceCodeProfile with_info_rate(const SourceCodeProfile& p, double rate)
{
    if (!(rate >= 0.0))
        throw DomainError("with_info_rate: rate must be nonnegative");
    double k = std::ceil(std::min(rate, 1.0) * static_cast<double>(p.N) - 1e-9);
    return with_info_count(p, static_cast<std::size_t>(std::max(0.0, k)));
}

void check_profile(const SourceCodeProfile& p)
{
    auto fail = [](const std::string& m) { throw InvariantError("profile: " + m); };
    if (!is_power_of_two(p.N))
        fail("N is not a power of two");
    for (auto* v : {&p.z_cond, &p.omz_cond, &p.z_prior, &p.h_cond, &p.h_prior})
        if (v->size() != p.N)
            fail("estimate array length differs from N");
    if (p.classes.size() != p.N)
        fail("class array length differs from N");
    std::size_t counts[3] = {0, 0, 0};
    for (std::size_t i = 0; i < p.N; ++i) {
        for (double v : {p.z_cond[i], p.omz_cond[i], p.z_prior[i], p.h_cond[i], p.h_prior[i]})
            if (!(v >= 0.0 && v <= 1.0))
                fail("estimate outside [0,1] at index " + std::to_string(i));
        bool det = safe_log2(p.z_prior[i]) <= p.log2_delta_det;
        bool rnd = safe_log2(p.omz_cond[i]) <= p.log2_delta;
        BitClass want = det ? BitClass::FrozenDeterministic : rnd ? BitClass::FrozenRandom : BitClass::Info;
        if (p.classes[i] != want)
            fail("class of index " + std::to_string(i) + " disagrees with the thresholds");
        auto c = static_cast<std::size_t>(p.classes[i]);
        if (c > 2)
            fail("unknown class label");
        ++counts[c];
    }
    if (counts[0] + counts[1] + counts[2] != p.N)
        fail("class counts do not partition the index set");
}

ProfileAccumulator::ProfileAccumulator(std::size_t N, PriorMode mode)
    : N_(N), mode_(mode), zc_(N), oc_(N), hc_(N), zp_(N), op_(N), hp_(N), u_(N), uhat_(N), x_(N)
{
    block_exponent(N);
}

void ProfileAccumulator::add(ScEngine& eng, const std::uint8_t* b, const double* cond, const double* prior)
{
    std::copy(b, b + N_, u_.begin());
    polar_transform(std::span<std::uint8_t>(u_));
    const bool sep = mode_ == PriorMode::Separate;
    if (sep && !prior)
        throw DomainError("ProfileAccumulator: prior LLRs required");
    for (std::size_t j = 0; j < N_; ++j) {
        leaf_hc_ += entropy_from_llr(cond[j]);
        if (sep)
            leaf_hp_ += entropy_from_llr(prior[j]);
    }
    const std::uint8_t* truth = u_.data();
    eng.run(
        cond, sep ? prior : nullptr,
        [&](std::size_t i, double lc, double lp) {
            LlrStats c = llr_stats(lc);
            zc_[i] += c.z;
            oc_[i] += c.omz;
            hc_[i] += c.h;
            if (sep) {
                LlrStats q = llr_stats(lp);
                zp_[i] += q.z;
                op_[i] += q.omz;
                hp_[i] += q.h;
            }
            return truth[i];
        },
        uhat_.data(), x_.data());
    ++samples_;
}

void ProfileAccumulator::merge(const ProfileAccumulator& o)
{
    if (o.N_ != N_ || o.mode_ != mode_)
        throw DomainError("ProfileAccumulator: cannot merge different shapes");
    for (std::size_t i = 0; i < N_; ++i) {
        zc_[i] += o.zc_[i];
        oc_[i] += o.oc_[i];
        hc_[i] += o.hc_[i];
        zp_[i] += o.zp_[i];
        op_[i] += o.op_[i];
        hp_[i] += o.hp_[i];
    }
    leaf_hc_ += o.leaf_hc_;
    leaf_hp_ += o.leaf_hp_;
    samples_ += o.samples_;
}

SourceCodeProfile ProfileAccumulator::finish(const std::string& channel_id, double beta, std::uint64_t seed) const
{
    if (samples_ == 0)
        throw ConstructionError("profile construction saw no samples");
    SourceCodeProfile p;
    p.channel_id = channel_id;
    p.N = N_;
    p.beta = beta;
    p.sample_count = samples_;
    p.seed = seed;
    double inv = 1.0 / static_cast<double>(samples_);
    auto unit = [&](double v) { return std::clamp(v * inv, 0.0, 1.0); };
    p.z_cond.resize(N_);
    p.omz_cond.resize(N_);
    p.h_cond.resize(N_);
    p.z_prior.resize(N_);
    p.h_prior.resize(N_);
    for (std::size_t i = 0; i < N_; ++i) {
        p.z_cond[i] = unit(zc_[i]);
        p.omz_cond[i] = unit(oc_[i]);
        p.h_cond[i] = unit(hc_[i]);
        switch (mode_) {
        case PriorMode::Uniform:
            p.z_prior[i] = 1.0;
            p.h_prior[i] = 1.0;
            break;
        case PriorMode::SameAsCond:
            p.z_prior[i] = p.z_cond[i];
            p.h_prior[i] = p.h_cond[i];
            break;
        case PriorMode::Separate:
            p.z_prior[i] = unit(zp_[i]);
            p.h_prior[i] = unit(hp_[i]);
            break;
        }
    }
    double cells = static_cast<double>(samples_) * static_cast<double>(N_);
    p.leaf_h_cond = leaf_hc_ / cells;
    p.leaf_h_prior = mode_ == PriorMode::Uniform ? 1.0 : mode_ == PriorMode::SameAsCond ? p.leaf_h_cond : leaf_hp_ / cells;
    classify(p, threshold_log2_delta(N_, beta));
    return p;
}

SourceCodeProfile construct_profile(const SideInfoChannel& ch, std::size_t N, double beta, std::size_t sample_count,
                                    std::uint64_t seed, unsigned threads)
{
    block_exponent(N);
    if (sample_count < 1000)
        throw DomainError("construct_profile: sample_count must be at least 1000");
    if (!(beta > 0.0 && beta < 0.5))
        throw DomainError("construct_profile: beta must lie in (0, 1/2)");
    double total = ch.prob_b(0) + ch.prob_b(1);
    if (!(std::fabs(total - 1.0) < 1e-9))
        throw ConstructionError("construct_profile: channel carries no probability mass");

    PriorMode mode = ch.prior_uniform() ? PriorMode::Uniform
                     : ch.observation_free() ? PriorMode::SameAsCond
                                             : PriorMode::Separate;
    std::vector<ProfileAccumulator> acc(kChunks, ProfileAccumulator(N, mode));
    parallel_for(kChunks, threads, [&](std::size_t c) {
        ScEngine eng(N);
        Bits b(N);
        std::vector<std::uint32_t> y(N);
        std::vector<double> cond(N), prior(N, ch.prior_llr());
        std::size_t lo = sample_count * c / kChunks, hi = sample_count * (c + 1) / kChunks;
        for (std::size_t s = lo; s < hi; ++s) {
            CounterRng rng(seed, derive_stream(kConstructTag, s));
            for (std::size_t j = 0; j < N; ++j) {
                ch.sample(rng, b[j], y[j]);
                cond[j] = ch.cond_llr(y[j]);
            }
            acc[c].add(eng, b.data(), cond.data(), prior.data());
        }
    });
    for (std::size_t c = 1; c < kChunks; ++c)
        acc[0].merge(acc[c]);
    return acc[0].finish(ch.id(), beta, seed);
}

nlohmann::json profile_to_json(const SourceCodeProfile& p)
{
    nlohmann::json j;
    j["version"] = SourceCodeProfile::kVersion;
    j["channel_id"] = p.channel_id;
    j["N"] = p.N;
    j["beta"] = p.beta;
    j["log2_delta"] = p.log2_delta;
    j["log2_delta_det"] = p.log2_delta_det;
    j["sample_count"] = p.sample_count;
    j["seed"] = p.seed;
    j["z_cond"] = p.z_cond;
    j["one_minus_z_cond"] = p.omz_cond;
    j["z_prior"] = p.z_prior;
    j["h_cond"] = p.h_cond;
    j["h_prior"] = p.h_prior;
    j["leaf_h_cond"] = p.leaf_h_cond;
    j["leaf_h_prior"] = p.leaf_h_prior;
    std::vector<int> cls(p.N);
    for (std::size_t i = 0; i < p.N; ++i)
        cls[i] = static_cast<int>(p.classes[i]);
    j["classes"] = cls;
    return j;
}

SourceCodeProfile profile_from_json(const nlohmann::json& j)
{
    try {
        if (j.at("version").get<int>() != SourceCodeProfile::kVersion)
            throw CacheError("profile cache: unsupported version");
        SourceCodeProfile p;
        p.channel_id = j.at("channel_id").get<std::string>();
        p.N = j.at("N").get<std::size_t>();
        p.beta = j.at("beta").get<double>();
        p.log2_delta = j.at("log2_delta").get<double>();
        p.log2_delta_det = j.value("log2_delta_det", p.log2_delta);
        p.sample_count = j.at("sample_count").get<std::size_t>();
        p.seed = j.at("seed").get<std::uint64_t>();
        p.z_cond = j.at("z_cond").get<std::vector<double>>();
        p.omz_cond = j.at("one_minus_z_cond").get<std::vector<double>>();
        p.z_prior = j.at("z_prior").get<std::vector<double>>();
        p.h_cond = j.at("h_cond").get<std::vector<double>>();
        p.h_prior = j.at("h_prior").get<std::vector<double>>();
        p.leaf_h_cond = j.at("leaf_h_cond").get<double>();
        p.leaf_h_prior = j.at("leaf_h_prior").get<double>();
        auto cls = j.at("classes").get<std::vector<int>>();
        p.classes.resize(cls.size());
        for (std::size_t i = 0; i < cls.size(); ++i) {
            if (cls[i] < 0 || cls[i] > 2)
                throw CacheError("profile cache: bad class label");
            p.classes[i] = static_cast<BitClass>(cls[i]);
        }
        check_profile(p);
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw CacheError(std::string("profile cache: malformed JSON: ") + e.what());
    } catch (const InvariantError& e) {
        throw CacheError(std::string("profile cache: ") + e.what());
    }
}

} // namespace gwci::polar
