#include "gwci/error.hpp"
#include "gwci/harness.hpp"
#include "gwci/numerics.hpp"
#include "gwci/polar.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace gwci::harness {

namespace {

using nlohmann::json;

const std::set<std::string> kKeys = {
    "scenario", "a0",      "rho",          "L",          "rho_L",         "point",     "delta1",
    "delta2",   "beta",    "d1",           "N",          "blocks",        "seeds",     "rate_margin",
    "lossy_margin", "target_flatness", "samples", "construction_seed", "polar_beta", "levels",
    "lemma_epsilon", "resolution", "resolution_3d", "mc_samples", "output", "threads", "timing"};

Scenario parse_scenario(const std::string& s)
{
    if (s == "dsbs-lossless")
        return Scenario::DsbsLossless;
    if (s == "dsbs-lossy")
        return Scenario::DsbsLossy;
    if (s == "gaussian")
        return Scenario::Gaussian;
    if (s == "gaussian-L")
        return Scenario::GaussianL;
    if (s == "lemma-check")
        return Scenario::LemmaCheck;
    if (s == "property-suite")
        return Scenario::PropertySuite;
    throw ConfigError("unknown scenario '" + s + "'");
}

template <class T>
void take(const json& j, const char* key, T& out)
{
    if (!j.contains(key))
        return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
}

void fail_unless(bool ok, const std::string& msg)
{
    if (!ok)
        throw ConfigError(msg);
}

} // namespace

const char* scenario_name(Scenario s)
{
    switch (s) {
    case Scenario::DsbsLossless: return "dsbs-lossless";
    case Scenario::DsbsLossy: return "dsbs-lossy";
    case Scenario::Gaussian: return "gaussian";
    case Scenario::GaussianL: return "gaussian-L";
    case Scenario::LemmaCheck: return "lemma-check";
    case Scenario::PropertySuite: return "property-suite";
    }
    return "?";
}

ExperimentConfig parse_config(const json& j)
{
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");
    for (const auto& [k, v] : j.items())
        if (!kKeys.count(k))
            throw ConfigError("unknown config key '" + k + "'");
    if (!j.contains("scenario"))
        throw ConfigError("config needs a 'scenario'");
    ExperimentConfig c;
    std::string sc;
    take(j, "scenario", sc);
    c.scenario = parse_scenario(sc);
    take(j, "a0", c.a0);
    take(j, "rho", c.rho);
    take(j, "L", c.L);
    take(j, "rho_L", c.rho_L);
    take(j, "point", c.point);
    take(j, "delta1", c.delta1);
    take(j, "delta2", c.delta2);
    take(j, "beta", c.beta);
    take(j, "d1", c.d1);
    if (j.contains("N")) {
        const auto& n = j.at("N");
        if (n.is_number_unsigned() || n.is_number_integer()) {
            fail_unless(n.get<long long>() > 0, "N must be positive");
            c.N = {n.get<std::size_t>()};
        } else {
            take(j, "N", c.N);
        }
    }
    take(j, "blocks", c.blocks);
    take(j, "seeds", c.seeds);
    take(j, "rate_margin", c.rate_margin);
    take(j, "lossy_margin", c.lossy_margin);
    take(j, "target_flatness", c.target_flatness);
    take(j, "samples", c.samples);
    take(j, "construction_seed", c.construction_seed);
    take(j, "polar_beta", c.polar_beta);
    if (j.contains("levels") && !j.at("levels").is_null()) {
        int lv = 0;
        take(j, "levels", lv);
        c.levels = lv;
    }
    take(j, "lemma_epsilon", c.lemma_epsilon);
    take(j, "resolution", c.resolution);
    take(j, "resolution_3d", c.resolution_3d);
    take(j, "mc_samples", c.mc_samples);
    take(j, "output", c.output);
    take(j, "threads", c.threads);
    take(j, "timing", c.timing);
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    json j;
    try {
        j = json::parse(ss.str());
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

void validate(const ExperimentConfig& c)
{
    fail_unless(!c.N.empty(), "N must list at least one block length");
    for (auto n : c.N)
        fail_unless(polar::is_power_of_two(n) && n >= 2, "N must be a power of two, got " + std::to_string(n));
    fail_unless(!c.seeds.empty(), "seeds must be nonempty");
    fail_unless(c.rate_margin >= 0.0 && c.lossy_margin >= 0.0, "margins must be nonnegative");
    fail_unless(c.samples >= 1000, "samples must be at least 1000");
    fail_unless(c.polar_beta > 0.0 && c.polar_beta < 0.5, "polar_beta must lie in (0, 1/2)");
    fail_unless(c.target_flatness > 0.0, "target_flatness must be positive");
    fail_unless(c.threads >= 1, "threads must be at least 1");
    fail_unless(!c.levels || (*c.levels >= 1 && *c.levels <= 16), "levels must lie in [1, 16]");
    fail_unless(c.lemma_epsilon > 0.0 && c.lemma_epsilon < 1.0, "lemma_epsilon must lie in (0, 1)");
    fail_unless(c.resolution >= 11 && c.resolution_3d >= 11, "quadrature resolution must be at least 11");
    fail_unless(c.mc_samples >= 1000, "mc_samples must be at least 1000");
    switch (c.scenario) {
    case Scenario::DsbsLossless:
        fail_unless(c.a0 > 0.0 && c.a0 < 0.5, "a0 must lie in (0, 1/2)");
        fail_unless(c.point == "A" || c.point == "G" || c.point == "AG" || c.point == "GB",
                    "dsbs-lossless point must be A, G, AG or GB");
        break;
    case Scenario::DsbsLossy:
        fail_unless(c.a0 > 0.0 && c.a0 < 0.5, "a0 must lie in (0, 1/2)");
        fail_unless(c.point == "eps10" || c.point == "eps2" || c.point == "eps3",
                    "dsbs-lossy point must be eps10, eps2 or eps3");
        fail_unless(c.delta1 >= 0.0 && c.delta2 >= 0.0, "distortions must be nonnegative");
        break;
    case Scenario::Gaussian:
        fail_unless(c.rho > 0.0 && c.rho < 1.0, "rho must lie in (0, 1)");
        fail_unless(c.point == "common" || c.point == "eps10" || c.point == "eps2" || c.point == "eps3",
                    "gaussian point must be common, eps10, eps2 or eps3");
        fail_unless(c.delta1 >= 0.0 && c.delta2 >= 0.0, "distortions must be nonnegative");
        break;
    case Scenario::GaussianL:
        fail_unless(c.rho > 0.0 && c.rho < 1.0, "rho must lie in (0, 1)");
        fail_unless(c.L >= 2, "L must be at least 2");
        break;
    case Scenario::LemmaCheck:
        fail_unless(c.rho > 0.0 && c.rho < 1.0 && c.rho_L > 0.0 && c.rho_L < 1.0, "correlations must lie in (0, 1)");
        fail_unless(c.L >= 2, "L must be at least 2");
        break;
    case Scenario::PropertySuite:
        break;
    }
}

json ExperimentConfig::science_json() const
{
    json j;
    j["scenario"] = scenario_name(scenario);
    j["a0"] = a0;
    j["rho"] = rho;
    j["L"] = L;
    j["rho_L"] = rho_L;
    j["point"] = point;
    j["delta1"] = delta1;
    j["delta2"] = delta2;
    j["beta"] = beta;
    j["d1"] = d1;
    j["N"] = N;
    j["blocks"] = blocks;
    j["seeds"] = seeds;
    j["rate_margin"] = rate_margin;
    j["lossy_margin"] = lossy_margin;
    j["target_flatness"] = target_flatness;
    j["samples"] = samples;
    j["construction_seed"] = construction_seed;
    j["polar_beta"] = polar_beta;
    j["levels"] = levels ? json(*levels) : json(nullptr);
    j["lemma_epsilon"] = lemma_epsilon;
    j["resolution"] = resolution;
    j["resolution_3d"] = resolution_3d;
    j["mc_samples"] = mc_samples;
    return j;
}

json ExperimentConfig::to_json() const
{
    json j = science_json();
    j["output"] = output;
    j["threads"] = threads;
    j["timing"] = timing;
    return j;
}

std::string ExperimentConfig::hash() const { return hex64(fnv1a64(science_json().dump())); }

PipelineContext make_context(const ExperimentConfig& c, polar::ProfileStore* store)
{
    PipelineContext ctx;
    ctx.store = store;
    ctx.samples = c.samples;
    ctx.construction_seed = c.construction_seed;
    ctx.polar_beta = c.polar_beta;
    ctx.threads = c.threads;
    ctx.margins.lossless = c.rate_margin;
    ctx.margins.lossy = c.lossy_margin;
    ctx.seeds = c.seeds;
    ctx.blocks = c.blocks;
    ctx.timing = c.timing;
    return ctx;
}

} // namespace gwci::harness
