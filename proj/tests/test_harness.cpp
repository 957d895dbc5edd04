#include "doctest.h"

#include "gwci/error.hpp"
#include "gwci/harness.hpp"

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace gwci;
using namespace gwci::harness;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name)
{
    fs::path p = fs::temp_directory_path() / ("gwci-harness-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json small_lossless()
{
    return {{"scenario", "dsbs-lossless"}, {"point", "G"}, {"N", 1024}, {"seeds", {1, 2}}, {"blocks", 1}};
}

} // namespace

TEST_CASE("config parsing")
{
    auto c = parse_config(small_lossless());
    CHECK(c.scenario == Scenario::DsbsLossless);
    CHECK(c.N == std::vector<std::size_t>{1024});
    CHECK(c.seeds.size() == 2);

    auto j = small_lossless();
    j["N"] = {1024, 2048};
    CHECK(parse_config(j).N.size() == 2);

    auto bad = [](json j) { CHECK_THROWS_AS(parse_config(j), ConfigError); };
    j = small_lossless();
    j["bogus"] = 1;
    bad(j);
    j = small_lossless();
    j["N"] = 1000;
    bad(j);
    j = small_lossless();
    j["seeds"] = json::array();
    bad(j);
    j = small_lossless();
    j["rate_margin"] = -0.1;
    bad(j);
    j = small_lossless();
    j["a0"] = "x";
    bad(j);
    j = small_lossless();
    j["scenario"] = "nope";
    bad(j);
    j = small_lossless();
    j["point"] = "eps2";
    bad(j);
    j = small_lossless();
    j["polar_beta"] = 0.6;
    bad(j);
}

TEST_CASE("config hash covers science parameters only")
{
    auto a = parse_config(small_lossless());
    auto b = a;
    b.output = "elsewhere";
    b.threads = 4;
    b.timing = true;
    CHECK(a.hash() == b.hash());
    CHECK(a.hash().size() == 16);
    b.a0 = 0.12;
    CHECK(a.hash() != b.hash());
    CHECK(parse_config(a.to_json()).hash() == a.hash());
}

TEST_CASE("csv formatting")
{
    ExperimentRecord r;
    r.scenario = "dsbs-lossless";
    r.N = 8;
    r.theory.R_total = 1.5;
    r.theory.CI = std::numeric_limits<double>::quiet_NaN();
    BlockResult b;
    b.seed = 3;
    b.block = 0;
    b.R0 = 0.25;
    b.R1 = 0.5;
    b.R2 = 0.75;
    r.blocks.push_back(b);
    std::string csv = records_csv({r});
    CHECK(csv.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
    CHECK(csv.find("dsbs-lossless,8,3,0,0.25,0.5,0.75,1.5,0,0,1.5,NA,0\n") != std::string::npos);

    PropertyResult p{"x", true, "a,b\nc"};
    CHECK(properties_csv({p}) == "property,pass,detail\nx,PASS,a;b;c\n");
}

TEST_CASE("runs are reproducible and cached")
{
    fs::path dir = scratch("run");
    polar::ProfileStore store{dir / "cache"};
    auto c = parse_config(small_lossless());
    c.output = (dir / "out1").string();
    auto recs = run_experiment(c, store);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].blocks.size() == 2);
    CHECK(recs[0].config_hash == c.hash());
    auto f1 = write_records(c, recs);

    auto entries = cache_list(dir / "cache", dir / "out1");
    CHECK(entries.size() >= 2);
    for (const auto& e : entries) {
        CHECK(e.kind == "profile");
        CHECK(e.referenced);
    }

    polar::ProfileStore fresh{dir / "cache"};
    c.output = (dir / "out2").string();
    auto f2 = write_records(c, run_experiment(c, fresh));
    CHECK(slurp(f1.csv) == slurp(f2.csv));
    auto j = json::parse(slurp(f1.json));
    auto j2 = json::parse(slurp(f2.json));
    j2["config"]["output"] = j["config"]["output"];
    CHECK(j == j2);
    CHECK(j["config_hash"] == c.hash());
    CHECK_FALSE(j["records"][0].contains("wall_ms"));

    // nothing referenced may go
    GcOptions opt;
    CHECK(cache_gc(dir / "cache", dir, opt).empty());
    CHECK(cache_list(dir / "cache").size() == entries.size());

    // without the results every entry is a candidate
    opt.dry_run = true;
    auto would = cache_gc(dir / "cache", dir / "missing", opt);
    CHECK(would.size() == entries.size());
    CHECK(cache_list(dir / "cache").size() == entries.size());
    opt.dry_run = false;
    opt.min_age_days = 1.0;
    CHECK(cache_gc(dir / "cache", dir / "missing", opt).empty());
    opt.min_age_days = 0.0;
    opt.hashes = {"no-such-hash"};
    CHECK(cache_gc(dir / "cache", dir / "missing", opt).empty());
    opt.hashes.clear();
    CHECK(cache_gc(dir / "cache", dir / "missing", opt).size() == entries.size());
    CHECK(cache_list(dir / "cache").empty());
    CHECK_THROWS_AS(cache_list(dir / "nowhere"), CacheError);
    fs::remove_all(dir);
}

TEST_CASE("multilevel bundles keep their level profiles referenced")
{
    fs::path dir = scratch("bundle");
    polar::ProfileStore store{dir / "cache"};
    auto c = parse_config({{"scenario", "gaussian"}, {"point", "common"}, {"N", 256}, {"seeds", {1}}});
    c.output = (dir / "out").string();
    write_records(c, run_experiment(c, store));
    auto entries = cache_list(dir / "cache", dir / "out");
    int bundles = 0, profiles = 0;
    for (const auto& e : entries) {
        CHECK(e.referenced);
        bundles += e.kind == "multilevel";
        profiles += e.kind == "profile";
    }
    CHECK(bundles == 1);
    CHECK(profiles >= 2);
    CHECK(cache_gc(dir / "cache", dir / "out", {}).empty());
    fs::remove_all(dir);
}

TEST_CASE("construct-only builds codes without blocks")
{
    fs::path dir = scratch("construct");
    polar::ProfileStore store{dir / "cache"};
    auto c = parse_config(small_lossless());
    auto recs = run_experiment(c, store, true);
    CHECK(recs[0].blocks.empty());
    CHECK_FALSE(recs[0].cache_ids.empty());
    CHECK(cache_list(dir / "cache").size() >= 2);
    fs::remove_all(dir);
}

TEST_CASE("region mismatch surfaces from the runner")
{
    fs::path dir = scratch("mismatch");
    polar::ProfileStore store{dir / "cache"};
    auto c = parse_config({{"scenario", "dsbs-lossy"}, {"point", "eps2"}, {"N", 256}, {"delta1", 0.01}, {"delta2", 0.01}});
    CHECK_THROWS_AS(run_experiment(c, store), RegionMismatch);
    fs::remove_all(dir);
}

TEST_CASE("property suite")
{
    auto props = run_property_suite({});
    CHECK(props.size() >= 8);
    for (const auto& p : props) {
        INFO(p.name << ": " << p.detail);
        CHECK(p.passed);
    }
}

TEST_CASE("lemma check scenario")
{
    auto c = parse_config({{"scenario", "lemma-check"}, {"L", 3}, {"rho_L", 0.5}, {"delta1", 0.5}, {"delta2", 0.5}});
    auto reps = run_lemma_check(c);
    REQUIRE(reps.size() == 3);
    for (const auto& r : reps) {
        INFO(r.name);
        CHECK(r.epsilon < 0.01);
        CHECK(r.vd_ok());
        CHECK(r.mi_ok());
    }
    std::string csv = lemma_csv(reps);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
