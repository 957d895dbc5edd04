// gwci: command-line driver for the common-information experiments.
#include "gwci/error.hpp"
#include "gwci/harness.hpp"
#include "gwci/profile_store.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>

namespace fs = std::filesystem;
using namespace gwci;
using namespace gwci::harness;

namespace {

constexpr int kExitOk = 0, kExitError = 1, kExitConfig = 2, kExitInvariant = 3;

struct Common {
    std::string config;
    std::vector<std::uint64_t> seeds;
    std::string out;
    std::string cache_dir = ".gwci-cache";
    unsigned threads = 0;
};

void add_common(CLI::App* app, Common& c, bool need_config)
{
    auto* opt = app->add_option("--config", c.config, "experiment configuration (JSON)");
    if (need_config)
        opt->required();
    app->add_option("--seed", c.seeds, "override the seed list");
    app->add_option("--out", c.out, "output directory");
    app->add_option("--cache-dir", c.cache_dir, "construction cache directory");
    app->add_option("--threads", c.threads, "worker threads");
}

ExperimentConfig load(const Common& c)
{
    ExperimentConfig cfg = load_config(c.config);
    if (!c.seeds.empty())
        cfg.seeds = c.seeds;
    if (!c.out.empty())
        cfg.output = c.out;
    if (c.threads)
        cfg.threads = c.threads;
    validate(cfg);
    return cfg;
}

void write_text(const fs::path& path, const std::string& text)
{
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    polar::write_file_atomic(path, text);
}

int report_properties(const std::vector<PropertyResult>& props, const fs::path& out)
{
    int failed = 0;
    for (const auto& p : props) {
        std::printf("%-36s %s  %s\n", p.name.c_str(), p.passed ? "PASS" : "FAIL", p.detail.c_str());
        failed += !p.passed;
    }
    write_text(out / "property-suite.csv", properties_csv(props));
    return failed;
}

int report_lemmas(const std::vector<gaussian::LemmaReport>& reps, const fs::path& out)
{
    int failed = 0;
    for (const auto& r : reps) {
        bool ok = r.vd_ok() && r.mi_ok();
        std::printf("lemma %-8s eps=%.4g vd=%s (<= %.4g) mi=%.3g (<= %.4g)  %s\n", r.name.c_str(), r.epsilon,
                    r.vd_computed ? std::to_string(r.vd).c_str() : "n/a", r.vd_bound(), r.mi_gap, r.mi_bound(),
                    ok ? "PASS" : "FAIL");
        failed += !ok;
    }
    write_text(out / "lemma-check.csv", lemma_csv(reps));
    return failed;
}

void print_summary(const std::vector<ExperimentRecord>& recs)
{
    for (const auto& r : recs) {
        auto f = [](double BlockResult::*m) { return [m](const BlockResult& b) { return b.*m; }; };
        std::printf("%s N=%zu blocks=%zu R=(%.4f, %.4f, %.4f) total=%.4f dist=(%.4f, %.4f) theory=%.4f\n",
                    r.scenario.c_str(), r.N, r.blocks.size(), r.mean(f(&BlockResult::R0)), r.mean(f(&BlockResult::R1)),
                    r.mean(f(&BlockResult::R2)), r.mean([](const BlockResult& b) { return b.total(); }),
                    r.mean(f(&BlockResult::dist_x)), r.mean(f(&BlockResult::dist_y)), r.theory.R_total);
    }
}

int run_scenario(const ExperimentConfig& cfg, const Common& c, bool construct_only)
{
    if (cfg.scenario == Scenario::PropertySuite)
        return report_properties(run_property_suite({cfg.seeds.front()}), cfg.output) ? kExitInvariant : kExitOk;
    if (cfg.scenario == Scenario::LemmaCheck)
        return report_lemmas(run_lemma_check(cfg), cfg.output) ? kExitInvariant : kExitOk;
    polar::ProfileStore store{fs::path(c.cache_dir)};
    auto recs = run_experiment(cfg, store, construct_only);
    if (construct_only) {
        for (const auto& r : recs)
            for (const auto& id : r.cache_ids)
                std::printf("%s\n", id.c_str());
        return kExitOk;
    }
    auto files = write_records(cfg, recs);
    print_summary(recs);
    std::printf("wrote %s and %s\n", files.csv.string().c_str(), files.json.string().c_str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Common-information extraction with polar codes and polar lattices"};
    app.require_subcommand(1);

    Common construct_opts, run_opts, verify_opts;
    auto* construct = app.add_subcommand("construct", "build and cache the codes of a configuration");
    add_common(construct, construct_opts, true);
    auto* run = app.add_subcommand("run", "run a configuration and write CSV and JSON results");
    add_common(run, run_opts, true);
    auto* verify = app.add_subcommand("verify", "run the property suite and the lemma checks");
    add_common(verify, verify_opts, false);

    auto* cache = app.add_subcommand("cache", "inspect or prune the construction cache");
    cache->require_subcommand(1);
    std::string cache_dir = ".gwci-cache", results_dir = "results";
    GcOptions gc_opt;
    auto* list = cache->add_subcommand("list", "list cached artifacts");
    list->add_option("--cache-dir", cache_dir, "construction cache directory");
    list->add_option("--out", results_dir, "results directory whose records mark entries as referenced");
    auto* gc = cache->add_subcommand("gc", "remove unreferenced cached artifacts");
    gc->add_option("--cache-dir", cache_dir, "construction cache directory");
    gc->add_option("--out", results_dir, "results directory whose records must stay resolvable");
    gc->add_option("--min-age-days", gc_opt.min_age_days, "only remove entries at least this old");
    gc->add_option("--hash", gc_opt.hashes, "only remove entries whose id contains this hash");
    gc->add_flag("--dry-run", gc_opt.dry_run, "report without deleting");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*construct)
            return run_scenario(load(construct_opts), construct_opts, true);
        if (*run)
            return run_scenario(load(run_opts), run_opts, false);
        if (*verify) {
            ExperimentConfig cfg;
            if (!verify_opts.config.empty())
                cfg = load(verify_opts);
            else {
                cfg.scenario = Scenario::LemmaCheck;
                cfg.delta1 = cfg.delta2 = 0.5;
                cfg.rho_L = 0.5;
                cfg.L = 3;
                if (!verify_opts.out.empty())
                    cfg.output = verify_opts.out;
                if (!verify_opts.seeds.empty())
                    cfg.seeds = verify_opts.seeds;
            }
            int failed = report_properties(run_property_suite({cfg.seeds.front()}), cfg.output);
            failed += report_lemmas(run_lemma_check(cfg), cfg.output);
            return failed ? kExitInvariant : kExitOk;
        }
        if (*list) {
            auto entries = cache_list(cache_dir, fs::path(results_dir));
            for (const auto& e : entries)
                std::printf("%-40s %-10s %10ju %8.2f %s\n", e.id.c_str(), e.kind.c_str(), e.bytes, e.age_days,
                            e.referenced ? "referenced" : "-");
            return kExitOk;
        }
        if (*gc) {
            for (const auto& id : cache_gc(cache_dir, results_dir, gc_opt))
                std::printf("%s %s\n", gc_opt.dry_run ? "would remove" : "removed", id.c_str());
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InvariantError& e) {
        std::cerr << "invariant violated: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const RegionMismatch& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitOk;
}
