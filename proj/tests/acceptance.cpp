// Acceptance run: one PASS/FAIL line per criterion.
#include "gwci/dsbs.hpp"
#include "gwci/gaussian.hpp"
#include "gwci/harness.hpp"
#include "gwci/numerics.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace gwci;
using namespace gwci::harness;

namespace {

const fs::path kWork = GWCI_ACCEPT_DIR;
const fs::path kConfigs = GWCI_CONFIG_DIR;

int failures = 0;

void report(int id, bool pass, const std::string& detail)
{
    std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    failures += !pass;
}

template <class... A>
std::string fmt(const char* f, A... a)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Run {
    ExperimentConfig cfg;
    std::vector<ExperimentRecord> recs;
    fs::path csv;
};

Run run_config(const std::string& name, const fs::path& cache, const std::string& out)
{
    Run r;
    r.cfg = load_config(kConfigs / name);
    r.cfg.output = (kWork / out).string();
    polar::ProfileStore store{cache};
    r.recs = run_experiment(r.cfg, store);
    r.csv = write_records(r.cfg, r.recs).csv;
    return r;
}

double total(const ExperimentRecord& r) { return r.mean([](const BlockResult& b) { return b.total(); }); }
double mean_of(const ExperimentRecord& r, double BlockResult::*f)
{
    return r.mean([f](const BlockResult& b) { return b.*f; });
}

bool strictly_decreasing(const std::vector<ExperimentRecord>& recs, const std::function<double(const ExperimentRecord&)>& f)
{
    for (std::size_t i = 1; i < recs.size(); ++i)
        if (!(f(recs[i]) < f(recs[i - 1])))
            return false;
    return true;
}

std::string series(const std::vector<ExperimentRecord>& recs, const std::function<double(const ExperimentRecord&)>& f)
{
    std::string s;
    for (const auto& r : recs)
        s += (s.empty() ? "" : " ") + fmt("%.4f", f(r));
    return s;
}

void criterion1(Run& A, Run& G)
{
    auto t0 = std::chrono::steady_clock::now();
    A = run_config("dsbs-lossless-A.json", kWork / "cache", "c1-A");
    G = run_config("dsbs-lossless-G.json", kWork / "cache", "c1-G");
    double secs = seconds_since(t0);

    dsbs::DsbsModel m(0.11);
    const auto& a = A.recs.back();
    const auto& g = G.recs.back();
    bool ok = a.N == 65536 && g.N == 65536 && a.blocks.size() == 10 && g.blocks.size() == 10;

    double a_limit = 1.0 + binary_entropy(0.11) + 0.06;
    bool zero_err = true;
    for (const auto& rec : {A.recs, G.recs})
        for (const auto& r : rec)
            for (const auto& b : r.blocks)
                zero_err = zero_err && b.dist_x == 0.0 && b.dist_y == 0.0;
    bool a_ok = total(a) <= a_limit && zero_err;

    double ci = dsbs::wyner_ci_dsbs(m);
    double R0 = mean_of(g, &BlockResult::R0), R1 = mean_of(g, &BlockResult::R1), R2 = mean_of(g, &BlockResult::R2);
    bool targets_ok = std::fabs(g.theory.R0 - 0.858) < 1e-3 && std::fabs(g.theory.R1 - 0.321) < 1e-3 &&
                      std::fabs(g.theory.R2 - 0.321) < 1e-3 && std::fabs(g.theory.R0 - ci) < 1e-12;
    bool g_ok = std::fabs(R0 - 0.858) <= 0.10 && std::fabs(R1 - 0.321) <= 0.05 && std::fabs(R2 - 0.321) <= 0.05;
    bool trend = strictly_decreasing(A.recs, total) && strictly_decreasing(G.recs, total);
    bool fast = secs <= 900.0;
    ok = ok && a_ok && targets_ok && g_ok && trend && fast;
    report(1, ok,
           fmt("A total %.4f (<= %.4f, errors %s); G (%.4f, %.4f, %.4f) vs theory (%.4f, %.4f, %.4f); "
               "totals A [%s] G [%s]; %.0f s",
               total(a), a_limit, zero_err ? "none" : "PRESENT", R0, R1, R2, g.theory.R0, g.theory.R1, g.theory.R2,
               series(A.recs, total).c_str(), series(G.recs, total).c_str(), secs));
}

void criterion2(Run& E)
{
    E = run_config("dsbs-lossy-eps2.json", kWork / "cache", "c2");
    dsbs::DsbsModel m(0.11);
    double rxy = dsbs::r_xy_dsbs(0.3, 0.3, m);
    const auto& big = E.recs.back();
    double dx = mean_of(big, &BlockResult::dist_x), dy = mean_of(big, &BlockResult::dist_y);
    auto gap = [rxy](const ExperimentRecord& r) { return total(r) - rxy; };
    bool ok = big.N == 65536 && std::fabs(dx - 0.3) <= 0.02 && std::fabs(dy - 0.3) <= 0.02 &&
              total(big) <= rxy + 0.10 && gap(big) < gap(E.recs.front());
    report(2, ok,
           fmt("N=%zu dist (%.4f, %.4f); rate %.4f (<= %.4f); gap [%s]", big.N, dx, dy, total(big), rxy + 0.10,
               series(E.recs, gap).c_str()));
}

void criterion3(Run& Q)
{
    Q = run_config("gaussian-eps2.json", kWork / "cache", "c3");
    const auto& big = Q.recs.back();
    double mx = mean_of(big, &BlockResult::dist_x), my = mean_of(big, &BlockResult::dist_y);
    double limit = 0.5 * std::log2(2.25) + 0.15;
    auto gap = [](const ExperimentRecord& r) { return total(r) - 0.5 * std::log2(2.25); };
    auto mse_err = [](const ExperimentRecord& r) {
        return 0.5 * (std::fabs(mean_of(r, &BlockResult::dist_x) - 0.5) + std::fabs(mean_of(r, &BlockResult::dist_y) - 0.5));
    };
    bool ok = big.N == 65536 && Q.cfg.levels && *Q.cfg.levels == 4 && std::fabs(mx - 0.5) <= 0.05 &&
              std::fabs(my - 0.5) <= 0.05 && total(big) <= limit && gap(big) < gap(Q.recs.front()) &&
              mse_err(big) < mse_err(Q.recs.front());
    report(3, ok,
           fmt("N=%zu MSE (%.4f, %.4f); rate %.4f (<= %.4f); rate gap [%s]; MSE error [%s]", big.N, mx, my,
               total(big), limit, series(Q.recs, gap).c_str(), series(Q.recs, mse_err).c_str()));
}

void criterion4()
{
    auto t0 = std::chrono::steady_clock::now();
    auto a = check_llr_equivalence(0.5, 11, 10000);
    auto b = check_llr_equivalence(0.8, 12, 10000);
    report(4, a.passed && b.passed,
           fmt("rho=0.5: %s; rho=0.8: %s; %.1f s", a.detail.c_str(), b.detail.c_str(), seconds_since(t0)));
}

void criterion5()
{
    using namespace gaussian;
    ExperimentConfig d;
    GaussianPairModel pm(0.8);
    LGaussianModel lm(3, 0.5);
    struct Case {
        const char* name;
        std::function<LemmaReport()> run;
    };
    const double eps = d.lemma_epsilon;
    std::vector<Case> cases = {
        {"pair rho=0.8",
         [&] { return verify_pair_bound(pm, scale_for_flatness(pair_bound_sigma(pm), eps), d.resolution); }},
        {"L=3 rho=0.5",
         [&] { return verify_multi_bound(lm, scale_for_flatness(multi_bound_sigma(lm), eps), d.resolution_3d, d.mc_samples); }},
        {"eps2 rho=0.8 D=0.5",
         [&] {
             return verify_eps2_bound(0.5, 0.5, pm, scale_for_flatness(eps2_bound_sigma(0.5, 0.5, pm), eps), d.resolution);
         }},
    };
    bool ok = true;
    std::string detail;
    for (const auto& c : cases) {
        auto t0 = std::chrono::steady_clock::now();
        LemmaReport r = c.run();
        double secs = seconds_since(t0);
        bool pass = r.vd_computed && r.epsilon < 0.01 && r.vd_ok() && r.mi_ok() && secs <= 120.0;
        ok = ok && pass;
        detail += fmt("[%s eps %.4f vd %.3g<=%.3g mi %.3g<=%.3g %.1fs %s] ", c.name, r.epsilon, r.vd, r.vd_bound(),
                      r.mi_gap, r.mi_bound(), secs, pass ? "ok" : "bad");
    }
    report(5, ok, detail);
}

void criterion6()
{
    auto props = run_property_suite({});
    int bad = 0;
    std::string names;
    for (const auto& p : props)
        if (!p.passed) {
            ++bad;
            names += p.name + " ";
        }
    report(6, bad == 0, fmt("%zu properties, %d failed %s", props.size(), bad, names.c_str()));
}

void criterion7(const Run& G, const Run& E, const Run& Q)
{
    fs::remove_all(kWork / "cache-rerun");
    auto g2 = run_config("dsbs-lossless-G.json", kWork / "cache-rerun", "c7-G");
    auto e2 = run_config("dsbs-lossy-eps2.json", kWork / "cache", "c7-E");
    auto q2 = run_config("gaussian-eps2.json", kWork / "cache", "c7-Q");
    bool g_same = slurp(G.csv) == slurp(g2.csv);
    bool e_same = slurp(E.csv) == slurp(e2.csv);
    bool q_same = slurp(Q.csv) == slurp(q2.csv);
    report(7, g_same && e_same && q_same && !slurp(G.csv).empty(),
           fmt("dsbs-lossless G from a cold cache %s; dsbs-lossy %s; gaussian %s", g_same ? "identical" : "DIFFERS",
               e_same ? "identical" : "DIFFERS", q_same ? "identical" : "DIFFERS"));
}

} // namespace

int main()
{
    fs::remove_all(kWork);
    fs::create_directories(kWork);
    Run A, G, E, Q;
    auto guard = [](int id, const std::function<void()>& f) {
        try {
            f();
        } catch (const std::exception& e) {
            report(id, false, std::string("exception: ") + e.what());
        }
    };
    guard(1, [&] { criterion1(A, G); });
    guard(2, [&] { criterion2(E); });
    guard(3, [&] { criterion3(Q); });
    guard(4, criterion4);
    guard(5, criterion5);
    guard(6, criterion6);
    guard(7, [&] { criterion7(G, E, Q); });
    std::printf("%d criteria failed\n", failures);
    return failures ? 1 : 0;
}
