#include "gwci/error.hpp"
#include "gwci/harness.hpp"
#include "gwci/profile_store.hpp"

#include <cmath>
#include <cstdio>

namespace gwci::harness {

namespace {

using nlohmann::json;

std::string num(double v)
{
    if (std::isnan(v))
        return "NA";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

json num_json(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

} // namespace

std::string records_csv(const std::vector<ExperimentRecord>& recs)
{
    std::string out = std::string(kCsvHeader) + "\n";
    for (const auto& r : recs)
        for (const auto& b : r.blocks) {
            out += r.scenario + "," + std::to_string(r.N) + "," + std::to_string(b.seed) + "," +
                   std::to_string(b.block) + "," + num(b.R0) + "," + num(b.R1) + "," + num(b.R2) + "," +
                   num(b.total()) + "," + num(b.dist_x) + "," + num(b.dist_y) + "," + num(r.theory.R_total) + "," +
                   num(r.theory.CI) + "," + num(b.runtime_ms) + "\n";
        }
    return out;
}

json records_json(const ExperimentConfig& c, const std::vector<ExperimentRecord>& recs)
{
    json j;
    j["config"] = c.to_json();
    j["config_hash"] = c.hash();
    json arr = json::array();
    for (const auto& r : recs) {
        json e;
        e["scenario"] = r.scenario;
        e["N"] = r.N;
        e["cache_ids"] = r.cache_ids;
        e["extra"] = json::object();
        for (const auto& [k, v] : r.extra)
            e["extra"][k] = num_json(v);
        e["theory"] = {{"R0", r.theory.R0},
                       {"R1", r.theory.R1},
                       {"R2", r.theory.R2},
                       {"R_total", r.theory.R_total},
                       {"CI", num_json(r.theory.CI)},
                       {"dist_x", r.theory.dist_x},
                       {"dist_y", r.theory.dist_y}};
        auto field = [&](double BlockResult::*f) { return [f](const BlockResult& b) { return b.*f; }; };
        auto total = [](const BlockResult& b) { return b.total(); };
        e["summary"] = {{"R0", r.mean(field(&BlockResult::R0))},
                        {"R1", r.mean(field(&BlockResult::R1))},
                        {"R2", r.mean(field(&BlockResult::R2))},
                        {"R_total", r.mean(total)},
                        {"R_total_se", r.std_error(total)},
                        {"dist_x", r.mean(field(&BlockResult::dist_x))},
                        {"dist_y", r.mean(field(&BlockResult::dist_y))}};
        json blocks = json::array();
        for (const auto& b : r.blocks) {
            json bj = {{"seed", b.seed}, {"block", b.block}, {"R0", b.R0},         {"R1", b.R1},
                       {"R2", b.R2},     {"dist_x", b.dist_x}, {"dist_y", b.dist_y}};
            if (c.timing)
                bj["runtime_ms"] = b.runtime_ms;
            blocks.push_back(bj);
        }
        e["blocks"] = blocks;
        if (c.timing)
            e["wall_ms"] = r.wall_ms;
        arr.push_back(e);
    }
    j["records"] = arr;
    return j;
}

std::string lemma_csv(const std::vector<gaussian::LemmaReport>& reps)
{
    std::string out = "case,s,sigma,epsilon,vd,vd_error,vd_bound,mi_gap,mi_error,mi_bound,pass\n";
    for (const auto& r : reps) {
        bool pass = r.vd_ok() && r.mi_ok();
        out += r.name + "," + num(r.s) + "," + num(r.sigma) + "," + num(r.epsilon) + "," +
               (r.vd_computed ? num(r.vd) : "NA") + "," + (r.vd_computed ? num(r.vd_error) : "NA") + "," +
               num(r.vd_bound()) + "," + num(r.mi_gap) + "," + num(r.mi_error) + "," + num(r.mi_bound()) + "," +
               (pass ? "PASS" : "FAIL") + "\n";
    }
    return out;
}

std::string properties_csv(const std::vector<PropertyResult>& props)
{
    std::string out = "property,pass,detail\n";
    for (const auto& p : props) {
        std::string d = p.detail;
        for (char& ch : d)
            if (ch == ',' || ch == '\n')
                ch = ';';
        out += p.name + "," + (p.passed ? "PASS" : "FAIL") + "," + d + "\n";
    }
    return out;
}

OutputFiles write_records(const ExperimentConfig& c, const std::vector<ExperimentRecord>& recs)
{
    std::filesystem::path dir(c.output);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
    OutputFiles f;
    std::string stem = scenario_name(c.scenario);
    f.csv = dir / (stem + ".csv");
    f.json = dir / (stem + ".json");
    polar::write_file_atomic(f.csv, records_csv(recs));
    polar::write_file_atomic(f.json, records_json(c, recs).dump(2) + "\n");
    return f;
}

} // namespace gwci::harness
