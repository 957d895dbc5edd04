#include "gwci/error.hpp"
#include "gwci/harness.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

namespace gwci::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::optional<json> read_json(const fs::path& p)
{
    std::ifstream in(p);
    if (!in)
        return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::exception&) {
        return std::nullopt;
    }
}

std::string kind_of(const std::string& id)
{
    if (id.rfind("profile-", 0) == 0)
        return "profile";
    if (id.rfind("multilevel-", 0) == 0)
        return "multilevel";
    return "other";
}

double age_days(const fs::path& p)
{
    auto mt = fs::last_write_time(p);
    auto now = fs::file_time_type::clock::now();
    return std::chrono::duration<double>(now - mt).count() / 86400.0;
}

} // namespace

std::vector<std::string> referenced_cache_ids(const fs::path& cache_dir, const fs::path& results_dir)
{
    std::set<std::string> refs;
    std::error_code ec;
    if (fs::is_directory(results_dir, ec))
        for (const auto& e : fs::recursive_directory_iterator(results_dir)) {
            if (!e.is_regular_file() || e.path().extension() != ".json")
                continue;
            auto j = read_json(e.path());
            if (!j || !j->is_object() || !j->contains("records") || !(*j)["records"].is_array())
                continue;
            for (const auto& r : (*j)["records"])
                if (r.contains("cache_ids") && r["cache_ids"].is_array())
                    for (const auto& id : r["cache_ids"])
                        if (id.is_string())
                            refs.insert(id.get<std::string>());
        }
    std::vector<std::string> todo(refs.begin(), refs.end());
    while (!todo.empty()) {
        std::string id = todo.back();
        todo.pop_back();
        if (kind_of(id) != "multilevel")
            continue;
        auto j = read_json(cache_dir / (id + ".json"));
        if (!j || !j->contains("level_profiles"))
            continue;
        for (const auto& p : (*j)["level_profiles"])
            if (p.is_string() && refs.insert(p.get<std::string>()).second)
                todo.push_back(p.get<std::string>());
    }
    return {refs.begin(), refs.end()};
}

std::vector<CacheEntry> cache_list(const fs::path& cache_dir, const std::optional<fs::path>& results_dir)
{
    std::error_code ec;
    if (!fs::is_directory(cache_dir, ec))
        throw CacheError("cache directory " + cache_dir.string() + " does not exist");
    std::set<std::string> refs;
    if (results_dir) {
        auto v = referenced_cache_ids(cache_dir, *results_dir);
        refs.insert(v.begin(), v.end());
    }
    std::vector<CacheEntry> out;
    for (const auto& e : fs::directory_iterator(cache_dir)) {
        if (!e.is_regular_file() || e.path().extension() != ".json")
            continue;
        CacheEntry c;
        c.id = e.path().stem().string();
        c.kind = kind_of(c.id);
        c.bytes = e.file_size();
        c.age_days = age_days(e.path());
        c.referenced = refs.count(c.id) > 0;
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const CacheEntry& a, const CacheEntry& b) { return a.id < b.id; });
    return out;
}

std::vector<std::string> cache_gc(const fs::path& cache_dir, const fs::path& results_dir, const GcOptions& opt)
{
    std::vector<std::string> removed;
    for (const auto& e : cache_list(cache_dir, results_dir)) {
        if (e.referenced || e.age_days < opt.min_age_days)
            continue;
        if (!opt.hashes.empty() &&
            std::none_of(opt.hashes.begin(), opt.hashes.end(),
                         [&](const std::string& h) { return e.id.find(h) != std::string::npos; }))
            continue;
        if (!opt.dry_run) {
            std::error_code ec;
            fs::remove(cache_dir / (e.id + ".json"), ec);
            if (ec)
                throw CacheError("cannot remove " + e.id + ": " + ec.message());
        }
        removed.push_back(e.id);
    }
    return removed;
}

} // namespace gwci::harness
