#include "gwci/profile_store.hpp"

#include "gwci/error.hpp"
#include "gwci/numerics.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace gwci::polar {

namespace fs = std::filesystem;

void write_file_atomic(const fs::path& path, const std::string& content)
{
    fs::path tmp = path;
    tmp += ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw CacheError("cannot write " + tmp.string());
        out << content;
        if (!out)
            throw CacheError("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec)
        throw CacheError("cannot move " + tmp.string() + " into place: " + ec.message());
}

static std::optional<std::string> read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ProfileStore::ProfileStore(fs::path dir) : dir_(std::move(dir))
{
    std::error_code ec;
    fs::create_directories(*dir_, ec);
    if (ec)
        throw CacheError("cannot create cache directory " + dir_->string() + ": " + ec.message());
}

std::string ProfileStore::profile_key(const std::string& channel_id, std::size_t N, double beta, std::size_t samples,
                                      std::uint64_t seed)
{
    char buf[128];
    std::snprintf(buf, sizeof buf, "|N=%zu|beta=%.17g|S=%zu|seed=%llu", N, beta, samples,
                  static_cast<unsigned long long>(seed));
    return hex64(fnv1a64(channel_id + buf));
}

fs::path ProfileStore::profile_file(const fs::path& dir, const std::string& key)
{
    return dir / ("profile-" + key + ".json");
}

std::shared_ptr<const SourceCodeProfile> ProfileStore::find(const std::string& key)
{
    std::lock_guard lk(mu_);
    auto it = mem_.find(key);
    if (it != mem_.end()) {
        used_.insert("profile-" + key);
        return it->second;
    }
    if (!dir_)
        return nullptr;
    auto text = read_file(profile_file(*dir_, key));
    if (!text)
        return nullptr;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(*text);
    } catch (const nlohmann::json::exception& e) {
        throw CacheError("corrupt profile cache " + key + ": " + e.what());
    }
    auto p = std::make_shared<const SourceCodeProfile>(profile_from_json(j));
    mem_[key] = p;
    used_.insert("profile-" + key);
    return p;
}

void ProfileStore::put(const std::string& key, const SourceCodeProfile& p)
{
    auto sp = std::make_shared<const SourceCodeProfile>(p);
    std::lock_guard lk(mu_);
    mem_[key] = sp;
    used_.insert("profile-" + key);
    if (dir_)
        write_file_atomic(profile_file(*dir_, key), profile_to_json(p).dump());
}

std::shared_ptr<const SourceCodeProfile> ProfileStore::get(const SideInfoChannel& ch, std::size_t N, double beta,
                                                           std::size_t samples, std::uint64_t seed, unsigned threads)
{
    std::string key = profile_key(ch.id(), N, beta, samples, seed);
    if (auto p = find(key))
        return p;
    SourceCodeProfile p = construct_profile(ch, N, beta, samples, seed, threads);
    put(key, p);
    return find(key);
}

std::optional<nlohmann::json> ProfileStore::load_json(const std::string& name)
{
    std::lock_guard lk(mu_);
    auto it = json_mem_.find(name);
    if (it != json_mem_.end()) {
        used_.insert(name);
        return it->second;
    }
    if (!dir_)
        return std::nullopt;
    auto text = read_file(*dir_ / (name + ".json"));
    if (!text)
        return std::nullopt;
    try {
        auto j = nlohmann::json::parse(*text);
        json_mem_[name] = j;
        used_.insert(name);
        return j;
    } catch (const nlohmann::json::exception& e) {
        throw CacheError("corrupt cache file " + name + ": " + e.what());
    }
}

void ProfileStore::save_json(const std::string& name, const nlohmann::json& j)
{
    std::lock_guard lk(mu_);
    json_mem_[name] = j;
    used_.insert(name);
    if (dir_)
        write_file_atomic(*dir_ / (name + ".json"), j.dump());
}

std::vector<std::string> ProfileStore::used() const
{
    std::lock_guard lk(mu_);
    return {used_.begin(), used_.end()};
}

} // namespace gwci::polar
