#pragma once

#include "gwci/channel.hpp"
#include "gwci/profile.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gwci::polar {

// Memory-backed, optionally disk-backed cache of constructed profiles and other
// JSON artifacts. Files are written to a temp name and renamed into place.
class ProfileStore {
public:
    ProfileStore() = default;
    explicit ProfileStore(std::filesystem::path dir);

    static std::string profile_key(const std::string& channel_id, std::size_t N, double beta, std::size_t samples,
                                   std::uint64_t seed);

    std::shared_ptr<const SourceCodeProfile> get(const SideInfoChannel& ch, std::size_t N, double beta,
                                                 std::size_t samples, std::uint64_t seed, unsigned threads = 1);

    std::shared_ptr<const SourceCodeProfile> find(const std::string& key);
    void put(const std::string& key, const SourceCodeProfile& p);

    std::optional<nlohmann::json> load_json(const std::string& name);
    void save_json(const std::string& name, const nlohmann::json& j);

    // Keys touched since construction, sorted.
    std::vector<std::string> used() const;
    bool disk_backed() const { return dir_.has_value(); }
    const std::optional<std::filesystem::path>& dir() const { return dir_; }

    static std::filesystem::path profile_file(const std::filesystem::path& dir, const std::string& key);

private:
    std::optional<std::filesystem::path> dir_;
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<const SourceCodeProfile>> mem_;
    std::map<std::string, nlohmann::json> json_mem_;
    std::set<std::string> used_;
};

void write_file_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace gwci::polar
