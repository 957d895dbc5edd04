#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "gwci-cli-test";

int gwci(const std::string& args)
{
    std::string cmd = std::string("\"") + GWCI_CLI + "\" " + args + " > \"" + (kWork / "log.txt").string() + "\" 2>&1";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

void write(const fs::path& p, const std::string& text)
{
    std::ofstream(p) << text;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Fresh {
    Fresh()
    {
        fs::remove_all(kWork);
        fs::create_directories(kWork);
    }
    ~Fresh() { fs::remove_all(kWork); }
};

} // namespace

TEST_CASE("exit codes")
{
    Fresh f;
    CHECK(gwci("") == 2);
    CHECK(gwci("run") == 2);
    write(kWork / "bad.json", R"({"scenario": "dsbs-lossless", "N": 1000})");
    CHECK(gwci("run --config " + (kWork / "bad.json").string()) == 2);
    write(kWork / "typo.json", R"({"scenario": "dsbs-lossless", "Nn": 1024})");
    CHECK(gwci("run --config " + (kWork / "typo.json").string()) == 2);
    write(kWork / "region.json", R"({"scenario": "dsbs-lossy", "point": "eps2", "N": 256, "delta1": 0.01, "delta2": 0.01})");
    CHECK(gwci("run --config " + (kWork / "region.json").string() + " --cache-dir " + (kWork / "c").string()) == 2);
    CHECK(gwci("run --config " + (kWork / "missing.json").string()) == 2);
    CHECK(gwci("cache list --cache-dir " + (kWork / "none").string()) == 1);
}

TEST_CASE("run, rerun and cache maintenance")
{
    Fresh f;
    write(kWork / "cfg.json", R"({"scenario": "dsbs-lossless", "point": "A", "N": [256, 512], "blocks": 2})");
    std::string common = " --config " + (kWork / "cfg.json").string() + " --cache-dir " + (kWork / "cache").string();
    REQUIRE(gwci("construct" + common) == 0);
    REQUIRE(gwci("run" + common + " --seed 4 5 --out " + (kWork / "a").string()) == 0);
    REQUIRE(gwci("run" + common + " --seed 4 5 --threads 2 --out " + (kWork / "b").string()) == 0);
    std::string a = slurp(kWork / "a" / "dsbs-lossless.csv");
    CHECK(a == slurp(kWork / "b" / "dsbs-lossless.csv"));
    CHECK(std::count(a.begin(), a.end(), '\n') == 1 + 2 * 2 * 2);
    CHECK(a.find(",4,") != std::string::npos);
    CHECK(a.find(",5,") != std::string::npos);

    std::string cache = " --cache-dir " + (kWork / "cache").string();
    CHECK(gwci("cache list" + cache + " --out " + kWork.string()) == 0);
    std::string listing = slurp(kWork / "log.txt");
    CHECK(listing.find("profile-") != std::string::npos);
    CHECK(listing.find("referenced") != std::string::npos);
    CHECK(gwci("cache gc" + cache + " --out " + kWork.string()) == 0);
    CHECK(slurp(kWork / "log.txt").empty());
    CHECK(gwci("cache gc --dry-run" + cache + " --out " + (kWork / "none").string()) == 0);
    CHECK(slurp(kWork / "log.txt").find("would remove") != std::string::npos);
    CHECK(std::distance(fs::directory_iterator(kWork / "cache"), fs::directory_iterator{}) > 0);
}

TEST_CASE("verify")
{
    Fresh f;
    CHECK(gwci("verify --out " + kWork.string()) == 0);
    CHECK(slurp(kWork / "property-suite.csv").find("FAIL") == std::string::npos);
    CHECK(slurp(kWork / "lemma-check.csv").find("FAIL") == std::string::npos);
}
