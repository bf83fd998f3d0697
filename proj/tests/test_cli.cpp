#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

int run(const std::string& args)
{
    const std::string cmd = std::string(DELNET_BINARY) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string config(const std::string& name) { return std::string(DELNET_CONFIG_DIR) + "/" + name; }

} // namespace

TEST_CASE("cli exit codes and output")
{
    const auto dir = std::filesystem::temp_directory_path() / "delnet_cli_test";
    std::filesystem::create_directories(dir);
    const auto a = dir / "a.csv", b = dir / "b.csv";

    CHECK(run("run " + config("distortion_scatter.yaml") + " --out " + a.string()) == 0);
    CHECK(run("run " + config("distortion_scatter.yaml") + " --out " + b.string()) == 0);
    CHECK(!slurp(a).empty());
    CHECK(slurp(a) == slurp(b));
    CHECK(run("run " + config("distortion_scatter.yaml") + " --seed 9 --out " + b.string()) == 0);
    CHECK(slurp(a) != slurp(b));
    CHECK(slurp(b).find("# seed=9") != std::string::npos);

    CHECK(run("run " + config("relay_depth.yaml") + " --bits") == 0);
    for (const char* sub : {"encode-opt", "tax", "chain"})
        CHECK(run(std::string(sub) + " " + config("toolkit.yaml")) == 0);
    CHECK(run("review " + config("review_frontier.yaml")) == 0);
    CHECK(run("dominance " + config("dominance.yaml")) == 0);

    const auto bad = dir / "bad.yaml";
    std::ofstream(bad) << "model:\n  labels: [a]\nbogus: 1\n";
    CHECK(run("run " + bad.string()) == 2);
    CHECK(run("run " + (dir / "missing.yaml").string()) == 2);
    CHECK(run("run") == 2);
    CHECK(run("frobnicate x") == 2);
    CHECK(run("run " + config("toolkit.yaml")) == 2);
    CHECK(run("tax " + config("relay_depth.yaml")) == 2);
    CHECK(run("--help") == 0);

    CHECK(run("run " + config("custom_network.yaml")) == 0);
    CHECK(std::system((std::string("DELNET_ENUM_CAP=10 ") + DELNET_BINARY + " run " + config("custom_network.yaml") +
                       " >/dev/null 2>&1; test $? -eq 3").c_str()) == 0);
    CHECK(std::system((std::string("DELNET_PARTITION_CAP=4 ") + DELNET_BINARY + " run " + config("interface.yaml") +
                       " >/dev/null 2>&1; test $? -eq 3").c_str()) == 0);
    std::filesystem::remove_all(dir);
}
