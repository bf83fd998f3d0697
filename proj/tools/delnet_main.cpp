// delnet: run scenario configs and single computations, writing CSV.
//
//   delnet run <config> [--out PATH] [--seed N] [--bits]
//   delnet encode-opt|tax|chain|review|dominance <config> [same options]
//
// Exit codes: 0 ok, 1 other failure, 2 config or usage error, 3 enumeration cap.

#include <fstream>
#include <functional>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "delnet/errors.hpp"
#include "delnet/scenario.hpp"

namespace {

using Runner = std::function<delnet::ResultTable(const delnet::ScenarioConfig&, const delnet::RunOptions&)>;

struct Args {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    bool bits = false;
};

int execute(const Args& args, const Runner& runner)
{
    try {
        auto config = delnet::load_config(args.config);
        if (args.seed)
            config.seed = *args.seed;
        delnet::RunOptions options;
        options.bits = args.bits;
        options.limits = delnet::Limits::from_env();
        const auto csv = runner(config, options).to_csv();

        const std::string path = !args.out.empty() ? args.out : config.output.value_or("");
        if (path.empty() || path == "-") {
            std::cout << csv;
        } else {
            std::ofstream file(path, std::ios::binary);
            if (!file || !(file << csv)) {
                std::cerr << "delnet: cannot write " << path << "\n";
                return 1;
            }
        }
        return 0;
    } catch (const delnet::ConfigError& e) {
        std::cerr << "delnet: config error: " << e.what() << "\n";
        return 2;
    } catch (const delnet::EnumerationLimitError& e) {
        std::cerr << "delnet: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "delnet: " << e.what() << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact delegated-decision network computations"};
    app.require_subcommand(1);

    const std::map<std::string, std::pair<std::string, Runner>> commands{
        {"run", {"run the scenario named in the config", delnet::run_scenario}},
        {"encode-opt", {"optimal budget-k encoders per budget", delnet::run_encode}},
        {"tax", {"communication tax of one channel under log and Brier", delnet::run_tax}},
        {"chain", {"per-hop log-loss terms of a serial chain", delnet::run_chain}},
        {"review", {"selective-review frontier over a cost grid", delnet::run_review_frontier}},
        {"dominance", {"garbling witness or separating loss", delnet::run_dominance}},
    };

    Args args;
    std::uint64_t seed = 0;
    const Runner* chosen = nullptr;
    std::vector<std::pair<CLI::App*, const Runner*>> subs;
    for (const auto& [name, entry] : commands) {
        auto* sub = app.add_subcommand(name, entry.first);
        sub->add_option("config", args.config, "scenario config (YAML)")->required();
        sub->add_option("--out", args.out, "write CSV here instead of the config's output or stdout");
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_flag("--bits", args.bits, "report information quantities in bits");
        subs.emplace_back(sub, &entry.second);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    for (const auto& [sub, runner] : subs)
        if (sub->parsed()) {
            chosen = runner;
            if (sub->count("--seed"))
                args.seed = seed;
        }
    return execute(args, *chosen);
}
