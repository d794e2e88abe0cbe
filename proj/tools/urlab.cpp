#include "urlab/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct Args {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> dim;
    std::string out;
};

}  // namespace

int main(int argc, char** argv) {
    using namespace urlab::cli;

    CLI::App app{"Uncertainty-relation laboratory: evaluate, scan, minimize and compare relations"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);
    app.require_subcommand(1, 1);

    Args args;
    for (auto c : {Command::check, Command::scan, Command::minimize, Command::compare, Command::divergence}) {
        auto* sub = app.add_subcommand(std::string(to_string(c)));
        sub->add_option("--config", args.config, "JSON config file")->required();
        sub->add_option("--seed", args.seed, "Seed (overrides URLAB_SEED and the config)");
        sub->add_option("--dim", args.dim, "Fock truncation dimension")->check(CLI::Range(2, 512));
        sub->add_option("--out", args.out, "Report path (default: stdout)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return e.get_exit_code() == 0 ? rc : kExitConfig;
    }

    const auto* sub = app.get_subcommands().front();
    const Command command = *command_from_string(sub->get_name());

    std::ifstream in(args.config);
    if (!in) {
        std::cerr << "urlab: cannot read config '" << args.config << "'\n";
        return kExitConfig;
    }
    std::ostringstream text;
    text << in.rdbuf();

    Overrides o;
    o.seed = args.seed;
    o.dim = args.dim;
    if (const char* env = std::getenv(kSeedEnv)) o.env_seed = env;

    const RunResult res = run(command, text.str(), o);
    const std::string doc = res.report.dump(2) + "\n";
    if (res.report.contains("error")) {
        std::cerr << "urlab: " << res.report["error"]["kind"].get<std::string>()
                  << " error: " << res.report["error"]["message"].get<std::string>() << "\n";
    }
    if (args.out.empty()) {
        std::cout << doc;
    } else {
        std::ofstream out(args.out, std::ios::binary);
        if (!out || !(out << doc)) {
            std::cerr << "urlab: cannot write '" << args.out << "'\n";
            return kExitConfig;
        }
    }
    return res.exit_code;
}
