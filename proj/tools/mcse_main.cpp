// mcse_main.cpp — command-line front end.
//
// Exit codes: 0 success, 1 runtime failure, 2 invalid configuration.
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mcse/config.hpp"
#include "mcse/pipeline.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string seed, precision, beamformer, psd;
    std::vector<std::string> overrides;  // key=value
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "key=value config file");
    cmd->add_option("--seed", args.seed, "random seed");
    cmd->add_option("--precision", args.precision, "f32 | q2.6 | q2.2 | bin1");
    cmd->add_option("--beamformer", args.beamformer, "mvdr | gev-ban | gev-pan");
    cmd->add_option("--psd", args.psd, "block | recursive | oja");
    cmd->add_option("--set", args.overrides, "extra key=value overrides")->take_all();
}

mcse::Config build_config(const CommonArgs& args) {
    mcse::Config cfg;
    if (!args.config_path.empty()) cfg = mcse::Config::load(args.config_path);
    if (!args.seed.empty()) cfg.set("seed", args.seed);
    if (!args.precision.empty()) cfg.set("precision", args.precision);
    if (!args.beamformer.empty()) cfg.set("beamformer", args.beamformer);
    if (!args.psd.empty()) cfg.set("psd", args.psd);
    for (const std::string& kv : args.overrides) {
        std::size_t eq = kv.find('=');
        if (eq == std::string::npos) throw mcse::ConfigError("override must be key=value: " + kv);
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-channel speech enhancement pipeline"};
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* help;
        int (*run)(const mcse::Config&);
        CommonArgs args;
    };
    Sub subs[] = {
        {"simulate", "generate a scenario dataset", mcse::cmd_simulate, {}},
        {"train", "train the mask network", mcse::cmd_train, {}},
        {"enhance", "beamform a multi-channel recording", mcse::cmd_enhance, {}},
        {"bench", "benchmark binary vs float matmul", mcse::cmd_bench, {}},
        {"report", "print the complexity report", mcse::cmd_report, {}},
        {"evaluate", "score an enhanced recording", mcse::cmd_evaluate, {}},
    };
    for (Sub& sub : subs) add_common(app.add_subcommand(sub.name, sub.help), sub.args);

    try {
        app.parse(argc, argv);
        for (Sub& sub : subs)
            if (app.get_subcommand(sub.name)->parsed()) return sub.run(build_config(sub.args));
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const mcse::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
