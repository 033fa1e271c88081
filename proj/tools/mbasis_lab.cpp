#include <iostream>

#include <CLI11.hpp>

#include "mbasis/config.hpp"
#include "mbasis/io.hpp"
#include "mbasis/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Biorthogonal system experiments"};
    app.footer(mbasis::config_reference() +
               "\nEnvironment: MBASIS_LOG = quiet | info | debug (default info)\n"
               "Exit status: 0 all checks passed, 1 usage or config error, 2 failed check or violated contract");

    std::string command, config_path, out;
    std::optional<std::uint64_t> seed;
    std::optional<int> truncation;
    bool auto_strong = false;
    app.add_option("command", command, "build-system | perturb | represent | pathology | unb")
        ->required()
        ->check(CLI::IsMember({"build-system", "perturb", "represent", "pathology", "unb"}));
    app.add_option("--config", config_path, "key = value configuration file")->required();
    app.add_option("--out", out, "output directory (overrides 'output')");
    app.add_option("--seed", seed, "random seed (overrides 'seed')");
    app.add_option("--truncation", truncation, "truncation size (overrides 'truncation')");
    app.add_flag("--auto-strong", auto_strong, "perturb: partition from representing indices");
    CLI11_PARSE(app, argc, argv);

    mbasis::ExperimentConfig cfg;
    try {
        cfg = mbasis::parse_config(mbasis::read_text(config_path), false);
        if (!cfg.command.empty() && cfg.command != command)
            throw mbasis::Error("config command '" + cfg.command + "' differs from '" + command + "'");
        cfg.command = command;
        if (!out.empty()) cfg.output = out;
        if (seed) cfg.seed = *seed;
        if (truncation) cfg.truncation = *truncation;
        if (auto_strong) cfg.auto_strong = true;
        cfg.validate(true);
    } catch (const mbasis::Error& e) {
        std::cerr << "mbasis-lab: " << e.what() << '\n';
        return 1;
    }

    try {
        const auto res = mbasis::run(cfg, mbasis::log_level_from_env());
        if (mbasis::log_level_from_env() != mbasis::LogLevel::quiet) {
            int failed = 0;
            for (const auto& c : res.checks) failed += c.pass ? 0 : 1;
            std::cerr << "[mbasis] " << res.checks.size() - failed << "/" << res.checks.size() << " checks passed";
            if (res.exit_code != 0)
                std::cerr << "; run FAILED"
                          << (res.failure.contains("invariant") ? " (" + res.failure["invariant"].get<std::string>() + ")" : "");
            std::cerr << '\n';
        }
        return res.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "mbasis-lab: " << e.what() << '\n';
        return 2;
    }
}
