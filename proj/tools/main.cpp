#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include "CLI11.hpp"
#include "dlkit/config.hpp"
#include "dlkit/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"dlkit: Dyson-Laguerre simulation and cutoff toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", DLKIT_VERSION);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string format;

    const char* modes[] = {"simulate", "distance", "cutoff-profile", "check-cd", "couple", "ou-formulas"};
    for (const char* m : modes) {
        auto* sub = app.add_subcommand(m, std::string("run the ") + m + " experiment");
        sub->add_option("--config", config_path, "flat key=value config file");
        sub->add_option("--seed", seed, "overrides the config seed");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        dlkit::Config cfg;
        if (!config_path.empty()) cfg = dlkit::load_config(config_path);
        cfg.mode = app.get_subcommands().front()->get_name();
        if (seed) cfg.seed = *seed;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!format.empty()) cfg.format = format;
        dlkit::validate_config(cfg);
        auto man = dlkit::run(cfg);
        std::cout << dlkit::manifest_to_json(man);
        return 0;
    } catch (const dlkit::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const dlkit::ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const dlkit::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    }
}
