#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ncsim/errors.hpp"
#include "ncsim/experiments.hpp"

namespace {

struct cli_options {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> sets;
};

int run(ncsim::experiment_kind kind, const cli_options& opt) {
    using namespace ncsim;
    try {
        std::vector<std::string> overrides = opt.sets;
        if (!opt.out_dir.empty()) overrides.push_back("output.dir=" + opt.out_dir);
        experiment_config cfg = opt.config_path.empty()
                                    ? parse_config_text("", overrides)
                                    : load_config(opt.config_path, overrides);
        experiment_result result = run_experiment(cfg, kind);
        for (const auto& f : result.files)
            std::printf("%s/%s\n", cfg.out_dir.c_str(), f.c_str());
        return result.all_converged ? 0 : 1;
    } catch (const sim_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ferroelectric-gate nanowire FET and circuit simulator"};
    app.require_subcommand(1);

    cli_options opt;
    int exit_code = 0;
    for (auto kind :
         {ncsim::experiment_kind::s_curve, ncsim::experiment_kind::idvg,
          ncsim::experiment_kind::idvd, ncsim::experiment_kind::attractor,
          ncsim::experiment_kind::critical_area, ncsim::experiment_kind::inverter_vtc,
          ncsim::experiment_kind::ro_transient, ncsim::experiment_kind::energy_delay,
          ncsim::experiment_kind::device_metrics}) {
        auto* sub = app.add_subcommand(ncsim::to_cli_name(kind));
        sub->add_option("--config", opt.config_path, "Config file path");
        sub->add_option("--out", opt.out_dir, "Output directory (overrides output.dir)");
        sub->add_option("--set", opt.sets, "Override, section.key=value (repeatable)");
        sub->callback([kind, &opt, &exit_code] { exit_code = run(kind, opt); });
    }

    CLI11_PARSE(app, argc, argv);
    return exit_code;
}
