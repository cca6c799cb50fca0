#ifndef NCSIM_EXPERIMENTS_HPP
#define NCSIM_EXPERIMENTS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ncsim/config.hpp"

namespace ncsim {

enum class experiment_kind {
    s_curve,
    idvg,
    idvd,
    attractor,
    critical_area,
    inverter_vtc,
    ro_transient,
    energy_delay,
    device_metrics
};

const char* to_cli_name(experiment_kind kind);
std::optional<experiment_kind> kind_from_cli_name(const std::string& name);

// Names of everything written into cfg.out_dir, manifest last. Outputs are
// deterministic: no clocks, no absolute paths, stable ordering.
struct experiment_result {
    std::vector<std::string> files;
    bool all_converged = true;
};

experiment_result run_experiment(const experiment_config& cfg, experiment_kind kind);

// Index-parallel loop used for independent runs (areas, bias families).
// Worker count: min(task count, NCFET_SIM_THREADS or hardware threads).
// Results must be written by index; bodies may throw, the lowest-index
// exception wins and is rethrown after all workers join.
void parallel_for(int n, const std::function<void(int)>& body);

} // namespace ncsim

#endif
