#pragma once

#include <optional>
#include <vector>

#include "ncsim/ferroelectric.hpp"
#include "ncsim/fet.hpp"

namespace ncsim {

// Series combination of the ferroelectric capacitor and the surrogate FET
// gate. Charge balance: the ferroelectric charge equals the gate charge, and
// the external gate voltage splits as v_gs = v_int + v_fe.
struct nc_fet {
    fet_params fet;
    lk_model lk;

    void validate() const {
        fet.validate();
        lk.coeffs.validate();
        lk.geom.validate();
    }
};

// One self-consistent steady state of the coupled device.
struct operating_point {
    double v_gs = 0.0;  // external gate voltage
    double v_ds = 0.0;
    double v_int = 0.0; // internal gate voltage
    double v_fe = 0.0;  // ferroelectric voltage drop
    double q = 0.0;     // shared charge, C
    double p = 0.0;     // polarization, C/m^2
    double i_ds = 0.0;
    s_curve_region region{};
    bool converged = false;
    int iterations = 0;
};

enum class sweep_direction { up, down };

// Gate sweep at fixed drain bias. Rows are ordered in traversal order:
// ascending v_gs for up, descending for down.
struct sweep_table {
    sweep_direction direction = sweep_direction::up;
    double v_ds = 0.0;
    std::vector<operating_point> rows;
};

// Drain sweep at fixed gate bias; rows ascend in v_ds.
struct output_table {
    double v_gs = 0.0;
    std::vector<operating_point> rows;
};

struct attractor_result {
    double v_a = 0.0;      // measured crossover gate voltage (mean over pairs)
    double spread = 0.0;   // max minus min crossing over area pairs
    double q_zero_v = 0.0; // gate voltage where the bare surrogate holds zero charge
};

// Solves v_int + v_fe_static(q_gate(v_int, v_ds)) = v_gs to |residual| < 1e-9 V.
// With a guess: damped Newton from it, so repeated calls follow a branch and
// jump only where it folds. Without: first root of an ascending scan from -1 V.
operating_point solve_static(const nc_fet& dev, double v_gs, double v_ds,
                             std::optional<double> guess = std::nullopt);

// All self-consistent states at one bias: scans the charge-balance residual on
// a uniform grid over v_int in [-2, 2] V and refines every sign change.
// Distinct roots are separated by more than 1e-6 V, sorted ascending.
std::vector<operating_point> find_all_roots(const nc_fet& dev, double v_gs, double v_ds);

sweep_table sweep_idvg(const nc_fet& dev, double v_gs_start, double v_gs_stop, double step,
                       double v_ds, sweep_direction direction);

output_table sweep_idvd(const nc_fet& dev, double v_ds_start, double v_ds_stop, double step,
                        double v_gs);

// Crossover of the gate-sweep currents across ferroelectric areas. All listed
// areas must lie above the critical area so each sweep is single-valued.
attractor_result attractor_estimate(const fet_params& fet, const lk_model& lk_base,
                                    const std::vector<double>& a_fe_list, double v_ds);

// Largest area (within 1% relative) at which the up/down gate-sweep pair shows
// more than 1 mV of iso-current hysteresis. search_lo must be hysteretic and
// search_hi clean, otherwise the bisection has nothing to split.
double critical_area(const fet_params& fet, const lk_model& lk_base, double search_lo,
                     double search_hi, double v_ds);

} // namespace ncsim
