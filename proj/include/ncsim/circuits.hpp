#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ncsim/nc_device.hpp"

namespace ncsim {

// One transistor position in an inverter. Without an LK model the leg is a
// conventional device; with one it is the series NC stack.
struct device_leg {
    fet_params fet;
    std::optional<lk_model> lk;

    bool is_nc() const { return lk.has_value(); }
};

struct inverter {
    device_leg nfet;
    device_leg pfet;
    double v_dd = 0.7;

    void validate() const;
};

struct ring_oscillator {
    int stages = 7;
    double c_wire = 3e-15;
    inverter inv;

    void validate() const;
};

struct transient_config {
    double t_stop = 50e-9;
    double dt_init = 1e-12;
    double dt_min = 1e-15;
    double dt_max = 2e-11;
    double newton_tol = 1e-10; // A, max residual across node and charge equations
    int max_newton = 30;

    void validate() const;
};

// Node voltages and ferroelectric charges per accepted time step. Charge
// columns are stage-major, N leg before P leg, NC legs only.
struct transient_trace {
    std::vector<double> t;
    std::vector<std::vector<double>> v_nodes; // [step][node]
    std::vector<std::vector<double>> q_fe;    // [step][nc leg]
    std::vector<double> i_vdd;                // supply current, A
};

struct vtc_point {
    double v_in = 0.0;
    double v_out = 0.0;
    bool converged = false;
};

struct vtc_table {
    sweep_direction direction = sweep_direction::up;
    double v_dd = 0.0;
    std::vector<vtc_point> rows;
};

// Output-node KCL solved per input point, with continuation in v_out and in
// each NC leg's internal state so a multistable transfer curve is traversed
// the way a slow input ramp would traverse it.
vtc_table inverter_vtc(const inverter& inv, double v_in_start, double v_in_stop, double step,
                       sweep_direction direction);

struct vtc_metrics_result {
    double gain_max = 0.0;
    double v_m = 0.0;
    double nm_h = 0.0;
    double nm_l = 0.0;
    double vtc_hysteresis = 0.0;
};

vtc_metrics_result vtc_metrics(const vtc_table& up, const vtc_table& down, double v_dd);

// Implicit integration of the ring (BDF2, backward Euler on the first step):
// wire capacitance at every node, ferroelectric charge as explicit state on
// NC legs, adaptive step control.
transient_trace ro_transient(const ring_oscillator& ro, const transient_config& cfg);

struct ro_metrics_result {
    double period = 0.0;
    double delay_per_stage = 0.0;
    double energy_per_cycle = 0.0;
};

// Period from settled rising half-supply crossings of node 0; supply energy
// integrated over an integer number of settled periods.
ro_metrics_result ro_metrics(const transient_trace& trace, const ring_oscillator& ro);

struct energy_delay_row {
    double v_dd = 0.0;
    double delay_per_stage = 0.0;
    double energy_per_cycle = 0.0;
};

// Runs both ring variants across the supply list; returns (conventional, nc).
std::pair<std::vector<energy_delay_row>, std::vector<energy_delay_row>> energy_delay_sweep(
    const ring_oscillator& conv, const ring_oscillator& nc, const std::vector<double>& v_dd_list,
    const transient_config& cfg);

// Fractional supply-energy saving of nc versus conv at equal stage delay,
// interpolating both curves log-log in delay.
double iso_delay_reduction(const std::vector<energy_delay_row>& conv,
                           const std::vector<energy_delay_row>& nc, double target_delay);

} // namespace ncsim
