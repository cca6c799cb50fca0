#pragma once

#include <vector>

#include "ncsim/nc_device.hpp"

namespace ncsim {

struct device_metrics {
    double ss_min = 0.0;     // mV/dec
    double v_t = 0.0;        // V
    double dibl = 0.0;       // mV/V, signed
    double hysteresis = 0.0; // V
    double i_on = 0.0;       // A
    double i_off = 0.0;      // A
};

// Minimum subthreshold slope over adjacent row pairs whose currents both lie
// in [i_lo, i_hi], in mV/dec. Pairs with non-increasing current are skipped.
double extract_ss(const sweep_table& table, double i_lo, double i_hi);

// Constant-current threshold: v_gs where the table crosses i_crit, by linear
// interpolation in log current. The usual criterion current for a device is
// vt_criterion_current(geom).
double extract_vt(const sweep_table& table, double i_crit);

// Threshold shift per volt of drain bias between two sweeps, mV/V, signed
// (v_t at the lower drain bias minus v_t at the higher one, over the bias
// difference read from the tables). Identical thresholds give exactly zero.
double extract_dibl(const sweep_table& table_lin, const sweep_table& table_sat, double i_crit);

// Max gate-voltage separation between the up and down sweeps at equal
// current, over log-spaced currents in [i_lo, i_hi].
double hysteresis_width(const sweep_table& up, const sweep_table& down, double i_lo, double i_hi);

struct vds_interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Maximal v_ds intervals with negative finite-difference output slope.
// Endpoints are table grid points; empty for monotone curves.
std::vector<vds_interval> detect_ndr(const output_table& table);

struct saturation_result {
    bool saturates = false;
    double gds_ratio = 0.0; // end-cell slope over max cell slope
};

// saturates when the slope at v_ds = v_dd is below half the curve's peak slope.
saturation_result saturation_check(const output_table& table, double v_dd);

} // namespace ncsim
