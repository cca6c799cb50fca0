#ifndef NCSIM_FET_HPP
#define NCSIM_FET_HPP

#include "ncsim/constants.hpp"

namespace ncsim {

// Short-channel nanowire FET surrogate. A single smooth interpolation
// function covers subthreshold through strong inversion:
//   I = i_sp * (F(u_s) - F(u_d)),  F(u) = softplus(u/2)^2
// with u_s, u_d normalized gate/drain overdrives. Drain barrier lowering
// enters as a linear threshold shift, contact resistance as an implicit
// source/drain voltage drop.

enum class fet_polarity { n, p };

struct fet_geometry {
    double l_g = 12e-9;    // gate length, m
    double d_nw = 6e-9;    // nanowire diameter, m
    double eot = 0.8e-9;   // equivalent oxide thickness, m
    double l_ov = 2e-9;    // gate/source-drain overlap, m
    int n_wires = 3;       // parallel nanowires

    void validate() const;
    double gate_area() const;    // channel gate area, m^2
    double overlap_area() const; // one-sided overlap area, m^2
    double c_ox() const;         // oxide capacitance per area, F/m^2
};

struct fet_params {
    fet_polarity polarity = fet_polarity::n;
    double v_t0 = 0.2;        // threshold at v_ds = 0, mirrored frame, V
    double wf = 4.280;        // gate workfunction, eV
    double wf_ref = 4.280;    // workfunction the calibration assumed, eV
    double n_slope = 1.15;    // subthreshold ideality
    double sigma_dibl = 0.03; // threshold shift per drain volt, V/V
    double i_sp = 1e-6;       // specific current prefactor, A
    double r_sd = 4000.0;     // total source+drain resistance, ohm
    double c_area = 0.0;      // channel gate capacitance, F
    double c_ov_s = 0.0;      // source overlap capacitance, F
    double c_ov_d = 0.0;      // drain overlap capacitance, F
    double phi_t = 0.02585202; // thermal voltage, V
    fet_geometry geom;

    void validate() const;
};

struct fet_targets {
    double i_off = 10e-9;     // A at v_gs = 0, v_ds = v_dd
    double i_on = 40e-6;      // A at v_gs = v_ds = v_dd
    double ss_target = 68.0;  // mV/dec
    double dibl_target = 30.0;// mV/V
    double v_dd = 0.7;        // V

    void validate() const;
};

// Terminal solve at one bias point. All values are in the device's
// physical frame (negative currents and charges for P polarity).
struct fet_bias_point {
    double i_ds = 0.0;     // A
    double q_g = 0.0;      // C
    double v_gs_int = 0.0; // intrinsic gate-source voltage, V
    double v_ds_int = 0.0; // intrinsic drain-source voltage, V
    int iterations = 0;
};

fet_bias_point solve_bias(const fet_params& f, double v_gs, double v_ds);

double ids(const fet_params& f, double v_gs, double v_ds);    // A
double q_gate(const fet_params& f, double v_gs, double v_ds); // C

// Returns a copy with the gate workfunction replaced; threshold in the
// mirrored frame shifts by +(wf - wf_ref) for N and -(wf - wf_ref) for P.
fet_params apply_workfunction(fet_params f, double wf);

// Fit v_t0 and i_sp to the off/on current targets; slope and DIBL
// coefficients follow analytically from their targets.
fet_params calibrate_fet(const fet_targets& t, const fet_params& seed);

// Geometry-derived capacitances plus nominal starting values.
fet_params default_fet(fet_polarity pol, const fet_geometry& geom = {});

// Constant-current threshold criterion: 100 nA normalized by effective
// channel width over length.
double vt_criterion_current(const fet_geometry& geom);

} // namespace ncsim

#endif
