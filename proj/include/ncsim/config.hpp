#ifndef NCSIM_CONFIG_HPP
#define NCSIM_CONFIG_HPP

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ncsim/circuits.hpp"
#include "ncsim/fet.hpp"

namespace ncsim {

// Sectioned key-value configuration. Values are stored in the units the file
// uses so the echo dump round-trips bit exactly; the make_* builders convert
// to SI. Every key has a default, so an empty file is a valid config.
struct fet_config_section {
    double i_off_nA = 10.0;
    double i_on_uA = 40.0;
    double ss_mV_dec = 68.0;
    double dibl_mV_V = 30.0;
    double v_dd = 0.7; // supply the current targets refer to, V
    double wf_eV = 4.280;
    double wf_ref_eV = 4.280;
    double r_sd_ohm = 4000.0;
    double l_g_nm = 12.0;
    double d_nw_nm = 6.0;
    double eot_nm = 0.8;
    double l_ov_nm = 2.0;
    int n_wires = 3;
};

struct experiment_config {
    // [ferro]
    double p_r_uC_cm2 = 17.0;
    double e_c_MV_cm = 1.1;
    double gamma = 0.0; // V*m^9/C^5
    double rho = 1e-3;  // V*m*s/C
    double t_fe_nm = 5.0;
    std::vector<double> a_fe_nm2 = {500.0};

    // [fet.n] / [fet.p]; the pull-up's weaker default on-current reflects
    // its lower mobility at matched geometry
    fet_config_section fet_n;
    fet_config_section fet_p = [] {
        fet_config_section s;
        s.i_on_uA = 30.0;
        return s;
    }();

    // [circuit]
    int stages = 7;
    double c_wire_fF = 3.0;
    std::vector<double> v_dd = {0.7};

    // [sweep]
    double v_gs_start = -0.2;
    double v_gs_stop = 0.7;
    double step = 2e-3;
    std::vector<double> v_ds_list = {0.05, 0.7};
    double v_ds_start = 0.0;
    double v_ds_stop = 0.7;
    std::vector<double> v_gs_list = {0.25, 0.45, 0.7}; // gate biases for drain sweeps
    std::vector<sweep_direction> directions = {sweep_direction::up, sweep_direction::down};

    // [transient]
    double t_stop_ns = 50.0;
    double dt_init_ps = 1.0;
    double dt_min_fs = 1.0;
    double dt_max_ps = 20.0;
    double newton_tol = 1e-10; // A
    int max_newton = 30;

    // [output]
    std::string out_dir = "out";
    int precision = 9;

    // dotted keys that were set by the file or an override
    std::set<std::string> provided;

    void validate() const;

    // SI builders
    lk_model make_lk(double a_fe_nm2_value) const;
    fet_params make_fet(fet_polarity pol) const;
    // Same device at the reference workfunction; comparison baselines use
    // this so a wf_eV override only moves the device under study.
    fet_params make_fet_reference(fet_polarity pol) const;
    transient_config make_transient() const;
    // nullopt builds the conventional circuit, a value adds ferroelectric
    // gates of that area to both legs
    inverter make_inverter(std::optional<double> a_fe_nm2_value) const;
    ring_oscillator make_ring(std::optional<double> a_fe_nm2_value) const;
};

// Parse failures carry "line:column" positions; range failures name the
// dotted key and the violated constraint.
experiment_config parse_config_text(const std::string& text,
                                    const std::vector<std::string>& overrides = {},
                                    const std::string& origin = "config");
experiment_config load_config(const std::string& path,
                              const std::vector<std::string>& overrides = {});

// Every key in section order, values exactly re-parseable; keys that still
// hold their built-in value carry a trailing "# source=default" marker.
std::string echo_config(const experiment_config& cfg);

} // namespace ncsim

#endif
