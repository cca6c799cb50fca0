#include "ncsim/fet.hpp"

#include <cmath>
#include <numbers>

#include "ncsim/errors.hpp"

namespace ncsim {

void fet_geometry::validate() const {
    require(l_g > 0.0 && d_nw > 0.0 && eot > 0.0 && l_ov >= 0.0,
            error_kind::invalid_input, "fet geometry: lengths must be positive");
    require(n_wires >= 1, error_kind::invalid_input, "fet geometry: need >= 1 wire");
}

double fet_geometry::gate_area() const {
    return std::numbers::pi * d_nw * l_g * n_wires;
}

double fet_geometry::overlap_area() const {
    return std::numbers::pi * d_nw * l_ov * n_wires;
}

double fet_geometry::c_ox() const {
    return eps0 * eps_r_sio2 / eot;
}

void fet_params::validate() const {
    geom.validate();
    require(i_sp > 0.0, error_kind::invalid_input, "fet: i_sp must be positive");
    require(n_slope >= 1.0, error_kind::invalid_input, "fet: n_slope must be >= 1");
    require(phi_t > 0.0, error_kind::invalid_input, "fet: phi_t must be positive");
    require(r_sd >= 0.0, error_kind::invalid_input, "fet: r_sd must be nonnegative");
    require(sigma_dibl >= 0.0 && sigma_dibl < 1.0, error_kind::invalid_input,
            "fet: sigma_dibl must lie in [0, 1)");
    require(c_area >= 0.0 && c_ov_s >= 0.0 && c_ov_d >= 0.0,
            error_kind::invalid_input, "fet: capacitances must be nonnegative");
}

void fet_targets::validate() const {
    require(i_off > 0.0 && i_on > i_off, error_kind::invalid_input,
            "fet targets: need i_on > i_off > 0");
    require(ss_target > 0.0 && dibl_target >= 0.0 && v_dd > 0.0,
            error_kind::invalid_input, "fet targets: out of range");
}

namespace {

double softplus(double x) {
    if (x > 30.0) return x;
    if (x < -30.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

double f_chan(double u) {
    double s = softplus(0.5 * u);
    return s * s;
}

double df_chan(double u) {
    return softplus(0.5 * u) * sigmoid(0.5 * u);
}

// Intrinsic (mirrored-frame) evaluation at primed voltages.
struct core_point {
    double i = 0.0;
    double q = 0.0;
    double di_dvg = 0.0;
    double di_dvd = 0.0;
};

core_point eval_core(const fet_params& f, double wf_shift,
                     double v_gs_i, double v_ds_i) {
    core_point out;
    double n_phi = f.n_slope * f.phi_t;
    double v_te = f.v_t0 + wf_shift - f.sigma_dibl * v_ds_i;
    double u_s = (v_gs_i - v_te) / n_phi;
    double u_d = u_s - v_ds_i / n_phi;
    out.i = f.i_sp * (f_chan(u_s) - f_chan(u_d));
    out.di_dvg = f.i_sp * (df_chan(u_s) - df_chan(u_d)) / n_phi;
    out.di_dvd = f.i_sp * (f.sigma_dibl * df_chan(u_s) +
                           (1.0 - f.sigma_dibl) * df_chan(u_d)) / n_phi;
    out.q = f.c_ov_s * v_gs_i + f.c_ov_d * (v_gs_i - v_ds_i) +
            f.c_area * n_phi * 0.5 * (softplus(u_s) + softplus(u_d));
    return out;
}

// Terminal-to-intrinsic mapping with the contact drops folded in:
//   v_gs' = v_gs - I*r_sd/2,  v_ds' = v_ds - I*r_sd
// solved by damped Newton on the two primed voltages.
fet_bias_point solve_mirrored(const fet_params& f, double wf_shift,
                              double v_gs, double v_ds) {
    fet_bias_point out;
    double r_s = 0.5 * f.r_sd;
    double v_g = v_gs, v_d = v_ds;
    core_point c = eval_core(f, wf_shift, v_g, v_d);
    if (f.r_sd > 0.0) {
        const double i_tol = 1e-12; // A, on the implied current mismatch
        const int max_iter = 50;
        double r1 = v_g - v_gs + c.i * r_s;
        double r2 = v_d - v_ds + c.i * f.r_sd;
        double best = std::max(std::abs(r1), std::abs(r2));
        for (int it = 0; it < max_iter; ++it) {
            out.iterations = it + 1;
            if (std::abs(r1) < i_tol * r_s && std::abs(r2) < i_tol * f.r_sd) break;
            double j11 = 1.0 + r_s * c.di_dvg;
            double j12 = r_s * c.di_dvd;
            double j21 = f.r_sd * c.di_dvg;
            double j22 = 1.0 + f.r_sd * c.di_dvd;
            double det = j11 * j22 - j12 * j21;
            require(det != 0.0, error_kind::non_convergence,
                    "fet: singular contact-drop Jacobian");
            double dg = -(r1 * j22 - r2 * j12) / det;
            double dd = -(j11 * r2 - j21 * r1) / det;
            double damp = 1.0;
            for (int h = 0; h <= 6; ++h) {
                double vg_n = v_g + damp * dg;
                double vd_n = v_d + damp * dd;
                core_point cn = eval_core(f, wf_shift, vg_n, vd_n);
                double r1n = vg_n - v_gs + cn.i * r_s;
                double r2n = vd_n - v_ds + cn.i * f.r_sd;
                double norm = std::max(std::abs(r1n), std::abs(r2n));
                if (norm <= best || h == 6) {
                    v_g = vg_n;
                    v_d = vd_n;
                    c = cn;
                    r1 = r1n;
                    r2 = r2n;
                    best = norm;
                    break;
                }
                damp *= 0.5;
            }
        }
        require(std::abs(r1) < i_tol * r_s && std::abs(r2) < i_tol * f.r_sd,
                error_kind::non_convergence, "fet: contact-drop solve stalled");
    }
    out.i_ds = c.i;
    out.q_g = c.q;
    out.v_gs_int = v_g;
    out.v_ds_int = v_d;
    return out;
}

} // namespace

fet_bias_point solve_bias(const fet_params& f, double v_gs, double v_ds) {
    double sgn = f.polarity == fet_polarity::n ? 1.0 : -1.0;
    double wf_shift = sgn * (f.wf - f.wf_ref); // mirrored-frame threshold shift
    fet_bias_point p = solve_mirrored(f, wf_shift, sgn * v_gs, sgn * v_ds);
    p.i_ds *= sgn;
    p.q_g *= sgn;
    p.v_gs_int *= sgn;
    p.v_ds_int *= sgn;
    return p;
}

double ids(const fet_params& f, double v_gs, double v_ds) {
    return solve_bias(f, v_gs, v_ds).i_ds;
}

double q_gate(const fet_params& f, double v_gs, double v_ds) {
    return solve_bias(f, v_gs, v_ds).q_g;
}

fet_params apply_workfunction(fet_params f, double wf) {
    f.wf = wf;
    return f;
}

fet_params calibrate_fet(const fet_targets& t, const fet_params& seed) {
    t.validate();
    fet_params f = seed;
    f.n_slope = (t.ss_target / 1000.0) / (f.phi_t * std::numbers::ln10);
    require(f.n_slope >= 1.0, error_kind::invalid_input,
            "calibrate_fet: slope target below the thermal limit");
    f.sigma_dibl = t.dibl_target / 1000.0;
    f.validate();

    // Newton on (v_t0, ln i_sp) against log-current targets, evaluated in
    // the mirrored frame so one path serves both polarities.
    double x = f.v_t0;
    double y = std::log(f.i_sp);
    auto resid = [&](double vt, double ly, double& r_off, double& r_on) {
        fet_params g = f;
        g.v_t0 = vt;
        g.i_sp = std::exp(ly);
        double i_off = solve_mirrored(g, 0.0, 0.0, t.v_dd).i_ds;
        double i_on = solve_mirrored(g, 0.0, t.v_dd, t.v_dd).i_ds;
        require(i_off > 0.0 && i_on > 0.0, error_kind::non_convergence,
                "calibrate_fet: nonpositive current");
        r_off = std::log(i_off) - std::log(t.i_off);
        r_on = std::log(i_on) - std::log(t.i_on);
    };

    double r1, r2;
    resid(x, y, r1, r2);
    double best = std::max(std::abs(r1), std::abs(r2));
    const double tol = 1e-12;
    bool done = best < tol;
    for (int it = 0; it < 80 && !done; ++it) {
        const double hx = 1e-6, hy = 1e-6;
        double a1, a2, b1, b2;
        resid(x + hx, y, a1, a2);
        resid(x, y + hy, b1, b2);
        double j11 = (a1 - r1) / hx, j12 = (b1 - r1) / hy;
        double j21 = (a2 - r2) / hx, j22 = (b2 - r2) / hy;
        double det = j11 * j22 - j12 * j21;
        require(det != 0.0, error_kind::non_convergence, "calibrate_fet: singular Jacobian");
        double dx = -(r1 * j22 - r2 * j12) / det;
        double dy = -(j11 * r2 - j21 * r1) / det;
        double damp = 1.0;
        for (int h = 0; h <= 8; ++h) {
            double xn = x + damp * dx, yn = y + damp * dy;
            double n1, n2;
            resid(xn, yn, n1, n2);
            double norm = std::max(std::abs(n1), std::abs(n2));
            if (norm < best || h == 8) {
                x = xn;
                y = yn;
                r1 = n1;
                r2 = n2;
                best = norm;
                break;
            }
            damp *= 0.5;
        }
        done = best < tol;
    }
    require(done, error_kind::non_convergence, "calibrate_fet: target solve stalled");
    f.v_t0 = x;
    f.i_sp = std::exp(y);
    f.validate();
    return f;
}

fet_params default_fet(fet_polarity pol, const fet_geometry& geom) {
    fet_params f;
    f.polarity = pol;
    f.geom = geom;
    f.c_area = geom.c_ox() * geom.gate_area();
    f.c_ov_s = geom.c_ox() * geom.overlap_area();
    f.c_ov_d = f.c_ov_s;
    f.phi_t = thermal_voltage();
    return f;
}

double vt_criterion_current(const fet_geometry& geom) {
    return 100e-9 * std::numbers::pi * geom.d_nw * geom.n_wires / geom.l_g;
}

} // namespace ncsim
