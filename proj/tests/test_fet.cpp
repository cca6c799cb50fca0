#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ncsim/errors.hpp"
#include "ncsim/fet.hpp"

using namespace ncsim;

namespace {

fet_params calibrated_n() {
    static fet_params f = calibrate_fet(fet_targets{}, default_fet(fet_polarity::n));
    return f;
}

fet_params calibrated_p() {
    fet_targets t;
    t.i_on = 30e-6;
    static fet_params f = calibrate_fet(t, default_fet(fet_polarity::p));
    return f;
}

// Constant-current threshold from a fine gate sweep, interpolated in
// log current. Independent of the analysis module on purpose.
double const_current_vt(const fet_params& f, double v_ds, double i_crit) {
    double prev_v = 0.0, prev_i = ids(f, 0.0, v_ds);
    for (int k = 1; k <= 700; ++k) {
        double v = k * 1e-3;
        double i = ids(f, v, v_ds);
        if (prev_i < i_crit && i >= i_crit) {
            double t = (std::log(i_crit) - std::log(prev_i)) /
                       (std::log(i) - std::log(prev_i));
            return prev_v + t * (v - prev_v);
        }
        prev_v = v;
        prev_i = i;
    }
    FAIL("criterion current never reached");
    return 0.0;
}

} // namespace

TEST_SUITE("fet") {

TEST_CASE("zero drain bias gives zero current") {
    auto f = calibrated_n();
    CHECK(ids(f, 0.0, 0.0) == 0.0);
    CHECK(ids(f, 0.4, 0.0) == 0.0);
    CHECK(ids(f, 0.7, 0.0) == 0.0);
}

TEST_CASE("subthreshold slope approaches the ideality limit") {
    auto f = calibrated_n();
    double expect = f.n_slope * f.phi_t * std::numbers::ln10; // V/dec
    // Sample two decades below the slope target's measurement window.
    double v1 = 0.0, v2 = 0.02;
    double i1 = ids(f, v1, 0.7), i2 = ids(f, v2, 0.7);
    double slope = (v2 - v1) / (std::log10(i2) - std::log10(i1));
    CHECK(slope == doctest::Approx(expect).epsilon(0.01));
}

TEST_CASE("contact resistance lowers the on current") {
    auto f = calibrated_n();
    auto f0 = f;
    f0.r_sd = 0.0;
    double with_r = ids(f, 0.7, 0.7);
    double without_r = ids(f0, 0.7, 0.7);
    CHECK(with_r < without_r);
    CHECK(without_r < 3.0 * with_r); // drops stay a perturbation
    // The implicit solve reports the interior drops.
    auto b = solve_bias(f, 0.7, 0.7);
    CHECK(b.v_gs_int == doctest::Approx(0.7 - b.i_ds * 0.5 * f.r_sd).epsilon(1e-9));
    CHECK(b.v_ds_int == doctest::Approx(0.7 - b.i_ds * f.r_sd).epsilon(1e-9));
}

TEST_CASE("gate charge rises with gate bias everywhere") {
    auto f = calibrated_n();
    for (int gi = 0; gi < 50; ++gi) {
        double v_gs = -0.2 + 1.1 * gi / 49.0;
        for (int di = 0; di < 20; ++di) {
            double v_ds = 0.7 * di / 19.0;
            double h = 1e-3;
            double d = q_gate(f, v_gs + h, v_ds) - q_gate(f, v_gs - h, v_ds);
            CHECK(d > 0.0);
        }
    }
}

TEST_CASE("gate charge falls with drain bias above threshold") {
    auto f = calibrated_n();
    for (int gi = 0; gi < 50; ++gi) {
        double v_gs = f.v_t0 + 0.05 + (0.7 - f.v_t0 - 0.05) * gi / 49.0;
        for (int di = 0; di < 20; ++di) {
            double v_ds = 0.02 + 0.66 * di / 19.0;
            double h = 1e-3;
            double d = q_gate(f, v_gs, v_ds + h) - q_gate(f, v_gs, v_ds - h);
            CHECK(d < 0.0);
        }
    }
}

TEST_CASE("gate charge crosses zero exactly once per drain bias") {
    auto f = calibrated_n();
    for (double v_ds : {0.0, 0.05, 0.35, 0.7}) {
        int crossings = 0;
        double prev = q_gate(f, -1.0, v_ds);
        for (int k = 1; k <= 300; ++k) {
            double v = -1.0 + 2.0 * k / 300.0;
            double cur = q_gate(f, v, v_ds);
            if (std::signbit(cur) != std::signbit(prev)) ++crossings;
            prev = cur;
        }
        CHECK(crossings == 1);
    }
}

TEST_CASE("workfunction shifts the constant-current threshold rigidly") {
    auto f = calibrated_n();
    double i_crit = vt_criterion_current(f.geom);
    double vt_ref = const_current_vt(f, 0.7, i_crit);
    CHECK(apply_workfunction(f, f.wf_ref).v_t0 == f.v_t0); // pure copy
    CHECK(ids(apply_workfunction(f, f.wf_ref), 0.33, 0.7) == ids(f, 0.33, 0.7));
    auto low = apply_workfunction(f, 4.180);
    double vt_low = const_current_vt(low, 0.7, i_crit);
    CHECK(std::abs(vt_low - (vt_ref - 0.100)) < 1e-3);
}

TEST_CASE("calibration meets its targets") {
    fet_targets t;
    auto f = calibrated_n();
    CHECK(f.n_slope ==
          doctest::Approx((t.ss_target / 1000.0) / (f.phi_t * std::numbers::ln10))
              .epsilon(1e-12));
    CHECK(f.sigma_dibl == doctest::Approx(t.dibl_target / 1000.0).epsilon(1e-12));
    // Off and on currents are hit by construction.
    CHECK(ids(f, 0.0, t.v_dd) == doctest::Approx(t.i_off).epsilon(1e-6));
    CHECK(ids(f, t.v_dd, t.v_dd) == doctest::Approx(t.i_on).epsilon(1e-6));

    // Minimum slope over the current window [1e-11, 1e-7] A. The sweep must
    // reach below the window floor, so it starts at negative gate bias.
    double best = 1e9;
    double prev_v = -0.3, prev_i = ids(f, -0.3, t.v_dd);
    for (int k = 1; k <= 1000; ++k) {
        double v = -0.3 + k * 1e-3;
        double i = ids(f, v, t.v_dd);
        if (prev_i >= 1e-11 && i <= 1e-7 && i > prev_i) {
            best = std::min(best, (v - prev_v) / (std::log10(i) - std::log10(prev_i)));
        }
        prev_v = v;
        prev_i = i;
    }
    CHECK(best * 1000.0 == doctest::Approx(t.ss_target).epsilon(0.01));

    // Constant-current threshold shift between two saturated drain biases
    // recovers the built-in coefficient exactly: reverse injection is frozen
    // out at both points, so only the sigma term moves.
    double i_crit = vt_criterion_current(f.geom);
    double vt_a = const_current_vt(f, 0.35, i_crit);
    double vt_b = const_current_vt(f, 0.7, i_crit);
    double dibl = (vt_a - vt_b) / (0.7 - 0.35) * 1000.0;
    CHECK(dibl == doctest::Approx(t.dibl_target).epsilon(0.003));

    // At a 50 mV drain point the extraction reads high: thermal reverse
    // injection raises v_t there by roughly phi_t ln(1 - exp(-v_ds/n phi_t)).
    double vt_lin = const_current_vt(f, 0.05, i_crit);
    CHECK((vt_lin - vt_b) / 0.65 * 1000.0 > t.dibl_target + 5.0);

    // Calibration is a fixed point of itself.
    auto again = calibrate_fet(t, f);
    CHECK(again.v_t0 == doctest::Approx(f.v_t0).epsilon(1e-9));
    CHECK(again.i_sp == doctest::Approx(f.i_sp).epsilon(1e-9));
}

TEST_CASE("channel core is source-drain symmetric without parasitics") {
    auto f = calibrated_n();
    f.r_sd = 0.0;
    f.sigma_dibl = 0.0; // barrier shift breaks the exchange symmetry
    for (double v_gs : {0.1, 0.3, 0.55}) {
        for (double v_ds : {0.05, 0.2, 0.6}) {
            double fwd = ids(f, v_gs, v_ds);
            double rev = -ids(f, v_gs - v_ds, -v_ds);
            CHECK(fwd == doctest::Approx(rev).epsilon(1e-12));
        }
    }
}

TEST_CASE("polarities mirror exactly") {
    auto n = calibrated_n();
    auto p = n;
    p.polarity = fet_polarity::p;
    for (double v_gs : {-0.7, -0.3, 0.0, 0.2}) {
        for (double v_ds : {-0.7, -0.05, 0.0}) {
            CHECK(ids(p, v_gs, v_ds) == doctest::Approx(-ids(n, -v_gs, -v_ds)).epsilon(1e-12));
            CHECK(q_gate(p, v_gs, v_ds) ==
                  doctest::Approx(-q_gate(n, -v_gs, -v_ds)).epsilon(1e-12));
        }
    }
    // Calibrated P device conducts its target current in its own frame.
    auto pc = calibrated_p();
    CHECK(ids(pc, -0.7, -0.7) == doctest::Approx(-30e-6).epsilon(1e-6));
    CHECK(ids(pc, 0.0, -0.7) == doctest::Approx(-10e-9).epsilon(1e-6));
}

TEST_CASE("current and charge are continuously differentiable") {
    auto f = calibrated_n();
    // Two-scale central differences agree through the threshold region,
    // which rules out slope kinks.
    for (int k = 0; k <= 60; ++k) {
        double v = 0.05 + 0.5 * k / 60.0;
        double h = 1e-4;
        double g1 = (ids(f, v + h, 0.7) - ids(f, v - h, 0.7)) / (2 * h);
        double g2 = (ids(f, v + h / 2, 0.7) - ids(f, v - h / 2, 0.7)) / h;
        CHECK(g1 == doctest::Approx(g2).epsilon(1e-4));
        double q1 = (q_gate(f, v + h, 0.7) - q_gate(f, v - h, 0.7)) / (2 * h);
        double q2 = (q_gate(f, v + h / 2, 0.7) - q_gate(f, v - h / 2, 0.7)) / h;
        CHECK(q1 == doctest::Approx(q2).epsilon(1e-4));
    }
}

TEST_CASE("output conductance collapses by two decades at full drive") {
    auto f = calibrated_n();
    auto slope = [&](const fet_params& p, double v_ds) {
        double h = 5e-4;
        return (ids(p, 0.7, v_ds + h) - ids(p, 0.7, v_ds - h)) / (2 * h);
    };
    double max_slope = 0.0;
    for (int k = 1; k < 140; ++k) max_slope = std::max(max_slope, slope(f, 0.7 * k / 140.0));
    double ratio = slope(f, 0.6995) / max_slope;
    // The residual end slope is dominated by sigma_dibl times gm; with the
    // stock calibration that lands just above 5% of the peak slope.
    CHECK(ratio > 0.04);
    CHECK(ratio < 0.06);
    auto f0 = f;
    f0.sigma_dibl = 0.0;
    double max0 = 0.0;
    for (int k = 1; k < 140; ++k) max0 = std::max(max0, slope(f0, 0.7 * k / 140.0));
    CHECK(slope(f0, 0.6995) / max0 < 0.02);
}

TEST_CASE("parameter validation rejects out-of-range values") {
    auto f = calibrated_n();
    auto bad = f;
    bad.i_sp = -1.0;
    CHECK_THROWS_AS(bad.validate(), sim_error);
    bad = f;
    bad.sigma_dibl = 1.5;
    CHECK_THROWS_AS(bad.validate(), sim_error);
    fet_targets t;
    t.i_off = 1.0;
    CHECK_THROWS_AS(t.validate(), sim_error);
}

} // TEST_SUITE
