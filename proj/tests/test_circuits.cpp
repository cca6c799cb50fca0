#include <doctest.h>

#include <cmath>
#include <cstring>

#include "ncsim/circuits.hpp"
#include "ncsim/errors.hpp"

using namespace ncsim;

namespace {

const fet_params& stock_n() {
    static fet_params f = calibrate_fet(fet_targets{}, default_fet(fet_polarity::n));
    return f;
}

const fet_params& stock_p() {
    static fet_params f = [] {
        fet_targets t;
        t.i_on = 30e-6;
        return calibrate_fet(t, default_fet(fet_polarity::p));
    }();
    return f;
}

lk_model stock_lk(double a_fe_nm2) {
    lk_model m;
    m.coeffs = calibrate_lk(0.17, 1.1e8, 0.0, 5e-3);
    m.geom.t_fe = 5e-9;
    m.geom.a_fe = a_fe_nm2 * 1e-18;
    return m;
}

inverter conv_inverter() {
    inverter inv;
    inv.nfet = {stock_n(), std::nullopt};
    inv.pfet = {stock_p(), std::nullopt};
    inv.v_dd = 0.7;
    return inv;
}

inverter nc_inverter(double a_fe_nm2) {
    inverter inv = conv_inverter();
    inv.nfet.lk = stock_lk(a_fe_nm2);
    inv.pfet.lk = stock_lk(a_fe_nm2);
    return inv;
}

ring_oscillator conv_ro() {
    ring_oscillator ro;
    ro.inv = conv_inverter();
    return ro;
}

bool tables_identical(const vtc_table& a, const vtc_table& b) {
    if (a.rows.size() != b.rows.size()) return false;
    return std::memcmp(a.rows.data(), b.rows.data(),
                       a.rows.size() * sizeof(vtc_point)) == 0;
}

} // namespace

TEST_SUITE("circuits") {

TEST_CASE("static rails droop by less than a millivolt") {
    auto inv = conv_inverter();
    auto up = inverter_vtc(inv, 0.0, inv.v_dd, 5e-3, sweep_direction::up);
    CHECK(up.rows.front().v_in == 0.0);
    CHECK(up.rows.front().v_out > inv.v_dd - 1e-3);
    CHECK(up.rows.back().v_in == doctest::Approx(inv.v_dd));
    CHECK(up.rows.back().v_out < 1e-3);
    for (const auto& row : up.rows) {
        CHECK(row.converged);
        CHECK(row.v_out > -1e-6);
        CHECK(row.v_out < inv.v_dd + 1e-6);
    }
}

TEST_CASE("a mirrored pull-up puts the switching point at half supply") {
    inverter inv;
    inv.nfet = {stock_n(), std::nullopt};
    fet_params p = stock_n();
    p.polarity = fet_polarity::p;
    inv.pfet = {p, std::nullopt};
    inv.v_dd = 0.7;
    auto up = inverter_vtc(inv, 0.0, inv.v_dd, 2e-3, sweep_direction::up);
    auto down = inverter_vtc(inv, 0.0, inv.v_dd, 2e-3, sweep_direction::down);
    auto m = vtc_metrics(up, down, inv.v_dd);
    CHECK(std::abs(m.v_m - 0.35) < 1e-3);
    CHECK(m.vtc_hysteresis < 1e-6);
}

TEST_CASE("transfer sweeps are bitwise repeatable") {
    auto inv = nc_inverter(1000.0);
    auto a = inverter_vtc(inv, 0.0, inv.v_dd, 1e-2, sweep_direction::up);
    auto b = inverter_vtc(inv, 0.0, inv.v_dd, 1e-2, sweep_direction::up);
    CHECK(tables_identical(a, b));
    auto c = inverter_vtc(inv, 0.0, inv.v_dd, 1e-2, sweep_direction::down);
    auto d = inverter_vtc(inv, 0.0, inv.v_dd, 1e-2, sweep_direction::down);
    CHECK(tables_identical(c, d));
}

TEST_CASE("metrics recover a logistic transfer curve") {
    const double v_dd = 0.7, mid = 0.35, w = 0.02;
    vtc_table up, down;
    up.direction = sweep_direction::up;
    down.direction = sweep_direction::down;
    up.v_dd = down.v_dd = v_dd;
    int n = 700;
    for (int k = 0; k <= n; ++k) {
        double v_in = v_dd * k / n;
        double v_out = v_dd / (1.0 + std::exp((v_in - mid) / w));
        up.rows.push_back({v_in, v_out, true});
        down.rows.push_back({v_dd - v_in, v_dd / (1.0 + std::exp((v_dd - v_in - mid) / w)),
                             true});
    }
    auto m = vtc_metrics(up, down, v_dd);
    CHECK(m.gain_max == doctest::Approx(v_dd / (4.0 * w)).epsilon(0.01));
    CHECK(m.v_m == doctest::Approx(mid).epsilon(1e-6));
    CHECK(m.vtc_hysteresis < 1e-12);
    CHECK(m.nm_h > 0.0);
    CHECK(m.nm_l > 0.0);
    CHECK(m.nm_h + m.nm_l < v_dd);
    CHECK(m.nm_h == doctest::Approx(0.259).epsilon(0.05));
    CHECK(m.nm_l == doctest::Approx(0.259).epsilon(0.05));
}

TEST_CASE("ferroelectric gate steepens the transfer curve") {
    auto conv = conv_inverter();
    auto nc = nc_inverter(1500.0); // above the transfer-curve fold bifurcation
    auto conv_up = inverter_vtc(conv, 0.0, 0.7, 2e-3, sweep_direction::up);
    auto conv_dn = inverter_vtc(conv, 0.0, 0.7, 2e-3, sweep_direction::down);
    auto nc_up = inverter_vtc(nc, 0.0, 0.7, 2e-3, sweep_direction::up);
    auto nc_dn = inverter_vtc(nc, 0.0, 0.7, 2e-3, sweep_direction::down);
    auto mc = vtc_metrics(conv_up, conv_dn, 0.7);
    auto mn = vtc_metrics(nc_up, nc_dn, 0.7);
    CHECK(mn.gain_max > 1.3 * mc.gain_max);
    CHECK(mn.vtc_hysteresis < 1e-3);
    CHECK(mc.vtc_hysteresis < 1e-6);
}

TEST_CASE("below the fold bifurcation the transfer curve latches") {
    // Each device on its own is single valued here; the fold lives in the
    // loop formed by the two steep legs.
    auto nc = nc_inverter(1000.0);
    auto up = inverter_vtc(nc, 0.0, 0.7, 2e-3, sweep_direction::up);
    auto dn = inverter_vtc(nc, 0.0, 0.7, 2e-3, sweep_direction::down);
    auto m = vtc_metrics(up, dn, 0.7);
    CHECK(m.vtc_hysteresis > 0.1);
}

TEST_CASE("oscillation metrics on a synthetic square wave") {
    ring_oscillator ro = conv_ro();
    const double T = 1e-9, i0 = 1e-6, v_dd = ro.inv.v_dd;
    transient_trace trace;
    for (int k = 0; k <= 500; ++k) {
        double t = k * 1e-11;
        trace.t.push_back(t);
        double v0 = std::fmod(t, T) < 0.5 * T ? v_dd : 0.0;
        trace.v_nodes.push_back(std::vector<double>(ro.stages, v0));
        trace.q_fe.push_back({});
        trace.i_vdd.push_back(i0);
    }
    auto m = ro_metrics(trace, ro);
    CHECK(m.period == doctest::Approx(T).epsilon(1e-9));
    CHECK(m.delay_per_stage == doctest::Approx(T / (2.0 * ro.stages)).epsilon(1e-9));
    CHECK(m.energy_per_cycle == doctest::Approx(v_dd * i0 * T).epsilon(1e-9));

    transient_trace flat = trace;
    for (auto& v : flat.v_nodes) v.assign(ro.stages, 0.0);
    CHECK_THROWS_AS((void)ro_metrics(flat, ro), sim_error);
}

TEST_CASE("a conventional ring oscillates with a stable period") {
    ring_oscillator ro = conv_ro();
    transient_config cfg;
    cfg.t_stop = 20e-9;
    auto trace = ro_transient(ro, cfg);
    auto m = ro_metrics(trace, ro);
    CHECK(m.period > 1e-10);
    CHECK(m.period < 2e-8);
    CHECK(m.delay_per_stage == doctest::Approx(m.period / 14.0));
    CHECK(m.energy_per_cycle > 0.0);

    // First-order accuracy check: a finer step cap barely moves the period.
    transient_config fine = cfg;
    fine.dt_max = 0.5 * cfg.dt_max;
    auto mf = ro_metrics(ro_transient(ro, fine), ro);
    CHECK(mf.period == doctest::Approx(m.period).epsilon(5e-3));

    // The load capacitance sets the time scale almost linearly.
    ring_oscillator heavy = ro;
    heavy.c_wire = 2.0 * ro.c_wire;
    auto mh = ro_metrics(ro_transient(heavy, cfg), heavy);
    CHECK(mh.period / m.period > 1.7);
    CHECK(mh.period / m.period < 2.3);
}

TEST_CASE("ferroelectric gates trade energy for speed at full supply") {
    transient_config cfg;
    cfg.t_stop = 20e-9;
    ring_oscillator conv = conv_ro();
    ring_oscillator nc = conv_ro();
    nc.inv = nc_inverter(500.0);
    auto mc = ro_metrics(ro_transient(conv, cfg), conv);
    auto mn = ro_metrics(ro_transient(nc, cfg), nc);
    CHECK(mn.delay_per_stage < mc.delay_per_stage);
    CHECK(mn.energy_per_cycle > mc.energy_per_cycle);
}

TEST_CASE("iso-delay comparison interpolates both curves in log space") {
    std::vector<energy_delay_row> conv, nc;
    for (double d : {1e-9, 2e-9, 4e-9}) {
        conv.push_back({0.0, d, 8e-15 * 1e-9 / d});
        nc.push_back({0.0, d, 4e-15 * 1e-9 / d});
    }
    CHECK(iso_delay_reduction(conv, nc, 1.5e-9) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(iso_delay_reduction(conv, nc, 4e-9) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK_THROWS_AS((void)iso_delay_reduction(conv, nc, 0.5e-9), sim_error);
    CHECK_THROWS_AS((void)iso_delay_reduction(conv, nc, 5e-9), sim_error);
    CHECK(iso_delay_reduction(conv, conv, 2e-9) == doctest::Approx(0.0));
}

TEST_CASE("configuration validation rejects unusable setups") {
    ring_oscillator ro = conv_ro();
    ro.stages = 6;
    CHECK_THROWS_AS(ro.validate(), sim_error);
    ro.stages = 1;
    CHECK_THROWS_AS(ro.validate(), sim_error);
    ro = conv_ro();
    ro.c_wire = 0.0;
    CHECK_THROWS_AS(ro.validate(), sim_error);

    transient_config cfg;
    cfg.dt_min = 1e-9;
    CHECK_THROWS_AS(cfg.validate(), sim_error);
    cfg = {};
    cfg.t_stop = -1.0;
    CHECK_THROWS_AS(cfg.validate(), sim_error);

    inverter inv = conv_inverter();
    std::swap(inv.nfet, inv.pfet);
    CHECK_THROWS_AS(inv.validate(), sim_error);

    transient_config ok;
    ring_oscillator good = conv_ro();
    CHECK_NOTHROW(good.validate());
    CHECK_NOTHROW(ok.validate());

    CHECK_THROWS_AS((void)energy_delay_sweep(good, good, {}, ok), sim_error);
    CHECK_THROWS_AS((void)energy_delay_sweep(good, good, {0.1}, ok), sim_error);
}

} // TEST_SUITE
