#include "ncsim/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "ncsim/errors.hpp"
#include "ncsim/numerics.hpp"

namespace ncsim {

void inverter::validate() const {
    require(v_dd > 0.0, error_kind::invalid_input, "inverter: v_dd must be positive");
    require(nfet.fet.polarity == fet_polarity::n && pfet.fet.polarity == fet_polarity::p,
            error_kind::invalid_input, "inverter: legs must be an N pull-down and a P pull-up");
    nfet.fet.validate();
    pfet.fet.validate();
    if (nfet.lk) {
        nfet.lk->coeffs.validate();
        nfet.lk->geom.validate();
    }
    if (pfet.lk) {
        pfet.lk->coeffs.validate();
        pfet.lk->geom.validate();
    }
}

void ring_oscillator::validate() const {
    require(stages >= 3 && stages % 2 == 1, error_kind::invalid_input,
            "ring_oscillator: stage count must be odd and at least 3");
    require(c_wire > 0.0, error_kind::invalid_input, "ring_oscillator: c_wire must be positive");
    inv.validate();
}

void transient_config::validate() const {
    require(t_stop > 0.0, error_kind::invalid_input, "transient: t_stop must be positive");
    require(dt_min > 0.0 && dt_min <= dt_init && dt_init <= dt_max, error_kind::invalid_input,
            "transient: need dt_min <= dt_init <= dt_max");
    require(newton_tol > 0.0 && max_newton >= 3, error_kind::invalid_input,
            "transient: solver settings out of range");
}

namespace {

// Inverts q_gate(v, v_ds) = q_target for v. The charge is strictly increasing
// in v, so a marched bracket plus Illinois false position always lands.
double invert_gate_charge(const fet_params& f, double q_target, double v_ds, double v_warm) {
    auto g = [&](double v) { return q_gate(f, v, v_ds) - q_target; };
    double tol_q = 1e-27 + 1e-12 * std::abs(q_target);
    double a = std::clamp(v_warm, -4.0, 4.0);
    double fa = g(a);
    if (std::abs(fa) < tol_q) return a;
    double step = fa < 0.0 ? 0.05 : -0.05;
    double b = a, fb = fa;
    bool bracketed = false;
    for (int k = 0; k < 60 && !bracketed; ++k) {
        a = b;
        fa = fb;
        b = std::clamp(b + step, -4.0, 4.0);
        step *= 1.6;
        fb = g(b);
        bracketed = fb == 0.0 || std::signbit(fa) != std::signbit(fb);
        if (!bracketed && (b == -4.0 || b == 4.0))
            fail(error_kind::non_convergence,
                 "gate-charge inversion: target outside the voltage window");
    }
    if (fb == 0.0) return b;
    if (a > b) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    int side = 0;
    for (int k = 0; k < 200; ++k) {
        double mid = fb != fa ? (a * fb - b * fa) / (fb - fa) : 0.5 * (a + b);
        if (!(mid > a && mid < b)) mid = 0.5 * (a + b);
        double fm = g(mid);
        if (std::abs(fm) < tol_q || b - a < 1e-12) return mid;
        if (std::signbit(fm) == std::signbit(fa)) {
            a = mid;
            fa = fm;
            if (side == -1) fb *= 0.5;
            side = -1;
        } else {
            b = mid;
            fb = fm;
            if (side == 1) fa *= 0.5;
            side = 1;
        }
    }
    return 0.5 * (a + b);
}

// A leg evaluated in its own frame: node voltages minus the rail reference
// (0 for N, v_dd for P). NC legs carry committed continuation state.
struct leg_solver {
    const device_leg* leg = nullptr;
    double v_ref = 0.0;
    std::optional<double> v_int_guess;

    double current(double v_g_node, double v_d_node) const {
        double v_gs = v_g_node - v_ref, v_ds = v_d_node - v_ref;
        if (!leg->is_nc()) return ids(leg->fet, v_gs, v_ds);
        return solve_static({leg->fet, *leg->lk}, v_gs, v_ds, v_int_guess).i_ds;
    }

    void commit(double v_g_node, double v_d_node) {
        if (!leg->is_nc()) return;
        double v_gs = v_g_node - v_ref, v_ds = v_d_node - v_ref;
        v_int_guess = solve_static({leg->fet, *leg->lk}, v_gs, v_ds, v_int_guess).v_int;
    }
};

constexpr double kcl_tol = 1e-12; // A

// Output-node KCL root nearest the guess. Newton with halving damping first;
// if the transfer point sits on a fold, a grid scan picks the survivor.
double solve_output_node(leg_solver& n, leg_solver& p, double v_in, double v_dd, double guess) {
    auto f = [&](double vo) { return n.current(v_in, vo) + p.current(v_in, vo); };
    const double win_lo = -0.05, win_hi = v_dd + 0.05;
    double v = std::clamp(guess, win_lo, win_hi);
    double fv = f(v);
    for (int it = 0; it < 60; ++it) {
        if (std::abs(fv) < kcl_tol) return v;
        double h = 1e-6;
        double df = (f(v + h) - f(v - h)) / (2.0 * h);
        if (!std::isfinite(df) || df == 0.0) break;
        double step = -fv / df;
        double lambda = 1.0;
        bool accepted = false;
        while (lambda >= 1.0 / 64.0) {
            double vn = std::clamp(v + lambda * step, win_lo, win_hi);
            if (vn == v) break;
            double fn = f(vn);
            if (std::isfinite(fn) && std::abs(fn) < std::abs(fv)) {
                v = vn;
                fv = fn;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) break;
    }
    // Scan for every sign change and keep the root nearest the guess.
    double lo = -0.05, hi = v_dd + 0.05;
    int cells = 1 + (int)std::lround((hi - lo) / 1e-3);
    double best = 0.0, best_dist = 1e300;
    double prev_v = lo, prev_f = f(lo);
    for (int k = 1; k <= cells; ++k) {
        double vk = lo + (hi - lo) * k / cells;
        double fk = f(vk);
        if (std::signbit(fk) != std::signbit(prev_f)) {
            double a = prev_v, b = vk, fa = prev_f;
            for (int it = 0; it < 60; ++it) {
                double mid = 0.5 * (a + b);
                double fm = f(mid);
                if (std::signbit(fm) == std::signbit(fa)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            double root = 0.5 * (a + b);
            if (std::abs(f(root)) < 1e-9 && std::abs(root - guess) < best_dist) {
                best = root;
                best_dist = std::abs(root - guess);
            }
        }
        prev_v = vk;
        prev_f = fk;
    }
    require(best_dist < 1e300, error_kind::non_convergence,
            "output node has no KCL root in the supply window");
    return best;
}

} // namespace

vtc_table inverter_vtc(const inverter& inv, double v_in_start, double v_in_stop, double step,
                       sweep_direction direction) {
    inv.validate();
    require(step > 0.0, error_kind::invalid_input, "inverter_vtc: step must be positive");
    double lo = std::min(v_in_start, v_in_stop), hi = std::max(v_in_start, v_in_stop);
    int n = std::max(1, (int)std::lround((hi - lo) / step));
    vtc_table table;
    table.direction = direction;
    table.v_dd = inv.v_dd;
    table.rows.reserve(n + 1);
    leg_solver nleg{&inv.nfet, 0.0, std::nullopt};
    leg_solver pleg{&inv.pfet, inv.v_dd, std::nullopt};
    double guess = direction == sweep_direction::up ? inv.v_dd : 0.0;
    for (int k = 0; k <= n; ++k) {
        double t = (double)k / n;
        double v_in = direction == sweep_direction::up ? lo + (hi - lo) * t : hi - (hi - lo) * t;
        try {
            double v_out = solve_output_node(nleg, pleg, v_in, inv.v_dd, guess);
            nleg.commit(v_in, v_out);
            pleg.commit(v_in, v_out);
            guess = v_out;
            table.rows.push_back({v_in, v_out, true});
        } catch (const sim_error& e) {
            fail(error_kind::non_convergence,
                 "inverter_vtc failed at v_in=" + std::to_string(v_in) + ": " + e.what());
        }
    }
    return table;
}

vtc_metrics_result vtc_metrics(const vtc_table& up, const vtc_table& down, double v_dd) {
    const auto& r = up.rows;
    require(r.size() >= 5, error_kind::invalid_input, "vtc_metrics: table too short");
    require(r.front().v_in < 1e-9 && r.back().v_in > v_dd - 1e-9, error_kind::invalid_input,
            "vtc_metrics: up table must cover [0, v_dd]");
    vtc_metrics_result out;

    for (std::size_t k = 1; k + 1 < r.size(); ++k) {
        double g = std::abs((r[k + 1].v_out - r[k - 1].v_out) / (r[k + 1].v_in - r[k - 1].v_in));
        out.gain_max = std::max(out.gain_max, g);
    }

    bool have_vm = false;
    for (std::size_t k = 1; k < r.size(); ++k) {
        double fa = r[k - 1].v_out - r[k - 1].v_in, fb = r[k].v_out - r[k].v_in;
        if (fa == 0.0) {
            out.v_m = r[k - 1].v_in;
            have_vm = true;
            break;
        }
        if (std::signbit(fa) != std::signbit(fb)) {
            double t = fa / (fa - fb);
            out.v_m = r[k - 1].v_in + t * (r[k].v_in - r[k - 1].v_in);
            have_vm = true;
            break;
        }
    }
    require(have_vm, error_kind::degenerate_vtc, "vtc_metrics: output never meets the input");

    // Unity-gain points from midpoint slopes of adjacent rows.
    std::vector<double> xs, mags;
    for (std::size_t k = 1; k < r.size(); ++k) {
        xs.push_back(0.5 * (r[k - 1].v_in + r[k].v_in));
        mags.push_back(std::abs((r[k].v_out - r[k - 1].v_out) / (r[k].v_in - r[k - 1].v_in)));
    }
    std::vector<double> crossings;
    for (std::size_t k = 1; k < xs.size(); ++k) {
        double fa = mags[k - 1] - 1.0, fb = mags[k] - 1.0;
        if (std::signbit(fa) != std::signbit(fb) || fb == 0.0) {
            double t = fa == fb ? 0.0 : fa / (fa - fb);
            crossings.push_back(xs[k - 1] + t * (xs[k] - xs[k - 1]));
        }
    }
    require(crossings.size() >= 2, error_kind::degenerate_vtc,
            "vtc_metrics: no unity-gain pair");
    double v_il = crossings.front(), v_ih = crossings.back();
    auto v_out_at = [&](double v_in) {
        for (std::size_t k = 1; k < r.size(); ++k) {
            if ((r[k - 1].v_in - v_in) * (r[k].v_in - v_in) <= 0.0) {
                double t = (v_in - r[k - 1].v_in) / (r[k].v_in - r[k - 1].v_in);
                return r[k - 1].v_out + t * (r[k].v_out - r[k - 1].v_out);
            }
        }
        return r.back().v_out;
    };
    out.nm_h = v_out_at(v_il) - v_ih;
    out.nm_l = v_il - v_out_at(v_ih);

    require(down.rows.size() == r.size(), error_kind::invalid_input,
            "vtc_metrics: up and down tables must share a grid");
    for (std::size_t k = 0; k < r.size(); ++k) {
        const auto& d = down.rows[down.rows.size() - 1 - k];
        require(std::abs(d.v_in - r[k].v_in) < 1e-9, error_kind::invalid_input,
                "vtc_metrics: up and down tables must share a grid");
        out.vtc_hysteresis = std::max(out.vtc_hysteresis, std::abs(r[k].v_out - d.v_out));
    }
    return out;
}

namespace {

struct ro_leg {
    const device_leg* leg = nullptr;
    double v_ref = 0.0; // 0 for N, v_dd for P
    int q_idx = -1;     // index into the charge state, -1 for conventional
    bool is_p = false;
};

// Everything a residual evaluation needs besides the trial state. Time
// derivatives use the two-step stencil d(x) = c0*x + c1*x_prev + c2*x_prev2
// with c0 + c1 + c2 = 0: backward Euler while only one history point exists,
// variable-step BDF2 afterwards.
struct ro_system {
    const ring_oscillator* ro = nullptr;
    std::vector<ro_leg> legs; // stage-major, N before P
    int n_nodes = 0;
    int n_q = 0;
    std::vector<double> v_prev, v_prev2;
    std::vector<double> q_prev, q_prev2;
    std::vector<double> warm; // per-leg v_int warm starts (NC legs only)
    double c0 = 0.0, c1 = 0.0, c2 = 0.0; // 1/s

    void set_euler(double dt) {
        c0 = 1.0 / dt;
        c1 = -1.0 / dt;
        c2 = 0.0;
    }
    // ratio = dt / dt_prev; zero-stable for ratio < 1 + sqrt(2).
    void set_bdf2(double dt, double ratio) {
        c0 = (1.0 + 2.0 * ratio) / ((1.0 + ratio) * dt);
        c2 = ratio * ratio / ((1.0 + ratio) * dt);
        c1 = -c0 - c2;
    }
};

// Residual of one implicit step; optionally reports the supply current of the
// trial state. Residual layout: node equations then charge equations, all in
// amperes.
void eval_residual(ro_system& S, const std::vector<double>& v, const std::vector<double>& q,
                   std::vector<double>& r, double* i_vdd_out = nullptr) {
    int ns = S.n_nodes;
    std::vector<double> dev_in(ns, 0.0);  // net transistor current into each node
    std::vector<double> gate_in(ns, 0.0); // gate current drawn by each stage
    double i_rail = 0.0;
    for (int s = 0; s < ns; ++s) {
        int in_node = (s + ns - 1) % ns;
        double vin = v[in_node], vout = v[s];
        for (int half = 0; half < 2; ++half) {
            ro_leg& L = S.legs[2 * s + half];
            double vg = vin - L.v_ref, vd = vout - L.v_ref;
            double i_ch, dq_gate;
            if (L.q_idx >= 0) {
                double qq = q[L.q_idx];
                double vi = invert_gate_charge(L.leg->fet, qq, vd, S.warm[2 * s + half]);
                S.warm[2 * s + half] = vi;
                i_ch = ids(L.leg->fet, vi, vd);
                const lk_model& lk = *L.leg->lk;
                double drive = vg - vi - v_fe_static(lk, qq);
                double qdot = lk.geom.a_fe / (lk.coeffs.rho * lk.geom.t_fe) * drive;
                dq_gate = S.c0 * qq + S.c1 * S.q_prev[L.q_idx] + S.c2 * S.q_prev2[L.q_idx];
                r[S.n_nodes + L.q_idx] = dq_gate - qdot;
            } else {
                i_ch = ids(L.leg->fet, vg, vd);
                auto qg_at = [&](const std::vector<double>& vv) {
                    return q_gate(L.leg->fet, vv[in_node] - L.v_ref, vv[s] - L.v_ref);
                };
                dq_gate = S.c0 * q_gate(L.leg->fet, vg, vd) + S.c1 * qg_at(S.v_prev) +
                          S.c2 * qg_at(S.v_prev2);
            }
            gate_in[s] += dq_gate;
            dev_in[s] -= i_ch; // both legs: positive ids flows out of the output node
            if (L.is_p) i_rail += -i_ch - dq_gate;
        }
    }
    for (int s = 0; s < ns; ++s) {
        r[s] = S.ro->c_wire * (S.c0 * v[s] + S.c1 * S.v_prev[s] + S.c2 * S.v_prev2[s]) -
               (dev_in[s] - gate_in[(s + 1) % ns]);
    }
    if (i_vdd_out) *i_vdd_out = i_rail;
}

} // namespace

transient_trace ro_transient(const ring_oscillator& ro, const transient_config& cfg) {
    ro.validate();
    cfg.validate();
    ro_system S;
    S.ro = &ro;
    S.n_nodes = ro.stages;
    for (int s = 0; s < ro.stages; ++s) {
        ro_leg n{&ro.inv.nfet, 0.0, ro.inv.nfet.is_nc() ? S.n_q : -1, false};
        if (ro.inv.nfet.is_nc()) ++S.n_q;
        ro_leg p{&ro.inv.pfet, ro.inv.v_dd, ro.inv.pfet.is_nc() ? S.n_q : -1, true};
        if (ro.inv.pfet.is_nc()) ++S.n_q;
        S.legs.push_back(n);
        S.legs.push_back(p);
    }
    S.warm.assign(S.legs.size(), 0.0);

    // Alternating rail-adjacent node voltages; the odd ring count leaves one
    // frustrated stage that seeds the oscillation deterministically.
    S.v_prev.resize(S.n_nodes);
    for (int k = 0; k < S.n_nodes; ++k)
        S.v_prev[k] = (k % 2 == 0 ? 0.9 : 0.1) * ro.inv.v_dd;
    S.q_prev.assign(S.n_q, 0.0);
    S.v_prev2 = S.v_prev;
    for (int s = 0; s < ro.stages; ++s) {
        int in_node = (s + ro.stages - 1) % ro.stages;
        for (int half = 0; half < 2; ++half) {
            ro_leg& L = S.legs[2 * s + half];
            double vg = S.v_prev[in_node] - L.v_ref, vd = S.v_prev[s] - L.v_ref;
            if (L.q_idx >= 0) {
                auto op = solve_static({L.leg->fet, *L.leg->lk}, vg, vd);
                S.q_prev[L.q_idx] = op.q;
                S.warm[2 * s + half] = op.v_int;
            }
        }
    }

    int n = S.n_nodes + S.n_q;
    const double q_scale = 1e-16;
    transient_trace trace;
    auto push_row = [&](double t, double i_vdd) {
        trace.t.push_back(t);
        trace.v_nodes.push_back(S.v_prev);
        trace.q_fe.push_back(S.q_prev);
        trace.i_vdd.push_back(i_vdd);
    };
    {
        std::vector<double> r0(n);
        double i0 = 0.0;
        S.q_prev2 = S.q_prev;
        S.set_euler(1.0);
        eval_residual(S, S.v_prev, S.q_prev, r0, &i0);
        push_row(0.0, i0);
    }

    double t = 0.0, dt = cfg.dt_init, dt_prev = 0.0;
    std::vector<double> v_try(S.n_nodes), q_try(S.n_q), r(n);
    Eigen::MatrixXd J(n, n);
    Eigen::VectorXd rhs(n), dx(n);
    while (t < cfg.t_stop) {
        bool accepted = false;
        std::vector<double> warm_saved = S.warm;
        while (!accepted) {
            if (dt_prev == 0.0)
                S.set_euler(dt);
            else
                S.set_bdf2(dt, dt / dt_prev);
            v_try = S.v_prev;
            q_try = S.q_prev;
            S.warm = warm_saved;
            int iters = 0;
            bool ok = false;
            try {
                eval_residual(S, v_try, q_try, r);
                Eigen::PartialPivLU<Eigen::MatrixXd> lu;
                bool have_lu = false;
                for (iters = 1; iters <= cfg.max_newton; ++iters) {
                    double rmax = 0.0;
                    for (double x : r) rmax = std::max(rmax, std::abs(x));
                    if (rmax < cfg.newton_tol) {
                        ok = true;
                        break;
                    }
                    if (!have_lu || iters % 5 == 0) {
                        std::vector<double> rp(n);
                        for (int j = 0; j < n; ++j) {
                            double h = j < S.n_nodes ? 1e-7
                                                     : 1e-6 * std::abs(q_try[j - S.n_nodes]) +
                                                           1e-19;
                            double* slot = j < S.n_nodes ? &v_try[j] : &q_try[j - S.n_nodes];
                            double saved = *slot;
                            *slot = saved + h;
                            eval_residual(S, v_try, q_try, rp);
                            *slot = saved;
                            double col_scale = j < S.n_nodes ? 1.0 : q_scale;
                            for (int i = 0; i < n; ++i)
                                J(i, j) = (rp[i] - r[i]) / h * col_scale;
                        }
                        lu.compute(J);
                        have_lu = true;
                    }
                    for (int i = 0; i < n; ++i) rhs(i) = -r[i];
                    dx = lu.solve(rhs);
                    require(dx.allFinite(), error_kind::non_convergence,
                            "transient Newton produced a non-finite step");
                    for (int j = 0; j < S.n_nodes; ++j) v_try[j] += dx(j);
                    for (int j = 0; j < S.n_q; ++j) q_try[j] += dx(S.n_nodes + j) * q_scale;
                    eval_residual(S, v_try, q_try, r);
                }
            } catch (const sim_error&) {
                ok = false;
            }
            if (ok) {
                double i_vdd = 0.0;
                eval_residual(S, v_try, q_try, r, &i_vdd);
                S.v_prev2 = S.v_prev;
                S.q_prev2 = S.q_prev;
                S.v_prev = v_try;
                S.q_prev = q_try;
                t += dt;
                dt_prev = dt;
                push_row(t, i_vdd);
                accepted = true;
                if (iters <= 8) dt = std::min(dt * 1.3, cfg.dt_max);
            } else {
                dt *= 0.5;
                require(dt >= cfg.dt_min, error_kind::non_convergence,
                        "transient step control hit dt_min at t=" + std::to_string(t));
            }
        }
    }

    double half = 0.5 * ro.inv.v_dd;
    bool crossed = false;
    for (std::size_t k = 1; k < trace.t.size() && !crossed; ++k)
        crossed = (trace.v_nodes[k - 1][0] - half) * (trace.v_nodes[k][0] - half) < 0.0;
    require(crossed, error_kind::no_oscillation,
            "ring output never crossed half supply within t_stop");
    return trace;
}

ro_metrics_result ro_metrics(const transient_trace& trace, const ring_oscillator& ro) {
    require(trace.t.size() >= 4, error_kind::no_oscillation, "trace too short");
    double half = 0.5 * ro.inv.v_dd;
    double t_settle = 0.3 * trace.t.back();
    std::vector<double> crossings;
    for (std::size_t k = 1; k < trace.t.size(); ++k) {
        double a = trace.v_nodes[k - 1][0], b = trace.v_nodes[k][0];
        if (trace.t[k] < t_settle) continue;
        if (a < half && b >= half) {
            double u = (half - a) / (b - a);
            crossings.push_back(trace.t[k - 1] + u * (trace.t[k] - trace.t[k - 1]));
        }
    }
    require(crossings.size() >= 2, error_kind::no_oscillation,
            "fewer than two settled rising crossings");
    ro_metrics_result out;
    out.period = (crossings.back() - crossings.front()) / (double)(crossings.size() - 1);
    out.delay_per_stage = out.period / (2.0 * ro.stages);

    int cycles = (int)std::floor((trace.t.back() - crossings.front()) / out.period);
    require(cycles >= 1, error_kind::no_oscillation, "no full settled period in trace");
    double t0 = crossings.front(), t1 = t0 + cycles * out.period;
    auto i_at = [&](double tq) {
        return interp_linear(trace.t, trace.i_vdd, tq);
    };
    double energy = 0.0;
    double prev_t = t0, prev_i = i_at(t0);
    for (std::size_t k = 0; k < trace.t.size(); ++k) {
        if (trace.t[k] <= t0 || trace.t[k] >= t1) continue;
        energy += 0.5 * (prev_i + trace.i_vdd[k]) * (trace.t[k] - prev_t);
        prev_t = trace.t[k];
        prev_i = trace.i_vdd[k];
    }
    energy += 0.5 * (prev_i + i_at(t1)) * (t1 - prev_t);
    out.energy_per_cycle = ro.inv.v_dd * energy / cycles;
    return out;
}

std::pair<std::vector<energy_delay_row>, std::vector<energy_delay_row>> energy_delay_sweep(
    const ring_oscillator& conv, const ring_oscillator& nc, const std::vector<double>& v_dd_list,
    const transient_config& cfg) {
    require(!v_dd_list.empty(), error_kind::invalid_input, "energy_delay_sweep: empty v_dd list");
    for (double v : v_dd_list)
        require(v > 0.2, error_kind::invalid_input,
                "energy_delay_sweep: supplies below 0.2 V are outside the model's validity");
    std::vector<double> supplies = v_dd_list;
    std::sort(supplies.begin(), supplies.end());
    std::pair<std::vector<energy_delay_row>, std::vector<energy_delay_row>> out;
    for (double v : supplies) {
        for (int variant = 0; variant < 2; ++variant) {
            ring_oscillator ro = variant == 0 ? conv : nc;
            ro.inv.v_dd = v;
            try {
                auto trace = ro_transient(ro, cfg);
                auto m = ro_metrics(trace, ro);
                auto& rows = variant == 0 ? out.first : out.second;
                rows.push_back({v, m.delay_per_stage, m.energy_per_cycle});
            } catch (const sim_error& e) {
                fail(e.kind(), "energy_delay_sweep at v_dd=" + std::to_string(v) + ": " +
                                   e.what());
            }
        }
    }
    return out;
}

double iso_delay_reduction(const std::vector<energy_delay_row>& conv,
                           const std::vector<energy_delay_row>& nc, double target_delay) {
    auto energy_at = [&](const std::vector<energy_delay_row>& rows) {
        require(rows.size() >= 2, error_kind::invalid_input,
                "iso_delay_reduction: need at least two rows per curve");
        std::vector<double> ld, le;
        std::vector<energy_delay_row> sorted = rows;
        std::sort(sorted.begin(), sorted.end(),
                  [](const energy_delay_row& a, const energy_delay_row& b) {
                      return a.delay_per_stage < b.delay_per_stage;
                  });
        for (const auto& row : sorted) {
            require(row.delay_per_stage > 0.0 && row.energy_per_cycle > 0.0,
                    error_kind::invalid_input, "iso_delay_reduction: nonpositive row");
            ld.push_back(std::log(row.delay_per_stage));
            le.push_back(std::log(row.energy_per_cycle));
        }
        double lt = std::log(target_delay);
        require(lt >= ld.front() && lt <= ld.back(), error_kind::out_of_range,
                "iso_delay_reduction: target delay outside a curve's range");
        return std::exp(interp_linear(ld, le, lt));
    };
    return 1.0 - energy_at(nc) / energy_at(conv);
}

} // namespace ncsim
