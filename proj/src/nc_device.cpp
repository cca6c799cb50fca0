#include "ncsim/nc_device.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ncsim/analysis.hpp"
#include "ncsim/errors.hpp"
#include "ncsim/numerics.hpp"

namespace ncsim {

namespace {

constexpr double g_tol = 1e-9;        // V, charge-balance residual
constexpr double scan_lo = -2.0;      // V, root scan box
constexpr double scan_hi = 2.0;
constexpr int scan_cells = 4000;      // 1 mV cells over the box
constexpr double root_sep = 1e-6;     // V, distinct-root separation
constexpr double dq_fd_step = 1e-6;   // V, gate-charge slope step

double balance_residual(const nc_fet& dev, double v_int, double v_gs, double v_ds) {
    double q = q_gate(dev.fet, v_int, v_ds);
    return v_int + v_fe_static(dev.lk, q) - v_gs;
}

double balance_slope(const nc_fet& dev, double v_int, double v_ds) {
    double q = q_gate(dev.fet, v_int, v_ds);
    double dq = (q_gate(dev.fet, v_int + dq_fd_step, v_ds) -
                 q_gate(dev.fet, v_int - dq_fd_step, v_ds)) /
                (2.0 * dq_fd_step);
    return 1.0 + dv_fe_dq(dev.lk, q) * dq;
}

struct newton_attempt {
    double v_int = 0.0;
    int iterations = 0;
    bool ok = false;
};

// Damped Newton on the charge-balance residual; damping halves down to 1/64
// and the step is rejected if even that fails to shrink |g|. A rejection
// usually means the tracked branch folded away.
newton_attempt newton_balance(const nc_fet& dev, double v_gs, double v_ds, double v0) {
    newton_attempt out;
    double v = v0;
    double g = balance_residual(dev, v, v_gs, v_ds);
    for (int it = 1; it <= 60; ++it) {
        out.iterations = it;
        if (std::abs(g) < g_tol) {
            out.v_int = v;
            out.ok = true;
            return out;
        }
        double dg = balance_slope(dev, v, v_ds);
        if (!std::isfinite(dg) || std::abs(dg) < 1e-12) return out;
        double step = -g / dg;
        double lambda = 1.0;
        bool accepted = false;
        while (lambda >= 1.0 / 64.0) {
            double vn = v + lambda * step;
            double gn = balance_residual(dev, vn, v_gs, v_ds);
            if (std::isfinite(gn) && std::abs(gn) < std::abs(g)) {
                v = vn;
                g = gn;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) return out;
    }
    return out;
}

// Polishes a sign-change cell down to the residual tolerance.
double refine_cell(const nc_fet& dev, double v_gs, double v_ds, double a, double b) {
    auto f = [&](double v) { return balance_residual(dev, v, v_gs, v_ds); };
    auto r = bisect(f, a, b, 1e-12, 200);
    if (std::abs(r.f) >= g_tol) {
        auto n = newton_balance(dev, v_gs, v_ds, r.x);
        require(n.ok, error_kind::non_convergence, "charge balance refinement stalled");
        return n.v_int;
    }
    return r.x;
}

operating_point build_op(const nc_fet& dev, double v_int, double v_gs, double v_ds,
                         int iterations) {
    operating_point op;
    op.v_gs = v_gs;
    op.v_ds = v_ds;
    op.v_int = v_int;
    op.q = q_gate(dev.fet, v_int, v_ds);
    op.p = op.q / dev.lk.geom.a_fe;
    op.v_fe = v_fe_static(dev.lk, op.q);
    op.i_ds = ids(dev.fet, v_int, v_ds);
    op.region = classify_region(dev.lk, op.q);
    op.converged = true;
    op.iterations = iterations;
    return op;
}

void check_bias_box(double v_gs, double v_ds) {
    require(std::abs(v_gs) <= 2.0 && std::abs(v_ds) <= 2.0, error_kind::invalid_input,
            "bias outside the +/-2 V operating box");
}

// First sign change of an ascending scan over [lo, hi]; nullopt when none.
std::optional<double> first_root_ascending(const nc_fet& dev, double v_gs, double v_ds,
                                           double lo, double hi) {
    int cells = (int)std::lround((hi - lo) / ((scan_hi - scan_lo) / scan_cells));
    double prev_v = lo;
    double prev_g = balance_residual(dev, prev_v, v_gs, v_ds);
    for (int k = 1; k <= cells; ++k) {
        double v = lo + (hi - lo) * k / cells;
        double g = balance_residual(dev, v, v_gs, v_ds);
        if (prev_g == 0.0) return prev_v;
        if (std::signbit(g) != std::signbit(prev_g))
            return refine_cell(dev, v_gs, v_ds, prev_v, v);
        prev_v = v;
        prev_g = g;
    }
    return std::nullopt;
}

} // namespace

operating_point solve_static(const nc_fet& dev, double v_gs, double v_ds,
                             std::optional<double> guess) {
    check_bias_box(v_gs, v_ds);
    if (guess) {
        auto n = newton_balance(dev, v_gs, v_ds, *guess);
        if (n.ok) return build_op(dev, n.v_int, v_gs, v_ds, n.iterations);
        // The branch under the guess vanished; land on the nearest surviving
        // root so sweeps jump the way a quasi-static bias ramp would.
        auto roots = find_all_roots(dev, v_gs, v_ds);
        auto best = std::min_element(roots.begin(), roots.end(),
                                     [&](const operating_point& x, const operating_point& y) {
                                         return std::abs(x.v_int - *guess) <
                                                std::abs(y.v_int - *guess);
                                     });
        operating_point op = *best;
        op.iterations += n.iterations;
        return op;
    }
    auto r = first_root_ascending(dev, v_gs, v_ds, -1.0, scan_hi);
    if (!r) r = first_root_ascending(dev, v_gs, v_ds, scan_lo, -1.0);
    require(r.has_value(), error_kind::non_convergence,
            "no charge-balance root inside the scan box");
    return build_op(dev, *r, v_gs, v_ds, 0);
}

std::vector<operating_point> find_all_roots(const nc_fet& dev, double v_gs, double v_ds) {
    check_bias_box(v_gs, v_ds);
    std::vector<double> roots;
    double prev_v = scan_lo;
    double prev_g = balance_residual(dev, prev_v, v_gs, v_ds);
    for (int k = 1; k <= scan_cells; ++k) {
        double v = scan_lo + (scan_hi - scan_lo) * k / scan_cells;
        double g = balance_residual(dev, v, v_gs, v_ds);
        if (prev_g == 0.0) {
            roots.push_back(prev_v);
        } else if (std::signbit(g) != std::signbit(prev_g)) {
            roots.push_back(refine_cell(dev, v_gs, v_ds, prev_v, v));
        }
        prev_v = v;
        prev_g = g;
    }
    require(!roots.empty(), error_kind::non_convergence,
            "charge balance has no root in the scan box; parameters are unphysical");
    std::sort(roots.begin(), roots.end());
    std::vector<operating_point> out;
    for (double v : roots) {
        if (!out.empty() && v - out.back().v_int <= root_sep) continue;
        out.push_back(build_op(dev, v, v_gs, v_ds, 0));
    }
    return out;
}

sweep_table sweep_idvg(const nc_fet& dev, double v_gs_start, double v_gs_stop, double step,
                       double v_ds, sweep_direction direction) {
    require(step > 0.0, error_kind::invalid_input, "sweep step must be positive");
    double lo = std::min(v_gs_start, v_gs_stop);
    double hi = std::max(v_gs_start, v_gs_stop);
    int n = std::max(1, (int)std::lround((hi - lo) / step));
    sweep_table table;
    table.direction = direction;
    table.v_ds = v_ds;
    table.rows.reserve(n + 1);
    std::optional<double> guess;
    for (int k = 0; k <= n; ++k) {
        double t = (double)k / n;
        double v_gs = direction == sweep_direction::up ? lo + (hi - lo) * t : hi - (hi - lo) * t;
        try {
            auto op = solve_static(dev, v_gs, v_ds, guess);
            guess = op.v_int;
            table.rows.push_back(op);
        } catch (const sim_error& e) {
            fail(error_kind::non_convergence,
                 "sweep_idvg failed at v_gs=" + std::to_string(v_gs) + ": " + e.what());
        }
    }
    return table;
}

output_table sweep_idvd(const nc_fet& dev, double v_ds_start, double v_ds_stop, double step,
                        double v_gs) {
    require(step > 0.0, error_kind::invalid_input, "sweep step must be positive");
    require(v_ds_stop >= v_ds_start, error_kind::invalid_input,
            "drain sweep runs ascending");
    int n = std::max(1, (int)std::lround((v_ds_stop - v_ds_start) / step));
    output_table table;
    table.v_gs = v_gs;
    table.rows.reserve(n + 1);
    std::optional<double> guess;
    for (int k = 0; k <= n; ++k) {
        double v_ds = v_ds_start + (v_ds_stop - v_ds_start) * k / n;
        try {
            auto op = solve_static(dev, v_gs, v_ds, guess);
            guess = op.v_int;
            table.rows.push_back(op);
        } catch (const sim_error& e) {
            fail(error_kind::non_convergence,
                 "sweep_idvd failed at v_ds=" + std::to_string(v_ds) + ": " + e.what());
        }
    }
    return table;
}

attractor_result attractor_estimate(const fet_params& fet, const lk_model& lk_base,
                                    const std::vector<double>& a_fe_list, double v_ds) {
    require(a_fe_list.size() >= 2, error_kind::invalid_input,
            "attractor estimate needs at least two areas");
    attractor_result res;

    // Analytic prediction: zero ferroelectric charge means zero drop for any
    // area, so the curves meet where the bare surrogate gate charge is zero.
    auto q0 = [&](double v) { return q_gate(fet, v, v_ds); };
    require(q0(-1.0) < 0.0 && q0(1.5) > 0.0, error_kind::no_crossing,
            "surrogate gate charge has no zero in the search window");
    res.q_zero_v = bisect(q0, -1.0, 1.5, 1e-12, 200).x;

    std::vector<nc_fet> devs;
    for (double a : a_fe_list) {
        nc_fet d{fet, lk_base};
        d.lk.geom.a_fe = a;
        d.validate();
        devs.push_back(d);
    }
    std::vector<std::optional<double>> guesses(devs.size());
    auto current = [&](std::size_t i, double v_gs) {
        auto op = solve_static(devs[i], v_gs, v_ds, guesses[i]);
        guesses[i] = op.v_int;
        require(op.i_ds > 0.0, error_kind::no_crossing,
                "nonpositive current in crossover search");
        return op.i_ds;
    };

    std::vector<double> crossings;
    for (std::size_t i = 0; i + 1 < devs.size(); ++i) {
        auto h = [&](double v) { return std::log(current(i, v)) - std::log(current(i + 1, v)); };
        double lo = res.q_zero_v - 0.15, hi = res.q_zero_v + 0.15;
        double h_lo = h(lo), h_hi = h(hi);
        int widen = 0;
        while (std::signbit(h_lo) == std::signbit(h_hi) && widen < 3) {
            lo -= 0.1;
            hi += 0.1;
            h_lo = h(lo);
            h_hi = h(hi);
            ++widen;
        }
        require(std::signbit(h_lo) != std::signbit(h_hi), error_kind::no_crossing,
                "gate-sweep currents of adjacent areas do not cross");
        crossings.push_back(bisect(h, lo, hi, 1e-8, 200).x);
    }

    double mn = crossings.front(), mx = crossings.front(), sum = 0.0;
    for (double c : crossings) {
        mn = std::min(mn, c);
        mx = std::max(mx, c);
        sum += c;
    }
    res.v_a = sum / crossings.size();
    res.spread = mx - mn;
    return res;
}

double critical_area(const fet_params& fet, const lk_model& lk_base, double search_lo,
                     double search_hi, double v_ds) {
    require(search_lo > 0.0 && search_lo < search_hi, error_kind::invalid_input,
            "critical_area: search interval must be positive and ordered");
    auto hysteretic = [&](double a) {
        nc_fet d{fet, lk_base};
        d.lk.geom.a_fe = a;
        auto up = sweep_idvg(d, -0.2, 0.7, 2e-3, v_ds, sweep_direction::up);
        auto down = sweep_idvg(d, -0.2, 0.7, 2e-3, v_ds, sweep_direction::down);
        return hysteresis_width(up, down, 1e-10, 1e-6) > 1e-3;
    };
    double lo = search_lo, hi = search_hi;
    require(hysteretic(lo) && !hysteretic(hi), error_kind::not_bracketed,
            "critical_area: predicate must flip between the search endpoints");
    while (hi - lo > 0.01 * 0.5 * (hi + lo)) {
        double mid = 0.5 * (lo + hi);
        if (hysteretic(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace ncsim
