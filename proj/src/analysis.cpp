#include "ncsim/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "ncsim/errors.hpp"
#include "ncsim/numerics.hpp"

namespace ncsim {

double extract_ss(const sweep_table& table, double i_lo, double i_hi) {
    require(i_lo > 0.0 && i_hi > i_lo, error_kind::invalid_input,
            "extract_ss: current window must be positive and ordered");
    double best = 0.0;
    bool found = false;
    for (std::size_t k = 1; k < table.rows.size(); ++k) {
        double ia = table.rows[k - 1].i_ds, ib = table.rows[k].i_ds;
        if (ia < i_lo || ia > i_hi || ib < i_lo || ib > i_hi) continue;
        double dlog = std::log10(ib) - std::log10(ia);
        double dv = table.rows[k].v_gs - table.rows[k - 1].v_gs;
        if (dlog == 0.0) continue;
        double slope = dv / dlog;
        if (slope <= 0.0) continue;
        if (!found || slope < best) best = slope;
        found = true;
    }
    require(found, error_kind::window_empty, "extract_ss: no row pair inside current window");
    return best * 1000.0;
}

double extract_vt(const sweep_table& table, double i_crit) {
    require(i_crit > 0.0, error_kind::invalid_input, "extract_vt: criterion current must be positive");
    for (std::size_t k = 1; k < table.rows.size(); ++k) {
        double ia = table.rows[k - 1].i_ds, ib = table.rows[k].i_ds;
        if (ia <= 0.0 || ib <= 0.0) continue;
        if ((ia - i_crit) * (ib - i_crit) > 0.0) continue;
        if (ia == ib) return table.rows[k - 1].v_gs;
        double t = (std::log(i_crit) - std::log(ia)) / (std::log(ib) - std::log(ia));
        return table.rows[k - 1].v_gs + t * (table.rows[k].v_gs - table.rows[k - 1].v_gs);
    }
    fail(error_kind::criterion_not_crossed, "extract_vt: table never crosses criterion current");
}

double extract_dibl(const sweep_table& table_lin, const sweep_table& table_sat, double i_crit) {
    double vt_lin = extract_vt(table_lin, i_crit);
    double vt_sat = extract_vt(table_sat, i_crit);
    if (vt_lin == vt_sat) return 0.0;
    double dv_ds = table_sat.v_ds - table_lin.v_ds;
    require(dv_ds != 0.0, error_kind::invalid_input,
            "extract_dibl: tables share the same drain bias but disagree on v_t");
    return (vt_lin - vt_sat) / dv_ds * 1000.0;
}

namespace {

// Strictly increasing (log i, v_gs) samples from a table, traversal order.
// Rows that do not advance the current (flat or folded segments) are dropped
// so interpolation stays well defined; a branch jump then contributes its
// full voltage gap at the jump current.
struct iso_current_axis {
    std::vector<double> log_i;
    std::vector<double> v;

    explicit iso_current_axis(const sweep_table& t) {
        bool descending = t.direction == sweep_direction::down;
        auto push = [&](const operating_point& op) {
            if (op.i_ds <= 0.0) return;
            double li = std::log10(op.i_ds);
            if (!log_i.empty() && li <= log_i.back()) return;
            log_i.push_back(li);
            v.push_back(op.v_gs);
        };
        if (descending) {
            for (auto it = t.rows.rbegin(); it != t.rows.rend(); ++it) push(*it);
        } else {
            for (const auto& op : t.rows) push(op);
        }
    }

    bool covers(double li) const {
        return log_i.size() >= 2 && li >= log_i.front() && li <= log_i.back();
    }
};

} // namespace

double hysteresis_width(const sweep_table& up, const sweep_table& down, double i_lo, double i_hi) {
    require(i_lo > 0.0 && i_hi > i_lo, error_kind::invalid_input,
            "hysteresis_width: current window must be positive and ordered");
    iso_current_axis a(up), b(down);
    constexpr int per_decade = 50;
    int n = std::max(2, (int)std::lround(per_decade * std::log10(i_hi / i_lo)));
    double width = 0.0;
    bool found = false;
    for (int k = 0; k <= n; ++k) {
        double li = std::log10(i_lo) + (std::log10(i_hi) - std::log10(i_lo)) * k / n;
        if (!a.covers(li) || !b.covers(li)) continue;
        double va = interp_linear(a.log_i, a.v, li);
        double vb = interp_linear(b.log_i, b.v, li);
        width = std::max(width, std::abs(va - vb));
        found = true;
    }
    require(found, error_kind::window_empty,
            "hysteresis_width: sweeps do not cover the current window");
    return width;
}

std::vector<vds_interval> detect_ndr(const output_table& table) {
    std::vector<vds_interval> out;
    const auto& r = table.rows;
    std::size_t k = 1;
    while (k < r.size()) {
        double dv = r[k].v_ds - r[k - 1].v_ds;
        if (dv > 0.0 && r[k].i_ds < r[k - 1].i_ds) {
            std::size_t start = k - 1;
            while (k < r.size() && r[k].v_ds - r[k - 1].v_ds > 0.0 && r[k].i_ds < r[k - 1].i_ds)
                ++k;
            out.push_back({r[start].v_ds, r[k - 1].v_ds});
        } else {
            ++k;
        }
    }
    return out;
}

saturation_result saturation_check(const output_table& table, double v_dd) {
    const auto& r = table.rows;
    require(r.size() >= 3, error_kind::invalid_input, "saturation_check: need at least 3 rows");
    require(r.back().v_ds >= v_dd - 1e-9, error_kind::invalid_input,
            "saturation_check: table does not reach v_dd");
    double max_slope = 0.0, end_slope = 0.0;
    for (std::size_t k = 1; k < r.size(); ++k) {
        double dv = r[k].v_ds - r[k - 1].v_ds;
        require(dv > 0.0, error_kind::invalid_input, "saturation_check: rows must ascend in v_ds");
        double s = (r[k].i_ds - r[k - 1].i_ds) / dv;
        max_slope = std::max(max_slope, s);
        end_slope = s;
    }
    require(max_slope > 0.0, error_kind::invalid_input, "saturation_check: curve never rises");
    saturation_result res;
    res.gds_ratio = end_slope / max_slope;
    // The cut sits between curves that still bend over (drain-coupling
    // feedback and barrier lowering keep the tail slope a few tenths of the
    // peak) and resistor-like curves whose tail slope stays comparable to it.
    res.saturates = res.gds_ratio < 0.5;
    return res;
}

} // namespace ncsim
