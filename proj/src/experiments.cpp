#include "ncsim/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <thread>

#include "ncsim/analysis.hpp"
#include "ncsim/csv.hpp"
#include "ncsim/errors.hpp"
#include "ncsim/numerics.hpp"

namespace ncsim {

namespace {

namespace fs = std::filesystem;

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void write_text(const std::string& path, const std::string& body) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        require(f.good(), error_kind::io, "cannot open " + tmp + " for writing");
        f.write(body.data(), (std::streamsize)body.size());
        require(f.good(), error_kind::io, "short write to " + tmp);
    }
    require(std::rename(tmp.c_str(), path.c_str()) == 0, error_kind::io,
            "cannot move " + tmp + " into place");
}

// Collects outputs and renders the manifest once everything is on disk.
struct emitter {
    const experiment_config* cfg;
    experiment_kind kind;
    fs::path dir;
    experiment_result result;
    std::vector<std::pair<std::string, long long>> listed;
    std::vector<std::string> scalars; // "key=value" manifest result lines

    emitter(const experiment_config& c, experiment_kind k) : cfg(&c), kind(k), dir(c.out_dir) {
        std::error_code ec;
        fs::create_directories(dir, ec);
        require(!ec, error_kind::io, "cannot create output dir " + dir.string());
    }

    void csv(const std::string& name, const csv_table& t) {
        write_csv(t, (dir / name).string(), cfg->precision);
        result.files.push_back(name);
        listed.push_back({name, (long long)t.rows.size()});
    }

    void finish() {
        write_text((dir / "config_echo.cfg").string(), echo_config(*cfg));
        result.files.push_back("config_echo.cfg");
        std::string m = std::string("experiment=") + to_cli_name(kind) + "\n";
        for (const auto& [name, rows] : listed)
            m += "file=" + name + " rows=" + std::to_string(rows) + "\n";
        for (const auto& line : scalars) m += "result " + line + "\n";
        m += "config=config_echo.cfg\n";
        write_text((dir / "manifest.txt").string(), m);
        result.files.push_back("manifest.txt");
    }
};

const std::vector<std::string> sweep_header = {
    "v_gs_V", "v_ds_V", "i_ds_A",      "v_int_V", "v_fe_V", "q_C",
    "p_C_per_m2", "quadrant", "mode", "branch",  "iterations"};

void add_point_row(csv_table& t, const operating_point& op, bool ferro) {
    t.add_row({op.v_gs, op.v_ds, op.i_ds, op.v_int, op.v_fe, op.q, op.p,
               ferro ? to_string(op.region.quad) : std::string("none"),
               ferro ? to_string(op.region.mode) : std::string("none"),
               ferro ? to_string(op.region.branch) : std::string("none"),
               (long long)op.iterations});
}

csv_table sweep_csv(const std::vector<operating_point>& rows, bool ferro) {
    csv_table t;
    t.header = sweep_header;
    for (const auto& op : rows) add_point_row(t, op, ferro);
    return t;
}

// Bare-surrogate analogue of a gate sweep, same table shape as the coupled
// device so the extraction helpers apply unchanged.
sweep_table conventional_idvg(const fet_params& f, double lo, double hi, double step,
                              double v_ds, sweep_direction dir) {
    sweep_table out;
    out.direction = dir;
    out.v_ds = v_ds;
    int n = std::max(1, (int)std::lround((hi - lo) / step));
    for (int k = 0; k <= n; ++k) {
        double t = (double)k / n;
        double v_gs = dir == sweep_direction::up ? lo + (hi - lo) * t : hi - (hi - lo) * t;
        auto bp = solve_bias(f, v_gs, v_ds);
        operating_point op;
        op.v_gs = v_gs;
        op.v_ds = v_ds;
        op.v_int = v_gs;
        op.q = bp.q_g;
        op.i_ds = bp.i_ds;
        op.converged = true;
        op.iterations = bp.iterations;
        out.rows.push_back(op);
    }
    return out;
}

output_table conventional_idvd(const fet_params& f, double lo, double hi, double step,
                               double v_gs) {
    output_table out;
    out.v_gs = v_gs;
    int n = std::max(1, (int)std::lround((hi - lo) / step));
    for (int k = 0; k <= n; ++k) {
        double v_ds = lo + (hi - lo) * k / n;
        auto bp = solve_bias(f, v_gs, v_ds);
        operating_point op;
        op.v_gs = v_gs;
        op.v_ds = v_ds;
        op.v_int = v_gs;
        op.q = bp.q_g;
        op.i_ds = bp.i_ds;
        op.converged = true;
        op.iterations = bp.iterations;
        out.rows.push_back(op);
    }
    return out;
}

// Current at a gate voltage inside an ascending sweep, log interpolated.
double current_at(const sweep_table& table, double v_gs) {
    const auto& r = table.rows;
    for (std::size_t k = 1; k < r.size(); ++k) {
        if ((r[k - 1].v_gs - v_gs) * (r[k].v_gs - v_gs) <= 0.0) {
            double ia = std::abs(r[k - 1].i_ds), ib = std::abs(r[k].i_ds);
            double t = (v_gs - r[k - 1].v_gs) / (r[k].v_gs - r[k - 1].v_gs);
            if (ia > 0.0 && ib > 0.0)
                return std::exp(std::log(ia) + t * (std::log(ib) - std::log(ia)));
            return ia + t * (ib - ia);
        }
    }
    fail(error_kind::out_of_range,
         "gate voltage " + fmt_g(v_gs) + " outside the swept range");
}

// Standard scalar set from a family of gate sweeps. The runner returns the
// table for a requested (drain bias, direction) pair.
device_metrics measure_device(
    const std::function<sweep_table(double, sweep_direction)>& run,
    const experiment_config& cfg, double i_crit) {
    double v_lo = cfg.v_ds_list.front(), v_hi = cfg.v_ds_list.front();
    for (double v : cfg.v_ds_list) {
        v_lo = std::min(v_lo, v);
        v_hi = std::max(v_hi, v);
    }
    bool has_up = false, has_down = false;
    for (auto d : cfg.directions) (d == sweep_direction::up ? has_up : has_down) = true;
    sweep_direction primary = has_up ? sweep_direction::up : cfg.directions.front();
    sweep_table sat = run(v_hi, primary);
    device_metrics m;
    m.ss_min = extract_ss(sat, 1e-11, 1e-7);
    m.v_t = extract_vt(sat, i_crit);
    m.i_on = std::abs(sat.rows.empty() ? 0.0
                                       : (primary == sweep_direction::up
                                              ? sat.rows.back().i_ds
                                              : sat.rows.front().i_ds));
    m.i_off = current_at(sat, 0.0);
    m.dibl = v_lo < v_hi ? extract_dibl(run(v_lo, primary), sat, i_crit) : 0.0;
    m.hysteresis = has_up && has_down
                       ? hysteresis_width(sat, run(v_hi, sweep_direction::down), 1e-10, 1e-6)
                       : 0.0;
    return m;
}

csv_table metrics_csv(const device_metrics& m) {
    csv_table t;
    t.header = {"ss_mV_dec", "v_t_V", "dibl_mV_V", "hysteresis_V", "i_on_A", "i_off_A"};
    t.add_row({m.ss_min, m.v_t, m.dibl, m.hysteresis, m.i_on, m.i_off});
    return t;
}

void run_s_curve(const experiment_config& cfg, emitter& em) {
    lk_model m = cfg.make_lk(cfg.a_fe_nm2.front());
    double p_r = cfg.p_r_uC_cm2 * 1e-2;
    auto rows = s_curve_table(m, -1.5 * p_r, 1.5 * p_r, 601);
    csv_table t;
    t.header = {"p_C_per_m2", "q_C", "e_V_per_m", "v_fe_V", "c_fe_F",
                "quadrant",   "mode", "branch"};
    for (const auto& r : rows)
        t.add_row({r.p, r.q, r.e, r.v_fe, r.c_fe, to_string(r.region.quad),
                   to_string(r.region.mode), to_string(r.region.branch)});
    em.csv("s_curve.csv", t);
}

void run_idvg(const experiment_config& cfg, emitter& em) {
    fet_params fet = cfg.make_fet(fet_polarity::n);
    struct task {
        double area, v_ds;
        sweep_direction dir;
    };
    std::vector<task> tasks;
    for (double a : cfg.a_fe_nm2)
        for (double v : cfg.v_ds_list)
            for (auto d : cfg.directions) tasks.push_back({a, v, d});
    std::vector<sweep_table> tables(tasks.size());
    parallel_for((int)tasks.size(), [&](int i) {
        nc_fet dev{fet, cfg.make_lk(tasks[i].area)};
        tables[i] = sweep_idvg(dev, cfg.v_gs_start, cfg.v_gs_stop, cfg.step, tasks[i].v_ds,
                               tasks[i].dir);
    });
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        std::string name = "idvg_a" + fmt_g(tasks[i].area) + "_vds" + fmt_g(tasks[i].v_ds) +
                           (tasks[i].dir == sweep_direction::up ? "_up" : "_down") + ".csv";
        em.csv(name, sweep_csv(tables[i].rows, true));
    }
    auto lookup = [&](double area) {
        return [&, area](double v_ds, sweep_direction dir) -> sweep_table {
            for (std::size_t i = 0; i < tasks.size(); ++i)
                if (tasks[i].area == area && tasks[i].v_ds == v_ds && tasks[i].dir == dir)
                    return tables[i];
            nc_fet dev{fet, cfg.make_lk(area)};
            return sweep_idvg(dev, cfg.v_gs_start, cfg.v_gs_stop, cfg.step, v_ds, dir);
        };
    };
    double i_crit = vt_criterion_current(fet.geom);
    csv_table summary;
    summary.header = {"a_fe_nm2",     "ss_mV_dec", "v_t_V",  "dibl_mV_V",
                      "hysteresis_V", "i_on_A",    "i_off_A"};
    for (double a : cfg.a_fe_nm2) {
        device_metrics m = measure_device(lookup(a), cfg, i_crit);
        summary.add_row({a, m.ss_min, m.v_t, m.dibl, m.hysteresis, m.i_on, m.i_off});
    }
    em.csv("idvg_metrics.csv", summary);
}

void run_idvd(const experiment_config& cfg, emitter& em) {
    fet_params fet = cfg.make_fet(fet_polarity::n);
    struct task {
        double area, v_gs;
    };
    std::vector<task> tasks;
    for (double a : cfg.a_fe_nm2)
        for (double g : cfg.v_gs_list) tasks.push_back({a, g});
    std::vector<output_table> tables(tasks.size());
    parallel_for((int)tasks.size(), [&](int i) {
        nc_fet dev{fet, cfg.make_lk(tasks[i].area)};
        tables[i] =
            sweep_idvd(dev, cfg.v_ds_start, cfg.v_ds_stop, cfg.step, tasks[i].v_gs);
    });
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        std::string name =
            "idvd_a" + fmt_g(tasks[i].area) + "_vgs" + fmt_g(tasks[i].v_gs) + ".csv";
        em.csv(name, sweep_csv(tables[i].rows, true));
    }
    fet_params ref = cfg.make_fet_reference(fet_polarity::n);
    for (double g : cfg.v_gs_list) {
        auto table = conventional_idvd(ref, cfg.v_ds_start, cfg.v_ds_stop, cfg.step, g);
        em.csv("idvd_conventional_vgs" + fmt_g(g) + ".csv", sweep_csv(table.rows, false));
    }
}

void run_attractor(const experiment_config& cfg, emitter& em) {
    fet_params fet = cfg.make_fet(fet_polarity::n);
    lk_model base = cfg.make_lk(cfg.a_fe_nm2.front());
    std::vector<double> areas_m2;
    for (double a : cfg.a_fe_nm2) areas_m2.push_back(a * 1e-18);
    double v_ds = *std::max_element(cfg.v_ds_list.begin(), cfg.v_ds_list.end());
    auto r = attractor_estimate(fet, base, areas_m2, v_ds);
    csv_table t;
    t.header = {"v_a_V", "spread_V", "q_zero_v_V", "v_ds_V"};
    t.add_row({r.v_a, r.spread, r.q_zero_v, v_ds});
    em.csv("attractor.csv", t);
}

void run_critical_area(const experiment_config& cfg, emitter& em) {
    require(cfg.a_fe_nm2.size() >= 2, error_kind::validation,
            "ferro.a_fe_list: critical-area needs two areas bracketing the transition");
    fet_params fet = cfg.make_fet(fet_polarity::n);
    lk_model base = cfg.make_lk(cfg.a_fe_nm2.front());
    auto [lo_it, hi_it] = std::minmax_element(cfg.a_fe_nm2.begin(), cfg.a_fe_nm2.end());
    double v_ds = *std::max_element(cfg.v_ds_list.begin(), cfg.v_ds_list.end());
    double a_crit = critical_area(fet, base, *lo_it * 1e-18, *hi_it * 1e-18, v_ds);
    csv_table t;
    t.header = {"a_crit_nm2", "a_lo_nm2", "a_hi_nm2", "v_ds_V"};
    t.add_row({a_crit * 1e18, *lo_it, *hi_it, v_ds});
    em.csv("critical_area.csv", t);
}

csv_table vtc_csv(const vtc_table& up, const vtc_table& down) {
    require(up.rows.size() == down.rows.size(), error_kind::invalid_input,
            "vtc tables must share a grid");
    csv_table t;
    t.header = {"v_in_V", "v_out_up_V", "v_out_down_V"};
    for (std::size_t k = 0; k < up.rows.size(); ++k) {
        const auto& d = down.rows[down.rows.size() - 1 - k];
        require(std::abs(d.v_in - up.rows[k].v_in) < 1e-9, error_kind::invalid_input,
                "vtc tables must share a grid");
        t.add_row({up.rows[k].v_in, up.rows[k].v_out, d.v_out});
    }
    return t;
}

void run_inverter_vtc(const experiment_config& cfg, emitter& em) {
    double v_dd = cfg.v_dd.front();
    csv_table metrics;
    metrics.header = {"variant", "gain_max", "v_m_V", "nm_h_V", "nm_l_V", "hysteresis_V"};
    auto run_pair = [&](const inverter& inv, const std::string& variant,
                        const std::string& file) {
        auto up = inverter_vtc(inv, 0.0, v_dd, cfg.step, sweep_direction::up);
        auto down = inverter_vtc(inv, 0.0, v_dd, cfg.step, sweep_direction::down);
        em.csv(file, vtc_csv(up, down));
        auto m = vtc_metrics(up, down, v_dd);
        metrics.add_row({variant, m.gain_max, m.v_m, m.nm_h, m.nm_l, m.vtc_hysteresis});
    };
    run_pair(cfg.make_inverter(std::nullopt), "conventional", "vtc_conventional.csv");
    for (double a : cfg.a_fe_nm2)
        run_pair(cfg.make_inverter(a), "nc_a" + fmt_g(a), "vtc_a" + fmt_g(a) + ".csv");
    em.csv("vtc_metrics.csv", metrics);
}

csv_table trace_csv(const transient_trace& trace, int stages) {
    csv_table t;
    t.header = {"t_s"};
    for (int k = 0; k < stages; ++k) t.header.push_back("v_node" + std::to_string(k) + "_V");
    std::size_t n_q = trace.q_fe.empty() ? 0 : trace.q_fe.front().size();
    for (std::size_t k = 0; k < n_q; ++k)
        t.header.push_back("q_dev" + std::to_string(k) + "_C");
    t.header.push_back("i_vdd_A");
    for (std::size_t s = 0; s < trace.t.size(); ++s) {
        std::vector<csv_cell> row{trace.t[s]};
        for (double v : trace.v_nodes[s]) row.push_back(v);
        for (double q : trace.q_fe[s]) row.push_back(q);
        row.push_back(trace.i_vdd[s]);
        t.add_row(std::move(row));
    }
    return t;
}

void run_ro_transient(const experiment_config& cfg, emitter& em) {
    transient_config tc = cfg.make_transient();
    csv_table metrics;
    metrics.header = {"variant", "period_s", "delay_per_stage_s", "energy_per_cycle_J"};
    auto run_one = [&](const ring_oscillator& ro, const std::string& variant,
                       const std::string& file) {
        auto trace = ro_transient(ro, tc);
        em.csv(file, trace_csv(trace, ro.stages));
        auto m = ro_metrics(trace, ro);
        metrics.add_row({variant, m.period, m.delay_per_stage, m.energy_per_cycle});
    };
    run_one(cfg.make_ring(std::nullopt), "conventional", "ro_conventional.csv");
    run_one(cfg.make_ring(cfg.a_fe_nm2.front()), "nc_a" + fmt_g(cfg.a_fe_nm2.front()),
            "ro_nc.csv");
    em.csv("ro_metrics.csv", metrics);
}

double log_interp_energy(const std::vector<energy_delay_row>& rows, double target_delay) {
    std::vector<energy_delay_row> sorted = rows;
    std::sort(sorted.begin(), sorted.end(),
              [](const energy_delay_row& a, const energy_delay_row& b) {
                  return a.delay_per_stage < b.delay_per_stage;
              });
    std::vector<double> ld, le;
    for (const auto& r : sorted) {
        ld.push_back(std::log(r.delay_per_stage));
        le.push_back(std::log(r.energy_per_cycle));
    }
    return std::exp(interp_linear(ld, le, std::log(target_delay)));
}

void run_energy_delay(const experiment_config& cfg, emitter& em) {
    transient_config tc = cfg.make_transient();
    ring_oscillator conv = cfg.make_ring(std::nullopt);
    ring_oscillator nc = cfg.make_ring(cfg.a_fe_nm2.front());
    auto [conv_rows, nc_rows] = energy_delay_sweep(conv, nc, cfg.v_dd, tc);
    csv_table t;
    t.header = {"v_dd_V", "delay_s", "energy_J", "variant"};
    for (std::size_t k = 0; k < conv_rows.size(); ++k) {
        t.add_row({conv_rows[k].v_dd, conv_rows[k].delay_per_stage,
                   conv_rows[k].energy_per_cycle, std::string("conventional")});
        t.add_row({nc_rows[k].v_dd, nc_rows[k].delay_per_stage, nc_rows[k].energy_per_cycle,
                   std::string("nc")});
    }
    em.csv("energy_delay.csv", t);

    auto max_delay = [](const std::vector<energy_delay_row>& rows) {
        double m = rows.front().delay_per_stage;
        for (const auto& r : rows) m = std::max(m, r.delay_per_stage);
        return m;
    };
    double target = std::min(max_delay(conv_rows), max_delay(nc_rows));
    auto min_delay = [](const std::vector<energy_delay_row>& rows) {
        double m = rows.front().delay_per_stage;
        for (const auto& r : rows) m = std::min(m, r.delay_per_stage);
        return m;
    };
    require(target >= min_delay(conv_rows) && target >= min_delay(nc_rows),
            error_kind::out_of_range,
            "energy-delay: the variants' delay ranges do not overlap at any common "
            "stage delay; widen circuit.v_dd_list");
    double e_conv = log_interp_energy(conv_rows, target);
    double e_nc = log_interp_energy(nc_rows, target);
    double reduction = iso_delay_reduction(conv_rows, nc_rows, target);
    csv_table iso;
    iso.header = {"target_delay_s", "energy_conventional_J", "energy_nc_J", "reduction"};
    iso.add_row({target, e_conv, e_nc, reduction});
    em.csv("iso_delay.csv", iso);
    char buf[64];
    std::snprintf(buf, sizeof buf, "iso_delay_reduction=%.9g", reduction);
    em.scalars.push_back(buf);
}

void run_device_metrics(const experiment_config& cfg, emitter& em) {
    fet_params fet = cfg.make_fet(fet_polarity::n);
    fet_params ref = cfg.make_fet_reference(fet_polarity::n);
    double i_crit = vt_criterion_current(fet.geom);
    auto conv_runner = [&](double v_ds, sweep_direction dir) {
        return conventional_idvg(ref, cfg.v_gs_start, cfg.v_gs_stop, cfg.step, v_ds, dir);
    };
    em.csv("metrics_conventional.csv", metrics_csv(measure_device(conv_runner, cfg, i_crit)));
    nc_fet dev{fet, cfg.make_lk(cfg.a_fe_nm2.front())};
    auto nc_runner = [&](double v_ds, sweep_direction dir) {
        return sweep_idvg(dev, cfg.v_gs_start, cfg.v_gs_stop, cfg.step, v_ds, dir);
    };
    em.csv("metrics_nc.csv", metrics_csv(measure_device(nc_runner, cfg, i_crit)));
}

} // namespace

const char* to_cli_name(experiment_kind kind) {
    switch (kind) {
        case experiment_kind::s_curve: return "s-curve";
        case experiment_kind::idvg: return "idvg";
        case experiment_kind::idvd: return "idvd";
        case experiment_kind::attractor: return "attractor";
        case experiment_kind::critical_area: return "critical-area";
        case experiment_kind::inverter_vtc: return "inverter-vtc";
        case experiment_kind::ro_transient: return "ro-transient";
        case experiment_kind::energy_delay: return "energy-delay";
        case experiment_kind::device_metrics: return "metrics";
    }
    return "unknown";
}

std::optional<experiment_kind> kind_from_cli_name(const std::string& name) {
    for (auto k : {experiment_kind::s_curve, experiment_kind::idvg, experiment_kind::idvd,
                   experiment_kind::attractor, experiment_kind::critical_area,
                   experiment_kind::inverter_vtc, experiment_kind::ro_transient,
                   experiment_kind::energy_delay, experiment_kind::device_metrics})
        if (name == to_cli_name(k)) return k;
    return std::nullopt;
}

void parallel_for(int n, const std::function<void(int)>& body) {
    if (n <= 0) return;
    int workers = (int)std::thread::hardware_concurrency();
    if (const char* env = std::getenv("NCFET_SIM_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) workers = (int)v;
    }
    workers = std::clamp(workers, 1, n);
    if (workers == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto drain = [&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(drain);
    drain();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

experiment_result run_experiment(const experiment_config& cfg, experiment_kind kind) {
    cfg.validate();
    emitter em(cfg, kind);
    switch (kind) {
        case experiment_kind::s_curve: run_s_curve(cfg, em); break;
        case experiment_kind::idvg: run_idvg(cfg, em); break;
        case experiment_kind::idvd: run_idvd(cfg, em); break;
        case experiment_kind::attractor: run_attractor(cfg, em); break;
        case experiment_kind::critical_area: run_critical_area(cfg, em); break;
        case experiment_kind::inverter_vtc: run_inverter_vtc(cfg, em); break;
        case experiment_kind::ro_transient: run_ro_transient(cfg, em); break;
        case experiment_kind::energy_delay: run_energy_delay(cfg, em); break;
        case experiment_kind::device_metrics: run_device_metrics(cfg, em); break;
    }
    em.finish();
    return em.result;
}

} // namespace ncsim
