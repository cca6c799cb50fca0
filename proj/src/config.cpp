#include "ncsim/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ncsim/errors.hpp"

namespace ncsim {

namespace {

// Shortest decimal form that parses back to the same double.
std::string render_double(double v) {
    char buf[40];
    for (int prec : {15, 16, 17}) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::string render_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) out += ", ";
        out += render_double(v[k]);
    }
    return out;
}

double parse_double_or_fail(const std::string& raw, const std::string& where) {
    const char* s = raw.c_str();
    char* end = nullptr;
    double v = std::strtod(s, &end);
    require(end != s && *end == '\0', error_kind::parse,
            where + ": '" + raw + "' is not a number");
    return v;
}

long long parse_int_or_fail(const std::string& raw, const std::string& where) {
    const char* s = raw.c_str();
    char* end = nullptr;
    long long v = std::strtoll(s, &end, 10);
    require(end != s && *end == '\0', error_kind::parse,
            where + ": '" + raw + "' is not an integer");
    return v;
}

std::vector<std::string> split_list(const std::string& raw) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : raw) {
        if (c == ',') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    for (auto& p : parts) {
        std::size_t a = p.find_first_not_of(" \t");
        std::size_t b = p.find_last_not_of(" \t");
        p = a == std::string::npos ? "" : p.substr(a, b - a + 1);
    }
    return parts;
}

std::vector<double> parse_double_list(const std::string& raw, const std::string& where) {
    std::vector<double> out;
    for (const auto& part : split_list(raw)) {
        require(!part.empty(), error_kind::parse, where + ": empty list element");
        out.push_back(parse_double_or_fail(part, where));
    }
    return out;
}

// One registered key: how to set it from text and how to print it back.
struct key_spec {
    std::string section;
    std::string key;
    std::function<void(experiment_config&, const std::string&, const std::string&)> apply;
    std::function<std::string(const experiment_config&)> render;
};

std::vector<key_spec> build_registry() {
    std::vector<key_spec> reg;
    auto num = [&](const char* sec, const char* key, double experiment_config::*member) {
        reg.push_back({sec, key,
                       [member](experiment_config& c, const std::string& raw,
                                const std::string& where) {
                           c.*member = parse_double_or_fail(raw, where);
                       },
                       [member](const experiment_config& c) { return render_double(c.*member); }});
    };
    auto count = [&](const char* sec, const char* key, int experiment_config::*member) {
        reg.push_back({sec, key,
                       [member](experiment_config& c, const std::string& raw,
                                const std::string& where) {
                           c.*member = (int)parse_int_or_fail(raw, where);
                       },
                       [member](const experiment_config& c) { return std::to_string(c.*member); }});
    };
    auto list = [&](const char* sec, const char* key,
                    std::vector<double> experiment_config::*member) {
        reg.push_back({sec, key,
                       [member](experiment_config& c, const std::string& raw,
                                const std::string& where) {
                           c.*member = parse_double_list(raw, where);
                       },
                       [member](const experiment_config& c) { return render_list(c.*member); }});
    };

    num("ferro", "p_r_uC_cm2", &experiment_config::p_r_uC_cm2);
    num("ferro", "e_c_MV_cm", &experiment_config::e_c_MV_cm);
    num("ferro", "gamma", &experiment_config::gamma);
    num("ferro", "rho", &experiment_config::rho);
    num("ferro", "t_fe_nm", &experiment_config::t_fe_nm);
    reg.push_back({"ferro", "a_fe_nm2",
                   [](experiment_config& c, const std::string& raw, const std::string& where) {
                       c.a_fe_nm2 = {parse_double_or_fail(raw, where)};
                   },
                   [](const experiment_config& c) {
                       return c.a_fe_nm2.size() == 1 ? render_double(c.a_fe_nm2[0])
                                                     : std::string();
                   }});
    reg.push_back({"ferro", "a_fe_list",
                   [](experiment_config& c, const std::string& raw, const std::string& where) {
                       c.a_fe_nm2 = parse_double_list(raw, where);
                   },
                   [](const experiment_config& c) {
                       return c.a_fe_nm2.size() == 1 ? std::string() : render_list(c.a_fe_nm2);
                   }});

    for (auto [sec, member] : {std::pair{"fet.n", &experiment_config::fet_n},
                               std::pair{"fet.p", &experiment_config::fet_p}}) {
        auto fnum = [&](const char* key, double fet_config_section::*field) {
            reg.push_back({sec, key,
                           [member, field](experiment_config& c, const std::string& raw,
                                           const std::string& where) {
                               c.*member.*field = parse_double_or_fail(raw, where);
                           },
                           [member, field](const experiment_config& c) {
                               return render_double(c.*member.*field);
                           }});
        };
        fnum("i_off_nA", &fet_config_section::i_off_nA);
        fnum("i_on_uA", &fet_config_section::i_on_uA);
        fnum("ss_mV_dec", &fet_config_section::ss_mV_dec);
        fnum("dibl_mV_V", &fet_config_section::dibl_mV_V);
        fnum("v_dd", &fet_config_section::v_dd);
        fnum("wf_eV", &fet_config_section::wf_eV);
        fnum("wf_ref_eV", &fet_config_section::wf_ref_eV);
        fnum("r_sd_ohm", &fet_config_section::r_sd_ohm);
        fnum("l_g_nm", &fet_config_section::l_g_nm);
        fnum("d_nw_nm", &fet_config_section::d_nw_nm);
        fnum("eot_nm", &fet_config_section::eot_nm);
        fnum("l_ov_nm", &fet_config_section::l_ov_nm);
        reg.push_back({sec, "n_wires",
                       [member](experiment_config& c, const std::string& raw,
                                const std::string& where) {
                           (c.*member).n_wires = (int)parse_int_or_fail(raw, where);
                       },
                       [member](const experiment_config& c) {
                           return std::to_string((c.*member).n_wires);
                       }});
    }

    count("circuit", "stages", &experiment_config::stages);
    num("circuit", "c_wire_fF", &experiment_config::c_wire_fF);
    reg.push_back({"circuit", "v_dd",
                   [](experiment_config& c, const std::string& raw, const std::string& where) {
                       c.v_dd = {parse_double_or_fail(raw, where)};
                   },
                   [](const experiment_config& c) {
                       return c.v_dd.size() == 1 ? render_double(c.v_dd[0]) : std::string();
                   }});
    reg.push_back({"circuit", "v_dd_list",
                   [](experiment_config& c, const std::string& raw, const std::string& where) {
                       c.v_dd = parse_double_list(raw, where);
                   },
                   [](const experiment_config& c) {
                       return c.v_dd.size() == 1 ? std::string() : render_list(c.v_dd);
                   }});

    num("sweep", "v_gs_start", &experiment_config::v_gs_start);
    num("sweep", "v_gs_stop", &experiment_config::v_gs_stop);
    num("sweep", "step", &experiment_config::step);
    list("sweep", "v_ds_list", &experiment_config::v_ds_list);
    num("sweep", "v_ds_start", &experiment_config::v_ds_start);
    num("sweep", "v_ds_stop", &experiment_config::v_ds_stop);
    list("sweep", "v_gs_list", &experiment_config::v_gs_list);
    reg.push_back({"sweep", "directions",
                   [](experiment_config& c, const std::string& raw, const std::string& where) {
                       c.directions.clear();
                       for (const auto& part : split_list(raw)) {
                           if (part == "up")
                               c.directions.push_back(sweep_direction::up);
                           else if (part == "down")
                               c.directions.push_back(sweep_direction::down);
                           else
                               fail(error_kind::parse,
                                    where + ": direction must be 'up' or 'down', got '" +
                                        part + "'");
                       }
                   },
                   [](const experiment_config& c) {
                       std::string out;
                       for (std::size_t k = 0; k < c.directions.size(); ++k) {
                           if (k) out += ", ";
                           out += c.directions[k] == sweep_direction::up ? "up" : "down";
                       }
                       return out;
                   }});

    num("transient", "t_stop_ns", &experiment_config::t_stop_ns);
    num("transient", "dt_init_ps", &experiment_config::dt_init_ps);
    num("transient", "dt_min_fs", &experiment_config::dt_min_fs);
    num("transient", "dt_max_ps", &experiment_config::dt_max_ps);
    num("transient", "newton_tol", &experiment_config::newton_tol);
    count("transient", "max_newton", &experiment_config::max_newton);

    reg.push_back({"output", "dir",
                   [](experiment_config& c, const std::string& raw, const std::string&) {
                       c.out_dir = raw;
                   },
                   [](const experiment_config& c) { return c.out_dir; }});
    count("output", "precision", &experiment_config::precision);
    return reg;
}

const std::vector<key_spec>& registry() {
    static std::vector<key_spec> reg = build_registry();
    return reg;
}

const key_spec* find_key(const std::string& section, const std::string& key) {
    for (const auto& spec : registry())
        if (spec.section == section && spec.key == key) return &spec;
    return nullptr;
}

bool known_section(const std::string& section) {
    for (const auto& spec : registry())
        if (spec.section == section) return true;
    return false;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

void check_positive(const experiment_config& c, double v, const char* dotted) {
    require(v > 0.0, error_kind::validation,
            std::string(dotted) + ": must be positive, got " + render_double(v));
    (void)c;
}

} // namespace

void experiment_config::validate() const {
    check_positive(*this, p_r_uC_cm2, "ferro.p_r_uC_cm2");
    check_positive(*this, e_c_MV_cm, "ferro.e_c_MV_cm");
    require(gamma >= 0.0, error_kind::validation, "ferro.gamma: must be nonnegative");
    check_positive(*this, rho, "ferro.rho");
    check_positive(*this, t_fe_nm, "ferro.t_fe_nm");
    require(!a_fe_nm2.empty(), error_kind::validation, "ferro.a_fe_list: must be nonempty");
    for (double a : a_fe_nm2) check_positive(*this, a, "ferro.a_fe_nm2");
    require(!(provided.count("ferro.a_fe_nm2") && provided.count("ferro.a_fe_list")),
            error_kind::validation,
            "ferro.a_fe_nm2: exclusive with ferro.a_fe_list, set only one");

    for (auto [name, s] : {std::pair{"fet.n", &fet_n}, std::pair{"fet.p", &fet_p}}) {
        auto key = [name](const char* k) { return std::string(name) + "." + k; };
        require(s->i_off_nA > 0.0, error_kind::validation, key("i_off_nA") + ": must be positive");
        require(s->i_on_uA > 0.0, error_kind::validation, key("i_on_uA") + ": must be positive");
        require(s->i_on_uA * 1e-6 > s->i_off_nA * 1e-9, error_kind::validation,
                key("i_on_uA") + ": on current must exceed off current");
        require(s->ss_mV_dec >= 59.6, error_kind::validation,
                key("ss_mV_dec") + ": below the thermionic limit");
        require(s->dibl_mV_V >= 0.0, error_kind::validation,
                key("dibl_mV_V") + ": must be nonnegative");
        require(s->v_dd > 0.0, error_kind::validation, key("v_dd") + ": must be positive");
        require(s->wf_eV > 0.0, error_kind::validation, key("wf_eV") + ": must be positive");
        require(s->wf_ref_eV > 0.0, error_kind::validation,
                key("wf_ref_eV") + ": must be positive");
        require(s->r_sd_ohm >= 0.0, error_kind::validation,
                key("r_sd_ohm") + ": must be nonnegative");
        require(s->l_g_nm > 0.0 && s->d_nw_nm > 0.0 && s->eot_nm > 0.0 && s->l_ov_nm > 0.0,
                error_kind::validation, key("l_g_nm") + ": geometry must be positive");
        require(s->n_wires >= 1, error_kind::validation,
                key("n_wires") + ": must be at least 1");
    }

    require(stages >= 3 && stages % 2 == 1, error_kind::validation,
            "circuit.stages: must be odd and at least 3");
    check_positive(*this, c_wire_fF, "circuit.c_wire_fF");
    require(!v_dd.empty(), error_kind::validation, "circuit.v_dd_list: must be nonempty");
    for (double v : v_dd) check_positive(*this, v, "circuit.v_dd");
    require(!(provided.count("circuit.v_dd") && provided.count("circuit.v_dd_list")),
            error_kind::validation,
            "circuit.v_dd: exclusive with circuit.v_dd_list, set only one");

    require(v_gs_stop > v_gs_start, error_kind::validation,
            "sweep.v_gs_stop: must exceed sweep.v_gs_start");
    check_positive(*this, step, "sweep.step");
    require(!v_ds_list.empty(), error_kind::validation, "sweep.v_ds_list: must be nonempty");
    require(v_ds_stop > v_ds_start, error_kind::validation,
            "sweep.v_ds_stop: must exceed sweep.v_ds_start");
    require(!v_gs_list.empty(), error_kind::validation, "sweep.v_gs_list: must be nonempty");
    require(!directions.empty(), error_kind::validation,
            "sweep.directions: must be nonempty");

    check_positive(*this, t_stop_ns, "transient.t_stop_ns");
    check_positive(*this, dt_init_ps, "transient.dt_init_ps");
    check_positive(*this, dt_min_fs, "transient.dt_min_fs");
    check_positive(*this, dt_max_ps, "transient.dt_max_ps");
    make_transient().validate();
    require(newton_tol > 0.0, error_kind::validation,
            "transient.newton_tol: must be positive");
    require(max_newton >= 3, error_kind::validation, "transient.max_newton: must be >= 3");

    require(!out_dir.empty(), error_kind::validation, "output.dir: must be nonempty");
    require(precision >= 1 && precision <= 17, error_kind::validation,
            "output.precision: must be in [1, 17]");
}

lk_model experiment_config::make_lk(double a_fe_nm2_value) const {
    lk_model m;
    m.coeffs = calibrate_lk(p_r_uC_cm2 * 1e-2, e_c_MV_cm * 1e8, gamma, rho);
    m.geom.t_fe = t_fe_nm * 1e-9;
    m.geom.a_fe = a_fe_nm2_value * 1e-18;
    return m;
}

fet_params experiment_config::make_fet(fet_polarity pol) const {
    const fet_config_section& s = pol == fet_polarity::n ? fet_n : fet_p;
    fet_geometry g;
    g.l_g = s.l_g_nm * 1e-9;
    g.d_nw = s.d_nw_nm * 1e-9;
    g.eot = s.eot_nm * 1e-9;
    g.l_ov = s.l_ov_nm * 1e-9;
    g.n_wires = s.n_wires;
    fet_params seed = default_fet(pol, g);
    seed.r_sd = s.r_sd_ohm;
    seed.wf = s.wf_ref_eV;
    seed.wf_ref = s.wf_ref_eV;
    fet_targets t;
    t.i_off = s.i_off_nA * 1e-9;
    t.i_on = s.i_on_uA * 1e-6;
    t.ss_target = s.ss_mV_dec;
    t.dibl_target = s.dibl_mV_V;
    t.v_dd = s.v_dd;
    fet_params f = calibrate_fet(t, seed);
    return apply_workfunction(f, s.wf_eV);
}

fet_params experiment_config::make_fet_reference(fet_polarity pol) const {
    const fet_config_section& s = pol == fet_polarity::n ? fet_n : fet_p;
    fet_params f = make_fet(pol);
    return apply_workfunction(f, s.wf_ref_eV);
}

transient_config experiment_config::make_transient() const {
    transient_config t;
    t.t_stop = t_stop_ns * 1e-9;
    t.dt_init = dt_init_ps * 1e-12;
    t.dt_min = dt_min_fs * 1e-15;
    t.dt_max = dt_max_ps * 1e-12;
    t.newton_tol = newton_tol;
    t.max_newton = max_newton;
    return t;
}

// An inverter without a ferroelectric area is the conventional reference and
// carries the reference workfunction; wf_eV is a property of the device under
// study, not of the comparison baseline.
inverter experiment_config::make_inverter(std::optional<double> a_fe_nm2_value) const {
    inverter inv;
    if (a_fe_nm2_value) {
        inv.nfet = {make_fet(fet_polarity::n), make_lk(*a_fe_nm2_value)};
        inv.pfet = {make_fet(fet_polarity::p), make_lk(*a_fe_nm2_value)};
    } else {
        inv.nfet = {make_fet_reference(fet_polarity::n), std::nullopt};
        inv.pfet = {make_fet_reference(fet_polarity::p), std::nullopt};
    }
    inv.v_dd = v_dd.front();
    return inv;
}

ring_oscillator experiment_config::make_ring(std::optional<double> a_fe_nm2_value) const {
    ring_oscillator ro;
    ro.stages = stages;
    ro.c_wire = c_wire_fF * 1e-15;
    ro.inv = make_inverter(a_fe_nm2_value);
    return ro;
}

namespace {

void apply_one(experiment_config& cfg, const std::string& section, const std::string& key,
               const std::string& value, const std::string& where) {
    const key_spec* spec = find_key(section, key);
    require(spec != nullptr, error_kind::parse,
            where + ": unknown key '" + section + "." + key + "'");
    spec->apply(cfg, value, where + " (" + section + "." + key + ")");
    cfg.provided.insert(section + "." + key);
}

} // namespace

experiment_config parse_config_text(const std::string& text,
                                    const std::vector<std::string>& overrides,
                                    const std::string& origin) {
    experiment_config cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find_first_of("#;");
        std::string code = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (code.empty()) continue;
        std::string where = origin + ":" + std::to_string(lineno);
        if (code.front() == '[') {
            require(code.back() == ']', error_kind::parse,
                    where + ":" + std::to_string(line.find('[') + 1) +
                        ": unterminated section header");
            section = trim(code.substr(1, code.size() - 2));
            require(known_section(section), error_kind::parse,
                    where + ": unknown section '[" + section + "]'");
            continue;
        }
        std::size_t eq = code.find('=');
        require(eq != std::string::npos, error_kind::parse,
                where + ":1: expected 'key = value' or '[section]'");
        std::string key = trim(code.substr(0, eq));
        std::string value = trim(code.substr(eq + 1));
        require(!key.empty(), error_kind::parse, where + ":1: empty key");
        require(!section.empty(), error_kind::parse,
                where + ": key '" + key + "' appears before any [section]");
        std::string dotted = section + "." + key;
        require(!seen.count(dotted), error_kind::parse,
                where + ": duplicate key '" + dotted + "'");
        seen.insert(dotted);
        apply_one(cfg, section, key, value, where);
    }
    for (const auto& ov : overrides) {
        std::size_t eq = ov.find('=');
        require(eq != std::string::npos, error_kind::parse,
                "override '" + ov + "': expected KEY=VALUE");
        std::string dotted = trim(ov.substr(0, eq));
        std::string value = trim(ov.substr(eq + 1));
        std::size_t dot = dotted.rfind('.');
        require(dot != std::string::npos, error_kind::parse,
                "override '" + ov + "': key must be section.key");
        apply_one(cfg, dotted.substr(0, dot), dotted.substr(dot + 1), value,
                  "override '" + ov + "'");
    }
    cfg.validate();
    return cfg;
}

experiment_config load_config(const std::string& path,
                              const std::vector<std::string>& overrides) {
    std::ifstream f(path, std::ios::binary);
    require(f.good(), error_kind::io, "cannot open config file " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str(), overrides, path);
}

std::string echo_config(const experiment_config& cfg) {
    std::string out;
    std::string section;
    for (const auto& spec : registry()) {
        std::string value = spec.render(cfg);
        if (value.empty() && (spec.key == "a_fe_nm2" || spec.key == "a_fe_list" ||
                              spec.key == "v_dd" || spec.key == "v_dd_list"))
            continue; // scalar/list alternatives: echo only the active form
        if (spec.section != section) {
            if (!out.empty()) out += '\n';
            out += "[" + spec.section + "]\n";
            section = spec.section;
        }
        out += spec.key + " = " + value;
        if (!cfg.provided.count(spec.section + "." + spec.key)) out += "  # source=default";
        out += '\n';
    }
    return out;
}

} // namespace ncsim
