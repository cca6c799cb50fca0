#include "ncsim/ferroelectric.hpp"

#include <cmath>

#include "ncsim/errors.hpp"
#include "ncsim/numerics.hpp"

namespace ncsim {

void lk_coefficients::validate() const {
    require(alpha < 0.0, error_kind::invalid_input, "lk: alpha must be negative");
    require(rho > 0.0, error_kind::invalid_input, "lk: rho must be positive");
    require(gamma >= 0.0, error_kind::invalid_input, "lk: gamma must be nonnegative");
    if (gamma == 0.0) {
        require(beta > 0.0, error_kind::invalid_input, "lk: beta must be positive at gamma = 0");
    } else {
        // The quintic keeps exactly one positive root of E(P)/P when the
        // quadratic in P^2 has roots of opposite sign, which alpha < 0
        // guarantees; nothing further to check.
    }
}

void ferro_geometry::validate() const {
    require(t_fe > 0.0, error_kind::invalid_input, "ferro: t_fe must be positive");
    require(a_fe > 0.0, error_kind::invalid_input, "ferro: a_fe must be positive");
}

ferro_state make_ferro_state(const lk_model& m, double q) {
    return {q, q / m.geom.a_fe};
}

std::string to_string(quadrant q) {
    switch (q) {
        case quadrant::q1: return "I";
        case quadrant::q2: return "II";
        case quadrant::q3: return "III";
        case quadrant::q4: return "IV";
    }
    return "?";
}

std::string to_string(region_mode m) {
    return m == region_mode::diminution ? "Diminution" : "Amplification";
}

std::string to_string(cap_branch b) {
    return b == cap_branch::negative_capacitance ? "NC" : "PC";
}

double e_field(const lk_coefficients& c, double p) {
    double p2 = p * p;
    return p * (2.0 * c.alpha + p2 * (4.0 * c.beta + 6.0 * c.gamma * p2));
}

double de_dp(const lk_coefficients& c, double p) {
    double p2 = p * p;
    return 2.0 * c.alpha + p2 * (12.0 * c.beta + 30.0 * c.gamma * p2);
}

namespace {

// Field extremum location on (0, p_r): positive root of dE/dP = 0,
// solved as a quadratic in P^2. alpha < 0 makes exactly one root positive.
double extremum_p(const lk_coefficients& c) {
    if (c.gamma == 0.0) return std::sqrt(-c.alpha / (6.0 * c.beta));
    double a = 30.0 * c.gamma, b = 12.0 * c.beta, cc = 2.0 * c.alpha;
    double disc = b * b - 4.0 * a * cc;
    double u = (-b + std::sqrt(disc)) / (2.0 * a);
    return std::sqrt(u);
}

} // namespace

lk_coefficients calibrate_lk(double p_r, double e_c, double gamma, double rho) {
    require(p_r > 0.0 && e_c > 0.0, error_kind::invalid_input,
            "calibrate_lk: p_r and e_c must be positive");
    require(gamma >= 0.0, error_kind::invalid_input, "calibrate_lk: gamma must be nonnegative");
    require(rho > 0.0, error_kind::invalid_input, "calibrate_lk: rho must be positive");

    lk_coefficients out;
    out.gamma = gamma;
    out.rho = rho;

    const double s3 = std::sqrt(3.0);
    if (gamma == 0.0) {
        out.alpha = -(3.0 * s3 / 4.0) * e_c / p_r;
        out.beta = (3.0 * s3 / 8.0) * e_c / (p_r * p_r * p_r);
        out.validate();
        return out;
    }

    // gamma > 0: pin E(p_r) = 0 via alpha(beta), then solve for the beta
    // whose inner-lobe extremum magnitude equals e_c.
    auto alpha_of = [&](double beta) {
        return -2.0 * beta * p_r * p_r - 3.0 * gamma * p_r * p_r * p_r * p_r;
    };
    auto ec_of = [&](double beta) {
        lk_coefficients t{alpha_of(beta), beta, gamma, rho};
        return -e_field(t, extremum_p(t));
    };

    double beta0 = (3.0 * s3 / 8.0) * e_c / (p_r * p_r * p_r);
    double lo = beta0 * 1e-3, hi = beta0 * 1e3;
    // ec_of grows monotonically with beta on this family; expand if needed.
    for (int i = 0; i < 8 && ec_of(lo) > e_c; ++i) lo *= 1e-2;
    for (int i = 0; i < 8 && ec_of(hi) < e_c; ++i) hi *= 1e2;
    auto res = bisect([&](double b) { return ec_of(b) - e_c; }, lo, hi,
                      beta0 * 1e-15, 400);
    require(res.converged, error_kind::non_convergence, "calibrate_lk: beta solve stalled");

    out.beta = res.x;
    out.alpha = alpha_of(res.x);
    out.validate();
    return out;
}

double v_fe_static(const lk_model& m, double q) {
    return m.geom.t_fe * e_field(m.coeffs, q / m.geom.a_fe);
}

double dv_fe_dq(const lk_model& m, double q) {
    return m.geom.t_fe * de_dp(m.coeffs, q / m.geom.a_fe) / m.geom.a_fe;
}

double lk_inflection_p(const lk_coefficients& c) {
    return extremum_p(c);
}

double lk_remnant_polarization(const lk_coefficients& c) {
    // E is negative at the inner extremum and grows without bound; bracket
    // the sign change beyond the extremum.
    double pm = extremum_p(c);
    double hi = 2.0 * pm;
    for (int i = 0; i < 64 && e_field(c, hi) < 0.0; ++i) hi *= 1.5;
    require(e_field(c, hi) > 0.0, error_kind::no_crossing,
            "lk: no positive remnant polarization");
    auto res = bisect([&](double p) { return e_field(c, p); }, pm, hi, pm * 1e-15, 400);
    return res.x;
}

double lk_coercive_field(const lk_coefficients& c) {
    double p_r = lk_remnant_polarization(c);
    double p_min = brent_minimize([&](double p) { return e_field(c, p); },
                                  0.0, p_r, 1e-13);
    return -e_field(c, p_min);
}

namespace {

s_curve_region classify(double p, double v, double slope) {
    s_curve_region r;
    if (v > 0.0) {
        r.quad = p >= 0.0 ? quadrant::q1 : quadrant::q4;
    } else if (v < 0.0) {
        r.quad = p >= 0.0 ? quadrant::q2 : quadrant::q3;
    } else {
        // On the v_fe = 0 axis the NC-branch quadrant wins.
        r.quad = p >= 0.0 ? quadrant::q2 : quadrant::q3;
    }
    r.mode = (r.quad == quadrant::q2 || r.quad == quadrant::q3)
                 ? region_mode::amplification
                 : region_mode::diminution;
    r.branch = slope < 0.0 ? cap_branch::negative_capacitance
                           : cap_branch::positive_capacitance;
    return r;
}

} // namespace

s_curve_region classify_region(const lk_model& m, double q) {
    double p = q / m.geom.a_fe;
    return classify(p, v_fe_static(m, q), dv_fe_dq(m, q));
}

std::vector<s_curve_row> s_curve_table(const lk_model& m,
                                       double p_min, double p_max, int points) {
    require(points >= 2, error_kind::invalid_input, "s_curve_table: need >= 2 points");
    require(p_max > p_min, error_kind::invalid_input, "s_curve_table: p_max <= p_min");
    std::vector<s_curve_row> rows;
    rows.reserve(points);
    for (int i = 0; i < points; ++i) {
        s_curve_row row;
        row.p = p_min + (p_max - p_min) * i / (points - 1);
        row.q = row.p * m.geom.a_fe;
        row.e = e_field(m.coeffs, row.p);
        row.v_fe = m.geom.t_fe * row.e;
        double slope = dv_fe_dq(m, row.q);
        row.c_fe = 1.0 / slope; // signed; diverges at the branch boundary
        row.region = classify(row.p, row.v_fe, slope);
        if (row.p == 0.0 && !rows.empty()) {
            row.region.quad = rows.back().region.quad;
            row.region.mode = rows.back().region.mode;
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace ncsim
