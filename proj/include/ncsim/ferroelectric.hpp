#ifndef NCSIM_FERROELECTRIC_HPP
#define NCSIM_FERROELECTRIC_HPP

#include <string>
#include <vector>

namespace ncsim {

// Landau polynomial for the ferroelectric layer:
//   E(P) = 2*alpha*P + 4*beta*P^3 + 6*gamma*P^5        (static)
// with the viscosity term rho*dP/dt added only in transient solves.
// alpha < 0 puts the origin on the negative-slope branch.
struct lk_coefficients {
    double alpha = 0.0; // V*m/C
    double beta  = 0.0; // V*m^5/C^3
    double gamma = 0.0; // V*m^9/C^5
    double rho   = 0.0; // V*m*s/C (kinetic coefficient)

    void validate() const;
};

struct ferro_geometry {
    double t_fe = 0.0; // film thickness, m
    double a_fe = 0.0; // film area, m^2

    void validate() const;
};

struct lk_model {
    lk_coefficients coeffs;
    ferro_geometry geom;
};

// Gate charge q is the single source of truth; p = q / a_fe is derived.
struct ferro_state {
    double q = 0.0; // C
    double p = 0.0; // C/m^2
};

ferro_state make_ferro_state(const lk_model& m, double q);

// Quadrants of the (v_fe, p) plane, counted counterclockwise from
// (v_fe > 0, p > 0). Quadrants II and III amplify the internal node,
// I and IV attenuate it.
enum class quadrant { q1, q2, q3, q4 };
enum class region_mode { diminution, amplification };
enum class cap_branch { negative_capacitance, positive_capacitance };

struct s_curve_region {
    quadrant quad = quadrant::q1;
    region_mode mode = region_mode::diminution;
    cap_branch branch = cap_branch::positive_capacitance;
};

std::string to_string(quadrant q);
std::string to_string(region_mode m);
std::string to_string(cap_branch b);

// Fit (alpha, beta) so that E(p_r) = 0 and the field extremum magnitude on
// the inner lobe equals e_c, at fixed gamma. gamma = 0 has a closed form;
// gamma > 0 falls back to a guarded 1-D solve.
lk_coefficients calibrate_lk(double p_r, double e_c, double gamma, double rho);

double e_field(const lk_coefficients& c, double p);   // V/m
double de_dp(const lk_coefficients& c, double p);     // V*m/C

// Static film voltage and its charge derivative at charge q.
double v_fe_static(const lk_model& m, double q);      // V
double dv_fe_dq(const lk_model& m, double q);         // V/C

// Positive root of E(P) = 0 (remnant polarization) and the extremum field
// magnitude on (0, p_r), recovered numerically from the coefficients.
double lk_remnant_polarization(const lk_coefficients& c);
double lk_coercive_field(const lk_coefficients& c);

// Positive zero of dE/dP: boundary between the negative- and
// positive-capacitance branches.
double lk_inflection_p(const lk_coefficients& c);

// Point query; the v_fe = 0 and p = 0 boundaries resolve to quadrant II
// for p >= 0 and III for p < 0 so classification is total.
s_curve_region classify_region(const lk_model& m, double q);

struct s_curve_row {
    double p = 0.0;    // C/m^2
    double q = 0.0;    // C
    double e = 0.0;    // V/m
    double v_fe = 0.0; // V
    double c_fe = 0.0; // F, signed 1/(dv_fe/dq)
    s_curve_region region;
};

// Uniform grid in p; rows with p == 0 inherit the previous row's quadrant
// so runs stay contiguous.
std::vector<s_curve_row> s_curve_table(const lk_model& m,
                                       double p_min, double p_max, int points);

} // namespace ncsim

#endif
