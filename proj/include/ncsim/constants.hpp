#ifndef NCSIM_CONSTANTS_HPP
#define NCSIM_CONSTANTS_HPP

namespace ncsim {

// Physical constants, SI.
inline constexpr double k_boltzmann = 1.380649e-23;     // J/K
inline constexpr double q_electron  = 1.602176634e-19;  // C
inline constexpr double eps0        = 8.8541878128e-12; // F/m
inline constexpr double eps_r_sio2  = 3.9;

inline constexpr double temp_default = 300.0; // K

inline double thermal_voltage(double temp_k = temp_default) {
    return k_boltzmann * temp_k / q_electron;
}

// Unit conversions used at the config boundary. Internals are pure SI.
inline constexpr double nm_to_m       = 1e-9;
inline constexpr double nm2_to_m2     = 1e-18;
inline constexpr double ff_to_f       = 1e-15;
inline constexpr double uc_cm2_to_si  = 1e-2;  // uC/cm^2 -> C/m^2
inline constexpr double mv_cm_to_si   = 1e8;   // MV/cm -> V/m
inline constexpr double ns_to_s       = 1e-9;
inline constexpr double ps_to_s       = 1e-12;
inline constexpr double fs_to_s       = 1e-15;

} // namespace ncsim

#endif
