#pragma once

// Unit conventions used throughout:
//   - user-facing frequencies and rates are ordinary frequencies in MHz
//     (i.e. the nu = gamma/(2*pi) quantities)
//   - internal dynamics run in angular rad/ns and rates in 1/ns
//   - times in ns, wavelengths in nm, temperatures in K, energies in meV
// Conversion happens exactly once, at generator construction or at the
// named helper below.

#include <numbers>

namespace wgqed {

// CODATA 2018 values.
namespace constants {
inline constexpr double c_m_per_s = 299792458.0;
inline constexpr double h_eV_s = 4.135667696e-15;
inline constexpr double kB_eV_per_K = 8.617333262e-5;
inline constexpr double h_meV_per_GHz = h_eV_s * 1e3 * 1e9; // 4.1357e-3 meV/GHz
} // namespace constants

// MHz (ordinary frequency) -> angular rad/ns.
inline constexpr double mhz_to_rad_per_ns(double mhz) {
  return 2.0 * std::numbers::pi * mhz * 1e-3;
}

// Decay rate quoted as gamma/(2*pi) in MHz -> 1/ns.
inline constexpr double mhz_to_per_ns(double mhz) {
  return 2.0 * std::numbers::pi * mhz * 1e-3;
}

inline constexpr double per_ns_to_mhz(double per_ns) {
  return per_ns * 1e3 / (2.0 * std::numbers::pi);
}

} // namespace wgqed
