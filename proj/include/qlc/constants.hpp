#pragma once

#include <numbers>

namespace qlc {

// CODATA 2018 exact / recommended values, SI units.
inline constexpr double kPlanck = 6.62607015e-34;
inline constexpr double kHbar = kPlanck / (2.0 * std::numbers::pi);
inline constexpr double kBoltzmann = 1.380649e-23;
inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Energies and splittings are carried as cyclic frequencies (E/h, Hz).
// Rabi rates, detunings and trap frequencies are angular (rad/s). These two
// helpers are the only place the 2*pi factor is applied.
constexpr double to_angular(double hz) { return kTwoPi * hz; }
constexpr double to_cyclic(double rad_per_s) { return rad_per_s / kTwoPi; }

}  // namespace qlc
