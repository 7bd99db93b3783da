#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qlc/comb.hpp"
#include "qlc/molecule.hpp"
#include "qlc/rng.hpp"
#include "qlc/trapdyn.hpp"

namespace qlc {

struct ScanPoint {
    double nu_AO = 0.0;
    double signal = 0.0;
};

struct ScanResult {
    double f_rep = 0.0;
    std::vector<ScanPoint> points;  ///< strictly increasing nu_AO in [0, f_rep)
    double probe_time = 0.0;
};

/// One Raman line as seen by the probe pulse.
struct ScanLine {
    double splitting = 0.0;  ///< Hz
    double omega_s = 0.0;    ///< sideband Rabi rate on this line (rad/s)
};

/// Probe signal at one offset: the largest detuned flop probability over the
/// lines and both comb branches. Periodic in nu_AO with period f_rep.
double scan_signal(std::span<const ScanLine> lines, double f_rep, double probe_time, double nu_AO);

/// Evenly spaced offsets 0, step, ... below f_rep.
std::vector<double> uniform_grid(double f_rep, double step);

/// Signal on `grid`, optionally with additive Gaussian noise of width
/// `noise_sigma` drawn from `rng`.
ScanResult simulate_scan(std::span<const ScanLine> lines, double f_rep, double probe_time,
                         std::span<const double> grid, double noise_sigma = 0.0,
                         Rng* rng = nullptr);

/// Same, with each line's Omega_s = eta * comb_rabi(carrier_rabi(c, s), splitting, tau).
ScanResult simulate_scan(std::span<const double> splittings, const CombSettings& settings,
                         const MolecularConstants& c, const TrapSettings& trap, double probe_time,
                         std::span<const double> grid);

/// Local maxima above `threshold`, refined by a parabola through the three
/// nearest points. A uniform grid covering [0, f_rep) is treated as periodic.
std::vector<double> find_peaks(const ScanResult& scan, double threshold);

/// Full width at half maximum (Hz) of the detuned-Rabi lineshape.
double rabi_fwhm(double omega_s, double probe_time);

struct CombIndexResult {
    long M = 0;            ///< comb index at the first scan's repetition rate
    int sign = +1;
    double delta_omega = 0.0;
    double slope = 0.0;    ///< fitted d nu_AO / d f_rep
    std::vector<double> unwrapped_nu;  ///< tracked line per scan, continuous in f_rep
};

/// Tracks one line through scans at different repetition rates and inverts
/// d nu_AO / d f_rep = -sign * M. The line is the first scan's peak nearest
/// `tracked_nu` (default: its strongest peak). Throws PreconditionError for
/// fewer than two scans, repeated f_rep, a scan without peaks, or a slope
/// further than 0.4 from an integer.
CombIndexResult extract_comb_index(std::span<const ScanResult> scans,
                                   std::optional<double> tracked_nu = std::nullopt,
                                   double threshold = 0.5);

}  // namespace qlc
