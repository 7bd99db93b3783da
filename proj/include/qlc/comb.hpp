#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qlc/constants.hpp"
#include "qlc/molecule.hpp"

namespace qlc {

/// Set of net two-photon angular-momentum transfers q = delta m that one
/// polarization configuration of the Raman beams can drive.
class PolarizationConfig {
public:
    PolarizationConfig() = default;
    /// Throws PreconditionError if `q` is empty or has entries outside [-2, 2].
    explicit PolarizationConfig(std::vector<int> q);

    static PolarizationConfig all() { return PolarizationConfig({-2, -1, 0, 1, 2}); }

    const std::vector<int>& allowed_q() const noexcept { return q_; }
    bool allows(int q) const;

    friend bool operator==(const PolarizationConfig&, const PolarizationConfig&) = default;

private:
    std::vector<int> q_;  // sorted, unique
};

struct CombSettings {
    double f_rep = 80e6;        ///< repetition rate (Hz)
    double nu_AO = 0.0;         ///< relative offset of the two beams (Hz)
    double tau = 100e-15;       ///< pulse duration (s)
    double I_avg = 1e7;         ///< average intensity at the ion (W/m^2)
    double Delta = kTwoPi * 20e12;  ///< detuning from the excited state (rad/s)
    /// Carrier Rabi frequency used instead of the intensity formula (rad/s).
    std::optional<double> omega0_override;
    std::vector<PolarizationConfig> pol_schedule{PolarizationConfig({0}),
                                                 PolarizationConfig({-1, 1}),
                                                 PolarizationConfig({-2, 2})};

    void validate() const;
};

/// Comb index and branch of Delta_omega = M f_rep + sign * nu_AO.
struct CombAssignment {
    long M = 1;
    int sign = +1;
    double residual = 0.0;  ///< |Delta_omega - (M f_rep + sign nu_AO)| (Hz)

    friend bool operator==(const CombAssignment&, const CombAssignment&) = default;
};

/// An exact resonance on one branch together with the offset that realizes it.
struct BranchOffset {
    CombAssignment assignment;
    double nu_AO = 0.0;
};

struct BranchOffsets {
    BranchOffset plus;
    BranchOffset minus;
};

/// Offsets in [0, f_rep) that put a comb tooth pair exactly on `delta_omega`:
/// M = floor(dw / f_rep) for the + branch, ceil(dw / f_rep) for the - branch.
/// Throws PreconditionError when delta_omega <= f_rep.
BranchOffsets resonance_offset(double delta_omega, double f_rep);

/// Residual of the nearest comb assignment (M >= 1) on one branch.
CombAssignment branch_residual(double delta_omega, double f_rep, double nu_AO, int sign);

/// Best branch at the given offset if its residual is within `tol`. The offset
/// is reduced modulo f_rep first; ties go to the + branch.
std::optional<CombAssignment> is_resonant(double delta_omega, double f_rep, double nu_AO,
                                          double tol);
std::optional<CombAssignment> is_resonant(double delta_omega, const CombSettings& s, double tol);

/// Omega_0 = (I_avg / I_sat) gamma^2 / (2 |Delta|) in rad/s, or the override.
double carrier_rabi(const MolecularConstants& c, const CombSettings& s);

/// Pulse-bandwidth phase x = 2 pi * delta_omega * tau for a splitting in Hz.
/// The comb suppression formula is written for angular splittings; this is
/// the single place that conversion happens.
double comb_bandwidth_phase(double delta_omega_hz, double tau);

/// x / (2 sinh(x / 2)), with a series branch for |x| < 1e-4.
double comb_suppression(double x);

/// Time-averaged two-photon Rabi frequency Omega_0 * comb_suppression(x).
double comb_rabi(double omega0, double delta_omega_hz, double tau);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct MatchSolution {
    double f_rep = 0.0;
    double nu_AO = 0.0;
    std::vector<CombAssignment> assignments;  ///< one per input splitting, same order

    double worst_residual() const;
};

/// Repetition rates f = lo + k * step on `f_rep_range`; at each, every
/// per-splitting exact offset (both branches) inside `nu_range` is tried as the
/// shared offset. A candidate is kept when all splittings are resonant within
/// `tol`. Sorted by worst residual, then f_rep, then nu_AO.
std::vector<MatchSolution> match_multi(std::span<const double> splittings, Interval f_rep_range,
                                       Interval nu_range, double tol, double step);

/// c * tau: the largest path-length mismatch that still overlaps the pulses.
double pulse_overlap_budget(double tau);

}  // namespace qlc
