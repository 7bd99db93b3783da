#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "qlc/comb.hpp"
#include "qlc/molecule.hpp"
#include "qlc/population.hpp"
#include "qlc/report.hpp"
#include "qlc/rng.hpp"

namespace qlc {

/// Fate of population that spontaneously scatters during a Raman pulse.
struct ScatterBranching {
    double f_vib = 0.5;  ///< fraction leaving the v = 0 manifold (goes to `lost`)
};

/// Relative strength of the q channel out of |J_upper, m>. Only the ratios
/// among allowed q matter; an empty function means uniform.
using CouplingWeights = std::function<double(int J_upper, int m, int q)>;

struct PulseSpec {
    int J_upper = 2;
    PolarizationConfig pol;
    double duration = 0.0;  ///< s
};

struct CoolingSchedule {
    std::vector<PulseSpec> pulses;  ///< one round
    bool cool_after_each = true;
    int max_rounds = 10;

    void validate() const;
};

/// Derived drive and dissipation rates shared by every pulse.
struct CoolingPhysics {
    MolecularConstants molecule;
    double omega0 = 0.0;  ///< carrier Rabi frequency (rad/s)
    double eta = 0.1;
    double tau = 100e-15;  ///< comb pulse duration (s)

    double f_rep = 80e6;
    /// When set, every pulse uses this offset and must be resonant within
    /// `resonance_tol`; otherwise the offset is retuned to each pulse's line.
    std::optional<double> fixed_nu_AO;
    double resonance_tol = 1e3;

    double scatter_rate = 0.0;  ///< R_s while the Raman beams are on (1/s)
    ScatterBranching branching;
    double cool_efficiency = 1.0;
    double cool_duration = 0.0;  ///< s
    CouplingWeights weights;

    /// Runs stop once ground_fraction reaches this; values above 1 disable it.
    double ground_target = 0.9;

    /// eta * comb_rabi(omega0, E(J_upper) - E(J_upper - 2), tau).
    double omega_s(int J_upper) const;

    /// Comb residual (Hz) on the J_upper -> J_upper - 2 line. Throws
    /// PreconditionError when no comb assignment is within resonance_tol.
    double pulse_residual(int J_upper) const;
};

/// R_s = 2 gamma Omega / |Delta|.
double spont_rate(double gamma, double omega, double delta);

/// Sublevels of J_upper with no q in any config reaching |m + q| <= J_upper - 2.
std::set<int> coupling_coverage(int J_upper, std::span<const PolarizationConfig> schedule);

/// Redistribution of population that scattered: f_vib of it is lost, the rest
/// goes to J +- 1 of its level with equal weight (J = 0 only to J = 1),
/// uniform over m, same n. Returns the contribution to add back.
PopulationState scatter_redistribute(const PopulationState& scattered,
                                     const ScatterBranching& branching);

/// Expected-value pulse: coherent transfer (J_upper, m, 0) -> (J_upper - 2, m + q, 1)
/// with the flop probability, then scattering of every level with probability
/// 1 - exp(-R_s duration).
PopulationState apply_pulse(const PopulationState& p, const PulseSpec& pulse,
                            const CoolingPhysics& physics);

/// Sampled pulse on a single molecule; `p` must be a point mass.
PopulationState apply_pulse(const PopulationState& p, const PulseSpec& pulse,
                            const CoolingPhysics& physics, Rng& rng);

/// Expected-value sideband cooling: n = 1 mass times cool_efficiency moves to n = 0.
PopulationState cool_motion(const PopulationState& p, double cool_efficiency);

/// Round-based schedule over J_upper = J_top .. 2 (descending), one pulse per
/// polarization config, each lasting the pi time of that line.
CoolingSchedule descending_schedule(int J_top, std::span<const PolarizationConfig> pols,
                                    const CoolingPhysics& physics, int max_rounds);

CoolingReport run_rate_equations(const PopulationState& p0, const CoolingSchedule& schedule,
                                 const CoolingPhysics& physics);

/// Lock-step ensemble of n_traj molecules. Trajectory i draws from
/// Rng(seed, "cooling", i); reductions run in index order, so the report is
/// identical for any thread count.
CoolingReport run_monte_carlo(const PopulationState& p0, const CoolingSchedule& schedule,
                              const CoolingPhysics& physics, long n_traj, std::uint64_t seed,
                              unsigned threads = 0);

}  // namespace qlc
