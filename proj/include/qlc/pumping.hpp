#pragma once

#include <cstdint>
#include <optional>

#include "qlc/molecule.hpp"
#include "qlc/population.hpp"
#include "qlc/report.hpp"
#include "qlc/rng.hpp"

namespace qlc {

enum class Branch { P, R };

struct PumpSettings {
    double spectral_density = 1e6;     ///< source dI/dlambda (W/m), 1 mW/nm
    double spot_diameter = 50e-6;      ///< m
    std::optional<double> filter_edge; ///< centre of the filter ramp (m); default set by pass side
    double filter_resolution = 0.2e-9; ///< width of the filter ramp (m)
    double scatter_rate = 1e5;         ///< photons/s at full transmission
    double duration = 1e-3;            ///< s
    std::optional<double> snapshot_interval;  ///< default duration / 100
    Branch pass = Branch::P;           ///< branch the filter transmits
    double vib_loss = 0.0;             ///< fraction of scatterings leaving v = 0
    std::optional<double> B_upper;     ///< excited-state B (Hz); default B_X
    std::optional<double> nu_00;       ///< band origin (Hz); default c / lambda_e

    void validate() const;
};

struct BranchLines {
    std::optional<double> P;  ///< J -> J-1 absorption wavelength (m); none for J = 0
    double R = 0.0;           ///< J -> J+1 absorption wavelength (m)
};

/// Absorption wavelengths of the P and R lines out of J:
///   nu_P = nu_00 + E_B(J-1) - E_X(J),  nu_R = nu_00 + E_B(J+1) - E_X(J).
/// The excited state uses B_upper with the ground state's D and sign.
BranchLines branch_wavelengths(int J, const MolecularConstants& c, const PumpSettings& s);

/// Linear transmission ramp of width `resolution` centred on `edge`; equal to
/// one on the side of the passed branch.
struct SpectralFilter {
    double edge = 0.0;
    double resolution = 0.2e-9;
    Branch pass = Branch::P;

    double transmission(double wavelength) const;
};

/// Filter for the settings: the explicit edge if given, otherwise a ramp that
/// starts at the band origin and opens toward the passed branch, so the other
/// branch sees zero transmission.
SpectralFilter make_filter(const MolecularConstants& c, const PumpSettings& s);

/// scatter_rate times the filter transmission at the P(J) line; 0 for J = 0.
double excitation_rate(int J, const PumpSettings& s, const SpectralFilter& f,
                       const MolecularConstants& c);

/// Rate of R(J) excitations through the same filter.
double r_excitation_rate(int J, const PumpSettings& s, const SpectralFilter& f,
                         const MolecularConstants& c);

/// Probability that an excited level J' decays to J' - 1; the rest goes to
/// J' + 1 (Honl-London, Sigma-Sigma).
double decay_down_fraction(int J_excited);

/// Fraction of unlost mass at J < J_limit.
double unlost_fraction_below(const PopulationState& p, int J_limit);

/// Smallest number of J levels that together hold `coverage` of unlost mass.
int populated_j_count(const PopulationState& p, double coverage = 0.99);

/// First snapshot at which unlost_fraction_below(J_limit) >= fraction.
std::optional<double> time_to_compression(const CoolingReport& r, int J_limit, double fraction);

/// Rate-equation expectation of the pump jump process, solved exactly between
/// snapshots by uniformization.
CoolingReport run_pumping(const PopulationState& p0, const MolecularConstants& c,
                          const PumpSettings& s);

/// Gillespie simulation of n_traj molecules; trajectory i draws from
/// Rng(seed, "pumping", i).
CoolingReport run_pumping_monte_carlo(const PopulationState& p0, const MolecularConstants& c,
                                      const PumpSettings& s, long n_traj, std::uint64_t seed,
                                      unsigned threads = 0);

}  // namespace qlc
