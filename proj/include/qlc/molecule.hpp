#pragma once

#include "qlc/population.hpp"

namespace qlc {

/// Spectroscopic constants of a 2-Sigma diatomic ion in its ground vibronic
/// state. Frequencies are E/h in Hz.
struct MolecularConstants {
    double B = 21.51e9;          ///< rotational constant (Hz)
    double D = 33.1e3;           ///< centrifugal distortion (Hz)
    int d_sign = +1;             ///< sign of the D J^2 (J+1)^2 term
    double lambda_e = 383e-9;    ///< electronic transition wavelength (m)
    double gamma = 1.0 / 70e-9;  ///< excited-state decay rate (1/s)
    double I_sat = 45.0;         ///< saturation intensity (W/m^2)

    /// Throws PreconditionError naming the first offending field.
    void validate() const;
};

/// Rotational energy E(J)/h = B J(J+1) + d_sign D J^2 (J+1)^2 in Hz.
double rot_energy(int J, const MolecularConstants& c);

/// E(J_lower + 2) - E(J_lower), the J -> J-2 Raman splitting.
///
/// The integer level factors J(J+1) and J^2(J+1)^2 are differenced exactly
/// before scaling, so no cancellation occurs at large J.
double raman_splitting(int J_lower, const MolecularConstants& c);

/// Closed-form expansion 2B(3+2J)(1 + 2 d_sign D/B (3+3J+J^2)) of the same
/// splitting. Algebraically identical to raman_splitting.
double raman_splitting_expansion(int J_lower, const MolecularConstants& c);

/// Thermal population over J = 0..J_max, weights (2J+1) exp(-h E(J) / kT),
/// uniform over m, all in n = 0. Throws PreconditionError when the mass
/// discarded by truncating at J_max (estimated against a sum to 2 J_max + 1)
/// exceeds `truncation_tol`.
PopulationState boltzmann_distribution(double temperature, int J_max, const MolecularConstants& c,
                                       double truncation_tol = 1e-9);

/// Probability at J <= J_cut, any m and n; the lost bucket is not counted.
double cumulative_fraction(const PopulationState& p, int J_cut);

}  // namespace qlc
