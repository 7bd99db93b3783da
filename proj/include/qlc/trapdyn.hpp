#pragma once

#include <optional>
#include <span>

#include "qlc/constants.hpp"
#include "qlc/population.hpp"
#include "qlc/rng.hpp"

namespace qlc {

struct TrapSettings {
    double omega_t = kTwoPi * 10e6;                ///< common-mode frequency (rad/s)
    double mass_eff = 44.0 * kAtomicMassUnit;       ///< mass entering eta (kg)
    double k_eff = 2.0 * kTwoPi / 383e-9;           ///< wave-vector difference (1/m)
    std::optional<double> eta_override;             ///< Lamb-Dicke parameter override
    double cool_efficiency = 1.0;                   ///< P(phonon removed) per cooling step
    double readout_fidelity = 1.0;                  ///< P(phonon readout correct)
    std::optional<double> cool_duration;            ///< defaults to the sideband pi time

    void validate() const;
};

/// Phonon number of the addressed common mode, restricted to {0, 1}.
struct MotionalState {
    int n = 0;
};

/// eta = k sqrt(hbar / (2 m omega_t)), or the override when set.
double lamb_dicke(const TrapSettings& t);

/// Omega_s = eta * Omega. Requires 0 < eta < 1.
double sideband_rabi(double eta, double omega);

/// pi / Omega_s.
double pi_time(double omega_s);

/// Population transferred on |m1, 0> <-> |m2, 1> after time t, detuned by
/// `detuning_residual` (Hz):
///   P = Omega_s^2 / W^2 sin^2(W t / 2),  W = sqrt(Omega_s^2 + (2 pi delta)^2).
double sideband_flop_probability(double omega_s, double t, double detuning_residual);

/// Bernoulli phonon removal via the atomic ion. Draws from `rng` only when n = 1.
MotionalState sideband_cool(MotionalState state, const TrapSettings& t, Rng& rng);

struct DetectionShot {
    bool outcome = false;
    PopulationState posterior;
};

/// Probability that a single shot reports a phonon.
double detection_click_probability(const PopulationState& p, std::span<const RotLevel> target,
                                   double readout_fidelity);

/// Bayes update of `p` on a reported bit: in-target levels are weighted by
/// P(bit | phonon), the rest (and the lost bucket) by P(bit | no phonon).
PopulationState detection_posterior(const PopulationState& p, std::span<const RotLevel> target,
                                    double readout_fidelity, bool outcome);

/// One quantum-logic detection shot: map `target` onto a phonon, read it out
/// through the atomic ion with symmetric error 1 - readout_fidelity, return the
/// reported bit and the posterior. Throws PreconditionError if p holds n = 1 mass.
DetectionShot quantum_logic_detect(const PopulationState& p, std::span<const RotLevel> target,
                                   const TrapSettings& t, Rng& rng);

}  // namespace qlc
