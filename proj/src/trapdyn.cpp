#include "qlc/trapdyn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "qlc/errors.hpp"

namespace qlc {

void TrapSettings::validate() const {
    if (!(omega_t > 0.0)) throw PreconditionError("omega_t must be positive");
    if (!(mass_eff > 0.0)) throw PreconditionError("mass_eff must be positive");
    if (!(k_eff > 0.0)) throw PreconditionError("k_eff must be positive");
    if (eta_override && !(*eta_override > 0.0 && *eta_override < 1.0))
        throw PreconditionError("eta must lie in (0, 1)");
    if (!(cool_efficiency >= 0.0 && cool_efficiency <= 1.0))
        throw PreconditionError("cool_efficiency must lie in [0, 1]");
    if (!(readout_fidelity >= 0.5 && readout_fidelity <= 1.0))
        throw PreconditionError("readout_fidelity must lie in [0.5, 1]");
    if (cool_duration && !(*cool_duration > 0.0))
        throw PreconditionError("cool_duration must be positive");
}

double lamb_dicke(const TrapSettings& t) {
    if (t.eta_override) return *t.eta_override;
    return t.k_eff * std::sqrt(kHbar / (2.0 * t.mass_eff * t.omega_t));
}

double sideband_rabi(double eta, double omega) {
    if (!(eta > 0.0 && eta < 1.0)) throw PreconditionError("sideband_rabi: eta must lie in (0, 1)");
    return eta * omega;
}

double pi_time(double omega_s) {
    if (!(omega_s > 0.0)) throw PreconditionError("pi_time: sideband Rabi rate must be positive");
    return std::numbers::pi / omega_s;
}

double sideband_flop_probability(double omega_s, double t, double detuning_residual) {
    if (!(t >= 0.0)) throw PreconditionError("sideband_flop_probability: negative time");
    const double det = to_angular(detuning_residual);
    if (det == 0.0) {
        const double s = std::sin(0.5 * omega_s * t);
        return s * s;
    }
    const double w2 = omega_s * omega_s + det * det;
    const double s = std::sin(0.5 * std::sqrt(w2) * t);
    return std::clamp(omega_s * omega_s / w2 * s * s, 0.0, 1.0);
}

MotionalState sideband_cool(MotionalState state, const TrapSettings& t, Rng& rng) {
    if (state.n < 0 || state.n > 1)
        throw PreconditionError("sideband_cool: phonon number outside {0, 1}");
    if (state.n == 1 && rng.uniform() < t.cool_efficiency) state.n = 0;
    return state;
}

namespace {

std::vector<RotLevel> sorted_target(std::span<const RotLevel> target) {
    std::vector<RotLevel> v(target.begin(), target.end());
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

double target_mass(const PopulationState& p, const std::vector<RotLevel>& target) {
    double in = 0.0;
    for (const auto& l : target) in += p.get(l.J, l.m, 0) + p.get(l.J, l.m, 1);
    return in;
}

}  // namespace

double detection_click_probability(const PopulationState& p, std::span<const RotLevel> target,
                                   double readout_fidelity) {
    const double in = target_mass(p, sorted_target(target));
    const double out = p.total() - in;
    return readout_fidelity * in + (1.0 - readout_fidelity) * out;
}

PopulationState detection_posterior(const PopulationState& p, std::span<const RotLevel> target,
                                    double readout_fidelity, bool outcome) {
    const auto tgt = sorted_target(target);
    const double like_in = outcome ? readout_fidelity : 1.0 - readout_fidelity;
    const double like_out = 1.0 - like_in;

    PopulationState post;
    post.reserve_j(p.j_max());
    p.for_each([&](const Level& l, double w) {
        const bool in = std::binary_search(tgt.begin(), tgt.end(), RotLevel{l.J, l.m});
        post.add(l.J, l.m, l.n, w * (in ? like_in : like_out));
    });
    post.set_lost(p.lost() * like_out);
    const double z = post.total();
    if (!(z > 0.0)) throw PreconditionError("detection_posterior: outcome has zero probability");
    post.scale(1.0 / z);
    return post;
}

DetectionShot quantum_logic_detect(const PopulationState& p, std::span<const RotLevel> target,
                                   const TrapSettings& t, Rng& rng) {
    if (p.phonon_mass(1) != 0.0)
        throw PreconditionError("quantum_logic_detect: motion must start in n = 0");
    const double click = detection_click_probability(p, target, t.readout_fidelity);
    DetectionShot shot;
    shot.outcome = rng.uniform() < click;
    shot.posterior = detection_posterior(p, target, t.readout_fidelity, shot.outcome);
    return shot;
}

}  // namespace qlc
