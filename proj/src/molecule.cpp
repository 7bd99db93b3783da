#include "qlc/molecule.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qlc/constants.hpp"
#include "qlc/errors.hpp"

namespace qlc {

namespace {

std::int64_t rigid_factor(std::int64_t J) { return J * (J + 1); }
std::int64_t distortion_factor(std::int64_t J) { return J * J * (J + 1) * (J + 1); }

void require_nonnegative_j(int J, const char* what) {
    if (J < 0) throw PreconditionError(std::string(what) + ": negative J " + std::to_string(J));
}

// log of the unnormalized Boltzmann weight of level J
double log_weight(int J, double beta_h, const MolecularConstants& c) {
    return std::log(2.0 * J + 1.0) - beta_h * rot_energy(J, c);
}

}  // namespace

void MolecularConstants::validate() const {
    if (!(B > 0.0)) throw PreconditionError("B must be positive");
    if (!(D >= 0.0)) throw PreconditionError("D must be non-negative");
    if (d_sign != 1 && d_sign != -1) throw PreconditionError("d_sign must be +1 or -1");
    if (!(D / B < 1e-2)) throw PreconditionError("D/B must be below 1e-2");
    if (!(lambda_e > 0.0)) throw PreconditionError("lambda_e must be positive");
    if (!(gamma > 0.0)) throw PreconditionError("gamma must be positive");
    if (!(I_sat > 0.0)) throw PreconditionError("I_sat must be positive");
}

double rot_energy(int J, const MolecularConstants& c) {
    require_nonnegative_j(J, "rot_energy");
    return c.B * static_cast<double>(rigid_factor(J)) +
           c.d_sign * c.D * static_cast<double>(distortion_factor(J));
}

double raman_splitting(int J_lower, const MolecularConstants& c) {
    require_nonnegative_j(J_lower, "raman_splitting");
    const std::int64_t J = J_lower;
    const auto d_rigid = rigid_factor(J + 2) - rigid_factor(J);
    const auto d_dist = distortion_factor(J + 2) - distortion_factor(J);
    return c.B * static_cast<double>(d_rigid) + c.d_sign * c.D * static_cast<double>(d_dist);
}

double raman_splitting_expansion(int J_lower, const MolecularConstants& c) {
    require_nonnegative_j(J_lower, "raman_splitting_expansion");
    const double J = J_lower;
    return 2.0 * c.B * (3.0 + 2.0 * J) *
           (1.0 + c.d_sign * 2.0 * c.D / c.B * (3.0 + 3.0 * J + J * J));
}

PopulationState boltzmann_distribution(double temperature, int J_max, const MolecularConstants& c,
                                       double truncation_tol) {
    if (!(temperature >= 0.0)) throw PreconditionError("temperature must be non-negative");
    if (J_max < 0) throw PreconditionError("J_max must be non-negative");
    if (temperature == 0.0) return PopulationState::delta(0);

    const double beta_h = kPlanck / (kBoltzmann * temperature);

    // Work relative to the largest log-weight to avoid underflow.
    const int J_ext = 2 * J_max + 1;
    std::vector<double> logw(static_cast<std::size_t>(J_ext + 1));
    double top = -INFINITY;
    for (int J = 0; J <= J_ext; ++J) {
        logw[static_cast<std::size_t>(J)] = log_weight(J, beta_h, c);
        top = std::max(top, logw[static_cast<std::size_t>(J)]);
    }
    double kept = 0.0;
    double extended = 0.0;
    std::vector<double> w(static_cast<std::size_t>(J_max + 1));
    for (int J = 0; J <= J_ext; ++J) {
        const double x = std::exp(logw[static_cast<std::size_t>(J)] - top);
        extended += x;
        if (J <= J_max) {
            w[static_cast<std::size_t>(J)] = x;
            kept += x;
        }
    }
    if (1.0 - kept / extended > truncation_tol)
        throw PreconditionError("J_max=" + std::to_string(J_max) +
                                " truncates more than the allowed thermal mass");

    PopulationState p;
    p.reserve_j(J_max);
    for (int J = 0; J <= J_max; ++J) p.add_uniform_m(J, 0, w[static_cast<std::size_t>(J)] / kept);
    return p;
}

double cumulative_fraction(const PopulationState& p, int J_cut) {
    double below = 0.0;
    for (int J = 0; J <= std::min(J_cut, p.j_max()); ++J) below += p.j_mass(J);
    return below;
}

}  // namespace qlc
