#include "qlc/comb.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qlc/constants.hpp"
#include "qlc/errors.hpp"

namespace qlc {

PolarizationConfig::PolarizationConfig(std::vector<int> q) : q_(std::move(q)) {
    std::sort(q_.begin(), q_.end());
    q_.erase(std::unique(q_.begin(), q_.end()), q_.end());
    if (q_.empty()) throw PreconditionError("polarization config must allow at least one q");
    if (q_.front() < -2 || q_.back() > 2)
        throw PreconditionError("polarization q must lie in [-2, 2]");
}

bool PolarizationConfig::allows(int q) const {
    return std::binary_search(q_.begin(), q_.end(), q);
}

void CombSettings::validate() const {
    if (!(f_rep > 0.0)) throw PreconditionError("f_rep must be positive");
    if (!(nu_AO >= 0.0 && nu_AO < f_rep)) throw PreconditionError("nu_AO must lie in [0, f_rep)");
    if (!(tau > 0.0)) throw PreconditionError("tau must be positive");
    if (!(I_avg >= 0.0)) throw PreconditionError("I_avg must be non-negative");
    if (Delta == 0.0 || !std::isfinite(Delta)) throw PreconditionError("Delta must be nonzero");
    if (omega0_override && !(*omega0_override >= 0.0))
        throw PreconditionError("omega0 override must be non-negative");
    for (const auto& p : pol_schedule)
        if (p.allowed_q().empty()) throw PreconditionError("pol_schedule has an empty config");
}

BranchOffsets resonance_offset(double delta_omega, double f_rep) {
    if (!(f_rep > 0.0)) throw PreconditionError("resonance_offset: f_rep must be positive");
    if (!(delta_omega > f_rep))
        throw PreconditionError("resonance_offset: splitting must exceed f_rep (comb index >= 1)");

    long M_lo = static_cast<long>(std::floor(delta_omega / f_rep));
    double nu = std::fma(-static_cast<double>(M_lo), f_rep, delta_omega);
    // The quotient can round across an integer; step back into [0, f_rep).
    if (nu < 0.0) {
        --M_lo;
        nu = std::fma(-static_cast<double>(M_lo), f_rep, delta_omega);
    } else if (nu >= f_rep) {
        ++M_lo;
        nu = std::fma(-static_cast<double>(M_lo), f_rep, delta_omega);
    }

    BranchOffsets out;
    out.plus = {{M_lo, +1, 0.0}, nu};
    if (nu == 0.0) {
        out.minus = {{M_lo, -1, 0.0}, 0.0};
    } else {
        const long M_hi = M_lo + 1;
        out.minus = {{M_hi, -1, 0.0}, std::fma(static_cast<double>(M_hi), f_rep, -delta_omega)};
    }
    return out;
}

CombAssignment branch_residual(double delta_omega, double f_rep, double nu_AO, int sign) {
    const double target = delta_omega - sign * nu_AO;  // = M f_rep on resonance
    const long M = std::max(1L, std::lround(target / f_rep));
    return {M, sign, std::abs(std::fma(-static_cast<double>(M), f_rep, target))};
}

std::optional<CombAssignment> is_resonant(double delta_omega, double f_rep, double nu_AO,
                                          double tol) {
    if (!(tol >= 0.0)) throw PreconditionError("is_resonant: tolerance must be non-negative");
    if (!(f_rep > 0.0)) throw PreconditionError("is_resonant: f_rep must be positive");
    double nu = std::fmod(nu_AO, f_rep);
    if (nu < 0.0) nu += f_rep;

    const CombAssignment plus = branch_residual(delta_omega, f_rep, nu, +1);
    const CombAssignment minus = branch_residual(delta_omega, f_rep, nu, -1);
    const CombAssignment& best = plus.residual <= minus.residual ? plus : minus;
    if (best.residual <= tol) return best;
    return std::nullopt;
}

std::optional<CombAssignment> is_resonant(double delta_omega, const CombSettings& s, double tol) {
    return is_resonant(delta_omega, s.f_rep, s.nu_AO, tol);
}

double carrier_rabi(const MolecularConstants& c, const CombSettings& s) {
    if (s.omega0_override) return *s.omega0_override;
    if (!(c.I_sat > 0.0)) throw PreconditionError("carrier_rabi: I_sat must be positive");
    if (s.Delta == 0.0) throw PreconditionError("carrier_rabi: Delta must be nonzero");
    const double saturation = s.I_avg / c.I_sat;
    return saturation * c.gamma * c.gamma / (2.0 * std::abs(s.Delta));
}

double comb_bandwidth_phase(double delta_omega_hz, double tau) {
    return kTwoPi * delta_omega_hz * tau;
}

double comb_suppression(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 24.0 + 7.0 * x2 * x2 / 5760.0;
    }
    const double half = 0.5 * std::abs(x);
    // Past ~1400 sinh overflows; the factor is zero to double precision there.
    if (half > 700.0) return 0.0;
    return std::abs(x) / (2.0 * std::sinh(half));
}

double comb_rabi(double omega0, double delta_omega_hz, double tau) {
    if (!(tau > 0.0)) throw PreconditionError("comb_rabi: tau must be positive");
    return omega0 * comb_suppression(comb_bandwidth_phase(delta_omega_hz, tau));
}

double MatchSolution::worst_residual() const {
    double w = 0.0;
    for (const auto& a : assignments) w = std::max(w, a.residual);
    return w;
}

std::vector<MatchSolution> match_multi(std::span<const double> splittings, Interval f_rep_range,
                                       Interval nu_range, double tol, double step) {
    if (splittings.empty()) throw PreconditionError("match_multi: no splittings given");
    if (!(f_rep_range.hi > f_rep_range.lo) || !(f_rep_range.lo > 0.0))
        throw PreconditionError("match_multi: degenerate f_rep range");
    if (!(nu_range.hi > nu_range.lo)) throw PreconditionError("match_multi: degenerate nu range");
    if (!(step > 0.0)) throw PreconditionError("match_multi: step must be positive");
    if (!(tol >= 0.0)) throw PreconditionError("match_multi: tolerance must be non-negative");
    for (double s : splittings)
        if (!(s > f_rep_range.hi))
            throw PreconditionError("match_multi: every splitting must exceed the f_rep range");

    const auto n_steps =
        static_cast<long>(std::floor((f_rep_range.hi - f_rep_range.lo) / step * (1.0 + 1e-12)));

    std::vector<MatchSolution> out;
    std::vector<double> candidates;
    for (long k = 0; k <= n_steps; ++k) {
        const double f = f_rep_range.lo + static_cast<double>(k) * step;
        candidates.clear();
        for (double s : splittings) {
            const auto offs = resonance_offset(s, f);
            candidates.push_back(offs.plus.nu_AO);
            candidates.push_back(offs.minus.nu_AO);
        }
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

        for (double nu : candidates) {
            if (nu < nu_range.lo || nu > nu_range.hi) continue;
            MatchSolution sol{f, nu, {}};
            bool ok = true;
            for (double s : splittings) {
                auto a = is_resonant(s, f, nu, tol);
                if (!a) {
                    ok = false;
                    break;
                }
                sol.assignments.push_back(*a);
            }
            if (ok) out.push_back(std::move(sol));
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const MatchSolution& a, const MatchSolution& b) {
        const double wa = a.worst_residual(), wb = b.worst_residual();
        if (wa != wb) return wa < wb;
        if (a.f_rep != b.f_rep) return a.f_rep < b.f_rep;
        return a.nu_AO < b.nu_AO;
    });
    return out;
}

double pulse_overlap_budget(double tau) {
    if (!(tau >= 0.0)) throw PreconditionError("pulse_overlap_budget: tau must be non-negative");
    return kSpeedOfLight * tau;
}

}  // namespace qlc
