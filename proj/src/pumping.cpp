#include "qlc/pumping.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "ensemble.hpp"
#include "qlc/constants.hpp"
#include "qlc/errors.hpp"
#include "qlc/parallel.hpp"

namespace qlc {

void PumpSettings::validate() const {
    if (!(spectral_density > 0.0)) throw PreconditionError("spectral_density must be positive");
    if (!(spot_diameter > 0.0)) throw PreconditionError("spot_diameter must be positive");
    if (filter_edge && !(*filter_edge > 0.0)) throw PreconditionError("filter_edge must be positive");
    if (!(filter_resolution > 0.0)) throw PreconditionError("filter_resolution must be positive");
    if (!(scatter_rate > 0.0)) throw PreconditionError("scatter_rate must be positive");
    if (!(duration > 0.0)) throw PreconditionError("duration must be positive");
    if (snapshot_interval && !(*snapshot_interval > 0.0))
        throw PreconditionError("snapshot_interval must be positive");
    if (!(vib_loss >= 0.0 && vib_loss <= 1.0)) throw PreconditionError("vib_loss must lie in [0, 1]");
    if (B_upper && !(*B_upper > 0.0)) throw PreconditionError("B_upper must be positive");
    if (nu_00 && !(*nu_00 > 0.0)) throw PreconditionError("nu_00 must be positive");
}

namespace {

double band_origin(const MolecularConstants& c, const PumpSettings& s) {
    return s.nu_00 ? *s.nu_00 : kSpeedOfLight / c.lambda_e;
}

MolecularConstants upper_state(const MolecularConstants& c, const PumpSettings& s) {
    MolecularConstants u = c;
    if (s.B_upper) u.B = *s.B_upper;
    return u;
}

}  // namespace

BranchLines branch_wavelengths(int J, const MolecularConstants& c, const PumpSettings& s) {
    if (J < 0) throw PreconditionError("branch_wavelengths: negative J");
    const double nu00 = band_origin(c, s);
    const MolecularConstants up = upper_state(c, s);
    const double lower = rot_energy(J, c);
    BranchLines out;
    if (J >= 1) out.P = kSpeedOfLight / (nu00 + rot_energy(J - 1, up) - lower);
    out.R = kSpeedOfLight / (nu00 + rot_energy(J + 1, up) - lower);
    return out;
}

double SpectralFilter::transmission(double wavelength) const {
    // Fraction of the ramp crossed going toward longer wavelength.
    const double x = std::clamp((wavelength - (edge - 0.5 * resolution)) / resolution, 0.0, 1.0);
    return pass == Branch::P ? x : 1.0 - x;
}

SpectralFilter make_filter(const MolecularConstants& c, const PumpSettings& s) {
    SpectralFilter f;
    f.resolution = s.filter_resolution;
    f.pass = s.pass;
    if (s.filter_edge) {
        f.edge = *s.filter_edge;
    } else {
        // P lines sit to the red of the band origin, R lines to the blue.
        const double origin = kSpeedOfLight / band_origin(c, s);
        f.edge = s.pass == Branch::P ? origin + 0.5 * s.filter_resolution
                                     : origin - 0.5 * s.filter_resolution;
    }
    return f;
}

double excitation_rate(int J, const PumpSettings& s, const SpectralFilter& f,
                       const MolecularConstants& c) {
    const auto lines = branch_wavelengths(J, c, s);
    if (!lines.P) return 0.0;
    return s.scatter_rate * f.transmission(*lines.P);
}

double r_excitation_rate(int J, const PumpSettings& s, const SpectralFilter& f,
                         const MolecularConstants& c) {
    return s.scatter_rate * f.transmission(branch_wavelengths(J, c, s).R);
}

double decay_down_fraction(int J_excited) {
    if (J_excited < 0) throw PreconditionError("decay_down_fraction: negative J");
    return static_cast<double>(J_excited) / static_cast<double>(2 * J_excited + 1);
}

double unlost_fraction_below(const PopulationState& p, int J_limit) {
    const double all = p.level_mass();
    if (!(all > 0.0)) return 0.0;
    double below = 0.0;
    for (int J = 0; J < J_limit && J <= p.j_max(); ++J) below += p.j_mass(J);
    return std::min(1.0, below / all);
}

int populated_j_count(const PopulationState& p, double coverage) {
    auto h = p.j_histogram();
    const double all = std::accumulate(h.begin(), h.end(), 0.0);
    if (!(all > 0.0)) return 0;
    std::sort(h.begin(), h.end(), std::greater<>());
    double acc = 0.0;
    int count = 0;
    for (double w : h) {
        acc += w;
        ++count;
        if (acc >= coverage * all) break;
    }
    return count;
}

std::optional<double> time_to_compression(const CoolingReport& r, int J_limit, double fraction) {
    for (const auto& s : r.trajectory)
        if (unlost_fraction_below(s.state, J_limit) >= fraction) return s.time;
    return std::nullopt;
}

namespace {

std::vector<double> snapshot_times(const PumpSettings& s) {
    const double dt = s.snapshot_interval ? *s.snapshot_interval : s.duration / 100.0;
    const auto k_max = static_cast<long>(std::ceil(s.duration / dt - 1e-9));
    std::vector<double> t;
    for (long k = 0; k <= k_max; ++k) t.push_back(std::min(static_cast<double>(k) * dt, s.duration));
    return t;
}

// Lazily extended per-J excitation rates.
class RateTable {
public:
    RateTable(const MolecularConstants& c, const PumpSettings& s)
        : c_(c), s_(s), filter_(make_filter(c, s)) {}

    double p(int J) { return fill(J), p_[static_cast<std::size_t>(J)]; }
    double r(int J) { return fill(J), r_[static_cast<std::size_t>(J)]; }
    double total(int J) { return p(J) + r(J); }

private:
    void fill(int J) {
        while (static_cast<int>(p_.size()) <= J) {
            const int j = static_cast<int>(p_.size());
            p_.push_back(excitation_rate(j, s_, filter_, c_));
            r_.push_back(r_excitation_rate(j, s_, filter_, c_));
        }
    }

    const MolecularConstants& c_;
    const PumpSettings& s_;
    SpectralFilter filter_;
    std::vector<double> p_, r_;
};

// Mass vector over J for one phonon number, plus its lost bucket.
struct Chain {
    std::vector<double> x;
    double lost = 0.0;
};

void grow(std::vector<double>& v, int J) {
    if (static_cast<int>(v.size()) <= J) v.resize(static_cast<std::size_t>(J + 1), 0.0);
}

// One step of the uniformized chain: y -> y P with P = I + Q / lambda.
// Returns the fraction of mass that made a real jump.
double uniformized_step(const Chain& in, Chain& out, RateTable& rates, double lambda,
                        double vib_loss) {
    out.x.assign(in.x.size(), 0.0);
    out.lost = in.lost;
    double jumped = 0.0;
    auto deposit = [&](int J_excited, double a) {
        out.lost += vib_loss * a;
        const double keep = (1.0 - vib_loss) * a;
        const double down = decay_down_fraction(J_excited);
        if (down > 0.0) out.x[static_cast<std::size_t>(J_excited - 1)] += keep * down;
        grow(out.x, J_excited + 1);
        out.x[static_cast<std::size_t>(J_excited + 1)] += keep * (1.0 - down);
    };
    for (int J = 0; J < static_cast<int>(in.x.size()); ++J) {
        const double y = in.x[static_cast<std::size_t>(J)];
        if (y == 0.0) continue;
        const double a_p = y * rates.p(J) / lambda;
        const double a_r = y * rates.r(J) / lambda;
        out.x[static_cast<std::size_t>(J)] += y - a_p - a_r;
        if (a_p > 0.0) deposit(J - 1, a_p);
        if (a_r > 0.0) deposit(J + 1, a_r);
        jumped += a_p + a_r;
    }
    return jumped;
}

// Propagates `c` over time dt; returns the expected number of real jumps.
double propagate(Chain& c, double dt, RateTable& rates, double lambda, double vib_loss) {
    const double mean = lambda * dt;
    // Keep Poisson weights well above underflow.
    if (mean > 50.0) {
        const int parts = static_cast<int>(std::ceil(mean / 50.0));
        double events = 0.0;
        for (int i = 0; i < parts; ++i) events += propagate(c, dt / parts, rates, lambda, vib_loss);
        return events;
    }
    Chain acc{std::vector<double>(c.x.size(), 0.0), 0.0};
    Chain cur = c, next;
    double weight = std::exp(-mean);
    double cdf = 0.0;
    double events = 0.0;
    for (int k = 0;; ++k) {
        grow(acc.x, static_cast<int>(cur.x.size()) - 1);
        for (std::size_t J = 0; J < cur.x.size(); ++J) acc.x[J] += weight * cur.x[J];
        acc.lost += weight * cur.lost;
        cdf += weight;
        if (k > mean && 1.0 - cdf < 1e-15) break;
        // Real jumps at step k are counted when more than k Poisson events occur.
        const double jumped = uniformized_step(cur, next, rates, lambda, vib_loss);
        events += jumped * std::max(0.0, 1.0 - cdf);
        std::swap(cur, next);
        weight *= mean / (k + 1);
    }
    // Renormalize the truncated Poisson sum.
    const double norm = cdf;
    for (double& v : acc.x) v /= norm;
    acc.lost /= norm;
    c = std::move(acc);
    return events;
}

// Reassembles the m-resolved state: mass that never scattered keeps its
// initial m profile and decays at rate total(J); everything else is uniform in m.
PopulationState assemble(const PopulationState& p0, const Chain (&chains)[2], double t,
                         RateTable& rates) {
    PopulationState out;
    int top = -1;
    for (const auto& ch : chains) top = std::max(top, static_cast<int>(ch.x.size()) - 1);
    for (int J = top; J >= 0; --J) {
        bool any = false;
        for (const auto& ch : chains)
            if (J < static_cast<int>(ch.x.size()) && ch.x[static_cast<std::size_t>(J)] != 0.0) any = true;
        if (any || p0.j_mass(J) != 0.0) {
            top = J;
            break;
        }
    }
    out.reserve_j(top);
    for (int n = 0; n < 2; ++n) {
        for (int J = 0; J <= top; ++J) {
            const auto& x = chains[n].x;
            const double total = J < static_cast<int>(x.size()) ? x[static_cast<std::size_t>(J)] : 0.0;
            const double survive = std::exp(-rates.total(J) * t);
            double unscattered = 0.0;
            for (int m = -J; m <= J; ++m) {
                const double u = p0.get(J, m, n) * survive;
                unscattered += u;
                if (u != 0.0) out.add(J, m, n, u);
            }
            const double scattered = std::max(0.0, total - unscattered);
            if (scattered > 0.0) out.add_uniform_m(J, n, scattered);
        }
    }
    out.set_lost(p0.lost() + chains[0].lost + chains[1].lost);
    return out;
}

}  // namespace

CoolingReport run_pumping(const PopulationState& p0, const MolecularConstants& c,
                          const PumpSettings& s) {
    p0.check_valid();
    s.validate();
    RateTable rates(c, s);
    const double lambda = 2.0 * s.scatter_rate;

    Chain chains[2];
    for (int n = 0; n < 2; ++n) {
        chains[n].x.assign(static_cast<std::size_t>(std::max(0, p0.j_max()) + 1), 0.0);
        for (int J = 0; J <= p0.j_max(); ++J)
            for (int m = -J; m <= J; ++m) chains[n].x[static_cast<std::size_t>(J)] += p0.get(J, m, n);
    }

    CoolingReport report;
    const auto times = snapshot_times(s);
    double t_prev = 0.0;
    for (double t : times) {
        if (t > t_prev) {
            double events = 0.0;
            for (auto& ch : chains) events += propagate(ch, t - t_prev, rates, lambda, s.vib_loss);
            report.scatter_events += events;
            report.events.push_back({t, EventKind::pump, std::to_string(events)});
        }
        report.trajectory.push_back({t, assemble(p0, chains, t, rates), 0.0, 0.0});
        t_prev = t;
    }
    report.wall_time_simulated = s.duration;
    report.ground_fraction_final = ground_fraction(report.trajectory.back().state);
    return report;
}

CoolingReport run_pumping_monte_carlo(const PopulationState& p0, const MolecularConstants& c,
                                      const PumpSettings& s, long n_traj, std::uint64_t seed,
                                      unsigned threads) {
    if (n_traj < 1) throw PreconditionError("n_traj must be at least 1");
    p0.check_valid();
    s.validate();
    const auto times = snapshot_times(s);
    const auto N = static_cast<std::size_t>(n_traj);

    std::vector<std::vector<detail::Molecule>> at(times.size(), std::vector<detail::Molecule>(N));
    std::vector<std::vector<long>> jumps(times.size(), std::vector<long>(N, 0));

    parallel_for(N, threads, [&](std::size_t b, std::size_t e) {
        RateTable rates(c, s);
        for (std::size_t i = b; i < e; ++i) {
            Rng rng(seed, "pumping", i);
            detail::Molecule mol = detail::sample_level(p0, rng);
            auto next_jump = [&](double now) -> double {
                if (mol.lost) return INFINITY;
                const double r = rates.total(mol.J);
                return r > 0.0 ? now - std::log1p(-rng.uniform()) / r : INFINITY;
            };
            double t_jump = next_jump(0.0);
            for (std::size_t k = 0; k < times.size(); ++k) {
                while (t_jump <= times[k]) {
                    const double up_excite = rates.r(mol.J) / rates.total(mol.J);
                    const int J_exc = rng.uniform() < up_excite ? mol.J + 1 : mol.J - 1;
                    if (s.vib_loss > 0.0 && rng.uniform() < s.vib_loss) {
                        mol.lost = true;
                    } else {
                        mol.J = rng.uniform() < decay_down_fraction(J_exc) ? J_exc - 1 : J_exc + 1;
                        mol.m = detail::uniform_m(mol.J, rng);
                    }
                    ++jumps[k][i];
                    t_jump = next_jump(t_jump);
                }
                at[k][i] = mol;
            }
        }
    });

    CoolingReport report;
    report.n_traj = n_traj;
    for (std::size_t k = 0; k < times.size(); ++k) {
        PopulationState counts;
        double lost = 0.0;
        long events = 0;
        for (std::size_t i = 0; i < N; ++i) {
            const auto& mol = at[k][i];
            if (mol.lost) {
                lost += 1.0;
            } else {
                counts.add(mol.J, mol.m, mol.n, 1.0);
            }
            events += jumps[k][i];
        }
        counts.set_lost(lost);
        counts.scale(1.0 / static_cast<double>(N));
        if (k > 0) {
            report.scatter_events += static_cast<double>(events) / static_cast<double>(N);
            report.events.push_back({times[k], EventKind::pump, std::to_string(events)});
        }
        report.trajectory.push_back({times[k], counts, bernoulli_se(ground_fraction(counts), n_traj),
                                     bernoulli_se(counts.lost(), n_traj)});
    }
    report.wall_time_simulated = s.duration;
    report.ground_fraction_final = ground_fraction(report.trajectory.back().state);
    return report;
}

}  // namespace qlc
