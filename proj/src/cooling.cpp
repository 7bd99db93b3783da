#include "qlc/cooling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ensemble.hpp"
#include "qlc/errors.hpp"
#include "qlc/parallel.hpp"
#include "qlc/trapdyn.hpp"

namespace qlc {

namespace {

using detail::Molecule;
using detail::sample_level;

struct Channel {
    int q;
    double weight;  // normalized over the allowed channels
};

// Allowed q out of |J, m> under `pol`, with normalized weights.
std::vector<Channel> channels(int J, int m, const PolarizationConfig& pol,
                              const CouplingWeights& weights) {
    std::vector<Channel> out;
    double sum = 0.0;
    for (int q : pol.allowed_q()) {
        if (std::abs(m + q) > J - 2) continue;
        const double w = weights ? weights(J, m, q) : 1.0;
        if (!(w >= 0.0)) throw PreconditionError("coupling weights must be non-negative");
        if (w == 0.0) continue;
        out.push_back({q, w});
        sum += w;
    }
    for (auto& c : out) c.weight /= sum;
    return out;
}

double scatter_probability(const CoolingPhysics& physics, double duration) {
    return -std::expm1(-physics.scatter_rate * duration);
}

std::string pulse_detail(const PulseSpec& pulse) {
    std::string s = "J=" + std::to_string(pulse.J_upper) + "->" + std::to_string(pulse.J_upper - 2) +
                    " q={";
    for (std::size_t i = 0; i < pulse.pol.allowed_q().size(); ++i) {
        if (i) s += ",";
        s += std::to_string(pulse.pol.allowed_q()[i]);
    }
    return s + "}";
}

void check_run_inputs(const PopulationState& p0, const CoolingSchedule& schedule,
                      const CoolingPhysics& physics) {
    p0.check_valid();
    if (p0.phonon_mass(1) != 0.0)
        throw PreconditionError("cooling runs must start with all population in n = 0");
    schedule.validate();
    for (const auto& pulse : schedule.pulses) (void)physics.pulse_residual(pulse.J_upper);
}

// Shared round/pulse/cool loop. `engine` supplies pulse(spec), cool() and
// snapshot(time); the loop owns timing, event logging and the stop rule.
template <class Engine>
CoolingReport drive(Engine& engine, const CoolingSchedule& schedule, const CoolingPhysics& physics) {
    CoolingReport report;
    double t = 0.0;
    report.trajectory.push_back(engine.snapshot(t));

    std::set<int> steps;
    for (const auto& pulse : schedule.pulses) steps.insert(pulse.J_upper);

    auto reached = [&] { return ground_fraction(report.trajectory.back().state) >= physics.ground_target; };
    auto cool = [&] {
        engine.cool();
        t += physics.cool_duration;
        report.events.push_back({t, EventKind::cool, "eff=" + std::to_string(physics.cool_efficiency)});
    };

    bool done = reached();
    for (int round = 0; round < schedule.max_rounds && !done; ++round) {
        for (const auto& pulse : schedule.pulses) {
            const double scattered = engine.pulse(pulse);
            t += pulse.duration;
            ++report.cycles_used;
            report.events.push_back({t, EventKind::pulse, pulse_detail(pulse)});
            if (scattered > 0.0) {
                report.scatter_events += scattered;
                report.events.push_back({t, EventKind::scatter, std::to_string(scattered)});
            }
            if (schedule.cool_after_each) cool();
            report.trajectory.push_back(engine.snapshot(t));
            if (reached()) {
                done = true;
                break;
            }
        }
        if (!schedule.cool_after_each && !done) {
            cool();
            report.trajectory.push_back(engine.snapshot(t));
            done = reached();
        }
    }
    report.wall_time_simulated = t;
    report.ground_fraction_final = ground_fraction(report.trajectory.back().state);
    report.cycles_per_step =
        steps.empty() ? 0.0 : static_cast<double>(report.cycles_used) / static_cast<double>(steps.size());
    return report;
}

class RateEngine {
public:
    RateEngine(PopulationState p, const CoolingPhysics& physics) : p_(std::move(p)), physics_(physics) {}

    // Returns the expected scattered mass.
    double pulse(const PulseSpec& pulse) {
        const double scattered = p_.level_mass() * scatter_probability(physics_, pulse.duration);
        p_ = apply_pulse(p_, pulse, physics_);
        return scattered;
    }
    void cool() { p_ = cool_motion(p_, physics_.cool_efficiency); }
    Snapshot snapshot(double t) const { return {t, p_, 0.0, 0.0}; }

private:
    PopulationState p_;
    const CoolingPhysics& physics_;
};

// Returns true when the molecule scattered.
bool scatter_one(Molecule& s, double p_scatter, const ScatterBranching& branching, Rng& rng) {
    if (s.lost || p_scatter <= 0.0) return false;
    if (!(rng.uniform() < p_scatter)) return false;
    if (rng.uniform() < branching.f_vib) {
        s.lost = true;
        return true;
    }
    if (s.J == 0) {
        s.J = 1;
    } else {
        s.J += rng.uniform() < 0.5 ? -1 : 1;
    }
    s.m = detail::uniform_m(s.J, rng);
    return true;
}

bool pulse_one(Molecule& s, const PulseSpec& pulse, double flop, double p_scatter,
               const CoolingPhysics& physics, Rng& rng) {
    if (!s.lost && s.J == pulse.J_upper && s.n == 0) {
        const auto ch = channels(s.J, s.m, pulse.pol, physics.weights);
        if (!ch.empty() && rng.uniform() < flop) {
            int q = ch.back().q;
            if (ch.size() > 1) {
                const double u = rng.uniform();
                double acc = 0.0;
                for (const auto& c : ch) {
                    acc += c.weight;
                    if (u < acc) {
                        q = c.q;
                        break;
                    }
                }
            }
            s.J -= 2;
            s.m += q;
            s.n = 1;
        }
    }
    return scatter_one(s, p_scatter, physics.branching, rng);
}

PopulationState to_state(const Molecule& s) {
    PopulationState p;
    if (s.lost) {
        p.set_lost(1.0);
    } else {
        p.set(s.J, s.m, s.n, 1.0);
    }
    return p;
}

Molecule from_point_mass(const PopulationState& p) {
    if (p.lost() == 1.0 && p.level_mass() == 0.0) return {0, 0, 0, true};
    Molecule s;
    int count = 0;
    p.for_each([&](const Level& l, double w) {
        ++count;
        if (w == 1.0) s = {l.J, l.m, l.n, false};
    });
    if (count != 1 || p.lost() != 0.0 || p.level_mass() != 1.0)
        throw PreconditionError("sampled pulse requires a single-molecule point mass");
    return s;
}

class EnsembleEngine {
public:
    EnsembleEngine(const PopulationState& p0, const CoolingPhysics& physics, long n_traj,
                   std::uint64_t seed, unsigned threads)
        : physics_(physics), threads_(threads) {
        mol_.resize(static_cast<std::size_t>(n_traj));
        rng_.reserve(static_cast<std::size_t>(n_traj));
        for (long i = 0; i < n_traj; ++i) rng_.emplace_back(seed, "cooling", static_cast<std::uint64_t>(i));
        for (std::size_t i = 0; i < mol_.size(); ++i) mol_[i] = sample_level(p0, rng_[i]);
        scattered_.assign(mol_.size(), 0);
    }

    double pulse(const PulseSpec& pulse) {
        const double flop = sideband_flop_probability(physics_.omega_s(pulse.J_upper), pulse.duration,
                                                      physics_.pulse_residual(pulse.J_upper));
        const double p_sc = scatter_probability(physics_, pulse.duration);
        parallel_for(mol_.size(), threads_, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i)
                scattered_[i] = pulse_one(mol_[i], pulse, flop, p_sc, physics_, rng_[i]) ? 1 : 0;
        });
        long count = 0;
        for (char c : scattered_) count += c;
        return static_cast<double>(count) / static_cast<double>(mol_.size());
    }

    void cool() {
        const TrapSettings trap = [&] {
            TrapSettings t;
            t.cool_efficiency = physics_.cool_efficiency;
            return t;
        }();
        parallel_for(mol_.size(), threads_, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                if (mol_[i].lost) continue;
                mol_[i].n = sideband_cool(MotionalState{mol_[i].n}, trap, rng_[i]).n;
            }
        });
    }

    Snapshot snapshot(double t) const {
        PopulationState counts;
        double lost = 0.0;
        for (const auto& s : mol_) {
            if (s.lost) {
                lost += 1.0;
            } else {
                counts.add(s.J, s.m, s.n, 1.0);
            }
        }
        counts.set_lost(lost);
        const double n = static_cast<double>(mol_.size());
        counts.scale(1.0 / n);
        const long N = static_cast<long>(mol_.size());
        return {t, counts, bernoulli_se(ground_fraction(counts), N), bernoulli_se(counts.lost(), N)};
    }

private:
    const CoolingPhysics& physics_;
    unsigned threads_;
    std::vector<Molecule> mol_;
    std::vector<Rng> rng_;
    std::vector<char> scattered_;
};

}  // namespace

void CoolingSchedule::validate() const {
    if (max_rounds < 1) throw PreconditionError("max_rounds must be at least 1");
    for (const auto& p : pulses) {
        if (p.J_upper < 2) throw PreconditionError("pulse J_upper must be at least 2");
        if (!(p.duration > 0.0)) throw PreconditionError("pulse duration must be positive");
        if (p.pol.allowed_q().empty()) throw PreconditionError("pulse has an empty polarization config");
    }
}

double CoolingPhysics::omega_s(int J_upper) const {
    return sideband_rabi(eta, comb_rabi(omega0, raman_splitting(J_upper - 2, molecule), tau));
}

double CoolingPhysics::pulse_residual(int J_upper) const {
    if (J_upper < 2) throw PreconditionError("pulse J_upper must be at least 2");
    const double line = raman_splitting(J_upper - 2, molecule);
    const double nu = fixed_nu_AO ? *fixed_nu_AO : resonance_offset(line, f_rep).plus.nu_AO;
    const auto a = is_resonant(line, f_rep, nu, resonance_tol);
    if (!a)
        throw PreconditionError("no resonant comb assignment for J=" + std::to_string(J_upper) +
                                " -> " + std::to_string(J_upper - 2));
    return a->residual;
}

double spont_rate(double gamma, double omega, double delta) {
    if (delta == 0.0) throw PreconditionError("spont_rate: detuning must be nonzero");
    return 2.0 * gamma * omega / std::abs(delta);
}

std::set<int> coupling_coverage(int J_upper, std::span<const PolarizationConfig> schedule) {
    if (J_upper < 2) throw PreconditionError("coupling_coverage: J_upper must be at least 2");
    std::set<int> uncovered;
    for (int m = -J_upper; m <= J_upper; ++m) {
        bool reachable = false;
        for (const auto& pol : schedule)
            for (int q : pol.allowed_q())
                if (std::abs(m + q) <= J_upper - 2) reachable = true;
        if (!reachable) uncovered.insert(m);
    }
    return uncovered;
}

PopulationState scatter_redistribute(const PopulationState& scattered,
                                     const ScatterBranching& branching) {
    if (!(branching.f_vib >= 0.0 && branching.f_vib <= 1.0))
        throw PreconditionError("f_vib must lie in [0, 1]");
    PopulationState out;
    double lost = 0.0;
    scattered.for_each([&](const Level& l, double w) {
        if (w < 0.0) throw PreconditionError("scattered mass must be non-negative");
        lost += branching.f_vib * w;
        const double stay = (1.0 - branching.f_vib) * w;
        if (l.J == 0) {
            out.add_uniform_m(1, l.n, stay);
        } else {
            out.add_uniform_m(l.J - 1, l.n, 0.5 * stay);
            out.add_uniform_m(l.J + 1, l.n, 0.5 * stay);
        }
    });
    out.set_lost(lost);
    return out;
}

PopulationState apply_pulse(const PopulationState& p, const PulseSpec& pulse,
                            const CoolingPhysics& physics) {
    const int J = pulse.J_upper;
    const double flop =
        sideband_flop_probability(physics.omega_s(J), pulse.duration, physics.pulse_residual(J));

    PopulationState next = p;
    for (int m = -J; m <= J; ++m) {
        const double mass = p.get(J, m, 0);
        if (mass == 0.0) continue;
        const auto ch = channels(J, m, pulse.pol, physics.weights);
        if (ch.empty()) continue;
        const double moved = mass * flop;
        next.set(J, m, 0, mass - moved);
        for (const auto& c : ch) next.add(J - 2, m + c.q, 1, moved * c.weight);
    }

    const double p_sc = scatter_probability(physics, pulse.duration);
    if (p_sc > 0.0) {
        const double lost_before = next.lost();
        PopulationState scattered = next;
        scattered.set_lost(0.0);
        scattered.scale(p_sc);
        next.set_lost(0.0);
        next.scale(1.0 - p_sc);
        next.set_lost(lost_before);
        const PopulationState back = scatter_redistribute(scattered, physics.branching);
        next.add_lost(back.lost());
        back.for_each([&](const Level& l, double w) { next.add(l.J, l.m, l.n, w); });
    }
    return next;
}

PopulationState apply_pulse(const PopulationState& p, const PulseSpec& pulse,
                            const CoolingPhysics& physics, Rng& rng) {
    Molecule s = from_point_mass(p);
    const double flop = sideband_flop_probability(physics.omega_s(pulse.J_upper), pulse.duration,
                                                  physics.pulse_residual(pulse.J_upper));
    pulse_one(s, pulse, flop, scatter_probability(physics, pulse.duration), physics, rng);
    return to_state(s);
}

PopulationState cool_motion(const PopulationState& p, double cool_efficiency) {
    PopulationState next = p;
    p.for_each([&](const Level& l, double w) {
        if (l.n != 1) return;
        const double moved = w * cool_efficiency;
        next.add(l.J, l.m, 1, -moved);
        next.add(l.J, l.m, 0, moved);
    });
    return next;
}

CoolingSchedule descending_schedule(int J_top, std::span<const PolarizationConfig> pols,
                                    const CoolingPhysics& physics, int max_rounds) {
    if (J_top < 2) throw PreconditionError("descending_schedule: J_top must be at least 2");
    if (pols.empty()) throw PreconditionError("descending_schedule: no polarization configs");
    CoolingSchedule s;
    s.max_rounds = max_rounds;
    for (int J = J_top; J >= 2; --J) {
        const double t_pi = pi_time(physics.omega_s(J));
        for (const auto& pol : pols) s.pulses.push_back({J, pol, t_pi});
    }
    return s;
}

CoolingReport run_rate_equations(const PopulationState& p0, const CoolingSchedule& schedule,
                                 const CoolingPhysics& physics) {
    check_run_inputs(p0, schedule, physics);
    RateEngine engine(p0, physics);
    return drive(engine, schedule, physics);
}

CoolingReport run_monte_carlo(const PopulationState& p0, const CoolingSchedule& schedule,
                              const CoolingPhysics& physics, long n_traj, std::uint64_t seed,
                              unsigned threads) {
    if (n_traj < 1) throw PreconditionError("n_traj must be at least 1");
    check_run_inputs(p0, schedule, physics);
    EnsembleEngine engine(p0, physics, n_traj, seed, threads);
    CoolingReport r = drive(engine, schedule, physics);
    r.n_traj = n_traj;
    return r;
}

}  // namespace qlc
