#include "qlc/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "qlc/comb.hpp"
#include "qlc/cooling.hpp"
#include "qlc/errors.hpp"
#include "qlc/molecule.hpp"
#include "qlc/pumping.hpp"
#include "qlc/report.hpp"
#include "qlc/rng.hpp"
#include "qlc/spectro.hpp"
#include "qlc/trapdyn.hpp"

namespace qlc {

namespace {

using nlohmann::ordered_json;

ordered_json optional_number(std::optional<double> v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

const char* engine_name(Engine e) { return e == Engine::rate ? "rate" : "monte_carlo"; }

// time, <level columns>, lost, lost_se, J0..Jn
CsvTable trajectory_table(const CoolingReport& r, bool with_ground) {
    int j_cols = 0;
    for (const auto& s : r.trajectory) j_cols = std::max(j_cols, s.state.j_max_populated());
    CsvTable t;
    t.header = {"time"};
    if (with_ground) {
        t.header.push_back("ground_fraction");
        t.header.push_back("ground_se");
    }
    t.header.push_back("lost");
    t.header.push_back("lost_se");
    for (int J = 0; J <= j_cols; ++J) t.header.push_back("J" + std::to_string(J));
    for (const auto& s : r.trajectory) {
        std::vector<std::string> row{format_number(s.time)};
        if (with_ground) {
            row.push_back(format_number(ground_fraction(s.state)));
            row.push_back(format_number(s.ground_se));
        }
        row.push_back(format_number(s.state.lost()));
        row.push_back(format_number(s.lost_se));
        for (int J = 0; J <= j_cols; ++J) row.push_back(format_number(s.state.j_mass(J)));
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable event_table(const CoolingReport& r) {
    CsvTable t;
    t.header = {"time", "kind", "detail"};
    for (const auto& e : r.events) t.rows.push_back({format_number(e.time), to_string(e.kind), e.detail});
    return t;
}

}  // namespace

std::pair<double, double> wilson_interval(long k, long n, double z) {
    if (n < 1 || k < 0 || k > n) throw PreconditionError("wilson_interval: need 0 <= k <= n, n >= 1");
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
    const double half = z / (1 + z2 / nn) * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn));
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

CommandOutput cmd_boltzmann(const RunConfig& cfg) {
    const PopulationState p = boltzmann_distribution(cfg.temperature, cfg.J_max, cfg.molecule);
    CommandOutput out;
    CsvTable t;
    t.header = {"J", "population", "cumulative"};
    double cum = 0.0, best = -1.0, mean = 0.0;
    int argmax = 0;
    for (int J = 0; J <= cfg.J_max; ++J) {
        const double w = p.j_mass(J);
        cum += w;
        mean += J * w;
        if (w > best) {
            best = w;
            argmax = J;
        }
        t.rows.push_back({std::to_string(J), format_number(w), format_number(cum)});
    }
    out.tables.emplace_back("boltzmann.csv", std::move(t));
    out.summary = {{"temperature", cfg.temperature},
                   {"J_max", cfg.J_max},
                   {"most_populated_J", argmax},
                   {"mean_J", mean},
                   {"cumulative_J35", cumulative_fraction(p, 35)}};
    return out;
}

CommandOutput cmd_match(const RunConfig& cfg) {
    std::vector<double> splittings;
    for (int J : cfg.match.J_lowers) splittings.push_back(raman_splitting(J, cfg.molecule));
    const double nu_hi = cfg.match.nu_max.value_or(std::numeric_limits<double>::infinity());
    const auto sols = match_multi(splittings, {cfg.match.f_rep_min, cfg.match.f_rep_max},
                                  {cfg.match.nu_min, nu_hi}, cfg.match.tol, cfg.match.step);
    CsvTable t;
    t.header = {"f_rep", "nu_AO"};
    for (std::size_t i = 0; i < splittings.size(); ++i) {
        const std::string k = std::to_string(i + 1);
        t.header.push_back("M_" + k);
        t.header.push_back("sign_" + k);
        t.header.push_back("residual_" + k);
    }
    for (const auto& s : sols) {
        std::vector<std::string> row{format_number(s.f_rep), format_number(s.nu_AO)};
        for (const auto& a : s.assignments) {
            row.push_back(format_number(a.M));
            row.push_back(std::to_string(a.sign));
            row.push_back(format_number(a.residual));
        }
        t.rows.push_back(std::move(row));
    }
    CommandOutput out;
    out.tables.emplace_back("match.csv", std::move(t));
    ordered_json best = nullptr;
    if (!sols.empty()) best = {{"f_rep", sols.front().f_rep}, {"nu_AO", sols.front().nu_AO},
                               {"worst_residual", sols.front().worst_residual()}};
    out.summary = {{"J_lowers", cfg.match.J_lowers}, {"splittings", splittings},
                   {"solutions", sols.size()},      {"best", best}};
    return out;
}

CommandOutput cmd_pump(const RunConfig& cfg) {
    const PopulationState p0 = boltzmann_distribution(cfg.temperature, cfg.J_max, cfg.molecule);
    const CoolingReport r = cfg.engine == Engine::rate
                                ? run_pumping(p0, cfg.molecule, cfg.pump)
                                : run_pumping_monte_carlo(p0, cfg.molecule, cfg.pump, cfg.n_traj, cfg.seed,
                                                          cfg.threads);
    const PopulationState& fin = r.trajectory.back().state;
    CommandOutput out;
    out.tables.emplace_back("pump.csv", trajectory_table(r, false));
    out.summary = {{"engine", engine_name(cfg.engine)},
                   {"n_traj", r.n_traj},
                   {"duration", cfg.pump.duration},
                   {"initial_states_populated", populated_j_count(p0)},
                   {"final_states_populated", populated_j_count(fin)},
                   {"final_fraction_below_J10", unlost_fraction_below(fin, 10)},
                   {"time_to_below_J10", optional_number(time_to_compression(r, 10, 0.99))},
                   {"lost", fin.lost()},
                   {"scatter_events", r.scatter_events}};
    return out;
}

CommandOutput cmd_cool(const RunConfig& cfg) {
    const CoolingPhysics physics = build_cooling_physics(cfg);
    const CoolingSchedule sched = build_cooling_schedule(cfg, physics);
    const PopulationState p0 = initial_population(cfg, cfg.cooling.initial);
    const CoolingReport r = cfg.engine == Engine::rate
                                ? run_rate_equations(p0, sched, physics)
                                : run_monte_carlo(p0, sched, physics, cfg.n_traj, cfg.seed, cfg.threads);
    CommandOutput out;
    out.tables.emplace_back("cool.csv", trajectory_table(r, true));
    out.tables.emplace_back("cool_events.csv", event_table(r));
    out.summary = {{"engine", engine_name(cfg.engine)},
                   {"n_traj", r.n_traj},
                   {"omega0", physics.omega0},
                   {"eta", physics.eta},
                   {"scatter_rate", physics.scatter_rate},
                   {"time_to_90", optional_number(time_to_ground_fraction(r, 0.9))},
                   {"ground_fraction_final", r.ground_fraction_final},
                   {"lost_final", r.trajectory.back().state.lost()},
                   {"wall_time_simulated", r.wall_time_simulated},
                   {"cycles_used", r.cycles_used},
                   {"cycles_per_step", r.cycles_per_step},
                   {"scatter_events", r.scatter_events}};
    return out;
}

CommandOutput cmd_scan(const RunConfig& cfg) {
    const double splitting = raman_splitting(cfg.scan.J_lower, cfg.molecule);
    const double eta = lamb_dicke(cfg.trap);
    const double omega_s = eta * comb_rabi(carrier_rabi(cfg), splitting, cfg.comb.tau);
    const double probe = cfg.scan.probe_time.value_or(pi_time(omega_s));
    const ScanLine line{splitting, omega_s};

    std::vector<ScanResult> scans;
    CsvTable t;
    t.header = {"f_rep", "nu_AO", "signal"};
    for (std::size_t k = 0; k < cfg.scan.f_reps.size(); ++k) {
        const double f = cfg.scan.f_reps[k];
        const auto grid = uniform_grid(f, cfg.scan.grid_step);
        Rng rng(cfg.seed, "scan", k);
        scans.push_back(simulate_scan(std::span(&line, 1), f, probe, grid, cfg.scan.noise,
                                      cfg.scan.noise > 0.0 ? &rng : nullptr));
        for (const auto& pt : scans.back().points)
            t.rows.push_back({format_number(f), format_number(pt.nu_AO), format_number(pt.signal)});
    }
    CommandOutput out;
    out.tables.emplace_back("scan.csv", std::move(t));

    const auto expected = resonance_offset(splitting, cfg.scan.f_reps.front());
    ordered_json peaks = ordered_json::array();
    for (double nu : find_peaks(scans.front(), cfg.scan.threshold)) peaks.push_back(nu);
    out.summary = {{"J_lower", cfg.scan.J_lower},
                   {"splitting", splitting},
                   {"omega_s", omega_s},
                   {"probe_time", probe},
                   {"fwhm", rabi_fwhm(omega_s, probe)},
                   {"peaks_first_scan", peaks},
                   {"expected_M_plus", expected.plus.assignment.M},
                   {"expected_M_minus", expected.minus.assignment.M}};
    if (scans.size() >= 2) {
        const auto res = extract_comb_index(scans, std::nullopt, cfg.scan.threshold);
        out.summary["M"] = res.M;
        out.summary["sign"] = res.sign;
        out.summary["delta_omega"] = res.delta_omega;
        out.summary["slope"] = res.slope;
    }
    return out;
}

CommandOutput cmd_detect(const RunConfig& cfg) {
    const PopulationState prior = initial_population(cfg, cfg.detect.population);
    std::vector<RotLevel> target;
    for (int J : cfg.detect.target_J)
        for (int m = -J; m <= J; ++m) target.push_back({J, m});
    double true_pop = 0.0;
    for (int J : cfg.detect.target_J) true_pop += prior.j_mass(J);

    long clicks = 0;
    for (long i = 0; i < cfg.detect.shots; ++i) {
        Rng rng(cfg.seed, "detect", static_cast<std::uint64_t>(i));
        if (quantum_logic_detect(prior, target, cfg.trap, rng).outcome) ++clicks;
    }
    // Invert the symmetric readout error: P(click) = (1 - F) + (2F - 1) p.
    const double F = cfg.trap.readout_fidelity;
    auto invert = [F](double q) {
        if (F == 0.5) return q;
        return std::clamp((q - (1.0 - F)) / (2.0 * F - 1.0), 0.0, 1.0);
    };
    const auto [lo, hi] = wilson_interval(clicks, cfg.detect.shots);
    const double q = static_cast<double>(clicks) / static_cast<double>(cfg.detect.shots);
    CommandOutput out;
    out.summary = {{"target_J", cfg.detect.target_J},
                   {"shots", cfg.detect.shots},
                   {"clicks", clicks},
                   {"click_fraction", q},
                   {"readout_fidelity", F},
                   {"inferred_population", invert(q)},
                   {"ci_low", invert(lo)},
                   {"ci_high", invert(hi)},
                   {"ci_level", 0.95},
                   {"true_population", true_pop},
                   {"expected_click_probability", detection_click_probability(prior, target, F)}};
    return out;
}

void write_outputs(const CommandOutput& out, const std::string& command,
                   const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, table] : out.tables) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
        write_csv(f, table);
    }
    std::ofstream j(dir / (command + ".json"), std::ios::binary);
    if (!j) throw std::runtime_error("cannot write " + (dir / (command + ".json")).string());
    j << out.summary.dump(2) << '\n';
}

}  // namespace qlc
