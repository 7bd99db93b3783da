#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qlc/comb.hpp"
#include "qlc/cooling.hpp"
#include "qlc/molecule.hpp"
#include "qlc/pumping.hpp"
#include "qlc/trapdyn.hpp"

namespace qlc {

enum class Engine { rate, monte_carlo };

enum class InitialPopulation { uniform, boltzmann };

/// Inputs from which the cooling schedule and physics are built.
struct CoolingSettings {
    int J_top = 9;
    InitialPopulation initial = InitialPopulation::uniform;
    int initial_J_max = 9;  ///< uniform start covers J = 0..initial_J_max
    int max_rounds = 10;
    bool cool_after_each = true;
    double ground_target = 0.9;
    double f_vib = 0.5;
    std::optional<double> scatter_rate;  ///< default: spont_rate(gamma, Omega_0, Delta)
    bool retune = true;                  ///< false: every pulse uses comb.nu_AO
    double resonance_tol = 1e3;
};

struct ScanSettings {
    int J_lower = 0;
    std::vector<double> f_reps{80e6, 80.001e6, 80.002e6};
    double grid_step = 1e3;
    std::optional<double> probe_time;  ///< default: pi time of the line
    double threshold = 0.5;
    double noise = 0.0;
};

struct MatchSettings {
    std::vector<int> J_lowers{3, 5};
    double f_rep_min = 79e6;
    double f_rep_max = 81e6;
    double step = 100.0;
    double tol = 10e3;
    double nu_min = 0.0;
    std::optional<double> nu_max;  ///< default f_rep_max
};

struct DetectSettings {
    std::vector<int> target_J{0};
    long shots = 1000;
    InitialPopulation population = InitialPopulation::boltzmann;
};

struct RunConfig {
    MolecularConstants molecule;
    CombSettings comb;
    TrapSettings trap;
    PumpSettings pump;
    CoolingSettings cooling;
    ScanSettings scan;
    MatchSettings match;
    DetectSettings detect;

    double temperature = 300.0;
    int J_max = 200;
    std::uint64_t seed = 1;
    Engine engine = Engine::rate;
    long n_traj = 10000;
    std::string output_dir = "out";
    unsigned threads = 0;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// The SiO+ / Yb+ parameter set the simulator ships with.
RunConfig sio_plus_profile();

/// Profile by name; only "sio+" exists. Throws ConfigError otherwise.
RunConfig profile(std::string_view name);

/// Parses config text over `base`. Grammar, one statement per line:
///   # comment        [section]        key = value [unit]
/// Lists separate items with commas; pol_schedule separates configs with '|'.
/// The literal `auto` restores a derived default.
RunConfig parse_config(std::string_view text, RunConfig base = sio_plus_profile());

RunConfig load_config(const std::filesystem::path& path, RunConfig base = sio_plus_profile());

/// Derived objects used by the commands.
double carrier_rabi(const RunConfig& cfg);
CoolingPhysics build_cooling_physics(const RunConfig& cfg);
CoolingSchedule build_cooling_schedule(const RunConfig& cfg, const CoolingPhysics& physics);
PopulationState initial_population(const RunConfig& cfg, InitialPopulation kind);

}  // namespace qlc
