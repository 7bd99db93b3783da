#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qlc/population.hpp"

namespace qlc {

enum class EventKind { pulse, cool, scatter, pump };

const char* to_string(EventKind k);

struct Event {
    double time = 0.0;
    EventKind kind = EventKind::pulse;
    std::string detail;
};

struct Snapshot {
    double time = 0.0;
    PopulationState state;
    /// Standard errors of the ground fraction and lost mass (Monte Carlo only).
    double ground_se = 0.0;
    double lost_se = 0.0;
};

/// Output of the cooling and pumping engines.
struct CoolingReport {
    std::vector<Snapshot> trajectory;  ///< strictly increasing times, first at t = 0
    std::vector<Event> events;
    double ground_fraction_final = 0.0;
    double wall_time_simulated = 0.0;  ///< summed pulse, cooling and pumping time (s)

    int cycles_used = 0;         ///< Raman pulses applied
    double cycles_per_step = 0;  ///< cycles_used / distinct J -> J-2 steps addressed
    double scatter_events = 0;   ///< per molecule: expected (rate engine) or sample mean (Monte Carlo)
    long n_traj = 0;             ///< 0 for the rate-equation engine
};

/// Probability in J <= 1 (any m, any n), excluding the lost bucket.
double ground_fraction(const PopulationState& p);

/// First snapshot time at which ground_fraction(state) >= level.
std::optional<double> time_to_ground_fraction(const CoolingReport& r, double level);

/// Standard error of a Bernoulli mean p estimated from n samples.
double bernoulli_se(double p, long n);

}  // namespace qlc
