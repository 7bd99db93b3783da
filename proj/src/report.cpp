#include "qlc/report.hpp"

#include <cmath>

namespace qlc {

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::pulse: return "pulse";
        case EventKind::cool: return "cool";
        case EventKind::scatter: return "scatter";
        case EventKind::pump: return "pump";
    }
    return "unknown";
}

double ground_fraction(const PopulationState& p) { return p.j_mass(0) + p.j_mass(1); }

std::optional<double> time_to_ground_fraction(const CoolingReport& r, double level) {
    for (const auto& s : r.trajectory)
        if (ground_fraction(s.state) >= level) return s.time;
    return std::nullopt;
}

double bernoulli_se(double p, long n) {
    if (n <= 1) return 0.0;
    const double v = p * (1.0 - p);
    return v > 0.0 ? std::sqrt(v / static_cast<double>(n - 1)) : 0.0;
}

}  // namespace qlc
