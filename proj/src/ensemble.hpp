#pragma once

// Single-molecule state shared by the Monte Carlo engines.

#include "qlc/population.hpp"
#include "qlc/rng.hpp"

namespace qlc::detail {

struct Molecule {
    int J = 0;
    int m = 0;
    int n = 0;
    bool lost = false;
};

/// Draws one level from p by inverse CDF in (J, m, n) order, lost last.
inline Molecule sample_level(const PopulationState& p, Rng& rng) {
    const double u = rng.uniform() * p.total();
    double acc = 0.0;
    Molecule pick{0, 0, 0, true};
    bool found = false;
    p.for_each([&](const Level& l, double w) {
        if (found) return;
        acc += w;
        if (u < acc) {
            pick = {l.J, l.m, l.n, false};
            found = true;
        }
    });
    return pick;
}

inline int uniform_m(int J, Rng& rng) {
    return static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * J + 1))) - J;
}

}  // namespace qlc::detail
