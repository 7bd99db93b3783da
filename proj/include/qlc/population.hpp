#pragma once

#include <cstddef>
#include <vector>

namespace qlc {

/// Rotational sublevel |J, m>.
struct RotLevel {
    int J = 0;
    int m = 0;

    friend bool operator==(const RotLevel&, const RotLevel&) = default;
    friend auto operator<=>(const RotLevel&, const RotLevel&) = default;
};

/// Rotational sublevel together with the phonon number of the addressed mode.
struct Level {
    int J = 0;
    int m = 0;
    int n = 0;

    friend bool operator==(const Level&, const Level&) = default;
};

/// Probability distribution over (J, m, n) with n in {0, 1}, plus a bucket for
/// population that has left the ground vibrational manifold.
///
/// Storage is dense in J: level (J, m, n) lives at 2 * (J^2 + J + m) + n, so a
/// state holding J <= Jmax costs 2 (Jmax + 1)^2 doubles. Writing above the
/// current Jmax grows the storage.
class PopulationState {
public:
    PopulationState() = default;

    static PopulationState delta(int J, int m = 0, int n = 0);
    /// Equal mass in each J of [J_lo, J_hi], uniform over m, n = 0.
    static PopulationState uniform_in_J(int J_lo, int J_hi);

    double get(int J, int m, int n) const;
    double get(const Level& l) const { return get(l.J, l.m, l.n); }
    void set(int J, int m, int n, double p);
    void add(int J, int m, int n, double p);

    /// Adds `p` spread evenly over the 2J+1 sublevels of J at phonon number n.
    void add_uniform_m(int J, int n, double p);

    double lost() const noexcept { return lost_; }
    void set_lost(double p) noexcept { lost_ = p; }
    void add_lost(double p) noexcept { lost_ += p; }

    /// Highest J with allocated storage (-1 when empty).
    int j_max() const noexcept { return j_cap_; }
    /// Highest J holding nonzero mass (-1 when none).
    int j_max_populated() const;

    double j_mass(int J) const;
    double phonon_mass(int n) const;
    /// Mass summed over all levels, excluding `lost`.
    double level_mass() const;
    /// level_mass() + lost().
    double total() const { return level_mass() + lost_; }

    /// Mass per J (summed over m and n), index 0..j_max().
    std::vector<double> j_histogram() const;

    /// Calls f(Level, p) for every level with p != 0, in (J, m, n) order.
    template <class F>
    void for_each(F&& f) const {
        for (int J = 0; J <= j_cap_; ++J)
            for (int m = -J; m <= J; ++m)
                for (int n = 0; n < 2; ++n) {
                    const double p = probs_[index(J, m, n)];
                    if (p != 0.0) f(Level{J, m, n}, p);
                }
    }

    void scale(double factor);
    void reserve_j(int J);

    /// Throws PreconditionError if any probability is negative or the total
    /// deviates from one by more than `tol`.
    void check_valid(double tol = 1e-9) const;

    friend bool operator==(const PopulationState& a, const PopulationState& b);

private:
    static std::size_t index(int J, int m, int n) {
        return static_cast<std::size_t>(2 * (J * J + J + m) + n);
    }

    std::vector<double> probs_;
    double lost_ = 0.0;
    int j_cap_ = -1;
};

}  // namespace qlc
