#include "qlc/population.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "qlc/errors.hpp"

namespace qlc {

namespace {

void check_level(int J, int m, int n) {
    if (J < 0 || std::abs(m) > J)
        throw PreconditionError("invalid rotational level J=" + std::to_string(J) +
                                " m=" + std::to_string(m));
    if (n < 0 || n > 1)
        throw PreconditionError("phonon number " + std::to_string(n) +
                                " outside the truncated space {0, 1}");
}

}  // namespace

PopulationState PopulationState::delta(int J, int m, int n) {
    PopulationState s;
    s.set(J, m, n, 1.0);
    return s;
}

PopulationState PopulationState::uniform_in_J(int J_lo, int J_hi) {
    if (J_lo < 0 || J_hi < J_lo)
        throw PreconditionError("uniform_in_J: need 0 <= J_lo <= J_hi");
    PopulationState s;
    const double w = 1.0 / static_cast<double>(J_hi - J_lo + 1);
    for (int J = J_lo; J <= J_hi; ++J) s.add_uniform_m(J, 0, w);
    return s;
}

void PopulationState::reserve_j(int J) {
    if (J <= j_cap_) return;
    probs_.resize(index(J + 1, -(J + 1), 0), 0.0);
    j_cap_ = J;
}

double PopulationState::get(int J, int m, int n) const {
    if (J < 0 || J > j_cap_ || std::abs(m) > J || n < 0 || n > 1) return 0.0;
    return probs_[index(J, m, n)];
}

void PopulationState::set(int J, int m, int n, double p) {
    check_level(J, m, n);
    reserve_j(J);
    probs_[index(J, m, n)] = p;
}

void PopulationState::add(int J, int m, int n, double p) {
    check_level(J, m, n);
    reserve_j(J);
    probs_[index(J, m, n)] += p;
}

void PopulationState::add_uniform_m(int J, int n, double p) {
    check_level(J, 0, n);
    reserve_j(J);
    const double share = p / static_cast<double>(2 * J + 1);
    for (int m = -J; m <= J; ++m) probs_[index(J, m, n)] += share;
}

int PopulationState::j_max_populated() const {
    for (int J = j_cap_; J >= 0; --J)
        if (j_mass(J) != 0.0) return J;
    return -1;
}

double PopulationState::j_mass(int J) const {
    if (J < 0 || J > j_cap_) return 0.0;
    double sum = 0.0;
    for (std::size_t i = index(J, -J, 0); i < index(J + 1, -(J + 1), 0); ++i) sum += probs_[i];
    return sum;
}

double PopulationState::phonon_mass(int n) const {
    double sum = 0.0;
    for (std::size_t i = static_cast<std::size_t>(n); i < probs_.size(); i += 2) sum += probs_[i];
    return sum;
}

double PopulationState::level_mass() const {
    double sum = 0.0;
    for (double p : probs_) sum += p;
    return sum;
}

std::vector<double> PopulationState::j_histogram() const {
    std::vector<double> h(static_cast<std::size_t>(j_cap_ + 1), 0.0);
    for (int J = 0; J <= j_cap_; ++J) h[static_cast<std::size_t>(J)] = j_mass(J);
    return h;
}

void PopulationState::scale(double factor) {
    for (double& p : probs_) p *= factor;
    lost_ *= factor;
}

void PopulationState::check_valid(double tol) const {
    for (double p : probs_)
        if (!(p >= 0.0)) throw PreconditionError("population state has a negative or NaN entry");
    if (!(lost_ >= 0.0)) throw PreconditionError("population state has negative lost mass");
    const double t = total();
    if (std::abs(t - 1.0) > tol)
        throw PreconditionError("population state is not normalized (total " + std::to_string(t) +
                                ")");
}

bool operator==(const PopulationState& a, const PopulationState& b) {
    if (a.lost_ != b.lost_) return false;
    const auto& big = a.probs_.size() >= b.probs_.size() ? a.probs_ : b.probs_;
    const auto& small = a.probs_.size() >= b.probs_.size() ? b.probs_ : a.probs_;
    for (std::size_t i = 0; i < big.size(); ++i) {
        const double other = i < small.size() ? small[i] : 0.0;
        if (big[i] != other) return false;
    }
    return true;
}

}  // namespace qlc
