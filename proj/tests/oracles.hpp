// Independent reference computations used by the unit and acceptance tests.
// None of these call into the library's numerics.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace oracle {

// Values computed offline with 50-digit mpmath for the default constants
// (B = 21.51 GHz, D = 33.1 kHz, gamma = 1/70 ns, I_sat = 45 W/m^2).
inline constexpr double kE1 = 43.0201324e9;
inline constexpr double kSplit0 = 129.0611916e9;
inline constexpr double kSplit2 = 301.1520484e9;
inline constexpr double kSplit3 = 387.2050236e9;
inline constexpr double kSplit5 = 559.3340116e9;
inline constexpr double kE35 = 27.15514956e12;
inline constexpr double kCum35At300K = 0.988610399;
inline constexpr int kArgmaxAt300K = 12;
inline constexpr double kOmega0 = 180447.78;         // rad/s at 1000 W/cm^2, 20 THz
inline constexpr double kSuppressionAt10 = 0.06738252915;
inline constexpr double kEtaDefault = 0.1111970720;  // 383 nm, 44 u, 10 MHz
inline constexpr double kFlopExample = 0.3165638355;
inline constexpr double kSpontRate = 0.2857142857;   // 2 pi 0.2 MHz, 20 THz

inline long double energy(int J, long double B, long double D) {
    const long double x = static_cast<long double>(J) * (J + 1);
    return B * x + D * x * x;
}

// Normalized thermal J distribution (long double, plain sum to J_max).
inline std::vector<long double> boltzmann(long double T, int J_max, long double B, long double D) {
    const long double h = 6.62607015e-34L, kB = 1.380649e-23L;
    std::vector<long double> w(static_cast<std::size_t>(J_max + 1));
    long double z = 0;
    for (int J = 0; J <= J_max; ++J) {
        w[static_cast<std::size_t>(J)] = (2 * J + 1) * std::exp(-h * energy(J, B, D) / (kB * T));
        z += w[static_cast<std::size_t>(J)];
    }
    for (auto& v : w) v /= z;
    return w;
}

// Two-level amplitude equations for |a> = |m1, n=0>, |b> = |m2, n=1> in the
// frame rotating at the drive, detuning delta (rad/s):
//   i da/dt = (Omega/2) b,   i db/dt = (Omega/2) a - delta b.
// Classic RK4 with fixed step; returns |b(t)|^2 starting from a = 1.
inline double two_level_rk4(double omega, double delta, double t, int steps) {
    using C = std::complex<double>;
    const C I(0.0, 1.0);
    auto f = [&](C a, C b, C& da, C& db) {
        da = -I * (0.5 * omega) * b;
        db = -I * ((0.5 * omega) * a - delta * b);
    };
    C a = 1.0, b = 0.0;
    const double h = t / steps;
    for (int k = 0; k < steps; ++k) {
        C ka1, kb1, ka2, kb2, ka3, kb3, ka4, kb4;
        f(a, b, ka1, kb1);
        f(a + 0.5 * h * ka1, b + 0.5 * h * kb1, ka2, kb2);
        f(a + 0.5 * h * ka2, b + 0.5 * h * kb2, ka3, kb3);
        f(a + h * ka3, b + h * kb3, ka4, kb4);
        a += h / 6.0 * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4);
        b += h / 6.0 * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4);
    }
    return std::norm(b);
}

struct Assign {
    long M;
    int sign;
    double residual;
};

struct Match {
    double f_rep;
    double nu;
    std::vector<Assign> a;
    double worst() const {
        double w = 0;
        for (const auto& x : a) w = std::max(w, x.residual);
        return w;
    }
};

// Nearest tooth pair on either branch, ties to +; M >= 1.
inline Assign nearest(double s, double f, double nu) {
    nu = std::fmod(nu, f);
    if (nu < 0) nu += f;
    const long Mp = std::max(1L, std::lround((s - nu) / f));
    const long Mm = std::max(1L, std::lround((s + nu) / f));
    const double rp = std::fabs(s - (static_cast<double>(Mp) * f + nu));
    const double rm = std::fabs(s - (static_cast<double>(Mm) * f - nu));
    return rm < rp ? Assign{Mm, -1, rm} : Assign{Mp, +1, rp};
}

// Brute force: every grid f, every exact offset of every splitting on both
// branches (computed with fmod), kept when all splittings land within tol.
inline std::vector<Match> brute_match(const std::vector<double>& s, double f_lo, double f_hi,
                                      double nu_lo, double nu_hi, double tol, double step) {
    std::vector<Match> out;
    for (long k = 0;; ++k) {
        const double f = f_lo + static_cast<double>(k) * step;
        if (f > f_hi * (1 + 1e-15)) break;
        std::vector<double> cand;
        for (double x : s) {
            const double r = std::fmod(x, f);
            cand.push_back(r);
            cand.push_back(f - r);
        }
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        for (double nu : cand) {
            if (nu < nu_lo || nu > nu_hi) continue;
            Match m{f, nu, {}};
            bool ok = true;
            for (double x : s) {
                const Assign a = nearest(x, f, nu);
                if (!(a.residual <= tol)) {
                    ok = false;
                    break;
                }
                m.a.push_back(a);
            }
            if (ok) out.push_back(m);
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const Match& x, const Match& y) {
        if (x.worst() != y.worst()) return x.worst() < y.worst();
        if (x.f_rep != y.f_rep) return x.f_rep < y.f_rep;
        return x.nu < y.nu;
    });
    return out;
}

// Small deterministic generator for property tests (SplitMix64).
struct Gen {
    std::uint64_t s;
    explicit Gen(std::uint64_t seed) : s(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int integer(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }
};

}  // namespace oracle
