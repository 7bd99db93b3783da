#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qlc/comb.hpp"
#include "qlc/constants.hpp"
#include "qlc/errors.hpp"
#include "qlc/rng.hpp"
#include "qlc/spectro.hpp"
#include "qlc/trapdyn.hpp"

using namespace qlc;

namespace {
const double kOmegaS = kTwoPi * 20e3;
}

TEST_CASE("uniform grid") {
    const auto g = uniform_grid(80e6, 1e6);
    CHECK(g.size() == 80);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 79e6);
    CHECK_THROWS_AS(uniform_grid(80e6, 0.0), PreconditionError);
}

TEST_CASE("scan signal peaks on both branches and is periodic") {
    const double s = oracle::kSplit0, f = 80e6;
    const ScanLine line{s, kOmegaS};
    const double t = pi_time(kOmegaS);
    const auto r = resonance_offset(s, f);
    CHECK(scan_signal(std::span(&line, 1), f, t, r.plus.nu_AO) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(scan_signal(std::span(&line, 1), f, t, r.minus.nu_AO) == doctest::Approx(1.0).epsilon(1e-6));
    for (double nu : {1e6, 17.3e6, 50e6})
        CHECK(scan_signal(std::span(&line, 1), f, t, nu) ==
              doctest::Approx(scan_signal(std::span(&line, 1), f, t, nu + 2 * f)).epsilon(1e-9));
    CHECK(scan_signal(std::span(&line, 1), f, t, r.plus.nu_AO + 1e6) < 1e-3);
}

TEST_CASE("rabi lineshape width") {
    const double t = pi_time(kOmegaS);
    const double w = rabi_fwhm(kOmegaS, t);
    // mpmath root of P(d) = 1/2.
    CHECK(w == doctest::Approx(31947.414211388).epsilon(1e-9));
    CHECK(sideband_flop_probability(kOmegaS, t, w / 2) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(rabi_fwhm(kOmegaS, 3 * t) == doctest::Approx(21518.1781303014).epsilon(1e-9));
}

TEST_CASE("find_peaks refines positions below the grid step") {
    const ScanLine line{oracle::kSplit0, kOmegaS};
    const double f = 80e6, t = pi_time(kOmegaS);
    const auto grid = uniform_grid(f, 2e3);
    const auto scan = simulate_scan(std::span(&line, 1), f, t, grid);
    const auto peaks = find_peaks(scan, 0.5);
    REQUIRE(peaks.size() == 2);
    const auto r = resonance_offset(oracle::kSplit0, f);
    CHECK(std::fabs(peaks[0] - std::min(r.plus.nu_AO, r.minus.nu_AO)) < 100.0);
    CHECK(std::fabs(peaks[1] - std::max(r.plus.nu_AO, r.minus.nu_AO)) < 100.0);
}

TEST_CASE("find_peaks wraps around the period edge") {
    const double f = 80e6, centre = f - 300.0, width = 3e3;
    ScanResult scan{f, {}, 1e-3};
    for (double nu : uniform_grid(f, 1e3)) {
        double d = std::fabs(nu - centre);
        d = std::min(d, f - d);
        scan.points.push_back({nu, std::exp(-d * d / (2 * width * width))});
    }
    const auto peaks = find_peaks(scan, 0.5);
    REQUIRE(peaks.size() == 1);
    CHECK(peaks[0] == doctest::Approx(centre).epsilon(1e-7));

    // The same data without the wrap-around point is not periodic; no edge peaks.
    ScanResult cut = scan;
    cut.points.erase(cut.points.begin());
    CHECK(find_peaks(cut, 0.5).empty());

    ScanResult empty{f, {}, 1e-3};
    CHECK(find_peaks(empty, 0.5).empty());
    CHECK_THROWS_AS(find_peaks(scan, 1.0), PreconditionError);
}

TEST_CASE("convenience scan uses the comb and trap settings") {
    const MolecularConstants c;
    CombSettings s;
    TrapSettings trap;
    trap.eta_override = 0.1;
    const double omega_s = 0.1 * comb_rabi(carrier_rabi(c, s), oracle::kSplit0, s.tau);
    const std::vector<double> split{oracle::kSplit0};
    const auto grid = uniform_grid(s.f_rep, 1e3);
    const auto a = simulate_scan(split, s, c, trap, pi_time(omega_s), grid);
    const ScanLine line{oracle::kSplit0, omega_s};
    const auto b = simulate_scan(std::span(&line, 1), s.f_rep, pi_time(omega_s), grid);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i].signal == b.points[i].signal);
}

TEST_CASE("noise needs a random stream and is reproducible") {
    const ScanLine line{oracle::kSplit0, kOmegaS};
    const auto grid = uniform_grid(80e6, 1e5);
    CHECK_THROWS_AS(simulate_scan(std::span(&line, 1), 80e6, 1e-5, grid, 0.1), PreconditionError);
    Rng r1(5), r2(5);
    const auto a = simulate_scan(std::span(&line, 1), 80e6, 1e-5, grid, 0.1, &r1);
    const auto b = simulate_scan(std::span(&line, 1), 80e6, 1e-5, grid, 0.1, &r2);
    for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i].signal == b.points[i].signal);
}

TEST_CASE("comb index from two repetition rates on the J = 0 line") {
    const ScanLine line{oracle::kSplit0, kOmegaS};
    const double t = pi_time(kOmegaS);
    std::vector<ScanResult> scans;
    for (double f : {80e6, 80.001e6})
        scans.push_back(simulate_scan(std::span(&line, 1), f, t, uniform_grid(f, 1e3)));
    const auto hint = resonance_offset(oracle::kSplit0, 80e6).plus.nu_AO;
    const auto r = extract_comb_index(scans, hint);
    CHECK(r.M == 1613);
    CHECK(r.sign == 1);
    CHECK(r.delta_omega == doctest::Approx(oracle::kSplit0).epsilon(1e-9));
    CHECK(std::fabs(r.delta_omega - oracle::kSplit0) < rabi_fwhm(kOmegaS, t) / 10);

    const auto hint_m = resonance_offset(oracle::kSplit0, 80e6).minus.nu_AO;
    const auto rm = extract_comb_index(scans, hint_m);
    CHECK(rm.M == 1614);
    CHECK(rm.sign == -1);
    CHECK(std::fabs(rm.delta_omega - oracle::kSplit0) < rabi_fwhm(kOmegaS, t) / 10);
}

TEST_CASE("comb index preconditions") {
    const ScanLine line{oracle::kSplit0, kOmegaS};
    const double t = pi_time(kOmegaS);
    std::vector<ScanResult> one{simulate_scan(std::span(&line, 1), 80e6, t, uniform_grid(80e6, 1e3))};
    CHECK_THROWS_AS(extract_comb_index(one), PreconditionError);
    one.push_back(one.front());
    CHECK_THROWS_AS(extract_comb_index(one), PreconditionError);
    std::vector<ScanResult> flat{ScanResult{80e6, {{0, 0}, {1, 0}, {2, 0}}, t},
                                 ScanResult{81e6, {{0, 0}, {1, 0}, {2, 0}}, t}};
    CHECK_THROWS_AS(extract_comb_index(flat), PreconditionError);
}
