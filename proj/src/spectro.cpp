#include "qlc/spectro.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qlc/errors.hpp"

namespace qlc {

double scan_signal(std::span<const ScanLine> lines, double f_rep, double probe_time, double nu_AO) {
    double best = 0.0;
    for (const auto& line : lines)
        for (int sign : {+1, -1}) {
            const double residual = branch_residual(line.splitting, f_rep, nu_AO, sign).residual;
            best = std::max(best, sideband_flop_probability(line.omega_s, probe_time, residual));
        }
    return best;
}

std::vector<double> uniform_grid(double f_rep, double step) {
    if (!(f_rep > 0.0) || !(step > 0.0)) throw PreconditionError("uniform_grid: need positive f_rep and step");
    std::vector<double> g;
    for (long k = 0;; ++k) {
        const double nu = static_cast<double>(k) * step;
        if (nu >= f_rep) break;
        g.push_back(nu);
    }
    return g;
}

ScanResult simulate_scan(std::span<const ScanLine> lines, double f_rep, double probe_time,
                         std::span<const double> grid, double noise_sigma, Rng* rng) {
    if (!(f_rep > 0.0)) throw PreconditionError("simulate_scan: f_rep must be positive");
    if (!(probe_time >= 0.0)) throw PreconditionError("simulate_scan: negative probe time");
    if (noise_sigma > 0.0 && rng == nullptr)
        throw PreconditionError("simulate_scan: noise requires a random stream");
    ScanResult out{f_rep, {}, probe_time};
    out.points.reserve(grid.size());
    double prev = -1.0;
    for (double nu : grid) {
        if (!(nu >= 0.0 && nu < f_rep)) throw PreconditionError("simulate_scan: grid outside [0, f_rep)");
        if (!(nu > prev)) throw PreconditionError("simulate_scan: grid must be strictly increasing");
        prev = nu;
        double y = scan_signal(lines, f_rep, probe_time, nu);
        if (noise_sigma > 0.0) y += noise_sigma * rng->normal();
        out.points.push_back({nu, y});
    }
    return out;
}

ScanResult simulate_scan(std::span<const double> splittings, const CombSettings& settings,
                         const MolecularConstants& c, const TrapSettings& trap, double probe_time,
                         std::span<const double> grid) {
    const double omega0 = carrier_rabi(c, settings);
    const double eta = lamb_dicke(trap);
    std::vector<ScanLine> lines;
    for (double s : splittings)
        lines.push_back({s, sideband_rabi(eta, comb_rabi(omega0, s, settings.tau))});
    return simulate_scan(lines, settings.f_rep, probe_time, grid);
}

namespace {

bool is_periodic_grid(const ScanResult& scan) {
    const auto& p = scan.points;
    if (p.size() < 3) return false;
    const double step = p[1].nu_AO - p[0].nu_AO;
    for (std::size_t i = 1; i < p.size(); ++i)
        if (std::abs(p[i].nu_AO - p[i - 1].nu_AO - step) > 1e-6 * step) return false;
    return std::abs(p.back().nu_AO + step - (p.front().nu_AO + scan.f_rep)) < 1e-6 * step;
}

// Signal at the grid point nearest `nu`.
double nearest_signal(const ScanResult& scan, double nu) {
    double best = 0.0, dist = INFINITY;
    for (const auto& pt : scan.points)
        if (std::abs(pt.nu_AO - nu) < dist) {
            dist = std::abs(pt.nu_AO - nu);
            best = pt.signal;
        }
    return best;
}

}  // namespace

std::vector<double> find_peaks(const ScanResult& scan, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) throw PreconditionError("find_peaks: threshold must lie in (0, 1)");
    const auto& p = scan.points;
    const auto n = static_cast<long>(p.size());
    const bool periodic = is_periodic_grid(scan);
    std::vector<double> peaks;
    if (n < 3) return peaks;

    auto at = [&](long i) -> const ScanPoint& { return p[static_cast<std::size_t>((i % n + n) % n)]; };
    for (long i = 0; i < n; ++i) {
        if (!periodic && (i == 0 || i == n - 1)) continue;
        const double y0 = at(i - 1).signal, y1 = at(i).signal, y2 = at(i + 1).signal;
        if (!(y1 > threshold && y1 > y0 && y1 >= y2)) continue;

        // Positions relative to the centre point, unwrapped across the period edge.
        double x0 = at(i - 1).nu_AO - at(i).nu_AO;
        double x2 = at(i + 1).nu_AO - at(i).nu_AO;
        if (x0 > 0.0) x0 -= scan.f_rep;
        if (x2 < 0.0) x2 += scan.f_rep;

        // Vertex of the parabola through (x0, y0), (0, y1), (x2, y2).
        const double d0 = (y0 - y1) / x0;
        const double d2 = (y2 - y1) / x2;
        const double curvature = (d2 - d0) / (x2 - x0);
        double shift = 0.0;
        if (curvature < 0.0) shift = -(d0 - curvature * x0) / (2.0 * curvature);
        double nu = at(i).nu_AO + shift;
        if (periodic) {
            nu = std::fmod(nu, scan.f_rep);
            if (nu < 0.0) nu += scan.f_rep;
        }
        peaks.push_back(nu);
    }
    std::sort(peaks.begin(), peaks.end());
    return peaks;
}

double rabi_fwhm(double omega_s, double probe_time) {
    if (!(omega_s > 0.0 && probe_time > 0.0)) throw PreconditionError("rabi_fwhm: need positive rate and time");
    const double peak = sideband_flop_probability(omega_s, probe_time, 0.0);
    if (!(peak > 0.0)) throw PreconditionError("rabi_fwhm: no signal at resonance");
    // First zero of the lineshape bounds the central lobe.
    const double k = std::floor(omega_s * probe_time / (2.0 * std::numbers::pi)) + 1.0;
    const double w_zero = 2.0 * std::numbers::pi * k / probe_time;
    double hi = std::sqrt(w_zero * w_zero - omega_s * omega_s) / (2.0 * std::numbers::pi);
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sideband_flop_probability(omega_s, probe_time, mid) > 0.5 * peak) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo + hi;
}

CombIndexResult extract_comb_index(std::span<const ScanResult> scans, std::optional<double> tracked_nu,
                                   double threshold) {
    if (scans.size() < 2) throw PreconditionError("extract_comb_index: need at least two scans");
    for (std::size_t i = 0; i < scans.size(); ++i)
        for (std::size_t j = i + 1; j < scans.size(); ++j)
            if (scans[i].f_rep == scans[j].f_rep)
                throw PreconditionError("extract_comb_index: repetition rates must be distinct");

    CombIndexResult out;
    {
        const auto& first = scans.front();
        const auto peaks = find_peaks(first, threshold);
        if (peaks.empty()) throw PreconditionError("extract_comb_index: first scan has no peak");
        double pick = peaks.front();
        if (tracked_nu) {
            auto circ = [&](double a) {
                const double d = std::fmod(std::abs(a - *tracked_nu), first.f_rep);
                return std::min(d, first.f_rep - d);
            };
            for (double p : peaks)
                if (circ(p) < circ(pick)) pick = p;
        } else {
            double best = -1.0;
            for (double p : peaks) {
                const double y = nearest_signal(first, p);
                if (y > best) {
                    best = y;
                    pick = p;
                }
            }
        }
        out.unwrapped_nu.push_back(pick);
    }

    for (std::size_t k = 1; k < scans.size(); ++k) {
        const auto peaks = find_peaks(scans[k], threshold);
        if (peaks.empty()) throw PreconditionError("extract_comb_index: a scan has no peak");
        const double prev = out.unwrapped_nu.back();
        const double f = scans[k].f_rep;
        double best = 0.0, best_dist = INFINITY;
        for (double p : peaks) {
            const double cand = p + std::round((prev - p) / f) * f;
            if (std::abs(cand - prev) < best_dist) {
                best_dist = std::abs(cand - prev);
                best = cand;
            }
        }
        out.unwrapped_nu.push_back(best);
    }

    // Least-squares slope of unwrapped position against repetition rate.
    const double n = static_cast<double>(scans.size());
    double mf = 0.0, mu = 0.0;
    for (std::size_t k = 0; k < scans.size(); ++k) {
        mf += (scans[k].f_rep - scans[0].f_rep) / n;
        mu += (out.unwrapped_nu[k] - out.unwrapped_nu[0]) / n;
    }
    double sff = 0.0, sfu = 0.0;
    for (std::size_t k = 0; k < scans.size(); ++k) {
        const double df = scans[k].f_rep - scans[0].f_rep - mf;
        const double du = out.unwrapped_nu[k] - out.unwrapped_nu[0] - mu;
        sff += df * df;
        sfu += df * du;
    }
    out.slope = sfu / sff;
    const double index = std::round(std::abs(out.slope));
    if (std::abs(std::abs(out.slope) - index) > 0.4 || index < 1.0)
        throw PreconditionError("extract_comb_index: slope is not close to an integer comb index");
    out.M = static_cast<long>(index);
    out.sign = out.slope < 0.0 ? +1 : -1;

    double sum = 0.0;
    for (std::size_t k = 0; k < scans.size(); ++k)
        sum += static_cast<double>(out.M) * scans[k].f_rep + out.sign * out.unwrapped_nu[k];
    out.delta_omega = sum / n;
    return out;
}

}  // namespace qlc
