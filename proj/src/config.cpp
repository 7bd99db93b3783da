#include "qlc/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "qlc/constants.hpp"
#include "qlc/errors.hpp"

namespace qlc {

namespace {

enum class Dim { none, frequency, time, temperature, intensity, length, mass, rate, wavenumber, spectral_density };

struct Unit {
    std::string_view name;
    Dim dim;
    double scale;
};

constexpr Unit kUnits[] = {
    {"Hz", Dim::frequency, 1.0},     {"kHz", Dim::frequency, 1e3},   {"MHz", Dim::frequency, 1e6},
    {"GHz", Dim::frequency, 1e9},    {"THz", Dim::frequency, 1e12},  {"s", Dim::time, 1.0},
    {"ms", Dim::time, 1e-3},         {"us", Dim::time, 1e-6},        {"ns", Dim::time, 1e-9},
    {"ps", Dim::time, 1e-12},        {"fs", Dim::time, 1e-15},       {"K", Dim::temperature, 1.0},
    {"W/m2", Dim::intensity, 1.0},   {"W/cm2", Dim::intensity, 1e4}, {"m", Dim::length, 1.0},
    {"mm", Dim::length, 1e-3},       {"um", Dim::length, 1e-6},      {"nm", Dim::length, 1e-9},
    {"amu", Dim::mass, kAtomicMassUnit}, {"kg", Dim::mass, 1.0},     {"/s", Dim::rate, 1.0},
    {"1/s", Dim::rate, 1.0},         {"/m", Dim::wavenumber, 1.0},   {"1/m", Dim::wavenumber, 1.0},
    {"W/m", Dim::spectral_density, 1.0}, {"mW/nm", Dim::spectral_density, 1e6},
    {"W/nm", Dim::spectral_density, 1e9},
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

struct Ctx {
    int line;
    std::string key;
};

[[noreturn]] void fail(const Ctx& ctx, const std::string& msg) {
    throw ConfigError(ctx.key + ": " + msg, ctx.line, ctx.key);
}

double parse_quantity(std::string_view text, Dim dim, const Ctx& ctx) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{}) fail(ctx, "expected a number, got '" + std::string(text) + "'");
    const std::string_view unit = trim(text.substr(static_cast<std::size_t>(ptr - text.data())));
    if (unit.empty()) {
        if (dim == Dim::none) return value;
        fail(ctx, "missing unit");
    }
    for (const auto& u : kUnits)
        if (u.name == unit) {
            if (u.dim != dim) fail(ctx, "unit '" + std::string(unit) + "' has the wrong dimension");
            return value * u.scale;
        }
    fail(ctx, "unknown unit '" + std::string(unit) + "'");
}

long parse_integer(std::string_view text, const Ctx& ctx) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        fail(ctx, "expected an integer, got '" + std::string(text) + "'");
    return v;
}

std::uint64_t parse_seed(std::string_view text, const Ctx& ctx) {
    text = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        fail(ctx, "expected a non-negative integer, got '" + std::string(text) + "'");
    return v;
}

bool parse_bool(std::string_view text, const Ctx& ctx) {
    text = trim(text);
    if (text == "true" || text == "yes" || text == "1") return true;
    if (text == "false" || text == "no" || text == "0") return false;
    fail(ctx, "expected true or false");
}

bool is_auto(std::string_view text) { return trim(text) == "auto"; }

std::vector<PolarizationConfig> parse_pol_schedule(std::string_view text, const Ctx& ctx) {
    std::vector<PolarizationConfig> out;
    for (auto group : split(text, '|')) {
        std::vector<int> q;
        for (auto item : split(group, ',')) {
            if (item.empty()) fail(ctx, "empty q entry");
            q.push_back(static_cast<int>(parse_integer(item, ctx)));
        }
        try {
            out.emplace_back(std::move(q));
        } catch (const PreconditionError& e) {
            fail(ctx, e.what());
        }
    }
    return out;
}

using Setter = std::function<void(RunConfig&, std::string_view, const Ctx&)>;

template <class F>
Setter q(Dim dim, F assign) {
    return [dim, assign](RunConfig& c, std::string_view v, const Ctx& ctx) { assign(c, parse_quantity(v, dim, ctx)); };
}

template <class F>
Setter q_auto(Dim dim, F assign) {
    return [dim, assign](RunConfig& c, std::string_view v, const Ctx& ctx) {
        if (is_auto(v)) {
            assign(c, std::optional<double>{});
        } else {
            assign(c, std::optional<double>{parse_quantity(v, dim, ctx)});
        }
    };
}

template <class F>
Setter integer(F assign) {
    return [assign](RunConfig& c, std::string_view v, const Ctx& ctx) { assign(c, parse_integer(v, ctx)); };
}

InitialPopulation parse_initial(std::string_view v, const Ctx& ctx) {
    v = trim(v);
    if (v == "uniform") return InitialPopulation::uniform;
    if (v == "boltzmann") return InitialPopulation::boltzmann;
    fail(ctx, "expected uniform or boltzmann");
}

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        // molecule
        {"molecule.B", q(Dim::frequency, [](RunConfig& c, double v) { c.molecule.B = v; })},
        {"molecule.D", q(Dim::frequency, [](RunConfig& c, double v) { c.molecule.D = v; })},
        {"molecule.d_sign", integer([](RunConfig& c, long v) { c.molecule.d_sign = static_cast<int>(v); })},
        {"molecule.lambda_e", q(Dim::length, [](RunConfig& c, double v) { c.molecule.lambda_e = v; })},
        {"molecule.lifetime", q(Dim::time, [](RunConfig& c, double v) { c.molecule.gamma = v > 0.0 ? 1.0 / v : -1.0; })},
        {"molecule.I_sat", q(Dim::intensity, [](RunConfig& c, double v) { c.molecule.I_sat = v; })},
        // comb
        {"comb.f_rep", q(Dim::frequency, [](RunConfig& c, double v) { c.comb.f_rep = v; })},
        {"comb.nu_AO", q(Dim::frequency, [](RunConfig& c, double v) { c.comb.nu_AO = v; })},
        {"comb.tau", q(Dim::time, [](RunConfig& c, double v) { c.comb.tau = v; })},
        {"comb.I_avg", q(Dim::intensity, [](RunConfig& c, double v) { c.comb.I_avg = v; })},
        {"comb.detuning", q(Dim::frequency, [](RunConfig& c, double v) { c.comb.Delta = to_angular(v); })},
        {"comb.rabi0", q_auto(Dim::frequency, [](RunConfig& c, std::optional<double> v) {
             c.comb.omega0_override = v ? std::optional<double>{to_angular(*v)} : std::nullopt;
         })},
        {"comb.pol_schedule", [](RunConfig& c, std::string_view v, const Ctx& ctx) { c.comb.pol_schedule = parse_pol_schedule(v, ctx); }},
        // trap
        {"trap.trap_freq", q(Dim::frequency, [](RunConfig& c, double v) { c.trap.omega_t = to_angular(v); })},
        {"trap.mass_eff", q(Dim::mass, [](RunConfig& c, double v) { c.trap.mass_eff = v; })},
        {"trap.k_eff", q(Dim::wavenumber, [](RunConfig& c, double v) { c.trap.k_eff = v; })},
        {"trap.eta", q_auto(Dim::none, [](RunConfig& c, std::optional<double> v) { c.trap.eta_override = v; })},
        {"trap.cool_efficiency", q(Dim::none, [](RunConfig& c, double v) { c.trap.cool_efficiency = v; })},
        {"trap.readout_fidelity", q(Dim::none, [](RunConfig& c, double v) { c.trap.readout_fidelity = v; })},
        {"trap.cool_duration", q_auto(Dim::time, [](RunConfig& c, std::optional<double> v) { c.trap.cool_duration = v; })},
        // pump
        {"pump.spectral_density", q(Dim::spectral_density, [](RunConfig& c, double v) { c.pump.spectral_density = v; })},
        {"pump.spot_diameter", q(Dim::length, [](RunConfig& c, double v) { c.pump.spot_diameter = v; })},
        {"pump.filter_edge", q_auto(Dim::length, [](RunConfig& c, std::optional<double> v) { c.pump.filter_edge = v; })},
        {"pump.filter_resolution", q(Dim::length, [](RunConfig& c, double v) { c.pump.filter_resolution = v; })},
        {"pump.scatter_rate", q(Dim::rate, [](RunConfig& c, double v) { c.pump.scatter_rate = v; })},
        {"pump.duration", q(Dim::time, [](RunConfig& c, double v) { c.pump.duration = v; })},
        {"pump.snapshot_interval", q_auto(Dim::time, [](RunConfig& c, std::optional<double> v) { c.pump.snapshot_interval = v; })},
        {"pump.pass", [](RunConfig& c, std::string_view v, const Ctx& ctx) {
             v = trim(v);
             if (v == "P") c.pump.pass = Branch::P;
             else if (v == "R") c.pump.pass = Branch::R;
             else fail(ctx, "expected P or R");
         }},
        {"pump.vib_loss", q(Dim::none, [](RunConfig& c, double v) { c.pump.vib_loss = v; })},
        {"pump.B_upper", q_auto(Dim::frequency, [](RunConfig& c, std::optional<double> v) { c.pump.B_upper = v; })},
        {"pump.nu_00", q_auto(Dim::frequency, [](RunConfig& c, std::optional<double> v) { c.pump.nu_00 = v; })},
        // cooling
        {"cooling.J_top", integer([](RunConfig& c, long v) { c.cooling.J_top = static_cast<int>(v); })},
        {"cooling.initial", [](RunConfig& c, std::string_view v, const Ctx& ctx) { c.cooling.initial = parse_initial(v, ctx); }},
        {"cooling.initial_J_max", integer([](RunConfig& c, long v) { c.cooling.initial_J_max = static_cast<int>(v); })},
        {"cooling.max_rounds", integer([](RunConfig& c, long v) { c.cooling.max_rounds = static_cast<int>(v); })},
        {"cooling.cool_after_each", [](RunConfig& c, std::string_view v, const Ctx& ctx) { c.cooling.cool_after_each = parse_bool(v, ctx); }},
        {"cooling.ground_target", q(Dim::none, [](RunConfig& c, double v) { c.cooling.ground_target = v; })},
        {"cooling.f_vib", q(Dim::none, [](RunConfig& c, double v) { c.cooling.f_vib = v; })},
        {"cooling.scatter_rate", q_auto(Dim::rate, [](RunConfig& c, std::optional<double> v) { c.cooling.scatter_rate = v; })},
        {"cooling.retune", [](RunConfig& c, std::string_view v, const Ctx& ctx) { c.cooling.retune = parse_bool(v, ctx); }},
        {"cooling.resonance_tol", q(Dim::frequency, [](RunConfig& c, double v) { c.cooling.resonance_tol = v; })},
        // scan
        {"scan.J_lower", integer([](RunConfig& c, long v) { c.scan.J_lower = static_cast<int>(v); })},
        {"scan.f_reps", [](RunConfig& c, std::string_view v, const Ctx& ctx) {
             c.scan.f_reps.clear();
             for (auto item : split(v, ',')) c.scan.f_reps.push_back(parse_quantity(item, Dim::frequency, ctx));
         }},
        {"scan.grid_step", q(Dim::frequency, [](RunConfig& c, double v) { c.scan.grid_step = v; })},
        {"scan.probe_time", q_auto(Dim::time, [](RunConfig& c, std::optional<double> v) { c.scan.probe_time = v; })},
        {"scan.threshold", q(Dim::none, [](RunConfig& c, double v) { c.scan.threshold = v; })},
        {"scan.noise", q(Dim::none, [](RunConfig& c, double v) { c.scan.noise = v; })},
        // match
        {"match.J_lowers", [](RunConfig& c, std::string_view v, const Ctx& ctx) {
             c.match.J_lowers.clear();
             for (auto item : split(v, ',')) c.match.J_lowers.push_back(static_cast<int>(parse_integer(item, ctx)));
         }},
        {"match.f_rep_min", q(Dim::frequency, [](RunConfig& c, double v) { c.match.f_rep_min = v; })},
        {"match.f_rep_max", q(Dim::frequency, [](RunConfig& c, double v) { c.match.f_rep_max = v; })},
        {"match.step", q(Dim::frequency, [](RunConfig& c, double v) { c.match.step = v; })},
        {"match.tol", q(Dim::frequency, [](RunConfig& c, double v) { c.match.tol = v; })},
        {"match.nu_min", q(Dim::frequency, [](RunConfig& c, double v) { c.match.nu_min = v; })},
        {"match.nu_max", q_auto(Dim::frequency, [](RunConfig& c, std::optional<double> v) { c.match.nu_max = v; })},
        // detect
        {"detect.target_J", [](RunConfig& c, std::string_view v, const Ctx& ctx) {
             c.detect.target_J.clear();
             for (auto item : split(v, ',')) c.detect.target_J.push_back(static_cast<int>(parse_integer(item, ctx)));
         }},
        {"detect.shots", integer([](RunConfig& c, long v) { c.detect.shots = v; })},
        {"detect.population", [](RunConfig& c, std::string_view v, const Ctx& ctx) { c.detect.population = parse_initial(v, ctx); }},
        // run
        {"run.temperature", q(Dim::temperature, [](RunConfig& c, double v) { c.temperature = v; })},
        {"run.J_max", integer([](RunConfig& c, long v) { c.J_max = static_cast<int>(v); })},
        {"run.seed", [](RunConfig& c, std::string_view v, const Ctx& ctx) { c.seed = parse_seed(v, ctx); }},
        {"run.engine", [](RunConfig& c, std::string_view v, const Ctx& ctx) {
             v = trim(v);
             if (v == "rate") c.engine = Engine::rate;
             else if (v == "monte_carlo") c.engine = Engine::monte_carlo;
             else fail(ctx, "expected rate or monte_carlo");
         }},
        {"run.n_traj", integer([](RunConfig& c, long v) { c.n_traj = v; })},
        {"run.output_dir", [](RunConfig& c, std::string_view v, const Ctx&) { c.output_dir = std::string(trim(v)); }},
        {"run.threads", integer([](RunConfig& c, long v) { c.threads = static_cast<unsigned>(std::max(0L, v)); })},
    };
    return table;
}

// Config key that owns a field named in a validation message.
std::string key_for_field(std::string_view section, std::string_view field) {
    static const std::map<std::string, std::string, std::less<>> alias = {
        {"gamma", "lifetime"}, {"Delta", "detuning"}, {"omega_t", "trap_freq"},
        {"omega0", "rabi0"},   {"D/B", "D"},           {"polarization", "pol_schedule"},
    };
    if (auto it = alias.find(field); it != alias.end()) return std::string(section) + "." + it->second;
    return std::string(section) + "." + std::string(field);
}

template <class F>
void validate_section(std::string_view section, F&& check) {
    try {
        check();
    } catch (const PreconditionError& e) {
        const std::string msg = e.what();
        const std::string field = msg.substr(0, msg.find(' '));
        throw ConfigError(msg, 0, key_for_field(section, field));
    }
}

void require(bool ok, std::string_view key, const std::string& msg) {
    if (!ok) throw ConfigError(std::string(key) + ": " + msg, 0, std::string(key));
}

}  // namespace

void RunConfig::validate() const {
    validate_section("molecule", [&] { molecule.validate(); });
    validate_section("comb", [&] { comb.validate(); });
    validate_section("trap", [&] { trap.validate(); });
    validate_section("pump", [&] { pump.validate(); });
    require(!comb.pol_schedule.empty(), "comb.pol_schedule", "needs at least one configuration");

    require(cooling.J_top >= 2, "cooling.J_top", "must be at least 2");
    require(cooling.initial_J_max >= 0, "cooling.initial_J_max", "must be non-negative");
    require(cooling.max_rounds >= 1, "cooling.max_rounds", "must be at least 1");
    require(cooling.ground_target > 0.0, "cooling.ground_target", "must be positive");
    require(cooling.f_vib >= 0.0 && cooling.f_vib <= 1.0, "cooling.f_vib", "must lie in [0, 1]");
    require(!cooling.scatter_rate || *cooling.scatter_rate >= 0.0, "cooling.scatter_rate", "must be non-negative");
    require(cooling.resonance_tol >= 0.0, "cooling.resonance_tol", "must be non-negative");

    require(scan.J_lower >= 0, "scan.J_lower", "must be non-negative");
    require(!scan.f_reps.empty(), "scan.f_reps", "needs at least one repetition rate");
    for (double f : scan.f_reps) require(f > 0.0, "scan.f_reps", "must be positive");
    require(scan.grid_step > 0.0, "scan.grid_step", "must be positive");
    require(!scan.probe_time || *scan.probe_time > 0.0, "scan.probe_time", "must be positive");
    require(scan.threshold > 0.0 && scan.threshold < 1.0, "scan.threshold", "must lie in (0, 1)");
    require(scan.noise >= 0.0, "scan.noise", "must be non-negative");

    require(!match.J_lowers.empty(), "match.J_lowers", "needs at least one line");
    for (int J : match.J_lowers) require(J >= 0, "match.J_lowers", "must be non-negative");
    require(match.f_rep_max > match.f_rep_min && match.f_rep_min > 0.0, "match.f_rep_max", "range is empty");
    require(match.step > 0.0, "match.step", "must be positive");
    require(match.tol >= 0.0, "match.tol", "must be non-negative");

    require(!detect.target_J.empty(), "detect.target_J", "needs at least one J");
    for (int J : detect.target_J) require(J >= 0, "detect.target_J", "must be non-negative");
    require(detect.shots >= 1, "detect.shots", "must be at least 1");

    require(temperature >= 0.0, "run.temperature", "must be non-negative");
    require(J_max >= 0, "run.J_max", "must be non-negative");
    require(engine != Engine::monte_carlo || n_traj >= 1, "run.n_traj", "must be at least 1");
    require(n_traj >= 1, "run.n_traj", "must be at least 1");
}

RunConfig sio_plus_profile() {
    RunConfig c;
    c.molecule = MolecularConstants{};  // B = 21.51 GHz, D = 33.1 kHz, 1/gamma = 70 ns, I_sat = 45 W/m^2
    c.comb.I_avg = 1000.0 * 1e4;        // 1000 W/cm^2
    c.comb.Delta = to_angular(20e12);
    c.trap.eta_override = 0.1;
    c.temperature = 300.0;
    return c;
}

RunConfig profile(std::string_view name) {
    if (name == "sio+" || name == "SiO+") return sio_plus_profile();
    throw ConfigError("unknown profile '" + std::string(name) + "'");
}

RunConfig parse_config(std::string_view text, RunConfig cfg) {
    std::string section;
    int line_no = 0;
    std::map<std::string, int> seen;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) {
            if (eol == text.size()) break;
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
            section = std::string(trim(line.substr(1, line.size() - 2)));
            static const char* known[] = {"molecule", "comb", "trap", "pump", "cooling", "scan", "match", "detect", "run"};
            if (std::find(std::begin(known), std::end(known), section) == std::end(known))
                throw ConfigError("unknown section [" + section + "]", line_no);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
        if (section.empty()) throw ConfigError("key outside of a section", line_no);
        const std::string key = section + "." + std::string(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto& table = setters();
        const auto it = table.find(key);
        if (it == table.end()) throw ConfigError("unknown key '" + key + "'", line_no, key);
        if (value.empty()) throw ConfigError(key + ": missing value", line_no, key);
        it->second(cfg, value, Ctx{line_no, key});
        seen[key] = line_no;
        if (eol == text.size()) break;
    }
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        const auto it = seen.find(e.field());
        throw ConfigError(std::string(e.what()).find(e.field()) == 0 ? e.what() : e.field() + ": " + e.what(),
                          it != seen.end() ? it->second : 0, e.field());
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

double carrier_rabi(const RunConfig& cfg) { return carrier_rabi(cfg.molecule, cfg.comb); }

CoolingPhysics build_cooling_physics(const RunConfig& cfg) {
    CoolingPhysics ph;
    ph.molecule = cfg.molecule;
    ph.omega0 = carrier_rabi(cfg);
    ph.eta = lamb_dicke(cfg.trap);
    ph.tau = cfg.comb.tau;
    ph.f_rep = cfg.comb.f_rep;
    if (!cfg.cooling.retune) ph.fixed_nu_AO = cfg.comb.nu_AO;
    ph.resonance_tol = cfg.cooling.resonance_tol;
    ph.scatter_rate = cfg.cooling.scatter_rate
                          ? *cfg.cooling.scatter_rate
                          : spont_rate(cfg.molecule.gamma, ph.omega0, cfg.comb.Delta);
    ph.branching.f_vib = cfg.cooling.f_vib;
    ph.cool_efficiency = cfg.trap.cool_efficiency;
    // The cooling step lasts as long as a pi pulse on the lowest line unless set.
    ph.cool_duration = cfg.trap.cool_duration ? *cfg.trap.cool_duration : pi_time(ph.omega_s(2));
    ph.ground_target = cfg.cooling.ground_target;
    return ph;
}

CoolingSchedule build_cooling_schedule(const RunConfig& cfg, const CoolingPhysics& physics) {
    CoolingSchedule s = descending_schedule(cfg.cooling.J_top, cfg.comb.pol_schedule, physics,
                                            cfg.cooling.max_rounds);
    s.cool_after_each = cfg.cooling.cool_after_each;
    return s;
}

PopulationState initial_population(const RunConfig& cfg, InitialPopulation kind) {
    if (kind == InitialPopulation::boltzmann)
        return boltzmann_distribution(cfg.temperature, cfg.J_max, cfg.molecule);
    return PopulationState::uniform_in_J(0, cfg.cooling.initial_J_max);
}

}  // namespace qlc
