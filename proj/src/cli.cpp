// cli.cpp - scenario config parsing, serialization, validation and presets

#include "sqzoms/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

namespace sqz::cli {

namespace {

constexpr double kPi = std::numbers::pi;

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_plain(const std::string& s, const std::string& what)
{
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && s.front() == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || s.empty()) {
        throw ValidationError(what + ": '" + s + "' is not a number");
    }
    return v;
}

// Decimal with optional exponent; a trailing "pi" (optionally "*pi")
// multiplies by pi, so "pi", "-pi", "0.99pi", "2*pi" are accepted.
double parse_number(const std::string& raw, const std::string& what)
{
    const std::string s = trim(raw);
    if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
        std::string head = trim(s.substr(0, s.size() - 2));
        if (!head.empty() && head.back() == '*') head = trim(head.substr(0, head.size() - 1));
        if (head.empty() || head == "+") return kPi;
        if (head == "-") return -kPi;
        return parse_plain(head, what) * kPi;
    }
    return parse_plain(s, what);
}

int parse_int(const std::string& raw, const std::string& what)
{
    const std::string s = trim(raw);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw ValidationError(what + ": '" + s + "' is not an integer");
    }
    return v;
}

bool parse_bool(const std::string& raw, const std::string& what)
{
    const std::string s = trim(raw);
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    throw ValidationError(what + ": '" + s + "' is not a boolean");
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> parse_list(const std::string& s, const std::string& what)
{
    std::vector<double> out;
    for (const auto& item : split_list(s)) out.push_back(parse_number(item, what));
    return out;
}

std::string join_numbers(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += format_number(v[i]);
    }
    return out;
}

Spacing parse_spacing(const std::string& s)
{
    for (auto sp : {Spacing::Linear, Spacing::Log, Spacing::Critical}) {
        if (s == to_string(sp)) return sp;
    }
    throw ValidationError("unknown spacing '" + s + "' (expected linear, log or critical)");
}

ScenarioKind parse_kind(const std::string& s)
{
    for (auto k : {ScenarioKind::Coupling, ScenarioKind::Noise, ScenarioKind::Spectrum, ScenarioKind::Blockade,
                   ScenarioKind::Transient}) {
        if (s == to_string(k)) return k;
    }
    throw ValidationError("unknown scenario kind '" + s + "'");
}

using Setter = std::function<void(const std::string&)>;
using Registry = std::map<std::string, std::map<std::string, Setter>>;

const std::vector<std::string>& system_fields()
{
    static const std::vector<std::string> names{"omega_m", "g0",    "kappa",  "gamma",  "Delta_c",
                                                "Lambda",  "Phi_d", "r_e",    "Phi_e",  "n_th_m",
                                                "eps_l",   "omega_l_s"};
    return names;
}

double* system_field(SystemConfig& s, const std::string& name)
{
    if (name == "omega_m") return &s.omega_m;
    if (name == "g0") return &s.g0;
    if (name == "kappa") return &s.kappa;
    if (name == "gamma") return &s.gamma;
    if (name == "Delta_c") return &s.Delta_c;
    if (name == "Lambda") return &s.Lambda;
    if (name == "Phi_d") return &s.Phi_d;
    if (name == "r_e") return &s.r_e;
    if (name == "Phi_e") return &s.Phi_e;
    if (name == "n_th_m") return &s.n_th_m;
    if (name == "eps_l") return &s.eps_l;
    if (name == "omega_l_s") return &s.omega_l_s;
    return nullptr;
}

// The series section is created on first use.
AxisSpec& series_of(ScenarioConfig& c)
{
    if (!c.series) c.series.emplace();
    return *c.series;
}

Registry registry(ScenarioConfig& c)
{
    Registry r;
    r["scenario"]["name"] = [&c](const std::string& v) { c.name = trim(v); };
    r["scenario"]["kind"] = [&c](const std::string& v) { c.kind = parse_kind(trim(v)); };

    for (const auto& f : system_fields()) {
        r["system"][f] = [&c, f](const std::string& v) { *system_field(c.system, f) = parse_number(v, "system." + f); };
    }
    r["system"]["r_e_tracks_r_d"] = [&c](const std::string& v) {
        c.system.r_e_tracks_r_d = parse_bool(v, "system.r_e_tracks_r_d");
    };

    r["sweep"]["axis"] = [&c](const std::string& v) { c.sweep.name = trim(v); };
    r["sweep"]["start"] = [&c](const std::string& v) { c.sweep.start = parse_number(v, "sweep.start"); };
    r["sweep"]["stop"] = [&c](const std::string& v) { c.sweep.stop = parse_number(v, "sweep.stop"); };
    r["sweep"]["count"] = [&c](const std::string& v) { c.sweep.count = parse_int(v, "sweep.count"); };
    r["sweep"]["spacing"] = [&c](const std::string& v) { c.sweep.spacing = parse_spacing(trim(v)); };
    r["sweep"]["critical"] = [&c](const std::string& v) { c.sweep.critical = parse_number(v, "sweep.critical"); };
    r["sweep"]["values"] = [&c](const std::string& v) { c.sweep.values = parse_list(v, "sweep.values"); };

    r["series"]["axis"] = [&c](const std::string& v) { series_of(c).name = trim(v); };
    r["series"]["values"] = [&c](const std::string& v) { series_of(c).values = parse_list(v, "series.values"); };

    r["truncation"]["n_cav"] = [&c](const std::string& v) { c.dims.n_cav = parse_int(v, "truncation.n_cav"); };
    r["truncation"]["n_mech"] = [&c](const std::string& v) { c.dims.n_mech = parse_int(v, "truncation.n_mech"); };

    r["solver"]["frame"] = [&c](const std::string& v) { c.solver.frame = parse_frame_policy(trim(v)); };
    r["solver"]["rtol"] = [&c](const std::string& v) { c.solver.rtol = parse_number(v, "solver.rtol"); };
    r["solver"]["atol"] = [&c](const std::string& v) { c.solver.atol = parse_number(v, "solver.atol"); };
    r["solver"]["t_end"] = [&c](const std::string& v) { c.solver.t_end = parse_number(v, "solver.t_end"); };
    r["solver"]["variants"] = [&c](const std::string& v) { c.solver.variants = split_list(v); };
    r["solver"]["mech_per_phonon"] = [&c](const std::string& v) {
        c.solver.mech_per_phonon = parse_int(v, "solver.mech_per_phonon");
    };
    r["solver"]["convergence"] = [&c](const std::string& v) {
        c.solver.convergence = parse_bool(v, "solver.convergence");
    };

    r["output"]["dir"] = [&c](const std::string& v) { c.output_dir = trim(v); };
    return r;
}

const std::set<std::string>& manifest_sections()
{
    static const std::set<std::string> s{"derived", "run", "convergence", "points"};
    return s;
}

void set_key(Registry& reg, const std::string& section, const std::string& key, const std::string& value,
             const std::string& where)
{
    const auto sec = reg.find(section);
    if (sec == reg.end()) throw ValidationError(where + "unknown section [" + section + "]");
    const auto k = sec->second.find(key);
    if (k == sec->second.end()) throw ValidationError(where + "unknown key '" + key + "' in [" + section + "]");
    try {
        k->second(value);
    } catch (const ValidationError& e) {
        throw ValidationError(where + e.what());
    }
}

bool same_side(double c, double a, double b) { return (a < c && b < c) || (a > c && b > c); }

std::optional<double> inferred_critical(const AxisSpec& a, const SystemConfig& s)
{
    if (a.critical) return a.critical;
    if (a.name == "Lambda") return s.Delta_c / 2.0;
    if (a.name == "Delta_c") return 2.0 * s.Lambda;
    return std::nullopt;
}

bool settable(const std::string& name)
{
    SystemConfig dummy;
    return name == "Phi" || name == "Delta_c_tilde" || system_field(dummy, name) != nullptr;
}

} // namespace

const char* to_string(ScenarioKind k)
{
    switch (k) {
    case ScenarioKind::Coupling: return "coupling";
    case ScenarioKind::Noise: return "noise";
    case ScenarioKind::Spectrum: return "spectrum";
    case ScenarioKind::Blockade: return "blockade";
    case ScenarioKind::Transient: return "transient";
    }
    return "?";
}

const char* to_string(Spacing s)
{
    switch (s) {
    case Spacing::Linear: return "linear";
    case Spacing::Log: return "log";
    case Spacing::Critical: return "critical";
    }
    return "?";
}

std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

ScenarioConfig parse_config(const std::string& text)
{
    ScenarioConfig cfg;
    Registry reg = registry(cfg);
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(lineno) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') throw ValidationError(where + "malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!reg.count(section) && !manifest_sections().count(section)) {
                throw ValidationError(where + "unknown section [" + section + "]");
            }
            continue;
        }
        if (manifest_sections().count(section)) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ValidationError(where + "expected key = value");
        if (section.empty()) throw ValidationError(where + "key outside of any section");
        set_key(reg, section, trim(line.substr(0, eq)), line.substr(eq + 1), where);
    }
    return cfg;
}

ScenarioConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_config_text(const ScenarioConfig& c)
{
    std::ostringstream os;
    auto kv = [&os](const std::string& k, const std::string& v) { os << k << " = " << v << '\n'; };
    os << "[scenario]\n";
    kv("name", c.name);
    kv("kind", to_string(c.kind));

    os << "\n[system]\n";
    SystemConfig sys = c.system;
    for (const auto& f : system_fields()) kv(f, format_number(*system_field(sys, f)));
    kv("r_e_tracks_r_d", c.system.r_e_tracks_r_d ? "true" : "false");

    os << "\n[sweep]\n";
    kv("axis", c.sweep.name);
    kv("start", format_number(c.sweep.start));
    kv("stop", format_number(c.sweep.stop));
    kv("count", std::to_string(c.sweep.count));
    kv("spacing", to_string(c.sweep.spacing));
    if (c.sweep.critical) kv("critical", format_number(*c.sweep.critical));
    if (!c.sweep.values.empty()) kv("values", join_numbers(c.sweep.values));

    if (c.series) {
        os << "\n[series]\n";
        kv("axis", c.series->name);
        kv("values", join_numbers(c.series->values));
    }

    os << "\n[truncation]\n";
    kv("n_cav", std::to_string(c.dims.n_cav));
    kv("n_mech", std::to_string(c.dims.n_mech));

    os << "\n[solver]\n";
    kv("frame", to_string(c.solver.frame));
    kv("rtol", format_number(c.solver.rtol));
    kv("atol", format_number(c.solver.atol));
    if (c.solver.t_end) kv("t_end", format_number(*c.solver.t_end));
    std::string variants;
    for (std::size_t i = 0; i < c.solver.variants.size(); ++i) {
        variants += (i ? ", " : "") + c.solver.variants[i];
    }
    kv("variants", variants);
    kv("mech_per_phonon", std::to_string(c.solver.mech_per_phonon));
    kv("convergence", c.solver.convergence ? "true" : "false");

    os << "\n[output]\n";
    kv("dir", c.output_dir);
    return os.str();
}

void apply_override(ScenarioConfig& cfg, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ValidationError("override '" + assignment + "': expected key=value");
    const std::string lhs = trim(assignment.substr(0, eq));
    const std::string value = assignment.substr(eq + 1);
    Registry reg = registry(cfg);
    const auto dot = lhs.find('.');
    if (dot != std::string::npos) {
        set_key(reg, lhs.substr(0, dot), lhs.substr(dot + 1), value, "override '" + assignment + "': ");
        return;
    }
    std::vector<std::string> owners;
    for (const auto& [sec, keys] : reg) {
        if (keys.count(lhs)) owners.push_back(sec);
    }
    if (owners.empty()) throw ValidationError("override '" + assignment + "': unknown key '" + lhs + "'");
    if (owners.size() > 1) {
        throw ValidationError("override '" + assignment + "': key '" + lhs + "' is ambiguous, use section." + lhs);
    }
    set_key(reg, owners.front(), lhs, value, "override '" + assignment + "': ");
}

void set_system_field(SystemConfig& sys, const std::string& name, double v)
{
    if (name == "Phi") {
        sys.Phi_e = sys.Phi_d + v;
    } else if (name == "Delta_c_tilde") {
        sys.Delta_c = 2.0 * sys.Lambda + v;
    } else if (double* f = system_field(sys, name)) {
        *f = v;
    } else {
        throw ValidationError("'" + name + "' is not a system parameter");
    }
}

std::vector<double> axis_grid(const AxisSpec& a, const SystemConfig& sys)
{
    if (!a.values.empty()) return a.values;
    if (a.count < 1) throw ValidationError("sweep.count must be >= 1");
    switch (a.spacing) {
    case Spacing::Linear: return linspace(a.start, a.stop, a.count);
    case Spacing::Log: {
        if (!(a.start > 0.0 && a.stop > 0.0)) throw ValidationError("log spacing needs positive start and stop");
        auto e = linspace(std::log(a.start), std::log(a.stop), a.count);
        for (double& x : e) x = std::exp(x);
        if (a.count > 1) {
            e.front() = a.start;
            e.back() = a.stop;
        }
        return e;
    }
    case Spacing::Critical: {
        const auto c = inferred_critical(a, sys);
        if (!c) throw ValidationError("critical spacing on axis '" + a.name + "' needs sweep.critical");
        if (!same_side(*c, a.start, a.stop)) {
            throw ValidationError("critical spacing: start and stop must lie on the same side of the critical point "
                                  + format_number(*c));
        }
        const double s = a.start < *c ? 1.0 : -1.0;
        auto g = linspace(std::log(std::abs(*c - a.start)), std::log(std::abs(*c - a.stop)), a.count);
        std::vector<double> x;
        for (double lg : g) x.push_back(*c - s * std::exp(lg));
        if (a.count > 1) {
            x.front() = a.start;
            x.back() = a.stop;
        }
        std::sort(x.begin(), x.end());
        return x;
    }
    }
    return {};
}

std::vector<std::string> validate(const ScenarioConfig& c)
{
    std::vector<std::string> warnings = sqz::validate(c.system);
    c.dims.validate();
    const std::vector<double> grid = axis_grid(c.sweep, c.system);
    if (grid.empty()) throw ValidationError("sweep: empty grid");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw ValidationError("sweep: grid must strictly ascend");
    }
    if (c.series && c.series->values.empty()) throw ValidationError("series: values must not be empty");

    auto need_axis = [&](std::initializer_list<const char*> allowed) {
        for (const char* a : allowed) {
            if (c.sweep.name == a) return;
        }
        std::string list;
        for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
        throw ValidationError("sweep.axis = '" + c.sweep.name + "' is not valid for " + to_string(c.kind)
                              + " scenarios (expected " + list + ")");
    };
    auto no_series = [&] {
        if (c.series) throw ValidationError(std::string("[series] is not supported for ") + to_string(c.kind));
    };
    auto settable_series = [&] {
        if (c.series && !settable(c.series->name)) {
            throw ValidationError("series.axis = '" + c.series->name + "' is not a system parameter");
        }
        if (c.series && c.series->name == c.sweep.name) throw ValidationError("series.axis repeats sweep.axis");
    };
    auto stable_points = [&](const std::string& axis, const std::vector<double>& values) {
        for (double v : values) {
            SystemConfig s = c.system;
            set_system_field(s, axis, v);
            require_stable(s);
        }
    };

    switch (c.kind) {
    case ScenarioKind::Coupling:
        need_axis({"Lambda", "Delta_c"});
        no_series();
        break;
    case ScenarioKind::Noise: {
        need_axis({"Phi", "delta_r"});
        if (!c.series) throw ValidationError("noise scenarios need a [series] over the other of Phi, delta_r");
        const std::string other = c.sweep.name == "Phi" ? "delta_r" : "Phi";
        if (c.series->name != other) throw ValidationError("series.axis must be '" + other + "'");
        require_stable(c.system);
        break;
    }
    case ScenarioKind::Spectrum:
        need_axis({"Delta_s"});
        settable_series();
        if (!(c.system.eps_l > 0.0)) throw ValidationError("system.eps_l must be > 0 for spectra");
        require_stable(c.system);
        if (c.series) stable_points(c.series->name, c.series->values);
        break;
    case ScenarioKind::Blockade:
        need_axis({"Phi", "n_th_m", "Delta_c_tilde"});
        settable_series();
        if (!(c.system.eps_l > 0.0)) throw ValidationError("system.eps_l must be > 0 for g2");
        require_stable(c.system);
        stable_points(c.sweep.name, grid);
        if (c.series) stable_points(c.series->name, c.series->values);
        if (c.sweep.name == "n_th_m" && grid.front() < 0.0) throw ValidationError("n_th_m must be >= 0");
        break;
    case ScenarioKind::Transient:
        need_axis({"t"});
        no_series();
        require_stable(c.system);
        if (c.solver.variants.empty()) throw ValidationError("solver.variants must name rwa and/or exact");
        for (const auto& v : c.solver.variants) {
            if (v != "rwa" && v != "exact") throw ValidationError("solver.variants: unknown variant '" + v + "'");
        }
        break;
    }
    if (!(c.solver.rtol > 0.0 && c.solver.atol > 0.0)) throw ValidationError("solver tolerances must be positive");
    if (c.solver.mech_per_phonon < 0) throw ValidationError("solver.mech_per_phonon must be >= 0");
    return warnings;
}

// ---------------------------------------------------------------------------
// presets

std::vector<std::string> preset_names()
{
    return {"fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b", "fig4a", "fig4b", "fig4c", "fig4d"};
}

ScenarioConfig preset(const std::string& name)
{
    ScenarioConfig c;
    c.name = name;
    // common caption values
    c.system.g0 = 0.005;
    c.system.kappa = 0.05;
    c.system.gamma = 1e-4;
    c.system.Phi_d = 0.0;
    c.system.Phi_e = kPi;

    auto sweep = [&c](const char* axis, double a, double b, int n, Spacing sp) {
        c.sweep = AxisSpec{axis, a, b, n, sp, std::nullopt, {}};
    };
    auto series = [&c](const char* axis, std::vector<double> v) { c.series = AxisSpec{axis, 0, 0, 0, {}, {}, v}; };

    if (name == "fig2a") {
        c.kind = ScenarioKind::Coupling;
        c.system.Delta_c = 4000.0;
        c.system.Lambda = 0.0;
        sweep("Lambda", 0.0, 1999.99, 200, Spacing::Critical);
    } else if (name == "fig2b") {
        c.kind = ScenarioKind::Coupling;
        c.system.Delta_c = 4100.0;
        c.system.Lambda = 2000.0;
        sweep("Delta_c", 4000.01, 4100.0, 200, Spacing::Critical);
    } else if (name == "fig2c") {
        c.kind = ScenarioKind::Coupling;
        c.system.Delta_c = 20.0;
        c.system.Lambda = 0.0;
        sweep("Lambda", 0.0, 9.9999, 200, Spacing::Critical);
    } else if (name == "fig2d") {
        c.kind = ScenarioKind::Coupling;
        c.system.Delta_c = 30.0;
        c.system.Lambda = 10.0;
        sweep("Delta_c", 20.0001, 30.0, 200, Spacing::Critical);
    } else if (name == "fig3a" || name == "fig3b") {
        // r_d = 1: (Delta_c + 2 Lambda) / (Delta_c - 2 Lambda) = e^4
        c.kind = ScenarioKind::Noise;
        c.system.Delta_c = 20.0;
        c.system.Lambda = 10.0 * std::tanh(2.0);
        if (name == "fig3a") {
            sweep("Phi", 0.0, 4.0 * kPi, 401, Spacing::Linear);
            series("delta_r", {-0.1, -0.05, 0.0, 0.05, 0.1});
        } else {
            sweep("delta_r", -0.5, 0.5, 201, Spacing::Linear);
            series("Phi", {kPi, 0.99 * kPi, 0.95 * kPi, 0.9 * kPi});
        }
    } else if (name == "fig4a" || name == "fig4b" || name == "fig4c" || name == "fig4d") {
        c.system.Delta_c = 4000.4;
        c.system.Lambda = 2000.0;
        c.system.eps_l = 1e-3;
        c.system.n_th_m = 0.0;
        if (name == "fig4a") {
            c.kind = ScenarioKind::Spectrum;
            sweep("Delta_s", -3.5, 0.5, 400, Spacing::Linear);
            series("Delta_c_tilde", {0.4, 0.6, 1.0});
        } else if (name == "fig4b") {
            c.kind = ScenarioKind::Blockade;
            sweep("Phi", kPi - 0.01, kPi + 0.01, 21, Spacing::Linear);
            series("Delta_c_tilde", {0.4, 0.6, 1.0});
            c.dims = {5, 14};
            c.solver.frame = FramePolicy::Secular;
        } else if (name == "fig4c") {
            c.kind = ScenarioKind::Blockade;
            sweep("n_th_m", 0.0, 15.0, 7, Spacing::Linear);
            series("Delta_c_tilde", {0.4, 0.6, 1.0});
            c.dims = {3, 14};
        } else {
            c.kind = ScenarioKind::Transient;
            sweep("t", 0.0, 150.0, 601, Spacing::Linear);
            c.solver.variants = {"rwa", "exact"};
        }
    } else {
        std::string list;
        for (const auto& n : preset_names()) list += (list.empty() ? "" : ", ") + n;
        throw ValidationError("unknown preset '" + name + "' (available: " + list + ")");
    }
    return c;
}

void write_csv(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& comments, const Table& t)
{
    for (const auto& [k, v] : comments) os << "# " << k << " = " << v << '\n';
    for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
        os << '\n';
    }
}

} // namespace sqz::cli
