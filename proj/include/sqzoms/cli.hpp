// cli.hpp - scenario configs, presets and the run/check/derive front end
//
// Config files are flat key = value lines grouped under [section] headers;
// '#' and ';' start comments. Sections and keys:
//
//   [scenario]   name, kind (coupling | noise | spectrum | blockade | transient)
//   [system]     every SystemConfig field
//   [sweep]      axis, start, stop, count, spacing (linear | log | critical),
//                critical (optional), values (optional explicit list)
//   [series]     axis, values          (optional second axis, a list)
//   [truncation] n_cav, n_mech
//   [solver]     frame, rtol, atol, t_end, variants, mech_per_phonon, convergence
//   [output]     dir
//
// Manifest-only sections ([derived], [run], [convergence], [points]) are
// accepted and ignored, so a manifest can be fed back as a config.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sqzoms/observables.hpp"

namespace sqz::cli {

enum class ExitCode : int { Ok = 0, Validation = 1, Numerical = 2, Partial = 3 };

enum class ScenarioKind { Coupling, Noise, Spectrum, Blockade, Transient };
const char* to_string(ScenarioKind k);

enum class Spacing { Linear, Log, Critical };
const char* to_string(Spacing s);

struct AxisSpec {
    std::string name;
    double start{0.0};
    double stop{1.0};
    int count{1};
    Spacing spacing{Spacing::Linear};
    std::optional<double> critical; // critical spacing: accumulation point, default from the axis
    std::vector<double> values;     // explicit grid; overrides start/stop/count when non-empty
};

struct SolverConfig {
    FramePolicy frame{FramePolicy::Auto};
    double rtol{1e-8};
    double atol{1e-10};
    std::optional<double> t_end;
    std::vector<std::string> variants{"rwa", "exact"}; // transient scenarios
    int mech_per_phonon{3};
    bool convergence{false}; // run the convergence check as part of `run`
};

struct ScenarioConfig {
    std::string name{"custom"};
    ScenarioKind kind{ScenarioKind::Coupling};
    SystemConfig system{};
    AxisSpec sweep{};
    std::optional<AxisSpec> series;
    SpaceDims dims{4, 14};
    SolverConfig solver{};
    std::string output_dir{"."};
};

// Parsing and serialization. Errors are ValidationError naming the line,
// section and key.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);
std::string to_config_text(const ScenarioConfig& cfg);

// Applies "section.key=value" (or "key=value" if the key is unique across sections).
void apply_override(ScenarioConfig& cfg, const std::string& assignment);

// Model invariants plus scenario consistency (axis names, counts, spacing
// domains). Returns advisory warnings; throws ValidationError/StabilityError.
std::vector<std::string> validate(const ScenarioConfig& cfg);

std::vector<double> axis_grid(const AxisSpec& axis, const SystemConfig& sys);

// Sets a SystemConfig field by name; also accepts Phi (sets Phi_e = Phi_d + v)
// and Delta_c_tilde (sets Delta_c = 2 Lambda + v). delta_r is not a field and
// is rejected here.
void set_system_field(SystemConfig& sys, const std::string& name, double v);

std::uint64_t fnv1a(const std::string& s);
std::string format_number(double v); // %.17g

std::vector<std::string> preset_names();
ScenarioConfig preset(const std::string& name); // throws ValidationError for unknown names

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

// "# key = value" comment lines, header row, rows at 17 significant digits.
void write_csv(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& comments, const Table& t);

struct ConvergenceReport {
    bool trivial{false}; // closed-form scenario
    bool pass{true};
    double drift{0.0};   // max relative drift of the primary observable
    double tolerance{1e-2};
    SpaceDims base{}, enlarged{};
    std::vector<double> sample_points;
};

ConvergenceReport check_convergence(const ScenarioConfig& cfg, double tol = 1e-2, int workers = 1);

struct RunOptions {
    std::optional<std::string> out_dir;
    int workers{0}; // 0: available parallelism
    double tol{1e-2};
};

struct RunReport {
    ExitCode code{ExitCode::Ok};
    std::vector<std::string> files;
    std::vector<std::string> point_errors; // "label: message"
    std::size_t points{0};
    double wall_time{0.0};
    std::optional<ConvergenceReport> convergence;
};

RunReport run_scenario(const ScenarioConfig& cfg, const RunOptions& opts = {});

// Human-readable derived-parameter block.
std::string derive_report(const SystemConfig& sys);

// Entry point behind the executable; returns the process exit code.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace sqz::cli
