// cli_main.cpp - command-line parsing for the sqzoms executable

#include <CLI11.hpp>

#include <ostream>

#include "sqzoms/cli.hpp"

namespace sqz::cli {

namespace {

int report_run(const RunReport& rep, std::ostream& out, std::ostream& err)
{
    for (const auto& f : rep.files) out << "wrote " << f << '\n';
    for (const auto& e : rep.point_errors) err << "point failed: " << e << '\n';
    if (rep.convergence) {
        const auto& c = *rep.convergence;
        out << "convergence: " << (c.pass ? "PASS" : "FAIL") << " drift " << format_number(c.drift) << '\n';
    }
    out << rep.points << " points, " << rep.point_errors.size() << " failed, "
        << format_number(rep.wall_time) << " s\n";
    return static_cast<int>(rep.code);
}

} // namespace

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Squeezed-cavity optomechanics simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::string> out_dir;
    int workers = 0;
    double tol = 1e-2;
    app.add_option("--out", out_dir, "output directory (overrides [output] dir)");
    app.add_option("--workers", workers, "worker threads for sweeps (0: available parallelism)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--tol", tol, "relative drift accepted by the convergence check")->check(CLI::PositiveNumber);

    std::string path;
    auto* run = app.add_subcommand("run", "run a scenario config");
    run->add_option("config", path, "config file")->required();

    auto* der = app.add_subcommand("derive", "print derived parameters of a config");
    der->add_option("config", path, "config file")->required();

    auto* chk = app.add_subcommand("check", "rerun a subsample at enlarged truncation");
    chk->add_option("config", path, "config file")->required();

    std::string name;
    std::vector<std::string> sets;
    bool dump = false, list = false;
    auto* pre = app.add_subcommand("preset", "run a built-in scenario");
    pre->add_option("name", name, "preset name");
    pre->add_option("--set", sets, "override, section.key=value")->take_all();
    pre->add_flag("--dump", dump, "print the resolved config instead of running");
    pre->add_flag("--list", list, "list presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : static_cast<int>(ExitCode::Validation);
    }

    RunOptions ro{out_dir, workers, tol};
    try {
        if (*pre) {
            if (list) {
                for (const auto& n : preset_names()) out << n << '\n';
                return 0;
            }
            if (name.empty()) throw ValidationError("preset: name required (see --list)");
            ScenarioConfig cfg = preset(name);
            for (const auto& s : sets) apply_override(cfg, s);
            if (dump) {
                out << to_config_text(cfg);
                return 0;
            }
            return report_run(run_scenario(cfg, ro), out, err);
        }
        ScenarioConfig cfg = load_config(path);
        if (*run) return report_run(run_scenario(cfg, ro), out, err);
        if (*der) {
            out << derive_report(cfg.system);
            return 0;
        }
        validate(cfg);
        const ConvergenceReport rep = check_convergence(cfg, tol, workers);
        out << (rep.pass ? "PASS" : "FAIL") << " drift " << format_number(rep.drift) << " tol "
            << format_number(rep.tolerance);
        if (rep.trivial) {
            out << " (closed form)";
        } else {
            out << " (" << rep.base.n_cav << "x" << rep.base.n_mech << " vs " << rep.enlarged.n_cav << "x"
                << rep.enlarged.n_mech << ")";
        }
        out << '\n';
        return rep.pass ? 0 : static_cast<int>(ExitCode::Numerical);
    } catch (const StabilityError& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::Validation);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::Validation);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::Numerical);
    }
}

} // namespace sqz::cli
