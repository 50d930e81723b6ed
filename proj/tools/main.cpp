// Command-line front end: solve nonlocal Poisson problems, audit the
// continuous-dependence bounds, reproduce the experiment presets, and run
// the operator identity checks.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nonloc/cli.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw nonloc::IoError("cannot read config file " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

struct CommonArgs {
    std::string config;
    std::string out;
    double h = 0.0;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
    auto* opt = cmd->add_option("--config", args.config, "run description (JSON)");
    if (config_required) opt->required();
    cmd->add_option("--out", args.out, "output directory");
    cmd->add_option("--h", args.h, "override the mesh width");
    cmd->add_flag("--quiet", args.quiet, "suppress progress output");
}

int run(nonloc::Command command, const CommonArgs& args) {
    nonloc::RunConfig rc;
    if (!args.config.empty())
        rc = nonloc::parse_config(read_file(args.config), command);
    else
        rc.command = command;
    if (!args.out.empty()) rc.out_dir = args.out;
    rc.quiet = args.quiet;
    if (args.h > 0.0) {
        rc.mesh_h = args.h;
        rc.overrides.h = args.h;
    }
    return nonloc::dispatch(rc);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonlocal Poisson solver and stability-audit toolkit"};
    app.set_version_flag("--version", std::string(nonloc::kVersion));
    app.require_subcommand(1);

    CommonArgs solve_args, audit_args, preset_args, ident_args;
    auto* solve_cmd = app.add_subcommand("solve", "solve one problem and export the profile");
    add_common(solve_cmd, solve_args, true);
    auto* audit_cmd = app.add_subcommand("audit", "compare two problems against a bound");
    add_common(audit_cmd, audit_args, true);
    auto* preset_cmd = app.add_subcommand("preset", "run a named experiment preset");
    add_common(preset_cmd, preset_args, true);
    auto* ident_cmd =
        app.add_subcommand("identities", "run the operator identity audit suite");
    add_common(ident_cmd, ident_args, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed()) return run(nonloc::Command::solve, solve_args);
        if (audit_cmd->parsed()) return run(nonloc::Command::audit, audit_args);
        if (preset_cmd->parsed()) return run(nonloc::Command::preset, preset_args);
        return run(nonloc::Command::identities, ident_args);
    } catch (const nonloc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const nonloc::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const nonloc::Error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
