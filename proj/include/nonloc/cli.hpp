#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nonloc/config.hpp"
#include "nonloc/experiments.hpp"
#include "nonloc/stability.hpp"
#include "nonloc/version.hpp"

namespace nonloc {

inline ProblemSpec default_identities_problem() {
    const double delta = 0.2;
    DomainSpec dom({0.0, 1.0}, delta);
    return ProblemSpec(dom, KernelSpec::constant(3.0 / (delta * delta * delta), delta),
                       ForcingSpec::polynomial({0.0, 0.0, 12.0}),
                       CollarData::polynomial_pair({0.0, 0.0, 0.0, 1.0},
                                                   {0.0, 0.0, 0.0, 0.0, 1.0}));
}

namespace cli_detail {

inline void write_report_csv(std::ostream& os, const BoundReport& rep) {
    os << "theorem,lhs_norm,rhs_norm,ratio,constant,satisfied";
    for (const auto& [k, v] : rep.details) os << "," << k;
    os << "\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        return std::string(buf);
    };
    os << rep.theorem_id << "," << num(rep.lhs_norm) << "," << num(rep.rhs_norm) << ","
       << num(rep.ratio) << "," << num(rep.constant) << ","
       << (rep.applicable ? (rep.satisfied ? "true" : "false") : "not_applicable");
    for (const auto& [k, v] : rep.details) os << "," << num(v);
    os << "\n";
}

inline std::ofstream open_out(const std::filesystem::path& dir, const std::string& name) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string());
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw IoError("cannot write " + (dir / name).string());
    return os;
}

}  // namespace cli_detail

// Execute a validated run description. Returns the process exit status.
inline int dispatch(const RunConfig& rc) {
    const std::filesystem::path out = rc.out_dir;
    auto say = [&](const std::string& line) {
        if (!rc.quiet) std::cout << line << "\n";
    };

    switch (rc.command) {
        case Command::preset: {
            ExperimentResult res = run_preset(rc.preset_id, rc.overrides);
            emit_tables(res, out);
            say("preset " + res.id + ": " + std::to_string(res.rows.size()) +
                " rows written to " + out.string());
            for (const auto& row : res.rows) {
                char buf[160];
                std::snprintf(buf, sizeof(buf), "  %s=%-8g ratio=%-12.6g %s",
                              res.parameter_name.c_str(), row.parameter, row.report.ratio,
                              row.report.applicable
                                  ? (row.report.satisfied ? "ok" : "VIOLATED")
                                  : "not applicable");
                say(buf);
            }
            return 0;
        }
        case Command::solve: {
            const ProblemSpec& prob = *rc.problem;
            auto mesh = Mesh::build(prob.domain, rc.mesh_h);
            Field u(mesh);
            if (prob.forcing.depends_on_u()) {
                auto res = solve_semilinear(prob, mesh, rc.solver_tol, rc.solver_max_iter,
                                            rc.solver_method);
                for (const auto& w : res.warnings) say("warning: " + w);
                say("semilinear solve converged in " + std::to_string(res.iterations) +
                    " iterations");
                u = res.u;
            } else {
                SolveInfo info;
                u = solve_linear(prob, mesh, &info);
                say("linear solve: residual " + std::to_string(info.residual_inf));
                if (!info.frozen_cells.empty())
                    say("warning: " + std::to_string(info.frozen_cells.size()) +
                        " decoupled cell(s) pinned to zero (non-physical)");
            }
            auto os = cli_detail::open_out(out, "solution.csv");
            write_profile_csv(os, u);
            char buf[96];
            std::snprintf(buf, sizeof(buf), "|u|_L2(Omega) = %.9g", l2_omega(u));
            say(buf);
            say("solution written to " + (out / "solution.csv").string());
            return 0;
        }
        case Command::audit: {
            const ProblemSpec& prob = *rc.problem;
            auto mesh = Mesh::build(prob.domain, rc.mesh_h);
            BoundReport rep;
            switch (rc.audit_kind) {
                case AuditKind::forcing:
                    rep = audit_forcing(prob, *rc.perturbed, mesh);
                    break;
                case AuditKind::collar: {
                    auto [energy, op] = audit_collar(prob, *rc.perturbed, mesh);
                    rep = energy;
                    rep.details.emplace_back("lop_ratio", op.ratio);
                    rep.details.emplace_back("lop_constant", op.constant);
                    break;
                }
                case AuditKind::kernel_slice:
                    rep = audit_kernel(prob, *rc.perturbed, mesh,
                                       KernelAuditVariant::slice_norms);
                    break;
                case AuditKind::kernel_l2:
                    rep = audit_kernel(prob, *rc.perturbed, mesh,
                                       KernelAuditVariant::l2_norm);
                    break;
                case AuditKind::bond_removal:
                    rep = audit_bond_removal(prob, *rc.excised, mesh);
                    break;
                case AuditKind::nonlinear:
                    rep = audit_nonlinear(prob, *rc.perturbed, mesh,
                                          NonlinearDataNorm::analytic_sup, rc.solver_tol,
                                          rc.solver_max_iter);
                    break;
            }
            auto os = cli_detail::open_out(out, "audit.csv");
            cli_detail::write_report_csv(os, rep);
            char buf[200];
            std::snprintf(buf, sizeof(buf),
                          "%s: lhs=%.6g rhs=%.6g ratio=%.6g constant=%.6g -> %s",
                          rep.theorem_id.c_str(), rep.lhs_norm, rep.rhs_norm, rep.ratio,
                          rep.constant,
                          rep.applicable ? (rep.satisfied ? "satisfied" : "VIOLATED")
                                         : "not applicable");
            say(buf);
            say("report written to " + (out / "audit.csv").string());
            return 0;
        }
        case Command::identities: {
            ProblemSpec prob = rc.problem ? *rc.problem : default_identities_problem();
            auto mesh = Mesh::build(prob.domain, rc.mesh_h);
            auto reports = run_identity_audits(prob, mesh);
            auto os = cli_detail::open_out(out, "identities.csv");
            os << "name,residual,tolerance,pass\n";
            bool all = true;
            char buf[160];
            for (const auto& r : reports) {
                std::snprintf(buf, sizeof(buf), "%s,%.6g,%.6g,%s\n", r.name.c_str(),
                              r.residual, r.tolerance, r.pass ? "true" : "false");
                os << buf;
                std::snprintf(buf, sizeof(buf), "  %-24s residual %-12.3g tol %-9.1g %s",
                              r.name.c_str(), r.residual, r.tolerance,
                              r.pass ? "pass" : "FAIL");
                say(buf);
                all = all && r.pass;
            }
            say(all ? "all identities hold" : "identity audit FAILED");
            return all ? 0 : 2;
        }
    }
    return 2;
}

}  // namespace nonloc
