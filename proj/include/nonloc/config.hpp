#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "nonloc/errors.hpp"
#include "nonloc/experiments.hpp"
#include "nonloc/problem.hpp"
#include "nonloc/solve.hpp"

namespace nonloc {

enum class Command { solve, audit, preset, identities };

enum class AuditKind { forcing, collar, kernel_slice, kernel_l2, bond_removal, nonlinear };

struct RunConfig {
    Command command = Command::solve;
    std::string out_dir = "out";
    bool quiet = false;

    // preset command
    std::string preset_id;
    PresetOverrides overrides;

    // solve / audit / identities
    std::optional<ProblemSpec> problem;
    double mesh_h = 1.0 / 200.0;
    double solver_tol = 1e-10;
    int solver_max_iter = 500;
    SemilinearMethod solver_method = SemilinearMethod::automatic;

    // audit command
    AuditKind audit_kind = AuditKind::forcing;
    std::optional<ProblemSpec> perturbed;
    std::optional<Interval> excised;
};

namespace cfg_detail {

using json = nlohmann::json;

inline std::pair<int, int> line_column(const std::string& text, size_t byte) {
    int line = 1, col = 1;
    for (size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

inline void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                           const std::string& path) {
    if (!obj.is_object()) throw ConfigError("config: " + path + " must be an object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw ConfigError("config: unknown key '" + path + key + "'");
    }
}

inline double number_at(const json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key) || !obj[key].is_number())
        throw ConfigError("config: '" + path + key + "' must be a number");
    return obj[key].get<double>();
}

inline std::vector<double> numbers_at(const json& obj, const char* key,
                                      const std::string& path) {
    if (!obj.contains(key) || !obj[key].is_array())
        throw ConfigError("config: '" + path + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : obj[key]) {
        if (!v.is_number())
            throw ConfigError("config: '" + path + key + "' must be an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

inline Interval interval_at(const json& obj, const char* key, const std::string& path) {
    auto v = numbers_at(obj, key, path);
    if (v.size() != 2)
        throw ConfigError("config: '" + path + key + "' must be [lo, hi]");
    return {v[0], v[1]};
}

inline KernelSpec parse_kernel(const json& j, double delta, const std::string& path) {
    if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
        throw ConfigError("config: '" + path + "family' must name a kernel family");
    const std::string fam = j["family"].get<std::string>();
    if (fam == "constant") {
        reject_unknown(j, {"family", "value"}, path);
        return KernelSpec::constant(number_at(j, "value", path), delta);
    }
    if (fam == "power_law") {
        reject_unknown(j, {"family", "eps"}, path);
        const double eps = number_at(j, "eps", path);
        if (eps >= 1.0)
            throw ConfigError("config: '" + path + "eps': integrability requires eps < 1");
        return KernelSpec::power_law(eps, delta);
    }
    if (fam == "heterogeneous_exp") {
        reject_unknown(j, {"family", "eps"}, path);
        return KernelSpec::heterogeneous_exp(number_at(j, "eps", path), delta);
    }
    if (fam == "truncated_gaussian") {
        reject_unknown(j, {"family"}, path);
        return KernelSpec::truncated_gaussian(delta);
    }
    if (fam == "bond_removal") {
        reject_unknown(j, {"family", "base", "excised", "cross_only"}, path);
        if (!j.contains("base"))
            throw ConfigError("config: '" + path + "base' kernel is required");
        KernelSpec base = parse_kernel(j["base"], delta, path + "base.");
        bool cross = j.value("cross_only", false);
        return KernelSpec::bond_removal(std::move(base), interval_at(j, "excised", path),
                                        cross);
    }
    if (fam == "tabulated") {
        reject_unknown(j, {"family", "x_range", "y_range", "nx", "ny", "values",
                           "symmetric"},
                       path);
        return KernelSpec::tabulated(interval_at(j, "x_range", path),
                                     interval_at(j, "y_range", path),
                                     (int)number_at(j, "nx", path),
                                     (int)number_at(j, "ny", path),
                                     numbers_at(j, "values", path), delta,
                                     j.value("symmetric", false));
    }
    throw ConfigError("config: unknown kernel family '" + fam + "'");
}

inline ForcingSpec parse_forcing(const json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("variant") || !j["variant"].is_string())
        throw ConfigError("config: '" + path + "variant' must name a forcing variant");
    const std::string v = j["variant"].get<std::string>();
    if (v == "sinusoid") {
        reject_unknown(j, {"variant", "eps"}, path);
        return ForcingSpec::sinusoid(number_at(j, "eps", path));
    }
    if (v == "sigmoid") {
        reject_unknown(j, {"variant", "eps"}, path);
        return ForcingSpec::sigmoid(number_at(j, "eps", path));
    }
    if (v == "polynomial") {
        reject_unknown(j, {"variant", "coeffs"}, path);
        return ForcingSpec::polynomial(numbers_at(j, "coeffs", path));
    }
    if (v == "zero") {
        reject_unknown(j, {"variant"}, path);
        return ForcingSpec::zero();
    }
    if (v == "arctan") {
        reject_unknown(j, {"variant", "eta", "theta"}, path);
        return ForcingSpec::arctan(number_at(j, "eta", path), number_at(j, "theta", path));
    }
    throw ConfigError("config: unknown forcing variant '" + v + "'");
}

inline CollarData parse_collar(const json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("variant") || !j["variant"].is_string())
        throw ConfigError("config: '" + path + "variant' must name a collar variant");
    const std::string v = j["variant"].get<std::string>();
    if (v == "polynomial_pair") {
        reject_unknown(j, {"variant", "left", "right"}, path);
        return CollarData::polynomial_pair(numbers_at(j, "left", path),
                                           numbers_at(j, "right", path));
    }
    if (v == "piecewise_jump") {
        reject_unknown(j, {"variant", "eps"}, path);
        return CollarData::piecewise_jump(number_at(j, "eps", path));
    }
    if (v == "zero") {
        reject_unknown(j, {"variant"}, path);
        return CollarData::zero();
    }
    if (v == "linear") {
        reject_unknown(j, {"variant"}, path);
        return CollarData::linear();
    }
    throw ConfigError("config: unknown collar variant '" + v + "'");
}

inline ProblemSpec parse_problem(const json& j) {
    reject_unknown(j["domain"], {"omega", "delta"}, "domain.");
    Interval omega = interval_at(j["domain"], "omega", "domain.");
    const double delta = number_at(j["domain"], "delta", "domain.");
    DomainSpec dom(omega, delta);
    if (!j.contains("kernel")) throw ConfigError("config: 'kernel' is required");
    KernelSpec kernel = parse_kernel(j["kernel"], delta, "kernel.");
    ForcingSpec forcing =
        j.contains("forcing") ? parse_forcing(j["forcing"], "forcing.") : ForcingSpec::zero();
    CollarData collar =
        j.contains("collar") ? parse_collar(j["collar"], "collar.") : CollarData::zero();
    return ProblemSpec(dom, std::move(kernel), std::move(forcing), std::move(collar));
}

}  // namespace cfg_detail

// Parse and validate a JSON run description. All numeric parameters are
// range-checked here; no numerical work starts before validation completes.
inline RunConfig parse_config(const std::string& text, Command command) {
    using cfg_detail::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        auto [line, col] = cfg_detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ConfigError("config: parse error at line " + std::to_string(line) +
                          ", column " + std::to_string(col) + ": " + e.what());
    }

    RunConfig rc;
    rc.command = command;

    switch (command) {
        case Command::preset: {
            cfg_detail::reject_unknown(j, {"preset", "overrides", "out_dir"}, "");
            if (!j.contains("preset") || !j["preset"].is_string())
                throw ConfigError("config: 'preset' must name an experiment preset");
            rc.preset_id = j["preset"].get<std::string>();
            bool known = false;
            for (const auto& id : preset_ids()) known = known || id == rc.preset_id;
            if (!known) throw ConfigError("config: unknown preset '" + rc.preset_id + "'");
            if (j.contains("overrides")) {
                const auto& o = j["overrides"];
                cfg_detail::reject_unknown(o, {"h", "grid", "tol", "max_iter"},
                                           "overrides.");
                if (o.contains("h")) rc.overrides.h = cfg_detail::number_at(o, "h", "overrides.");
                if (o.contains("grid"))
                    rc.overrides.grid = cfg_detail::numbers_at(o, "grid", "overrides.");
                if (o.contains("tol"))
                    rc.overrides.tol = cfg_detail::number_at(o, "tol", "overrides.");
                if (o.contains("max_iter"))
                    rc.overrides.max_iter =
                        (int)cfg_detail::number_at(o, "max_iter", "overrides.");
            }
            break;
        }
        case Command::solve:
        case Command::identities:
        case Command::audit: {
            cfg_detail::reject_unknown(j,
                                       {"domain", "kernel", "forcing", "collar", "mesh",
                                        "solver", "audit", "perturbed", "excised",
                                        "out_dir"},
                                       "");
            if (!j.contains("domain"))
                throw ConfigError("config: 'domain' is required");
            rc.problem = cfg_detail::parse_problem(j);
            if (j.contains("mesh")) {
                cfg_detail::reject_unknown(j["mesh"], {"h"}, "mesh.");
                rc.mesh_h = cfg_detail::number_at(j["mesh"], "h", "mesh.");
            }
            if (!(rc.mesh_h > 0.0) || rc.mesh_h >= rc.problem->domain.delta)
                throw ConfigError("config: mesh.h must satisfy 0 < h < delta");
            if (j.contains("solver")) {
                const auto& s = j["solver"];
                cfg_detail::reject_unknown(s, {"tol", "max_iter", "method"}, "solver.");
                if (s.contains("tol")) rc.solver_tol = cfg_detail::number_at(s, "tol", "solver.");
                if (s.contains("max_iter"))
                    rc.solver_max_iter = (int)cfg_detail::number_at(s, "max_iter", "solver.");
                if (s.contains("method")) {
                    const std::string m = s["method"].get<std::string>();
                    if (m == "auto")
                        rc.solver_method = SemilinearMethod::automatic;
                    else if (m == "picard")
                        rc.solver_method = SemilinearMethod::picard;
                    else if (m == "newton")
                        rc.solver_method = SemilinearMethod::newton;
                    else
                        throw ConfigError("config: unknown solver.method '" + m + "'");
                }
            }
            if (command == Command::audit) {
                if (!j.contains("audit") || !j["audit"].is_string())
                    throw ConfigError("config: 'audit' must name an audit kind");
                const std::string a = j["audit"].get<std::string>();
                if (a == "forcing")
                    rc.audit_kind = AuditKind::forcing;
                else if (a == "collar")
                    rc.audit_kind = AuditKind::collar;
                else if (a == "kernel_slice")
                    rc.audit_kind = AuditKind::kernel_slice;
                else if (a == "kernel_l2")
                    rc.audit_kind = AuditKind::kernel_l2;
                else if (a == "bond_removal")
                    rc.audit_kind = AuditKind::bond_removal;
                else if (a == "nonlinear")
                    rc.audit_kind = AuditKind::nonlinear;
                else
                    throw ConfigError("config: unknown audit kind '" + a + "'");

                if (rc.audit_kind == AuditKind::bond_removal) {
                    rc.excised = cfg_detail::interval_at(j, "excised", "");
                } else {
                    if (!j.contains("perturbed"))
                        throw ConfigError("config: 'perturbed' is required for this audit");
                    const auto& p = j["perturbed"];
                    cfg_detail::reject_unknown(p, {"kernel", "forcing", "collar"},
                                               "perturbed.");
                    KernelSpec k = p.contains("kernel")
                                       ? cfg_detail::parse_kernel(
                                             p["kernel"], rc.problem->domain.delta,
                                             "perturbed.kernel.")
                                       : rc.problem->kernel;
                    ForcingSpec f = p.contains("forcing")
                                        ? cfg_detail::parse_forcing(p["forcing"],
                                                                    "perturbed.forcing.")
                                        : rc.problem->forcing;
                    CollarData g = p.contains("collar")
                                       ? cfg_detail::parse_collar(p["collar"],
                                                                  "perturbed.collar.")
                                       : rc.problem->collar;
                    rc.perturbed = ProblemSpec(rc.problem->domain, std::move(k),
                                               std::move(f), std::move(g));
                }
            }
            break;
        }
    }
    if (j.contains("out_dir")) {
        if (!j["out_dir"].is_string())
            throw ConfigError("config: 'out_dir' must be a string");
        rc.out_dir = j["out_dir"].get<std::string>();
    }
    return rc;
}

}  // namespace nonloc
