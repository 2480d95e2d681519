#include "blowuplab/scenario.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace blowuplab::scenario {

using nlohmann::json;

const char* const tool_version = "blowuplab 0.1.0";

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

namespace {

[[noreturn]] void parse_error_with_position(const std::string& path, const std::string& text,
                                            std::size_t byte, const std::string& what) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    throw SchemaError(path + ": line " + std::to_string(line) + " column " +
                      std::to_string(col) + ": " + what);
}

void reject_unknown(const json& obj, const std::string& section,
                    const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw SchemaError("unknown key '" + it.key() + "' in section '" + section + "'");
}

double get_num(const json& obj, const std::string& section, const std::string& key,
               double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number())
        throw SchemaError("'" + section + "." + key + "' must be a number");
    return obj[key].get<double>();
}

double require_num(const json& obj, const std::string& section, const std::string& key) {
    if (!obj.contains(key))
        throw SchemaError("missing required key '" + section + "." + key + "'");
    if (!obj[key].is_number())
        throw SchemaError("'" + section + "." + key + "' must be a number");
    return obj[key].get<double>();
}

std::string get_str(const json& obj, const std::string& section, const std::string& key,
                    const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string())
        throw SchemaError("'" + section + "." + key + "' must be a string");
    return obj[key].get<std::string>();
}

ViscosityLaw parse_viscosity(const json& v) {
    reject_unknown(v, "model.viscosity", {"type", "c", "delta", "mu", "lambda"});
    ViscosityLaw law;
    const std::string type = get_str(v, "model.viscosity", "type", "none");
    if (type == "none") {
        law.kind = ViscosityKind::None;
    } else if (type == "power_law") {
        law.kind = ViscosityKind::PowerLaw;
        law.c = get_num(v, "model.viscosity", "c", 1.0);
        law.delta = get_num(v, "model.viscosity", "delta", 1.0);
    } else if (type == "constants") {
        law.kind = ViscosityKind::Constants;
        law.mu = get_num(v, "model.viscosity", "mu", 0.0);
        law.lambda = get_num(v, "model.viscosity", "lambda", 0.0);
    } else {
        throw SchemaError("unknown viscosity type '" + type + "'");
    }
    return law;
}

DragLaw parse_drag(const json& v) {
    reject_unknown(v, "model.drag", {"type", "h", "beta"});
    DragLaw law;
    const std::string type = get_str(v, "model.drag", "type", "none");
    if (type == "none")
        law.kind = DragKind::None;
    else if (type == "linear")
        law.kind = DragKind::Linear;
    else if (type == "density_linear")
        law.kind = DragKind::DensityLinear;
    else if (type == "power_law")
        law.kind = DragKind::PowerLaw;
    else if (type == "anti_linear")
        law.kind = DragKind::AntiLinear;
    else
        throw SchemaError("unknown drag type '" + type + "'");
    const std::string h = get_str(v, "model.drag", "h", "one");
    if (h == "one")
        law.h = DragH::One;
    else if (h == "rho")
        law.h = DragH::Rho;
    else
        throw SchemaError("unknown drag h choice '" + h + "'");
    law.beta = get_num(v, "model.drag", "beta", 1.0);
    return law;
}

CollisionLaw parse_collision(const json& v) {
    reject_unknown(v, "model.collision", {"type", "psi"});
    CollisionLaw law;
    const std::string type = get_str(v, "model.collision", "type", "none");
    if (type == "none")
        law.kind = CollisionKind::None;
    else if (type == "global_alignment")
        law.kind = CollisionKind::GlobalAlignment;
    else if (type == "local_alignment")
        law.kind = CollisionKind::LocalAlignment;
    else
        throw SchemaError("unknown collision type '" + type + "'");
    if (v.contains("psi")) {
        const json& p = v["psi"];
        reject_unknown(p, "model.collision.psi", {"type", "value", "length"});
        const std::string pk = get_str(p, "model.collision.psi", "type", "constant");
        if (pk == "constant")
            law.psi.kind = PsiKind::Constant;
        else if (pk == "gaussian")
            law.psi.kind = PsiKind::Gaussian;
        else
            throw SchemaError("unknown psi type '" + pk + "'");
        law.psi.value = get_num(p, "model.collision.psi", "value", 1.0);
        law.psi.length = get_num(p, "model.collision.psi", "length", 1.0);
    }
    return law;
}

ModelParams parse_model(const json& m) {
    reject_unknown(m, "model", {"d", "gamma", "viscosity", "drag", "collision", "thick_sprays"});
    ModelParams p;
    p.d = static_cast<int>(get_num(m, "model", "d", 1.0));
    p.gamma = require_num(m, "model", "gamma");
    if (m.contains("viscosity")) p.viscosity = parse_viscosity(m["viscosity"]);
    if (m.contains("drag")) p.drag = parse_drag(m["drag"]);
    if (m.contains("collision")) p.collision = parse_collision(m["collision"]);
    if (m.contains("thick_sprays")) {
        const json& t = m["thick_sprays"];
        reject_unknown(t, "model.thick_sprays", {"rho_p", "r"});
        ThickSprayConstants tc;
        tc.rho_p = require_num(t, "model.thick_sprays", "rho_p");
        tc.r = require_num(t, "model.thick_sprays", "r");
        p.thick = tc;
    }
    p.validate();
    return p;
}

criteria::TheoremId parse_theorem(const std::string& s) {
    if (s == "auto") return criteria::TheoremId::Auto;
    if (s == "2.1") return criteria::TheoremId::Thm21;
    if (s == "2.2") return criteria::TheoremId::Thm22;
    if (s == "corollary-2.1") return criteria::TheoremId::Cor21;
    if (s == "4.1") return criteria::TheoremId::Thm41;
    if (s == "4.2") return criteria::TheoremId::Thm42;
    if (s == "4.3") return criteria::TheoremId::Thm43;
    throw SchemaError("unknown theorem '" + s + "'");
}

criteria::BranchId parse_branch(const std::string& s) {
    if (s == "general") return criteria::BranchId::General;
    if (s == "delta-eq-gamma") return criteria::BranchId::DeltaEqGamma;
    if (s == "power") return criteria::BranchId::PowerBranch;
    if (s == "constant-viscosity") return criteria::BranchId::ConstantVisc;
    if (s == "alpha") return criteria::BranchId::Alpha;
    throw SchemaError("unknown branch '" + s + "'");
}

void parse_system(const json& v, Scenario& sc) {
    reject_unknown(v, "system", {"kind", "rho_max", "theorem", "branch", "m_mu_override"});
    const std::string kind = get_str(v, "system", "kind", "vlasov_ns");
    if (kind == "vlasov_ns")
        sc.system.kind = criteria::SystemKind::VlasovNS;
    else if (kind == "isentropic_ns")
        sc.system.kind = criteria::SystemKind::IsentropicNS;
    else if (kind == "two_phase")
        sc.system.kind = criteria::SystemKind::TwoPhase;
    else if (kind == "thick_sprays")
        sc.system.kind = criteria::SystemKind::ThickSprays;
    else
        throw SchemaError("unknown system kind '" + kind + "'");
    if (v.contains("rho_max")) sc.system.rho_max = require_num(v, "system", "rho_max");
    sc.gate_options.theorem = parse_theorem(get_str(v, "system", "theorem", "auto"));
    if (v.contains("branch")) sc.gate_options.branch = parse_branch(v["branch"].get<std::string>());
    if (v.contains("m_mu_override"))
        sc.gate_options.m_mu_override = require_num(v, "system", "m_mu_override");
}

void parse_initial(const json& v, Scenario& sc, const std::filesystem::path& base) {
    reject_unknown(v, "initial_data", {"grid", "fluid", "particles", "seed"});
    auto resolve = [&base](const std::string& f) {
        std::filesystem::path p(f);
        return p.is_absolute() ? p.string() : (base / p).string();
    };

    if (v.contains("grid")) {
        const json& g = v["grid"];
        reject_unknown(g, "initial_data.grid", {"x_lo", "x_hi", "cells"});
        sc.initial.grid.x_lo = get_num(g, "initial_data.grid", "x_lo", -5.0);
        sc.initial.grid.x_hi = get_num(g, "initial_data.grid", "x_hi", 5.0);
        sc.initial.grid.cells =
            static_cast<std::size_t>(get_num(g, "initial_data.grid", "cells", 512.0));
    }
    if (v.contains("seed")) sc.initial.seed =
        static_cast<std::uint64_t>(require_num(v, "initial_data", "seed"));

    if (v.contains("fluid")) {
        const json& fj = v["fluid"];
        reject_unknown(fj, "initial_data.fluid",
                       {"family", "amplitude", "sigma", "height", "radius", "velocity_slope",
                        "velocity_window", "velocity_rolloff", "file"});
        auto& fi = sc.initial.fluid;
        const std::string fam = get_str(fj, "initial_data.fluid", "family", "zero");
        if (fam == "zero")
            fi.family = FluidInit::Family::Zero;
        else if (fam == "gaussian_bump")
            fi.family = FluidInit::Family::GaussianBump;
        else if (fam == "uniform_bump")
            fi.family = FluidInit::Family::UniformBump;
        else if (fam == "tabulated")
            fi.family = FluidInit::Family::Tabulated;
        else
            throw SchemaError("unknown fluid family '" + fam + "'");
        fi.amplitude = get_num(fj, "initial_data.fluid", "amplitude", 1.0);
        fi.sigma = get_num(fj, "initial_data.fluid", "sigma", 1.0);
        fi.height = get_num(fj, "initial_data.fluid", "height", 1.0);
        fi.radius = get_num(fj, "initial_data.fluid", "radius", 1.0);
        fi.velocity_slope = get_num(fj, "initial_data.fluid", "velocity_slope", 0.0);
        fi.velocity_window = get_num(fj, "initial_data.fluid", "velocity_window",
                                     std::numeric_limits<double>::infinity());
        fi.velocity_rolloff = get_num(fj, "initial_data.fluid", "velocity_rolloff", 0.0);
        fi.file = get_str(fj, "initial_data.fluid", "file", "");
        if (!fi.file.empty()) fi.file = resolve(fi.file);
        if (fi.family == FluidInit::Family::Tabulated && fi.file.empty())
            throw SchemaError("tabulated fluid family requires 'file'");
    }

    if (v.contains("particles")) {
        const json& pj = v["particles"];
        reject_unknown(pj, "initial_data.particles",
                       {"family", "count", "mass", "x_center", "x_sigma", "temperature",
                        "mean_velocity", "velocity_slope", "file", "mode"});
        auto& pi = sc.initial.particles;
        const std::string fam = get_str(pj, "initial_data.particles", "family", "none");
        if (fam == "none")
            pi.family = ParticleInit::Family::None;
        else if (fam == "maxwellian")
            pi.family = ParticleInit::Family::Maxwellian;
        else if (fam == "mono_kinetic")
            pi.family = ParticleInit::Family::MonoKinetic;
        else if (fam == "tabulated")
            pi.family = ParticleInit::Family::Tabulated;
        else
            throw SchemaError("unknown particle family '" + fam + "'");
        pi.count = static_cast<std::size_t>(get_num(pj, "initial_data.particles", "count", 0.0));
        pi.mass = get_num(pj, "initial_data.particles", "mass", 0.0);
        pi.x_center = get_num(pj, "initial_data.particles", "x_center", 0.0);
        pi.x_sigma = get_num(pj, "initial_data.particles", "x_sigma", 1.0);
        pi.temperature = get_num(pj, "initial_data.particles", "temperature", 1.0);
        pi.mean_velocity = get_num(pj, "initial_data.particles", "mean_velocity", 0.0);
        pi.velocity_slope = get_num(pj, "initial_data.particles", "velocity_slope", 0.0);
        pi.file = get_str(pj, "initial_data.particles", "file", "");
        if (!pi.file.empty()) pi.file = resolve(pi.file);
        const std::string mode = get_str(pj, "initial_data.particles", "mode", "kinetic");
        if (mode == "kinetic")
            pi.mode = ParticleCloud::Mode::Kinetic;
        else if (mode == "mono_kinetic")
            pi.mode = ParticleCloud::Mode::MonoKinetic;
        else
            throw SchemaError("unknown particle mode '" + mode + "'");
        if (pi.family == ParticleInit::Family::Tabulated && pi.file.empty())
            throw SchemaError("tabulated particle family requires 'file'");
    }
}

sim::IdentityTolerances parse_tolerances(const json& v) {
    reject_unknown(v, "sim.tolerances",
                   {"mass_rel", "momentum_scale", "energy_rel", "lemma33_rel",
                    "envelope_slack", "lower_bound_rel", "inertia_path_rel"});
    sim::IdentityTolerances tol;
    tol.mass_rel = get_num(v, "sim.tolerances", "mass_rel", tol.mass_rel);
    tol.momentum_scale = get_num(v, "sim.tolerances", "momentum_scale", tol.momentum_scale);
    tol.energy_rel = get_num(v, "sim.tolerances", "energy_rel", tol.energy_rel);
    tol.lemma33_rel = get_num(v, "sim.tolerances", "lemma33_rel", tol.lemma33_rel);
    tol.envelope_slack = get_num(v, "sim.tolerances", "envelope_slack", tol.envelope_slack);
    tol.lower_bound_rel = get_num(v, "sim.tolerances", "lower_bound_rel", tol.lower_bound_rel);
    tol.inertia_path_rel =
        get_num(v, "sim.tolerances", "inertia_path_rel", tol.inertia_path_rel);
    return tol;
}

sim::SimConfig parse_sim(const json& v) {
    reject_unknown(v, "sim",
                   {"cfl", "t_end", "max_steps", "dt_max", "dt_floor", "sample_stride",
                    "sample_dt", "gradient_threshold", "drag_substeps", "vacuum_rho",
                    "tolerances"});
    sim::SimConfig cfg;
    cfg.cfl = get_num(v, "sim", "cfl", cfg.cfl);
    cfg.t_end = require_num(v, "sim", "t_end");
    cfg.dt_max = get_num(v, "sim", "dt_max", cfg.dt_max);
    cfg.max_steps = static_cast<std::uint64_t>(
        get_num(v, "sim", "max_steps", static_cast<double>(cfg.max_steps)));
    cfg.dt_floor = get_num(v, "sim", "dt_floor", cfg.dt_floor);
    cfg.sample_stride = static_cast<std::uint64_t>(
        get_num(v, "sim", "sample_stride", static_cast<double>(cfg.sample_stride)));
    cfg.sample_dt = get_num(v, "sim", "sample_dt", cfg.sample_dt);
    cfg.gradient_threshold = get_num(v, "sim", "gradient_threshold", cfg.gradient_threshold);
    cfg.drag_substeps = static_cast<int>(get_num(v, "sim", "drag_substeps", 1.0));
    cfg.vacuum_rho = get_num(v, "sim", "vacuum_rho", cfg.vacuum_rho);
    cfg.validate();
    return cfg;
}

Scenario parse(const json& j, const std::string& path, const std::string& bytes) {
    reject_unknown(j, "(root)", {"model", "system", "initial_data", "sim", "outputs"});
    if (!j.contains("model")) throw SchemaError("missing required section 'model'");
    if (!j.contains("initial_data")) throw SchemaError("missing required section 'initial_data'");

    Scenario sc;
    sc.source_path = path;
    sc.raw_bytes = bytes;
    sc.model = parse_model(j["model"]);
    if (j.contains("system")) parse_system(j["system"], sc);
    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    parse_initial(j["initial_data"], sc, base);
    if (j.contains("sim")) {
        sc.simcfg = parse_sim(j["sim"]);
        if (j["sim"].contains("tolerances"))
            sc.tolerances = parse_tolerances(j["sim"]["tolerances"]);
    }
    if (j.contains("outputs")) {
        const json& o = j["outputs"];
        reject_unknown(o, "outputs", {"dir", "formats"});
        sc.out_dir = get_str(o, "outputs", "dir", "");
        if (o.contains("formats")) {
            if (!o["formats"].is_array()) throw SchemaError("'outputs.formats' must be an array");
            sc.formats.clear();
            for (const auto& f : o["formats"]) sc.formats.push_back(f.get<std::string>());
        }
    }
    return sc;
}

} // namespace

Scenario load(const std::string& path) {
    return load_with_overrides(path, {});
}

Scenario load_with_overrides(const std::string& path,
                             const std::vector<std::string>& overrides) {
    const std::string bytes = read_file(path);
    json j;
    try {
        j = json::parse(bytes);
    } catch (const json::parse_error& e) {
        parse_error_with_position(path, bytes, e.byte, e.what());
    }
    for (const std::string& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw SchemaError("override '" + ov + "' is not of the form key=value");
        const std::string key = ov.substr(0, eq);
        const std::string val = ov.substr(eq + 1);
        json parsed;
        try {
            parsed = json::parse(val);
        } catch (const json::parse_error&) {
            parsed = val; // bare strings allowed
        }
        json* node = &j;
        std::size_t pos = 0;
        while (true) {
            const auto dot = key.find('.', pos);
            const std::string part = key.substr(pos, dot == std::string::npos
                                                          ? std::string::npos
                                                          : dot - pos);
            if (part.empty()) throw SchemaError("override key '" + key + "' has an empty part");
            if (dot == std::string::npos) {
                (*node)[part] = parsed;
                break;
            }
            node = &(*node)[part];
            pos = dot + 1;
        }
    }
    return parse(j, path, bytes);
}

std::string manifest_to_json(const RunManifest& m) {
    json j;
    j["scenario_hash"] = m.scenario_hash;
    j["seed"] = m.seed;
    j["tool_version"] = m.tool_version;
    j["created_utc"] = m.created_utc;
    j["artifacts"] = m.artifacts;
    return j.dump(2) + "\n";
}

RunManifest manifest_from_json_file(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw MissingManifest("manifest unreadable: " + std::string(e.what()));
    } catch (const IoError&) {
        throw MissingManifest("no manifest at " + path);
    }
    RunManifest m;
    m.scenario_hash = j.value("scenario_hash", "");
    m.seed = j.value("seed", 0ULL);
    m.tool_version = j.value("tool_version", "");
    m.created_utc = j.value("created_utc", "");
    if (j.contains("artifacts"))
        for (const auto& a : j["artifacts"]) m.artifacts.push_back(a.get<std::string>());
    return m;
}

} // namespace blowuplab::scenario
