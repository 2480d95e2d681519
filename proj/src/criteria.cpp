#include "blowuplab/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "blowuplab/csv.hpp"
#include "blowuplab/gamma.hpp"

#include "json.hpp"

namespace blowuplab::criteria {

const char* system_name(SystemKind k) {
    switch (k) {
    case SystemKind::VlasovNS: return "vlasov_ns";
    case SystemKind::IsentropicNS: return "isentropic_ns";
    case SystemKind::TwoPhase: return "two_phase";
    case SystemKind::ThickSprays: return "thick_sprays";
    }
    return "?";
}

const char* theorem_name(TheoremId t) {
    switch (t) {
    case TheoremId::Auto: return "auto";
    case TheoremId::Thm21: return "theorem-2.1";
    case TheoremId::Thm22: return "theorem-2.2";
    case TheoremId::Cor21: return "corollary-2.1";
    case TheoremId::Thm41: return "theorem-4.1";
    case TheoremId::Thm42: return "theorem-4.2";
    case TheoremId::Thm43: return "theorem-4.3";
    }
    return "?";
}

const char* branch_name(BranchId b) {
    switch (b) {
    case BranchId::General: return "general";
    case BranchId::DeltaEqGamma: return "delta-eq-gamma";
    case BranchId::PowerBranch: return "power";
    case BranchId::ConstantVisc: return "constant-viscosity";
    case BranchId::Alpha: return "alpha";
    }
    return "?";
}

double const_C0(double m_rho, int d, double gamma) {
    if (m_rho < 0.0) throw InvalidParams("const_C0: mass must be nonnegative");
    if (d < 1) throw InvalidParams("const_C0: d must be positive");
    if (!(gamma > 1.0)) throw InvalidParams("const_C0: gamma must exceed 1");
    if (m_rho == 0.0) return 0.0;
    const double omega = std::pow(std::numbers::pi, 0.5 * d) / gamma_half_integer(d + 2);
    const double khalf = 0.5 * ((d + 2) * gamma - d);
    return std::pow(omega, 1.0 - gamma) * std::pow(0.5 * m_rho, khalf) / (gamma - 1.0);
}

BranchId resolve_branch(const ModelParams& params, const SystemSpec& sys) {
    if (sys.kind == SystemKind::ThickSprays) return BranchId::Alpha;
    switch (params.viscosity.kind) {
    case ViscosityKind::None:
        return BranchId::General;
    case ViscosityKind::Constants:
        return BranchId::ConstantVisc;
    case ViscosityKind::PowerLaw: {
        const double delta = params.viscosity.delta;
        const double gamma = params.gamma;
        if (delta <= 1.0) return BranchId::General; // mu = c rho, Remark 2.2
        if (std::fabs(delta - gamma) <= 1e-12) return BranchId::DeltaEqGamma;
        if (delta > gamma - 1.0 / params.d && delta < gamma) return BranchId::PowerBranch;
        // delta in (1, gamma - 1/d]: outside the particular theorems, but the
        // general one still applies through the interpolation bounds on M_mu.
        return BranchId::General;
    }
    }
    return BranchId::General;
}

namespace {

struct SystemMoments {
    double I0 = 0, W0 = 0, E0 = 0, J0 = 0;
    std::string J0_kind;
};

SystemMoments system_moments(const MomentVector& mv, const SystemSpec& sys) {
    SystemMoments s;
    switch (sys.kind) {
    case SystemKind::VlasovNS:
        s.I0 = mv.I();
        s.W0 = mv.W();
        s.E0 = mv.E();
        s.J0_kind = "J0";
        break;
    case SystemKind::IsentropicNS:
        s.I0 = mv.I_rho;
        s.W0 = mv.W_rho;
        s.E0 = mv.E_k + mv.E_i;
        s.J0_kind = "J0_tilde";
        break;
    case SystemKind::TwoPhase:
        // the (n, w) phase occupies the kinetic slots
        s.I0 = mv.I();
        s.W0 = mv.W();
        s.E0 = mv.E();
        s.J0_kind = "J0_1";
        break;
    case SystemKind::ThickSprays: {
        if (!mv.alpha)
            throw MissingInput("thick sprays require alpha-weighted moments");
        s.I0 = mv.alpha->I + mv.I_f;
        s.W0 = mv.alpha->W + mv.W_f;
        s.E0 = mv.alpha->E_k + mv.alpha->E_i + mv.E_f;
        s.J0_kind = "J0_alpha";
        break;
    }
    }
    s.J0 = s.I0 - s.W0 + s.E0;
    return s;
}

// Power-branch constant
//   K(J0) = (J0^((g-d')/(g-1)) + c (1+d(d'-1)) m^((g-d')/(g-1)) (g-1)^((d'-g)/(g-1)) (g-d')
//           / (2 (1 - d(g-d'))))^((g-1)/(g-d'))
// with g = gamma, d' = delta.
double power_branch_constant(double J0, double m_rho, int d, double gamma, double delta,
                             double c) {
    const double num = (gamma - delta) / (gamma - 1.0);
    const double addon = c * (1.0 + d * (delta - 1.0)) * std::pow(m_rho, num) *
                         std::pow(gamma - 1.0, (delta - gamma) / (gamma - 1.0)) *
                         (gamma - delta) / (2.0 * (1.0 - d * (gamma - delta)));
    return std::pow(std::pow(J0, num) + addon, 1.0 / num);
}

} // namespace

ConstantsBundle const_envelope_pack(const MomentVector& mv0, const ModelParams& params,
                                    const SystemSpec& sys, BranchId branch,
                                    std::optional<double> m_mu_override,
                                    std::optional<double> m_lambda_override) {
    params.validate();
    const int d = params.d;
    const double gamma = params.gamma;
    const double q = 0.5 * d * (gamma - 1.0);
    const auto sm = system_moments(mv0, sys);

    ConstantsBundle c;
    c.d = d;
    c.gamma = gamma;
    c.delta = params.viscosity.kind == ViscosityKind::PowerLaw ? params.viscosity.delta : 1.0;
    c.visc_c = params.viscosity.kind == ViscosityKind::PowerLaw ? params.viscosity.c : 0.0;
    c.m_rho = mv0.m_rho;
    c.m_f = mv0.m_f;
    c.I0 = sm.I0;
    c.W0 = sm.W0;
    c.E0 = sm.E0;
    c.J0 = sm.J0;
    c.J0_kind = sm.J0_kind;
    c.C0 = const_C0(mv0.m_rho, d, gamma);

    // M_mu, M_lambda bound the L1 norms of the viscosity coefficients; the
    // power-law default is the mass/energy interpolation bound.
    switch (params.viscosity.kind) {
    case ViscosityKind::None:
        c.M_mu = 0.0;
        c.M_lambda = 0.0;
        break;
    case ViscosityKind::PowerLaw: {
        const double delta = params.viscosity.delta;
        const double e = (delta - 1.0) / (gamma - 1.0);
        c.M_mu = params.viscosity.c * std::pow(mv0.m_rho, (gamma - delta) / (gamma - 1.0)) *
                 std::pow(gamma - 1.0, e) * std::pow(sm.E0, e);
        c.M_lambda = 2.0 * (delta - 1.0) * c.M_mu;
        c.nu = 0.5 * (1.0 + d * (delta - 1.0));
        break;
    }
    case ViscosityKind::Constants:
        // integrals of constant coefficients over R^d are unbounded; the
        // corollary route does not use them
        c.M_mu = 0.0;
        c.M_lambda = 0.0;
        break;
    }
    if (m_mu_override) {
        c.M_mu = *m_mu_override;
        c.M_lambda = params.viscosity.kind == ViscosityKind::PowerLaw
                         ? 2.0 * (params.viscosity.delta - 1.0) * c.M_mu
                         : 0.0;
    }
    if (m_lambda_override) c.M_lambda = *m_lambda_override;

    // Inertia-path coefficients of the selected theorem.
    switch (branch) {
    case BranchId::General:
    case BranchId::DeltaEqGamma:
    case BranchId::PowerBranch:
        c.C1 = sm.W0 + sm.E0 + 2.0 * d * c.M_mu;
        c.C2 = 0.5 * (0.5 * c.M_mu + std::max(2.0, d * (gamma - 1.0)) * sm.E0);
        break;
    case BranchId::ConstantVisc:
        c.C1 = sm.W0;
        c.C2 = std::max(1.0, q) * sm.E0;
        break;
    case BranchId::Alpha: {
        if (!mv0.alpha)
            throw MissingInput("thick sprays require alpha-weighted moments");
        if (!sys.rho_max)
            throw MissingInput("thick sprays require a finite rho_max bound");
        c.p_max = std::pow(*sys.rho_max, gamma);
        c.C0_alpha = const_C0(mv0.alpha->m, d, gamma);
        c.C1 = sm.W0;
        c.C2 = std::max(1.0, q) * sm.E0 + 0.5 * d * (*c.p_max) * mv0.m_f;
        break;
    }
    }

    if (d * (gamma - 1.0) < 1.0)
        c.C3 = sm.J0 + (0.5 * c.M_mu + 0.25 * d * c.M_lambda) / (1.0 - d * (gamma - 1.0));

    if (params.viscosity.kind == ViscosityKind::PowerLaw) {
        const double delta = params.viscosity.delta;
        if (delta > 1.0 && delta < gamma && delta > gamma - 1.0 / d) {
            c.K_power = power_branch_constant(sm.J0, mv0.m_rho, d, gamma, delta,
                                              params.viscosity.c);
            if (sys.kind == SystemKind::IsentropicNS) c.C4 = c.K_power;
            if (sys.kind == SystemKind::TwoPhase) c.C5 = c.K_power;
        }
    }

    return c;
}

ConstantsBundle const_envelope_pack(const MomentVector& mv0, const ModelParams& params,
                                    const SystemSpec& sys,
                                    std::optional<double> m_mu_override,
                                    std::optional<double> m_lambda_override) {
    return const_envelope_pack(mv0, params, sys, resolve_branch(params, sys),
                               m_mu_override, m_lambda_override);
}

double envelope_J(BranchId branch, const ConstantsBundle& c, double t) {
    if (!(t >= 0.0)) throw InvalidParams("envelope_J: t must be nonnegative");
    const double s = t + 1.0;
    const double growth = 2.0 - c.d * (c.gamma - 1.0);

    switch (branch) {
    case BranchId::General:
        if (!c.C3) throw RegimeError("Lemma 3.4 envelope requires d(gamma-1) < 1");
        return *c.C3 * std::pow(s, growth);

    case BranchId::DeltaEqGamma: {
        if (!(growth > 0.0)) throw RegimeError("delta = gamma branch requires d(gamma-1) < 2");
        const double b = c.visc_c * (c.gamma - 1.0) * 0.5 * (1.0 + c.d * (c.delta - 1.0));
        return c.J0 * std::exp(b) * std::pow(s, growth);
    }

    case BranchId::PowerBranch: {
        // exact integral of the Lemma 3.5 differential inequality; tighter
        // than (and implying) the displayed K(J0) (t+1)^(2-d(gamma-1)) form
        if (!(growth > 0.0)) throw RegimeError("power branch requires d(gamma-1) < 2");
        const double beta = (c.delta - 1.0) / (c.gamma - 1.0);
        if (!(beta > 0.0 && beta < 1.0)) throw RegimeError("power branch requires 1 < delta < gamma");
        const double a = growth;
        const double b = c.visc_c * (1.0 + c.d * (c.delta - 1.0)) *
                         std::pow(c.m_rho, (c.gamma - c.delta) / (c.gamma - 1.0)) *
                         std::pow(c.gamma - 1.0, beta) / 2.0;
        const double om = 1.0 - beta;
        const double expo = 2.0 * beta + a * om;
        const double g = std::pow(c.J0, om) * std::pow(s, a * om) +
                         b * om / (1.0 - expo) *
                             (std::pow(s, 1.0 - 2.0 * beta) - std::pow(s, a * om));
        return std::pow(g, 1.0 / om);
    }

    case BranchId::ConstantVisc:
    case BranchId::Alpha:
        return growth > 0.0 ? c.J0 * std::pow(s, growth) : c.J0;
    }
    return 0.0;
}

double inertia_path(const ConstantsBundle& c, double t) {
    return c.I0 + c.C1 * t + c.C2 * t * t;
}

double lower_bound_Ei(double C0, double q, double I_path_at_t) {
    if (C0 == 0.0) return 0.0;
    if (!(I_path_at_t > 0.0))
        throw InvalidParams("lower_bound_Ei: inertia path must be positive");
    return C0 / std::pow(I_path_at_t, q);
}

double lower_bound_Ei(const ConstantsBundle& c, BranchId branch, double t) {
    const double C0 = branch == BranchId::Alpha ? c.C0_alpha.value_or(0.0) : c.C0;
    return lower_bound_Ei(C0, c.q(), inertia_path(c, t));
}

namespace {

void check_regime(BranchId branch, const ModelParams& params) {
    const double g = params.gamma;
    const double dinv = 1.0 / params.d;
    switch (branch) {
    case BranchId::General:
        if (!(g > 1.0 && g < 1.0 + dinv))
            throw RegimeError("general case requires 1 < gamma < 1 + 1/d");
        break;
    case BranchId::DeltaEqGamma: {
        if (!(g > 1.0 && g < 1.0 + 2.0 * dinv))
            throw RegimeError("delta = gamma case requires 1 < gamma < 1 + 2/d");
        if (params.viscosity.kind != ViscosityKind::PowerLaw)
            throw RegimeError("delta = gamma case requires power-law viscosity");
        const double delta = params.viscosity.delta;
        if (std::fabs(delta - g) > 1e-12)
            throw RegimeError("delta = gamma branch requested but delta != gamma");
        if (!(delta > 1.0))
            throw RegimeError("particular case requires delta in (1, gamma]");
        break;
    }
    case BranchId::PowerBranch: {
        if (!(g > 1.0 && g < 1.0 + 2.0 * dinv))
            throw RegimeError("power branch requires 1 < gamma < 1 + 2/d");
        if (params.viscosity.kind != ViscosityKind::PowerLaw)
            throw RegimeError("power branch requires power-law viscosity");
        const double delta = params.viscosity.delta;
        if (!(delta > 1.0 && delta < g && delta > g - dinv))
            throw RegimeError("power branch requires gamma - 1/d < delta < gamma, delta > 1");
        break;
    }
    case BranchId::ConstantVisc:
        if (!(g > 1.0 && g <= 1.0 + 2.0 * dinv))
            throw RegimeError("corollary requires 1 < gamma <= 1 + 2/d");
        if (params.viscosity.kind == ViscosityKind::PowerLaw)
            throw RegimeError("corollary 2.1 applies to constant viscosity coefficients");
        break;
    case BranchId::Alpha:
        if (!(g > 1.0 && g <= 1.0 + 2.0 * dinv))
            throw RegimeError("theorem 4.3 requires 1 < gamma <= 1 + 2/d");
        break;
    }
}

TheoremId canonical_theorem(SystemKind sys, BranchId branch) {
    switch (sys) {
    case SystemKind::VlasovNS:
        if (branch == BranchId::General) return TheoremId::Thm21;
        if (branch == BranchId::ConstantVisc) return TheoremId::Cor21;
        return TheoremId::Thm22;
    case SystemKind::IsentropicNS:
        if (branch == BranchId::ConstantVisc) return TheoremId::Cor21;
        return TheoremId::Thm41;
    case SystemKind::TwoPhase:
        return TheoremId::Thm42;
    case SystemKind::ThickSprays:
        return TheoremId::Thm43;
    }
    return TheoremId::Auto;
}

void check_theorem_request(TheoremId req, SystemKind sys, BranchId branch) {
    if (req == TheoremId::Auto) return;
    const TheoremId canon = canonical_theorem(sys, branch);
    if (req != canon)
        throw RegimeError(std::string("requested ") + theorem_name(req) + " but " +
                          system_name(sys) + " with the given viscosity resolves to " +
                          theorem_name(canon));
}

} // namespace

CriterionReport gate(const SystemSpec& sys, const ModelParams& params,
                     const MomentVector& mv0, const GateOptions& opt) {
    params.validate();
    if (sys.kind == SystemKind::ThickSprays && !sys.rho_max)
        throw MissingInput("thick sprays require rho_max");

    BranchId branch = opt.branch ? *opt.branch : resolve_branch(params, sys);
    check_regime(branch, params);
    check_theorem_request(opt.theorem, sys.kind, branch);

    CriterionReport rep;
    rep.system = system_name(sys.kind);
    rep.theorem = theorem_name(canonical_theorem(sys.kind, branch));
    rep.branch = branch_name(branch);
    rep.constants = const_envelope_pack(mv0, params, sys, branch, opt.m_mu_override,
                                        opt.m_lambda_override);
    const ConstantsBundle& c = rep.constants;
    const double q = c.q();

    double lhs = c.C0, rhs = 0.0;
    switch (branch) {
    case BranchId::General:
        rhs = c.C2 * *c.C3;
        rep.notes.push_back("limit constants: C2*C3 = " + csv::format(c.C2 * *c.C3) +
                            ", leading-order C2^q*C3 = " +
                            csv::format(std::pow(c.C2, q) * *c.C3) +
                            "; the numeric crossing decides T*");
        if (params.viscosity.kind == ViscosityKind::None)
            rep.notes.push_back("mu = lambda = 0: general case applied with M_mu = M_lambda = 0");
        if (params.viscosity.kind == ViscosityKind::PowerLaw && params.viscosity.delta <= 1.0)
            rep.notes.push_back("mu = c rho: M_mu = c m_rho, M_lambda = 0");
        break;
    case BranchId::DeltaEqGamma: {
        const double b = c.visc_c * (c.gamma - 1.0) * *c.nu;
        rhs = c.C2 * c.J0 * std::exp(b);
        break;
    }
    case BranchId::PowerBranch:
        rhs = c.C2 * *c.K_power;
        break;
    case BranchId::ConstantVisc:
        rhs = std::pow(std::max(1.0, q) * c.E0, q) * c.J0;
        break;
    case BranchId::Alpha:
        lhs = *c.C0_alpha;
        rhs = std::pow(std::max(1.0, q) * c.E0 + 0.5 * c.d * *c.p_max * c.m_f, q) * c.J0;
        break;
    }

    rep.margin = lhs - rhs;
    rep.gate = rep.margin > 0.0;
    rep.notes.push_back(std::string("J0 variant: ") + c.J0_kind + " = " + csv::format(c.J0));
    if (c.J0 < 0.0)
        rep.notes.push_back("warning: J0 < 0; admissible data satisfy J0 >= E_i(0) >= 0");

    if (rep.gate && opt.solve_lifespan) {
        LifespanProblem prob;
        prob.C0 = lhs;
        prob.q = q;
        prob.I0 = c.I0;
        prob.A1 = c.C1;
        prob.A2 = c.C2;
        prob.envelope = [branch, c](double t) { return envelope_J(branch, c, t); };
        try {
            rep.lifespan = lifespan_upper_bound(prob);
        } catch (const NoCrossing& e) {
            rep.notes.push_back(std::string("no crossing: ") + e.what());
        }
    }
    return rep;
}

LifespanBound lifespan_upper_bound(const LifespanProblem& p) {
    if (!(p.C0 > 0.0)) throw NoCrossing("C0 = 0: the necessary inequality never fails");

    auto phi = [&p](double t) {
        const double path = p.I0 + p.A1 * t + p.A2 * t * t;
        const double s = t + 1.0;
        const double upper = p.envelope(t) / (s * s);
        if (!(path > 0.0)) return -std::numeric_limits<double>::infinity();
        return upper - p.C0 / std::pow(path, p.q);
    };

    // log grid scan for the last sign change
    const int K = 4096;
    std::vector<double> grid;
    grid.reserve(K + 1);
    grid.push_back(0.0);
    const double lo = 1e-9;
    for (int i = 0; i <= K; ++i)
        grid.push_back(lo * std::pow(p.horizon / lo, static_cast<double>(i) / K));

    int last_ok = -1;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (phi(grid[i]) >= 0.0) last_ok = static_cast<int>(i);

    if (last_ok < 0) {
        // fails already at t = 0: inconsistent constants, T* degenerates to 0
        return {0.0, 0.0, 0.0};
    }
    if (last_ok == static_cast<int>(grid.size()) - 1)
        throw NoCrossing("necessary inequality holds for all t <= " + csv::format(p.horizon));

    double a = grid[last_ok], b = grid[last_ok + 1];
    for (int it = 0; it < 400 && (b - a) > 1e-9 * (1.0 + a); ++it) {
        const double mid = 0.5 * (a + b);
        if (phi(mid) >= 0.0)
            a = mid;
        else
            b = mid;
    }
    LifespanBound out{a, a, b};

    // certificate: the inequality must fail on all of (T*, 10 T*]
    const double t_base = std::max(out.t_star, 1e-12);
    for (int i = 1; i <= 64; ++i) {
        const double t = t_base * std::pow(10.0, static_cast<double>(i) / 64.0);
        if (t <= b) continue;
        if (phi(t) >= 0.0)
            throw NoCrossing("certificate failed: inequality recurs at t = " + csv::format(t));
    }
    return out;
}

std::string report_to_json(const CriterionReport& r) {
    using nlohmann::json;
    json j;
    j["system"] = r.system;
    j["theorem"] = r.theorem;
    j["branch"] = r.branch;

    json c;
    const auto& k = r.constants;
    c["C0"] = k.C0;
    c["C1"] = k.C1;
    c["C2"] = k.C2;
    c["C3"] = k.C3 ? json(*k.C3) : json(nullptr);
    c["C4"] = k.C4 ? json(*k.C4) : json(nullptr);
    c["C5"] = k.C5 ? json(*k.C5) : json(nullptr);
    c["C0_alpha"] = k.C0_alpha ? json(*k.C0_alpha) : json(nullptr);
    c["M_mu"] = k.M_mu;
    c["M_lambda"] = k.M_lambda;
    c["nu"] = k.nu ? json(*k.nu) : json(nullptr);
    c["J0"] = k.J0;
    j["constants"] = c;

    json inputs;
    inputs["J0_kind"] = k.J0_kind;
    inputs["d"] = k.d;
    inputs["gamma"] = k.gamma;
    inputs["delta"] = k.delta;
    inputs["visc_c"] = k.visc_c;
    inputs["m_rho"] = k.m_rho;
    inputs["m_f"] = k.m_f;
    inputs["I0"] = k.I0;
    inputs["W0"] = k.W0;
    inputs["E0"] = k.E0;
    inputs["p_max"] = k.p_max ? json(*k.p_max) : json(nullptr);
    j["inputs"] = inputs;

    j["gate"] = r.gate;
    j["margin"] = r.margin;
    if (r.lifespan) {
        j["lifespan_bound"] = {{"t_star", r.lifespan->t_star},
                               {"bracket_lo", r.lifespan->bracket_lo},
                               {"bracket_hi", r.lifespan->bracket_hi}};
    } else {
        j["lifespan_bound"] = nullptr;
    }
    j["notes"] = r.notes;
    return j.dump(2) + "\n";
}

} // namespace blowuplab::criteria
