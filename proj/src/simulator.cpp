#include "blowuplab/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "blowuplab/csv.hpp"
#include "blowuplab/kernels.hpp"
#include "blowuplab/moments.hpp"

#include "json.hpp"

namespace blowuplab::sim {

namespace {

double sound_speed(double rho, double gamma) {
    return rho > 0.0 ? std::sqrt(gamma * std::pow(rho, gamma - 1.0)) : 0.0;
}

} // namespace

double stable_dt(const SimState& s, const ModelParams& params, const SimConfig& cfg) {
    const auto& f = s.fluid;
    const double dx = f.dx();
    double amax = 0.0;
    double numax = 0.0;
    for (std::size_t i = 0; i < f.cells(); ++i) {
        const double rho = f.rho[i];
        if (rho < cfg.vacuum_rho) continue;
        const double a = std::fabs(f.u[i]) + sound_speed(rho, params.gamma);
        if (a > amax) amax = a;
        const double nu = params.viscosity.stress_coeff(rho) / rho;
        if (nu > numax) numax = nu;
    }
    double dt = std::numeric_limits<double>::infinity();
    if (amax > 0.0) dt = std::min(dt, cfg.cfl * dx / amax);
    if (numax > 0.0) dt = std::min(dt, 0.4 * dx * dx / numax);
    // particles can outrun the gas; keep them from skipping cells
    double vmax = 0.0;
    for (double v : s.particles.v) vmax = std::max(vmax, std::fabs(v));
    if (vmax > 0.0) dt = std::min(dt, cfg.cfl * dx / vmax);
    if (!std::isfinite(dt)) dt = cfg.t_end > 0.0 ? cfg.t_end : 1.0;
    return dt;
}

void step_fluid(SimState& s, const ModelParams& params, const SimConfig& cfg, double dt) {
    auto& f = s.fluid;
    const std::size_t n = f.cells();
    const double dx = f.dx();
    const double gamma = params.gamma;
    const auto& k = kernels::active();

    static thread_local std::vector<double> srho, su, rhoL, uL, pL, cL, rhoR, uR, pR, cR,
        frho, fmom;
    srho.resize(n);
    su.resize(n);
    const std::size_t nf = n + 1;
    rhoL.resize(nf);
    uL.resize(nf);
    pL.resize(nf);
    cL.resize(nf);
    rhoR.resize(nf);
    uR.resize(nf);
    pR.resize(nf);
    cR.resize(nf);
    frho.resize(nf);
    fmom.resize(nf);

    k.minmod_slopes(f.rho.data(), n, srho.data());
    k.minmod_slopes(f.u.data(), n, su.data());

    // face states; outflow boundaries use the edge cell unreconstructed
    for (std::size_t face = 0; face < nf; ++face) {
        if (face == 0) {
            rhoL[face] = f.rho[0];
            uL[face] = f.u[0];
        } else {
            const std::size_t i = face - 1;
            rhoL[face] = std::max(0.0, f.rho[i] + 0.5 * srho[i]);
            uL[face] = f.u[i] + 0.5 * su[i];
        }
        if (face == n) {
            rhoR[face] = f.rho[n - 1];
            uR[face] = f.u[n - 1];
        } else {
            rhoR[face] = std::max(0.0, f.rho[face] - 0.5 * srho[face]);
            uR[face] = f.u[face] - 0.5 * su[face];
        }
    }
    for (std::size_t face = 0; face < nf; ++face) {
        pL[face] = std::pow(rhoL[face], gamma);
        pR[face] = std::pow(rhoR[face], gamma);
        cL[face] = rhoL[face] > 0.0 ? std::sqrt(gamma * pL[face] / rhoL[face]) : 0.0;
        cR[face] = rhoR[face] > 0.0 ? std::sqrt(gamma * pR[face] / rhoR[face]) : 0.0;
    }

    const double amax = k.rusanov_faces(rhoL.data(), uL.data(), pL.data(), cL.data(),
                                        rhoR.data(), uR.data(), pR.data(), cR.data(), nf,
                                        frho.data(), fmom.data());
    if (dt * amax > dx)
        throw CflViolation("dt = " + std::to_string(dt) + " exceeds dx/amax = " +
                           std::to_string(dx / amax) + " at t = " + std::to_string(s.t));

    // explicit viscous stress on interior faces; outflow => zero gradient at
    // the boundary faces
    if (params.viscosity.kind != ViscosityKind::None) {
        for (std::size_t face = 1; face < n; ++face) {
            const double rho_face = 0.5 * (f.rho[face - 1] + f.rho[face]);
            if (rho_face < cfg.vacuum_rho) continue;
            const double K = params.viscosity.stress_coeff(rho_face);
            fmom[face] -= K * (f.u[face] - f.u[face - 1]) / dx;
        }
    }

    // boundary leakage (mass, momentum, energy, inertia flux)
    {
        auto face_energy_flux = [&](std::size_t face) {
            auto one = [&](double rho, double u, double p) {
                return u * (0.5 * rho * u * u + gamma / (gamma - 1.0) * p);
            };
            return 0.5 * (one(rhoL[face], uL[face], pL[face]) +
                          one(rhoR[face], uR[face], pR[face]));
        };
        s.leak_fluid.mass += dt * (frho[n] - frho[0]);
        s.leak_fluid.mom += dt * (fmom[n] - fmom[0]);
        s.leak_fluid.energy += dt * (face_energy_flux(n) - face_energy_flux(0));
        s.leak_fluid.inertia +=
            dt * (0.5 * f.x_hi * f.x_hi * frho[n] - 0.5 * f.x_lo * f.x_lo * frho[0]);
    }

    const double lam = dt / dx;
    const double neg_tol = -1e-13 * std::max(1.0, s.max_rho);
    bool finite = true;
    double max_rho = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double rho_new = f.rho[i] - lam * (frho[i + 1] - frho[i]);
        double mom_new = f.rho[i] * f.u[i] - lam * (fmom[i + 1] - fmom[i]);
        if (rho_new < 0.0) {
            if (rho_new < neg_tol)
                throw NegativeDensity("cell " + std::to_string(i) + " at t=" +
                                      std::to_string(s.t) + ": rho=" + std::to_string(rho_new));
            rho_new = 0.0;
        }
        if (rho_new < cfg.vacuum_rho) {
            // degenerate viscosity vanishes here anyway; park the momentum in
            // the ledger so conservation checks stay exact
            s.vacuum_mom += mom_new * dx;
            f.rho[i] = rho_new;
            f.u[i] = 0.0;
        } else {
            f.rho[i] = rho_new;
            f.u[i] = mom_new / rho_new;
        }
        if (!std::isfinite(f.rho[i]) || !std::isfinite(f.u[i])) finite = false;
        if (f.rho[i] > max_rho) max_rho = f.rho[i];
    }
    if (!finite) throw NonFiniteField("fluid state lost finiteness at t=" + std::to_string(s.t));
    s.max_rho = max_rho;

    double max_du = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (f.rho[i] < cfg.vacuum_rho || f.rho[i + 1] < cfg.vacuum_rho) continue;
        const double du = std::fabs(f.u[i + 1] - f.u[i]);
        if (du > max_du) max_du = du;
    }
    s.max_du = max_du;
}

void couple_drag(SimState& s, const ModelParams& params, const SimConfig& cfg, double dt) {
    if (params.drag.kind == DragKind::None || s.particles.empty()) return;
    auto& f = s.fluid;
    auto& c = s.particles;
    const std::size_t n = f.cells();
    const double dx = f.dx();

    static thread_local std::vector<double> dmom;
    for (int sub = 0; sub < cfg.drag_substeps; ++sub) {
        const double h = dt / cfg.drag_substeps;
        dmom.assign(n, 0.0);
        for (std::size_t p = 0; p < c.size(); ++p) {
            const double rel = (c.x[p] - f.x_lo) / dx - 0.5;
            std::size_t j;
            double theta;
            if (rel <= 0.0) {
                j = 0;
                theta = 0.0;
            } else if (rel >= static_cast<double>(n - 1)) {
                j = n - 2;
                theta = 1.0;
            } else {
                j = static_cast<std::size_t>(rel);
                theta = rel - static_cast<double>(j);
            }
            const double rho_p = (1.0 - theta) * f.rho[j] + theta * f.rho[j + 1];
            if (rho_p < cfg.vacuum_rho) continue; // no gas to drag against
            const double u_p = (1.0 - theta) * f.u[j] + theta * f.u[j + 1];

            double v_new;
            if (params.drag.linear_in_rel()) {
                const double kr = params.drag.rate(rho_p);
                v_new = u_p + (c.v[p] - u_p) * std::exp(-kr * h);
            } else {
                const double v1 =
                    c.v[p] + 0.5 * h * params.drag.force(rho_p, u_p - c.v[p]);
                v_new = c.v[p] + h * params.drag.force(rho_p, u_p - v1);
            }
            const double dp = c.w[p] * (v_new - c.v[p]);
            c.v[p] = v_new;
            dmom[j] -= dp * (1.0 - theta);
            dmom[j + 1] -= dp * theta;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (dmom[i] == 0.0) continue;
            if (f.rho[i] < cfg.vacuum_rho) {
                s.vacuum_mom += dmom[i];
            } else {
                const double mom = f.rho[i] * f.u[i] * dx + dmom[i];
                f.u[i] = mom / (f.rho[i] * dx);
            }
        }
    }
}

void step_particles(SimState& s, const ModelParams& params, const SimConfig& cfg, double dt) {
    (void)cfg;
    auto& c = s.particles;
    if (c.empty()) return;
    auto& f = s.fluid;
    const std::size_t n = f.cells();
    const double dx = f.dx();

    switch (params.collision.kind) {
    case CollisionKind::None:
        break;
    case CollisionKind::LocalAlignment: {
        // Q2: relax toward the cell-local particle mean velocity; conserves
        // per-cell momentum exactly
        static thread_local std::vector<double> cw, cwv;
        cw.assign(n, 0.0);
        cwv.assign(n, 0.0);
        static thread_local std::vector<std::size_t> cell;
        cell.resize(c.size());
        for (std::size_t p = 0; p < c.size(); ++p) {
            double rel = (c.x[p] - f.x_lo) / dx;
            if (rel < 0.0) rel = 0.0;
            std::size_t j = static_cast<std::size_t>(rel);
            if (j >= n) j = n - 1;
            cell[p] = j;
            cw[j] += c.w[p];
            cwv[j] += c.w[p] * c.v[p];
        }
        const double e = std::exp(-dt);
        for (std::size_t p = 0; p < c.size(); ++p) {
            const std::size_t j = cell[p];
            if (cw[j] <= 0.0) continue;
            const double ubar = cwv[j] / cw[j];
            c.v[p] = ubar + (c.v[p] - ubar) * e;
        }
        break;
    }
    case CollisionKind::GlobalAlignment: {
        // Q1: pairwise psi-weighted alignment, O(N^2); midpoint step keeps
        // the total momentum invariant for any symmetric psi
        const auto& psi = params.collision.psi;
        const std::size_t np = c.size();
        static thread_local std::vector<double> a1, vmid;
        a1.assign(np, 0.0);
        vmid.resize(np);
        auto accel = [&](const std::vector<double>& v, std::vector<double>& out) {
            for (std::size_t i = 0; i < np; ++i) {
                double ai = 0.0;
                for (std::size_t jj = 0; jj < np; ++jj) {
                    if (jj == i) continue;
                    ai += psi(c.x[i] - c.x[jj]) * c.w[jj] * (v[jj] - v[i]);
                }
                out[i] = ai;
            }
        };
        accel(c.v, a1);
        for (std::size_t i = 0; i < np; ++i) vmid[i] = c.v[i] + 0.5 * dt * a1[i];
        accel(vmid, a1);
        for (std::size_t i = 0; i < np; ++i) c.v[i] += dt * a1[i];
        break;
    }
    }

    // free-streaming push, then retire leavers into the ledger
    for (std::size_t p = 0; p < c.size(); ++p) c.x[p] += c.v[p] * dt;

    std::size_t keep = 0;
    for (std::size_t p = 0; p < c.size(); ++p) {
        if (c.x[p] < f.x_lo || c.x[p] > f.x_hi) {
            s.leak_particles.mass += c.w[p];
            s.leak_particles.mom += c.w[p] * c.v[p];
            s.leak_particles.energy += 0.5 * c.w[p] * c.v[p] * c.v[p];
            s.leak_particles.inertia += 0.5 * c.w[p] * c.x[p] * c.x[p];
        } else {
            c.x[keep] = c.x[p];
            c.v[keep] = c.v[p];
            c.w[keep] = c.w[p];
            ++keep;
        }
    }
    c.x.resize(keep);
    c.v.resize(keep);
    c.w.resize(keep);
}

Verdict detect_blowup(const std::vector<StepDiag>& diags, const SimConfig& cfg) {
    for (const auto& d : diags) {
        if (d.negative_density)
            return {Verdict::Kind::BlowupDetected, d.t, "negative-density", ""};
        if (d.dt_stable < cfg.dt_floor)
            return {Verdict::Kind::BlowupDetected, d.t, "dt-floor", ""};
        if (d.max_du > cfg.gradient_threshold)
            return {Verdict::Kind::BlowupDetected, d.t, "gradient-threshold", ""};
    }
    return {Verdict::Kind::CompletedSmooth, 0.0, "", ""};
}

namespace {

MomentSample take_sample(const SimState& s, const ModelParams& params) {
    MomentSample ms;
    ms.mv = moments::combined_moments(s.fluid, s.particles, params, s.t);
    ms.J = assemble_J(ms.mv);
    ms.J_alpha = assemble_J_alpha(ms.mv);
    ms.leak_fluid = s.leak_fluid;
    ms.leak_particles = s.leak_particles;
    ms.vacuum_mom = s.vacuum_mom;
    return ms;
}

} // namespace

RunResult run_scenario(FluidField field, ParticleCloud cloud, const ModelParams& params,
                       const SimConfig& cfg, const criteria::SystemSpec& sys,
                       const std::optional<EnvelopeCheck>& envelope,
                       const IdentityTolerances& tol) {
    params.validate();
    cfg.validate();
    field.validate();
    cloud.validate();
    if (sys.kind == criteria::SystemKind::ThickSprays)
        throw BadSpec("thick sprays are gate-only; time stepping is not supported");

    RunResult out;
    SimState s;
    s.fluid = std::move(field);
    s.particles = std::move(cloud);
    for (double r : s.fluid.rho) s.max_rho = std::max(s.max_rho, r);

    out.series.push_back(take_sample(s, params));
    double next_sample = cfg.sample_dt > 0.0 ? cfg.sample_dt : 0.0;

    try {
        while (s.t < cfg.t_end * (1.0 - 1e-15) && cfg.t_end > 0.0) {
            if (s.steps >= cfg.max_steps) {
                out.verdict = {Verdict::Kind::Aborted, s.t, "", "max steps reached"};
                break;
            }
            const double dt_stab = stable_dt(s, params, cfg);
            if (dt_stab < cfg.dt_floor) {
                out.diags.push_back({s.t, s.max_du, dt_stab, false});
                out.verdict = {Verdict::Kind::BlowupDetected, s.t, "dt-floor", ""};
                break;
            }
            double dt = std::min({dt_stab, cfg.dt_max, cfg.t_end - s.t});
            if (cfg.sample_dt > 0.0 && next_sample > s.t)
                dt = std::min(dt, next_sample - s.t);

            step_fluid(s, params, cfg, dt);
            couple_drag(s, params, cfg, dt);
            step_particles(s, params, cfg, dt);
            s.t += dt;
            s.dt_last = dt;
            ++s.steps;
            out.diags.push_back({s.t, s.max_du, dt_stab, false});

            bool due = cfg.sample_dt > 0.0 ? (s.t >= next_sample * (1.0 - 1e-12))
                                           : (s.steps % cfg.sample_stride == 0);
            if (due) {
                out.series.push_back(take_sample(s, params));
                if (cfg.sample_dt > 0.0) next_sample += cfg.sample_dt;
            }

            if (s.max_du > cfg.gradient_threshold) {
                out.verdict = {Verdict::Kind::BlowupDetected, s.t, "gradient-threshold", ""};
                if (!due) out.series.push_back(take_sample(s, params));
                break;
            }
        }
    } catch (const NegativeDensity& e) {
        out.diags.push_back({s.t, s.max_du, s.dt_last, true});
        out.verdict = {Verdict::Kind::BlowupDetected, s.t, "negative-density", e.what()};
    } catch (const NonFiniteField& e) {
        out.verdict = {Verdict::Kind::Aborted, s.t, "", e.what()};
    } catch (const NonFiniteParticle& e) {
        out.verdict = {Verdict::Kind::Aborted, s.t, "", e.what()};
    }

    if (out.verdict.kind == Verdict::Kind::CompletedSmooth ||
        (out.verdict.kind == Verdict::Kind::Aborted && out.verdict.reason == "max steps reached")) {
        if (s.t - out.series.back().mv.t > 1e-12 * (1.0 + s.t))
            out.series.push_back(take_sample(s, params));
    }

    out.identities = check_identities(out.series, params, tol, envelope);
    out.state = std::move(s);
    return out;
}

RunResult run_scenario(const InitialDataSpec& init, const ModelParams& params,
                       const SimConfig& cfg, const criteria::SystemSpec& sys,
                       const std::optional<EnvelopeCheck>& envelope,
                       const IdentityTolerances& tol) {
    auto [field, cloud] = moments::build_initial_data(init, params);
    return run_scenario(std::move(field), std::move(cloud), params, cfg, sys, envelope, tol);
}

IdentityReport check_identities(const std::vector<MomentSample>& series,
                                const ModelParams& params, const IdentityTolerances& tol,
                                const std::optional<EnvelopeCheck>& envelope) {
    IdentityReport rep;
    if (series.empty()) return rep;

    const auto& s0 = series.front();
    const double m_rho0 = s0.mv.m_rho;
    const double m_f0 = s0.mv.m_f;
    const double M0 = s0.mv.M();
    const double E0 = s0.mv.E();
    const double q = 0.5 * params.d * (params.gamma - 1.0);

    auto note = [&rep](const std::string& name, double t, double r) {
        rep.violations.push_back(name + " at t=" + csv::format(t) +
                                 " residual=" + csv::format(r));
    };

    double prev_energy = E0 + s0.leak_fluid.energy + s0.leak_particles.energy;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& smp = series[k];
        const double t = smp.mv.t;

        const double m_rho_corr = smp.mv.m_rho + smp.leak_fluid.mass;
        const double m_f_corr = smp.mv.m_f + smp.leak_particles.mass;
        const double drift_rho = std::fabs(m_rho_corr - m_rho0) / std::max(m_rho0, 1e-300);
        const double drift_f =
            m_f0 > 0.0 ? std::fabs(m_f_corr - m_f0) / m_f0 : std::fabs(m_f_corr);
        const double drift = std::max(m_rho0 > 0.0 ? drift_rho : std::fabs(m_rho_corr), drift_f);
        rep.max_mass_drift_rel = std::max(rep.max_mass_drift_rel, drift);
        if (drift > tol.mass_rel) note("mass-conservation", t, drift);

        const double M_corr =
            smp.mv.M() + smp.leak_fluid.mom + smp.leak_particles.mom + smp.vacuum_mom;
        const double mdrift = std::fabs(M_corr - M0);
        rep.max_momentum_drift = std::max(rep.max_momentum_drift, mdrift);
        if (mdrift > tol.momentum_scale * (1.0 + std::fabs(M0)))
            note("momentum-conservation", t, mdrift);

        const double E_corr =
            smp.mv.E() + smp.leak_fluid.energy + smp.leak_particles.energy;
        if (k > 0) {
            const double rise = (E_corr - prev_energy) / std::max(E0, 1e-300);
            rep.max_energy_increase_rel = std::max(rep.max_energy_increase_rel, rise);
            if (rise > tol.energy_rel) note("energy-dissipation", t, rise);
        }
        prev_energy = E_corr;

        if (smp.mv.m_rho > 0.0 && smp.mv.I_rho > 0.0) {
            const double C0t = criteria::const_C0(smp.mv.m_rho, params.d, params.gamma);
            const double ratio = smp.mv.E_i * std::pow(smp.mv.I_rho, q) / C0t;
            rep.min_lemma33_ratio = std::min(rep.min_lemma33_ratio, ratio);
            if (ratio < 1.0 - tol.lemma33_rel) note("lemma-3.3", t, ratio);
        }

        if (envelope) {
            const auto& c = envelope->constants;
            const double env = criteria::envelope_J(envelope->branch, c, t);
            const double Jval = envelope->branch == criteria::BranchId::Alpha
                                    ? smp.J_alpha.value_or(smp.J)
                                    : smp.J;
            if (env > 0.0) {
                const double ratio = Jval / env;
                rep.max_envelope_ratio = std::max(rep.max_envelope_ratio, ratio);
                if (ratio > 1.0 + tol.envelope_slack) note("J-envelope", t, ratio);
            }
            const double lb = criteria::lower_bound_Ei(c, envelope->branch, t);
            if (lb > 0.0) {
                const double ratio = smp.mv.E_i / lb;
                rep.min_lower_bound_ratio = std::min(rep.min_lower_bound_ratio, ratio);
                if (ratio < 1.0 - tol.lower_bound_rel) note("Ei-lower-bound", t, ratio);
            }
            const double path = criteria::inertia_path(c, t);
            if (path > 0.0) {
                const double I_corr = smp.mv.I_rho + smp.leak_fluid.inertia;
                const double ratio = I_corr / path;
                rep.max_inertia_path_ratio = std::max(rep.max_inertia_path_ratio, ratio);
                if (ratio > 1.0 + tol.inertia_path_rel) note("inertia-path", t, ratio);
            }
        }
    }

    // virial identity dI/dt = W and, in Euler mode, the W' identity;
    // three-point derivatives on the sampled series (exact for quadratics on
    // nonuniform spacing), leakage-corrected
    auto deriv3 = [](double fm, double f0, double fp, double dm, double dp) {
        return (dm * dm * fp + (dp * dp - dm * dm) * f0 - dp * dp * fm) /
               (dp * dm * (dp + dm));
    };
    for (std::size_t k = 1; k + 1 < series.size(); ++k) {
        const auto& a = series[k - 1];
        const auto& c = series[k];
        const auto& b = series[k + 1];
        const double dm = c.mv.t - a.mv.t;
        const double dp = b.mv.t - c.mv.t;
        if (!(dm > 1e-9 * (1.0 + c.mv.t)) || !(dp > 1e-9 * (1.0 + c.mv.t))) continue;
        auto corrI = [](const MomentSample& smp) {
            return smp.mv.I() + smp.leak_fluid.inertia + smp.leak_particles.inertia;
        };
        const double dIdt = deriv3(corrI(a), corrI(c), corrI(b), dm, dp);
        const double resid = std::fabs(dIdt - c.mv.W());
        rep.max_dI_minus_W = std::max(rep.max_dI_minus_W, resid);

        if (params.viscosity.kind == ViscosityKind::None) {
            const double dWdt = deriv3(a.mv.W(), c.mv.W(), b.mv.W(), dm, dp);
            const double rhs = 2.0 * c.mv.E_k + params.d * (params.gamma - 1.0) * c.mv.E_i +
                               2.0 * c.mv.E_f;
            rep.max_dW_residual = std::max(rep.max_dW_residual, std::fabs(dWdt - rhs));
        }
    }

    return rep;
}

double virial_convergence_order(const IdentityReport& coarse, const IdentityReport& fine) {
    if (!(coarse.max_dI_minus_W > 0.0) || !(fine.max_dI_minus_W > 0.0)) return 0.0;
    return std::log2(coarse.max_dI_minus_W / fine.max_dI_minus_W);
}

void require_identities(const IdentityReport& rep) {
    if (rep.violations.empty()) return;
    throw IdentityViolation(rep.violations.front(), 0.0, 0.0);
}

std::string series_to_csv(const std::vector<MomentSample>& series) {
    const bool has_alpha = !series.empty() && series.front().mv.alpha.has_value();
    std::vector<std::string> header = {"t",   "m_rho", "m_f", "M",
                                       "W",   "I",     "E_k", "E_i",
                                       "E_f", "J",     "leak_mass", "leak_mom"};
    if (has_alpha) {
        for (const char* c : {"m_rho_a", "M_a", "W_a", "I_a", "E_k_a", "E_i_a", "J_a"})
            header.push_back(c);
    }
    std::vector<std::vector<double>> rows;
    rows.reserve(series.size());
    for (const auto& smp : series) {
        const auto& mv = smp.mv;
        std::vector<double> row = {mv.t,
                                   mv.m_rho,
                                   mv.m_f,
                                   mv.M(),
                                   mv.W(),
                                   mv.I(),
                                   mv.E_k,
                                   mv.E_i,
                                   mv.E_f,
                                   smp.J,
                                   smp.leak_fluid.mass + smp.leak_particles.mass,
                                   smp.leak_fluid.mom + smp.leak_particles.mom};
        if (has_alpha && mv.alpha) {
            row.push_back(mv.alpha->m);
            row.push_back(mv.alpha->M);
            row.push_back(mv.alpha->W);
            row.push_back(mv.alpha->I);
            row.push_back(mv.alpha->E_k);
            row.push_back(mv.alpha->E_i);
            row.push_back(smp.J_alpha.value_or(0.0));
        }
        rows.push_back(std::move(row));
    }
    return csv::to_string(header, rows);
}

std::string identities_to_json(const IdentityReport& rep, const Verdict& v) {
    using nlohmann::json;
    json j;
    j["max_mass_drift_rel"] = rep.max_mass_drift_rel;
    j["max_momentum_drift"] = rep.max_momentum_drift;
    j["max_energy_increase_rel"] = rep.max_energy_increase_rel;
    j["max_dI_minus_W"] = rep.max_dI_minus_W;
    j["max_dW_residual"] = rep.max_dW_residual;
    // untouched minima stay +inf (e.g. zero-mass runs); emit them as null
    j["min_lemma33_ratio"] = std::isfinite(rep.min_lemma33_ratio)
                                 ? json(rep.min_lemma33_ratio)
                                 : json(nullptr);
    j["max_envelope_ratio"] = rep.max_envelope_ratio;
    j["min_lower_bound_ratio"] = std::isfinite(rep.min_lower_bound_ratio)
                                     ? json(rep.min_lower_bound_ratio)
                                     : json(nullptr);
    j["max_inertia_path_ratio"] = rep.max_inertia_path_ratio;
    j["violations"] = rep.violations;
    j["ok"] = rep.ok();
    switch (v.kind) {
    case Verdict::Kind::CompletedSmooth: j["verdict"] = "completed-smooth"; break;
    case Verdict::Kind::BlowupDetected: j["verdict"] = "blowup-detected"; break;
    case Verdict::Kind::Aborted: j["verdict"] = "aborted"; break;
    }
    j["t_detect"] = v.t_detect;
    j["trigger"] = v.trigger;
    j["reason"] = v.reason;
    return j.dump(2) + "\n";
}

} // namespace blowuplab::sim
