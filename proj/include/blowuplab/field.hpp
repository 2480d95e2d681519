#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "blowuplab/errors.hpp"

namespace blowuplab {

// Uniform-grid discrete (rho, u), cell-average values at midpoints. alpha is
// the gas volume fraction and stays empty outside the thick-sprays system.
struct FluidField {
    double x_lo = -1.0;
    double x_hi = 1.0;
    std::vector<double> rho;
    std::vector<double> u;
    std::vector<double> alpha;

    std::size_t cells() const { return rho.size(); }
    double dx() const { return (x_hi - x_lo) / static_cast<double>(cells()); }
    double x_center(std::size_t i) const {
        return x_lo + (static_cast<double>(i) + 0.5) * dx();
    }
    bool has_alpha() const { return !alpha.empty(); }

    void validate() const {
        if (cells() < 2) throw BadSpec("fluid field needs at least 2 cells");
        if (!(x_hi > x_lo)) throw BadSpec("fluid domain is empty");
        if (u.size() != rho.size()) throw BadSpec("rho/u size mismatch");
        if (has_alpha() && alpha.size() != rho.size()) throw BadSpec("alpha size mismatch");
        for (std::size_t i = 0; i < rho.size(); ++i) {
            if (rho[i] < 0.0) throw BadSpec("negative density in fluid field");
            if (has_alpha() && (alpha[i] < 0.0 || alpha[i] > 1.0))
                throw BadSpec("alpha outside [0,1]");
        }
    }
};

// Weighted kinetic particles (x_i, v_i, w_i). Kinetic mode samples f of the
// coupled system; MonoKinetic mode carries the (n, w) phase of the two-phase
// system, one velocity per position.
struct ParticleCloud {
    enum class Mode { Kinetic, MonoKinetic };
    Mode mode = Mode::Kinetic;
    std::vector<double> x;
    std::vector<double> v;
    std::vector<double> w;

    std::size_t size() const { return x.size(); }
    bool empty() const { return x.empty(); }

    void validate() const {
        if (v.size() != x.size() || w.size() != x.size())
            throw BadSpec("particle array size mismatch");
        for (double wi : w)
            if (wi < 0.0) throw BadSpec("negative particle weight");
    }
};

struct AlphaMoments {
    double m = 0, M = 0, W = 0, I = 0, E_k = 0, E_i = 0;
};

// One time-sample of every functional. In MonoKinetic runs the *_f slots hold
// the (n, w)-phase quantities n_c, M_n, W_n, I_n, E_n.
struct MomentVector {
    double t = 0;
    double m_rho = 0, M_rho = 0, W_rho = 0, I_rho = 0, E_k = 0, E_i = 0;
    double m_f = 0, M_f = 0, W_f = 0, I_f = 0, E_f = 0;
    std::optional<AlphaMoments> alpha;

    double m() const { return m_rho + m_f; }
    double M() const { return M_rho + M_f; }
    double W() const { return W_rho + W_f; }
    double I() const { return I_rho + I_f; }
    double E() const { return E_k + E_i + E_f; }
};

/// J(t) = I - (t+1) W + (t+1)^2 E.
inline double assemble_J(const MomentVector& mv) {
    const double s = mv.t + 1.0;
    return mv.I() - s * mv.W() + s * s * mv.E();
}

/// J_alpha with I^a = I_rho^a + I_f, W^a = W_rho^a + W_f, E^a = E_k^a + E_i^a + E_f.
inline std::optional<double> assemble_J_alpha(const MomentVector& mv) {
    if (!mv.alpha) return std::nullopt;
    const double s = mv.t + 1.0;
    const double Ia = mv.alpha->I + mv.I_f;
    const double Wa = mv.alpha->W + mv.W_f;
    const double Ea = mv.alpha->E_k + mv.alpha->E_i + mv.E_f;
    return Ia - s * Wa + s * s * Ea;
}

// ---------------------------------------------------------------------------
// Initial data families. Densities are nonnegative and decay at the far
// field by construction.
// ---------------------------------------------------------------------------

struct GridSpec {
    double x_lo = -5.0;
    double x_hi = 5.0;
    std::size_t cells = 512;
};

struct FluidInit {
    enum class Family { Zero, GaussianBump, UniformBump, Tabulated };
    Family family = Family::Zero;
    double amplitude = 1.0;  // Gaussian peak
    double sigma = 1.0;      // Gaussian width
    double height = 1.0;     // uniform bump height
    double radius = 1.0;     // uniform bump support radius
    double velocity_slope = 0.0;
    double velocity_window = std::numeric_limits<double>::infinity();
    double velocity_rolloff = 0.0; // tanh rolloff width past the window, 0 = sharp
    std::string file;              // tabulated CSV: x,rho,u[,alpha]
};

struct ParticleInit {
    enum class Family { None, Maxwellian, MonoKinetic, Tabulated };
    Family family = Family::None;
    std::size_t count = 0;
    double mass = 0.0;        // total weight
    double x_center = 0.0;
    double x_sigma = 1.0;
    double temperature = 1.0; // Maxwellian velocity variance
    double mean_velocity = 0.0;
    double velocity_slope = 0.0; // MonoKinetic w0(x) = mean + slope * x
    std::string file;            // tabulated CSV: x,v,w
    ParticleCloud::Mode mode = ParticleCloud::Mode::Kinetic; // for Tabulated
};

struct InitialDataSpec {
    GridSpec grid;
    FluidInit fluid;
    ParticleInit particles;
    std::uint64_t seed = 0;
};

} // namespace blowuplab
