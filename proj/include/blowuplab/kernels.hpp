#pragma once

#include <cstddef>

namespace blowuplab::kernels {

// Fused reductions over the fluid grid. Sums carry no dx or 1/2 factors:
//   mass = sum rho_i,  mom = sum rho_i u_i,  momw = sum rho_i u_i x_i,
//   xx   = sum rho_i x_i^2,  uu = sum rho_i u_i^2,  x_i = x0 + i*dx.
struct FluidSums {
    double mass = 0, mom = 0, momw = 0, xx = 0, uu = 0;
};

// Particle ensemble reductions: sum w, w v, w x v, w x^2, w v^2.
struct ParticleSums {
    double w = 0, wv = 0, wxv = 0, wxx = 0, wvv = 0;
};

// One kernel family. All variants are required to produce bitwise-identical
// results: reductions use a fixed four-lane accumulation order with the lanes
// combined as (l0+l1)+(l2+l3) and the tail added last, elementwise kernels
// keep the written operation order, and the build disables FP contraction.
struct Kernels {
    const char* name;

    FluidSums (*fluid_sums)(const double* rho, const double* u, std::size_t n,
                            double x0, double dx);

    ParticleSums (*particle_sums)(const double* x, const double* v,
                                  const double* w, std::size_t n);

    // Per-face Rusanov flux for the isentropic system, pressures and sound
    // speeds precomputed:
    //   a     = max(|uL| + cL, |uR| + cR)
    //   f_rho = 0.5 (rhoL uL + rhoR uR)            - 0.5 a (rhoR - rhoL)
    //   f_mom = 0.5 (rhoL uL uL + pL + rhoR uR uR + pR)
    //                                              - 0.5 a (rhoR uR - rhoL uL)
    // Returns the largest face wave speed a (max is exact, order-free).
    double (*rusanov_faces)(const double* rhoL, const double* uL, const double* pL,
                            const double* cL, const double* rhoR, const double* uR,
                            const double* pR, const double* cR, std::size_t nfaces,
                            double* f_rho, double* f_mom);

    // Minmod-limited central slopes; slope[0] = slope[n-1] = 0.
    void (*minmod_slopes)(const double* q, std::size_t n, double* slope);
};

const Kernels& scalar();

#if defined(__x86_64__) || defined(_M_X64)
bool cpu_has_avx2();
const Kernels& avx2();
#endif

// Kernel set selected once per process: BLOWUPLAB_KERNELS=scalar|avx2
// overrides the CPUID pick. Safe because every variant is bit-identical.
const Kernels& active();

} // namespace blowuplab::kernels
