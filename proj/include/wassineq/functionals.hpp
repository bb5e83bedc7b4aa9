#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "measures.hpp"
#include "models.hpp"

namespace wassineq {

struct EnergyBreakdown {
    double internal = 0.0;
    double potential = 0.0;
    double interaction = 0.0;
    double total = 0.0;
};

inline std::vector<double> sample(const Potential& p, const Grid1D& g)
{
    if (p.is_zero) return std::vector<double>(g.n(), 0.0);
    return g.sample(p.f);
}

// (K * rho)(x_i) = sum_j w_j K(x_i - x_j) rho_j with K tabulated on k h.
template <class Kernel>
std::vector<double> convolve_kernel(const GridDensity& rho, Kernel&& K)
{
    const auto& g = rho.grid();
    const std::size_t n = g.n();
    const double h = g.h();
    std::vector<double> tab(2 * n - 1);
    for (std::size_t k = 0; k < 2 * n - 1; ++k)
        tab[k] = K((static_cast<double>(k) - static_cast<double>(n - 1)) * h);
    std::vector<double> wr(n);
    for (std::size_t j = 0; j < n; ++j) wr[j] = g.weight(j) * rho[j];
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* t = tab.data() + (i + n - 1); // t[-j] = K((i-j)h)
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += *(t - j) * wr[j];
        out[i] = s;
    }
    return out;
}

inline std::vector<double> convolve(const GridDensity& rho, const Potential& W)
{
    if (W.is_zero) return std::vector<double>(rho.size(), 0.0);
    return convolve_kernel(rho, W.f);
}

inline double internal_energy(const GridDensity& rho, const EntropyModel& m)
{
    std::vector<double> f(rho.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = m.F(rho[i]);
    return integrate(f, rho.grid());
}

inline double potential_energy(const GridDensity& rho, std::span<const double> V)
{
    std::vector<double> f(rho.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = rho[i] * V[i];
    return integrate(f, rho.grid());
}

inline double potential_energy(const GridDensity& rho, const Potential& V)
{
    if (V.is_zero) return 0.0;
    return potential_energy(rho, sample(V, rho.grid()));
}

// 1/2 double quadrature of K(x - y) rho(x) rho(y)
template <class Kernel>
double interaction_energy_kernel(const GridDensity& rho, Kernel&& K)
{
    auto conv = convolve_kernel(rho, K);
    return 0.5 * potential_energy(rho, conv);
}

inline double interaction_energy(const GridDensity& rho, const Potential& W)
{
    if (W.is_zero) return 0.0;
    return interaction_energy_kernel(rho, W.f);
}

inline EnergyBreakdown free_energy(const GridDensity& rho, const EntropyModel& m, const PotentialPair& pot)
{
    EnergyBreakdown e;
    e.internal = internal_energy(rho, m);
    e.potential = potential_energy(rho, pot.V);
    e.interaction = interaction_energy(rho, pot.W);
    e.total = e.internal + e.potential + e.interaction;
    return e;
}

inline double relative_energy(const GridDensity& rho0, const GridDensity& rho1, const EntropyModel& m,
                              const PotentialPair& pot)
{
    return free_energy(rho0, m, pot).total - free_energy(rho1, m, pot).total;
}

// Gradient of xi = F'(rho) + U + W*rho. Nodes outside the interior of the
// support are flagged inactive (only possible when F'(0+) is finite).
struct XiGradient {
    std::vector<double> xi;
    std::vector<double> grad;
    std::vector<char> active;
};

inline XiGradient xi_gradient(const GridDensity& rho, const EntropyModel& m, std::span<const double> U,
                              const Potential& W)
{
    const auto& g = rho.grid();
    const std::size_t n = g.n();
    if (m.singular_at_zero() && !rho.strictly_positive())
        fail(ErrorKind::positivity, "entropy production needs a strictly positive density for " + m.label());
    XiGradient out;
    out.xi.resize(n);
    auto conv = convolve(rho, W);
    for (std::size_t i = 0; i < n; ++i) out.xi[i] = m.dF_extended(rho[i]) + U[i] + conv[i];
    out.grad = gradient(out.xi, g);
    out.active.assign(n, 1);
    if (!rho.strictly_positive()) {
        for (std::size_t i = 0; i < n; ++i) {
            bool ok = rho[i] > 0.0;
            if (i > 0) ok = ok && rho[i - 1] > 0.0;
            if (i + 1 < n) ok = ok && rho[i + 1] > 0.0;
            if (i == 0) ok = ok && rho[2] > 0.0;
            if (i + 1 == n) ok = ok && rho[n - 3] > 0.0;
            out.active[i] = ok;
        }
    }
    return out;
}

inline double production_I2(const GridDensity& rho, const XiGradient& xg)
{
    std::vector<double> f(rho.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = xg.active[i] ? rho[i] * xg.grad[i] * xg.grad[i] : 0.0;
    return integrate(f, rho.grid());
}

struct ProductionPair {
    double calI = 0.0; // int rho c*(-grad xi)
    double I = 0.0;    // int rho grad xi . grad c*(grad xi)
};

inline ProductionPair production_cstar(const GridDensity& rho, const XiGradient& xg, const YoungPair& yp)
{
    std::vector<double> a(rho.size()), b(rho.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!xg.active[i]) continue;
        const double gi = xg.grad[i];
        a[i] = rho[i] * yp.c_star(-gi);
        b[i] = rho[i] * gi * yp.dc_star(gi);
    }
    return {integrate(a, rho.grid()), integrate(b, rho.grid())};
}

inline double entropy_production_I2(const GridDensity& rho, const EntropyModel& m, const PotentialPair& pot)
{
    auto U = sample(pot.V, rho.grid());
    return production_I2(rho, xi_gradient(rho, m, U, pot.W));
}

inline ProductionPair entropy_production_Icstar(const GridDensity& rho, const EntropyModel& m,
                                                const PotentialPair& pot, const YoungPair& yp)
{
    auto U = sample(pot.V, rho.grid());
    return production_cstar(rho, xi_gradient(rho, m, U, pot.W), yp);
}

} // namespace wassineq
