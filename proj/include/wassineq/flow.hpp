#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "functionals.hpp"
#include "measures.hpp"
#include "models.hpp"
#include "stationary.hpp"
#include "transport.hpp"

namespace wassineq {

struct FlowTrace {
    std::vector<double> times;
    std::vector<double> energies;     // H(rho(t) | rho_V)
    std::vector<double> dissipations; // I_2(rho(t))
    std::vector<double> w2s;          // W_2(rho(t), rho_V)
    std::vector<double> barycentres;
    std::vector<double> mass_errors;
};

// Explicit upwind finite volumes for d_t rho = d_x(rho d_x(F'(rho) + V + W*rho)),
// zero flux at both ends. Control volumes are the trapezoid weights, so the
// trapezoid mass is conserved by telescoping.
class FlowSolver {
public:
    FlowSolver(const Grid1D& g, const EntropyModel& m, const PotentialPair& pot)
        : grid_(g), model_(m), pot_(pot), V_(sample(pot.V, g))
    {
    }

    const Grid1D& grid() const { return grid_; }

    double dt_max(const GridDensity& rho) const
    {
        double D = 0.0;
        for (double v : rho.values()) D = std::max(D, model_.dPF(v));
        if (!std::isfinite(D)) fail(ErrorKind::stability, "unbounded diffusivity (vacuum with singular F')");
        const double h = grid_.h();
        return D > 0.0 ? 0.4 * h * h / D : std::numeric_limits<double>::infinity();
    }

    // Returns the stepped values and the mass error before renormalization.
    GridDensity step(const GridDensity& rho, double dt, double* mass_error = nullptr) const
    {
        if (!(dt > 0.0)) fail(ErrorKind::domain, "time step must be positive");
        const double bound = dt_max(rho);
        if (dt > bound * (1.0 + 1e-12))
            fail(ErrorKind::stability, "time step " + std::to_string(dt) + " exceeds the stability bound " +
                                           std::to_string(bound));
        if (model_.singular_at_zero() && !rho.strictly_positive())
            fail(ErrorKind::positivity, "flow with " + model_.label() + " needs a strictly positive density");
        const std::size_t n = grid_.n();
        const double h = grid_.h();
        auto conv = convolve(rho, pot_.W);
        std::vector<double> xi(n), flux(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) xi[i] = model_.dF_extended(rho[i]) + V_[i] + conv[i];
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double v = -(xi[i + 1] - xi[i]) / h;
            flux[i + 1] = v > 0.0 ? v * rho[i] : v * rho[i + 1];
        }
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = rho[i] - dt / grid_.weight(i) * (flux[i + 1] - flux[i]);
            if (out[i] < 0.0) {
                if (out[i] > -1e-300) out[i] = 0.0;
                else fail(ErrorKind::stability, "negative density after step at node " + std::to_string(i));
            }
        }
        const double mass = integrate(out, grid_);
        if (mass_error) *mass_error = std::abs(mass - 1.0);
        for (double& v : out) v /= mass;
        double fl = rho.floor();
        if (fl > 0.0) fl = std::min(fl, *std::min_element(out.begin(), out.end()));
        return GridDensity::from_values(grid_, std::move(out), fl);
    }

private:
    Grid1D grid_;
    EntropyModel model_;
    PotentialPair pot_;
    std::vector<double> V_;
};

inline GridDensity step(const GridDensity& rho, const EntropyModel& m, const PotentialPair& pot, double dt)
{
    return FlowSolver(rho.grid(), m, pot).step(rho, dt);
}

inline FlowTrace evolve(const GridDensity& rho0, const EntropyModel& m, const PotentialPair& pot, double t_end,
                        double dt, int sample_every, const GridDensity* rho_V = nullptr,
                        GridDensity* final_state = nullptr)
{
    if (!(t_end > 0.0) || !(dt > 0.0) || sample_every < 1) fail(ErrorKind::domain, "invalid flow schedule");
    const auto& g = rho0.grid();
    FlowSolver solver(g, m, pot);
    const GridDensity ref = rho_V ? *rho_V : solve_reference(m, pot, g).density;
    const double Href = free_energy(ref, m, pot).total;
    const auto steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
    const double dt_eff = t_end / static_cast<double>(steps);

    FlowTrace tr;
    auto record = [&](double t, const GridDensity& r, double merr) {
        tr.times.push_back(t);
        tr.energies.push_back(free_energy(r, m, pot).total - Href);
        tr.dissipations.push_back(entropy_production_I2(r, m, pot));
        tr.w2s.push_back(w2_distance(r, ref));
        tr.barycentres.push_back(barycenter(r));
        tr.mass_errors.push_back(merr);
    };
    GridDensity rho = rho0;
    record(0.0, rho, std::abs(integrate(rho.values(), g) - 1.0));
    for (long k = 1; k <= steps; ++k) {
        double merr = 0.0;
        rho = solver.step(rho, dt_eff, &merr);
        if (k % sample_every == 0 || k == steps) record(static_cast<double>(k) * dt_eff, rho, merr);
    }
    if (final_state) *final_state = rho;
    return tr;
}

struct DissipationReport {
    double max_defect = 0.0; // relative, max over interior samples
    double max_rate = 0.0;   // |dH/dt| at the worst sample
    bool pass = false;
};

inline DissipationReport check_dissipation(const FlowTrace& tr, double tol = 0.05, double rel_cut = 1e-3)
{
    const std::size_t n = tr.times.size();
    if (n < 3) fail(ErrorKind::dimension, "dissipation check needs at least 3 samples");
    DissipationReport r;
    // samples whose dissipation sits near the discrete stationary floor carry no information
    const double top = *std::max_element(tr.dissipations.begin(), tr.dissipations.end());
    const double cut = std::max(1e-8, rel_cut * top);
    for (std::size_t k = 1; k + 1 < n; ++k) {
        // three-point derivative, exact for quadratics on uneven spacing
        const double h1 = tr.times[k] - tr.times[k - 1], h2 = tr.times[k + 1] - tr.times[k];
        const double dHdt = -h2 / (h1 * (h1 + h2)) * tr.energies[k - 1] + (h2 - h1) / (h1 * h2) * tr.energies[k] +
                            h1 / (h2 * (h1 + h2)) * tr.energies[k + 1];
        const double I2 = tr.dissipations[k];
        double defect = 0.0;
        if (I2 > cut) defect = std::abs(dHdt + I2) / I2;
        if (defect > r.max_defect) {
            r.max_defect = defect;
            r.max_rate = std::abs(dHdt);
        }
    }
    r.pass = r.max_defect <= tol;
    return r;
}

// Least-squares decay rate of ln(values) against times.
inline double estimate_rate(std::span<const double> times, std::span<const double> values)
{
    if (times.size() != values.size() || times.size() < 2) fail(ErrorKind::dimension, "need >= 2 matching samples");
    for (double v : values)
        if (!(v > 0.0)) fail(ErrorKind::domain, "rate estimation needs positive values");
    const double cut = 1e-10 * values[0];
    double st = 0, sy = 0, stt = 0, sty = 0;
    double k = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (values[i] < cut) continue;
        const double y = std::log(values[i]);
        st += times[i];
        sy += y;
        stt += times[i] * times[i];
        sty += times[i] * y;
        k += 1;
    }
    if (k < 2) fail(ErrorKind::domain, "too few samples above the cutoff");
    const double slope = (k * sty - st * sy) / (k * stt - st * st);
    return -slope;
}

} // namespace wassineq
