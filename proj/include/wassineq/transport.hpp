#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "functionals.hpp"
#include "measures.hpp"
#include "models.hpp"

namespace wassineq {

// u-space quadrature: midpoint rule with M levels.
inline double w2_squared_levels(const Quantile& q0, const Quantile& q1, std::size_t M)
{
    std::vector<double> us(M);
    for (std::size_t k = 0; k < M; ++k) us[k] = (static_cast<double>(k) + 0.5) / static_cast<double>(M);
    auto a = q0.sorted_levels(us);
    auto b = q1.sorted_levels(us);
    double s = 0.0;
    for (std::size_t k = 0; k < M; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return s / static_cast<double>(M);
}

inline double w2_distance(const GridDensity& rho0, const GridDensity& rho1)
{
    const std::size_t M = 4 * std::max(rho0.size(), rho1.size());
    return std::sqrt(w2_squared_levels(Quantile(rho0), Quantile(rho1), M));
}

struct TransportPlan1D {
    GridDensity source;
    GridDensity target;
    std::vector<double> map_values;
    double w2 = 0.0;
    bool degenerate = false; // target CDF flat somewhere inside its support
};

inline TransportPlan1D optimal_map(const GridDensity& rho0, const GridDensity& rho1)
{
    Quantile q0(rho0), q1(rho1);
    const auto& c0 = q0.cdf();
    std::vector<double> T(rho0.size());
    for (std::size_t i = 0; i < T.size(); ++i) T[i] = q1(std::clamp(c0[i], 0.0, 1.0));
    for (std::size_t i = 1; i < T.size(); ++i) T[i] = std::max(T[i], T[i - 1]);
    bool degenerate = false;
    const auto& c1 = q1.cdf();
    for (std::size_t i = 1; i + 1 < c1.size(); ++i)
        if (c1[i] > 0.0 && c1[i] < 1.0 && c1[i] == c1[i - 1]) degenerate = true;
    const std::size_t M = 4 * std::max(rho0.size(), rho1.size());
    const double w2 = std::sqrt(w2_squared_levels(q0, q1, M));
    return TransportPlan1D{rho0, rho1, std::move(T), w2, degenerate};
}

// Push-forward of rho0 under T_t = (1-t)I + tT, on the source grid. In 1D the
// quantile of rho_t is (1-t)Q0 + tQ1 and its density at z = Q_t(u) is the
// harmonic combination rho0(Q0(u)) rho1(Q1(u)) / ((1-t) rho1(Q1(u)) + t rho0(Q0(u))).
inline GridDensity displacement_interpolate(const TransportPlan1D& plan, double t)
{
    if (!(t >= 0.0 && t <= 1.0)) fail(ErrorKind::domain, "interpolation time outside [0,1]");
    const auto& rho0 = plan.source;
    if (t == 0.0) return rho0;
    const auto& g = rho0.grid();
    const std::size_t n = g.n();
    Quantile q0(rho0), q1(plan.target);
    const auto& r1d = plan.target;
    // bracket on a uniform level lattice, then safeguarded Newton with dQ/du = 1/rho
    const std::size_t M = 4 * n;
    std::vector<double> us(M + 1);
    for (std::size_t k = 0; k <= M; ++k) us[k] = static_cast<double>(k) / static_cast<double>(M);
    auto l0 = q0.sorted_levels(us), l1 = q1.sorted_levels(us);
    std::vector<double> lt(M + 1);
    for (std::size_t k = 0; k <= M; ++k) lt[k] = (1.0 - t) * l0[k] + t * l1[k];
    std::vector<double> out(n, 0.0);
    std::size_t k = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const double z = g.x(j);
        if (z < lt.front() || z > lt.back()) continue;
        while (k + 1 < M && lt[k + 1] < z) ++k;
        double ua = us[k], ub = us[k + 1];
        double u = lt[k + 1] > lt[k] ? ua + (z - lt[k]) / (lt[k + 1] - lt[k]) * (ub - ua) : ua;
        double r0 = 0.0, r1 = 0.0;
        for (int it = 0; it < 100; ++it) {
            const double x0 = q0(u), x1 = q1(u);
            r0 = rho0.at(x0);
            r1 = r1d.at(x1);
            const double f = (1.0 - t) * x0 + t * x1 - z;
            if (std::abs(f) < 1e-12 || ub - ua <= 1e-15) break;
            (f < 0.0 ? ua : ub) = u;
            double next = 0.5 * (ua + ub);
            if (r0 > 0.0 && r1 > 0.0) {
                const double nt = u - f / ((1.0 - t) / r0 + t / r1);
                if (nt > ua && nt < ub) next = nt;
            }
            u = next;
        }
        r0 = rho0.at(q0(u));
        r1 = r1d.at(q1(u));
        const double den = (1.0 - t) * r1 + t * r0;
        if (den < 0.0) fail(ErrorKind::monotonicity, "T_t' <= 0 at node " + std::to_string(j));
        out[j] = den > 0.0 ? r0 * r1 / den : 0.0;
    }
    return normalize(out, g, 0.0);
}

struct ConvexityReport {
    std::vector<double> ts;
    std::vector<double> energies;
    std::vector<double> slacks; // per interior point: chord - value
    double min_slack = 0.0;
    double scale = 1.0;
    bool pass = true;
    std::size_t worst = 0;
};

inline ConvexityReport check_displacement_convexity(const GridDensity& rho0, const GridDensity& rho1,
                                                    const EntropyModel& m, std::span<const double> ts,
                                                    double tol = 1e-5)
{
    if (ts.size() < 3) fail(ErrorKind::dimension, "convexity check needs at least 3 times");
    auto plan = optimal_map(rho0, rho1);
    ConvexityReport r;
    r.ts.assign(ts.begin(), ts.end());
    for (double t : ts) r.energies.push_back(internal_energy(displacement_interpolate(plan, t), m));
    double scale = 1.0;
    for (double e : r.energies) scale = std::max(scale, std::abs(e));
    r.scale = scale;
    r.min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
        const double t0 = ts[i - 1], t1 = ts[i], t2 = ts[i + 1];
        const double a = (t2 - t1) / (t2 - t0);
        const double chord = a * r.energies[i - 1] + (1.0 - a) * r.energies[i + 1];
        const double s = chord - r.energies[i];
        r.slacks.push_back(s);
        if (s < r.min_slack) {
            r.min_slack = s;
            r.worst = i;
        }
    }
    r.pass = r.min_slack >= -tol * scale;
    return r;
}

struct Lemma22Slacks {
    double internal = 0.0;
    double potential = 0.0;
    double interaction = 0.0;
    double scale = 1.0;
};

inline Lemma22Slacks lemma22_slacks(const GridDensity& rho0, const GridDensity& rho1, const EntropyModel& m,
                                    const PotentialPair& pot)
{
    if (!rho0.strictly_positive()) fail(ErrorKind::positivity, "lemma slacks need a strictly positive source");
    const auto& g = rho0.grid();
    const std::size_t n = g.n();
    auto plan = optimal_map(rho0, rho1);
    const double w2sq = plan.w2 * plan.w2;
    std::vector<double> disp(n);
    for (std::size_t i = 0; i < n; ++i) disp[i] = plan.map_values[i] - g.x(i);

    std::vector<double> dFr(n);
    for (std::size_t i = 0; i < n; ++i) dFr[i] = m.dF(rho0[i]);
    auto gdF = gradient(dFr, g);
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = rho0[i] * disp[i] * gdF[i];
    const double cross_int = integrate(f, g);

    for (std::size_t i = 0; i < n; ++i) f[i] = pot.V.is_zero ? 0.0 : rho0[i] * disp[i] * pot.V.d(g.x(i));
    const double cross_pot = integrate(f, g);

    double cross_w = 0.0;
    if (!pot.W.is_zero) {
        auto gconv = convolve_kernel(rho0, pot.W.df);
        for (std::size_t i = 0; i < n; ++i) f[i] = rho0[i] * disp[i] * gconv[i];
        cross_w = integrate(f, g);
    }
    const double db = barycenter(rho0) - barycenter(rho1);

    Lemma22Slacks s;
    const double i0 = internal_energy(rho0, m), i1 = internal_energy(rho1, m);
    const double p0 = potential_energy(rho0, pot.V), p1 = potential_energy(rho1, pot.V);
    const double e0 = interaction_energy(rho0, pot.W), e1 = interaction_energy(rho1, pot.W);
    s.internal = i1 - i0 - cross_int;
    s.potential = p1 - p0 - cross_pot - 0.5 * pot.lambda * w2sq;
    s.interaction = e1 - e0 - cross_w - 0.5 * pot.nu * (w2sq - db * db);
    for (double v : {i0, i1, p0, p1, e0, e1, cross_int, cross_pot, cross_w}) s.scale = std::max(s.scale, std::abs(v));
    return s;
}

// Exact 1D transport between small atomic measures (north-west corner on sorted atoms).
inline double discrete_w2_oracle(std::span<const double> xs0, std::span<const double> ws0,
                                 std::span<const double> xs1, std::span<const double> ws1)
{
    if (xs0.size() != ws0.size() || xs1.size() != ws1.size() || xs0.empty() || xs1.empty())
        fail(ErrorKind::dimension, "atom/weight size mismatch");
    if (xs0.size() > 64 || xs1.size() > 64) fail(ErrorKind::domain, "oracle limited to 64 atoms per measure");
    auto sum = [](std::span<const double> w) { return std::accumulate(w.begin(), w.end(), 0.0); };
    if (std::abs(sum(ws0) - 1.0) > 1e-12 || std::abs(sum(ws1) - 1.0) > 1e-12)
        fail(ErrorKind::domain, "atom weights must sum to 1");
    auto sorted = [](std::span<const double> x, std::span<const double> w) {
        std::vector<std::pair<double, double>> v;
        for (std::size_t i = 0; i < x.size(); ++i) v.emplace_back(x[i], w[i]);
        std::sort(v.begin(), v.end());
        return v;
    };
    auto a = sorted(xs0, ws0), b = sorted(xs1, ws1);
    std::size_t i = 0, j = 0;
    double ra = a[0].second, rb = b[0].second, cost = 0.0;
    while (i < a.size() && j < b.size()) {
        const double m = std::min(ra, rb);
        const double d = a[i].first - b[j].first;
        cost += m * d * d;
        ra -= m;
        rb -= m;
        if (ra <= 1e-15 && ++i < a.size()) ra = a[i].second;
        if (rb <= 1e-15 && ++j < b.size()) rb = b[j].second;
    }
    return std::sqrt(cost);
}

} // namespace wassineq
