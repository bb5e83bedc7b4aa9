#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "functionals.hpp"
#include "measures.hpp"
#include "models.hpp"

namespace wassineq {

struct ReferenceDensity {
    GridDensity density;
    double K = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

struct SolveOptions {
    double damping = 0.5;
    int max_iter = 500;
    double tol = 1e-12;          // L1 change between iterates
    double bracket_width = 50.0;
    std::optional<GridDensity> warm_start;
};

namespace detail {

inline std::vector<double> profile(const EntropyModel& m, std::span<const double> U, double K)
{
    std::vector<double> r(U.size());
    for (std::size_t i = 0; i < U.size(); ++i) r[i] = m.dF_inverse(K - U[i]);
    return r;
}

inline double profile_mass(const EntropyModel& m, std::span<const double> U, double K, const Grid1D& g)
{
    double s = 0.0;
    for (std::size_t i = 0; i < U.size(); ++i) {
        const double v = m.dF_inverse(K - U[i]);
        if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
        s += g.weight(i) * v;
    }
    return s;
}

// rho = (F')^{-1}(K - U), K by bisection on unit mass.
inline std::pair<std::vector<double>, double> solve_mass(const EntropyModel& m, std::span<const double> U,
                                                         const Grid1D& g, double width)
{
    double umin = *std::min_element(U.begin(), U.end());
    double lo = umin, hi = umin + width;
    int expand = 0;
    while (profile_mass(m, U, lo, g) > 1.0) {
        lo -= width;
        if (++expand > 60) fail(ErrorKind::confinement, "cannot bracket the normalization constant from below");
    }
    expand = 0;
    while (profile_mass(m, U, hi, g) < 1.0) {
        hi += width;
        if (++expand > 60) fail(ErrorKind::confinement, "cannot bracket the normalization constant from above");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (profile_mass(m, U, mid, g) < 1.0 ? lo : hi) = mid;
    }
    double K = 0.5 * (lo + hi);
    auto r = profile(m, U, K);
    for (double v : r)
        if (!std::isfinite(v)) fail(ErrorKind::confinement, "reference profile not finite on the grid");
    const double mass = integrate(r, g);
    if (!(mass > 0.0)) fail(ErrorKind::confinement, "reference profile has zero mass on the grid");
    for (double& v : r) v /= mass;
    return {std::move(r), K};
}

inline double first_order_residual(const GridDensity& rho, const EntropyModel& m, std::span<const double> U,
                                   const Potential& W)
{
    auto xg = xi_gradient(rho, m, U, W);
    double res = 0.0;
    const double fl = rho.floor();
    for (std::size_t i = 0; i < rho.size(); ++i)
        if (xg.active[i] && rho[i] > fl) res = std::max(res, std::abs(xg.grad[i]));
    return res;
}

} // namespace detail

// Solves F'(rho) + V + c + W*rho = K with unit mass.
inline ReferenceDensity solve_reference(const EntropyModel& m, const PotentialPair& pot, const YoungPair* yp,
                                        const Grid1D& g, const SolveOptions& opt = {})
{
    std::vector<double> U = sample(pot.V, g);
    if (yp)
        for (std::size_t i = 0; i < g.n(); ++i) U[i] += yp->c(g.x(i));

    auto finish = [&](std::vector<double> r, double K, int iters) {
        double mn = *std::min_element(r.begin(), r.end());
        auto rho = GridDensity::from_values(g, std::move(r), mn > 0.0 ? mn : 0.0);
        const double res = detail::first_order_residual(rho, m, U, pot.W);
        return ReferenceDensity{std::move(rho), K, res, iters};
    };

    if (pot.W.is_zero) {
        auto [r, K] = detail::solve_mass(m, U, g, opt.bracket_width);
        return finish(std::move(r), K, 0);
    }

    std::vector<double> rho;
    double K = 0.0;
    if (opt.warm_start) rho = opt.warm_start->values();
    else std::tie(rho, K) = detail::solve_mass(m, U, g, opt.bracket_width);

    std::vector<double> Ut(g.n());
    auto apply = [&](const std::vector<double>& cur) {
        auto conv = convolve(GridDensity::from_values(g, cur, 0.0), pot.W);
        for (std::size_t i = 0; i < g.n(); ++i) Ut[i] = U[i] + conv[i];
        auto res = detail::solve_mass(m, Ut, g, opt.bracket_width);
        K = res.second;
        return std::move(res.first);
    };
    for (int it = 1; it <= opt.max_iter; ++it) {
        auto next = apply(rho);
        double change = 0.0;
        for (std::size_t i = 0; i < g.n(); ++i) {
            next[i] = (1.0 - opt.damping) * rho[i] + opt.damping * next[i];
            change += g.weight(i) * std::abs(next[i] - rho[i]);
        }
        const double mass = integrate(next, g);
        for (double& v : next) v /= mass;
        rho = std::move(next);
        if (change < opt.tol) return finish(apply(rho), K, it);
    }
    fail(ErrorKind::convergence, "interaction fixed point did not converge in " + std::to_string(opt.max_iter) +
                                     " iterations");
}

inline ReferenceDensity solve_reference(const EntropyModel& m, const PotentialPair& pot, const Grid1D& g,
                                        const SolveOptions& opt = {})
{
    return solve_reference(m, pot, nullptr, g, opt);
}

// sigma_c = int_{R^n} exp(-(p-1)|x|^q)
inline double sigma_c(double p, double q, int n)
{
    if (!(p > 1.0) || !(q > 1.0) || std::abs(1.0 / p + 1.0 / q - 1.0) > 1e-12)
        fail(ErrorKind::domain, "sigma_c needs conjugate exponents p, q > 1");
    if (n < 1) fail(ErrorKind::domain, "sigma_c needs n >= 1");
    const double dn = n;
    return std::exp(0.5 * dn * std::log(M_PI) + std::lgamma(dn / q + 1.0) - (dn / q) * std::log(p - 1.0) -
                    std::lgamma(dn / 2.0 + 1.0));
}

inline GridDensity plsi_extremal(double p, double lambda, const Grid1D& g, double center = 0.0)
{
    if (!(p > 1.0) || !(lambda > 0.0)) fail(ErrorKind::domain, "plsi_extremal needs p > 1, lambda > 0");
    const double q = p / (p - 1.0);
    const double a = std::pow(lambda, q) * (p - 1.0);
    auto f = g.sample([&](double x) { return std::exp(-a * std::pow(std::abs(x - center), q)); });
    return normalize(f, g, 0.0);
}

struct GnExtremal {
    GridDensity rho;      // h^r
    std::vector<double> h;
    double A = 0.0;
    double residual = 0.0; // of -h' = mu^q x|x|^{q-2} h^{r/p}
};

// Closed-form solution of -h' = mu^q x|x|^{q-2} h^{r/p}, normalized to int h^r = 1:
// h^{1-r/p} = A - (1-r/p) mu^q |x|^q / q.
inline GnExtremal gn_extremal(double p, double r, const Grid1D& g, double mu = 1.0)
{
    if (!(p > 1.0) || !(r > 0.0)) fail(ErrorKind::domain, "gn_extremal needs p > 1, r > 0");
    if (std::abs(r - p) < 1e-12) fail(ErrorKind::domain, "gn_extremal needs r != p");
    const double q = p / (p - 1.0);
    const double e = 1.0 - r / p;
    const double mq = std::pow(mu, q);
    auto prof = [&](double A, double x) {
        const double base = A - e * mq * std::pow(std::abs(x), q) / q;
        if (base <= 0.0) return 0.0;
        return std::pow(base, 1.0 / e);
    };
    auto mass = [&](double A) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.n(); ++i) s += g.weight(i) * std::pow(prof(A, g.x(i)), r);
        return s;
    };
    // r < p: mass increases with A; r > p: base^{1/e} with e<0, mass decreases with A.
    double lo = 1e-6, hi = 1.0;
    const bool increasing = e > 0.0;
    auto too_small = [&](double A) { return increasing ? mass(A) < 1.0 : mass(A) > 1.0; };
    int guard = 0;
    while (too_small(hi)) {
        hi *= 2.0;
        if (++guard > 200) fail(ErrorKind::confinement, "cannot normalize the extremal on the grid");
    }
    guard = 0;
    while (!too_small(lo)) {
        lo *= 0.5;
        if (++guard > 200) fail(ErrorKind::confinement, "cannot normalize the extremal on the grid");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (too_small(mid) ? lo : hi) = mid;
    }
    const double A = 0.5 * (lo + hi);
    std::vector<double> h(g.n()), hr(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) {
        h[i] = prof(A, g.x(i));
        hr[i] = std::pow(h[i], r);
    }
    const double peak = *std::max_element(hr.begin(), hr.end());
    if (std::max(hr.front(), hr.back()) > 1e-6 * peak)
        fail(ErrorKind::confinement, "extremal profile not negligible at the grid ends");
    const double m = integrate(hr, g);
    const double scale = std::pow(m, -1.0 / r);
    for (std::size_t i = 0; i < g.n(); ++i) {
        h[i] *= scale;
        hr[i] /= m;
    }
    // residual with fourth-order differences on the interior of the support
    const double dx = g.h();
    double res = 0.0;
    for (std::size_t i = 2; i + 2 < g.n(); ++i) {
        if (!(h[i - 2] > 0.0 && h[i + 2] > 0.0)) continue;
        const double dh = (-h[i + 2] + 8.0 * h[i + 1] - 8.0 * h[i - 1] + h[i - 2]) / (12.0 * dx);
        const double x = g.x(i);
        const double rhs = mq * signed_pow(x, q - 1.0) * std::pow(h[i], r / p);
        res = std::max(res, std::abs(-dh - rhs));
    }
    return GnExtremal{GridDensity::from_values(g, std::move(hr), 0.0), std::move(h), A * std::pow(scale, e), res};
}

struct SobolevConstants {
    double C = 0.0;       // sharp constant in ||f||_{p*} <= C ||grad f||_p
    double C_inf = 0.0;   // normalization constant of the extremal
    double H_PF = 0.0;    // int rho_inf^{1-1/n}
    double mass = 0.0;    // int rho_inf (should be 1)
};

namespace detail {

// int_{R^n} f(|x|) dx = n omega_n int_0^inf r^{n-1} f(r) dr, with r = e^s.
template <class Fn>
double radial_integral(Fn&& f, int n, int per_unit = 400, double smin = -40.0, double smax = 60.0)
{
    const double dn = n;
    const double surf = dn * std::exp(0.5 * dn * std::log(M_PI) - std::lgamma(dn / 2.0 + 1.0));
    const auto N = static_cast<long>((smax - smin) * per_unit);
    const double ds = (smax - smin) / static_cast<double>(N);
    double s = 0.0;
    for (long k = 0; k <= N; ++k) {
        const double sk = smin + ds * static_cast<double>(k);
        const double r = std::exp(sk);
        const double w = (k == 0 || k == N) ? 0.5 : 1.0;
        s += w * std::pow(r, dn) * f(r);
    }
    return surf * s * ds;
}

inline SobolevConstants sobolev_constants_at(double p, int n, int per_unit)
{
    const double dn = n;
    const double q = p / (p - 1.0);
    const double ps = dn * p / (dn - p);
    const double a = ps / (dn * q);
    const double J = radial_integral([&](double r) { return std::pow(a * std::pow(r, q) + 1.0, -dn); }, n, per_unit);
    SobolevConstants sc;
    sc.C_inf = (1.0 - dn) * std::pow(J, p / dn);
    const double b = -sc.C_inf / (dn - 1.0);
    auto rho = [&](double r) { return std::pow(a * std::pow(r, q) + b, -dn); };
    const double gam = 1.0 - 1.0 / dn;
    sc.H_PF = radial_integral([&](double r) { return std::pow(rho(r), gam); }, n, per_unit);
    sc.mass = radial_integral(rho, n, per_unit);
    sc.C = std::pow(ps * (dn - 1.0) / (dn * p * (sc.H_PF - sc.C_inf)), 1.0 / p);
    return sc;
}

} // namespace detail

inline SobolevConstants sobolev_constants(double p, int n)
{
    if (!(p > 1.0) || !(p < n)) fail(ErrorKind::domain, "sobolev_constants needs 1 < p < n");
    return detail::sobolev_constants_at(p, n, 400);
}

} // namespace wassineq
