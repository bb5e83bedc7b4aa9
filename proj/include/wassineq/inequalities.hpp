#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "functionals.hpp"
#include "measures.hpp"
#include "models.hpp"
#include "stationary.hpp"
#include "transport.hpp"

namespace wassineq {

struct Tolerances {
    double tol = 1e-4;
    double tol_eq = 1e-3;
};

struct IneqReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    double scale = 1.0;
    double tol = 1e-4;
    bool pass = false;
    bool equality_case = false;
    std::string inputs_digest;
    std::string reason; // set when the check could not be evaluated
    std::vector<std::pair<std::string, double>> extras;

    double extra(const std::string& key) const
    {
        for (const auto& [k, v] : extras)
            if (k == key) return v;
        fail(ErrorKind::domain, "report has no value '" + key + "'");
    }
};

inline IneqReport make_report(std::string name, double lhs, double rhs, const Tolerances& t, std::string digest)
{
    IneqReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = rhs - lhs;
    r.scale = std::max({std::abs(lhs), std::abs(rhs), 1.0});
    r.tol = t.tol;
    r.pass = std::isfinite(r.slack) && r.slack >= -t.tol * r.scale;
    r.equality_case = std::isfinite(r.slack) && std::abs(r.slack) <= t.tol_eq * r.scale;
    r.inputs_digest = std::move(digest);
    return r;
}

inline IneqReport failed_report(std::string name, std::string reason, const Tolerances& t)
{
    IneqReport r;
    r.name = std::move(name);
    r.lhs = r.rhs = r.slack = std::nan("");
    r.tol = t.tol;
    r.pass = false;
    r.reason = std::move(reason);
    return r;
}

// FNV-1a over the raw inputs of a check.
class Digest {
public:
    Digest& add(double v)
    {
        unsigned char b[sizeof v];
        std::memcpy(b, &v, sizeof v);
        for (unsigned char c : b) mix(c);
        return *this;
    }
    Digest& add(std::span<const double> v)
    {
        for (double x : v) add(x);
        return *this;
    }
    Digest& add(const std::string& s)
    {
        for (unsigned char c : s) mix(c);
        mix(0);
        return *this;
    }
    Digest& add(const GridDensity& r)
    {
        add(r.grid().a()).add(r.grid().b()).add(static_cast<double>(r.grid().n()));
        return add(r.values());
    }
    Digest& add(const EntropyModel& m) { return add(m.label()).add(static_cast<double>(m.dim_n())); }
    Digest& add(const PotentialPair& p) { return add(p.V.label).add(p.lambda).add(p.W.label).add(p.nu); }
    Digest& add(const YoungPair& y) { return add(y.label); }
    std::string hex() const
    {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
        return buf;
    }

private:
    void mix(unsigned char c)
    {
        h_ ^= c;
        h_ *= 0x100000001b3ULL;
    }
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

namespace detail {

inline void require_admissible(const EntropyModel& m)
{
    auto a = admissibility_check(m);
    if (!a.pass) fail(ErrorKind::hypothesis, "entropy " + m.label() + " not admissible: " + a.message);
}

inline std::vector<double> xs(const Grid1D& g) { return g.nodes(); }

// 1/2 double integral of K(x - y) rho rho, K(z) = z W'(z)
inline double virial_interaction(const GridDensity& rho, const Potential& W)
{
    if (W.is_zero) return 0.0;
    return interaction_energy_kernel(rho, [&](double z) { return z * W.d(z); });
}

inline GridDensity reference_or_solve(const EntropyModel& m, const PotentialPair& pot, const Grid1D& g,
                                      const GridDensity* given)
{
    if (given) return *given;
    return solve_reference(m, pot, g).density;
}

inline double sigma_of(const YoungPair& yp)
{
    // int e^{-c} over the real line, on a window where c exceeds 60
    double R = 1.0;
    while (yp.c(R) < 60.0 || yp.c(-R) < 60.0) R *= 2.0;
    Grid1D g(-R, R, 200001);
    return integrate(g.sample([&](double x) { return std::exp(-yp.c(x)); }), g);
}

inline double lp_norm_p(std::span<const double> f, const Grid1D& g, double p)
{
    std::vector<double> a(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) a[i] = std::pow(std::abs(f[i]), p);
    return integrate(a, g);
}

} // namespace detail

// ------------------------------------------------------------------ master principle

inline IneqReport check_master(const GridDensity& rho0, const GridDensity& rho1, const EntropyModel& m,
                               const PotentialPair& pot, const YoungPair& yp, const Tolerances& t = {})
{
    detail::require_admissible(m);
    const auto& g = rho0.grid();
    pot.validate(g);
    if (!rho0.strictly_positive()) fail(ErrorKind::positivity, "master principle needs rho0 > 0");
    const std::size_t n = g.n();
    const double dn = m.dim_n();

    std::vector<double> Vc = sample(pot.V, g);
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) {
        c[i] = yp.c(g.x(i));
        Vc[i] += c[i];
    }
    auto energy = [&](const GridDensity& r) {
        return internal_energy(r, m) + potential_energy(r, Vc) + interaction_energy(r, pot.W);
    };
    const double w2 = w2_distance(rho0, rho1);
    const double db = barycenter(rho0) - barycenter(rho1);
    const double lhs = energy(rho0) - energy(rho1) + 0.5 * (pot.lambda + pot.nu) * w2 * w2 - 0.5 * pot.nu * db * db;

    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = g.x(i);
        const double xdv = pot.V.is_zero ? 0.0 : x * pot.V.d(x);
        f[i] = -dn * m.PF(rho0[i]) + (c[i] + xdv) * rho0[i];
    }
    const double slot = integrate(f, g) + detail::virial_interaction(rho0, pot.W);
    auto V = sample(pot.V, g);
    const auto prod = production_cstar(rho0, xi_gradient(rho0, m, V, pot.W), yp);
    const double rhs = slot + prod.calI;

    Digest d;
    d.add("master").add(rho0).add(rho1).add(m).add(pot).add(yp);
    auto r = make_report("check_master", lhs, rhs, t, d.hex());
    r.extras = {{"w2", w2}, {"calI", prod.calI}, {"slot", slot}};
    return r;
}

// ------------------------------------------------------------------ general Sobolev

inline std::vector<IneqReport> check_general_sobolev(const GridDensity& rho, const EntropyModel& m,
                                                     const PotentialPair& pot, const YoungPair& yp,
                                                     const Tolerances& t = {},
                                                     const ReferenceDensity* ref = nullptr)
{
    detail::require_admissible(m);
    const auto& g = rho.grid();
    if (pot.lambda < 0.0 || pot.nu < 0.0)
        fail(ErrorKind::hypothesis, "general Sobolev form needs convex V and W (lambda, nu >= 0)");
    pot.validate(g);
    const std::size_t n = g.n();
    const double dn = m.dim_n();

    std::optional<ReferenceDensity> solved;
    if (!ref) {
        solved = solve_reference(m, pot, &yp, g);
        ref = &*solved;
    }
    const auto& rc = ref->density;

    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = g.x(i);
        const double v = pot.V.is_zero ? 0.0 : pot.V(x) - x * pot.V.d(x);
        f[i] = m.F(rho[i]) + dn * m.PF(rho[i]) + v * rho[i];
    }
    double lhs = integrate(f, g);
    if (!pot.W.is_zero)
        lhs += interaction_energy_kernel(rho, [&](double z) { return pot.W(z) - z * pot.W.d(z); });

    auto V = sample(pot.V, g);
    const auto prod = production_cstar(rho, xi_gradient(rho, m, V, pot.W), yp);
    for (std::size_t i = 0; i < n; ++i) f[i] = m.PF(rc[i]);
    const double HPF = integrate(f, g);
    const double HW = interaction_energy(rc, pot.W);
    const double rhs = prod.calI - HPF - HW + ref->K;

    Digest d;
    d.add("general_sobolev").add(rho).add(m).add(pot).add(yp);
    std::vector<IneqReport> out;
    out.push_back(make_report("check_general_sobolev", lhs, rhs, t, d.hex()));
    out.back().extras = {{"calI", prod.calI}, {"K", ref->K}, {"H_PF_ref", HPF}};
    if (pot.V.is_zero && pot.W.is_zero) {
        // drops the nonpositive -H^{P_F}(rho_c) term
        out.push_back(make_report("check_general_sobolev/simplified", lhs, prod.calI + ref->K, t, d.hex()));
    }
    return out;
}

// ------------------------------------------------------------------ Euclidean LSI

inline IneqReport check_euclidean_lsi(const GridDensity& rho, const YoungPair& yp, int n = 1,
                                      const Tolerances& t = {})
{
    if (!yp.p) fail(ErrorKind::hypothesis, "Young pair " + yp.label + " has no homogeneity degree");
    if (n != 1) fail(ErrorKind::domain, "grid evaluation is one-dimensional");
    if (!rho.strictly_positive()) fail(ErrorKind::positivity, "Euclidean LSI needs rho > 0");
    const auto& g = rho.grid();
    const double p = *yp.p;
    std::vector<double> lr(g.n()), f(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) lr[i] = std::log(rho[i]);
    auto dl = gradient(lr, g);
    for (std::size_t i = 0; i < g.n(); ++i) f[i] = rho[i] * lr[i];
    const double lhs = integrate(f, g);
    for (std::size_t i = 0; i < g.n(); ++i) f[i] = rho[i] * yp.c_star(-dl[i]);
    const double calI = integrate(f, g);
    const double sc = detail::sigma_of(yp);
    const double dn = n;
    const double rhs = dn / p * std::log(p / (dn * std::exp(p - 1.0) * std::pow(sc, p / dn)) * calI);
    Digest d;
    d.add("euclidean_lsi").add(rho).add(yp);
    auto r = make_report("check_euclidean_lsi", lhs, rhs, t, d.hex());
    r.extras = {{"sigma_c", sc}, {"calI", calI}};
    return r;
}

// ------------------------------------------------------------------ p-LSI

inline double plsi_constant(double p, int n)
{
    if (!(p >= 1.0)) fail(ErrorKind::domain, "p-LSI constant needs p >= 1");
    if (n < 1) fail(ErrorKind::domain, "p-LSI constant needs n >= 1");
    const double dn = n;
    if (p == 1.0) return std::exp(std::lgamma(dn / 2.0 + 1.0) / dn) / (dn * std::sqrt(M_PI));
    const double q = p / (p - 1.0);
    const double lg = std::lgamma(dn / 2.0 + 1.0) - std::lgamma(dn / q + 1.0);
    return p / dn * std::pow((p - 1.0) / M_E, p - 1.0) * std::pow(M_PI, -p / 2.0) * std::exp(p / dn * lg);
}

inline IneqReport check_plsi(std::span<const double> f, const Grid1D& g, double p, int n = 1,
                             const Tolerances& t = {})
{
    require_size(f, g, "check_plsi");
    if (n != 1) fail(ErrorKind::domain, "grid evaluation is one-dimensional");
    const double norm = detail::lp_norm_p(f, g, p);
    if (std::abs(norm - 1.0) > 1e-8) fail(ErrorKind::domain, "f must have unit L^p norm");
    std::vector<double> a(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) {
        const double fp = std::pow(std::abs(f[i]), p);
        a[i] = fp > 0.0 ? fp * std::log(fp) : 0.0;
    }
    const double lhs = integrate(a, g);
    auto df = gradient(f, g);
    const double grad = detail::lp_norm_p(df, g, p);
    const double rhs = n / p * std::log(plsi_constant(p, n) * grad);
    Digest d;
    d.add("plsi").add(f).add(p);
    auto r = make_report("check_plsi", lhs, rhs, t, d.hex());
    r.extras = {{"C_p", plsi_constant(p, n)}, {"grad_p", grad}};
    return r;
}

// ------------------------------------------------------------------ Gagliardo-Nirenberg

struct GnExponents {
    double p, r, q, gamma, kappa, theta, pstar;
};

inline GnExponents gn_exponents(double p, double r, int n = 1)
{
    if (!(p > 1.0) || !(r > 0.0) || std::abs(r - p) < 1e-12)
        fail(ErrorKind::hypothesis, "GN exponents need p > 1, r > 0, r != p");
    GnExponents e{};
    e.p = p;
    e.r = r;
    e.q = p / (p - 1.0);
    e.gamma = 1.0 / r + 1.0 / e.q;
    if (!(e.gamma > 0.0) || std::abs(e.gamma - 1.0) < 1e-12)
        fail(ErrorKind::hypothesis, "GN exponents need gamma = 1/r + 1/q > 0 and != 1");
    const double dn = n;
    e.kappa = 1.0 / (e.gamma - 1.0) + dn;
    e.pstar = dn * p / (dn - p);
    // 1/r = theta/p* + (1-theta)/(r gamma)
    const double s = r * e.gamma;
    e.theta = (1.0 / r - 1.0 / s) / (1.0 / e.pstar - 1.0 / s);
    return e;
}

struct GnConstants {
    GnExponents ex;
    double C0 = 0.0;    // -H^{P_F}(rho_inf) + C_inf
    double C_inf = 0.0; // F'(rho_inf) + c on the support
    double H_PF = 0.0;
    double C_gn = 0.0;  // sharp GN constant (quotient at the extremal)
};

inline double gn_quotient(std::span<const double> f, const Grid1D& g, const GnExponents& e)
{
    auto df = gradient(f, g);
    const double nr = std::pow(detail::lp_norm_p(f, g, e.r), 1.0 / e.r);
    const double ng = std::pow(detail::lp_norm_p(df, g, e.p), 1.0 / e.p);
    const double ns = std::pow(detail::lp_norm_p(f, g, e.r * e.gamma), 1.0 / (e.r * e.gamma));
    return nr / (std::pow(ng, e.theta) * std::pow(ns, 1.0 - e.theta));
}

inline GnConstants gn_constants(double p, double r, const Grid1D& g)
{
    GnConstants k;
    k.ex = gn_exponents(p, r, 1);
    auto ext = gn_extremal(p, r, g);
    const double gam = k.ex.gamma;
    std::vector<double> a(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) a[i] = std::pow(ext.rho[i], gam);
    k.H_PF = integrate(a, g);
    // c(0) = 0; evaluate F'(rho_inf) at the peak
    const double peak = *std::max_element(ext.rho.values().begin(), ext.rho.values().end());
    k.C_inf = gam / (gam - 1.0) * std::pow(peak, gam - 1.0);
    k.C0 = -k.H_PF + k.C_inf;
    k.C_gn = gn_quotient(ext.h, g, k.ex);
    return k;
}

namespace detail {

template <class Fn>
double golden_min(Fn&& G, double lo, double hi, int iters = 200)
{
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = G(c), fd = G(d);
    for (int i = 0; i < iters && b - a > 1e-12; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = G(c);
        }
        else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = G(d);
        }
    }
    return std::min(fc, fd);
}

} // namespace detail

inline std::vector<IneqReport> check_gagliardo_nirenberg(std::span<const double> f, const Grid1D& g, double p,
                                                         double r, const Tolerances& t = {},
                                                         const GnConstants* consts = nullptr)
{
    require_size(f, g, "check_gagliardo_nirenberg");
    std::optional<GnConstants> own;
    if (!consts) {
        own = gn_constants(p, r, g);
        consts = &*own;
    }
    const auto& e = consts->ex;
    if (std::abs(detail::lp_norm_p(f, g, r) - 1.0) > 1e-8) fail(ErrorKind::domain, "f must have unit L^r norm");
    const double s = r * e.gamma;
    const double A = detail::lp_norm_p(f, g, s);
    auto df = gradient(f, g);
    const double B = detail::lp_norm_p(df, g, p);

    Digest d;
    d.add("gn").add(f).add(p).add(r);
    std::vector<IneqReport> out;
    // underlying principle: kappa int|f|^{r gamma} <= (r gamma/p) int|grad f|^p + C0
    out.push_back(make_report("check_gagliardo_nirenberg", e.kappa * A, s / p * B + consts->C0, t, d.hex()));
    out.back().extras = {{"theta", e.theta}, {"C_gn", consts->C_gn}, {"C0", consts->C0}};

    // GN inequality with the exported constant
    const double nr = 1.0;
    const double rhs = consts->C_gn * std::pow(std::pow(B, 1.0 / p), e.theta) * std::pow(std::pow(A, 1.0 / s), 1.0 - e.theta);
    out.push_back(make_report("check_gagliardo_nirenberg/gn", nr, rhs, t, d.hex()));

    // scaling-optimized form: min over lambda of G(lambda) >= -C0 for f_lambda = lambda^{1/r} f(lambda x)
    const double beta = p / r + p - 1.0;
    auto G = [&](double loglam) {
        const double lam = std::exp(loglam);
        return s / p * std::pow(lam, beta) * B - e.kappa * std::pow(lam, e.gamma - 1.0) * A;
    };
    const double Gmin = detail::golden_min(G, -5.0, 5.0);
    out.push_back(make_report("check_gagliardo_nirenberg/optimized", -consts->C0, Gmin, t, d.hex()));
    return out;
}

// ------------------------------------------------------------------ quadratic-cost family

namespace detail {

struct PairTerms {
    double H = 0.0;  // H(rho0 | rho1)
    double W2 = 0.0;
    double I2 = 0.0;
    double db = 0.0;
};

inline PairTerms pair_terms(const GridDensity& rho0, const GridDensity& rho1, const EntropyModel& m,
                            const PotentialPair& pot)
{
    PairTerms pt;
    pt.H = relative_energy(rho0, rho1, m, pot);
    pt.W2 = w2_distance(rho0, rho1);
    pt.I2 = entropy_production_I2(rho0, m, pot);
    pt.db = barycenter(rho0) - barycenter(rho1);
    return pt;
}

} // namespace detail

inline IneqReport check_general_lsi(const GridDensity& rho0, const GridDensity& rho1, const EntropyModel& m,
                                    const PotentialPair& pot, double sigma, const Tolerances& t = {})
{
    if (!(sigma > 0.0)) fail(ErrorKind::domain, "sigma must be > 0");
    detail::require_admissible(m);
    pot.validate(rho0.grid());
    auto pt = detail::pair_terms(rho0, rho1, m, pot);
    const double mu = pot.lambda, nu = pot.nu;
    const double lhs = pt.H + 0.5 * (mu + nu - 1.0 / sigma) * pt.W2 * pt.W2 - 0.5 * nu * pt.db * pt.db;
    const double rhs = 0.5 * sigma * pt.I2;
    Digest d;
    d.add("general_lsi").add(rho0).add(rho1).add(m).add(pot).add(sigma);
    auto r = make_report("check_general_lsi", lhs, rhs, t, d.hex());
    r.extras = {{"H", pt.H}, {"W2", pt.W2}, {"I2", pt.I2}, {"sigma", sigma}};
    return r;
}

inline std::vector<IneqReport> check_hwbi(const GridDensity& rho0, const GridDensity& rho1, const EntropyModel& m,
                                          const PotentialPair& pot, const Tolerances& t = {})
{
    detail::require_admissible(m);
    pot.validate(rho0.grid());
    auto pt = detail::pair_terms(rho0, rho1, m, pot);
    const double mu = pot.lambda, nu = pot.nu;
    const double rhs = pt.W2 * std::sqrt(pt.I2) - 0.5 * (mu + nu) * pt.W2 * pt.W2 + 0.5 * nu * pt.db * pt.db;
    Digest d;
    d.add("hwbi").add(rho0).add(rho1).add(m).add(pot);
    std::vector<IneqReport> out;
    out.push_back(make_report("check_hwbi", pt.H, rhs, t, d.hex()));
    out.back().extras = {{"H", pt.H}, {"W2", pt.W2}, {"I2", pt.I2}};
    if (pot.W.is_zero)
        out.push_back(make_report("check_hwbi/hwi", pt.H, pt.W2 * std::sqrt(pt.I2) - 0.5 * mu * pt.W2 * pt.W2, t,
                                  d.hex()));
    return out;
}

inline std::vector<IneqReport> check_lsi_interaction(const GridDensity& rho0, const GridDensity& rho1,
                                                     const EntropyModel& m, const PotentialPair& pot,
                                                     const Tolerances& t = {})
{
    detail::require_admissible(m);
    const double mu = pot.lambda, nu = pot.nu;
    if (!(mu + nu > 0.0)) fail(ErrorKind::hypothesis, "needs mu + nu > 0");
    pot.validate(rho0.grid());
    auto pt = detail::pair_terms(rho0, rho1, m, pot);
    Digest d;
    d.add("lsi_interaction").add(rho0).add(rho1).add(m).add(pot);
    std::vector<IneqReport> out;
    out.push_back(make_report("check_lsi_interaction", pt.H - 0.5 * nu * pt.db * pt.db, pt.I2 / (2.0 * (mu + nu)), t,
                              d.hex()));
    out.back().extras = {{"H", pt.H}, {"I2", pt.I2}, {"db", pt.db}};
    if (std::abs(pt.db) <= 1e-8)
        out.push_back(make_report("check_lsi_interaction/matched", pt.H, pt.I2 / (2.0 * (mu + nu)), t, d.hex()));
    if (nu >= 0.0 && mu > 0.0 && (pot.W.is_zero || modulus_check(pot.W.f, 0.0, rho0.grid())))
        out.push_back(make_report("check_lsi_interaction/convex_w", pt.H, pt.I2 / (2.0 * mu), t, d.hex()));
    return out;
}

inline std::vector<IneqReport> check_talagrand(const GridDensity& rho, const EntropyModel& m, const PotentialPair& pot,
                                               const Tolerances& t = {}, const GridDensity* rho_U = nullptr)
{
    detail::require_admissible(m);
    const double mu = pot.lambda, nu = pot.nu;
    if (!(mu + nu > 0.0)) fail(ErrorKind::hypothesis, "needs mu + nu > 0");
    const auto& g = rho.grid();
    pot.validate(g);
    const GridDensity ref = detail::reference_or_solve(m, pot, g, rho_U);
    const double H = relative_energy(rho, ref, m, pot);
    const double W2 = w2_distance(rho, ref);
    const double db = barycenter(rho) - barycenter(ref);
    Digest d;
    d.add("talagrand").add(rho).add(m).add(pot);
    std::vector<IneqReport> out;
    out.push_back(make_report("check_talagrand", 0.5 * (mu + nu) * W2 * W2 - 0.5 * nu * db * db, H, t, d.hex()));
    out.back().extras = {{"H", H}, {"W2", W2}, {"db", db}};
    if (std::abs(db) <= 1e-8)
        out.push_back(make_report("check_talagrand/matched", W2, std::sqrt(std::max(0.0, 2.0 * H / (mu + nu))), t,
                                  d.hex()));
    const bool convex_w = pot.W.is_zero || modulus_check(pot.W.f, 0.0, g);
    if (nu >= 0.0 && mu > 0.0 && convex_w)
        out.push_back(make_report("check_talagrand/convex_w", W2, std::sqrt(std::max(0.0, 2.0 * H / mu)), t, d.hex()));
    if (m.kind() == EntropyModel::Kind::boltzmann && pot.W.is_zero && mu > 0.0) {
        // f ln f against rho_U with f = rho / rho_U
        std::vector<double> a(g.n());
        for (std::size_t i = 0; i < g.n(); ++i) {
            const double f = ref[i] > 0.0 ? rho[i] / ref[i] : 0.0;
            a[i] = f > 0.0 ? f * std::log(f) * ref[i] : 0.0;
        }
        const double ent = integrate(a, g);
        out.push_back(make_report("check_talagrand/original", W2, std::sqrt(std::max(0.0, 2.0 / mu * ent)), t, d.hex()));
        out.back().extras = {{"relative_entropy", ent}};
    }
    return out;
}

// ------------------------------------------------------------------ Boltzmann reference family

inline GridDensity boltzmann_reference(const PotentialPair& pot, const Grid1D& g)
{
    PotentialPair u;
    u.V = pot.V;
    u.lambda = pot.lambda;
    return solve_reference(EntropyModel::boltzmann(), u, g).density;
}

// f is a density ratio against rho_U (int f rho_U = 1).
inline std::vector<IneqReport> check_boltzmann_lsi(std::span<const double> f, const Grid1D& g,
                                                   const PotentialPair& pot, std::optional<double> sigma = {},
                                                   const Tolerances& t = {}, const GridDensity* rho_U = nullptr)
{
    require_size(f, g, "check_boltzmann_lsi");
    const double mu = pot.lambda;
    if (!(mu > 0.0)) fail(ErrorKind::hypothesis, "needs a uniformly convex U (mu > 0)");
    if (!modulus_check(pot.V.f, mu, g)) fail(ErrorKind::hypothesis, "U'' >= mu fails on the grid");
    const GridDensity ref = rho_U ? *rho_U : boltzmann_reference(pot, g);
    const std::size_t n = g.n();
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(f[i] >= 0.0)) fail(ErrorKind::domain, "f must be nonnegative");
        a[i] = f[i] * ref[i];
    }
    if (std::abs(integrate(a, g) - 1.0) > 1e-8) fail(ErrorKind::domain, "int f rho_U must be 1");
    const GridDensity tilted = normalize(a, g, 0.0);
    for (std::size_t i = 0; i < n; ++i) a[i] = f[i] > 0.0 ? f[i] * std::log(f[i]) * ref[i] : 0.0;
    const double ent = integrate(a, g);
    std::vector<double> gfun(n);
    for (std::size_t i = 0; i < n; ++i) gfun[i] = std::sqrt(f[i]);
    auto dg = gradient(gfun, g);
    for (std::size_t i = 0; i < n; ++i) a[i] = dg[i] * dg[i] * ref[i];
    const double dirichlet = integrate(a, g);
    const double fisher = 4.0 * dirichlet; // int |grad f|^2 / f rho_U
    const double W2 = w2_distance(tilted, ref);
    const double sg = sigma.value_or(1.0 / mu);

    Digest d;
    d.add("boltzmann_lsi").add(f).add(pot).add(sg);
    std::vector<IneqReport> out;
    out.push_back(make_report("check_boltzmann_lsi", ent, 2.0 / mu * dirichlet, t, d.hex()));
    out.back().extras = {{"relative_entropy", ent}, {"fisher", fisher}, {"W2", W2}};
    out.push_back(make_report("check_boltzmann_lsi/hwi_sigma", ent + 0.5 * (mu - 1.0 / sg) * W2 * W2,
                              0.5 * sg * fisher, t, d.hex()));
    out.push_back(make_report("check_boltzmann_lsi/hwi", ent, W2 * std::sqrt(fisher) - 0.5 * mu * W2 * W2, t, d.hex()));
    return out;
}

inline IneqReport check_poincare(std::span<const double> f_in, const Grid1D& g, const PotentialPair& pot,
                                 const Tolerances& t = {}, const GridDensity* rho_U = nullptr)
{
    require_size(f_in, g, "check_poincare");
    const double mu = pot.lambda;
    if (!(mu > 0.0)) fail(ErrorKind::hypothesis, "needs a uniformly convex U (mu > 0)");
    if (!modulus_check(pot.V.f, mu, g)) fail(ErrorKind::hypothesis, "U'' >= mu fails on the grid");
    const GridDensity ref = rho_U ? *rho_U : boltzmann_reference(pot, g);
    const std::size_t n = g.n();
    std::vector<double> f(f_in.begin(), f_in.end()), a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = f[i] * ref[i];
    const double mean = integrate(a, g);
    if (std::abs(mean) > 1e-8)
        for (double& v : f) v -= mean;
    for (std::size_t i = 0; i < n; ++i) a[i] = f[i] * f[i] * ref[i];
    const double lhs = integrate(a, g);
    auto df = gradient(f, g);
    for (std::size_t i = 0; i < n; ++i) a[i] = df[i] * df[i] * ref[i];
    const double rhs = integrate(a, g) / mu;
    Digest d;
    d.add("poincare").add(f_in).add(pot);
    auto r = make_report("check_poincare", lhs, rhs, t, d.hex());
    r.extras = {{"centred_by", std::abs(mean) > 1e-8 ? mean : 0.0}};
    return r;
}

inline IneqReport check_concentration(double lo, double hi, double eps, const PotentialPair& pot, const Grid1D& g,
                                      const Tolerances& t = {}, const GridDensity* rho_U = nullptr)
{
    const double mu = pot.lambda;
    if (!(mu > 0.0)) fail(ErrorKind::hypothesis, "needs a uniformly convex U (mu > 0)");
    if (!(hi > lo)) fail(ErrorKind::domain, "set B must be a nonempty interval");
    const GridDensity ref = rho_U ? *rho_U : boltzmann_reference(pot, g);
    const double gB = mass_between(ref, lo, hi);
    if (!(gB > 0.0)) fail(ErrorKind::hypothesis, "gamma(B) = 0");
    const double thr = std::sqrt(2.0 / mu * std::log(1.0 / gB));
    if (eps < thr - 1e-12) fail(ErrorKind::hypothesis, "epsilon below the threshold sqrt((2/mu) ln(1/gamma(B)))");
    const double gBe = mass_between(ref, lo - eps, hi + eps);
    const double d0 = std::max(0.0, eps - thr);
    const double bound = 1.0 - std::exp(-0.5 * mu * d0 * d0);
    Digest d;
    d.add("concentration").add(lo).add(hi).add(eps).add(pot).add(ref);
    auto r = make_report("check_concentration", bound, gBe, t, d.hex());
    r.extras = {{"gamma_B", gB}, {"gamma_B_eps", gBe}, {"threshold", thr}};
    return r;
}

// ------------------------------------------------------------------ duality

struct DualityVariant {
    enum class Kind { general, plog, gn } kind = Kind::general;
    double p = 2.0;
    double r = 4.0;
    double mu = 1.0;
};

// General: -H^F_c(rho1) <= -H^{F+nP_F}(rho0) + int rho0 c*(-grad F'(rho0)).
inline IneqReport check_duality_general(const GridDensity& rho0, const GridDensity& rho1, const EntropyModel& m,
                                        const YoungPair& yp, const Tolerances& t = {})
{
    detail::require_admissible(m);
    const auto& g = rho0.grid();
    const std::size_t n = g.n();
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = m.F(rho1[i]) + yp.c(g.x(i)) * rho1[i];
    const double lhs = -integrate(a, g);
    for (std::size_t i = 0; i < n; ++i) a[i] = m.GF(rho0[i]);
    std::vector<double> zero(n, 0.0);
    const auto prod = production_cstar(rho0, xi_gradient(rho0, m, zero, Potential::zero()), yp);
    const double rhs = -integrate(a, g) + prod.calI;
    Digest d;
    d.add("duality_general").add(rho0).add(rho1).add(m).add(yp);
    return make_report("check_duality", lhs, rhs, t, d.hex());
}

// J(rho) <= I(f) for the p-log and GN variants.
inline IneqReport check_duality(const GridDensity& rho, std::span<const double> f, const DualityVariant& v,
                                const Tolerances& t = {})
{
    const auto& g = rho.grid();
    require_size(f, g, "check_duality");
    const std::size_t n = g.n();
    const double p = v.p, mu = v.mu;
    if (!(p > 1.0) || !(mu > 0.0)) fail(ErrorKind::hypothesis, "duality needs p > 1, mu > 0");
    const double q = p / (p - 1.0);
    std::vector<double> a(n);
    auto df = gradient(f, g);
    double J = 0.0, I = 0.0;
    Digest d;
    if (v.kind == DualityVariant::Kind::plog) {
        if (std::abs(detail::lp_norm_p(f, g, p) - 1.0) > 1e-8) fail(ErrorKind::domain, "f must have unit L^p norm");
        for (std::size_t i = 0; i < n; ++i)
            a[i] = (rho[i] > 0.0 ? -rho[i] * std::log(rho[i]) : 0.0) -
                   (p - 1.0) * std::pow(std::abs(mu * g.x(i)), q) * rho[i];
        J = integrate(a, g);
        for (std::size_t i = 0; i < n; ++i) {
            const double fp = std::pow(std::abs(f[i]), p);
            a[i] = (fp > 0.0 ? -fp * std::log(fp) : 0.0) + std::pow(std::abs(df[i] / mu), p);
        }
        I = integrate(a, g) - 1.0;
        d.add("duality_plog");
    }
    else if (v.kind == DualityVariant::Kind::gn) {
        const auto e = gn_exponents(p, v.r, 1);
        const double gam = e.gamma, rg = v.r * gam;
        if (std::abs(detail::lp_norm_p(f, g, v.r) - 1.0) > 1e-8) fail(ErrorKind::domain, "f must have unit L^r norm");
        for (std::size_t i = 0; i < n; ++i)
            a[i] = -std::pow(rho[i], gam) / (gam - 1.0) - rg * std::pow(mu, q) / q * std::pow(std::abs(g.x(i)), q) * rho[i];
        J = integrate(a, g);
        for (std::size_t i = 0; i < n; ++i)
            a[i] = -e.kappa * std::pow(std::abs(f[i]), rg) + rg / (p * std::pow(mu, p)) * std::pow(std::abs(df[i]), p);
        I = integrate(a, g);
        d.add("duality_gn").add(v.r);
    }
    else {
        fail(ErrorKind::domain, "use check_duality_general for the general variant");
    }
    d.add(rho).add(f).add(p).add(mu);
    return make_report("check_duality", J, I, t, d.hex());
}

// ------------------------------------------------------------------ transport machinery as reports

inline IneqReport convexity_report(const GridDensity& rho0, const GridDensity& rho1, const EntropyModel& m,
                                   std::span<const double> ts)
{
    auto c = check_displacement_convexity(rho0, rho1, m, ts);
    const std::size_t i = c.worst;
    const double a = (ts[i + 1] - ts[i]) / (ts[i + 1] - ts[i - 1]);
    const double chord = a * c.energies[i - 1] + (1.0 - a) * c.energies[i + 1];
    Digest d;
    d.add("convexity").add(rho0).add(rho1).add(m).add(ts);
    return make_report("check_displacement_convexity", c.energies[i], chord, Tolerances{1e-5, 1e-3}, d.hex());
}

inline std::vector<IneqReport> lemma22_reports(const GridDensity& rho0, const GridDensity& rho1,
                                               const EntropyModel& m, const PotentialPair& pot,
                                               const Tolerances& t = {})
{
    auto s = lemma22_slacks(rho0, rho1, m, pot);
    Digest d;
    d.add("lemma22").add(rho0).add(rho1).add(m).add(pot);
    // slack reported against a zero lower bound, scaled by the size of the energies involved
    auto rep = [&](const char* name, double slack) {
        IneqReport r = make_report(name, 0.0, slack, t, d.hex());
        r.scale = s.scale;
        r.pass = slack >= -t.tol * s.scale;
        r.equality_case = std::abs(slack) <= t.tol_eq * s.scale;
        return r;
    };
    return {rep("check_lemma22/internal", s.internal), rep("check_lemma22/potential", s.potential),
            rep("check_lemma22/interaction", s.interaction)};
}

} // namespace wassineq
