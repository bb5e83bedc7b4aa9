#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "measures.hpp"

namespace wassineq {

using ScalarFn = std::function<double(double)>;

// Five-point central derivative; step scaled to |x|.
inline double numeric_derivative(const ScalarFn& f, double x, double rel = 1e-3)
{
    const double d = rel * std::max(1.0, std::abs(x));
    return (-f(x + 2 * d) + 8 * f(x + d) - 8 * f(x - d) + f(x - 2 * d)) / (12 * d);
}

inline double numeric_second_derivative(const ScalarFn& f, double x, double rel = 1e-3)
{
    const double d = rel * std::max(1.0, std::abs(x));
    return (-f(x + 2 * d) + 16 * f(x + d) - 30 * f(x) + 16 * f(x - d) - f(x - 2 * d)) / (12 * d * d);
}

// ---------------------------------------------------------------- entropy

class EntropyModel {
public:
    enum class Kind { boltzmann, power, custom };

    static EntropyModel boltzmann(int dim_n = 1)
    {
        EntropyModel m(Kind::boltzmann, 1.0, dim_n);
        m.label_ = "boltzmann";
        return m;
    }

    static EntropyModel power(double gamma, int dim_n = 1)
    {
        if (!(gamma > 0.0) || gamma == 1.0 || !std::isfinite(gamma))
            fail(ErrorKind::domain, "power entropy needs gamma > 0, gamma != 1");
        EntropyModel m(Kind::power, gamma, dim_n);
        m.label_ = "power(" + std::to_string(gamma) + ")";
        return m;
    }

    // User-supplied F with F(0) = 0; derivatives may be numeric.
    static EntropyModel custom(std::string label, ScalarFn F, ScalarFn dF = {}, ScalarFn d2F = {},
                               int dim_n = 1)
    {
        EntropyModel m(Kind::custom, 0.0, dim_n);
        m.label_ = std::move(label);
        m.F_ = std::move(F);
        m.dF_ = dF ? std::move(dF) : ScalarFn([f = m.F_](double x) { return numeric_derivative(f, x); });
        m.d2F_ = d2F ? std::move(d2F) : ScalarFn([f = m.F_](double x) { return numeric_second_derivative(f, x); });
        return m;
    }

    Kind kind() const { return kind_; }
    double gamma() const { return gamma_; }
    int dim_n() const { return dim_n_; }
    const std::string& label() const { return label_; }
    EntropyModel with_dim(int n) const
    {
        EntropyModel m = *this;
        if (n < 1) fail(ErrorKind::domain, "dimension must be >= 1");
        m.dim_n_ = n;
        return m;
    }

    double F(double x) const
    {
        check_arg(x);
        switch (kind_) {
        case Kind::boltzmann: return x > 0.0 ? x * std::log(x) : 0.0;
        case Kind::power: return std::pow(x, gamma_) / (gamma_ - 1.0);
        case Kind::custom: return x > 0.0 ? F_(x) : 0.0;
        }
        return 0.0;
    }

    double dF(double x) const
    {
        check_arg(x);
        if (!(x > 0.0)) fail(ErrorKind::domain, "F' evaluated at 0");
        return dF_unchecked(x);
    }

    double d2F(double x) const
    {
        check_arg(x);
        if (!(x > 0.0)) fail(ErrorKind::domain, "F'' evaluated at 0");
        switch (kind_) {
        case Kind::boltzmann: return 1.0 / x;
        case Kind::power: return gamma_ * std::pow(x, gamma_ - 2.0);
        case Kind::custom: return d2F_(x);
        }
        return 0.0;
    }

    // P_F(x) = x F'(x) - F(x)
    double PF(double x) const
    {
        check_arg(x);
        switch (kind_) {
        case Kind::boltzmann: return x;
        case Kind::power: return std::pow(x, gamma_);
        case Kind::custom: return x > 0.0 ? x * dF_(x) - F_(x) : 0.0;
        }
        return 0.0;
    }

    // P_F'(x) = x F''(x); the diffusivity of the flow.
    double dPF(double x) const
    {
        check_arg(x);
        switch (kind_) {
        case Kind::boltzmann: return 1.0;
        case Kind::power: return x > 0.0 ? gamma_ * std::pow(x, gamma_ - 1.0)
                                         : (gamma_ > 1.0 ? 0.0 : std::numeric_limits<double>::infinity());
        case Kind::custom: return x > 0.0 ? x * d2F_(x) : 0.0;
        }
        return 0.0;
    }

    // G_F(x) = (1-n) F(x) + n x F'(x) = F(x) + n P_F(x)
    double GF(double x) const { return F(x) + dim_n_ * PF(x); }

    // F'(0+); -inf when singular.
    double dF_at_zero() const
    {
        switch (kind_) {
        case Kind::boltzmann: return -std::numeric_limits<double>::infinity();
        case Kind::power: return gamma_ > 1.0 ? 0.0 : -std::numeric_limits<double>::infinity();
        case Kind::custom: return dF_(1e-300);
        }
        return 0.0;
    }
    bool singular_at_zero() const { return !std::isfinite(dF_at_zero()); }

    // F' extended by its limit at 0 (used on compactly supported states).
    double dF_extended(double x) const { return x > 0.0 ? dF_unchecked(x) : dF_at_zero(); }

    // (F')^{-1}(s), clipped at 0; +inf when s is above the range of F'.
    double dF_inverse(double s) const
    {
        switch (kind_) {
        case Kind::boltzmann: return std::exp(s - 1.0);
        case Kind::power: {
            const double t = (gamma_ - 1.0) * s / gamma_;
            if (gamma_ > 1.0) return t > 0.0 ? std::pow(t, 1.0 / (gamma_ - 1.0)) : 0.0;
            return t > 0.0 ? std::pow(t, 1.0 / (gamma_ - 1.0)) : std::numeric_limits<double>::infinity();
        }
        case Kind::custom: {
            if (s <= dF_at_zero()) return 0.0;
            double lo = 0.0, hi = 1.0;
            while (dF_(hi) < s) {
                hi *= 2.0;
                if (hi > 1e300) return std::numeric_limits<double>::infinity();
            }
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (lo + hi);
                (dF_(mid) < s ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }
        }
        return 0.0;
    }

private:
    EntropyModel(Kind k, double g, int n) : kind_(k), gamma_(g), dim_n_(n)
    {
        if (n < 1) fail(ErrorKind::domain, "dimension must be >= 1");
    }

    static void check_arg(double x)
    {
        if (!(x >= 0.0)) fail(ErrorKind::domain, "entropy argument must be >= 0");
    }

    double dF_unchecked(double x) const
    {
        switch (kind_) {
        case Kind::boltzmann: return 1.0 + std::log(x);
        case Kind::power: return gamma_ * std::pow(x, gamma_ - 1.0) / (gamma_ - 1.0);
        case Kind::custom: return dF_(x);
        }
        return 0.0;
    }

    Kind kind_;
    double gamma_;
    int dim_n_;
    std::string label_;
    ScalarFn F_, dF_, d2F_;
};

struct AdmissibilityReport {
    bool pass = false;
    double min_curvature = 0.0; // smallest slope increment (relative)
    double max_slope = 0.0;     // largest slope of A
    std::string message;
};

// A(x) = x^n F(x^{-n}) must be convex and non-increasing on (0, inf).
inline AdmissibilityReport admissibility_check(const EntropyModel& m)
{
    const int n = m.dim_n();
    constexpr int N = 401;
    std::vector<double> xs(N), A(N);
    for (int i = 0; i < N; ++i) {
        xs[i] = std::pow(10.0, -3.0 + 6.0 * i / (N - 1));
        A[i] = std::pow(xs[i], n) * m.F(std::pow(xs[i], -n));
    }
    std::vector<double> slope(N - 1);
    for (int i = 0; i + 1 < N; ++i) slope[i] = (A[i + 1] - A[i]) / (xs[i + 1] - xs[i]);
    AdmissibilityReport r;
    r.min_curvature = std::numeric_limits<double>::infinity();
    r.max_slope = -std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < N; ++i) r.max_slope = std::max(r.max_slope, slope[i]);
    for (int i = 0; i + 2 < N; ++i) {
        double inc = (slope[i + 1] - slope[i]) / std::max(1.0, std::abs(slope[i]));
        r.min_curvature = std::min(r.min_curvature, inc);
    }
    const bool convex = r.min_curvature >= -1e-9;
    const bool decreasing = r.max_slope <= 1e-9;
    r.pass = convex && decreasing;
    if (r.pass) r.message = "ok";
    else if (!convex) r.message = "x^n F(x^-n) not convex";
    else r.message = "x^n F(x^-n) not non-increasing";
    return r;
}

// ---------------------------------------------------------------- potentials

struct Potential {
    ScalarFn f;
    ScalarFn df;
    std::string label = "0";
    bool is_zero = true;

    static Potential zero() { return Potential{[](double) { return 0.0; }, [](double) { return 0.0; }, "0", true}; }

    static Potential from(ScalarFn f, std::string label, ScalarFn df = {})
    {
        Potential p;
        p.f = std::move(f);
        p.df = df ? std::move(df) : ScalarFn([g = p.f](double x) { return numeric_derivative(g, x); });
        p.label = std::move(label);
        p.is_zero = false;
        return p;
    }

    double operator()(double x) const { return f(x); }
    double d(double x) const { return df(x); }
};

inline bool modulus_check(const ScalarFn& f, double m, const Grid1D& g)
{
    const double h = g.h();
    for (std::size_t i = 1; i + 1 < g.n(); ++i) {
        const double x = g.x(i);
        const double d2 = (f(x - h) - 2.0 * f(x) + f(x + h)) / (h * h);
        if (d2 < m - 1e-6) return false;
    }
    return true;
}

struct PotentialPair {
    Potential V = Potential::zero();
    double lambda = 0.0;
    Potential W = Potential::zero();
    double nu = 0.0;

    // Moduli and evenness on the working grid (W on the difference grid).
    void validate(const Grid1D& g) const
    {
        if (!modulus_check(V.f, lambda, g))
            fail(ErrorKind::hypothesis, "V'' >= lambda fails on the grid (lambda=" + std::to_string(lambda) + ")");
        if (!W.is_zero) {
            const double L = g.b() - g.a();
            Grid1D dg(-L, L, 2 * g.n() - 1);
            if (!modulus_check(W.f, nu, dg))
                fail(ErrorKind::hypothesis, "W'' >= nu fails on the grid (nu=" + std::to_string(nu) + ")");
            for (std::size_t i = 0; i < dg.n(); ++i) {
                const double z = dg.x(i);
                const double w1 = W(z), w2 = W(-z);
                if (std::abs(w1 - w2) > 1e-12 * std::max(1.0, std::abs(w1)))
                    fail(ErrorKind::hypothesis, "W is not even");
            }
        }
    }
};

// ---------------------------------------------------------------- young pairs

struct YoungPair {
    ScalarFn c;
    ScalarFn c_star;
    ScalarFn dc_star;
    std::optional<double> p; // homogeneity degree of c*
    double q = 0.0;
    std::string label;
};

inline double signed_pow(double y, double e)
{
    return y == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(y), e), y);
}

inline YoungPair young_quadratic(double sigma)
{
    if (!(sigma > 0.0)) fail(ErrorKind::domain, "QuadraticSigma needs sigma > 0");
    YoungPair y;
    y.c = [sigma](double x) { return x * x / (2.0 * sigma); };
    y.c_star = [sigma](double v) { return sigma * v * v / 2.0; };
    y.dc_star = [sigma](double v) { return sigma * v; };
    y.p = 2.0;
    y.q = 2.0;
    y.label = "quadratic(" + std::to_string(sigma) + ")";
    return y;
}

// c = (p-1)|x|^q, c* = |y|^p / p^p
inline YoungPair young_power_pls(double p)
{
    if (!(p > 1.0) || !std::isfinite(p)) fail(ErrorKind::domain, "PowerPLS needs p > 1");
    const double q = p / (p - 1.0);
    YoungPair y;
    y.c = [p, q](double x) { return (p - 1.0) * std::pow(std::abs(x), q); };
    y.c_star = [p](double v) { return std::pow(std::abs(v), p) / std::pow(p, p); };
    y.dc_star = [p](double v) { return signed_pow(v, p - 1.0) / std::pow(p, p - 1.0); };
    y.p = p;
    y.q = q;
    y.label = "power_pls(" + std::to_string(p) + ")";
    return y;
}

// c = (rg/q)|x|^q, c* = |y|^p / (p rg^{p-1})
inline YoungPair young_power_gn(double p, double rgamma)
{
    if (!(p > 1.0) || !std::isfinite(p)) fail(ErrorKind::domain, "PowerGN needs p > 1");
    if (!(rgamma > 0.0)) fail(ErrorKind::domain, "PowerGN needs r*gamma > 0");
    const double q = p / (p - 1.0);
    YoungPair y;
    y.c = [q, rgamma](double x) { return rgamma / q * std::pow(std::abs(x), q); };
    y.c_star = [p, rgamma](double v) { return std::pow(std::abs(v), p) / (p * std::pow(rgamma, p - 1.0)); };
    y.dc_star = [p, rgamma](double v) { return signed_pow(v, p - 1.0) / std::pow(rgamma, p - 1.0); };
    y.p = p;
    y.q = q;
    y.label = "power_gn(" + std::to_string(p) + "," + std::to_string(rgamma) + ")";
    return y;
}

struct YoungSpec {
    enum class Kind { quadratic_sigma, power_pls, power_gn } kind = Kind::quadratic_sigma;
    double sigma = 1.0;
    double p = 2.0;
    double rgamma = 1.0;
};

inline YoungPair make_young(const YoungSpec& s)
{
    switch (s.kind) {
    case YoungSpec::Kind::quadratic_sigma: return young_quadratic(s.sigma);
    case YoungSpec::Kind::power_pls: return young_power_pls(s.p);
    case YoungSpec::Kind::power_gn: return young_power_gn(s.p, s.rgamma);
    }
    fail(ErrorKind::domain, "unknown Young kind");
}

// sup_z { y z - c(z) } by lattice search with two refinement passes.
inline double numeric_conjugate(const ScalarFn& c, double y)
{
    constexpr int N = 2001;
    auto scan = [&](double lo, double hi, double& zbest, std::size_t& ibest) {
        double best = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < N; ++i) {
            const double z = lo + (hi - lo) * i / (N - 1);
            const double v = y * z - c(z);
            if (v > best) {
                best = v;
                zbest = z;
                ibest = static_cast<std::size_t>(i);
            }
        }
        return best;
    };
    double Z = 8.0, zb = 0.0;
    std::size_t ib = 0;
    for (;;) {
        scan(-Z, Z, zb, ib);
        if (ib != 0 && ib != N - 1) break;
        Z *= 2.0;
        if (Z > 1e8)
            fail(ErrorKind::window, "conjugate sup not attained in search window at y=" + std::to_string(y) +
                                        " (argmax at the window edge " + std::to_string(zb) + ")");
    }
    double step = 2.0 * Z / (N - 1);
    double best = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        best = scan(zb - 2.0 * step, zb + 2.0 * step, zb, ib);
        step = 4.0 * step / (N - 1);
    }
    return best;
}

} // namespace wassineq
