#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace wassineq {

// Uniform grid on [a, b] with n nodes.
class Grid1D {
public:
    Grid1D(double a, double b, std::size_t n) : a_(a), b_(b), n_(n)
    {
        if (!(std::isfinite(a) && std::isfinite(b)) || !(a < b))
            fail(ErrorKind::domain, "grid needs finite a < b");
        if (n < 16)
            fail(ErrorKind::dimension, "grid needs at least 16 nodes, got " + std::to_string(n));
        h_ = (b - a) / static_cast<double>(n - 1);
    }

    double a() const { return a_; }
    double b() const { return b_; }
    std::size_t n() const { return n_; }
    double h() const { return h_; }

    double x(std::size_t i) const
    {
        return i + 1 == n_ ? b_ : a_ + static_cast<double>(i) * h_;
    }

    std::vector<double> nodes() const
    {
        std::vector<double> xs(n_);
        for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
        return xs;
    }

    // trapezoid weights
    double weight(std::size_t i) const
    {
        return (i == 0 || i + 1 == n_) ? 0.5 * h_ : h_;
    }

    template <class Fn>
    std::vector<double> sample(Fn&& f) const
    {
        std::vector<double> v(n_);
        for (std::size_t i = 0; i < n_; ++i) v[i] = f(x(i));
        return v;
    }

    bool operator==(const Grid1D& o) const { return a_ == o.a_ && b_ == o.b_ && n_ == o.n_; }

private:
    double a_, b_;
    std::size_t n_;
    double h_;
};

inline void require_size(std::span<const double> f, const Grid1D& g, const char* what)
{
    if (f.size() != g.n())
        fail(ErrorKind::dimension, std::string(what) + ": expected " + std::to_string(g.n()) +
                                       " entries, got " + std::to_string(f.size()));
}

inline double integrate(std::span<const double> f, const Grid1D& g)
{
    require_size(f, g, "integrate");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!std::isfinite(f[i]))
            fail(ErrorKind::numeric, "non-finite integrand at node " + std::to_string(i));
        s += (i == 0 || i + 1 == f.size()) ? 0.5 * f[i] : f[i];
    }
    return g.h() * s;
}

// Second-order differences, one-sided at the ends.
inline std::vector<double> gradient(std::span<const double> f, const Grid1D& g)
{
    require_size(f, g, "gradient");
    const std::size_t n = f.size();
    if (n < 3) fail(ErrorKind::dimension, "gradient needs at least 3 nodes");
    const double h = g.h();
    std::vector<double> d(n);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return d;
}

class GridDensity {
public:
    // Validates an already-normalized array.
    static GridDensity from_values(const Grid1D& g, std::vector<double> values, double floor = 0.0)
    {
        require_size(values, g, "density");
        if (!(floor >= 0.0)) fail(ErrorKind::domain, "floor must be >= 0");
        for (double v : values) {
            if (!std::isfinite(v)) fail(ErrorKind::numeric, "non-finite density value");
            if (v < 0.0) fail(ErrorKind::domain, "negative density value");
            if (floor > 0.0 && v < floor) fail(ErrorKind::positivity, "density value below declared floor");
        }
        const double m = integrate(values, g);
        if (std::abs(m - 1.0) > 1e-10)
            fail(ErrorKind::degenerate, "density mass " + std::to_string(m) + " is not 1");
        return GridDensity(g, std::move(values), floor);
    }

    const Grid1D& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double floor() const { return floor_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }

    double min_value() const { return *std::min_element(values_.begin(), values_.end()); }
    bool strictly_positive() const { return min_value() > 0.0; }

    // linear interpolation, zero outside [a, b]
    double at(double x) const
    {
        const double a = grid_.a(), h = grid_.h();
        if (x < a || x > grid_.b()) return 0.0;
        double s = (x - a) / h;
        auto i = static_cast<std::size_t>(s);
        if (i + 1 >= values_.size()) return values_.back();
        double t = s - static_cast<double>(i);
        return (1.0 - t) * values_[i] + t * values_[i + 1];
    }

private:
    GridDensity(const Grid1D& g, std::vector<double> v, double floor)
        : grid_(g), values_(std::move(v)), floor_(floor)
    {
    }
    Grid1D grid_;
    std::vector<double> values_;
    double floor_;
};

// values = max(f, floor) scaled to unit mass; the scale is solved so that the
// floor still holds after scaling.
inline GridDensity normalize(std::span<const double> f, const Grid1D& g, double floor = 0.0)
{
    require_size(f, g, "normalize");
    if (!(floor >= 0.0)) fail(ErrorKind::domain, "floor must be >= 0");
    std::vector<double> v(f.begin(), f.end());
    for (double x : v) {
        if (!std::isfinite(x)) fail(ErrorKind::numeric, "non-finite value in normalize");
        if (floor == 0.0 && x < 0.0) fail(ErrorKind::domain, "negative value in normalize");
    }
    double s = integrate(v, g);
    if (floor == 0.0) {
        if (!(s > 0.0)) fail(ErrorKind::degenerate, "input has zero mass");
        for (double& x : v) x /= s;
    }
    else {
        std::vector<double> pos(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) pos[i] = std::max(v[i], 0.0);
        s = integrate(pos, g);
        if (!(s > 0.0)) fail(ErrorKind::degenerate, "input has zero mass");
        // mass(s) = int max(f/s, floor) is decreasing; s <- s * mass(s) contracts
        // with ratio (floor-region mass), which is tiny.
        for (int it = 0; it < 200; ++it) {
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::max(pos[i] / s, floor);
            double m = integrate(v, g);
            if (std::abs(m - 1.0) < 1e-15) break;
            s *= m;
        }
        if (!(s > 0.0) || !std::isfinite(s)) fail(ErrorKind::degenerate, "floor too large for grid length");
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::max(pos[i] / s, floor);
        double m = integrate(v, g);
        for (double& x : v) x = std::max(x / m, floor);
    }
    return GridDensity::from_values(g, std::move(v), floor);
}

inline double barycenter(const GridDensity& rho)
{
    const auto& g = rho.grid();
    double s = 0.0;
    for (std::size_t i = 0; i < g.n(); ++i) s += g.weight(i) * g.x(i) * rho[i];
    return s;
}

inline double second_moment(const GridDensity& rho, double about = 0.0)
{
    const auto& g = rho.grid();
    double s = 0.0;
    for (std::size_t i = 0; i < g.n(); ++i) {
        double d = g.x(i) - about;
        s += g.weight(i) * d * d * rho[i];
    }
    return s;
}

inline double l1_distance(const GridDensity& p, const GridDensity& q)
{
    if (!(p.grid() == q.grid())) fail(ErrorKind::dimension, "l1_distance needs a common grid");
    std::vector<double> d(p.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::abs(p[i] - q[i]);
    return integrate(d, p.grid());
}

// Nodal CDF and its piecewise-linear inverse.
class Quantile {
public:
    explicit Quantile(const GridDensity& rho) : density_(rho), cdf_(rho.size())
    {
        const auto& g = rho.grid();
        const auto& v = rho.values();
        const double h = g.h();
        cdf_[0] = 0.0;
        for (std::size_t i = 1; i < v.size(); ++i) cdf_[i] = cdf_[i - 1] + 0.5 * h * (v[i - 1] + v[i]);
        total_ = cdf_.back();
        for (double& c : cdf_) c /= total_;
        cdf_.back() = 1.0;
    }

    const GridDensity& density() const { return density_; }
    const std::vector<double>& cdf() const { return cdf_; }

    double operator()(double u) const
    {
        if (!(u >= 0.0 && u <= 1.0)) fail(ErrorKind::domain, "quantile level outside [0,1]");
        const auto& g = density_.grid();
        // the levels 0 and 1 map to the ends of the support
        const auto& v = density_.values();
        if (u == 0.0) {
            std::size_t i = 0;
            while (i + 1 < v.size() && v[i] == 0.0) ++i;
            return g.x(i > 0 ? i - 1 : 0);
        }
        if (u == 1.0) {
            std::size_t i = v.size() - 1;
            while (i > 0 && v[i] == 0.0) --i;
            return g.x(std::min(i + 1, v.size() - 1));
        }
        auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        auto j = static_cast<std::size_t>(it - cdf_.begin());
        if (j == 0) return g.x(0);
        if (j >= cdf_.size()) j = cdf_.size() - 1;
        return g.x(j - 1) + invert_cell(j, u);
    }

    // Quantiles at increasing levels, one sweep.
    std::vector<double> sorted_levels(std::span<const double> us) const
    {
        const auto& g = density_.grid();
        std::vector<double> out(us.size());
        std::size_t j = 1;
        for (std::size_t k = 0; k < us.size(); ++k) {
            const double u = us[k];
            while (j + 1 < cdf_.size() && cdf_[j] < u) ++j;
            out[k] = g.x(j - 1) + invert_cell(j, u);
        }
        return out;
    }

    // CDF at an arbitrary point: exact integral of the linear interpolant.
    double cdf_at(double x) const
    {
        const auto& g = density_.grid();
        if (x <= g.a()) return 0.0;
        if (x >= g.b()) return 1.0;
        const double h = g.h();
        auto i = std::min(static_cast<std::size_t>((x - g.a()) / h), cdf_.size() - 2);
        const double s = x - g.x(i);
        const double v0 = density_[i] / total_, v1 = density_[i + 1] / total_;
        return std::min(1.0, cdf_[i] + v0 * s + 0.5 * (v1 - v0) / h * s * s);
    }

private:
    // Offset inside cell [x_{j-1}, x_j] where the quadratic cell CDF reaches u.
    double invert_cell(std::size_t j, double u) const
    {
        const double h = density_.grid().h();
        const double c0 = cdf_[j - 1], c1 = cdf_[j];
        if (!(c1 > c0)) return h;
        const double du = std::clamp(u - c0, 0.0, c1 - c0);
        const double v0 = density_[j - 1] / total_, v1 = density_[j] / total_;
        const double a = 0.5 * (v1 - v0) / h;
        const double disc = std::max(0.0, v0 * v0 + 4.0 * a * du);
        const double den = v0 + std::sqrt(disc);
        const double s = den > 0.0 ? 2.0 * du / den : h * du / (c1 - c0);
        return std::clamp(s, 0.0, h);
    }

    GridDensity density_;
    std::vector<double> cdf_;
    double total_ = 1.0;
};

inline double quantile(const GridDensity& rho, double u) { return Quantile(rho)(u); }

// Exact integral of the piecewise-linear interpolant over [lo, hi].
inline double mass_between(const GridDensity& rho, double lo, double hi)
{
    const auto& g = rho.grid();
    lo = std::max(lo, g.a());
    hi = std::min(hi, g.b());
    if (!(hi > lo)) return 0.0;
    const double h = g.h();
    auto cell_of = [&](double x) {
        auto i = static_cast<std::size_t>((x - g.a()) / h);
        return std::min(i, g.n() - 2);
    };
    auto partial = [&](std::size_t i, double s0, double s1) {
        // integral over [x_i + s0 h, x_i + s1 h] of the linear interpolant
        const double f0 = rho[i], f1 = rho[i + 1];
        auto prim = [&](double s) { return h * (f0 * s + 0.5 * (f1 - f0) * s * s); };
        return prim(s1) - prim(s0);
    };
    std::size_t i0 = cell_of(lo), i1 = cell_of(hi);
    double s0 = (lo - g.x(i0)) / h, s1 = (hi - g.x(i1)) / h;
    if (i0 == i1) return partial(i0, s0, s1);
    double m = partial(i0, s0, 1.0) + partial(i1, 0.0, s1);
    for (std::size_t i = i0 + 1; i < i1; ++i) m += 0.5 * h * (rho[i] + rho[i + 1]);
    return m;
}

namespace detail {

// 53-bit uniform from the standard-specified mt19937_64 stream, so results do
// not depend on the library's distribution implementation.
inline double unit_uniform(std::mt19937_64& gen)
{
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

} // namespace detail

// exp(g) with g = Gaussian envelope + small trigonometric perturbation.
// The envelope keeps the tails far below any floor at the grid ends.
inline GridDensity random_smooth_density(std::uint64_t seed, const Grid1D& g, double floor = 1e-8)
{
    if (!(floor > 0.0)) fail(ErrorKind::domain, "random densities need a positive floor");
    std::mt19937_64 gen(seed);
    auto u = [&] { return detail::unit_uniform(gen); };
    const double L = g.b() - g.a();
    const double mid = 0.5 * (g.a() + g.b());
    const double c = mid + 0.1 * L * (u() - 0.5);
    const double s = L * (0.04 + 0.02 * u());
    constexpr int modes = 3;
    double ca[modes], sa[modes], om[modes];
    const double base = (0.6 + 0.8 * u()) / s;
    for (int k = 0; k < modes; ++k) {
        ca[k] = 0.6 * (2.0 * u() - 1.0) / (k + 1);
        sa[k] = 0.6 * (2.0 * u() - 1.0) / (k + 1);
        om[k] = base * (k + 1);
    }
    std::vector<double> f(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) {
        const double z = g.x(i) - c;
        double e = -0.5 * (z / s) * (z / s);
        for (int k = 0; k < modes; ++k) e += ca[k] * std::cos(om[k] * z) + sa[k] * std::sin(om[k] * z);
        f[i] = std::exp(e);
    }
    return normalize(f, g, floor);
}

} // namespace wassineq
