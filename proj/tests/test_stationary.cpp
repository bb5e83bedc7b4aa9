#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "support.hpp"

using namespace testing;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const Grid1D wide(-10.0, 10.0, 4096);

// (C + a x^2)_+^{1/(m-1)} normalized on the grid, C by bisection
GridDensity barenblatt_oracle(double m, double lambda, const Grid1D& g)
{
    const double a = lambda * (1.0 - m) / (2.0 * m), e = 1.0 / (m - 1.0);
    auto prof = [&](double C) {
        return g.sample([&](double x) {
            const double b = C + a * x * x;
            return b > 0.0 ? std::pow(b, e) : 0.0;
        });
    };
    // mass increases with C for m > 1 and decreases for m < 1
    double lo = m > 1.0 ? 1e-9 : 1e-3, hi = 1e3;
    for (int it = 0; it < 300; ++it) {
        const double mid = std::sqrt(lo * hi);
        const double mass = integrate(prof(mid), g);
        ((mass < 1.0) == (m > 1.0) ? lo : hi) = mid;
    }
    return GridDensity::from_values(g, prof(std::sqrt(lo * hi)), 0.0);
}

} // namespace

TEST_CASE("Boltzmann reference is the normalized Gaussian", "[stationary]")
{
    auto ref = solve_reference(EntropyModel::boltzmann(), quadratic_v(), wide);
    CHECK(l1_distance(ref.density, gaussian(wide, 0.0, 1.0)) < 1e-8);
    // F'(rho) + V = 1 + ln rho + V = 1 - ln sigma_V
    CHECK_THAT(ref.K, WithinAbs(1.0 - std::log(std::sqrt(2.0 * M_PI)), 1e-8));
    CHECK(ref.residual <= 1e-6);
    CHECK(entropy_production_I2(ref.density, EntropyModel::boltzmann(), quadratic_v()) <= 1e-8);
}

TEST_CASE("porous-medium references are Barenblatt profiles", "[stationary]")
{
    Grid1D g(-6.0, 6.0, 4096);
    for (double m : {2.0, 3.0, 0.75}) {
        INFO("m=" << m);
        auto ref = solve_reference(EntropyModel::power(m), quadratic_v(), g);
        CHECK(l1_distance(ref.density, barenblatt_oracle(m, 1.0, g)) < 1e-6);
        CHECK(ref.residual <= 1e-6);
    }
}

TEST_CASE("rho_c and K_c for the Boltzmann entropy", "[stationary]")
{
    for (double sigma : {1.0, 0.5, 2.0}) {
        auto yp = young_quadratic(sigma);
        auto ref = solve_reference(EntropyModel::boltzmann(), PotentialPair{}, &yp, wide);
        const double sc = std::sqrt(2.0 * M_PI * sigma);
        CHECK(l1_distance(ref.density, gaussian(wide, 0.0, std::sqrt(sigma))) < 1e-8);
        CHECK_THAT(ref.K, WithinAbs(1.0 + std::log(1.0 / sc), 1e-8));
    }
}

TEST_CASE("interaction references: fixed point and warm start", "[stationary]")
{
    Grid1D g(-10.0, 10.0, 1024);
    auto pot = quadratic_v();
    pot.W = quadratic_w(1.0);
    pot.nu = 1.0;
    auto m = EntropyModel::boltzmann();
    auto ref = solve_reference(m, pot, g);
    CHECK(ref.residual <= 1e-6);
    CHECK(entropy_production_I2(ref.density, m, pot) <= 1e-8);
    // W = x^2/2 around a centred state adds x^2/2 + const: N(0, 1/2)
    CHECK(l1_distance(ref.density, gaussian(g, 0.0, std::sqrt(0.5))) < 1e-6);
    SolveOptions opt;
    opt.warm_start = ref.density;
    auto again = solve_reference(m, pot, g, opt);
    CHECK(l1_distance(again.density, ref.density) <= 1e-12);
}

TEST_CASE("confinement failures are reported", "[stationary]")
{
    // no confinement at all: the power-entropy profile cannot carry unit mass on a bounded bracket
    PotentialPair flat;
    flat.V = Potential::from([](double x) { return -0.5 * x * x; }, "-0.5*x^2");
    flat.lambda = -1.0;
    Grid1D g(-3.0, 3.0, 256);
    auto ok = [&] {
        try {
            solve_reference(EntropyModel::power(2.0), flat, g);
            return true;
        }
        catch (const Error& e) {
            return e.kind() == ErrorKind::confinement;
        }
    }();
    CHECK(ok);
}

TEST_CASE("sigma_c closed form", "[stationary]")
{
    CHECK_THAT(sigma_c(2.0, 2.0, 1), WithinAbs(std::sqrt(M_PI), 1e-12));
    CHECK_THAT(sigma_c(2.0, 2.0, 2), WithinAbs(M_PI, 1e-12));
    Grid1D g(-12.0, 12.0, 48001);
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
        const double q = p / (p - 1.0);
        const double quad = integrate(g.sample([&](double x) { return std::exp(-(p - 1.0) * std::pow(std::abs(x), q)); }), g);
        CHECK_THAT(sigma_c(p, q, 1), WithinAbs(quad, 1e-8));
    }
    CHECK_THROWS_AS(sigma_c(2.0, 3.0, 1), Error);
    CHECK_THROWS_AS(sigma_c(1.0, 2.0, 1), Error);
}

TEST_CASE("p-log-Sobolev extremals", "[stationary]")
{
    auto e = plsi_extremal(2.0, 1.0, wide);
    CHECK_THAT(integrate(e.values(), wide), WithinAbs(1.0, 1e-10));
    CHECK(l1_distance(e, normalize(wide.sample([](double x) { return std::exp(-x * x); }), wide)) < 1e-12);
    auto yp = young_power_pls(2.0);
    auto solved = solve_reference(EntropyModel::boltzmann(), PotentialPair{}, &yp, wide);
    CHECK(l1_distance(e, solved.density) < 1e-8);
    CHECK_THROWS_AS(plsi_extremal(1.0, 1.0, wide), Error);
}

TEST_CASE("Gagliardo-Nirenberg extremal solves its ODE", "[stationary]")
{
    auto ext = gn_extremal(2.0, 4.0, wide);
    CHECK(ext.residual < 1e-6);
    CHECK_THAT(integrate(ext.rho.values(), wide), WithinAbs(1.0, 1e-10));
    // p = 2, r = 4: h^{-1} = A + |x|^2 / 2
    for (std::size_t i = 0; i < wide.n(); i += 97) {
        const double x = wide.x(i);
        CHECK_THAT(ext.h[i], WithinRel(1.0 / (ext.A + 0.5 * x * x), 1e-10));
    }
    CHECK(gn_extremal(1.5, 1.0, Grid1D(-6.0, 6.0, 4096)).residual < 1e-6);
    // q < 2 puts a |x|^{q-1} kink at the origin: the residual only decays like h^{1/2}
    const double coarse = gn_extremal(3.0, 2.0, Grid1D(-6.0, 6.0, 1024)).residual;
    const double fine = gn_extremal(3.0, 2.0, Grid1D(-6.0, 6.0, 16384)).residual;
    CHECK_THAT(coarse / fine, WithinRel(4.0, 0.05));
    CHECK_THROWS_AS(gn_extremal(2.0, 2.0, wide), Error);
}

TEST_CASE("sharp Sobolev constant against the radial extremal", "[stationary]")
{
    auto sc = sobolev_constants(2.0, 3);
    // closed form for p = 2
    const double n = 3.0;
    const double talenti = 1.0 / std::sqrt(M_PI * n * (n - 2.0)) * std::pow(std::tgamma(n) / std::tgamma(n / 2.0), 1.0 / n);
    // radial quadrature of h = (1 + r^2)^{-1/2} in R^3
    double a = 0.0, b = 0.0;
    const double dr = 1e-3;
    for (int k = 1; k < 2000000; ++k) {
        const double r = k * dr;
        const double base = 1.0 + r * r;
        a += 4.0 * M_PI * r * r * std::pow(base, -3.0) * dr;
        b += 4.0 * M_PI * r * r * r * r * std::pow(base, -3.0) * dr;
    }
    const double quotient = std::pow(a, 1.0 / 6.0) / std::sqrt(b);
    CHECK_THAT(quotient, WithinRel(talenti, 1e-3));
    CHECK_THAT(sc.C, WithinRel(quotient, 1e-3));
    CHECK_THAT(sc.mass, WithinAbs(1.0, 1e-6));
    CHECK(sc.C_inf < 0.0);
    CHECK(sobolev_constants(1.5, 2).C_inf < 0.0);
    CHECK(std::abs(detail::sobolev_constants_at(2.0, 3, 800).C - sc.C) < 1e-6);
    CHECK_THROWS_AS(sobolev_constants(3.0, 3), Error);
}
