#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "support.hpp"

using namespace testing;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const Grid1D wide(-10.0, 10.0, 2048);

std::vector<YoungPair> young_pairs()
{
    return {young_quadratic(1.0), young_quadratic(0.5), young_power_pls(2.0), young_power_pls(1.5),
            young_power_pls(3.0), young_power_gn(2.0, 1.5)};
}

} // namespace

TEST_CASE("internal energy examples", "[functionals]")
{
    auto b = EntropyModel::boltzmann();
    Grid1D u1(0.0, 1.0, 101), u2(0.0, 2.0, 201);
    CHECK_THAT(internal_energy(uniform(u1), b), WithinAbs(0.0, 1e-12));
    CHECK_THAT(internal_energy(uniform(u2), b), WithinAbs(std::log(0.5), 1e-9));
    CHECK_THAT(internal_energy(uniform(u1), EntropyModel::power(2.0)), WithinAbs(1.0, 1e-12));
}

TEST_CASE("potential energy examples", "[functionals]")
{
    Grid1D u(0.0, 1.0, 101);
    CHECK(potential_energy(uniform(u), Potential::zero()) == 0.0);
    CHECK_THAT(potential_energy(uniform(u), Potential::from([](double x) { return x; }, "x")), WithinAbs(0.5, 1e-12));
    Grid1D g(-8.0, 8.0, 4097);
    CHECK_THAT(potential_energy(gaussian(g, 0.0, 1.0), quadratic_v().V), WithinAbs(0.5, 1e-6));
}

TEST_CASE("interaction energy examples", "[functionals]")
{
    Grid1D u(0.0, 1.0, 1025);
    auto rho = uniform(u);
    CHECK(interaction_energy(rho, Potential::zero()) == 0.0);
    auto W = Potential::from([](double z) { return z * z; }, "x^2");
    // independent double quadrature
    double s = 0.0;
    for (std::size_t i = 0; i < u.n(); ++i)
        for (std::size_t j = 0; j < u.n(); ++j) s += u.weight(i) * u.weight(j) * sqr(u.x(i) - u.x(j)) * rho[i] * rho[j];
    const double value = interaction_energy(rho, W);
    CHECK_THAT(value, WithinAbs(0.5 * s, 1e-12));
    // continuum value Var = 1/12, up to the O(h^2) quadrature error
    CHECK_THAT(value, WithinAbs(1.0 / 12.0, 1e-6));

    // translation invariance: shift by an integer number of cells
    Grid1D g(-10.0, 10.0, 1001);
    auto a = gaussian(g, -1.0, 0.8);
    auto b = gaussian(g, -1.0 + 40 * g.h(), 0.8);
    CHECK_THAT(interaction_energy(a, W), WithinAbs(interaction_energy(b, W), 1e-10));
}

TEST_CASE("interaction kernel symmetry", "[functionals][property]")
{
    auto rho = random_smooth_density(4, wide);
    auto W = quartic_w(0.01);
    const double fwd = interaction_energy_kernel(rho, [&](double z) { return W(z); });
    const double rev = interaction_energy_kernel(rho, [&](double z) { return W(-z); });
    CHECK(fwd == rev);
}

TEST_CASE("free energy of the Boltzmann reference is -ln sigma_V", "[functionals]")
{
    Grid1D g(-10.0, 10.0, 4097);
    auto pot = quadratic_v();
    auto rho = gaussian(g, 0.0, 1.0);
    auto e = free_energy(rho, EntropyModel::boltzmann(), pot);
    CHECK_THAT(e.total, WithinAbs(-std::log(std::sqrt(2.0 * M_PI)), 1e-6));
    CHECK(e.total == e.internal + e.potential + e.interaction);

    PotentialPair none;
    auto f = free_energy(rho, EntropyModel::boltzmann(), none);
    CHECK(f.total == f.internal);
}

TEST_CASE("relative energy", "[functionals][property]")
{
    auto m = EntropyModel::boltzmann();
    auto pot = quadratic_v();
    pot.W = quadratic_w(1.0);
    pot.nu = 1.0;
    for (std::uint64_t s = 1; s <= 5; ++s) {
        auto a = random_smooth_density(s, wide), b = random_smooth_density(100 + s, wide);
        CHECK(relative_energy(a, a, m, pot) == 0.0);
        CHECK_THAT(relative_energy(a, b, m, pot), WithinAbs(-relative_energy(b, a, m, pot), 1e-12));
    }
}

TEST_CASE("internal energy is translation invariant", "[functionals][property]")
{
    Grid1D g(-10.0, 10.0, 2001);
    for (const auto& m : {EntropyModel::boltzmann(), EntropyModel::power(2.0), EntropyModel::power(0.75)}) {
        auto a = gaussian(g, -2.0, 0.9, 1e-300);
        auto b = gaussian(g, -2.0 + 100 * g.h(), 0.9, 1e-300);
        CHECK_THAT(internal_energy(a, m), WithinAbs(internal_energy(b, m), 1e-10));
    }
}

TEST_CASE("entropy production I2", "[functionals]")
{
    auto m = EntropyModel::boltzmann();
    auto pot = quadratic_v();
    Grid1D g(-10.0, 10.0, 4096);
    auto ref = solve_reference(m, pot, g).density;
    CHECK_THAT(entropy_production_I2(ref, m, pot), WithinAbs(0.0, 1e-6));
    // grad(ln rho + V) = m for rho = N(m, 1)
    auto shifted = gaussian(g, 0.5, 1.0, 1e-300);
    CHECK_THAT(entropy_production_I2(shifted, m, pot), WithinRel(0.25, 1e-3));
    // a density with zeros has no Boltzmann production
    Grid1D u(0.0, 1.0, 101);
    auto bump = normalize(u.sample([](double x) { return std::max(0.0, 0.04 - sqr(x - 0.5)); }), u);
    try {
        entropy_production_I2(bump, m, PotentialPair{});
        FAIL("no error");
    }
    catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::positivity);
    }
}

TEST_CASE("generalized production: quadratic scaling and ordering", "[functionals][property]")
{
    auto m = EntropyModel::boltzmann();
    auto pot = quadratic_v();
    auto q1 = young_quadratic(1.0);
    Grid1D g(-10.0, 10.0, 4096);
    auto ref = solve_reference(m, pot, g).density;
    auto at_ref = entropy_production_Icstar(ref, m, pot, q1);
    CHECK_THAT(at_ref.calI, WithinAbs(0.0, 1e-6));
    CHECK_THAT(at_ref.I, WithinAbs(0.0, 1e-6));

    for (std::uint64_t s = 1; s <= 50; ++s) {
        auto rho = random_smooth_density(s, wide);
        const double I2 = entropy_production_I2(rho, m, pot);
        auto pq = entropy_production_Icstar(rho, m, pot, q1);
        CHECK_THAT(I2, WithinAbs(2.0 * pq.calI, 1e-10 * std::max(1.0, I2)));
        for (const auto& yp : young_pairs()) {
            auto pp = entropy_production_Icstar(rho, m, pot, yp);
            CHECK(pp.calI <= pp.I + 1e-10 * std::max(1.0, pp.I));
        }
    }
}
