#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace testing;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const Grid1D wide(-10.0, 10.0, 2048);

// quantile atoms at the midpoints of M equal-mass slices
std::vector<double> quantile_atoms(const GridDensity& rho, std::size_t M)
{
    Quantile q(rho);
    std::vector<double> xs(M);
    for (std::size_t k = 0; k < M; ++k) xs[k] = q((k + 0.5) / static_cast<double>(M));
    return xs;
}

} // namespace

TEST_CASE("w2_distance examples", "[transport]")
{
    Grid1D g(-10.0, 10.0, 2001);
    auto rho = gaussian(g, 0.0, 1.0);
    CHECK_THAT(w2_distance(rho, rho), WithinAbs(0.0, 1e-10));
    CHECK_THAT(w2_distance(rho, gaussian(g, 0.5, 1.0)), WithinAbs(0.5, 1e-6));

    Grid1D w(-15.0, 15.0, 4096);
    const double w2 = w2_distance(gaussian(w, 0.0, 1.0), gaussian(w, 1.0, 2.0));
    CHECK_THAT(w2 * w2, WithinAbs(2.0, 1e-4));
}

TEST_CASE("w2_distance converges in the number of levels", "[transport]")
{
    auto a = random_smooth_density(1, wide), b = random_smooth_density(1001, wide);
    Quantile qa(a), qb(b);
    const std::size_t M = 4 * wide.n();
    CHECK_THAT(std::sqrt(w2_squared_levels(qa, qb, 2 * M)), WithinAbs(std::sqrt(w2_squared_levels(qa, qb, M)), 1e-6));
}

TEST_CASE("discrete oracle", "[transport]")
{
    std::vector<double> one{1.0};
    CHECK_THAT(discrete_w2_oracle(std::vector<double>{0.0}, one, std::vector<double>{3.0}, one), WithinAbs(3.0, 1e-15));
    std::vector<double> half{0.5, 0.5};
    CHECK_THAT(discrete_w2_oracle(std::vector<double>{0.0, 1.0}, half, std::vector<double>{3.0, 2.0}, half),
               WithinAbs(2.0, 1e-15));
    CHECK_THROWS_AS(discrete_w2_oracle(std::vector<double>{0.0}, std::vector<double>{0.7}, std::vector<double>{1.0}, one),
                    Error);

    Grid1D w(-15.0, 15.0, 4096);
    auto a = gaussian(w, 0.0, 1.0), b = gaussian(w, 1.0, 2.0);
    std::vector<double> ws(64, 1.0 / 64.0);
    const double oracle = discrete_w2_oracle(quantile_atoms(a, 64), ws, quantile_atoms(b, 64), ws);
    CHECK_THAT(w2_distance(a, b), WithinAbs(oracle, 2e-2));
}

TEST_CASE("W2 metric axioms on seeded triples", "[transport][property]")
{
    for (std::uint64_t s = 1; s <= 10; ++s) {
        auto a = random_smooth_density(s, wide), b = random_smooth_density(100 + s, wide),
             c = random_smooth_density(200 + s, wide);
        const double ab = w2_distance(a, b), ba = w2_distance(b, a), bc = w2_distance(b, c), ac = w2_distance(a, c);
        CHECK_THAT(ab, WithinAbs(ba, 1e-10));
        CHECK(ab + bc - ac >= -1e-8);
        CHECK(w2_distance(a, a) == 0.0);
        CHECK(ab > 0.0);
    }
}

TEST_CASE("optimal_map examples", "[transport]")
{
    auto rho = random_smooth_density(5, wide);
    auto id = optimal_map(rho, rho);
    for (std::size_t i = 0; i < wide.n(); ++i) CHECK_THAT(id.map_values[i], WithinAbs(wide.x(i), 1e-8));

    Grid1D u1(0.0, 1.0, 101), u2(0.0, 2.0, 201);
    auto dil = optimal_map(uniform(u1), uniform(u2));
    for (std::size_t i = 0; i < u1.n(); ++i) CHECK_THAT(dil.map_values[i], WithinAbs(2.0 * u1.x(i), 1e-8));

    Grid1D w(-12.0, 12.0, 4096);
    auto shift = optimal_map(gaussian(w, 0.0, 1.0), gaussian(w, 0.7, 1.0));
    for (std::size_t i = 0; i < w.n(); ++i)
        if (std::abs(w.x(i)) < 4.0) CHECK_THAT(shift.map_values[i], WithinAbs(w.x(i) + 0.7, 1e-5));
}

TEST_CASE("optimal map is monotone and pushes rho0 to rho1", "[transport][property]")
{
    std::mt19937_64 gen(3);
    std::uniform_int_distribution<std::size_t> idx(0, wide.n() - 1);
    for (std::uint64_t s = 1; s <= 10; ++s) {
        auto a = random_smooth_density(s, wide), b = random_smooth_density(1000 + s, wide);
        auto plan = optimal_map(a, b);
        CHECK(std::is_sorted(plan.map_values.begin(), plan.map_values.end()));
        CHECK_FALSE(plan.degenerate);
        // w2^2 = int rho0 |x - T|^2
        std::vector<double> f(wide.n());
        for (std::size_t i = 0; i < wide.n(); ++i) f[i] = a[i] * sqr(wide.x(i) - plan.map_values[i]);
        CHECK_THAT(integrate(f, wide), WithinRel(plan.w2 * plan.w2, 1e-3));
        Quantile qa(a), qb(b);
        for (int k = 0; k < 10; ++k) {
            std::size_t i = idx(gen), j = idx(gen);
            if (i > j) std::swap(i, j);
            const double m0 = qa.cdf()[j] - qa.cdf()[i];
            const double m1 = qb.cdf_at(plan.map_values[j]) - qb.cdf_at(plan.map_values[i]);
            CHECK_THAT(m1, WithinAbs(m0, 1e-6));
        }
    }
}

TEST_CASE("displacement interpolation examples", "[transport]")
{
    auto a = random_smooth_density(2, wide), b = random_smooth_density(1002, wide);
    auto plan = optimal_map(a, b);
    CHECK(l1_distance(displacement_interpolate(plan, 0.0), a) <= 1e-6);
    CHECK(l1_distance(displacement_interpolate(plan, 1.0), b) <= 1e-6);
    CHECK_THROWS_AS(displacement_interpolate(plan, 1.5), Error);

    Grid1D w(-10.0, 12.0, 4096);
    auto mid = displacement_interpolate(optimal_map(gaussian(w, 0.0, 1.0), gaussian(w, 2.0, 1.0)), 0.5);
    CHECK(l1_distance(mid, gaussian(w, 1.0, 1.0)) <= 1e-4);
}

TEST_CASE("displacement convexity of admissible entropies", "[transport][property]")
{
    const std::vector<double> ts{0.0, 0.25, 0.5, 0.75, 1.0};
    auto same = random_smooth_density(9, wide);
    auto flat = check_displacement_convexity(same, same, EntropyModel::boltzmann(), ts);
    for (double e : flat.energies) CHECK_THAT(e, WithinAbs(flat.energies.front(), 1e-12));

    for (const auto& m : {EntropyModel::boltzmann(), EntropyModel::power(2.0), EntropyModel::power(3.0)}) {
        INFO(m.label());
        for (std::uint64_t s = 1; s <= 20; ++s) {
            auto r = check_displacement_convexity(random_smooth_density(s, wide), random_smooth_density(1000 + s, wide),
                                                  m, ts);
            CHECK(r.pass);
            CHECK(r.min_slack >= -1e-5 * r.scale);
        }
    }
}

TEST_CASE("transport energy inequalities", "[transport][property]")
{
    auto m = EntropyModel::boltzmann();
    auto pot = quadratic_v();
    auto rho = random_smooth_density(6, wide);
    auto zero = lemma22_slacks(rho, rho, m, pot);
    CHECK_THAT(zero.internal, WithinAbs(0.0, 1e-6));
    CHECK_THAT(zero.potential, WithinAbs(0.0, 1e-6));
    CHECK_THAT(zero.interaction, WithinAbs(0.0, 1e-6));

    for (std::uint64_t s = 1; s <= 50; ++s) {
        auto l = lemma22_slacks(random_smooth_density(s, wide), random_smooth_density(1000 + s, wide), m, pot);
        CHECK(l.internal >= -1e-4 * l.scale);
        CHECK(l.potential >= -1e-4 * l.scale);
    }
    PotentialPair inter;
    inter.W = quadratic_w(1.0);
    inter.nu = 1.0;
    Grid1D g(-10.0, 10.0, 1024);
    for (std::uint64_t s = 1; s <= 20; ++s) {
        auto l = lemma22_slacks(random_smooth_density(s, g), random_smooth_density(1000 + s, g), m, inter);
        CHECK(l.interaction >= -1e-4 * l.scale);
    }
}
