#pragma once

// Shared fixtures for the unit tests.

#include <cmath>
#include <vector>

#include "wassineq/wassineq.hpp"

namespace testing {

using namespace wassineq;

inline PotentialPair quadratic_v(double lambda = 1.0)
{
    PotentialPair p;
    p.V = Potential::from([lambda](double x) { return 0.5 * lambda * x * x; }, "0.5*l*x^2",
                          [lambda](double x) { return lambda * x; });
    p.lambda = lambda;
    return p;
}

inline Potential quadratic_w(double nu)
{
    return Potential::from([nu](double x) { return 0.5 * nu * x * x; }, "0.5*nu*x^2", [nu](double x) { return nu * x; });
}

inline Potential quartic_w(double k)
{
    return Potential::from([k](double x) { return k * x * x * x * x; }, "k*x^4",
                           [k](double x) { return 4.0 * k * x * x * x; });
}

// normalized N(m, s^2) restricted to the grid
inline GridDensity gaussian(const Grid1D& g, double m, double s, double floor = 0.0)
{
    auto v = g.sample([&](double x) { return std::exp(-0.5 * (x - m) * (x - m) / (s * s)); });
    return normalize(v, g, floor);
}

inline GridDensity uniform(const Grid1D& g) { return normalize(std::vector<double>(g.n(), 1.0), g); }

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double sqr(double x) { return x * x; }

} // namespace testing
