#pragma once

// Density serialization: CSV "x,rho" and JSON {a, b, n, values}.
// The JSON form round-trips bit-exactly (shortest round-trip doubles).

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "measures.hpp"

namespace wassineq {

inline nlohmann::json density_to_json(const GridDensity& rho)
{
    const auto& g = rho.grid();
    return nlohmann::json{{"a", g.a()}, {"b", g.b()}, {"n", g.n()}, {"values", rho.values()}};
}

inline GridDensity density_from_json(const nlohmann::json& j, double floor = 0.0)
{
    try {
        Grid1D g(j.at("a").get<double>(), j.at("b").get<double>(), j.at("n").get<std::size_t>());
        auto v = j.at("values").get<std::vector<double>>();
        if (v.size() != g.n()) fail(ErrorKind::dimension, "values length does not match n");
        return GridDensity::from_values(g, std::move(v), floor);
    }
    catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::config, std::string("density JSON: ") + e.what());
    }
}

inline std::string density_to_csv(const GridDensity& rho)
{
    std::ostringstream os;
    os.precision(17);
    os << "x,rho\n";
    for (std::size_t i = 0; i < rho.size(); ++i) os << rho.grid().x(i) << ',' << rho[i] << '\n';
    return os.str();
}

// The grid is recovered from the first and last abscissae and the row count.
inline GridDensity density_from_csv(const std::string& text, double floor = 0.0)
{
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line.rfind("x,rho", 0) != 0) fail(ErrorKind::config, "density CSV needs header x,rho");
    std::vector<double> xs, vs;
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) fail(ErrorKind::config, "density CSV line " + std::to_string(row) + ": missing comma");
        try {
            xs.push_back(std::stod(line.substr(0, comma)));
            vs.push_back(std::stod(line.substr(comma + 1)));
        }
        catch (const std::exception&) {
            fail(ErrorKind::config, "density CSV line " + std::to_string(row) + ": not a number");
        }
    }
    if (xs.size() < 2) fail(ErrorKind::config, "density CSV has too few rows");
    Grid1D g(xs.front(), xs.back(), xs.size());
    return GridDensity::from_values(g, std::move(vs), floor);
}

inline void write_text(const std::string& path, const std::string& text)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(ErrorKind::config, "cannot write " + path);
    os << text;
}

inline std::string read_text(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(ErrorKind::config, "cannot read " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace wassineq
