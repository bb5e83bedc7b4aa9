#pragma once

// Experiment configuration: TOML or JSON on disk, nlohmann::json in memory.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>
#include <toml.hpp>

#include "wassineq/wassineq.hpp"

namespace wassineq::cli {

using json = nlohmann::json;

struct GridSpec {
    double a = -10.0, b = 10.0;
    std::size_t n = 4096;
    bool operator==(const GridSpec&) const = default;
};

struct EntropySpec {
    std::string kind = "boltzmann"; // boltzmann | power
    double gamma = 2.0;
    int dim = 1;
    bool operator==(const EntropySpec&) const = default;
};

struct PotentialSpec {
    std::string v = "0";
    double lambda = 0.0;
    std::string w = "0";
    double nu = 0.0;
    bool operator==(const PotentialSpec&) const = default;
};

struct YoungConfig {
    std::string kind = "quadratic"; // quadratic | power_pls | power_gn
    double sigma = 1.0;
    double p = 2.0;
    double rgamma = 1.0;
    bool operator==(const YoungConfig&) const = default;
};

struct FlowSpec {
    double t_end = 2.0;
    double dt = 0.0; // 0: stability bound of the initial state
    int sample_every = 0; // 0: about 100 samples
    std::string initial = "gaussian";
    double mean = 1.0;
    double sd = 1.0;
    bool operator==(const FlowSpec&) const = default;
};

struct CheckSpec {
    std::string check;
    json params = json::object();
    bool operator==(const CheckSpec&) const = default;
};

struct ExperimentConfig {
    std::string name;
    GridSpec grid;
    EntropySpec entropy;
    PotentialSpec potential;
    YoungConfig young;
    std::vector<CheckSpec> suite;
    int seed_first = 1, seed_last = 50;
    std::optional<FlowSpec> flow;
    Tolerances tolerances;

    bool operator==(const ExperimentConfig& o) const
    {
        return name == o.name && grid == o.grid && entropy == o.entropy && potential == o.potential &&
               young == o.young && suite == o.suite && seed_first == o.seed_first && seed_last == o.seed_last &&
               flow == o.flow && tolerances.tol == o.tolerances.tol && tolerances.tol_eq == o.tolerances.tol_eq;
    }
};

// --------------------------------------------------------------- TOML -> JSON

inline json toml_to_json(const toml::node& n)
{
    if (auto t = n.as_table()) {
        json j = json::object();
        for (auto&& [k, v] : *t) j[std::string(k.str())] = toml_to_json(v);
        return j;
    }
    if (auto a = n.as_array()) {
        json j = json::array();
        for (auto&& v : *a) j.push_back(toml_to_json(v));
        return j;
    }
    if (auto s = n.as_string()) return s->get();
    if (auto i = n.as_integer()) return i->get();
    if (auto f = n.as_floating_point()) return f->get();
    if (auto b = n.as_boolean()) return b->get();
    fail(ErrorKind::config, "unsupported TOML value (dates and times are not config values)");
}

inline json parse_toml_text(const std::string& text, const std::string& source = "config")
{
    try {
        auto tbl = toml::parse(text, source);
        return toml_to_json(tbl);
    }
    catch (const toml::parse_error& e) {
        const auto& b = e.source().begin;
        fail(ErrorKind::config, source + ":" + std::to_string(b.line) + ":" + std::to_string(b.column) +
                                    ": parse error: " + std::string(e.description()));
    }
}

inline json parse_json_text(const std::string& text, const std::string& source = "config")
{
    try {
        return json::parse(text);
    }
    catch (const json::parse_error& e) {
        // byte offset -> line/column
        std::size_t line = 1, col = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            }
            else {
                ++col;
            }
        }
        fail(ErrorKind::config, source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": parse error: " +
                                    e.what());
    }
}

// --------------------------------------------------------------- schema

namespace detail {

inline void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys)
{
    if (!j.is_object()) fail(ErrorKind::config, "'" + where + "' must be a table");
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key()))
            fail(ErrorKind::config, "unknown key '" + (where.empty() ? "" : where + ".") + it.key() + "'");
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where)
{
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    }
    catch (const json::exception&) {
        fail(ErrorKind::config, "key '" + (where.empty() ? "" : where + ".") + key + "' has the wrong type");
    }
}

} // namespace detail

inline ExperimentConfig config_from_json(const json& j)
{
    using detail::read;
    ExperimentConfig c;
    detail::only_keys(j, "", {"name", "grid", "entropy", "potential", "young", "suite", "seeds", "flow", "tolerances"});
    if (!j.contains("name")) fail(ErrorKind::config, "missing key 'name'");
    read(j, "name", c.name, "");
    if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos)
        fail(ErrorKind::config, "key 'name' must be a nonempty file stem");
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        detail::only_keys(g, "grid", {"a", "b", "n"});
        read(g, "a", c.grid.a, "grid");
        read(g, "b", c.grid.b, "grid");
        read(g, "n", c.grid.n, "grid");
        if (!(c.grid.a < c.grid.b) || c.grid.n < 16) fail(ErrorKind::config, "key 'grid' needs a < b and n >= 16");
    }
    if (j.contains("entropy")) {
        const auto& e = j["entropy"];
        detail::only_keys(e, "entropy", {"kind", "gamma", "dim"});
        read(e, "kind", c.entropy.kind, "entropy");
        read(e, "gamma", c.entropy.gamma, "entropy");
        read(e, "dim", c.entropy.dim, "entropy");
        if (c.entropy.kind != "boltzmann" && c.entropy.kind != "power")
            fail(ErrorKind::config, "key 'entropy.kind' must be boltzmann or power");
    }
    if (j.contains("potential")) {
        const auto& p = j["potential"];
        detail::only_keys(p, "potential", {"v", "lambda", "w", "nu"});
        read(p, "v", c.potential.v, "potential");
        read(p, "lambda", c.potential.lambda, "potential");
        read(p, "w", c.potential.w, "potential");
        read(p, "nu", c.potential.nu, "potential");
    }
    if (j.contains("young")) {
        const auto& y = j["young"];
        detail::only_keys(y, "young", {"kind", "sigma", "p", "rgamma"});
        read(y, "kind", c.young.kind, "young");
        read(y, "sigma", c.young.sigma, "young");
        read(y, "p", c.young.p, "young");
        read(y, "rgamma", c.young.rgamma, "young");
        if (c.young.kind != "quadratic" && c.young.kind != "power_pls" && c.young.kind != "power_gn")
            fail(ErrorKind::config, "key 'young.kind' must be quadratic, power_pls or power_gn");
    }
    if (j.contains("seeds")) {
        const auto& s = j["seeds"];
        detail::only_keys(s, "seeds", {"first", "last"});
        read(s, "first", c.seed_first, "seeds");
        read(s, "last", c.seed_last, "seeds");
        if (c.seed_first < 0 || c.seed_last < c.seed_first) fail(ErrorKind::config, "key 'seeds' needs 0 <= first <= last");
    }
    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        detail::only_keys(t, "tolerances", {"tol", "tol_eq"});
        read(t, "tol", c.tolerances.tol, "tolerances");
        read(t, "tol_eq", c.tolerances.tol_eq, "tolerances");
    }
    if (j.contains("flow")) {
        const auto& f = j["flow"];
        detail::only_keys(f, "flow", {"t_end", "dt", "sample_every", "initial", "mean", "sd"});
        FlowSpec fs;
        read(f, "t_end", fs.t_end, "flow");
        read(f, "dt", fs.dt, "flow");
        read(f, "sample_every", fs.sample_every, "flow");
        read(f, "initial", fs.initial, "flow");
        read(f, "mean", fs.mean, "flow");
        read(f, "sd", fs.sd, "flow");
        if (fs.initial != "gaussian" && fs.initial != "bimodal")
            fail(ErrorKind::config, "key 'flow.initial' must be gaussian or bimodal");
        c.flow = fs;
    }
    if (j.contains("suite")) {
        const auto& s = j["suite"];
        if (!s.is_array()) fail(ErrorKind::config, "key 'suite' must be an array of tables");
        for (std::size_t i = 0; i < s.size(); ++i) {
            const std::string where = "suite[" + std::to_string(i) + "]";
            if (!s[i].is_object() || !s[i].contains("check") || !s[i]["check"].is_string())
                fail(ErrorKind::config, "key '" + where + ".check' missing or not a string");
            CheckSpec cs;
            cs.check = s[i]["check"].get<std::string>();
            for (auto it = s[i].begin(); it != s[i].end(); ++it)
                if (it.key() != "check") cs.params[it.key()] = it.value();
            c.suite.push_back(std::move(cs));
        }
    }
    return c;
}

inline json config_to_json(const ExperimentConfig& c)
{
    json j;
    j["name"] = c.name;
    j["grid"] = {{"a", c.grid.a}, {"b", c.grid.b}, {"n", c.grid.n}};
    j["entropy"] = {{"kind", c.entropy.kind}, {"gamma", c.entropy.gamma}, {"dim", c.entropy.dim}};
    j["potential"] = {{"v", c.potential.v}, {"lambda", c.potential.lambda}, {"w", c.potential.w}, {"nu", c.potential.nu}};
    j["young"] = {{"kind", c.young.kind}, {"sigma", c.young.sigma}, {"p", c.young.p}, {"rgamma", c.young.rgamma}};
    j["seeds"] = {{"first", c.seed_first}, {"last", c.seed_last}};
    j["tolerances"] = {{"tol", c.tolerances.tol}, {"tol_eq", c.tolerances.tol_eq}};
    if (c.flow)
        j["flow"] = {{"t_end", c.flow->t_end},   {"dt", c.flow->dt},     {"sample_every", c.flow->sample_every},
                     {"initial", c.flow->initial}, {"mean", c.flow->mean}, {"sd", c.flow->sd}};
    j["suite"] = json::array();
    for (const auto& s : c.suite) {
        json e = s.params;
        e["check"] = s.check;
        j["suite"].push_back(e);
    }
    return j;
}

inline ExperimentConfig load_config(const std::string& path)
{
    const std::string text = read_text(path);
    const bool is_json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
    return config_from_json(is_json ? parse_json_text(text, path) : parse_toml_text(text, path));
}

// --------------------------------------------------------------- model construction

struct Models {
    Grid1D grid;
    EntropyModel entropy;
    PotentialPair pot;
    YoungPair young;
};

inline Models build_models(const ExperimentConfig& c)
{
    Grid1D g(c.grid.a, c.grid.b, c.grid.n);
    EntropyModel m = c.entropy.kind == "boltzmann" ? EntropyModel::boltzmann(c.entropy.dim)
                                                   : EntropyModel::power(c.entropy.gamma, c.entropy.dim);
    const std::map<std::string, double> params{
        {"l", c.potential.lambda}, {"lambda", c.potential.lambda}, {"nu", c.potential.nu}};
    PotentialPair pot;
    pot.V = potential_from_expression(c.potential.v, params);
    pot.lambda = c.potential.lambda;
    pot.W = potential_from_expression(c.potential.w, params);
    pot.nu = c.potential.nu;
    YoungSpec ys;
    if (c.young.kind == "power_pls") ys.kind = YoungSpec::Kind::power_pls;
    else if (c.young.kind == "power_gn") ys.kind = YoungSpec::Kind::power_gn;
    ys.sigma = c.young.sigma;
    ys.p = c.young.p;
    ys.rgamma = c.young.rgamma;
    return Models{g, m, pot, make_young(ys)};
}

} // namespace wassineq::cli
