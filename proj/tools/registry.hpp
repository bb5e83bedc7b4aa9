#pragma once

// Checker registry: maps config names to inequality checks.

#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "config.hpp"

namespace wassineq::cli {

// Shared, lazily computed inputs. Every cached value is a deterministic
// function of the config, so evaluation order does not affect results.
class Context {
public:
    Context(const ExperimentConfig& cfg) : cfg_(cfg), models_(build_models(cfg)) {}

    const ExperimentConfig& config() const { return cfg_; }
    const Models& models() const { return models_; }
    const Grid1D& grid() const { return models_.grid; }

    GridDensity seeded(int seed) const { return random_smooth_density(static_cast<std::uint64_t>(seed), grid()); }

    // rho_V for the configured entropy and potentials
    const GridDensity& reference() const
    {
        return cached(ref_, [&] { return solve_reference(models_.entropy, models_.pot, grid()).density; });
    }

    // rho_{V+c} with the configured Young function
    const ReferenceDensity& reference_with_c() const
    {
        return cached(ref_c_, [&] { return solve_reference(models_.entropy, models_.pot, &models_.young, grid()); });
    }

    const GridDensity& boltzmann_ref() const
    {
        return cached(ref_u_, [&] { return boltzmann_reference(models_.pot, grid()); });
    }

    const GnConstants& gn(double p, double r) const
    {
        std::lock_guard<std::recursive_mutex> lk(mu_);
        auto key = std::make_pair(p, r);
        auto it = gn_.find(key);
        if (it == gn_.end()) it = gn_.emplace(key, gn_constants(p, r, grid())).first;
        return it->second;
    }

    const FlowTrace& trace() const
    {
        return cached(trace_, [&] {
            if (!cfg_.flow) fail(ErrorKind::config, "flow checks need a [flow] table");
            return run_flow(cfg_, models_, reference());
        });
    }

    static FlowTrace run_flow(const ExperimentConfig& cfg, const Models& md, const GridDensity& ref)
    {
        const auto& fs = *cfg.flow;
        const auto& g = md.grid;
        auto rho0 = initial_density(fs, g, md.entropy);
        FlowSolver solver(g, md.entropy, md.pot);
        // the peak can grow towards the stationary profile, so bound by both ends with a margin
        const double dt = fs.dt > 0.0 ? fs.dt : 0.9 * std::min(solver.dt_max(rho0), solver.dt_max(ref));
        const long steps = static_cast<long>(std::ceil(fs.t_end / dt - 1e-9));
        const int every = fs.sample_every > 0 ? fs.sample_every : static_cast<int>(std::max(1L, steps / 100));
        return evolve(rho0, md.entropy, md.pot, fs.t_end, dt, every, &ref);
    }

    static GridDensity initial_density(const FlowSpec& fs, const Grid1D& g, const EntropyModel& m)
    {
        auto bump = [&](double x, double c) { return std::exp(-0.5 * (x - c) * (x - c) / (fs.sd * fs.sd)); };
        std::vector<double> v = g.sample([&](double x) {
            return fs.initial == "bimodal" ? bump(x, fs.mean) + bump(x, -fs.mean) : bump(x, fs.mean);
        });
        return normalize(v, g, m.singular_at_zero() ? 1e-300 : 0.0);
    }

private:
    template <class T, class Fn>
    const T& cached(std::unique_ptr<T>& slot, Fn&& make) const
    {
        std::lock_guard<std::recursive_mutex> lk(mu_);
        if (!slot) slot = std::make_unique<T>(make());
        return *slot;
    }

    const ExperimentConfig& cfg_;
    Models models_;
    mutable std::recursive_mutex mu_;
    mutable std::unique_ptr<GridDensity> ref_, ref_u_;
    mutable std::unique_ptr<ReferenceDensity> ref_c_;
    mutable std::unique_ptr<FlowTrace> trace_;
    mutable std::map<std::pair<double, double>, GnConstants> gn_;
};

// --------------------------------------------------------------- parameter access

class Params {
public:
    Params(const json& j, std::string where) : j_(j), where_(std::move(where)) {}

    double num(const char* key, double def) const
    {
        if (!j_.contains(key)) return def;
        if (!j_[key].is_number()) bad(key, "a number");
        return j_[key].get<double>();
    }
    std::string str(const char* key, const std::string& def) const
    {
        if (!j_.contains(key)) return def;
        if (!j_[key].is_string()) bad(key, "a string");
        return j_[key].get<std::string>();
    }
    std::vector<double> nums(const char* key, std::vector<double> def) const
    {
        if (!j_.contains(key)) return def;
        if (j_[key].is_number()) return {j_[key].get<double>()};
        if (!j_[key].is_array()) bad(key, "a number or an array of numbers");
        std::vector<double> out;
        for (const auto& v : j_[key]) {
            if (!v.is_number()) bad(key, "a number or an array of numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }
    std::string choice(const char* key, std::initializer_list<const char*> options) const
    {
        const std::string v = str(key, *options.begin());
        for (const char* o : options)
            if (v == o) return v;
        std::string all;
        for (const char* o : options) all += std::string(all.empty() ? "" : ", ") + o;
        fail(ErrorKind::config, "key '" + where_ + "." + key + "' must be one of: " + all);
    }

private:
    [[noreturn]] void bad(const char* key, const char* what) const
    {
        fail(ErrorKind::config, "key '" + where_ + "." + key + "' must be " + what);
    }
    const json& j_;
    std::string where_;
};

// --------------------------------------------------------------- registry

struct Checker {
    std::string name;
    std::string anchor;
    std::vector<std::string> keys;     // accepted per-check parameters besides "check"
    std::vector<std::string> cases;    // values of "case"; first is the default, "seeded" fans out over seeds
    std::function<std::vector<IneqReport>(const Context&, const Params&, const std::string& kase, int seed)> run;
};

namespace detail {

inline std::string seed_label(int seed)
{
    char b[32];
    std::snprintf(b, sizeof b, "seed=%03d", seed);
    return b;
}

inline GridDensity shifted_reference(const Context& ctx, double shift)
{
    const auto& md = ctx.models();
    const auto& g = ctx.grid();
    if (md.entropy.kind() == EntropyModel::Kind::boltzmann && md.pot.W.is_zero) {
        // exact translate of e^{-V}
        const auto& V = md.pot.V;
        std::vector<double> e = g.sample([&](double x) { return V.is_zero ? 1.0 : -V(x - shift); });
        if (!V.is_zero) {
            const double top = *std::max_element(e.begin(), e.end());
            for (double& v : e) v = std::exp(v - top);
        }
        return normalize(e, g, 0.0);
    }
    const auto& ref = ctx.reference();
    return normalize(g.sample([&](double x) { return ref.at(x - shift); }), g, 0.0);
}

inline std::vector<double> pow_values(const GridDensity& rho, double e)
{
    std::vector<double> f(rho.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::pow(rho[i], e);
    return f;
}

inline std::vector<double> lp_normalized(std::vector<double> f, const Grid1D& g, double p)
{
    std::vector<double> a(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) a[i] = std::pow(std::abs(f[i]), p);
    const double s = std::pow(integrate(a, g), 1.0 / p);
    for (double& v : f) v /= s;
    return f;
}

// f with int f rho_U = 1, f = exp(t x + smooth bounded perturbation)
inline std::vector<double> tilt_function(const Grid1D& g, const GridDensity& ref, double tilt, int seed)
{
    double amp[3] = {0, 0, 0}, om[3] = {0, 0, 0}, ph[3] = {0, 0, 0};
    if (seed >= 0) {
        std::mt19937_64 gen(static_cast<std::uint64_t>(seed) + 7919);
        auto u = [&] { return wassineq::detail::unit_uniform(gen); };
        tilt = 0.8 * (2.0 * u() - 1.0);
        for (int k = 0; k < 3; ++k) {
            amp[k] = 0.5 * u() / (k + 1);
            om[k] = (0.5 + u()) * (k + 1);
            ph[k] = 2.0 * M_PI * u();
        }
    }
    std::vector<double> f = g.sample([&](double x) {
        double e = tilt * x;
        for (int k = 0; k < 3; ++k) e += amp[k] * std::sin(om[k] * x + ph[k]);
        return std::exp(e);
    });
    std::vector<double> a(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) a[i] = f[i] * ref[i];
    const double m = integrate(a, g);
    for (double& v : f) v /= m;
    return f;
}

inline void relabel(std::vector<IneqReport>& rs, const std::string& label)
{
    for (auto& r : rs) r.name += "[" + label + "]";
}

} // namespace detail

inline const std::vector<Checker>& registry()
{
    static const std::vector<Checker> reg = [] {
        std::vector<Checker> v;
        const auto tol = [](const Context& c) { return c.config().tolerances; };

        v.push_back({"check_master", "master comparison principle for free energies along transport", {"case"},
                     {"seeded", "equality"},
                     [tol](const Context& c, const Params&, const std::string& k, int s) {
                         const auto& md = c.models();
                         if (k == "equality") {
                             const auto& ref = c.reference_with_c().density;
                             return std::vector{check_master(ref, ref, md.entropy, md.pot, md.young, tol(c))};
                         }
                         return std::vector{
                             check_master(c.seeded(s), c.seeded(1000 + s), md.entropy, md.pot, md.young, tol(c))};
                     }});

        v.push_back({"check_general_sobolev", "general Sobolev inequality from the master principle", {"case"},
                     {"seeded", "equality"},
                     [tol](const Context& c, const Params&, const std::string& k, int s) {
                         const auto& md = c.models();
                         const auto& ref = c.reference_with_c();
                         const GridDensity rho = k == "equality" ? ref.density : c.seeded(s);
                         return check_general_sobolev(rho, md.entropy, md.pot, md.young, tol(c), &ref);
                     }});

        v.push_back({"check_euclidean_lsi", "general Euclidean log-Sobolev inequality", {"case", "lambda", "center"},
                     {"seeded", "extremal"},
                     [tol](const Context& c, const Params& p, const std::string& k, int s) {
                         const auto& md = c.models();
                         if (k == "extremal") {
                             if (!md.young.p) fail(ErrorKind::hypothesis, "Young pair has no homogeneity degree");
                             auto rho = plsi_extremal(*md.young.p, p.num("lambda", 1.3), c.grid(), p.num("center", 0.0));
                             return std::vector{check_euclidean_lsi(rho, md.young, 1, tol(c))};
                         }
                         return std::vector{check_euclidean_lsi(c.seeded(s), md.young, 1, tol(c))};
                     }});

        v.push_back({"check_plsi", "optimal p-log-Sobolev inequality", {"case", "p", "lambda", "center"},
                     {"seeded", "extremal"},
                     [tol](const Context& c, const Params& p, const std::string& k, int s) {
                         const double pp = p.num("p", 2.0);
                         const auto& g = c.grid();
                         std::vector<double> f;
                         if (k == "extremal") {
                             const double q = pp / (pp - 1.0), lam = p.num("lambda", 1.0), x0 = p.num("center", 0.0);
                             f = g.sample([&](double x) { return std::exp(-std::pow(lam, q) * std::pow(std::abs(x - x0), q) / q); });
                         }
                         else {
                             f = detail::pow_values(c.seeded(s), 1.0 / pp);
                         }
                         return std::vector{check_plsi(detail::lp_normalized(std::move(f), g, pp), g, pp, 1, tol(c))};
                     }});

        v.push_back({"check_gagliardo_nirenberg", "Gagliardo-Nirenberg inequality with scaling-optimized constant",
                     {"case", "p", "r"}, {"seeded", "extremal"},
                     [tol](const Context& c, const Params& p, const std::string& k, int s) {
                         const double pp = p.num("p", 2.0), r = p.num("r", 4.0);
                         const auto& g = c.grid();
                         const auto& k0 = c.gn(pp, r);
                         std::vector<double> f = k == "extremal" ? gn_extremal(pp, r, g).h
                                                                 : detail::pow_values(c.seeded(s), 1.0 / r);
                         return check_gagliardo_nirenberg(detail::lp_normalized(std::move(f), g, r), g, pp, r, tol(c), &k0);
                     }});

        v.push_back({"check_general_lsi", "general logarithmic Sobolev inequality with parameter sigma",
                     {"case", "sigma", "shift"}, {"seeded", "shifted_gaussian"},
                     [tol](const Context& c, const Params& p, const std::string& k, int s) {
                         const auto& md = c.models();
                         std::vector<IneqReport> out;
                         for (double sg : p.nums("sigma", {1.0})) {
                             auto r = k == "shifted_gaussian"
                                          ? check_general_lsi(detail::shifted_reference(c, p.num("shift", 0.5)),
                                                              c.reference(), md.entropy, md.pot, sg, tol(c))
                                          : check_general_lsi(c.seeded(s), c.seeded(1000 + s), md.entropy, md.pot, sg,
                                                              tol(c));
                             char b[48];
                             std::snprintf(b, sizeof b, "/sigma=%g", sg);
                             r.name += b;
                             out.push_back(r);
                         }
                         return out;
                     }});

        v.push_back({"check_hwbi", "HWBI inequality (entropy, Wasserstein, barycentre, production); HWI when W = 0",
                     {"case", "shift"}, {"seeded", "shifted_gaussian"},
                     [tol](const Context& c, const Params& p, const std::string& k, int s) {
                         const auto& md = c.models();
                         if (k == "shifted_gaussian")
                             return check_hwbi(detail::shifted_reference(c, p.num("shift", 0.5)), c.reference(),
                                               md.entropy, md.pot, tol(c));
                         return check_hwbi(c.seeded(s), c.seeded(1000 + s), md.entropy, md.pot, tol(c));
                     }});

        v.push_back({"check_lsi_interaction", "log-Sobolev inequalities with interaction potentials", {"case"},
                     {"seeded", "recentred", "reference"},
                     [tol](const Context& c, const Params&, const std::string& k, int s) {
                         const auto& md = c.models();
                         const auto& ref = c.reference();
                         if (k == "reference") return check_lsi_interaction(ref, ref, md.entropy, md.pot, tol(c));
                         GridDensity rho = c.seeded(s);
                         if (k == "recentred") {
                             const double shift = barycenter(ref) - barycenter(rho);
                             rho = normalize(c.grid().sample([&](double x) { return rho.at(x - shift); }), c.grid(), 1e-12);
                         }
                         return check_lsi_interaction(rho, ref, md.entropy, md.pot, tol(c));
                     }});

        v.push_back({"check_talagrand", "generalized Talagrand transport inequality; original form for Boltzmann",
                     {"case", "shift"}, {"seeded", "shifted_gaussian", "reference"},
                     [tol](const Context& c, const Params& p, const std::string& k, int s) {
                         const auto& md = c.models();
                         const auto& ref = c.reference();
                         GridDensity rho = k == "reference"         ? ref
                                           : k == "shifted_gaussian" ? detail::shifted_reference(c, p.num("shift", 0.5))
                                                                     : c.seeded(s);
                         return check_talagrand(rho, md.entropy, md.pot, tol(c), &ref);
                     }});

        v.push_back({"check_boltzmann_lsi", "Bakry-Emery log-Sobolev inequality for a uniformly convex potential",
                     {"case", "tilt", "sigma"}, {"tilt", "seeded", "constant"},
                     [tol](const Context& c, const Params& p, const std::string& k, int s) {
                         const auto& g = c.grid();
                         const auto& ref = c.boltzmann_ref();
                         std::vector<double> f = k == "constant" ? detail::tilt_function(g, ref, 0.0, -1)
                                                 : k == "tilt"   ? detail::tilt_function(g, ref, p.num("tilt", 0.5), -1)
                                                                 : detail::tilt_function(g, ref, 0.0, s);
                         std::optional<double> sg;
                         if (p.nums("sigma", {}).size()) sg = p.num("sigma", 1.0);
                         return check_boltzmann_lsi(f, g, c.models().pot, sg, tol(c), &ref);
                     }});

        v.push_back({"check_poincare", "Poincare inequality for the Boltzmann reference measure", {"function"}, {"function"},
                     [tol](const Context& c, const Params& p, const std::string&, int) {
                         const auto& cfg = c.config();
                         const std::map<std::string, double> params{{"l", cfg.potential.lambda},
                                                                    {"lambda", cfg.potential.lambda},
                                                                    {"nu", cfg.potential.nu}};
                         const std::string text = p.str("function", "x");
                         auto fn = parse_expression(text, params);
                         auto r = check_poincare(c.grid().sample(fn), c.grid(), c.models().pot, tol(c), &c.boltzmann_ref());
                         r.name += "[f=" + text + "]";
                         return std::vector{r};
                     }});

        v.push_back({"check_concentration", "concentration of measure for the Boltzmann reference measure",
                     {"lo", "hi", "eps"}, {"interval"},
                     [tol](const Context& c, const Params& p, const std::string&, int) {
                         const double lo = p.num("lo", 0.0), hi = p.num("hi", c.grid().b());
                         std::vector<IneqReport> out;
                         for (double e : p.nums("eps", {2.0})) {
                             auto r = check_concentration(lo, hi, e, c.models().pot, c.grid(), tol(c), &c.boltzmann_ref());
                             char b[96];
                             std::snprintf(b, sizeof b, "[B=%g:%g,eps=%g]", lo, hi, e);
                             r.name += b;
                             out.push_back(r);
                         }
                         return out;
                     }});

        v.push_back({"check_duality", "energy-entropy duality (general, p-log-Sobolev and GN variants)",
                     {"case", "variant", "p", "r", "mu"}, {"seeded", "extremal"},
                     [tol](const Context& c, const Params& p, const std::string& k, int s) {
                         const auto& md = c.models();
                         const auto& g = c.grid();
                         const std::string var = p.choice("variant", {"plog", "gn", "general"});
                         IneqReport r;
                         if (var == "general") {
                             if (k == "extremal") {
                                 PotentialPair none;
                                 auto rc = solve_reference(md.entropy, none, &md.young, g).density;
                                 r = check_duality_general(rc, rc, md.entropy, md.young, tol(c));
                             }
                             else {
                                 r = check_duality_general(c.seeded(s), c.seeded(1000 + s), md.entropy, md.young, tol(c));
                             }
                         }
                         else {
                             DualityVariant dv;
                             dv.kind = var == "plog" ? DualityVariant::Kind::plog : DualityVariant::Kind::gn;
                             dv.p = p.num("p", 2.0);
                             dv.r = p.num("r", 4.0);
                             dv.mu = p.num("mu", 1.0);
                             const double e = var == "plog" ? dv.p : dv.r;
                             if (k == "extremal") {
                                 if (var == "plog") {
                                     const double q = dv.p / (dv.p - 1.0);
                                     auto f = detail::lp_normalized(g.sample([&](double x) {
                                         return std::exp(-std::pow(dv.mu * std::abs(x), q) / q);
                                     }), g, dv.p);
                                     std::vector<double> fp(f.size());
                                     for (std::size_t i = 0; i < f.size(); ++i) fp[i] = std::pow(std::abs(f[i]), dv.p);
                                     r = check_duality(normalize(fp, g), f, dv, tol(c));
                                 }
                                 else {
                                     auto ext = gn_extremal(dv.p, dv.r, g, dv.mu);
                                     r = check_duality(ext.rho, ext.h, dv, tol(c));
                                 }
                             }
                             else {
                                 auto f = detail::lp_normalized(detail::pow_values(c.seeded(1000 + s), 1.0 / e), g, e);
                                 r = check_duality(c.seeded(s), f, dv, tol(c));
                             }
                         }
                         r.name += "/" + var;
                         return std::vector{r};
                     }});

        v.push_back({"check_displacement_convexity", "convexity of the internal energy along displacement interpolation",
                     {"case", "ts"}, {"seeded"},
                     [](const Context& c, const Params& p, const std::string&, int s) {
                         auto ts = p.nums("ts", {0.0, 0.25, 0.5, 0.75, 1.0});
                         return std::vector{convexity_report(c.seeded(s), c.seeded(1000 + s), c.models().entropy, ts)};
                     }});

        v.push_back({"check_lemma22", "internal, potential and interaction energy inequalities along optimal transport",
                     {"case"}, {"seeded"},
                     [tol](const Context& c, const Params&, const std::string&, int s) {
                         const auto& md = c.models();
                         return lemma22_reports(c.seeded(s), c.seeded(1000 + s), md.entropy, md.pot, tol(c));
                     }});

        v.push_back({"check_dissipation", "energy dissipation identity along the gradient flow", {"tol"}, {"flow"},
                     [](const Context& c, const Params& p, const std::string&, int) {
                         const double limit = p.num("tol", 0.05);
                         auto d = check_dissipation(c.trace(), limit);
                         Tolerances t{0.0, c.config().tolerances.tol_eq};
                         auto r = make_report("check_dissipation", d.max_defect, limit, t, "");
                         r.extras = {{"max_rate", d.max_rate}};
                         return std::vector{r};
                     }});

        v.push_back({"check_trend", "exponential trend to equilibrium of energy and Wasserstein distance", {"margin"},
                     {"flow"},
                     [](const Context& c, const Params& p, const std::string&, int) {
                         const auto& md = c.models();
                         const double lam = md.pot.lambda;
                         if (!(lam > 0.0)) fail(ErrorKind::hypothesis, "trend to equilibrium needs lambda > 0");
                         if (md.pot.nu < 0.0) fail(ErrorKind::hypothesis, "trend to equilibrium needs a convex W");
                         const auto& tr = c.trace();
                         const double margin = p.num("margin", 0.02);
                         double worst_h = 0.0, worst_w = 0.0;
                         for (std::size_t k = 0; k < tr.times.size(); ++k) {
                             const double t = tr.times[k];
                             worst_h = std::max(worst_h, tr.energies[k] * std::exp(2.0 * lam * t) / tr.energies[0]);
                             worst_w = std::max(worst_w, tr.w2s[k] * std::exp(lam * t) / tr.w2s[0]);
                         }
                         Tolerances t{0.0, c.config().tolerances.tol_eq};
                         auto rh = make_report("check_trend/energy", worst_h, 1.0 + margin, t, "");
                         rh.extras = {{"rate", estimate_rate(tr.times, tr.energies)}};
                         auto rw = make_report("check_trend/w2", worst_w, 1.0 + margin, t, "");
                         rw.extras = {{"rate", estimate_rate(tr.times, tr.w2s)}};
                         return std::vector{rh, rw};
                     }});
        return v;
    }();
    return reg;
}

inline const Checker* find_checker(const std::string& name)
{
    for (const auto& c : registry())
        if (c.name == name) return &c;
    return nullptr;
}

// Rejects unknown checkers and parameters before anything runs.
inline void validate_suite(const ExperimentConfig& cfg)
{
    for (std::size_t i = 0; i < cfg.suite.size(); ++i) {
        const auto& s = cfg.suite[i];
        const std::string where = "suite[" + std::to_string(i) + "]";
        const Checker* c = find_checker(s.check);
        if (!c) fail(ErrorKind::config, "unknown checker '" + s.check + "' in key '" + where + ".check'");
        for (auto it = s.params.begin(); it != s.params.end(); ++it)
            if (std::find(c->keys.begin(), c->keys.end(), it.key()) == c->keys.end())
                fail(ErrorKind::config, "unknown key '" + where + "." + it.key() + "' for " + c->name);
        if (s.params.contains("case")) {
            const auto& k = s.params["case"];
            if (!k.is_string() || std::find(c->cases.begin(), c->cases.end(), k.get<std::string>()) == c->cases.end()) {
                std::string all;
                for (const auto& o : c->cases) all += (all.empty() ? "" : ", ") + o;
                fail(ErrorKind::config, "key '" + where + ".case' must be one of: " + all);
            }
        }
    }
}

} // namespace wassineq::cli
