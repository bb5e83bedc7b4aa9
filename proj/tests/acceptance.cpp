// Acceptance criteria: one PASS/FAIL line per criterion; exit 1 if any fails.
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "runner.hpp"
#include "wassineq/wassineq.hpp"

using namespace wassineq;

namespace {

int failures = 0;

void verdict(int id, const std::string& title, bool ok, const std::string& detail)
{
    std::printf("%s %2d %s: %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

void run(int id, const std::string& title, const std::function<bool(std::string&)>& body)
{
    std::string detail;
    bool ok = false;
    try {
        ok = body(detail);
    }
    catch (const std::exception& e) {
        detail += std::string(" exception: ") + e.what();
    }
    verdict(id, title, ok, detail);
}

std::string fmt(const char* f, double a)
{
    char b[128];
    std::snprintf(b, sizeof b, f, a);
    return b;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

const Grid1D wide(-10.0, 10.0, 4096);

PotentialPair quadratic_u(double mu = 1.0)
{
    PotentialPair p;
    p.V = Potential::from([mu](double x) { return 0.5 * mu * x * x; }, "0.5*mu*x^2", [mu](double x) { return mu * x; });
    p.lambda = mu;
    return p;
}

Potential quadratic_w(double nu)
{
    return Potential::from([nu](double x) { return 0.5 * nu * x * x; }, "0.5*nu*x^2", [nu](double x) { return nu * x; });
}

GridDensity gaussian(const Grid1D& g, double m, double s)
{
    return normalize(g.sample([&](double x) { return std::exp(-0.5 * (x - m) * (x - m) / (s * s)); }), g, 0.0);
}

} // namespace

int main()
{
    const double m = 0.5;

    run(1, "Gaussian log-Sobolev saturation", [&](std::string& d) {
        auto pot = quadratic_u();
        auto ref = boltzmann_reference(pot, wide);
        std::vector<double> f = wide.sample([&](double x) { return std::exp(m * x - 0.5 * m * m); });
        std::vector<double> a(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) a[i] = f[i] * ref[i];
        const double mass = integrate(a, wide);
        for (double& v : f) v /= mass;
        auto r = check_boltzmann_lsi(f, wide, pot, {}, {}, &ref).front();
        const double ent = r.extra("relative_entropy"), fisher = r.extra("fisher");
        d = "lhs=" + fmt("%.9f", r.lhs) + " rhs=" + fmt("%.9f", r.rhs) + " entropy=" + fmt("%.9f", ent) +
            " fisher=" + fmt("%.9f", fisher) + " (closed forms m^2/2=0.125, m^2=0.25)";
        return rel(r.lhs, r.rhs) <= 1e-3 && rel(r.lhs, 0.5 * m * m) <= 1e-3 && rel(r.rhs, 0.5 * m * m) <= 1e-3 &&
               rel(ent, 0.5 * m * m) <= 1e-3 && rel(fisher, m * m) <= 1e-3;
    });

    run(2, "Talagrand saturation", [&](std::string& d) {
        auto pot = quadratic_u();
        auto ref = boltzmann_reference(pot, wide);
        auto rho = gaussian(wide, m, 1.0);
        auto reps = check_talagrand(rho, EntropyModel::boltzmann(), pot, {}, &ref);
        const auto& orig = reps.back();
        const double W2 = orig.lhs, H = orig.extra("relative_entropy");
        d = "W2=" + fmt("%.9f", W2) + " sqrt(2H/mu)=" + fmt("%.9f", std::sqrt(2.0 * H));
        return orig.name == "check_talagrand/original" && std::abs(W2 - m) <= 1e-4 && rel(W2, std::sqrt(2.0 * H)) <= 1e-3;
    });

    run(3, "p-log-Sobolev constant and extremal", [&](std::string& d) {
        const double c2 = plsi_constant(2.0, 1);
        const double exact = 2.0 / (M_PI * M_E);
        const double c1 = plsi_constant(1.0, 1), c1e = plsi_constant(1.0 + 1e-4, 1);
        const double lam = 1.0, xbar = 0.3, p = 2.0, q = 2.0;
        auto f = wide.sample([&](double x) { return std::exp(-std::pow(lam, q) * std::pow(std::abs(x - xbar), q) / q); });
        const double np = std::pow(integrate(wide.sample([&](double x) {
            return std::pow(std::exp(-std::pow(lam, q) * std::pow(std::abs(x - xbar), q) / q), p);
        }), wide), 1.0 / p);
        for (double& v : f) v /= np;
        auto r = check_plsi(f, wide, p);
        const double eq = std::abs(r.slack) / r.scale;
        d = "C_2=" + fmt("%.15f", c2) + " |C_2-2/(pi e)|=" + fmt("%.2e", std::abs(c2 - exact)) +
            " extremal rel slack=" + fmt("%.2e", eq) + " C_{1+1e-4}/C_1-1=" + fmt("%.2e", rel(c1e, c1));
        return std::abs(c2 - exact) <= 1e-12 && eq <= 1e-3 && rel(c1e, c1) <= 1e-3;
    });

    run(4, "sigma_c closed form vs quadrature", [&](std::string& d) {
        bool ok = true;
        const std::pair<double, double> pq[] = {{2.0, 2.0}, {3.0, 1.5}, {1.5, 3.0}};
        for (auto [p, q] : pq) {
            // split at 0 so the |x|^q kink sits on a node
            Grid1D g(0.0, 12.0, 400001);
            const double quad = 2.0 * integrate(g.sample([&](double x) { return std::exp(-(p - 1.0) * std::pow(x, q)); }), g);
            const double cf = sigma_c(p, q, 1);
            d += "(" + fmt("%g", p) + "," + fmt("%g", q) + "):" + fmt("%.2e", std::abs(cf - quad)) + " ";
            ok = ok && std::abs(cf - quad) <= 1e-8;
        }
        return ok;
    });

    run(5, "master principle", [&](std::string& d) {
        auto boltz = EntropyModel::boltzmann();
        auto yq = young_quadratic(1.0);
        PotentialPair vonly = quadratic_u();
        PotentialPair wonly;
        wonly.W = quadratic_w(1.0);
        wonly.nu = 1.0;
        PotentialPair both = quadratic_u();
        both.W = quadratic_w(1.0);
        both.nu = 1.0;
        struct Cfg {
            const char* name;
            PotentialPair pot;
        };
        const Cfg cfgs[] = {{"V", vonly}, {"W", wonly}, {"V+W", both}};

        auto eq_slack = [&](const PotentialPair& pot, const YoungPair& yp, std::size_t n) {
            Grid1D g(-10.0, 10.0, n);
            auto ref = solve_reference(boltz, pot, &yp, g).density;
            auto r = check_master(ref, ref, boltz, pot, yp);
            return std::pair{r.slack, r.scale};
        };
        bool ok = true;
        // equality and refinement; a relative floor of 1e-9 absorbs roundoff-level slacks
        struct EqCase {
            const char* name;
            PotentialPair pot;
            YoungPair yp;
        };
        const EqCase eqs[] = {{"V", vonly, yq}, {"W", wonly, yq}, {"V+W", both, yq},
                              {"pls3", PotentialPair{}, young_power_pls(3.0)}};
        for (const auto& c : eqs) {
            auto [s1, sc1] = eq_slack(c.pot, c.yp, 2048);
            auto [s2, sc2] = eq_slack(c.pot, c.yp, 4096);
            const bool eq = std::abs(s2) <= 1e-3 * sc2;
            const bool halves = std::abs(s2) <= std::max(0.5 * std::abs(s1), 1e-9 * sc2);
            d += std::string(c.name) + ":eq " + fmt("%.2e", s1) + "->" + fmt("%.2e", s2) + " ";
            ok = ok && eq && halves;
        }
        for (const auto& c : cfgs) {
            double worst = 1e300;
            for (std::uint64_t s = 1; s <= 50; ++s) {
                auto r0 = random_smooth_density(s, wide);
                auto r1 = random_smooth_density(1000 + s, wide);
                auto r = check_master(r0, r1, boltz, c.pot, yq);
                worst = std::min(worst, r.slack / r.scale);
            }
            d += std::string(c.name) + ":min " + fmt("%.3g", worst) + " ";
            ok = ok && worst >= -1e-4;
        }
        return ok;
    });

    run(6, "HWBI suite and saturation", [&](std::string& d) {
        auto boltz = EntropyModel::boltzmann();
        PotentialPair pot = quadratic_u();
        pot.W = Potential::from([](double x) { return x * x * x * x; }, "x^4", [](double x) { return 4.0 * x * x * x; });
        pot.nu = 0.0;
        double worst = 1e300;
        for (std::uint64_t s = 1; s <= 50; ++s) {
            auto r0 = random_smooth_density(s, wide);
            auto r1 = random_smooth_density(1000 + s, wide);
            for (const auto& r : check_hwbi(r0, r1, boltz, pot)) worst = std::min(worst, r.slack / r.scale);
        }
        auto u = quadratic_u();
        auto ref = boltzmann_reference(u, wide);
        auto sat = check_hwbi(gaussian(wide, m, 1.0), ref, boltz, u).front();
        const double eq = std::abs(sat.slack) / sat.scale;
        d = "seeded min slack/scale=" + fmt("%.3g", worst) + " saturation |slack|/scale=" + fmt("%.2e", eq) +
            " H=" + fmt("%.6f", sat.lhs) + " rhs=" + fmt("%.6f", sat.rhs);
        return worst >= -1e-4 && eq <= 1e-3;
    });

    run(7, "Poincare with Gaussian moments", [&](std::string& d) {
        auto pot = quadratic_u();
        auto ref = boltzmann_reference(pot, wide);
        auto r1 = check_poincare(wide.sample([](double x) { return x; }), wide, pot, {}, &ref);
        auto r2 = check_poincare(wide.sample([](double x) { return x * x - 1.0; }), wide, pot, {}, &ref);
        d = "x: " + fmt("%.8f", r1.lhs) + " <= " + fmt("%.8f", r1.rhs) + "; x^2-1: " + fmt("%.8f", r2.lhs) + " <= " +
            fmt("%.8f", r2.rhs);
        return std::abs(r1.lhs - 1) <= 1e-4 && std::abs(r1.rhs - 1) <= 1e-4 && std::abs(r2.lhs - 2) <= 1e-3 &&
               std::abs(r2.rhs - 4) <= 1e-3;
    });

    run(8, "concentration of measure", [&](std::string& d) {
        auto pot = quadratic_u();
        auto ref = boltzmann_reference(pot, wide);
        bool ok = true;
        for (double eps : {1.5, 2.0, 3.0}) {
            auto r = check_concentration(0.0, wide.b(), eps, pot, wide, {}, &ref);
            const double thr = std::sqrt(2.0 * std::log(2.0));
            const double bound = 1.0 - std::exp(-0.5 * (eps - thr) * (eps - thr));
            const double gbe = normal_cdf(eps);
            const double e1 = std::abs(r.lhs - bound), e2 = std::abs(r.rhs - gbe);
            d += "eps=" + fmt("%g", eps) + " bound err " + fmt("%.1e", e1) + " gamma err " + fmt("%.1e", e2) + "; ";
            ok = ok && r.pass && e1 <= 1e-6 && e2 <= 1e-6 && bound <= gbe;
        }
        return ok;
    });

    run(9, "trend to equilibrium", [&](std::string& d) {
        PotentialPair pot = quadratic_u();
        // linear Fokker-Planck from N(1,1)
        Grid1D g(-8.0, 8.0, 1024);
        auto lin = EntropyModel::boltzmann();
        auto ref = solve_reference(lin, pot, g).density;
        FlowSolver fs(g, lin, pot);
        auto rho0 = gaussian(g, 1.0, 1.0);
        const double dt = fs.dt_max(rho0);
        auto tr = evolve(rho0, lin, pot, 2.0, dt, static_cast<int>(std::round(0.02 / dt)), &ref);
        const double rH = estimate_rate(tr.times, tr.energies), rW = estimate_rate(tr.times, tr.w2s);
        const auto dis = check_dissipation(tr);
        // porous medium, m = 2, centred data
        Grid1D gp(-4.0, 4.0, 512);
        auto pme = EntropyModel::power(2.0);
        auto bar = solve_reference(pme, pot, gp).density;
        auto p0 = normalize(gp.sample([](double x) { return std::exp(-(x - 1) * (x - 1)) + std::exp(-(x + 1) * (x + 1)); }),
                            gp, 0.0);
        const double dtp = 0.4 * gp.h() * gp.h() / 1.2;
        GridDensity fin = p0;
        auto tp = evolve(p0, pme, pot, 5.0, dtp, static_cast<int>(std::round(0.05 / dtp)), &bar, &fin);
        double viol = 0.0;
        for (std::size_t k = 0; k < tp.times.size(); ++k)
            viol = std::max(viol, tp.energies[k] - std::exp(-2.0 * tp.times[k]) * tp.energies[0] * 1.02);
        const double l1 = l1_distance(fin, bar);
        d = "linear: H-rate=" + fmt("%.4f", rH) + " W2-rate=" + fmt("%.4f", rW) + " defect=" + fmt("%.2e", dis.max_defect) +
            "; porous: L1 at t=5 " + fmt("%.2e", l1) + " max(H - 1.02 e^{-2t} H0)=" + fmt("%.2e", viol);
        return rH >= 1.96 && rH <= 2.04 && rW >= 0.98 && rW <= 1.02 && dis.max_defect <= 0.05 && l1 <= 1e-3 &&
               viol <= 0.0;
    });

    run(10, "energy-entropy duality", [&](std::string& d) {
        auto hfun = wide.sample([](double x) { return std::exp(-0.5 * x * x); });
        const double n2 = std::sqrt(integrate(wide.sample([](double x) { return std::exp(-x * x); }), wide));
        for (double& v : hfun) v /= n2;
        std::vector<double> h2(hfun.size());
        for (std::size_t i = 0; i < h2.size(); ++i) h2[i] = hfun[i] * hfun[i];
        DualityVariant plog{DualityVariant::Kind::plog, 2.0, 4.0, 1.0};
        auto r = check_duality(normalize(h2, wide), hfun, plog);
        const double eq1 = std::abs(r.slack) / r.scale;
        double worst = 1e300;
        for (std::uint64_t s = 1; s <= 50; ++s) {
            auto rho = random_smooth_density(s, wide);
            auto sig = random_smooth_density(1000 + s, wide);
            std::vector<double> f(sig.size());
            for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sqrt(sig[i]);
            auto rs = check_duality(rho, f, plog);
            worst = std::min(worst, rs.slack / rs.scale);
        }
        auto ext = gn_extremal(2.0, 4.0, wide);
        DualityVariant gn{DualityVariant::Kind::gn, 2.0, 4.0, 1.0};
        auto rg = check_duality(ext.rho, ext.h, gn);
        const double eq2 = std::abs(rg.slack) / rg.scale;
        d = "plog J=" + fmt("%.8f", r.lhs) + " I=" + fmt("%.8f", r.rhs) + " rel " + fmt("%.1e", eq1) +
            "; seeded min " + fmt("%.3g", worst) + "; gn J=" + fmt("%.8f", rg.lhs) + " I=" + fmt("%.8f", rg.rhs) +
            " rel " + fmt("%.1e", eq2);
        return eq1 <= 1e-3 && worst >= -1e-4 && eq2 <= 1e-3;
    });

    run(11, "displacement convexity and transport energy inequalities", [&](std::string& d) {
        const double ts[] = {0.0, 0.25, 0.5, 0.75, 1.0};
        double worst_b = 1e300, worst_p = 1e300, worst_l = 1e300;
        for (std::uint64_t s = 1; s <= 20; ++s) {
            auto r0 = random_smooth_density(s, wide);
            auto r1 = random_smooth_density(1000 + s, wide);
            worst_b = std::min(worst_b, check_displacement_convexity(r0, r1, EntropyModel::boltzmann(), ts).min_slack);
            worst_p = std::min(worst_p, check_displacement_convexity(r0, r1, EntropyModel::power(2.0), ts).min_slack);
        }
        PotentialPair pot = quadratic_u();
        pot.W = quadratic_w(1.0);
        pot.nu = 1.0;
        for (std::uint64_t s = 1; s <= 50; ++s) {
            auto r0 = random_smooth_density(s, wide);
            auto r1 = random_smooth_density(1000 + s, wide);
            auto l = lemma22_slacks(r0, r1, EntropyModel::boltzmann(), pot);
            worst_l = std::min({worst_l, l.internal / l.scale, l.potential / l.scale, l.interaction / l.scale});
        }
        d = "convexity min slack boltzmann=" + fmt("%.3g", worst_b) + " power2=" + fmt("%.3g", worst_p) +
            "; transport inequalities min slack/scale=" + fmt("%.3g", worst_l);
        return worst_b >= -1e-5 && worst_p >= -1e-5 && worst_l >= -1e-4;
    });

    run(12, "determinism of the shipped suite", [&](std::string& d) {
        std::vector<std::filesystem::path> files;
        for (const auto& e : std::filesystem::directory_iterator(WASSINEQ_CONFIG_DIR))
            if (e.path().extension() == ".toml") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        bool ok = !files.empty();
        for (const auto& f : files) {
            const auto cfg = cli::load_config(f.string());
            // different worker counts must not change a single byte
            const auto a = cli::reports_json(cfg, cli::run_suite(cfg, 1));
            const auto b = cli::reports_json(cfg, cli::run_suite(cfg, 3));
            const bool same = a == b;
            d += f.stem().string() + (same ? " identical" : " DIFFERS") + "; ";
            ok = ok && same;
        }
        d += std::to_string(files.size()) + " configs";
        return ok;
    });

    return failures == 0 ? 0 : 1;
}
