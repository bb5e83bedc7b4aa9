// wassineq: command-line runner for experiment configs.
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "runner.hpp"

using namespace wassineq;
using namespace wassineq::cli;
namespace fs = std::filesystem;

namespace {

std::string utc_now()
{
    const std::time_t t = std::time(nullptr);
    char b[32];
    std::strftime(b, sizeof b, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return b;
}

std::string out_path(const std::string& dir, const std::string& file) { return (fs::path(dir) / file).string(); }

int cmd_verify(const std::string& path, const std::string& out_dir)
{
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg = load_config(path);
    validate_suite(cfg);
    const unsigned threads = worker_count(plan_tasks(cfg).size());
    auto reports = run_suite(cfg, threads);
    fs::create_directories(out_dir);
    write_text(out_path(out_dir, cfg.name + ".report.json"), reports_json(cfg, reports));
    write_text(out_path(out_dir, cfg.name + ".summary.csv"), summary_csv(reports));
    bool ok = true;
    for (const auto& r : reports) {
        ok = ok && r.pass;
        std::printf("%s %s slack=%s%s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), fmt_g(r.slack).c_str(),
                    r.reason.empty() ? "" : (" reason=" + r.reason).c_str());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json meta{{"config", path}, {"generated_utc", utc_now()}, {"wall_seconds", secs}, {"threads", threads},
              {"checks", reports.size()}};
    write_text(out_path(out_dir, cfg.name + ".meta.json"), meta.dump(2) + "\n");
    return ok ? 0 : 1;
}

int cmd_flow(const std::string& path, const std::string& out_dir)
{
    ExperimentConfig cfg = load_config(path);
    if (!cfg.flow) fail(ErrorKind::config, "missing key 'flow'");
    const auto md = build_models(cfg);
    const auto ref = solve_reference(md.entropy, md.pot, md.grid).density;
    const auto tr = Context::run_flow(cfg, md, ref);
    fs::create_directories(out_dir);
    write_text(out_path(out_dir, cfg.name + ".flow.csv"), trace_csv(tr));
    const auto dis = check_dissipation(tr);
    bool monotone = true;
    for (std::size_t k = 1; k < tr.energies.size(); ++k)
        monotone = monotone && tr.energies[k] <= tr.energies[k - 1] + 1e-8 * std::max(1.0, std::abs(tr.energies[0]));
    std::printf("samples=%zu H0=%s H_end=%s\n", tr.times.size(), fmt_g(tr.energies.front()).c_str(),
                fmt_g(tr.energies.back()).c_str());
    if (tr.energies.back() > 0.0 && tr.w2s.back() > 0.0)
        std::printf("rate_H=%s rate_W2=%s\n", fmt_g(estimate_rate(tr.times, tr.energies)).c_str(),
                    fmt_g(estimate_rate(tr.times, tr.w2s)).c_str());
    std::printf("%s dissipation defect=%s\n", dis.pass ? "PASS" : "FAIL", fmt_g(dis.max_defect).c_str());
    std::printf("%s energy nonincreasing\n", monotone ? "PASS" : "FAIL");
    return dis.pass && monotone ? 0 : 1;
}

int cmd_constants(double p, int n)
{
    json j;
    j["p"] = p;
    j["n"] = n;
    j["C_p"] = plsi_constant(p, n);
    if (p > 1.0) j["sigma_c"] = sigma_c(p, p / (p - 1.0), n);
    else j["sigma_c"] = nullptr;
    if (p > 1.0 && p < n) {
        const auto sc = sobolev_constants(p, n);
        j["C_pn"] = sc.C;
        j["C_inf"] = sc.C_inf;
    }
    else {
        j["C_pn"] = nullptr;
        j["C_inf"] = nullptr;
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_list()
{
    for (const auto& c : registry()) std::printf("%-30s %s\n", c.name.c_str(), c.anchor.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Numerical verification of mass-transport inequalities"};
    app.require_subcommand(1);
    std::string config, out_dir = ".";
    double p = 2.0;
    int n = 1;

    auto* verify = app.add_subcommand("verify", "run the checks of an experiment config");
    verify->add_option("config", config, "TOML or JSON config")->required();
    verify->add_option("--out", out_dir, "output directory");
    auto* flow = app.add_subcommand("flow", "run the gradient flow of an experiment config");
    flow->add_option("config", config, "TOML or JSON config")->required();
    flow->add_option("--out", out_dir, "output directory");
    auto* constants = app.add_subcommand("constants", "closed-form constants as JSON");
    constants->add_option("--p", p, "exponent p >= 1")->required();
    constants->add_option("--n", n, "dimension n >= 1")->required();
    auto* list = app.add_subcommand("list-checkers", "print every registered checker");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    try {
        if (*verify) return cmd_verify(config, out_dir);
        if (*flow) return cmd_flow(config, out_dir);
        if (*constants) return cmd_constants(p, n);
        if (*list) return cmd_list();
    }
    catch (const Error& e) {
        std::fprintf(stderr, "wassineq: %s\n", e.what());
        return 2;
    }
    catch (const std::exception& e) {
        std::fprintf(stderr, "wassineq: %s\n", e.what());
        return 2;
    }
    return 2;
}
