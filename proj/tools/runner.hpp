#pragma once

// Suite execution and report emission.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "registry.hpp"

namespace wassineq::cli {

struct Task {
    std::size_t entry;
    std::string kase;
    int seed = -1;
};

inline std::vector<Task> plan_tasks(const ExperimentConfig& cfg)
{
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < cfg.suite.size(); ++i) {
        const Checker* c = find_checker(cfg.suite[i].check);
        const std::string kase = cfg.suite[i].params.value("case", c->cases.front());
        if (kase == "seeded")
            for (int s = cfg.seed_first; s <= cfg.seed_last; ++s) tasks.push_back({i, kase, s});
        else
            tasks.push_back({i, kase, -1});
    }
    return tasks;
}

inline unsigned worker_count(std::size_t tasks)
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("WASSINEQ_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(tasks, 1)));
}

inline std::vector<IneqReport> run_task(const Context& ctx, const Task& t)
{
    const auto& spec = ctx.config().suite[t.entry];
    const Checker* c = find_checker(spec.check);
    const std::string label = t.seed >= 0 ? detail::seed_label(t.seed) : t.kase;
    const std::string where = "suite[" + std::to_string(t.entry) + "]";
    try {
        auto rs = c->run(ctx, Params(spec.params, where), t.kase, t.seed);
        if (t.kase != "function" && t.kase != "interval" && t.kase != "flow") detail::relabel(rs, label);
        return rs;
    }
    catch (const Error& e) {
        if (e.kind() == ErrorKind::config) throw;
        auto r = failed_report(c->name + "[" + label + "]", kind_name(e.kind()), ctx.config().tolerances);
        std::fprintf(stderr, "%s: %s\n", r.name.c_str(), e.what());
        return {r};
    }
    catch (const std::exception& e) {
        auto r = failed_report(c->name + "[" + label + "]", "error", ctx.config().tolerances);
        std::fprintf(stderr, "%s: %s\n", r.name.c_str(), e.what());
        return {r};
    }
}

// Runs every task on a worker pool; the result order depends only on the config.
inline std::vector<IneqReport> run_suite(const ExperimentConfig& cfg, unsigned threads = 0)
{
    validate_suite(cfg);
    Context ctx(cfg);
    const auto tasks = plan_tasks(cfg);
    std::vector<std::vector<IneqReport>> slots(tasks.size());
    std::vector<std::string> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) {
            try {
                slots[i] = run_task(ctx, tasks[i]);
            }
            catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const unsigned n = threads ? threads : worker_count(tasks.size());
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < n; ++k) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (!e.empty()) fail(ErrorKind::config, e);

    std::vector<IneqReport> out;
    for (auto& s : slots)
        for (auto& r : s) out.push_back(std::move(r));
    std::stable_sort(out.begin(), out.end(), [](const IneqReport& a, const IneqReport& b) { return a.name < b.name; });
    return out;
}

// --------------------------------------------------------------- serialization

inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json report_to_json(const IneqReport& r)
{
    json j;
    j["name"] = r.name;
    j["lhs"] = number(r.lhs);
    j["rhs"] = number(r.rhs);
    j["slack"] = number(r.slack);
    j["scale"] = number(r.scale);
    j["tol"] = number(r.tol);
    j["pass"] = r.pass;
    j["equality_case"] = r.equality_case;
    j["inputs_digest"] = r.inputs_digest;
    if (!r.reason.empty()) j["reason"] = r.reason;
    json ex = json::object();
    for (const auto& [k, v] : r.extras) ex[k] = number(v);
    j["extras"] = ex;
    return j;
}

inline std::string reports_json(const ExperimentConfig& cfg, const std::vector<IneqReport>& reports)
{
    json j;
    j["experiment"] = cfg.name;
    j["config"] = config_to_json(cfg);
    j["reports"] = json::array();
    for (const auto& r : reports) j["reports"].push_back(report_to_json(r));
    std::size_t passed = 0;
    for (const auto& r : reports) passed += r.pass;
    j["summary"] = {{"checks", reports.size()}, {"passed", passed}, {"failed", reports.size() - passed}};
    return j.dump(2) + "\n";
}

inline std::string fmt_g(double v)
{
    if (!std::isfinite(v)) return "nan";
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

inline std::string summary_csv(const std::vector<IneqReport>& reports)
{
    std::string out = "name,lhs,rhs,slack,scale,pass\n";
    for (const auto& r : reports)
        out += csv_field(r.name) + "," + fmt_g(r.lhs) + "," + fmt_g(r.rhs) + "," + fmt_g(r.slack) + "," +
               fmt_g(r.scale) + "," + (r.pass ? "true" : "false") + "\n";
    return out;
}

inline std::string trace_csv(const FlowTrace& tr)
{
    std::string out = "t,H,I2,W2,b,mass_err\n";
    for (std::size_t k = 0; k < tr.times.size(); ++k)
        out += fmt_g(tr.times[k]) + "," + fmt_g(tr.energies[k]) + "," + fmt_g(tr.dissipations[k]) + "," +
               fmt_g(tr.w2s[k]) + "," + fmt_g(tr.barycentres[k]) + "," + fmt_g(tr.mass_errors[k]) + "\n";
    return out;
}

} // namespace wassineq::cli
