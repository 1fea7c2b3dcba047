#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hypflats/campaigns.hpp"
#include "hypflats/disc.hpp"
#include "hypflats/io.hpp"
#include "hypflats/moments.hpp"
#include "hypflats/second_order.hpp"
#include "hypflats/ustat.hpp"
#include "hypflats/version.hpp"

using json = nlohmann::json;
using namespace hypflats;

namespace {

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file: " + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config " + path + ": " + e.what());
    }
    if (!cfg.is_object())
        throw std::runtime_error("config " + path + ": expected a JSON object");
    return cfg;
}

double need_num(const json& cfg, const char* key) {
    if (!cfg.contains(key))
        throw std::runtime_error(std::string("config: missing field '") + key +
                                 "'");
    if (!cfg[key].is_number())
        throw std::runtime_error(std::string("config: field '") + key +
                                 "' must be a number");
    return cfg[key].get<double>();
}

double opt_num(const json& cfg, const char* key, double fallback) {
    return cfg.contains(key) ? need_num(cfg, key) : fallback;
}

long need_count(const json& cfg, const char* key) {
    const double v = need_num(cfg, key);
    const long n = static_cast<long>(v);
    if (static_cast<double>(n) != v || n < 0)
        throw std::runtime_error(std::string("config: field '") + key +
                                 "' must be a non-negative integer");
    return n;
}

long opt_count(const json& cfg, const char* key, long fallback) {
    return cfg.contains(key) ? need_count(cfg, key) : fallback;
}

// Grid field: an array under grid_key, or a scalar under scalar_key.
std::vector<double> need_grid(const json& cfg, const char* grid_key,
                              const char* scalar_key) {
    if (cfg.contains(grid_key)) {
        const json& g = cfg[grid_key];
        if (!g.is_array() || g.empty())
            throw std::runtime_error(std::string("config: field '") + grid_key +
                                     "' must be a non-empty array");
        std::vector<double> out;
        for (const json& v : g) {
            if (!v.is_number())
                throw std::runtime_error(std::string("config: field '") +
                                         grid_key + "' must hold numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }
    if (cfg.contains(scalar_key))
        return {need_num(cfg, scalar_key)};
    throw std::runtime_error(std::string("config: need '") + grid_key +
                             "' or '" + scalar_key + "'");
}

// Component selector: integer, "all", or absent (= all).
std::vector<int> component_list(const json& cfg, int d) {
    if (!cfg.contains("i") || (cfg["i"].is_string() &&
                               cfg["i"].get<std::string>() == "all")) {
        std::vector<int> is(d);
        for (int i = 0; i < d; ++i)
            is[i] = i;
        return is;
    }
    if (!cfg["i"].is_number_integer())
        throw std::runtime_error("config: field 'i' must be an integer or "
                                 "\"all\"");
    return {cfg["i"].get<int>()};
}

json matrix_json(const dmatrix& m) {
    json out = json::array();
    for (const auto& row : m)
        out.push_back(row);
    return out;
}

// Shared plumbing for one CLI run: effective seed/threads, output directory,
// per-cell error collection and the closing manifest.
struct run_context {
    json config;
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = 0;
    std::chrono::steady_clock::time_point start =
        std::chrono::steady_clock::now();
    json errors = json::array();
    json outputs = json::array();

    std::string path(const std::string& name) const {
        return (std::filesystem::path(out_dir) / name).string();
    }

    json manifest(const std::string& command) const {
        json m;
        m["command"] = command;
        m["config"] = config;
        m["seed"] = seed;
        m["threads"] = threads;
        m["version"] = version_string;
        m["elapsed_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
        m["outputs"] = outputs;
        m["errors"] = errors;
        return m;
    }

    void write_manifest(const std::string& command, json extra = json()) {
        json m = manifest(command);
        if (extra.is_object())
            for (auto& [k, v] : extra.items())
                m[k] = v;
        write_text_file(path(command + "_manifest.json"), m.dump(2) + "\n");
    }
};

run_context make_context(const json& cfg, const std::string& out_dir,
                         bool seed_given, std::uint64_t seed_flag,
                         int threads_flag) {
    run_context ctx;
    ctx.config = cfg;
    ctx.out_dir = out_dir;
    std::filesystem::create_directories(out_dir);
    ctx.seed = seed_given
                   ? seed_flag
                   : static_cast<std::uint64_t>(opt_count(cfg, "seed", 0));
    ctx.threads = resolve_thread_count(
        threads_flag > 0 ? threads_flag
                         : static_cast<int>(opt_count(cfg, "threads", 0)));
    return ctx;
}

campaign_config campaign_from(const run_context& ctx, double t, double r) {
    campaign_config cc;
    cc.d = static_cast<int>(need_count(ctx.config, "d"));
    cc.t = t;
    cc.r = r;
    cc.replications = need_count(ctx.config, "replications");
    cc.seed = ctx.seed;
    cc.threads = ctx.threads;
    return cc;
}

void run_sample(run_context& ctx) {
    const int d = static_cast<int>(need_count(ctx.config, "d"));
    const double r = need_num(ctx.config, "r");
    const double t = need_num(ctx.config, "t");
    const long streams = opt_count(ctx.config, "streams", 1);
    if (streams < 1)
        throw std::runtime_error("config: 'streams' must be >= 1");

    std::vector<std::string> header = {"stream_id", "s"};
    for (int k = 1; k <= d; ++k)
        header.push_back("dir_" + std::to_string(k));
    csv_writer csv(ctx.path("sample.csv"), header);
    json counts = json::array();
    const process_params pp{d, r, t, ctx.seed};
    for (long sid = 0; sid < streams; ++sid) {
        const realization real =
            sample_realization(pp, static_cast<std::uint64_t>(sid));
        counts.push_back(real.hyperplanes.size());
        for (const hyperplane& h : real.hyperplanes) {
            std::vector<std::string> row = {std::to_string(sid), g17(h.s)};
            for (double c : h.dir)
                row.push_back(g17(c));
            csv.write_row(row);
        }
    }
    csv.close();
    ctx.outputs.push_back("sample.csv");
    json extra;
    extra["hyperplane_counts"] = counts;
    ctx.write_manifest("sample", extra);
}

void run_functionals(run_context& ctx) {
    const double t = need_num(ctx.config, "t");
    const double r = need_num(ctx.config, "r");
    const campaign_config cc = campaign_from(ctx, t, r);
    const auto rows = collect_functional_rows(cc);
    csv_writer csv(ctx.path("functionals.csv"), {"stream_id", "i", "value"});
    for (std::size_t sid = 0; sid < rows.size(); ++sid)
        for (std::size_t i = 0; i < rows[sid].size(); ++i)
            csv.write_row({std::to_string(sid), std::to_string(i),
                           g17(rows[sid][i])});
    csv.close();
    ctx.outputs.push_back("functionals.csv");
    ctx.write_manifest("functionals");
}

void run_moments(run_context& ctx) {
    const int d = static_cast<int>(need_count(ctx.config, "d"));
    const double t = need_num(ctx.config, "t");
    const double r = need_num(ctx.config, "r");

    json report = ctx.manifest("moments");
    json analytic;
    analytic["d"] = d;
    analytic["t"] = t;
    analytic["r"] = r;
    const double vol = ball_volume(d, r);
    analytic["ball_volume"] = vol;
    json means = json::array(), lambdas = json::array();
    for (int i = 0; i < d; ++i) {
        means.push_back(expectation(d, i, t, vol));
        lambdas.push_back(intensity_lambda(d, i, t));
    }
    analytic["expectation"] = means;
    analytic["intensity"] = lambdas;
    json covs = json::array();
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            const covariance_report cr = covariance(d, i, j, t, r);
            json c;
            c["i"] = i;
            c["j"] = j;
            c["terms"] = cr.terms;
            c["quad_errors"] = cr.quad_errors;
            c["total"] = cr.total;
            covs.push_back(c);
        }
    analytic["covariance"] = covs;
    analytic["asymptotic_covariance"] = matrix_json(asymptotic_covariance(d, t));
    analytic["tau"] = matrix_json(tau_w(d, false, r));
    report["analytic"] = analytic;

    if (ctx.config.contains("replications")) {
        try {
            const moment_report mr = run_moment_campaign(campaign_from(ctx, t, r));
            json c;
            c["replications"] = need_count(ctx.config, "replications");
            c["analytic_mean"] = mr.analytic_mean;
            c["sample_mean"] = mr.sample_mean;
            c["mean_se"] = mr.mean_se;
            c["mean_z"] = mr.mean_z;
            c["analytic_cov"] = matrix_json(mr.analytic_cov);
            c["sample_cov"] = matrix_json(mr.sample_cov);
            c["cov_se"] = matrix_json(mr.cov_se);
            c["cov_z"] = matrix_json(mr.cov_z);
            report["campaign"] = c;
        } catch (const std::runtime_error& e) {
            json err;
            err["cell"] = {{"t", t}, {"r", r}};
            err["message"] = e.what();
            ctx.errors.push_back(err);
        }
    }
    report["errors"] = ctx.errors;
    report["elapsed_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      ctx.start)
            .count();
    write_text_file(ctx.path("moments.json"), report.dump(2) + "\n");
}

void run_kfunction(run_context& ctx) {
    k_params kp;
    kp.d = static_cast<int>(need_count(ctx.config, "d"));
    kp.i = static_cast<int>(opt_count(ctx.config, "i", 0));
    kp.j = static_cast<int>(opt_count(ctx.config, "j", 0));
    kp.t = need_num(ctx.config, "t");
    kp.kappa = static_cast<int>(opt_num(ctx.config, "kappa", -1));
    const std::vector<double> rs = need_grid(ctx.config, "r_grid", "r");

    std::vector<kfunction_row> table;
    if (ctx.config.contains("empirical")) {
        const json& e = ctx.config["empirical"];
        campaign_config cc;
        cc.d = kp.d;
        cc.t = kp.t;
        cc.r = need_num(e, "sim_radius");
        cc.replications = need_count(e, "replications");
        cc.seed = ctx.seed;
        cc.threads = ctx.threads;
        table = kfunction_table_empirical(kp, rs, cc, need_num(e, "window"));
    } else {
        table = kfunction_table(kp, rs);
    }

    csv_writer csv(ctx.path("kfunction.csv"),
                   {"r", "k_analytic", "g_analytic", "k_empirical",
                    "k_stderr"});
    for (const kfunction_row& row : table) {
        if (row.has_empirical)
            csv.write_row({g17(row.r), g17(row.k_analytic),
                           g17(row.g_analytic), g17(row.k_empirical),
                           g17(row.k_stderr)});
        else
            csv.write_row({g17(row.r), g17(row.k_analytic),
                           g17(row.g_analytic), "", ""});
    }
    csv.close();
    ctx.outputs.push_back("kfunction.csv");
    ctx.write_manifest("kfunction");
}

void run_clt(run_context& ctx) {
    const int d = static_cast<int>(need_count(ctx.config, "d"));
    const std::vector<int> is = component_list(ctx.config, d);
    const std::vector<double> ts = need_grid(ctx.config, "t_grid", "t");
    const std::vector<double> rs = need_grid(ctx.config, "r_grid", "r");

    csv_writer csv(ctx.path("clt.csv"),
                   {"d", "i", "t", "r", "replications", "ks", "skewness",
                    "skewness_se", "cum4", "cum4_se"});
    for (int i : is)
        for (double t : ts)
            for (double r : rs) {
                try {
                    const campaign_config cc = campaign_from(ctx, t, r);
                    const clt_report rep = run_clt_cell(cc, i);
                    csv.write_row({std::to_string(d), std::to_string(i),
                                   g17(t), g17(r),
                                   std::to_string(cc.replications),
                                   g17(rep.ks), g17(rep.skewness),
                                   g17(rep.skewness_se), g17(rep.cum4),
                                   g17(rep.cum4_se)});
                } catch (const std::runtime_error& e) {
                    json err;
                    err["cell"] = {{"i", i}, {"t", t}, {"r", r}};
                    err["message"] = e.what();
                    ctx.errors.push_back(err);
                }
            }
    csv.close();
    ctx.outputs.push_back("clt.csv");
    ctx.write_manifest("clt-experiment");
}

void run_multivariate(run_context& ctx) {
    const int d = static_cast<int>(need_count(ctx.config, "d"));
    if (d < 2 || d > 4)
        throw std::runtime_error("config: multivariate needs d in {2,3,4}");
    if (ctx.config.contains("i"))
        throw std::runtime_error(
            "config: the multivariate campaign always covers the full "
            "functional vector; remove 'i'");
    const double t = need_num(ctx.config, "t");
    const std::vector<double> rs = need_grid(ctx.config, "r_grid", "r");

    std::vector<std::string> header = {"r", "frobenius_error", "frobenius_se",
                                       "min_correlation"};
    for (int i = 0; i < d; ++i)
        header.push_back("ks_" + std::to_string(i));
    csv_writer csv(ctx.path("multivariate.csv"), header);
    json cells = json::array();
    for (double r : rs) {
        try {
            const multivariate_report rep =
                run_multivariate_campaign(campaign_from(ctx, t, r));
            std::vector<std::string> row = {g17(r), g17(rep.frobenius_error),
                                            g17(rep.frobenius_se),
                                            g17(rep.min_correlation)};
            for (double ks : rep.marginal_ks)
                row.push_back(g17(ks));
            csv.write_row(row);
            json cell;
            cell["r"] = r;
            cell["target"] = matrix_json(rep.target);
            cell["empirical"] = matrix_json(rep.empirical);
            cells.push_back(cell);
        } catch (const std::runtime_error& e) {
            json err;
            err["cell"] = {{"t", t}, {"r", r}};
            err["message"] = e.what();
            ctx.errors.push_back(err);
        }
    }
    csv.close();
    ctx.outputs.push_back("multivariate.csv");
    json extra;
    extra["cells"] = cells;
    ctx.write_manifest("multivariate", extra);
}

void run_ustat(run_context& ctx) {
    const int d = static_cast<int>(need_count(ctx.config, "d"));
    const int i = static_cast<int>(need_count(ctx.config, "i"));
    const int u = static_cast<int>(need_count(ctx.config, "u"));
    const int v = static_cast<int>(need_count(ctx.config, "v"));
    const double t = need_num(ctx.config, "t");
    const double r = need_num(ctx.config, "r");
    const long n_mc = need_count(ctx.config, "n_mc");

    json report = ctx.manifest("ustat-moments");
    const diagram_sum sum = m_uv(d, i, u, v, t, r, n_mc, ctx.seed);
    json classes = json::array();
    for (const diagram_contribution& c : sum.per_class) {
        json jc;
        jc["canonical"] = c.canonical;
        jc["class_size"] = c.class_size;
        jc["sigma_blocks"] = c.sigma_blocks;
        jc["covered_cells"] = c.covered;
        jc["integration_variables"] = c.n_vars;
        jc["t_exponent"] = c.t_exponent;
        jc["integral"] = c.integral;
        jc["integral_stderr"] = c.integral_stderr;
        jc["contribution"] = c.contribution;
        classes.push_back(jc);
    }
    report["value"] = sum.value;
    report["stderr"] = sum.stderr_;
    report["per_class"] = classes;
    if (ctx.config.contains("ell")) {
        const int ell = static_cast<int>(need_count(ctx.config, "ell"));
        const mc_value cm = centered_moment(d, i, t, r, ell, n_mc, ctx.seed);
        json jm;
        jm["ell"] = ell;
        jm["value"] = cm.value;
        jm["stderr"] = cm.stderr_;
        report["centered_moment"] = jm;
    }
    report["elapsed_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      ctx.start)
            .count();
    write_text_file(ctx.path("ustat_moments.json"), report.dump(2) + "\n");
}

void run_export_disc(run_context& ctx) {
    const int d = static_cast<int>(need_count(ctx.config, "d"));
    if (d != 2)
        throw std::runtime_error("config: disc export needs d = 2");
    const double r = need_num(ctx.config, "r");
    const double t = need_num(ctx.config, "t");
    const long stream = opt_count(ctx.config, "stream", 0);
    const realization real = sample_realization(
        {d, r, t, ctx.seed}, static_cast<std::uint64_t>(stream));
    export_disc(real, ctx.path("disc.csv"));
    ctx.outputs.push_back("disc.csv");
    json extra;
    extra["hyperplanes"] = real.hyperplanes.size();
    ctx.write_manifest("export-disc", extra);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Poisson hyperplane processes in hyperbolic space: "
                 "simulation, moments, K-functions and CLT diagnostics"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed_flag = 0;
    int threads_flag = 0;
    app.add_option("--config", config_path, "JSON config file")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (created if missing)");
    CLI::Option* seed_opt =
        app.add_option("--seed", seed_flag, "override the config seed");
    app.add_option("--threads", threads_flag,
                   "worker threads (default: config, then HYPFLATS_THREADS, "
                   "then hardware)");

    CLI::App* sub_sample =
        app.add_subcommand("sample", "draw realizations, one CSV row per "
                                     "hyperplane");
    CLI::App* sub_functionals = app.add_subcommand(
        "functionals", "skeleton functionals of replicated realizations");
    CLI::App* sub_moments = app.add_subcommand(
        "moments", "analytic moments, optionally checked by simulation");
    CLI::App* sub_kfunction = app.add_subcommand(
        "kfunction", "K-function and pair correlation tables");
    CLI::App* sub_clt = app.add_subcommand(
        "clt-experiment", "normality diagnostics over a (t, r) grid");
    CLI::App* sub_multi = app.add_subcommand(
        "multivariate", "scaled covariance of the functional vector");
    CLI::App* sub_ustat = app.add_subcommand(
        "ustat-moments", "diagram-expansion moments with per-class detail");
    CLI::App* sub_disc = app.add_subcommand(
        "export-disc", "chord endpoints of a planar realization");

    CLI11_PARSE(app, argc, argv);

    try {
        run_context ctx = make_context(load_config(config_path), out_dir,
                                       seed_opt->count() > 0, seed_flag,
                                       threads_flag);
        if (sub_sample->parsed())
            run_sample(ctx);
        else if (sub_functionals->parsed())
            run_functionals(ctx);
        else if (sub_moments->parsed())
            run_moments(ctx);
        else if (sub_kfunction->parsed())
            run_kfunction(ctx);
        else if (sub_clt->parsed())
            run_clt(ctx);
        else if (sub_multi->parsed())
            run_multivariate(ctx);
        else if (sub_ustat->parsed())
            run_ustat(ctx);
        else if (sub_disc->parsed())
            run_export_disc(ctx);
    } catch (const std::exception& e) {
        std::cerr << "hypflats: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
