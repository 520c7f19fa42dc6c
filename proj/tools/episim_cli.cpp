#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "episim/abm.hpp"
#include "episim/clustering.hpp"
#include "episim/correlation.hpp"
#include "episim/deployment.hpp"
#include "episim/io.hpp"
#include "episim/models.hpp"
#include "svg_plot.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace episim;

namespace {

// All output paths resolve against EPISIM_OUTPUT_ROOT when it is set.
fs::path resolve_out(const std::string& path) {
    fs::path p(path);
    if (p.is_absolute()) return p;
    if (const char* root = std::getenv("EPISIM_OUTPUT_ROOT")) return fs::path(root) / p;
    return p;
}

Convention convention_from_string(const std::string& name) {
    if (name == "paper-eq") return Convention::PaperEq;
    if (name == "doubled") return Convention::Doubled;
    throw CLI::ValidationError("convention must be paper-eq or doubled");
}

std::string to_string(Convention c) {
    return c == Convention::PaperEq ? "paper-eq" : "doubled";
}

Trajectory closed_form_trajectory(ModelKind kind, const SiParams& params, double t_end,
                                  double dt) {
    Trajectory traj;
    traj.kind = kind;
    traj.params = params;
    traj.dt = dt;
    const auto steps = static_cast<std::uint64_t>(std::llround(t_end / dt));
    for (std::uint64_t k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        const double i = closed_form(kind, t, params);
        traj.samples.push_back({params.n_total - i, i, t});
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Scenario configuration. One JSON document drives the whole reproduce
// pipeline; every parameter has a default taken from the common constants,
// and unknown keys are rejected so typos do not silently change a run.

struct DeploymentSpec {
    std::optional<std::string> load;
    std::size_t n = 200;
    double width = 150.0, height = 150.0;
    double r_s = 4.5, r_t = 9.0;
    std::uint64_t seed = 42;
};

struct AbmSpec {
    bool enabled = true;
    std::uint64_t steps = 200;
    std::uint64_t replications = 20;
    std::uint64_t base_seed = 1;
    std::string mode = "uniform";
    double event_radius = 15.0;
    double dt = 0.05;
    double duty_cycle = 0.05;
    std::optional<double> control_threshold;
    double control_xi = 0.5;
};

struct ScenarioConfig {
    DeploymentSpec deployment;
    std::string kernel_convention = "paper-eq";
    SiParams si;
    std::vector<std::string> models{"baseline", "antivirus", "correlated"};
    double t_end = 20.0;
    double dt = 1e-3;
    std::vector<double> sweep_w_theta{0.2, 0.4, 0.6, 0.8, 1.0};
    std::vector<double> sweep_beta{0.1, 0.3, 0.6};
    std::vector<double> sweep_sigma{0.2, 0.5, 1.0};
    std::vector<double> sweep_r_t{2.0, 4.0, 8.0};
    AbmSpec abm;
    std::vector<double> cluster_xi{0.2, 0.4, 0.5, 0.6, 0.8};
    std::string cluster_linkage = "average";
    std::vector<double> table_r_t{9, 12, 15, 18, 21, 24};
    std::vector<double> table_xi{0.2, 0.4, 0.5, 0.6, 0.8};
    std::string table_convention = "doubled";
    bool plots = false;
};

void reject_unknown(const ordered_json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok) throw std::runtime_error("unknown config key '" + key + "' in " + where);
    }
}

ScenarioConfig parse_scenario(const ordered_json& j) {
    ScenarioConfig cfg;
    cfg.si.lambda = 0.5;
    cfg.si.p = 0.1;
    reject_unknown(j,
                   {"deployment", "kernel", "si", "models", "t_end", "dt", "sweeps", "abm",
                    "clustering", "tables", "plots"},
                   "scenario");
    if (j.contains("deployment")) {
        const auto& d = j.at("deployment");
        reject_unknown(d, {"load", "generate"}, "deployment");
        if (d.contains("load")) cfg.deployment.load = d.at("load").get<std::string>();
        if (d.contains("generate")) {
            const auto& g = d.at("generate");
            reject_unknown(g, {"n", "width", "height", "rs", "rt", "seed"},
                           "deployment.generate");
            if (g.contains("n")) cfg.deployment.n = g.at("n").get<std::size_t>();
            if (g.contains("width")) cfg.deployment.width = g.at("width").get<double>();
            if (g.contains("height")) cfg.deployment.height = g.at("height").get<double>();
            if (g.contains("rs")) cfg.deployment.r_s = g.at("rs").get<double>();
            if (g.contains("rt")) cfg.deployment.r_t = g.at("rt").get<double>();
            if (g.contains("seed")) cfg.deployment.seed = g.at("seed").get<std::uint64_t>();
        }
    }
    if (j.contains("kernel")) {
        const auto& k = j.at("kernel");
        reject_unknown(k, {"convention"}, "kernel");
        if (k.contains("convention"))
            cfg.kernel_convention = k.at("convention").get<std::string>();
        convention_from_string(cfg.kernel_convention);
    }
    if (j.contains("si")) {
        const auto& s = j.at("si");
        reject_unknown(s, {"beta", "sigma", "rt", "n", "w_theta", "lambda", "p", "i0"}, "si");
        if (s.contains("beta")) cfg.si.beta = s.at("beta").get<double>();
        if (s.contains("sigma")) cfg.si.sigma = s.at("sigma").get<double>();
        if (s.contains("rt")) cfg.si.r_t = s.at("rt").get<double>();
        if (s.contains("n")) cfg.si.n_total = s.at("n").get<double>();
        if (s.contains("w_theta")) cfg.si.w_theta = s.at("w_theta").get<double>();
        if (s.contains("lambda")) cfg.si.lambda = s.at("lambda").get<double>();
        if (s.contains("p")) cfg.si.p = s.at("p").get<double>();
        if (s.contains("i0")) cfg.si.i0 = s.at("i0").get<double>();
        cfg.si.validate();
    }
    if (j.contains("models")) {
        cfg.models = j.at("models").get<std::vector<std::string>>();
        for (const auto& m : cfg.models) model_kind_from_string(m);
    }
    if (j.contains("t_end")) cfg.t_end = j.at("t_end").get<double>();
    if (j.contains("dt")) cfg.dt = j.at("dt").get<double>();
    if (j.contains("sweeps")) {
        const auto& s = j.at("sweeps");
        reject_unknown(s, {"w_theta", "beta", "sigma", "r_t"}, "sweeps");
        if (s.contains("w_theta")) cfg.sweep_w_theta = s.at("w_theta").get<std::vector<double>>();
        if (s.contains("beta")) cfg.sweep_beta = s.at("beta").get<std::vector<double>>();
        if (s.contains("sigma")) cfg.sweep_sigma = s.at("sigma").get<std::vector<double>>();
        if (s.contains("r_t")) cfg.sweep_r_t = s.at("r_t").get<std::vector<double>>();
    }
    if (j.contains("abm")) {
        const auto& a = j.at("abm");
        reject_unknown(a,
                       {"enabled", "steps", "replications", "base_seed", "mode",
                        "event_radius", "dt", "duty_cycle", "control"},
                       "abm");
        if (a.contains("enabled")) cfg.abm.enabled = a.at("enabled").get<bool>();
        if (a.contains("steps")) cfg.abm.steps = a.at("steps").get<std::uint64_t>();
        if (a.contains("replications"))
            cfg.abm.replications = a.at("replications").get<std::uint64_t>();
        if (a.contains("base_seed")) cfg.abm.base_seed = a.at("base_seed").get<std::uint64_t>();
        if (a.contains("mode")) cfg.abm.mode = a.at("mode").get<std::string>();
        if (a.contains("event_radius"))
            cfg.abm.event_radius = a.at("event_radius").get<double>();
        if (a.contains("dt")) cfg.abm.dt = a.at("dt").get<double>();
        if (a.contains("duty_cycle")) cfg.abm.duty_cycle = a.at("duty_cycle").get<double>();
        if (a.contains("control") && !a.at("control").is_null()) {
            const auto& c = a.at("control");
            reject_unknown(c, {"threshold", "xi"}, "abm.control");
            cfg.abm.control_threshold = c.at("threshold").get<double>();
            if (c.contains("xi")) cfg.abm.control_xi = c.at("xi").get<double>();
        }
    }
    if (j.contains("clustering")) {
        const auto& c = j.at("clustering");
        reject_unknown(c, {"xi", "linkage"}, "clustering");
        if (c.contains("xi")) cfg.cluster_xi = c.at("xi").get<std::vector<double>>();
        if (c.contains("linkage")) cfg.cluster_linkage = c.at("linkage").get<std::string>();
        linkage_from_string(cfg.cluster_linkage);
    }
    if (j.contains("tables")) {
        const auto& t = j.at("tables");
        reject_unknown(t, {"rt", "xi", "convention"}, "tables");
        if (t.contains("rt")) cfg.table_r_t = t.at("rt").get<std::vector<double>>();
        if (t.contains("xi")) cfg.table_xi = t.at("xi").get<std::vector<double>>();
        if (t.contains("convention"))
            cfg.table_convention = t.at("convention").get<std::string>();
        convention_from_string(cfg.table_convention);
    }
    if (j.contains("plots")) cfg.plots = j.at("plots").get<bool>();
    return cfg;
}

ordered_json scenario_to_json(const ScenarioConfig& cfg) {
    ordered_json j;
    if (cfg.deployment.load) {
        j["deployment"]["load"] = *cfg.deployment.load;
    } else {
        j["deployment"]["generate"] = {{"n", cfg.deployment.n},
                                       {"width", cfg.deployment.width},
                                       {"height", cfg.deployment.height},
                                       {"rs", cfg.deployment.r_s},
                                       {"rt", cfg.deployment.r_t},
                                       {"seed", cfg.deployment.seed}};
    }
    j["kernel"] = {{"convention", cfg.kernel_convention}};
    j["si"] = {{"beta", cfg.si.beta},     {"sigma", cfg.si.sigma},
               {"rt", cfg.si.r_t},        {"n", cfg.si.n_total},
               {"w_theta", cfg.si.w_theta}, {"lambda", cfg.si.lambda},
               {"p", cfg.si.p},           {"i0", cfg.si.i0}};
    j["models"] = cfg.models;
    j["t_end"] = cfg.t_end;
    j["dt"] = cfg.dt;
    j["sweeps"] = {{"w_theta", cfg.sweep_w_theta},
                   {"beta", cfg.sweep_beta},
                   {"sigma", cfg.sweep_sigma},
                   {"r_t", cfg.sweep_r_t}};
    ordered_json abm = {{"enabled", cfg.abm.enabled},
                        {"steps", cfg.abm.steps},
                        {"replications", cfg.abm.replications},
                        {"base_seed", cfg.abm.base_seed},
                        {"mode", cfg.abm.mode},
                        {"event_radius", cfg.abm.event_radius},
                        {"dt", cfg.abm.dt},
                        {"duty_cycle", cfg.abm.duty_cycle}};
    if (cfg.abm.control_threshold)
        abm["control"] = {{"threshold", *cfg.abm.control_threshold},
                          {"xi", cfg.abm.control_xi}};
    else
        abm["control"] = nullptr;
    j["abm"] = abm;
    j["clustering"] = {{"xi", cfg.cluster_xi}, {"linkage", cfg.cluster_linkage}};
    j["tables"] = {{"rt", cfg.table_r_t},
                   {"xi", cfg.table_xi},
                   {"convention", cfg.table_convention}};
    j["plots"] = cfg.plots;
    return j;
}

std::string sweep_tag(double v) {
    std::string s = io::fmt(v);
    for (char& c : s)
        if (c == '.') c = 'p';
    return s;
}

void run_scenario(const ScenarioConfig& cfg, const fs::path& out_dir) {
    fs::create_directories(out_dir);

    // Manifest first: it alone must suffice to re-run the experiment.
    {
        ordered_json manifest = scenario_to_json(cfg);
        manifest["notes"] = ordered_json::array(
            {"The alpha_1..alpha_6 probabilities and the R(t)/D(t) compartments cited in "
             "the source material have no governing equations and are not simulated."});
        std::ofstream mf(out_dir / "manifest.json");
        mf << manifest.dump(2) << "\n";
    }

    // Stage: deployment.
    Deployment dep;
    try {
        if (cfg.deployment.load) {
            dep = io::load_deployment(*cfg.deployment.load);
        } else {
            dep = generate_deployment(cfg.deployment.n, cfg.deployment.width,
                                      cfg.deployment.height, cfg.deployment.r_s,
                                      cfg.deployment.r_t, cfg.deployment.seed);
        }
        io::save_deployment(dep, (out_dir / "deployment.txt").string());
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage deploy: ") + e.what());
    }

    // Stage: correlation.
    CorrelationMatrix matrix;
    CorrelationWeights w;
    try {
        matrix = build_matrix(dep, KernelParams{2.0 * dep.r_s});
        w = weights(matrix);
        io::save_matrix_csv(matrix, (out_dir / "correlation_matrix.csv").string());
        io::save_weights_csv(w, (out_dir / "correlation_weights.csv").string());
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage correlate: ") + e.what());
    }

    // Stage: ODE and closed-form sweeps over the figure axes.
    try {
        auto emit_pair = [&](const SiParams& p, ModelKind kind, const std::string& stem) {
            io::save_trajectory_csv(integrate(kind, p, cfg.t_end, cfg.dt),
                                    (out_dir / ("ode_" + stem + ".csv")).string());
            io::save_trajectory_csv(closed_form_trajectory(kind, p, cfg.t_end, cfg.dt),
                                    (out_dir / ("closed_" + stem + ".csv")).string());
        };
        const bool correlated_requested =
            std::find(cfg.models.begin(), cfg.models.end(), "correlated") != cfg.models.end();

        if (correlated_requested) {
            tools::SvgPlot plot("Infected nodes for varying correlation weight", "t", "I(t)");
            for (double wt : cfg.sweep_w_theta) {
                SiParams p = cfg.si;
                p.w_theta = wt;
                const std::string stem = "wtheta_" + sweep_tag(wt);
                emit_pair(p, ModelKind::CorrelatedSi, stem);
                if (cfg.plots) {
                    auto traj = io::load_trajectory_csv(
                        (out_dir / ("ode_" + stem + ".csv")).string());
                    std::vector<double> xs, ys;
                    for (const auto& s : traj.samples) {
                        xs.push_back(s.t);
                        ys.push_back(s.i);
                    }
                    plot.add_series("w=" + io::fmt(wt), xs, ys);
                }
            }
            if (cfg.plots) plot.save((out_dir / "fig_wtheta.svg").string());

            for (double beta : cfg.sweep_beta) {
                SiParams p = cfg.si;
                p.beta = beta;
                emit_pair(p, ModelKind::CorrelatedSi, "beta_" + sweep_tag(beta));
            }
            for (double sigma : cfg.sweep_sigma) {
                SiParams p = cfg.si;
                p.sigma = sigma;
                emit_pair(p, ModelKind::CorrelatedSi, "sigma_" + sweep_tag(sigma));
            }
            for (double rt : cfg.sweep_r_t) {
                SiParams p = cfg.si;
                p.r_t = rt;
                emit_pair(p, ModelKind::CorrelatedSi, "rt_" + sweep_tag(rt));
            }
        }
        for (const auto& name : cfg.models) {
            if (name == "correlated") continue;
            emit_pair(cfg.si, model_kind_from_string(name), name);
        }
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage ode: ") + e.what());
    }

    // Stage: clustering at the xi grid plus the analytic r_cc table.
    try {
        const auto rule = linkage_from_string(cfg.cluster_linkage);
        for (double xi : cfg.cluster_xi) {
            auto clusters = build_sets(dep, matrix, xi, rule);
            const std::string tag = sweep_tag(xi);
            io::save_clusters_csv(clusters,
                                  (out_dir / ("clusters_xi" + tag + "_members.csv")).string(),
                                  (out_dir / ("clusters_xi" + tag + "_summary.csv")).string());
        }
        auto table = cluster_radius_table(cfg.table_r_t, cfg.table_xi,
                                          convention_from_string(cfg.table_convention));
        io::save_rcc_table_csv(table, (out_dir / "rcc_table.csv").string());
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage cluster: ") + e.what());
    }

    // Stage: agent-based runs, uncontrolled and (optionally) controlled.
    if (cfg.abm.enabled) {
        try {
            AbmConfig abm;
            abm.deployment = &dep;
            abm.si = cfg.si;
            abm.si.sigma = dep.density();
            abm.si.r_t = dep.r_t;
            abm.si.n_total = static_cast<double>(dep.size());
            abm.si.w_theta = w.w_theta;
            abm.steps = cfg.abm.steps;
            abm.replications = cfg.abm.replications;
            abm.base_seed = cfg.abm.base_seed;
            abm.mode = cfg.abm.mode == "correlated" ? InfectionMode::Correlated
                                                    : InfectionMode::Uniform;
            abm.matrix = &matrix;
            abm.event_radius = cfg.abm.event_radius;
            abm.dt = cfg.abm.dt;
            abm.duty_cycle = cfg.abm.duty_cycle;

            auto result = run(abm);
            io::save_abm_csv(result, abm.dt, (out_dir / "abm_mean.csv").string());
            std::ofstream js(out_dir / "abm_summary.json");
            js << io::abm_summary_json(result);

            if (cfg.abm.control_threshold) {
                auto clusters = build_sets(dep, matrix, cfg.abm.control_xi,
                                           linkage_from_string(cfg.cluster_linkage));
                auto controlled = abm;
                controlled.control = ControlConfig{*cfg.abm.control_threshold, &clusters};
                auto cres = run(controlled);
                io::save_abm_csv(cres, abm.dt, (out_dir / "abm_controlled_mean.csv").string());
                std::ofstream cjs(out_dir / "abm_controlled_summary.json");
                cjs << io::abm_summary_json(cres);
            }
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string("stage abm: ") + e.what());
        }
    }
}

// ---------------------------------------------------------------------------
// compare

int do_compare(const std::string& path_a, const std::string& path_b,
               const std::string& metric, double fraction, std::optional<double> tol) {
    auto a = io::load_trajectory_csv(path_a);
    auto b = io::load_trajectory_csv(path_b);
    if (a.samples.size() != b.samples.size())
        throw std::runtime_error("compare: sample counts differ");
    if (a.params.n_total != b.params.n_total)
        throw std::runtime_error("compare: population sizes differ");

    double value = 0.0;
    if (metric == "max-rel-err") {
        for (std::size_t k = 0; k < a.samples.size(); ++k) {
            if (std::abs(a.samples[k].t - b.samples[k].t) > 1e-12)
                throw std::runtime_error("compare: time grids differ");
            value = std::max(value, std::abs(a.samples[k].i - b.samples[k].i) /
                                        a.params.n_total);
        }
    } else if (metric == "time-to-fraction") {
        auto time_to = [&](const Trajectory& t) {
            const double target = fraction * t.params.n_total;
            for (const auto& s : t.samples)
                if (s.i >= target) return s.t;
            return std::numeric_limits<double>::quiet_NaN();
        };
        const double ta = time_to(a), tb = time_to(b);
        if (std::isnan(ta) || std::isnan(tb))
            throw std::runtime_error("compare: fraction never reached");
        value = std::abs(ta - tb) / tb;
    } else {
        throw CLI::ValidationError("metric must be max-rel-err or time-to-fraction");
    }
    std::cout << metric << " = " << io::fmt(value) << "\n";
    if (tol && value > *tol) return 1;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spatially correlated SI epidemic toolkit for sensor networks"};
    app.require_subcommand(1);

    // deploy
    auto* deploy = app.add_subcommand("deploy", "Generate a uniform random deployment");
    std::size_t dep_n = 200;
    double dep_w = 150.0, dep_h = 150.0, dep_rs = 4.5, dep_rt = 9.0;
    std::uint64_t dep_seed = 42;
    std::string deploy_out = "deployment.txt";
    deploy->add_option("--n", dep_n, "node count");
    deploy->add_option("--width", dep_w, "field width, m");
    deploy->add_option("--height", dep_h, "field height, m");
    deploy->add_option("--rs", dep_rs, "sensing radius, m");
    deploy->add_option("--rt", dep_rt, "transmission radius, m");
    deploy->add_option("--seed", dep_seed, "RNG seed");
    deploy->add_option("-o,--output", deploy_out, "output file");

    // correlate
    auto* correlate = app.add_subcommand("correlate", "Correlation matrix and weights");
    std::string cor_dep, cor_matrix_out, cor_weights_out;
    double cor_theta = 0.0;
    correlate->add_option("--deployment", cor_dep, "deployment file")->required();
    correlate->add_option("--theta", cor_theta, "kernel support (default 2*rs)");
    correlate->add_option("--matrix", cor_matrix_out, "matrix CSV output");
    correlate->add_option("--weights", cor_weights_out, "weights CSV output");

    // ode / closed-form share a flag set
    std::string model_name = "correlated";
    SiParams si;
    si.lambda = 0.5;
    si.p = 0.1;
    double t_end = 20.0, ode_dt = 1e-3;
    std::string traj_out = "trajectory.csv";
    auto add_model_flags = [&](CLI::App* cmd) {
        cmd->add_option("--model", model_name, "baseline|antivirus|correlated");
        cmd->add_option("--beta", si.beta, "infection rate");
        cmd->add_option("--sigma", si.sigma, "node density");
        cmd->add_option("--rt", si.r_t, "transmission radius");
        cmd->add_option("--n", si.n_total, "node count N");
        cmd->add_option("--w-theta", si.w_theta, "correlation weight");
        cmd->add_option("--lambda", si.lambda, "maintenance rate");
        cmd->add_option("--p", si.p, "cured fraction per maintenance");
        cmd->add_option("--i0", si.i0, "initial infected count");
        cmd->add_option("--t-end", t_end, "end time");
        cmd->add_option("--dt", ode_dt, "step size");
        cmd->add_option("-o,--output", traj_out, "trajectory CSV");
    };
    auto* ode = app.add_subcommand("ode", "Integrate a model variant with RK4");
    add_model_flags(ode);
    auto* closed = app.add_subcommand("closed-form", "Sample the closed-form solution");
    add_model_flags(closed);

    // cluster
    auto* cluster = app.add_subcommand("cluster", "Correlation set construction");
    std::string clu_dep, clu_out = "clusters";
    double clu_xi = 0.5;
    std::string clu_linkage = "average";
    cluster->add_option("--deployment", clu_dep, "deployment file")->required();
    cluster->add_option("--xi", clu_xi, "correlation threshold");
    cluster->add_option("--linkage", clu_linkage, "average|complete|single");
    cluster->add_option("-o,--output", clu_out, "output prefix");

    // abm
    auto* abm_cmd = app.add_subcommand("abm", "Stochastic agent-based simulation");
    std::string abm_dep, abm_out = "abm";
    std::uint64_t abm_steps = 200, abm_reps = 20, abm_seed = 1;
    std::string abm_mode = "uniform";
    double abm_event_radius = 15.0, abm_dt = 0.05;
    double abm_beta = 0.3, abm_lambda = 0.0, abm_p = 0.0;
    std::optional<double> abm_threshold;
    double abm_xi = 0.5;
    bool abm_save_reps = false, abm_save_audit = false;
    abm_cmd->add_option("--deployment", abm_dep, "deployment file")->required();
    abm_cmd->add_option("--steps", abm_steps, "steps per replication");
    abm_cmd->add_option("--replications", abm_reps, "replication count");
    abm_cmd->add_option("--seed", abm_seed, "base seed");
    abm_cmd->add_option("--mode", abm_mode, "uniform|correlated");
    abm_cmd->add_option("--event-radius", abm_event_radius, "false-event radius");
    abm_cmd->add_option("--dt", abm_dt, "step length in time units");
    abm_cmd->add_option("--beta", abm_beta, "infection rate");
    abm_cmd->add_option("--lambda", abm_lambda, "maintenance rate");
    abm_cmd->add_option("--p", abm_p, "cured fraction per maintenance");
    abm_cmd->add_option("--control-threshold", abm_threshold,
                        "infected fraction that triggers quarantine");
    abm_cmd->add_option("--control-xi", abm_xi, "clustering threshold for control");
    abm_cmd->add_flag("--save-replications", abm_save_reps, "per-replication CSVs");
    abm_cmd->add_flag("--save-audit", abm_save_audit, "transmission audit log");
    abm_cmd->add_option("-o,--output", abm_out, "output prefix");

    // tables rcc
    auto* tables = app.add_subcommand("tables", "Analytic reference tables");
    auto* rcc = tables->add_subcommand("rcc", "Cluster radius grid over r_t and xi");
    std::vector<double> rcc_rt{9, 12, 15, 18, 21, 24};
    std::vector<double> rcc_xi{0.2, 0.4, 0.5, 0.6, 0.8};
    std::string rcc_convention = "doubled", rcc_out = "rcc_table.csv";
    rcc->add_option("--rt", rcc_rt, "r_t values");
    rcc->add_option("--xi", rcc_xi, "xi values");
    rcc->add_option("--convention", rcc_convention, "paper-eq|doubled");
    rcc->add_option("-o,--output", rcc_out, "output CSV");

    // compare
    auto* compare = app.add_subcommand("compare", "Compare two trajectory CSVs");
    std::string cmp_a, cmp_b, cmp_metric = "max-rel-err";
    double cmp_fraction = 0.5;
    std::optional<double> cmp_tol;
    compare->add_option("a", cmp_a, "first trajectory")->required();
    compare->add_option("b", cmp_b, "second trajectory")->required();
    compare->add_option("--metric", cmp_metric, "max-rel-err|time-to-fraction");
    compare->add_option("--fraction", cmp_fraction, "fraction for time-to-fraction");
    compare->add_option("--tol", cmp_tol, "exit nonzero when metric exceeds this");

    // reproduce
    auto* reproduce = app.add_subcommand("reproduce", "Run the full figure/table suite");
    std::string rep_config, rep_out = "reproduce_out";
    bool rep_plots = false;
    reproduce->add_option("--config", rep_config, "scenario JSON (or a prior manifest)");
    reproduce->add_option("-o,--output", rep_out, "output directory");
    reproduce->add_flag("--plots", rep_plots, "emit SVG overlays");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*deploy) {
            auto dep = generate_deployment(dep_n, dep_w, dep_h, dep_rs, dep_rt, dep_seed);
            for (const auto& warning : dep.validate())
                std::cerr << "warning: " << warning << "\n";
            io::save_deployment(dep, resolve_out(deploy_out).string());
        } else if (*correlate) {
            auto dep = io::load_deployment(cor_dep);
            const double theta = cor_theta > 0.0 ? cor_theta : 2.0 * dep.r_s;
            auto m = build_matrix(dep, KernelParams{theta});
            if (!cor_matrix_out.empty())
                io::save_matrix_csv(m, resolve_out(cor_matrix_out).string());
            auto w = weights(m);
            if (!cor_weights_out.empty())
                io::save_weights_csv(w, resolve_out(cor_weights_out).string());
            std::cout << "w_theta = " << io::fmt(w.w_theta) << "\n";
        } else if (*ode) {
            const auto kind = model_kind_from_string(model_name);
            io::save_trajectory_csv(integrate(kind, si, t_end, ode_dt),
                                    resolve_out(traj_out).string());
        } else if (*closed) {
            const auto kind = model_kind_from_string(model_name);
            io::save_trajectory_csv(closed_form_trajectory(kind, si, t_end, ode_dt),
                                    resolve_out(traj_out).string());
        } else if (*cluster) {
            auto dep = io::load_deployment(clu_dep);
            auto m = build_matrix(dep, KernelParams{2.0 * dep.r_s});
            auto result = build_sets(dep, m, clu_xi, linkage_from_string(clu_linkage));
            io::save_clusters_csv(result, resolve_out(clu_out + "_members.csv").string(),
                                  resolve_out(clu_out + "_summary.csv").string());
            std::cout << result.sets.size() << " sets, " << result.singletons.size()
                      << " singletons\n";
        } else if (*rcc) {
            auto table =
                cluster_radius_table(rcc_rt, rcc_xi, convention_from_string(rcc_convention));
            io::save_rcc_table_csv(table, resolve_out(rcc_out).string());
        } else if (*abm_cmd) {
            auto dep = io::load_deployment(abm_dep);
            auto m = build_matrix(dep, KernelParams{2.0 * dep.r_s});
            AbmConfig cfg;
            cfg.deployment = &dep;
            cfg.si.beta = abm_beta;
            cfg.si.sigma = dep.density();
            cfg.si.r_t = dep.r_t;
            cfg.si.n_total = static_cast<double>(dep.size());
            cfg.si.w_theta = weights(m).w_theta;
            cfg.si.lambda = abm_lambda;
            cfg.si.p = abm_p;
            cfg.steps = abm_steps;
            cfg.replications = abm_reps;
            cfg.base_seed = abm_seed;
            cfg.mode = abm_mode == "correlated" ? InfectionMode::Correlated
                                                : InfectionMode::Uniform;
            cfg.matrix = &m;
            cfg.event_radius = abm_event_radius;
            cfg.dt = abm_dt;
            ClusterResult clusters;
            if (abm_threshold) {
                clusters = build_sets(dep, m, abm_xi);
                cfg.control = ControlConfig{*abm_threshold, &clusters};
            }
            std::vector<TransmissionEvent> audit;
            auto result = run(cfg, abm_save_audit ? &audit : nullptr);
            io::save_abm_csv(result, cfg.dt, resolve_out(abm_out + "_mean.csv").string());
            std::ofstream js(resolve_out(abm_out + "_summary.json"));
            js << io::abm_summary_json(result);
            if (abm_save_reps)
                io::save_abm_replications_csv(result, cfg.dt,
                                              resolve_out(abm_out + "_").string());
            if (abm_save_audit)
                io::save_audit_log(audit, resolve_out(abm_out + "_audit.csv").string());
        } else if (*compare) {
            return do_compare(cmp_a, cmp_b, cmp_metric, cmp_fraction, cmp_tol);
        } else if (*reproduce) {
            ScenarioConfig cfg;
            if (!rep_config.empty()) {
                std::ifstream in(rep_config);
                if (!in) throw std::runtime_error("cannot read config: " + rep_config);
                ordered_json j = ordered_json::parse(in);
                j.erase("notes");  // manifests carry a notes block; configs need not
                cfg = parse_scenario(j);
            }
            if (rep_plots) cfg.plots = true;
            run_scenario(cfg, resolve_out(rep_out));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
