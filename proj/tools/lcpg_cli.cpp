#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "lcpg/bench.hpp"
#include "lcpg/drivers.hpp"

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw lcpg::StructuralError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void reject_unknown(const json& j, const std::vector<std::string>& allowed) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw lcpg::StructuralError("unknown key '" + it.key() + "' in problem file");
}

struct LoadedProblem {
    lcpg::ConstrainedProblem problem;
    std::string kind;
};

LoadedProblem load_problem(const std::string& path, std::uint64_t seed) {
    json j = json::parse(read_file(path));
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "qcqp") {
        reject_unknown(j, {"kind", "n", "m", "convexity", "alpha", "density", "ball_radius", "b_shift",
                           "c_offset", "eta0_gap", "seed"});
        lcpg::QcqpRecipe r;
        r.n = j.value("n", 50);
        r.m = j.value("m", 5);
        r.dc = j.value("convexity", "convex") == std::string("dc");
        r.alpha = j.value("alpha", 1.0);
        r.density = j.value("density", 0.01);
        if (j.contains("ball_radius")) r.ball_radius = j["ball_radius"].get<double>();
        r.b_shift = j.value("b_shift", 10.0);
        r.c_offset = j.value("c_offset", -10.0);
        r.eta0_gap = j.value("eta0_gap", 5.0);
        r.seed = j.value("seed", seed);
        return {lcpg::make_problem(lcpg::gen_qcqp(r)), kind};
    }
    if (kind == "scad_synthetic") {
        reject_unknown(j, {"kind", "n_samples", "dim", "beta", "theta", "sigma", "seed", "surrogate"});
        lcpg::SparseDataset data = lcpg::gen_synthetic_logistic(
            j.value("n_samples", 200), j.value("dim", 50), j.value("seed", seed));
        return {lcpg::make_scad_problem(data, j.value("beta", 2.0), j.value("theta", 5.0),
                                        j.value("sigma", 0.4), j.value("surrogate", true)),
                kind};
    }
    if (kind == "scad_dataset") {
        reject_unknown(j, {"kind", "path", "beta", "theta", "sigma", "positive_class", "surrogate"});
        std::optional<double> pos;
        if (j.contains("positive_class")) pos = j["positive_class"].get<double>();
        lcpg::SparseDataset data = lcpg::load_sparse_dataset(j.at("path").get<std::string>(), pos);
        return {lcpg::make_scad_problem(data, j.value("beta", 2.0), j.value("theta", 5.0),
                                        j.value("sigma", 0.4), j.value("surrogate", true)),
                kind};
    }
    throw lcpg::StructuralError("unknown problem kind '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Level constrained proximal gradient solver"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "run one method on a problem file and write its trace");
    std::string problem_path, method = "lcpg", subsolver = "auto", out_path = "trace.csv";
    int K = 100;
    std::uint64_t seed = 1;
    bool timing = false;
    solve->add_option("problem", problem_path, "problem JSON file")->required();
    solve->add_option("--method", method)->check(CLI::IsMember({"lcpg", "lcspg", "lcsvrg", "lcpg-inexact"}));
    solve->add_option("--subsolver", subsolver)->check(CLI::IsMember({"auto", "ipm", "pd", "scad"}));
    solve->add_option("--K", K, "iteration budget");
    solve->add_option("--seed", seed);
    solve->add_option("--out", out_path, "trace CSV path");
    solve->add_flag("--timing", timing, "record wall-clock per iteration (breaks byte determinism)");

    // bench
    auto* bench = app.add_subcommand("bench", "run an experiment grid from a spec file");
    std::string family, spec_path;
    int workers = 0;
    bench->add_option("family", family, "qcqp|scad")->required()->check(CLI::IsMember({"qcqp", "scad"}));
    bench->add_option("spec", spec_path, "experiment spec JSON")->required();
    bench->add_option("--workers", workers, "concurrent grid cells");

    // check
    auto* check = app.add_subcommand("check", "run the invariant battery (exit 0 on pass)");

    // plot
    auto* plot = app.add_subcommand("plot", "emit long-format plot data from trace CSVs");
    std::vector<std::string> traces;
    std::string x_axis = "iter", plot_out = "plot.csv";
    long n_components = 0;
    plot->add_option("traces", traces, "trace CSV files")->required();
    plot->add_option("--x", x_axis)->check(CLI::IsMember({"passes", "iter"}));
    plot->add_option("--out", plot_out)->required();
    plot->add_option("--n", n_components, "finite-sum component count for the passes axis");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            LoadedProblem loaded = load_problem(problem_path, seed);
            lcpg::RunConfig cfg;
            cfg.K = K;
            cfg.seed = seed;
            cfg.measure_time = timing;
            if (method == "lcpg")
                cfg.mode = lcpg::RunMode::Exact;
            else if (method == "lcpg-inexact")
                cfg.mode = lcpg::RunMode::Inexact;
            else if (method == "lcspg")
                cfg.mode = lcpg::RunMode::Stochastic;
            else
                cfg.mode = lcpg::RunMode::Svrg;
            if (subsolver == "auto")
                cfg.subsolver = loaded.kind == "qcqp" ? lcpg::SubsolverKind::FirstOrder
                                                      : lcpg::SubsolverKind::ScadSpecial;
            else if (subsolver == "ipm")
                cfg.subsolver = lcpg::SubsolverKind::Ipm;
            else if (subsolver == "pd")
                cfg.subsolver = lcpg::SubsolverKind::FirstOrder;
            else
                cfg.subsolver = lcpg::SubsolverKind::ScadSpecial;

            lcpg::RunResult run = lcpg::lcpg_run(loaded.problem, cfg, lcpg::LevelSchedule::polynomial());
            std::ofstream out(out_path);
            lcpg::write_trace_csv(out, run);
            std::cout << "final_obj=" << lcpg::format_double(run.obj_final)
                      << " sampled_k=" << run.k_hat
                      << " dual_norm_max=" << lcpg::format_double(run.Bhat)
                      << " kkt_surrogate=" << lcpg::format_double(run.report.stationarity_surrogate)
                      << " trace=" << out_path << '\n';
            return 0;
        }
        if (bench->parsed()) {
            lcpg::ExperimentSpec spec = lcpg::parse_experiment_spec(read_file(spec_path));
            if (spec.experiment != family)
                throw lcpg::StructuralError("spec experiment '" + spec.experiment +
                                            "' does not match subcommand family '" + family + "'");
            if (workers > 0) spec.workers = workers;
            lcpg::ExperimentOutput out = lcpg::run_experiment(spec);
            int failures = 0;
            for (const auto& row : out.rows)
                if (row.status != "ok") ++failures;
            std::cout << "rows=" << out.rows.size() << " failures=" << failures << " results="
                      << spec.out_dir + "/results_" + spec.name + ".csv" << '\n';
            return failures == 0 ? 0 : 1;
        }
        if (check->parsed()) {
            return lcpg::run_check_battery(std::cout) ? 0 : 1;
        }
        if (plot->parsed()) {
            std::ofstream out(plot_out);
            lcpg::emit_plotdata(traces, x_axis == "passes" ? "effective_passes" : "iteration", out,
                                n_components);
            std::cout << "wrote " << plot_out << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
