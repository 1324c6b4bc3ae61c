#include "lcpg/bench.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "lcpg/ipm.hpp"
#include "lcpg/smoothing.hpp"

namespace lcpg {

namespace {

SmoothOracle sparse_quadratic_oracle(std::shared_ptr<const SparseMat> Q, Vector b, double offset) {
    SmoothOracle o;
    o.dim = b.size();
    o.eval = [Q = std::move(Q), b = std::move(b), offset](const Vector& x) {
        Vector Qx = *Q * x;
        return SmoothEval{0.5 * x.dot(Qx) + b.dot(x) + offset, Qx + b};
    };
    return o;
}

SparseMat random_sparse_factor(Index n, double density, Rng& rng) {
    std::vector<Eigen::Triplet<double>> trip;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            const double u = rng.uniform();
            if (u < density) trip.push_back({static_cast<int>(i), static_cast<int>(j), rng.uniform()});
        }
    SparseMat V(n, n);
    V.setFromTriplets(trip.begin(), trip.end());
    return V;
}

}  // namespace

double power_iteration_lmax(const SparseMat& A, int iters, std::uint64_t seed) {
    Rng rng(seed, 17);
    Vector v = rng.normal_vector(A.rows());
    v.normalize();
    for (int t = 0; t < iters; ++t) {
        Vector w = A * v;
        const double n = w.norm();
        if (n < 1e-300) return 0.0;
        v = w / n;
    }
    return std::abs(v.dot(A * v));
}

QcqpInstance gen_qcqp(const QcqpRecipe& recipe) {
    if (recipe.m < 1) throw StructuralError("gen_qcqp: m must be >= 1");
    QcqpInstance inst;
    inst.recipe = recipe;
    Rng rng(recipe.seed, 3);
    const Index n = recipe.n;
    for (int i = 0; i < recipe.m; ++i) {  // index 0: objective, 1..m-1: constraints
        SparseMat P;
        double lmax = 0.0;
        for (int redraw = 0; redraw < 200; ++redraw) {  // regenerate degenerate draws
            SparseMat V = random_sparse_factor(n, recipe.density, rng);
            Vector D(n);
            for (Index j = 0; j < n; ++j) D[j] = rng.uniform(recipe.eig_lo, recipe.eig_hi);
            P = V * SparseMat(D.asDiagonal()) * SparseMat(V.transpose());
            lmax = power_iteration_lmax(P, 20, recipe.seed + static_cast<std::uint64_t>(i));
            if (lmax > 1e-4) break;
        }
        if (!(lmax > 1e-4)) throw SolverError("gen_qcqp: could not draw a nondegenerate factor");
        double L = 1.01 * lmax;
        if (recipe.dc) {
            SparseMat I(n, n);
            I.setIdentity();
            P = P - recipe.dc_shift * I;
            L += recipe.dc_shift;
        }
        P.makeCompressed();
        inst.Q.push_back(std::move(P));
        inst.b.push_back(Vector(recipe.b_shift * Vector::Ones(n) + rng.normal_vector(n)));
        inst.L.push_back(L);
    }
    return inst;
}

ConstrainedProblem make_problem(const QcqpInstance& inst) {
    const QcqpRecipe& r = inst.recipe;
    const Index n = r.n;

    Composite objective;
    objective.smooth =
        sparse_quadratic_oracle(std::make_shared<SparseMat>(inst.Q[0]), inst.b[0], 0.0);
    objective.lipschitz = inst.L[0];
    std::vector<std::pair<double, ProxTerm>> chi0_terms;
    if (r.alpha > 0.0) chi0_terms.push_back({1.0, ProxTerm::l1(r.alpha)});
    chi0_terms.push_back({1.0, ProxTerm::ball(r.ball_radius)});
    objective.chi = ProxTerm::weighted_sum(std::move(chi0_terms));

    std::vector<Composite> constraints;
    for (int i = 1; i < r.m; ++i) {
        Composite c;
        c.smooth = sparse_quadratic_oracle(std::make_shared<SparseMat>(inst.Q[static_cast<size_t>(i)]),
                                           inst.b[static_cast<size_t>(i)], r.c_offset);
        c.lipschitz = inst.L[static_cast<size_t>(i)];
        constraints.push_back(std::move(c));
    }
    const Index mq = static_cast<Index>(constraints.size());
    Vector eta = Vector::Zero(mq);
    Vector eta0 = Vector::Constant(mq, -r.eta0_gap);
    return ConstrainedProblem(std::move(objective), std::move(constraints), std::move(eta), std::move(eta0),
                              Vector::Zero(n), 0.0,
                              r.dc ? ConstrainedProblem::Mode::Nonconvex : ConstrainedProblem::Mode::Convex);
}

std::string serialize(const QcqpInstance& inst) {
    std::ostringstream os;
    const QcqpRecipe& r = inst.recipe;
    os << "qcqp n=" << r.n << " m=" << r.m << " dc=" << (r.dc ? 1 : 0) << " density="
       << format_double(r.density) << " eig=[" << format_double(r.eig_lo) << ',' << format_double(r.eig_hi)
       << "] b_shift=" << format_double(r.b_shift) << " c=" << format_double(r.c_offset)
       << " ball_r=" << format_double(r.ball_radius) << " alpha=" << format_double(r.alpha)
       << " dc_shift=" << format_double(r.dc_shift) << " seed=" << r.seed << '\n';
    for (size_t i = 0; i < inst.Q.size(); ++i) {
        os << "Q" << i << " L=" << format_double(inst.L[i]) << '\n';
        const SparseMat& Q = inst.Q[i];
        for (int k = 0; k < Q.outerSize(); ++k)
            for (SparseMat::InnerIterator it(Q, k); it; ++it)
                os << it.row() << ',' << it.col() << ',' << format_double(it.value()) << '\n';
        os << "b" << i;
        for (Index j = 0; j < inst.b[i].size(); ++j) os << ' ' << format_double(inst.b[i][j]);
        os << '\n';
    }
    return os.str();
}

ConstrainedProblem make_strongly_convex_qcqp(int d, int m, double mu0, double L0, std::uint64_t seed) {
    if (!(mu0 > 0.0 && mu0 < L0)) throw StructuralError("make_strongly_convex_qcqp: need 0 < mu0 < L0");
    Rng rng(seed, 11);
    Matrix G(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) G(i, j) = rng.normal();
    Eigen::HouseholderQR<Matrix> qr(G);
    Matrix U = qr.householderQ();
    Vector eigs(d);
    for (int j = 0; j < d; ++j)
        eigs[j] = mu0 + (L0 - mu0) * static_cast<double>(j) / std::max(1, d - 1);
    Matrix A = U * eigs.asDiagonal() * U.transpose();
    A = 0.5 * (A + A.transpose());

    Vector b0 = rng.normal_vector(d);
    b0 *= 2.0 / b0.norm();
    const Vector x_u = A.ldlt().solve(-b0);  // unconstrained minimizer
    const double ru = x_u.norm();
    const Vector dir = x_u / ru;

    Composite objective;
    std::shared_ptr<Matrix> Ap = std::make_shared<Matrix>(A);
    objective.smooth.dim = d;
    objective.smooth.eval = [Ap, b0](const Vector& x) {
        Vector Ax = *Ap * x;
        return SmoothEval{0.5 * x.dot(Ax) + b0.dot(x), Ax + b0};
    };
    objective.lipschitz = L0;

    // nearly linear constraints (tiny curvature, huge far-centered balls whose
    // boundaries cut the segment to the minimizer); the first is active at the
    // optimum, the rest stay slack, and the dual term B ||L|| stays negligible
    std::vector<Composite> cons;
    Vector eta(m), eta0(m);
    const double q = 0.04;
    for (int i = 0; i < m; ++i) {
        const double Rc = 50.0 * ru;
        const double cut = (0.5 + 2.0 * i) * ru;  // boundary crossing along dir
        Vector center = -Rc * dir;
        Composite c;
        c.smooth = quadratic_oracle(q, center);
        c.lipschitz = q;
        cons.push_back(std::move(c));
        eta[i] = 0.5 * q * (Rc + cut) * (Rc + cut);
        const double at_zero = 0.5 * q * Rc * Rc;
        eta0[i] = at_zero + 0.5 * (eta[i] - at_zero);
    }
    return ConstrainedProblem(std::move(objective), std::move(cons), std::move(eta), std::move(eta0),
                              Vector::Zero(d), mu0, ConstrainedProblem::Mode::StronglyConvex);
}

SparseDataset parse_svmlight(std::istream& in, std::optional<double> positive_class) {
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<double> labels;
    std::string line;
    Index max_col = 0;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;  // blank line
        size_t pos = 0;
        double label = 0.0;
        try {
            label = std::stod(tok, &pos);
        } catch (const std::exception&) {
            throw StructuralError("svmlight parse error at line " + std::to_string(line_no) + ": bad label");
        }
        if (pos != tok.size())
            throw StructuralError("svmlight parse error at line " + std::to_string(line_no) + ": bad label");
        if (positive_class)
            label = label == *positive_class ? 1.0 : -1.0;
        else if (label != 1.0 && label != -1.0)
            throw StructuralError("svmlight parse error at line " + std::to_string(line_no) +
                                  ": labels must be +1/-1 (or pass a positive class)");
        const Index row = static_cast<Index>(labels.size());
        labels.push_back(label);
        long prev_idx = 0;
        while (ls >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos)
                throw StructuralError("svmlight parse error at line " + std::to_string(line_no) +
                                      ": expected idx:value, got '" + tok + "'");
            long idx = 0;
            double val = 0.0;
            try {
                idx = std::stol(tok.substr(0, colon), &pos);
                if (pos != colon) throw std::invalid_argument("");
                const std::string vs = tok.substr(colon + 1);
                val = std::stod(vs, &pos);
                if (pos != vs.size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw StructuralError("svmlight parse error at line " + std::to_string(line_no) +
                                      ": bad pair '" + tok + "'");
            }
            if (idx <= prev_idx)
                throw StructuralError("svmlight parse error at line " + std::to_string(line_no) +
                                      ": indices must be 1-based strictly increasing");
            prev_idx = idx;
            max_col = std::max(max_col, static_cast<Index>(idx));
            trip.push_back({static_cast<int>(row), static_cast<int>(idx - 1), val});
        }
    }
    if (labels.empty()) throw StructuralError("svmlight parse error: empty file");
    SparseDataset ds;
    ds.X.resize(static_cast<Index>(labels.size()), max_col);
    ds.X.setFromTriplets(trip.begin(), trip.end());
    ds.y.resize(static_cast<Index>(labels.size()));
    for (size_t i = 0; i < labels.size(); ++i) ds.y[static_cast<Index>(i)] = labels[i];
    return ds;
}

SparseDataset load_sparse_dataset(const std::string& path, std::optional<double> positive_class) {
    std::ifstream in(path);
    if (!in) throw StructuralError("load_sparse_dataset: cannot open " + path);
    return parse_svmlight(in, positive_class);
}

void save_svmlight(const SparseDataset& data, std::ostream& out) {
    for (Index i = 0; i < data.n(); ++i) {
        out << format_double(data.y[i]);
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(data.X, i); it; ++it)
            out << ' ' << it.col() + 1 << ':' << format_double(it.value());
        out << '\n';
    }
}

LogisticOracle logistic_oracle(const SparseDataset& data) {
    auto ds = std::make_shared<SparseDataset>(data);
    const Index n = ds->n();
    const Index d = ds->d();
    double max_row_sq = 0.0;
    for (Index i = 0; i < n; ++i) {
        double sq = 0.0;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(ds->X, i); it; ++it)
            sq += it.value() * it.value();
        max_row_sq = std::max(max_row_sq, sq);
    }

    auto component = [ds](Index i, const Vector& x) {
        double t = 0.0;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(ds->X, i); it; ++it)
            t += it.value() * x[it.col()];
        t *= ds->y[i];
        double value, sig_neg;  // sig_neg = sigma(-t) = 1 / (1 + e^t)
        if (t >= 0.0) {
            const double e = std::exp(-t);
            value = std::log1p(e);
            sig_neg = e / (1.0 + e);
        } else {
            value = -t + std::log1p(std::exp(t));
            sig_neg = 1.0 / (1.0 + std::exp(t));
        }
        Vector g = Vector::Zero(ds->X.cols());
        const double coef = -ds->y[i] * sig_neg;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(ds->X, i); it; ++it)
            g[it.col()] = coef * it.value();
        return SmoothEval{value, std::move(g)};
    };

    LogisticOracle out;
    out.L0 = max_row_sq / 4.0;
    out.oracle.dim = d;
    out.oracle.n_components = n;
    out.oracle.component_eval = component;
    out.oracle.eval = [component, n, d](const Vector& x) {
        SmoothEval acc{0.0, Vector::Zero(d)};
        for (Index i = 0; i < n; ++i) {
            SmoothEval e = component(i, x);
            acc.value += e.value;
            acc.gradient += e.gradient;
        }
        acc.value /= static_cast<double>(n);
        acc.gradient /= static_cast<double>(n);
        return acc;
    };
    return out;
}

ScadConstraint scad_constraint(double beta, double theta, Index d, double sigma, bool surrogate) {
    ScadParams params(beta, theta);
    ScadConstraint out;
    out.eta1 = sigma * static_cast<double>(d);
    out.composite.chi = ProxTerm::l1(beta);
    out.composite.lipschitz = params.smoothness();
    out.composite.concave_smooth = surrogate;
    out.composite.smooth.dim = d;
    out.composite.smooth.eval = [params, d](const Vector& x) {
        double v = 0.0;
        Vector g(d);
        for (Index j = 0; j < d; ++j) {
            v -= scad_value(x[j], params);
            g[j] = -scad_grad(x[j], params);
        }
        return SmoothEval{v, std::move(g)};
    };
    return out;
}

SparseDataset gen_synthetic_logistic(Index n, Index d, std::uint64_t seed) {
    Rng rng(seed, 5);
    Vector w = Vector::Zero(d);
    const Index support = std::max<Index>(1, d / 10);
    for (Index j = 0; j < support; ++j) w[j] = rng.uniform() < 0.5 ? 2.0 : -2.0;
    SparseDataset ds;
    std::vector<Eigen::Triplet<double>> trip;
    ds.y.resize(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (Index i = 0; i < n; ++i) {
        double margin = 0.0;
        for (Index j = 0; j < d; ++j) {
            const double v = rng.normal() * scale;
            trip.push_back({static_cast<int>(i), static_cast<int>(j), v});
            margin += v * w[j];
        }
        const double noisy = margin + 0.3 * rng.normal();
        ds.y[i] = noisy >= 0.0 ? 1.0 : -1.0;
    }
    ds.X.resize(n, d);
    ds.X.setFromTriplets(trip.begin(), trip.end());
    return ds;
}

ConstrainedProblem make_scad_problem(const SparseDataset& data, double beta, double theta, double sigma,
                                     bool surrogate) {
    LogisticOracle lo = logistic_oracle(data);
    Composite objective;
    objective.smooth = std::move(lo.oracle);
    objective.lipschitz = lo.L0;
    ScadConstraint sc = scad_constraint(beta, theta, data.d(), sigma, surrogate);
    Vector eta = Vector::Constant(1, sc.eta1);
    Vector eta0 = Vector::Constant(1, sc.eta1 / 2.0);
    return ConstrainedProblem(std::move(objective), {std::move(sc.composite)}, std::move(eta),
                              std::move(eta0), Vector::Zero(data.d()));
}

void write_result_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
    os << "experiment,seed,n,m,method,objective,dual_norm,max_dual_norm,time_s,effective_passes,status\n";
    for (const auto& r : rows) {
        os << r.experiment << ',' << r.seed << ',' << r.n << ',' << r.m << ',' << r.method << ','
           << format_double(r.objective) << ',' << format_double(r.dual_norm) << ','
           << format_double(r.max_dual_norm) << ',' << format_double(r.time_s) << ','
           << format_double(r.effective_passes) << ',' << r.status << '\n';
    }
}

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed, const std::string& ctx) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw StructuralError("unknown key '" + it.key() + "' in " + ctx);
    }
}

}  // namespace

ExperimentSpec parse_experiment_spec(const std::string& json_text) {
    json j = json::parse(json_text);
    reject_unknown_keys(j,
                        {"experiment", "name", "methods", "seeds", "k", "workers", "out_dir", "measure_time",
                         "n", "m", "convexity", "density", "alpha", "ball_radius", "b_shift", "c_offset",
                         "eta0_gap", "n_samples", "dim", "beta", "theta", "sigma", "dataset_path",
                         "positive_class"},
                        "experiment spec");
    ExperimentSpec spec;
    spec.experiment = j.at("experiment").get<std::string>();
    if (spec.experiment != "qcqp" && spec.experiment != "scad")
        throw StructuralError("experiment must be 'qcqp' or 'scad'");
    spec.name = j.value("name", spec.experiment);
    for (const auto& m : j.at("methods")) spec.methods.push_back(m.get<std::string>());
    if (spec.methods.empty()) throw StructuralError("experiment spec: empty method list");
    if (j.contains("seeds")) {
        if (j["seeds"].is_number()) {
            const int count = j["seeds"].get<int>();
            for (int s = 0; s < count; ++s) spec.seeds.push_back(static_cast<std::uint64_t>(s + 1));
        } else {
            for (const auto& s : j["seeds"]) spec.seeds.push_back(s.get<std::uint64_t>());
        }
    } else {
        spec.seeds = {1};
    }
    spec.K = j.value("k", 100);
    spec.workers = j.value("workers", 1);
    spec.out_dir = j.value("out_dir", ".");
    spec.measure_time = j.value("measure_time", false);
    spec.recipe.n = j.value("n", 50);
    spec.recipe.m = j.value("m", 5);
    spec.recipe.dc = j.value("convexity", "convex") == std::string("dc");
    spec.recipe.density = j.value("density", 0.01);
    spec.recipe.alpha = j.value("alpha", 1.0);
    if (j.contains("ball_radius")) spec.recipe.ball_radius = j["ball_radius"].get<double>();
    spec.recipe.b_shift = j.value("b_shift", 10.0);
    spec.recipe.c_offset = j.value("c_offset", -10.0);
    spec.recipe.eta0_gap = j.value("eta0_gap", 5.0);
    spec.n_samples = j.value("n_samples", 200);
    spec.dim = j.value("dim", 50);
    spec.beta = j.value("beta", 2.0);
    spec.theta = j.value("theta", 5.0);
    spec.sigma = j.value("sigma", 0.4);
    spec.dataset_path = j.value("dataset_path", "");
    if (j.contains("positive_class")) spec.positive_class = j["positive_class"].get<double>();
    return spec;
}

namespace {

RunConfig config_for_method(const std::string& method, const std::string& experiment, int K,
                            std::uint64_t seed, bool measure_time) {
    RunConfig cfg;
    cfg.K = K;
    cfg.seed = seed;
    cfg.measure_time = measure_time;
    const bool scad = experiment == "scad";
    const SubsolverKind deflt = scad ? SubsolverKind::ScadSpecial : SubsolverKind::FirstOrder;
    if (method == "lcpg") {
        cfg.mode = RunMode::Exact;
        cfg.subsolver = deflt;
    } else if (method == "lcpg-ipm") {
        cfg.mode = RunMode::Exact;
        cfg.subsolver = SubsolverKind::Ipm;
    } else if (method == "lcpg-pd") {
        cfg.mode = RunMode::Exact;
        cfg.subsolver = SubsolverKind::FirstOrder;
    } else if (method == "lcpg-inexact") {
        cfg.mode = RunMode::Inexact;
        cfg.subsolver = SubsolverKind::FirstOrder;
    } else if (method == "lcspg") {
        cfg.mode = RunMode::Stochastic;
        cfg.subsolver = deflt;
    } else if (method == "lcsvrg") {
        cfg.mode = RunMode::Svrg;
        cfg.subsolver = deflt;
    } else {
        throw StructuralError("unknown method '" + method + "'");
    }
    return cfg;
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentSpec& spec) {
    struct Cell {
        std::string method;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (const auto& m : spec.methods)
        for (auto s : spec.seeds) cells.push_back({m, s});

    ExperimentOutput out;
    out.rows.resize(cells.size());
    out.trace_paths.resize(cells.size());

    auto run_cell = [&](size_t idx) {
        const Cell& cell = cells[idx];
        ResultRow row;
        row.experiment = spec.name;
        row.seed = cell.seed;
        row.method = cell.method;
        const auto tic = std::chrono::steady_clock::now();
        try {
            RunConfig cfg = config_for_method(cell.method, spec.experiment, spec.K, cell.seed,
                                              spec.measure_time);
            LevelSchedule schedule = LevelSchedule::polynomial();
            ConstrainedProblem problem = [&]() {
                if (spec.experiment == "qcqp") {
                    QcqpRecipe recipe = spec.recipe;
                    recipe.seed = cell.seed;
                    return make_problem(gen_qcqp(recipe));
                }
                SparseDataset data = spec.dataset_path.empty()
                                         ? gen_synthetic_logistic(spec.n_samples, spec.dim, cell.seed)
                                         : load_sparse_dataset(spec.dataset_path, spec.positive_class);
                return make_scad_problem(data, spec.beta, spec.theta, spec.sigma);
            }();
            row.n = problem.dim();
            row.m = problem.n_constraints();
            RunResult run = lcpg_run(problem, cfg, schedule);
            row.objective = run.obj_final;
            row.dual_norm = run.records.back().dual_norm;
            row.max_dual_norm = run.Bhat;
            const long n_comp = problem.objective().smooth.n_components;
            row.effective_passes =
                static_cast<double>(run.grad_full) +
                (n_comp > 0 ? static_cast<double>(run.grad_stoch) / static_cast<double>(n_comp) : 0.0);
            const std::string path = spec.out_dir + "/trace_" + spec.name + "_" + cell.method + "_seed" +
                                     std::to_string(cell.seed) + ".csv";
            std::ofstream tf(path);
            write_trace_csv(tf, run);
            out.trace_paths[idx] = path;
        } catch (const std::exception& e) {
            row.status = std::string("error: ") + e.what();
        }
        row.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - tic).count();
        out.rows[idx] = std::move(row);
    };

    const int workers = std::max(1, spec.workers);
    if (workers == 1) {
        for (size_t i = 0; i < cells.size(); ++i) run_cell(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&]() {
                for (size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) run_cell(i);
            });
        for (auto& t : pool) t.join();
    }

    std::ofstream rf(spec.out_dir + "/results_" + spec.name + ".csv");
    write_result_csv(rf, out.rows);
    return out;
}

void emit_plotdata(const std::vector<std::string>& trace_paths, const std::string& x_axis, std::ostream& out,
                   Index n_components) {
    if (trace_paths.empty()) throw StructuralError("emit_plotdata: no traces given");
    if (x_axis != "iteration" && x_axis != "effective_passes")
        throw StructuralError("emit_plotdata: x axis must be 'iteration' or 'effective_passes'");
    out << "series,x,y\n";
    std::string expected_header;
    for (const auto& path : trace_paths) {
        std::ifstream in(path);
        if (!in) throw StructuralError("emit_plotdata: cannot open " + path);
        std::string header;
        std::getline(in, header);
        if (expected_header.empty())
            expected_header = header;
        else if (header != expected_header)
            throw StructuralError("emit_plotdata: mismatched trace schemas (" + path + ")");
        std::string stem = path;
        const auto slash = stem.find_last_of('/');
        if (slash != std::string::npos) stem.erase(0, slash + 1);
        const auto dot = stem.find_last_of('.');
        if (dot != std::string::npos) stem.erase(dot);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::vector<std::string> cols;
            std::stringstream ls(line);
            std::string c;
            while (std::getline(ls, c, ',')) cols.push_back(c);
            if (cols.size() < 12) throw StructuralError("emit_plotdata: short row in " + path);
            const double k = std::stod(cols[0]);
            const double obj = std::stod(cols[1]);
            double x = k;
            if (x_axis == "effective_passes") {
                const double full = std::stod(cols[8]);
                const double stoch = std::stod(cols[9]);
                x = n_components > 0 ? full + stoch / static_cast<double>(n_components) : full;
            }
            out << stem << ',' << format_double(x) << ',' << format_double(obj) << '\n';
        }
    }
}

}  // namespace lcpg
