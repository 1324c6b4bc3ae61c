#pragma once

#include <Eigen/SparseCore>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lcpg/drivers.hpp"
#include "lcpg/problem.hpp"

namespace lcpg {

/// Generation recipe for the random QCQP family: sparse factors V D V^T,
/// b = shift*e + gaussian, constant constraint offset, l1-penalized objective
/// and a Euclidean ball keeping the domain compact. x = 0 is strictly
/// feasible by construction (all constraint values equal c_offset < 0).
struct QcqpRecipe {
    int n = 50;
    int m = 5;  // total constraints: m-1 random quadratics + the ball
    bool dc = false;
    double density = 0.01;
    double eig_lo = 0.0;
    double eig_hi = 100.0;
    double b_shift = 10.0;
    double c_offset = -10.0;
    double ball_radius = 4.47213595499957939;  // sqrt(20)
    double alpha = 1.0;
    double dc_shift = 10.0;
    double eta0_gap = 5.0;
    std::uint64_t seed = 0;
};

using SparseMat = Eigen::SparseMatrix<double>;

/// Materialized instance; everything needed to rebuild the problem and to
/// serialize it byte-identically.
struct QcqpInstance {
    QcqpRecipe recipe;
    std::vector<SparseMat> Q;  // index 0: objective, 1..m-1: quadratic constraints
    std::vector<Vector> b;
    std::vector<double> L;  // inflated power-iteration moduli, index-aligned with Q
};

QcqpInstance gen_qcqp(const QcqpRecipe& recipe);
ConstrainedProblem make_problem(const QcqpInstance& inst);
std::string serialize(const QcqpInstance& inst);

/// Largest-eigenvalue estimate by power iteration (deterministic start).
double power_iteration_lmax(const SparseMat& A, int iters, std::uint64_t seed);

/// Strongly convex test instance: dense quadratic objective with spectrum in
/// [mu0, L0] and diagonal quadratic constraints arranged to be active near
/// the optimum while keeping x0 = 0 strictly feasible.
ConstrainedProblem make_strongly_convex_qcqp(int d, int m, double mu0, double L0, std::uint64_t seed);

struct SparseDataset {
    Eigen::SparseMatrix<double, Eigen::RowMajor> X;
    Vector y;  // labels in {-1, +1}

    Index n() const { return X.rows(); }
    Index d() const { return X.cols(); }
};

/// svmlight-style text format: `<label> <idx>:<value> ...`, indices 1-based
/// strictly increasing, `#` starts a comment. Multiclass labels are coerced
/// through positive_class (matching label -> +1, others -> -1).
SparseDataset load_sparse_dataset(const std::string& path, std::optional<double> positive_class = {});
SparseDataset parse_svmlight(std::istream& in, std::optional<double> positive_class = {});
void save_svmlight(const SparseDataset& data, std::ostream& out);

struct LogisticOracle {
    SmoothOracle oracle;
    double L0 = 0.0;
};

/// Finite-sum logistic loss f_i(x) = log(1 + exp(-y_i <a_i, x>)) with the
/// numerically guarded evaluation and L0 = max_i ||a_i||^2 / 4.
LogisticOracle logistic_oracle(const SparseDataset& data);

struct ScadConstraint {
    Composite composite;  // chi = beta * l1, f = -sum_j h_{beta,theta}(x_j)
    double eta1 = 0.0;    // sigma * d
};

ScadConstraint scad_constraint(double beta, double theta, Index d, double sigma, bool surrogate = true);

/// Synthetic binary classification sample with a planted sparse separator.
SparseDataset gen_synthetic_logistic(Index n, Index d, std::uint64_t seed);

/// SCAD-constrained logistic problem over a dataset.
ConstrainedProblem make_scad_problem(const SparseDataset& data, double beta, double theta, double sigma,
                                     bool surrogate = true);

struct ResultRow {
    std::string experiment;
    std::uint64_t seed = 0;
    Index n = 0;
    Index m = 0;
    std::string method;
    double objective = 0.0;
    double dual_norm = 0.0;
    double max_dual_norm = 0.0;
    double time_s = 0.0;
    double effective_passes = 0.0;
    std::string status = "ok";
};

void write_result_csv(std::ostream& os, const std::vector<ResultRow>& rows);

struct ExperimentSpec {
    std::string experiment;  // "qcqp" or "scad"
    std::string name;
    std::vector<std::string> methods;
    std::vector<std::uint64_t> seeds;
    int K = 100;
    int workers = 1;
    std::string out_dir = ".";
    bool measure_time = false;
    // qcqp family
    QcqpRecipe recipe;
    // scad family
    Index n_samples = 200;
    Index dim = 50;
    double beta = 2.0;
    double theta = 5.0;
    double sigma = 0.4;
    std::string dataset_path;  // empty = synthetic
    std::optional<double> positive_class;
};

ExperimentSpec parse_experiment_spec(const std::string& json_text);

struct ExperimentOutput {
    std::vector<ResultRow> rows;
    std::vector<std::string> trace_paths;
};

/// Runs the (method x seed) grid, writing one trace CSV per cell and a
/// result-row CSV; deterministic per seed.
ExperimentOutput run_experiment(const ExperimentSpec& spec);

/// Long-format plot data (series, x, y) from trace CSVs. x_axis "iteration"
/// uses k; "effective_passes" uses grad_full + grad_stoch / n.
void emit_plotdata(const std::vector<std::string>& trace_paths, const std::string& x_axis,
                   std::ostream& out, Index n_components = 0);

/// Fast deterministic invariant battery (the `check` subcommand); prints one
/// line per check and returns true when everything passes.
bool run_check_battery(std::ostream& os);

}  // namespace lcpg
