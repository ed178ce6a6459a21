#include "mvksc/solver.hpp"

#include <Eigen/Cholesky>

#include <cassert>
#include <cmath>

#include "mvksc/metrics.hpp"
#include "mvksc/prox.hpp"
#include "mvksc/spectral.hpp"

namespace mvksc {

ConsensusMode parse_consensus_mode(const std::string& text) {
    if (text == "l1") return ConsensusMode::RobustL1;
    if (text == "fro") return ConsensusMode::Frobenius;
    throw config_error("unrecognized consensus mode '" + text + "' (expected l1 or fro)");
}

std::string to_string(ConsensusMode mode) {
    return mode == ConsensusMode::RobustL1 ? "l1" : "fro";
}

void SolverConfig::validate(int n_views) const {
    if (!(lambda >= 0.0)) throw config_error("lambda must be >= 0");
    if (!(gamma >= 0.0)) throw config_error("gamma must be >= 0");
    if (!(theta >= 0.0)) throw config_error("theta must be >= 0");
    if (k < 1) throw config_error("cluster count k must be set to a positive value");
    if (!(rho0 > 0.0)) throw config_error("rho0 must be positive");
    if (!(rho_mult >= 1.0)) throw config_error("rho_mult must be >= 1");
    if (!(rho_cap > 0.0)) throw config_error("rho_cap must be positive (use inf for uncapped)");
    if (max_iters < 1) throw config_error("max_iters must be positive");
    if (!(tol > 0.0)) throw config_error("tol must be positive");
    if (mode == ConsensusMode::Frobenius && lambda == 0.0)
        throw config_error("Frobenius consensus needs lambda > 0");
    if (!kernel_per_view.empty() && kernel_per_view.size() != 1 &&
        kernel_per_view.size() != static_cast<std::size_t>(n_views))
        throw config_error("kernel list must be empty, a single spec, or one per view");
    for (const KernelSpec& spec : kernel_per_view) spec.validate();
}

KernelSpec SolverConfig::kernel_for_view(int v) const {
    if (kernel_per_view.empty()) return KernelSpec::linear();
    if (kernel_per_view.size() == 1) return kernel_per_view.front();
    return kernel_per_view[static_cast<std::size_t>(v)];
}

Matrix representation_update(const Matrix& K, const Matrix& A, const Matrix& Sigma,
                             const Vector& delta, double rho) {
    const Eigen::Index n = K.rows();
    if (K.cols() != n || A.rows() != n || A.cols() != n || Sigma.rows() != n || Sigma.cols() != n ||
        delta.size() != n)
        throw data_error("representation_update: shape mismatch");
    if (!(rho > 0.0)) throw numeric_error("representation_update: rho must be positive");
    if (!all_finite(K) || !all_finite(A) || !all_finite(Sigma) || !delta.allFinite())
        throw numeric_error("representation_update: non-finite input");

    Matrix system = K + rho * Matrix::Identity(n, n) + Matrix::Constant(n, n, rho);
    Matrix rhs = K + Matrix::Constant(n, n, rho) + rho * A - Sigma;
    rhs.rowwise() -= delta.transpose();

    Eigen::LDLT<Matrix> ldlt(system);
    if (ldlt.info() != Eigen::Success) throw numeric_error("representation_update: factorization failed");
    Matrix c = ldlt.solve(rhs);
    if (!all_finite(c)) throw numeric_error("representation_update: non-finite solution");
    return c;
}

Matrix representation_update_linear_fast(const Matrix& X, const Matrix& A, const Matrix& Sigma,
                                         const Vector& delta, double rho) {
    const Eigen::Index d = X.rows();
    const Eigen::Index n = X.cols();
    if (A.rows() != n || A.cols() != n || Sigma.rows() != n || Sigma.cols() != n || delta.size() != n)
        throw data_error("representation_update: shape mismatch");
    if (!(rho > 0.0)) throw numeric_error("representation_update: rho must be positive");
    if (!all_finite(X) || !all_finite(A) || !all_finite(Sigma) || !delta.allFinite())
        throw numeric_error("representation_update: non-finite input");

    Matrix z(d + 1, n);
    z.topRows(d) = X;
    z.bottomRows(1).setConstant(std::sqrt(rho));

    // Z^T Z = X^T X + rho * 1 1^T, so the system matrix is Z^T Z + rho I and
    // (Z^T Z + rho I)^-1 = rho^-1 I - rho^-2 Z^T (I_{d+1} + rho^-1 Z Z^T)^-1 Z.
    Matrix rhs = z.transpose() * z + rho * A - Sigma;
    rhs.rowwise() -= delta.transpose();

    Matrix inner = Matrix::Identity(d + 1, d + 1) + (z * z.transpose()) / rho;
    Eigen::LDLT<Matrix> ldlt(inner);
    if (ldlt.info() != Eigen::Success) throw numeric_error("representation_update: factorization failed");

    Matrix zr = z * rhs;
    Matrix c = rhs / rho - z.transpose() * ldlt.solve(zr) / (rho * rho);
    if (!all_finite(c)) throw numeric_error("representation_update: non-finite solution");
    return c;
}

void multiplier_update(SolverState& state, double rho) {
    const Vector ones = Vector::Ones(state.consensus.rows());
    for (std::size_t v = 0; v < state.representations.size(); ++v) {
        state.affine_multipliers[v] += rho * (state.representations[v].transpose() * ones - ones);
        state.gap_multipliers[v] += rho * (state.representations[v] - state.auxiliaries[v]);
    }
}

double objective_value(const SolverState& state, const std::vector<Matrix>& grams,
                       const SolverConfig& config) {
    double obj = 0.0;
    for (std::size_t v = 0; v < state.representations.size(); ++v) {
        const Matrix& c = state.representations[v];
        const Matrix& k = grams[v];
        Matrix kc = k * c;
        obj += k.trace() - 2.0 * kc.trace() + (c.transpose() * kc).trace();
        obj += config.theta * c.cwiseAbs().sum();
        Matrix diff = c - state.consensus;
        if (config.mode == ConsensusMode::RobustL1)
            obj += config.lambda * diff.cwiseAbs().sum();
        else
            obj += config.lambda * diff.squaredNorm();
    }
    if (config.enriched && config.gamma > 0.0 && state.embedding.size() > 0) {
        Affinity aff = affinity_from(state.consensus);
        obj += config.gamma * (state.embedding.transpose() * aff.L * state.embedding).trace();
    }
    return obj;
}

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

#ifndef NDEBUG
void check_solve_residual(const Matrix& K, const Matrix& C, const Matrix& A, const Matrix& Sigma,
                          const Vector& delta, double rho) {
    const Eigen::Index n = K.rows();
    Matrix system = K + rho * Matrix::Identity(n, n) + Matrix::Constant(n, n, rho);
    Matrix rhs = K + Matrix::Constant(n, n, rho) + rho * A - Sigma;
    rhs.rowwise() -= delta.transpose();
    assert(max_abs(system * C - rhs) < 1e-8);
}
#endif

}  // namespace

ClusteringResult fit(const MultiViewDataset& dataset, const SolverConfig& config,
                     const IterationObserver& on_iteration) {
    dataset.validate();
    config.validate(dataset.view_count());
    const Eigen::Index n = dataset.n();
    const int n_views = dataset.view_count();
    if (config.k > n) throw config_error("cluster count k exceeds sample count");

    // Gram matrices are fixed for the whole solve; the linear fast path kicks
    // in whenever a view has more samples than features.
    std::vector<Matrix> grams;
    std::vector<bool> use_fast;
    grams.reserve(n_views);
    for (int v = 0; v < n_views; ++v) {
        KernelSpec spec = config.kernel_for_view(v);
        grams.push_back(gram(dataset.views[v], spec));
        use_fast.push_back(spec.family == KernelFamily::Linear && n > dataset.views[v].rows());
    }

    SolverState state;
    state.representations.assign(n_views, Matrix::Zero(n, n));
    state.auxiliaries.assign(n_views, Matrix::Zero(n, n));
    state.gap_multipliers.assign(n_views, Matrix::Zero(n, n));
    state.affine_multipliers.assign(n_views, Vector::Zero(n));
    state.consensus = Matrix::Zero(n, n);
    state.rho = config.rho0;

    const Vector ones = Vector::Ones(n);
    bool converged = false;
    double residual_ca = 0.0;
    double residual_sum1 = 0.0;

    for (int t = 1; t <= config.max_iters; ++t) {
        state.iter = t;

        if (config.enriched) {
            Affinity aff = affinity_from(state.consensus);
            state.embedding = spectral_embedding(aff.L, config.k).F;
        }

        for (int v = 0; v < n_views; ++v) {
            state.auxiliaries[v] =
                config.mode == ConsensusMode::RobustL1
                    ? auxiliary_update(state.representations[v], state.gap_multipliers[v],
                                       state.consensus, state.rho, config.theta, config.lambda)
                    : auxiliary_update_frobenius(state.representations[v], state.gap_multipliers[v],
                                                 state.consensus, state.rho, config.theta,
                                                 config.lambda);
        }

        for (int v = 0; v < n_views; ++v) {
            state.representations[v] =
                use_fast[v] ? representation_update_linear_fast(dataset.views[v], state.auxiliaries[v],
                                                                state.gap_multipliers[v],
                                                                state.affine_multipliers[v], state.rho)
                            : representation_update(grams[v], state.auxiliaries[v],
                                                    state.gap_multipliers[v],
                                                    state.affine_multipliers[v], state.rho);
#ifndef NDEBUG
            if (t % 10 == 0)
                check_solve_residual(grams[v], state.representations[v], state.auxiliaries[v],
                                     state.gap_multipliers[v], state.affine_multipliers[v], state.rho);
#endif
        }

        Matrix q = (config.enriched && state.embedding.size() > 0) ? pairwise_sq_dists(state.embedding)
                                                                   : Matrix::Zero(n, n);
        double gamma_eff = config.enriched ? config.gamma : 0.0;
        state.consensus = config.mode == ConsensusMode::RobustL1
                              ? consensus_update(state.auxiliaries, q, config.lambda, gamma_eff)
                              : consensus_update_frobenius(state.auxiliaries, q, config.lambda, gamma_eff);

        multiplier_update(state, state.rho);

        residual_ca = 0.0;
        residual_sum1 = 0.0;
        for (int v = 0; v < n_views; ++v) {
            residual_ca = std::max(residual_ca, max_abs(state.representations[v] - state.auxiliaries[v]));
            residual_sum1 = std::max(
                residual_sum1,
                (state.representations[v].transpose() * ones - ones).cwiseAbs().maxCoeff());
        }
        state.trace.push_back({objective_value(state, grams, config), residual_ca, residual_sum1});

        state.rho = std::min(state.rho * config.rho_mult, config.rho_cap);

        if (on_iteration) on_iteration(state);

        if (residual_ca < config.tol && residual_sum1 < config.tol) {
            converged = true;
            break;
        }
    }

    // Two-stage modes never touched F inside the loop; cluster off the final
    // consensus in that case.
    if (!config.enriched || state.embedding.size() == 0) {
        Affinity aff = affinity_from(state.consensus);
        state.embedding = spectral_embedding(aff.L, config.k).F;
    }

    ClusteringResult result;
    result.labels = kmeans_labels(row_normalize(state.embedding), config.k, config.seed);
    result.embedding = std::move(state.embedding);
    result.consensus = std::move(state.consensus);
    result.view_representations = std::move(state.representations);
    result.trace = std::move(state.trace);
    result.iterations = state.iter;
    result.converged = converged;
    result.residual_ca = residual_ca;
    result.residual_sum1 = residual_sum1;

    if (dataset.labels) {
        result.acc = accuracy(result.labels, *dataset.labels);
        result.nmi_score = nmi(result.labels, *dataset.labels);
    }
    return result;
}

}  // namespace mvksc
