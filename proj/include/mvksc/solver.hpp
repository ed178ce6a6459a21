#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mvksc/data.hpp"
#include "mvksc/kernels.hpp"
#include "mvksc/types.hpp"

namespace mvksc {

enum class ConsensusMode { RobustL1, Frobenius };

ConsensusMode parse_consensus_mode(const std::string& text);
std::string to_string(ConsensusMode mode);

/// All scalars of the joint objective and its solver schedule.
///
/// Mode map: Frobenius + enriched=false is the plain squared-consensus model;
/// RobustL1 + enriched=false swaps in the l1 consensus; RobustL1 +
/// enriched=true adds the spectral coupling and is the default.
struct SolverConfig {
    double lambda = 1.0;   // consensus weight
    double gamma = 0.01;   // spectral-coupling weight
    double theta = 0.01;   // sparsity weight
    int k = 0;             // cluster count, must be set
    std::vector<KernelSpec> kernel_per_view;  // empty = linear everywhere; size 1 broadcasts

    double rho0 = 0.2;
    double rho_mult = 1.2;
    double rho_cap = 1e6;  // +inf allowed for an uncapped schedule
    int max_iters = 100;
    double tol = 1e-4;

    ConsensusMode mode = ConsensusMode::RobustL1;
    bool enriched = true;
    std::uint64_t seed = 0;

    void validate(int n_views) const;
    KernelSpec kernel_for_view(int v) const;
};

struct TraceRow {
    double objective = 0.0;
    double residual_ca = 0.0;    // max over views of ||C - A||_max
    double residual_sum1 = 0.0;  // max over views of ||C^T 1 - 1||_inf
};

struct SolverState {
    std::vector<Matrix> representations;      // per-view C
    std::vector<Matrix> auxiliaries;          // per-view A, zero diagonal
    std::vector<Matrix> gap_multipliers;      // per-view Sigma
    std::vector<Vector> affine_multipliers;   // per-view delta
    Matrix consensus;                         // shared C*
    Matrix embedding;                         // shared F, orthonormal columns
    double rho = 0.0;
    int iter = 0;
    std::vector<TraceRow> trace;
};

struct ClusteringResult {
    std::vector<int> labels;
    Matrix embedding;
    Matrix consensus;
    std::vector<Matrix> view_representations;
    std::vector<TraceRow> trace;
    int iterations = 0;
    bool converged = false;
    double residual_ca = 0.0;
    double residual_sum1 = 0.0;
    std::optional<double> acc;
    std::optional<double> nmi_score;
};

/// Solves (K + rho*I + rho*1*1^T) C = K + rho*1*1^T - 1*delta^T + rho*A - Sigma.
Matrix representation_update(const Matrix& K, const Matrix& A, const Matrix& Sigma,
                             const Vector& delta, double rho);

/// Same system for the linear kernel via the Woodbury identity on
/// Z = [X; sqrt(rho)*1^T]: cost O(d^3 + d*n^2) instead of O(n^3).
Matrix representation_update_linear_fast(const Matrix& X, const Matrix& A, const Matrix& Sigma,
                                         const Vector& delta, double rho);

/// Gradient-ascent step on both multipliers, every view.
void multiplier_update(SolverState& state, double rho);

/// Joint objective evaluated on the representations:
/// sum_v [ tr(K) - 2 tr(K C) + tr(C^T K C) + theta*||C||_1 + consensus term ]
/// plus gamma * tr(F^T L F) when enriched, with L built from the consensus.
double objective_value(const SolverState& state, const std::vector<Matrix>& grams,
                       const SolverConfig& config);

using IterationObserver = std::function<void(const SolverState&)>;

/// Full alternating solve: per iteration F, per-view A, per-view C, consensus,
/// multipliers, rho <- min(rho * rho_mult, rho_cap), until the iteration budget
/// or both primal residuals drop below tol. Ends with row normalization and
/// seeded k-means on the embedding.
ClusteringResult fit(const MultiViewDataset& dataset, const SolverConfig& config,
                     const IterationObserver& on_iteration = {});

}  // namespace mvksc
