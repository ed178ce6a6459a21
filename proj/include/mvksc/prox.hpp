#pragma once

#include <vector>

#include "mvksc/types.hpp"

namespace mvksc {

/// sgn(y) * max{|y| - t, 0}, t >= 0.
double soft_threshold(double y, double t);

/// Scalar subproblem  min_j  beta*|j| + alpha*|j - c_star| + (j - y)^2 / 2.
/// alpha weighs the consensus pull, beta the sparsity pull.
struct DoubleL1Params {
    double y = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double c_star = 0.0;

    void validate() const;
};

/// Global minimizer of the double-l1 scalar objective. Reduces exactly to
/// soft_threshold(y, alpha + beta) when c_star == 0, and is odd under
/// (y, c_star) -> (-y, -c_star).
double prox_double_l1(const DoubleL1Params& p);

/// Scalar subproblem  min_j  beta*|j| + alpha*(j - c_star)^2 + (j - y)^2 / 2,
/// the quadratic-consensus counterpart of prox_double_l1.
double prox_quad_consensus(double y, double alpha, double beta, double c_star);

/// Scalar consensus subproblem  min_c  gamma*q*|c| + sum_v 2*lambda*|a_v - c|.
/// q is the (nonnegative) embedding-distance weight for this entry.
struct ConsensusParams {
    std::vector<double> a_values;
    double q = 0.0;
    double lambda = 1.0;
    double gamma = 0.0;

    void validate() const;
};

/// Candidate-enumeration minimizer: evaluates the objective at 0 and every
/// a_v, returns the argmin (ties toward 0, then toward smallest |c|). Exact,
/// since the objective is piecewise linear with kinks only at {0, a_v}.
double consensus_scalar(const ConsensusParams& p);

/// Sorted-index closed form for the same subproblem. Agrees with
/// consensus_scalar in achieved objective value; the enumeration path is
/// authoritative where the index conditions degenerate.
double consensus_scalar_closed_form(const ConsensusParams& p);

double consensus_objective(const ConsensusParams& p, double c);

/// Entrywise prox_double_l1 with y = C + Sigma/rho, alpha = lambda/rho,
/// beta = theta/rho, anchored at the consensus entry; diagonal zeroed exactly.
Matrix auxiliary_update(const Matrix& C, const Matrix& Sigma, const Matrix& C_star,
                        double rho, double theta, double lambda);

/// Same wrapper for the squared-consensus model (prox_quad_consensus entrywise).
Matrix auxiliary_update_frobenius(const Matrix& C, const Matrix& Sigma, const Matrix& C_star,
                                  double rho, double theta, double lambda);

/// Entrywise consensus over the per-view auxiliaries. The scalar subproblem
/// receives q = gamma * Q(i,j) pre-multiplied (with unit gamma), so the
/// effective |c| weight is gamma * Q(i,j). Output diagonal forced to zero.
Matrix consensus_update(const std::vector<Matrix>& A_views, const Matrix& Q,
                        double lambda, double gamma);

/// Squared-consensus counterpart: per-entry mean of the auxiliaries shrunk by
/// soft_threshold(mean, gamma * Q(i,j) / (2 * v * lambda)).
Matrix consensus_update_frobenius(const std::vector<Matrix>& A_views, const Matrix& Q,
                                  double lambda, double gamma);

}  // namespace mvksc
