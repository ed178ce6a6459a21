#include "mvksc/prox.hpp"

#include <algorithm>
#include <cmath>

namespace mvksc {

double soft_threshold(double y, double t) {
    double m = std::fabs(y) - t;
    return m > 0.0 ? std::copysign(m, y) : 0.0;
}

void DoubleL1Params::validate() const {
    if (!(alpha >= 0.0) || !(beta >= 0.0)) throw numeric_error("prox_double_l1: alpha, beta must be >= 0");
    if (!std::isfinite(y) || !std::isfinite(c_star) || !std::isfinite(alpha) || !std::isfinite(beta))
        throw numeric_error("prox_double_l1: non-finite parameter");
}

namespace {

double double_l1_objective(double j, double y, double alpha, double beta, double c_star) {
    double r = j - y;
    return beta * std::fabs(j) + alpha * std::fabs(j - c_star) + 0.5 * r * r;
}

// c_star > 0 branch. The stationary-point cases cover the three smooth
// regions; when none holds the minimum sits on a kink, so the candidate scan
// over {0, c_star, the stationary values, y} settles it, ties toward 0.
double prox_double_l1_pos(double y, double alpha, double beta, double c_star) {
    if (y >= alpha + beta + c_star) return y - alpha - beta;
    double mid = y + alpha - beta;
    if (mid > 0.0 && mid < c_star) return mid;
    if (y + alpha + beta <= 0.0) return y + alpha + beta;

    const double candidates[] = {0.0, c_star, y - alpha - beta, y + alpha - beta,
                                 y - alpha + beta, y + alpha + beta, y};
    double best = candidates[0];
    double best_obj = double_l1_objective(best, y, alpha, beta, c_star);
    for (double cand : candidates) {
        double obj = double_l1_objective(cand, y, alpha, beta, c_star);
        if (obj < best_obj) {
            best = cand;
            best_obj = obj;
        }
    }
    return best;
}

}  // namespace

double prox_double_l1(const DoubleL1Params& p) {
    p.validate();
    if (p.c_star == 0.0) return soft_threshold(p.y, p.alpha + p.beta);
    if (p.c_star < 0.0) return -prox_double_l1_pos(-p.y, p.alpha, p.beta, -p.c_star);
    return prox_double_l1_pos(p.y, p.alpha, p.beta, p.c_star);
}

double prox_quad_consensus(double y, double alpha, double beta, double c_star) {
    double scale = 1.0 + 2.0 * alpha;
    return soft_threshold((y + 2.0 * alpha * c_star) / scale, beta / scale);
}

void ConsensusParams::validate() const {
    if (a_values.empty()) throw numeric_error("consensus_scalar: empty a_values");
    if (!(q >= 0.0)) throw numeric_error("consensus_scalar: q must be >= 0");
    if (!(lambda >= 0.0) || !(gamma >= 0.0)) throw numeric_error("consensus_scalar: negative weight");
    for (double a : a_values)
        if (!std::isfinite(a)) throw numeric_error("consensus_scalar: non-finite a value");
}

double consensus_objective(const ConsensusParams& p, double c) {
    double obj = p.gamma * p.q * std::fabs(c);
    for (double a : p.a_values) obj += 2.0 * p.lambda * std::fabs(a - c);
    return obj;
}

double consensus_scalar(const ConsensusParams& p) {
    p.validate();
    double best = 0.0;
    double best_obj = consensus_objective(p, 0.0);
    for (double a : p.a_values) {
        double obj = consensus_objective(p, a);
        if (obj < best_obj || (obj == best_obj && std::fabs(a) < std::fabs(best))) {
            best = a;
            best_obj = obj;
        }
    }
    return best;
}

double consensus_scalar_closed_form(const ConsensusParams& p) {
    p.validate();
    std::vector<double> sorted = p.a_values;
    std::sort(sorted.begin(), sorted.end());
    const double v = static_cast<double>(sorted.size());
    const double gq = p.gamma * p.q;

    if (2.0 * v * p.lambda > gq) {
        auto pick = [&](double numerator) -> long {
            long i = static_cast<long>(std::ceil(numerator / (4.0 * p.lambda)));
            return std::clamp(i, 1L, static_cast<long>(sorted.size()));
        };
        double lo = sorted[pick(2.0 * v * p.lambda - gq) - 1];
        if (lo > 0.0) return lo;
        double hi = sorted[pick(2.0 * v * p.lambda + gq) - 1];
        if (hi < 0.0) return hi;
    }
    return 0.0;
}

namespace {

void check_square_same(const Matrix& a, const Matrix& b, const char* who) {
    if (a.rows() != a.cols()) throw data_error(std::string(who) + ": matrix not square");
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw data_error(std::string(who) + ": shape mismatch");
}

}  // namespace

Matrix auxiliary_update(const Matrix& C, const Matrix& Sigma, const Matrix& C_star,
                        double rho, double theta, double lambda) {
    check_square_same(C, Sigma, "auxiliary_update");
    check_square_same(C, C_star, "auxiliary_update");
    if (!(rho > 0.0)) throw numeric_error("auxiliary_update: rho must be positive");
    if (!all_finite(C) || !all_finite(Sigma) || !all_finite(C_star))
        throw numeric_error("auxiliary_update: non-finite input");

    const double alpha = lambda / rho;
    const double beta = theta / rho;
    const Eigen::Index n = C.rows();
    Matrix out(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            double y = C(i, j) + Sigma(i, j) / rho;
            out(i, j) = prox_double_l1({y, alpha, beta, C_star(i, j)});
        }
    }
    out.diagonal().setZero();
    return out;
}

Matrix auxiliary_update_frobenius(const Matrix& C, const Matrix& Sigma, const Matrix& C_star,
                                  double rho, double theta, double lambda) {
    check_square_same(C, Sigma, "auxiliary_update");
    check_square_same(C, C_star, "auxiliary_update");
    if (!(rho > 0.0)) throw numeric_error("auxiliary_update: rho must be positive");
    if (!all_finite(C) || !all_finite(Sigma) || !all_finite(C_star))
        throw numeric_error("auxiliary_update: non-finite input");

    const double alpha = lambda / rho;
    const double beta = theta / rho;
    const Eigen::Index n = C.rows();
    Matrix out(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            double y = C(i, j) + Sigma(i, j) / rho;
            out(i, j) = prox_quad_consensus(y, alpha, beta, C_star(i, j));
        }
    }
    out.diagonal().setZero();
    return out;
}

Matrix consensus_update(const std::vector<Matrix>& A_views, const Matrix& Q,
                        double lambda, double gamma) {
    if (A_views.empty()) throw data_error("consensus_update: empty view list");
    const Eigen::Index n = A_views.front().rows();
    for (const Matrix& a : A_views) check_square_same(A_views.front(), a, "consensus_update");
    if (Q.rows() != n || Q.cols() != n) throw data_error("consensus_update: Q shape mismatch");

    ConsensusParams p;
    p.a_values.resize(A_views.size());
    p.lambda = lambda;
    p.gamma = 1.0;  // effective weight carried pre-multiplied in q

    Matrix out(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            for (std::size_t v = 0; v < A_views.size(); ++v) p.a_values[v] = A_views[v](i, j);
            p.q = gamma * Q(i, j);
            out(i, j) = consensus_scalar(p);
        }
    }
    out.diagonal().setZero();
    return out;
}

Matrix consensus_update_frobenius(const std::vector<Matrix>& A_views, const Matrix& Q,
                                  double lambda, double gamma) {
    if (A_views.empty()) throw data_error("consensus_update: empty view list");
    const Eigen::Index n = A_views.front().rows();
    for (const Matrix& a : A_views) check_square_same(A_views.front(), a, "consensus_update");
    if (Q.rows() != n || Q.cols() != n) throw data_error("consensus_update: Q shape mismatch");
    if (!(lambda > 0.0)) throw numeric_error("consensus_update: lambda must be positive");

    const double v = static_cast<double>(A_views.size());
    Matrix mean = Matrix::Zero(n, n);
    for (const Matrix& a : A_views) mean += a;
    mean /= v;

    Matrix out(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            out(i, j) = soft_threshold(mean(i, j), gamma * Q(i, j) / (2.0 * v * lambda));
    out.diagonal().setZero();
    return out;
}

}  // namespace mvksc
