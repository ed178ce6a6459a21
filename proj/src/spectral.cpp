#include "mvksc/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace mvksc {

Affinity affinity_from(const Matrix& C_star) {
    if (C_star.rows() != C_star.cols()) throw data_error("affinity_from: matrix not square");
    if (!all_finite(C_star)) throw numeric_error("affinity_from: non-finite entries");

    Affinity a;
    Matrix abs = C_star.cwiseAbs();
    a.W = (abs + abs.transpose()) * 0.5;
    a.W.diagonal().setZero();
    a.degrees = a.W.rowwise().sum();
    a.L = Matrix(a.degrees.asDiagonal()) - a.W;
    return a;
}

Embedding spectral_embedding(const Matrix& L, int k) {
    const Eigen::Index n = L.rows();
    if (L.cols() != n) throw data_error("spectral_embedding: matrix not square");
    if (k < 1 || k > n) throw config_error("spectral_embedding: need 1 <= k <= n");
    if (!all_finite(L)) throw numeric_error("spectral_embedding: non-finite Laplacian");

    Eigen::SelfAdjointEigenSolver<Matrix> solver(L);
    if (solver.info() != Eigen::Success) throw numeric_error("spectral_embedding: eigensolver failed");

    Embedding e;
    e.F = solver.eigenvectors().leftCols(k);
    e.eigenvalues = solver.eigenvalues().head(k);

    // Sign convention: largest-magnitude entry of each column made positive,
    // ties resolved by first index.
    for (int c = 0; c < k; ++c) {
        Eigen::Index pivot = 0;
        double top = -1.0;
        for (Eigen::Index r = 0; r < n; ++r) {
            double mag = std::fabs(e.F(r, c));
            if (mag > top) {
                top = mag;
                pivot = r;
            }
        }
        if (e.F(pivot, c) < 0.0) e.F.col(c) = -e.F.col(c);
    }
    return e;
}

Matrix pairwise_sq_dists(const Matrix& rows) {
    if (!all_finite(rows)) throw numeric_error("pairwise_sq_dists: non-finite input");
    const Eigen::Index n = rows.rows();
    Matrix q = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double d = (rows.row(i) - rows.row(j)).squaredNorm();
            q(i, j) = d;
            q(j, i) = d;
        }
    }
    return q;
}

Matrix row_normalize(const Matrix& m) {
    Matrix out = m;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        double norm = out.row(i).norm();
        if (norm > 0.0) out.row(i) /= norm;
    }
    return out;
}

namespace {

struct KmeansRun {
    std::vector<int> labels;
    double inertia = std::numeric_limits<double>::infinity();
};

double sq_dist(const Matrix& pts, Eigen::Index i, const Matrix& centers, int c) {
    return (pts.row(i) - centers.row(c)).squaredNorm();
}

KmeansRun lloyd_once(const Matrix& pts, int k, Rng& rng) {
    const Eigen::Index n = pts.rows();
    const int max_iters = 300;

    // k-means++ seeding
    Matrix centers(k, pts.cols());
    std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
    Eigen::Index first = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    centers.row(0) = pts.row(first);
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double d2 = sq_dist(pts, i, centers, c - 1);
            if (d2 < min_d2[i]) min_d2[i] = d2;
            total += min_d2[i];
        }
        Eigen::Index pick;
        if (total <= 0.0) {
            pick = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
        } else {
            double target = rng.uniform01() * total;
            double acc = 0.0;
            pick = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += min_d2[i];
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
        }
        centers.row(c) = pts.row(pick);
    }

    KmeansRun run;
    run.labels.assign(n, 0);
    std::vector<int> counts(k, 0);

    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = sq_dist(pts, i, centers, 0);
            for (int c = 1; c < k; ++c) {
                double d = sq_dist(pts, i, centers, c);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (run.labels[i] != best) {
                run.labels[i] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;

        centers.setZero();
        std::fill(counts.begin(), counts.end(), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            centers.row(run.labels[i]) += pts.row(i);
            counts[run.labels[i]]++;
        }
        for (int c = 0; c < k; ++c)
            if (counts[c] > 0) centers.row(c) /= static_cast<double>(counts[c]);
        // an empty cluster grabs the point farthest from its current center
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) continue;
            Eigen::Index far = 0;
            double far_d = -1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (counts[run.labels[i]] == 0) continue;
                double d = sq_dist(pts, i, centers, run.labels[i]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            centers.row(c) = pts.row(far);
            run.labels[far] = c;
            counts[c] = 1;
        }
    }

    run.inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) run.inertia += sq_dist(pts, i, centers, run.labels[i]);
    return run;
}

}  // namespace

std::vector<int> kmeans_labels(const Matrix& points, int k, std::uint64_t seed) {
    const Eigen::Index n = points.rows();
    if (k < 1) throw config_error("kmeans: k must be positive");
    if (k > n) throw config_error("kmeans: k exceeds sample count");
    if (!all_finite(points)) throw numeric_error("kmeans: non-finite input");

    const int restarts = 20;
    KmeansRun best;
    for (int r = 0; r < restarts; ++r) {
        Rng rng(seed * 0x100000001b3ULL + static_cast<std::uint64_t>(r));
        KmeansRun run = lloyd_once(points, k, rng);
        if (run.inertia < best.inertia) best = run;
    }
    return best.labels;
}

}  // namespace mvksc
