#pragma once

#include <cstdint>
#include <vector>

#include "mvksc/types.hpp"

namespace mvksc {

/// Symmetric nonnegative affinity with its degree vector and Laplacian L = D - W.
struct Affinity {
    Matrix W;
    Vector degrees;
    Matrix L;
};

/// Orthonormal spectral embedding: columns are eigenvectors of the k smallest
/// Laplacian eigenvalues, ascending, with a deterministic sign convention.
struct Embedding {
    Matrix F;
    Vector eigenvalues;
};

/// W(i,j) = (|M(i,j)| + |M(j,i)|) / 2 with zero diagonal; D and L as defined.
Affinity affinity_from(const Matrix& C_star);

/// Eigenvectors of the k smallest eigenvalues of symmetric L. Each column is
/// flipped so its largest-magnitude entry (first such index on ties) is positive.
Embedding spectral_embedding(const Matrix& L, int k);

/// Q(i,j) = squared Euclidean distance between rows i and j.
Matrix pairwise_sq_dists(const Matrix& rows);

/// Each row scaled to unit Euclidean norm; all-zero rows are left at zero.
Matrix row_normalize(const Matrix& m);

/// Lloyd's algorithm with k-means++ seeding, 20 restarts, 300-iteration cap,
/// best inertia kept, empty clusters reseeded to the farthest point.
/// Deterministic in (input, k, seed).
std::vector<int> kmeans_labels(const Matrix& points, int k, std::uint64_t seed);

}  // namespace mvksc
