#include <doctest.h>

#include <algorithm>

#include "mvksc/spectral.hpp"
#include "oracles.hpp"

using namespace mvksc;

TEST_CASE("affinity construction from a representation matrix") {
    Affinity zero = affinity_from(Matrix::Zero(3, 3));
    CHECK(zero.W.cwiseAbs().maxCoeff() == 0.0);
    CHECK(zero.L.cwiseAbs().maxCoeff() == 0.0);

    Matrix c(2, 2);
    c << 0.0, -2.0, 4.0, 0.0;
    Affinity a = affinity_from(c);
    CHECK(a.W(0, 1) == doctest::Approx(3.0));
    CHECK(a.W(1, 0) == doctest::Approx(3.0));
    CHECK(a.degrees(0) == doctest::Approx(3.0));
    CHECK(a.L(0, 0) == doctest::Approx(3.0));
    CHECK(a.L(0, 1) == doctest::Approx(-3.0));
}

TEST_CASE("affinity invariants hold on random inputs") {
    Rng rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        Matrix c(8, 8);
        for (Eigen::Index i = 0; i < 8; ++i)
            for (Eigen::Index j = 0; j < 8; ++j) c(i, j) = i == j ? 0.0 : rng.normal();
        Affinity a = affinity_from(c);
        for (Eigen::Index i = 0; i < 8; ++i) {
            CHECK(a.W(i, i) == 0.0);
            for (Eigen::Index j = 0; j < 8; ++j) {
                CHECK(a.W(i, j) == a.W(j, i));
                CHECK(a.W(i, j) >= 0.0);
            }
        }
        CHECK((a.L * Vector::Ones(8)).cwiseAbs().maxCoeff() < 1e-10);
        Eigen::SelfAdjointEigenSolver<Matrix> s(a.L);
        CHECK(s.eigenvalues().minCoeff() >= -1e-8 * a.L.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("embedding of the zero Laplacian keeps its contracts") {
    Embedding e = spectral_embedding(Matrix::Zero(4, 4), 2);
    CHECK((e.F.transpose() * e.F - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(e.eigenvalues.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("embedding of two disconnected pairs is a pair indicator") {
    Matrix w = Matrix::Zero(4, 4);
    w(0, 1) = w(1, 0) = 1.0;
    w(2, 3) = w(3, 2) = 1.0;
    Matrix l = Matrix(w.rowwise().sum().asDiagonal()) - w;

    Embedding e = spectral_embedding(l, 2);
    CHECK((e.F.transpose() * l * e.F).trace() == doctest::Approx(0.0).epsilon(1e-10));
    // every vector in the null space is constant within each pair
    for (int c = 0; c < 2; ++c) {
        CHECK(e.F(0, c) == doctest::Approx(e.F(1, c)).epsilon(1e-8));
        CHECK(e.F(2, c) == doctest::Approx(e.F(3, c)).epsilon(1e-8));
    }
}

TEST_CASE("embedding is orthonormal and hits the eigenvalue sum") {
    Rng rng(13);
    for (int trial = 0; trial < 25; ++trial) {
        Matrix l = oracle::random_psd(7, rng);
        Embedding e = spectral_embedding(l, 3);
        CHECK((e.F.transpose() * e.F - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
        double trace = (e.F.transpose() * l * e.F).trace();
        CHECK(trace == doctest::Approx(e.eigenvalues.sum()).epsilon(1e-8));
    }
}

TEST_CASE("embedding sign convention is deterministic") {
    Rng rng(19);
    Matrix l = oracle::random_psd(6, rng);
    Embedding a = spectral_embedding(l, 2);
    Embedding b = spectral_embedding(l, 2);
    CHECK((a.F - b.F).cwiseAbs().maxCoeff() == 0.0);
    for (int c = 0; c < 2; ++c) {
        Eigen::Index pivot = 0;
        a.F.col(c).cwiseAbs().maxCoeff(&pivot);
        CHECK(a.F(pivot, c) > 0.0);
    }
}

TEST_CASE("embedding beats random orthonormal competitors") {
    Rng rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        Matrix l = oracle::random_psd(8, rng);
        Embedding e = spectral_embedding(l, 3);
        double ours = (e.F.transpose() * l * e.F).trace();
        for (int i = 0; i < 200; ++i) {
            Matrix g = oracle::random_orthonormal(8, 3, rng);
            CHECK(ours <= (g.transpose() * l * g).trace() + 1e-8);
        }
    }
}

TEST_CASE("pairwise squared distances") {
    Matrix same(3, 2);
    same << 1.0, 2.0, 1.0, 2.0, 1.0, 2.0;
    CHECK(pairwise_sq_dists(same).cwiseAbs().maxCoeff() == 0.0);

    Matrix f(2, 1);
    f << 0.0, 1.0;
    Matrix q = pairwise_sq_dists(f);
    CHECK(q(0, 1) == doctest::Approx(1.0));
    CHECK(q(1, 0) == doctest::Approx(1.0));
    CHECK(q(0, 0) == 0.0);
}

TEST_CASE("trace identity ties the Laplacian to pairwise distances") {
    Rng rng(37);
    for (int trial = 0; trial < 100; ++trial) {
        Matrix c(6, 6);
        for (Eigen::Index i = 0; i < 6; ++i)
            for (Eigen::Index j = 0; j < 6; ++j) c(i, j) = i == j ? 0.0 : rng.normal();
        Affinity a = affinity_from(c);
        Matrix f(6, 3);
        for (Eigen::Index i = 0; i < 6; ++i)
            for (Eigen::Index j = 0; j < 3; ++j) f(i, j) = rng.normal();
        double lhs = (f.transpose() * a.L * f).trace();
        double rhs = 0.5 * (a.W.array() * pairwise_sq_dists(f).array()).sum();
        CHECK(std::fabs(lhs - rhs) < 1e-10);
    }
}

TEST_CASE("row normalization leaves zero rows at the origin") {
    Matrix m(3, 2);
    m << 3.0, 4.0, 0.0, 0.0, -1.0, 0.0;
    Matrix out = row_normalize(m);
    CHECK(out.row(0).norm() == doctest::Approx(1.0));
    CHECK(out(1, 0) == 0.0);
    CHECK(out(1, 1) == 0.0);
    CHECK(out(2, 0) == doctest::Approx(-1.0));
}

TEST_CASE("kmeans separates point clouds and is deterministic") {
    Rng rng(43);
    Matrix pts(40, 2);
    for (int i = 0; i < 20; ++i) {
        pts(i, 0) = 0.0 + 0.01 * rng.normal();
        pts(i, 1) = 1.0 + 0.01 * rng.normal();
        pts(20 + i, 0) = 1.0 + 0.01 * rng.normal();
        pts(20 + i, 1) = 0.0 + 0.01 * rng.normal();
    }
    std::vector<int> labels = kmeans_labels(pts, 2, 123);
    for (int i = 1; i < 20; ++i) {
        CHECK(labels[i] == labels[0]);
        CHECK(labels[20 + i] == labels[20]);
    }
    CHECK(labels[0] != labels[20]);
    CHECK(kmeans_labels(pts, 2, 123) == labels);
}

TEST_CASE("kmeans with k = n gives every point its own cluster") {
    Matrix pts(4, 1);
    pts << 0.0, 10.0, 20.0, 30.0;
    std::vector<int> labels = kmeans_labels(pts, 4, 9);
    std::vector<int> sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("kmeans survives identical points") {
    Matrix pts = Matrix::Constant(5, 2, 1.5);
    std::vector<int> labels = kmeans_labels(pts, 3, 11);
    REQUIRE(labels.size() == 5);
    for (int l : labels) {
        CHECK(l >= 0);
        CHECK(l < 3);
    }
    CHECK(kmeans_labels(pts, 3, 11) == labels);
}

TEST_CASE("spectral inputs are validated") {
    CHECK_THROWS_AS(spectral_embedding(Matrix::Zero(3, 3), 4), config_error);
    CHECK_THROWS_AS(spectral_embedding(Matrix::Zero(3, 3), 0), config_error);
    CHECK_THROWS_AS(spectral_embedding(Matrix::Constant(3, 3, std::nan("")), 2), numeric_error);
    CHECK_THROWS_AS(kmeans_labels(Matrix::Zero(3, 2), 4, 0), config_error);
    CHECK_THROWS_AS(affinity_from(Matrix::Zero(2, 3)), data_error);
}
