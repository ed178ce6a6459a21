#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "mvksc/kernels.hpp"
#include "oracles.hpp"

using namespace mvksc;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
}

double smallest_eigenvalue(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> s(m);
    return s.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("linear gram of orthonormal columns is the identity") {
    Matrix k = gram(Matrix::Identity(2, 2), KernelSpec::linear());
    CHECK(k.isApprox(Matrix::Identity(2, 2), 1e-15));
}

TEST_CASE("polynomial gram entries follow (<x_i,x_j> + c)^d") {
    Matrix x(1, 2);
    x << 1.0, 2.0;
    Matrix k = gram(x, KernelSpec::polynomial(1.0, 2));
    CHECK(k(0, 0) == doctest::Approx(4.0));
    CHECK(k(0, 1) == doctest::Approx(9.0));
    CHECK(k(1, 0) == doctest::Approx(9.0));
    CHECK(k(1, 1) == doctest::Approx(25.0));
}

TEST_CASE("degree-1 polynomial with zero offset matches the linear kernel") {
    Rng rng(11);
    Matrix x = random_matrix(5, 8, rng);
    Matrix poly = gram(x, KernelSpec::polynomial(0.0, 1));
    Matrix lin = gram(x, KernelSpec::linear());
    CHECK((poly - lin).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gram output is exactly symmetric") {
    Rng rng(3);
    Matrix x = random_matrix(4, 9, rng);
    for (KernelSpec spec : {KernelSpec::linear(), KernelSpec::polynomial(0.5, 3)}) {
        Matrix k = gram(x, spec);
        for (Eigen::Index i = 0; i < k.rows(); ++i)
            for (Eigen::Index j = 0; j < k.cols(); ++j) CHECK(k(i, j) == k(j, i));
    }
}

TEST_CASE("gram matrices are positive semidefinite on random data") {
    Rng rng(29);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix x = random_matrix(3 + trial % 4, 6 + trial % 5, rng);
        for (KernelSpec spec : {KernelSpec::linear(), KernelSpec::polynomial(1.0, 2),
                                KernelSpec::polynomial(0.3, 4)}) {
            Matrix k = gram(x, spec);
            double floor = -1e-8 * k.cwiseAbs().maxCoeff();
            CHECK(smallest_eigenvalue(k) >= floor);
        }
    }
}

TEST_CASE("gram rejects bad inputs") {
    CHECK_THROWS_AS(gram(Matrix(), KernelSpec::linear()), data_error);
    Matrix single(2, 1);
    single << 1.0, 2.0;
    CHECK_THROWS_AS(gram(single, KernelSpec::linear()), data_error);
    Matrix bad(2, 2);
    bad << 1.0, 2.0, std::nan(""), 0.0;
    CHECK_THROWS_AS(gram(bad, KernelSpec::linear()), data_error);
    CHECK_THROWS_AS(gram(Matrix::Identity(3, 3), KernelSpec::polynomial(1.0, 0)), config_error);
    CHECK_THROWS_AS(gram(Matrix::Identity(3, 3), KernelSpec::polynomial(-1.0, 2)), config_error);
}

TEST_CASE("kernel specs parse and print") {
    CHECK(parse_kernel_spec("linear").family == KernelFamily::Linear);
    KernelSpec poly = parse_kernel_spec("poly:1.5:3");
    CHECK(poly.family == KernelFamily::Polynomial);
    CHECK(poly.c == doctest::Approx(1.5));
    CHECK(poly.d == 3);
    CHECK(parse_kernel_spec(poly.to_string()).c == poly.c);
    CHECK_THROWS_AS(parse_kernel_spec("rbf:1"), config_error);
    CHECK_THROWS_AS(parse_kernel_spec("poly:nope:2"), config_error);
}
