#include <doctest.h>

#include <Eigen/LU>

#include "mvksc/prox.hpp"
#include "mvksc/solver.hpp"
#include "mvksc/spectral.hpp"
#include "oracles.hpp"

using namespace mvksc;

namespace {

Matrix system_matrix(const Matrix& k, double rho) {
    const Eigen::Index n = k.rows();
    return k + rho * Matrix::Identity(n, n) + Matrix::Constant(n, n, rho);
}

Matrix right_hand_side(const Matrix& k, const Matrix& a, const Matrix& sigma, const Vector& delta,
                       double rho) {
    Matrix rhs = k + Matrix::Constant(k.rows(), k.cols(), rho) + rho * a - sigma;
    rhs.rowwise() -= delta.transpose();
    return rhs;
}

Matrix random_square(Eigen::Index n, Rng& rng) {
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rng.normal();
    return m;
}

SolverConfig fixture_config(int k) {
    SolverConfig config;
    config.k = k;
    return config;
}

}  // namespace

TEST_CASE("representation solve matches a full-pivot inverse") {
    const Eigen::Index n = 3;
    Matrix k = Matrix::Zero(n, n);
    Matrix c = representation_update(k, Matrix::Zero(n, n), Matrix::Zero(n, n), Vector::Zero(n), 1.0);

    Matrix expected =
        Eigen::FullPivLU<Matrix>(system_matrix(k, 1.0)).inverse() * Matrix::Constant(n, n, 1.0);
    CHECK((c - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("representation solve leaves a tiny system residual") {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix k = oracle::random_psd(12, rng);
        Matrix a = random_square(12, rng);
        Matrix sigma = random_square(12, rng);
        Vector delta(12);
        for (int i = 0; i < 12; ++i) delta(i) = rng.normal();
        double rho = rng.uniform(0.1, 5.0);

        Matrix c = representation_update(k, a, sigma, delta, rho);
        Matrix residual = system_matrix(k, rho) * c - right_hand_side(k, a, sigma, delta, rho);
        CHECK(residual.cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("representation solve returns the stationary point when handed one") {
    Rng rng(9);
    Matrix k = oracle::random_psd(8, rng);
    Matrix a = random_square(8, rng);
    double rho = 0.8;

    // pick sigma so the right-hand side equals (system matrix) * a
    Vector delta = Vector::Zero(8);
    Matrix sigma = k + Matrix::Constant(8, 8, rho) + rho * a - system_matrix(k, rho) * a;
    Matrix c = representation_update(k, a, sigma, delta, rho);
    CHECK((c - a).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("woodbury fast path agrees with the dense path") {
    Rng rng(13);
    {
        Matrix x(3, 30);
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.normal();
        Matrix a = random_square(30, rng), sigma = random_square(30, rng);
        Vector delta(30);
        for (int i = 0; i < 30; ++i) delta(i) = rng.normal();

        Matrix dense = representation_update(gram(x, KernelSpec::linear()), a, sigma, delta, 0.7);
        Matrix fast = representation_update_linear_fast(x, a, sigma, delta, 0.7);
        CHECK((dense - fast).cwiseAbs().maxCoeff() < 1e-8);
    }
    {
        Matrix x(1, 5);
        x << 0.1, -0.2, 0.4, 0.9, -1.1;
        Matrix a = random_square(5, rng), sigma = random_square(5, rng);
        Vector delta(5);
        for (int i = 0; i < 5; ++i) delta(i) = rng.normal();

        Matrix dense = representation_update(gram(x, KernelSpec::linear()), a, sigma, delta, 1.3);
        Matrix fast = representation_update_linear_fast(x, a, sigma, delta, 1.3);
        CHECK((dense - fast).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("multiplier updates follow the infeasibility") {
    const Eigen::Index n = 4;
    SolverState state;
    state.consensus = Matrix::Zero(n, n);

    // feasible representations: columns sum to one, gap closed
    Matrix feasible = Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
    state.representations = {feasible};
    state.auxiliaries = {feasible};
    state.gap_multipliers = {Matrix::Zero(n, n)};
    state.affine_multipliers = {Vector::Zero(n)};
    multiplier_update(state, 2.0);
    CHECK(state.gap_multipliers[0].cwiseAbs().maxCoeff() == 0.0);
    CHECK(state.affine_multipliers[0].cwiseAbs().maxCoeff() == 0.0);

    // a fixed gap grows the multiplier linearly
    Rng rng(3);
    Matrix gap = random_square(n, rng);
    state.representations = {feasible + gap};
    multiplier_update(state, 2.0);
    CHECK((state.gap_multipliers[0] - 2.0 * gap).cwiseAbs().maxCoeff() < 1e-12);
    multiplier_update(state, 2.0);
    CHECK((state.gap_multipliers[0] - 4.0 * gap).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("objective value on canonical fixtures") {
    const Eigen::Index n = 5;
    const int views = 3;
    SolverState state;
    state.representations.assign(views, Matrix::Zero(n, n));
    state.auxiliaries.assign(views, Matrix::Zero(n, n));
    state.consensus = Matrix::Zero(n, n);
    std::vector<Matrix> grams(views, Matrix::Identity(n, n));

    SolverConfig config = fixture_config(2);
    CHECK(objective_value(state, grams, config) ==
          doctest::Approx(static_cast<double>(views * n)));

    // gamma = 0 makes the value independent of the embedding
    config.gamma = 0.0;
    state.embedding = Matrix::Identity(n, 2);
    double without = objective_value(state, grams, config);
    Rng rng(77);
    state.embedding = oracle::random_orthonormal(n, 2, rng);
    CHECK(objective_value(state, grams, config) == without);
}

TEST_CASE("block-diagonal consensus with block indicators kills the coupling term") {
    const Eigen::Index n = 4;
    Matrix consensus = Matrix::Zero(n, n);
    consensus(0, 1) = consensus(1, 0) = 0.5;
    consensus(2, 3) = consensus(3, 2) = 0.8;

    Matrix f(n, 2);
    f << 1, 0, 1, 0, 0, 1, 0, 1;
    f /= std::sqrt(2.0);

    SolverState state;
    state.representations = {consensus};
    state.auxiliaries = {consensus};
    state.consensus = consensus;
    state.embedding = f;
    std::vector<Matrix> grams = {Matrix::Identity(n, n)};

    SolverConfig config = fixture_config(2);
    config.gamma = 10.0;
    double with_coupling = objective_value(state, grams, config);
    config.gamma = 0.0;
    CHECK(std::fabs(with_coupling - objective_value(state, grams, config)) < 1e-10);
}

TEST_CASE("fit drives the consensus onto a single view") {
    MultiViewDataset ds = synth_linear_subspaces(10, 2, {6}, 0.01, 21);
    SolverConfig config = fixture_config(2);
    config.gamma = 0.0;
    config.enriched = false;
    config.lambda = 50.0;
    config.max_iters = 80;
    config.tol = 1e-6;

    Matrix last_aux;
    auto observer = [&](const SolverState& state) { last_aux = state.auxiliaries[0]; };
    ClusteringResult result = fit(normalize(ds, NormalizeMode::UnitColumn), config, observer);
    CHECK((result.consensus - last_aux).cwiseAbs().maxCoeff() < 1e-3);
    CHECK((result.view_representations[0] - result.consensus).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("fit clusters the subspace fixture and keeps its invariants") {
    MultiViewDataset ds = synth_linear_subspaces(30, 3, {10, 12}, 0.01, 7);
    SolverConfig config = fixture_config(3);
    config.seed = 7;

    double last_rho = 0.0;
    int calls = 0;
    auto observer = [&](const SolverState& state) {
        for (const Matrix& a : state.auxiliaries)
            for (Eigen::Index i = 0; i < a.rows(); ++i) CHECK(a(i, i) == 0.0);
        CHECK((state.embedding.transpose() * state.embedding -
               Matrix::Identity(config.k, config.k))
                  .cwiseAbs()
                  .maxCoeff() < 1e-8);
        CHECK(state.rho >= last_rho);
        last_rho = state.rho;
        ++calls;
    };

    ClusteringResult result = fit(normalize(ds, NormalizeMode::UnitColumn), config, observer);
    CHECK(calls == result.iterations);
    REQUIRE(result.acc.has_value());
    CHECK(*result.acc >= 0.95);
    CHECK(*result.nmi_score >= 0.90);
    CHECK(result.trace.size() == static_cast<std::size_t>(result.iterations));
}

TEST_CASE("fit termination honors the tolerance") {
    MultiViewDataset ds = synth_linear_subspaces(15, 2, {8, 8}, 0.01, 31);
    SolverConfig config = fixture_config(2);
    config.tol = 1e-3;
    config.max_iters = 200;

    ClusteringResult result = fit(normalize(ds, NormalizeMode::UnitColumn), config);
    CHECK(result.converged);
    CHECK(result.residual_ca < 1e-3);
    CHECK(result.residual_sum1 < 1e-3);
}

TEST_CASE("fit is deterministic") {
    MultiViewDataset ds = synth_linear_subspaces(10, 2, {6, 7}, 0.02, 17);
    SolverConfig config = fixture_config(2);
    config.seed = 99;
    config.max_iters = 30;

    ClusteringResult a = fit(normalize(ds, NormalizeMode::UnitColumn), config);
    ClusteringResult b = fit(normalize(ds, NormalizeMode::UnitColumn), config);
    CHECK(a.labels == b.labels);
    CHECK((a.consensus - b.consensus).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.embedding - b.embedding).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single-view solve with all couplings off is plain kernel self-expression") {
    // lambda = gamma = 0 in l1 mode: the auxiliary update must reduce to plain
    // soft thresholding and the consensus must stay empty
    MultiViewDataset ds = synth_linear_subspaces(8, 2, {5}, 0.01, 41);
    SolverConfig config = fixture_config(2);
    config.lambda = 0.0;
    config.gamma = 0.0;
    config.enriched = false;
    config.max_iters = 25;

    ClusteringResult result = fit(normalize(ds, NormalizeMode::UnitColumn), config);
    CHECK(result.consensus.cwiseAbs().maxCoeff() == 0.0);
    CHECK(result.iterations <= 25);
}

TEST_CASE("l1 consensus withstands a corrupted minority view") {
    // two clean views out of three: the entrywise median screens out the
    // noise view's representation
    double sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        MultiViewDataset ds = synth_linear_subspaces(30, 3, {10, 12, 11}, 0.01, seed);
        Rng noise_rng(seed + 5000);
        for (Eigen::Index i = 0; i < ds.views[1].rows(); ++i)
            for (Eigen::Index j = 0; j < ds.views[1].cols(); ++j) ds.views[1](i, j) = noise_rng.normal();
        ds = normalize(std::move(ds), NormalizeMode::UnitColumn);

        SolverConfig config = fixture_config(3);
        config.seed = seed;
        sum += *fit(ds, config).acc;
    }
    CHECK(sum / 3.0 >= 0.95);
}

TEST_CASE("fit validates its inputs") {
    MultiViewDataset ds = synth_linear_subspaces(5, 2, {4}, 0.01, 2);
    SolverConfig config = fixture_config(11);
    CHECK_THROWS_AS(fit(ds, config), config_error);

    config.k = 2;
    config.lambda = -1.0;
    CHECK_THROWS_AS(fit(ds, config), config_error);

    config.lambda = 1.0;
    MultiViewDataset ragged = ds;
    ragged.views.push_back(Matrix::Zero(3, 7));
    CHECK_THROWS_AS(fit(ragged, config), data_error);

    MultiViewDataset poisoned = ds;
    poisoned.views[0](0, 0) = std::nan("");
    CHECK_THROWS_AS(fit(poisoned, config), data_error);
}
