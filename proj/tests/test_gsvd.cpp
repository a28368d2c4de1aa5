#include "doctest.h"

#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "hypspec/errors.hpp"
#include "hypspec/gsvd.hpp"
#include "hypspec/parallel.hpp"

using namespace hypspec;
using namespace hypspec::gsvd;

namespace {

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int r, int c) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = n(rng);
    return m;
}

// sqrt of generalized eigenvalues of (Q^T Q, R^T R), ascending.
Eigen::VectorXd dense_oracle(const Eigen::MatrixXd& q, const Eigen::MatrixXd& r) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(q.transpose() * q, r.transpose() * r);
    return es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
}

}  // namespace

TEST_CASE("trivial pairs") {
    std::mt19937_64 rng(1);
    const Eigen::MatrixXd r = random_matrix(rng, 30, 10);
    SUBCASE("Q = 0") {
        const auto g = smallest_generalized_singulars(Eigen::MatrixXd::Zero(12, 10), r, 3);
        CHECK(g.sigma(0) == 0.0);
        CHECK(std::abs((r * g.vectors.col(0)).norm() - 1.0) < 1e-10);
    }
    SUBCASE("Q = R") {
        const Eigen::MatrixXd sq = random_matrix(rng, 10, 10);
        const auto g = smallest_generalized_singulars(sq, sq, 10);
        for (int i = 0; i < 10; ++i) CHECK(std::abs(g.sigma(i) - 1.0) < 1e-10);
    }
    CHECK_THROWS_AS(smallest_generalized_singulars(r, random_matrix(rng, 30, 9), 1), InvalidArgument);
    CHECK_THROWS_AS(smallest_generalized_singulars(r, r, 0), InvalidArgument);
    CHECK_THROWS_AS(smallest_generalized_singulars(r, r, 1, 1.5), InvalidArgument);
    CHECK_THROWS_AS(smallest_generalized_singulars(r, Eigen::MatrixXd::Zero(30, 10), 1), NumericalFailure);
}

TEST_CASE("oracle equivalence on random pairs") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::MatrixXd q = random_matrix(rng, 50, 20);
        const Eigen::MatrixXd r = random_matrix(rng, 50, 20);
        const auto g = smallest_generalized_singulars(q, r, 4);
        const auto o = dense_oracle(q, r);
        for (int i = 0; i < 4; ++i) {
            CHECK(std::abs(g.sigma(i) - o(i)) < 1e-8 * (1.0 + o(i)));
            const Eigen::VectorXd v = g.vectors.col(i);
            CHECK(std::abs((q * v).norm() / (r * v).norm() - g.sigma(i)) < 1e-10);
            CHECK(std::abs((r * v).norm() - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("rank-deficient R: quotient restricted to the retained subspace") {
    std::mt19937_64 rng(3);
    const Eigen::MatrixXd base = random_matrix(rng, 40, 8);
    Eigen::MatrixXd r(40, 10);
    r << base, base.col(0) + base.col(1), base.col(2) - 2.0 * base.col(5);
    const Eigen::MatrixXd q = random_matrix(rng, 25, 10);
    const auto g = smallest_generalized_singulars(q, r, 3);
    CHECK(g.rank == 8);
    for (int i = 0; i < 3; ++i) {
        const Eigen::VectorXd v = g.vectors.col(i);
        CHECK(std::abs((q * v).norm() / (r * v).norm() - g.sigma(i)) < 1e-9);
    }
    // Oracle on the retained subspace, which is the complement of the null
    // space taken in column-equilibrated coordinates.
    Eigen::VectorXd d(10);
    for (int j = 0; j < 10; ++j) d(j) = 1.0 / r.col(j).norm();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(r * d.asDiagonal(), Eigen::ComputeFullV);
    const Eigen::MatrixXd basis = d.asDiagonal() * svd.matrixV().leftCols(8);
    const auto o = dense_oracle(q * basis, r * basis);
    CHECK(std::abs(g.sigma(0) - o(0)) < 1e-8);
}

TEST_CASE("scale and column-permutation invariance") {
    std::mt19937_64 rng(8);
    const Eigen::MatrixXd q = random_matrix(rng, 30, 12);
    const Eigen::MatrixXd r = random_matrix(rng, 36, 12);
    const auto base = smallest_generalized_singulars(q, r, 3);
    for (double c : {0.5, 3.0}) {
        const auto g = smallest_generalized_singulars(c * q, r, 3);
        for (int i = 0; i < 3; ++i) CHECK(std::abs(g.sigma(i) - c * base.sigma(i)) < 1e-10);
        const double align = std::abs(g.vectors.col(0).normalized().dot(base.vectors.col(0).normalized()));
        CHECK(std::abs(align - 1.0) < 1e-10);
    }
    std::vector<int> perm(12);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd qp(q.rows(), 12), rp(r.rows(), 12);
    for (int j = 0; j < 12; ++j) {
        qp.col(j) = q.col(perm[j]);
        rp.col(j) = r.col(perm[j]);
    }
    const auto g = smallest_generalized_singulars(qp, rp, 3);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(g.sigma(i) - base.sigma(i)) < 1e-12);
}

TEST_CASE("scan with a constructed builder") {
    std::mt19937_64 rng(4);
    const Eigen::MatrixXd r0 = random_matrix(rng, 15, 5);
    const Builder b = [r0](double lambda) { return std::make_pair(Eigen::MatrixXd((lambda - 5.0) * r0), r0); };
    const auto curve = scan(3.0, 7.0, 0.3, b, 2);
    CHECK_NOTHROW(curve.validate());
    std::size_t best = 0;
    for (std::size_t i = 0; i < curve.samples.size(); ++i) {
        CHECK(std::abs(curve.samples[i].sigma[0] - std::abs(curve.samples[i].lambda - 5.0)) < 1e-12);
        if (curve.samples[i].sigma[0] < curve.samples[best].sigma[0]) best = i;
    }
    double nearest = 1e9;
    for (const auto& s : curve.samples) nearest = std::min(nearest, std::abs(s.lambda - 5.0));
    CHECK(std::abs(std::abs(curve.samples[best].lambda - 5.0) - nearest) < 1e-15);
    CHECK(local_minima(curve) == std::vector<std::size_t>{best});

    CHECK(scan(0.0, 1.0, 0.5, b, 1).samples.size() == 3);
    CHECK_THROWS_AS(scan(1.0, 0.0, 0.1, b, 1), InvalidArgument);
    CHECK_THROWS_AS(scan(0.0, 1.0, 0.0, b, 1), InvalidArgument);
}

TEST_CASE("scan errors carry the offending lambda") {
    const SigmaFn f = [](double l) -> Eigen::VectorXd {
        if (l > 0.45) throw NumericalFailure("boom");
        return Eigen::VectorXd::Constant(1, l);
    };
    try {
        scan_grid(uniform_grid(0.0, 1.0, 0.25), f, 1);
        FAIL("expected failure");
    } catch (const NumericalFailure& e) {
        CHECK(std::string(e.what()).find("0.5") != std::string::npos);
    }
}

TEST_CASE("scan is independent of evaluation order and thread count") {
    std::mt19937_64 rng(10);
    const Eigen::MatrixXd a = random_matrix(rng, 40, 10), c = random_matrix(rng, 40, 10);
    const Eigen::MatrixXd r = random_matrix(rng, 60, 10);
    const SigmaFn f = [&](double l) {
        const Eigen::MatrixXd q = a + std::sin(l) * c;
        return smallest_generalized_singulars(q, r, 3).sigma;
    };
    const auto grid = uniform_grid(0.0, 3.0, 0.05);
    auto reversed = grid;
    std::reverse(reversed.begin(), reversed.end());
    const auto one = scan_grid(grid, f, 1);
    const auto four = scan_grid(reversed, f, 4);
    REQUIRE(one.samples.size() == four.samples.size());
    const std::size_t n = grid.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (int j = 0; j < 3; ++j) {
            CHECK(std::abs(one.samples[i].sigma[j] - four.samples[n - 1 - i].sigma[j]) <= 1e-12);
        }
    }
}

TEST_CASE("golden-section refinement") {
    int outside = 0;
    const double a = 4.6, c = 5.3;
    auto f1 = [&](double l) {
        if (l < a || l > c) ++outside;
        return std::abs(l - 5.0);
    };
    const auto m1 = refine_minimum({a, 4.95, c}, f1, 1e-10);
    CHECK(std::abs(m1.lambda - 5.0) <= 1e-10);
    CHECK(outside == 0);
    auto f2 = [](double l) { return (l - 2.0) * (l - 2.0) + 0.1; };
    // A quadratic minimum is only resolvable to about sqrt(machine eps).
    const auto m2 = refine_minimum({1.0, 2.2, 3.0}, f2, 1e-7);
    CHECK(std::abs(m2.lambda - 2.0) <= 1e-7);
    CHECK(std::abs(m2.sigma - 0.1) < 1e-10);
    CHECK_THROWS_AS(refine_minimum({1.0, 3.0, 2.0}, f2, 1e-9), InvalidArgument);
    CHECK_THROWS_AS(refine_minimum({1.0, 1.5, 3.0}, [](double l) { return l; }, 1e-9), InvalidArgument);
    CHECK_THROWS_AS(refine_minimum({1.0, 2.0, 3.0}, f2, 0.0), InvalidArgument);
    // Determinism on a flat function: ties keep the left part.
    const auto flat1 = refine_minimum({0.0, 0.5, 2.0}, [](double l) { return l < 0.4 ? 1.0 : (l > 1.8 ? 1.0 : 0.0); }, 1e-6);
    const auto flat2 = refine_minimum({0.0, 0.5, 2.0}, [](double l) { return l < 0.4 ? 1.0 : (l > 1.8 ? 1.0 : 0.0); }, 1e-6);
    CHECK(flat1.lambda == flat2.lambda);
    CHECK(flat1.lambda < 0.5);
}

TEST_CASE("multiplicity estimate") {
    CHECK(multiplicity_estimate({1e-9, 1e-8, 1e-8, 0.3}, 1e-4) == 3);
    CHECK(multiplicity_estimate({0.2, 0.3}, 1e-4) == 0);
    CHECK(multiplicity_estimate({}, 1.0) == 0);
}

TEST_CASE("parallel helpers") {
    const auto v = parallel::map<int>(100, 4, [](std::size_t i) { return static_cast<int>(i * i); });
    for (int i = 0; i < 100; ++i) CHECK(v[i] == i * i);
    try {
        parallel::for_each_index(50, 4, [](std::size_t i) {
            if (i == 17 || i == 31) throw std::runtime_error(std::to_string(i));
        });
        FAIL("expected exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "17");
    }
    std::vector<double> x(1001);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 1.0 / (1.0 + static_cast<double>(i));
    double direct = 0.0;
    for (double e : x) direct += e;
    CHECK(std::abs(parallel::tree_sum(x) - direct) < 1e-13);
    CHECK(parallel::tree_sum({}) == 0.0);
}
