#include "doctest.h"

#include <cmath>
#include <sstream>

#include "hypspec/errors.hpp"
#include "hypspec/surface_mps.hpp"

using namespace hypspec;

namespace {

constexpr double kLambda1 = 3.8388872588421995;

const SurfaceDecomposition& bolza() {
    static const SurfaceDecomposition dec = assemble_surface(bolza_mw_coordinates());
    return dec;
}

SurfaceProblem bolza_problem(int N, double lambda_top = 10.0, double density_factor = 1.0) {
    BasisSpec basis{N, 2};
    const double dens = density_factor * default_density(bolza(), basis, lambda_top);
    return SurfaceProblem(bolza(), basis, collocate(bolza(), dens));
}

}  // namespace

TEST_CASE("basis indexing") {
    BasisSpec b{5, 2};
    CHECK(b.dimension() == 2 * (2 * 5 + 1) * 2);
    for (int c = 0; c < b.dimension(); ++c) CHECK(b.column(c / b.per_piece(), b.mode_of(c)) == c);
    CHECK(b.mode_of(0).k == 0);
    CHECK(b.mode_of(1).parity == Parity::Odd);
    CHECK(b.mode_of(4).angular == Angular::Sin);
    CHECK_THROWS_AS(b.column(2, ModeIndex{}), InvalidArgument);
    CHECK_THROWS_AS((BasisSpec{-1, 2}.validate()), InvalidArgument);
}

TEST_CASE("system shapes and the constant function") {
    BasisSpec basis{6, 2};
    const auto coll = collocate(bolza(), 5.0);
    const auto sys = build_system(bolza(), basis, coll, 0.0);
    const auto npts = static_cast<Eigen::Index>(coll.size());
    CHECK(sys.q.rows() == 2 * npts);
    CHECK(sys.r.rows() == 4 * npts);
    CHECK(sys.q.cols() == basis.dimension());
    CHECK(sys.r.cols() == basis.dimension());
    // The even k = 0 mode at lambda = 0 is the constant 1 on each piece.
    Eigen::VectorXd v = Eigen::VectorXd::Zero(basis.dimension());
    v(basis.column(0, ModeIndex{})) = 1.0;
    v(basis.column(1, ModeIndex{})) = 1.0;
    CHECK((sys.q * v).norm() < 1e-12);
    CHECK((sys.r * v).norm() > 1.0);
    const auto jd = jump_defect(SurfaceProblem(bolza(), basis, coll), v, 0.0);
    CHECK(jd.epsilon < 1e-12);
    // Basis functions of one piece vanish on points owned by the other.
    for (Eigen::Index i = 0; i < npts; ++i) {
        const auto& c = coll[i];
        for (int piece = 0; piece < 2; ++piece) {
            if (piece == c.piece || piece == c.piece_tilde) continue;
            for (int j = 0; j < basis.per_piece(); ++j) CHECK(sys.r(i, piece * basis.per_piece() + j) == 0.0);
        }
    }
}

TEST_CASE("sigma dips at the first eigenvalue and is large in the gap") {
    const auto pr = bolza_problem(16);
    const double at = pr.sigma(kLambda1, 1)(0);
    const double gap = pr.sigma(4.5, 1)(0);
    CHECK(at < 1e-3 * gap);
    CHECK(gap > 1e-2);
    CHECK(pr.sigma(0.0, 1)(0) < 1e-10);
}

TEST_CASE("sigma at lambda_1 decays geometrically in N") {
    double prev = 1.0;
    for (int N : {12, 16, 20, 24}) {
        const double s = bolza_problem(N).sigma(kLambda1, 1)(0);
        CHECK(s < 0.5 * prev);
        prev = s;
    }
    CHECK(prev < 1e-7);
}

TEST_CASE("jump defect of the lambda_1 eigenvector") {
    const auto p20 = bolza_problem(20);
    const auto p24 = bolza_problem(24);
    const auto g20 = p20.singulars(kLambda1, 1);
    const auto g24 = p24.singulars(kLambda1, 1);
    const auto j20 = jump_defect(p20, g20.vectors.col(0), kLambda1);
    const auto j24 = jump_defect(p24, g24.vectors.col(0), kLambda1);
    CHECK(j24.epsilon < j20.epsilon);
    CHECK(j24.epsilon <= 10.0 * g24.sigma(0));
    CHECK(g24.sigma(0) <= 10.0 * j24.epsilon);
    CHECK(j24.eta >= 0.0);

    // Shifting the gluing of one closed curve breaks the eigenfunction.
    auto bad = bolza();
    bad.interface[0].offset += 0.3;
    BasisSpec basis{24, 2};
    const SurfaceProblem wrong(bad, basis, collocate(bad, default_density(bad, basis, 10.0)));
    const auto jw = jump_defect(wrong, g24.vectors.col(0), kLambda1);
    CHECK(jw.epsilon > 1e3 * j24.epsilon);
    CHECK(jw.epsilon > 1e-3);
}

TEST_CASE("inclusion interval") {
    const auto [a, b] = inclusion_interval(2.0, 0.0, 0.0);
    CHECK(a == 2.0);
    CHECK(b == 2.0);
    const auto i2 = inclusion_interval(3.84, 1e-6, 0.0);
    CHECK(std::abs((i2.second - i2.first) / 2.0 - 4.84e-6 / (1.0 - 1e-6)) < 1e-15);
    const auto i3 = inclusion_interval(1.0, 0.5, 0.1);
    CHECK(std::abs((i3.second - i3.first) / 2.0 - 2.2) < 1e-14);
    CHECK_THROWS_AS(inclusion_interval(1.0, 1.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(inclusion_interval(1.0, 0.1, -1.0), InvalidArgument);
}

TEST_CASE("search grid") {
    const auto g = search_grid(0.0, 1.0, 0.25);
    CHECK(g.size() == 5);
    const auto h = search_grid(49.0, 60.0, 0.05);
    for (std::size_t i = 1; i < h.size(); ++i) {
        CHECK(h[i] > h[i - 1]);
        if (h[i - 1] >= 50.0) CHECK(std::abs(h[i] - h[i - 1] - 0.05 * std::sqrt(50.0 / h[i - 1])) < 1e-12);
    }
    CHECK(auto_basis_N(3.0) == 24);
    CHECK(auto_basis_N(150.0) == 37);
    CHECK_THROWS_AS(search_grid(1.0, 1.0, 0.1), InvalidArgument);
}

TEST_CASE("eigenvalue search on short ranges") {
    SearchOptions o;
    o.N = 24;
    SUBCASE("[3.5, 9]") {
        const auto r = find_eigenvalues(bolza(), 3.5, 9.0, o);
        REQUIRE(r.size() == 3);
        const double want[3] = {3.83888725884219951858, 5.35360134118905041091, 8.24955481520065812189};
        const int mult[3] = {3, 4, 2};
        for (int i = 0; i < 3; ++i) {
            CHECK(std::abs(r[i].lambda - want[i]) < 1e-7);
            CHECK(r[i].multiplicity == mult[i]);
            CHECK(r[i].half_width >= 0.0);
            CHECK(r[i].basis_N == 24);
        }
        CHECK(std::abs(r[0].lambda - kLambda1) < 1e-8);
        // The reported interval contains the reference value.
        for (int i = 0; i < 3; ++i) CHECK(std::abs(r[i].lambda - want[i]) <= r[i].half_width);
    }
    SUBCASE("gap [4.0, 4.5]") { CHECK(find_eigenvalues(bolza(), 4.0, 4.5, o).empty()); }
    SUBCASE("[22, 24]") {
        const auto r = find_eigenvalues(bolza(), 22.0, 24.0, o);
        REQUIRE(r.size() == 1);
        CHECK(std::abs(r[0].lambda - 23.0785584813816351550) < 1e-6);
        CHECK(r[0].multiplicity == 1);
    }
    SUBCASE("zero is reported when the range contains it") {
        const auto r = find_eigenvalues(bolza(), -0.2, 0.5, o);
        REQUIRE(r.size() == 1);
        CHECK(r[0].lambda == 0.0);
        CHECK(r[0].multiplicity == 1);
    }
}

TEST_CASE("lambda_1 is stable under N + 4 and denser collocation") {
    SearchOptions a, b;
    a.N = 20;
    b.N = 24;
    b.density = 1.5 * default_density(bolza(), BasisSpec{24, 2}, 4.2);
    const auto ra = find_eigenvalues(bolza(), 3.7, 4.0, a);
    const auto rb = find_eigenvalues(bolza(), 3.7, 4.0, b);
    REQUIRE(ra.size() == 1);
    REQUIRE(rb.size() == 1);
    CHECK(std::abs(ra[0].lambda - rb[0].lambda) < ra[0].half_width);
}

TEST_CASE("search output is identical for 1 and 4 threads") {
    SearchOptions o;
    o.N = 16;
    o.threads = 1;
    std::ostringstream s1, s4;
    write_eigenvalue_csv(s1, find_eigenvalues(bolza(), 5.0, 5.6, o));
    o.threads = 4;
    write_eigenvalue_csv(s4, find_eigenvalues(bolza(), 5.0, 5.6, o));
    CHECK(s1.str() == s4.str());
    CHECK(s1.str().find('\n') + 1 < s1.str().size());
}

TEST_CASE("eigenvalue CSV") {
    std::vector<EigenvalueRecord> recs(3);
    recs[0] = {0.0, 1, 0.0, 24, 0, 0.0};
    recs[1] = {3.8388872588421995, 3, 1.2345678901234567e-9, 24, 0, 7.5e-9};
    recs[2] = {5.353601341189050, 4, 2e-9, 30, 0, std::numeric_limits<double>::infinity()};
    std::stringstream ss;
    write_eigenvalue_csv(ss, recs);
    CHECK(ss.str().rfind("lambda,multiplicity,sigma_min,half_width,basis_N\n", 0) == 0);
    const auto back = read_eigenvalue_csv(ss);
    REQUIRE(back.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(back[i].lambda == recs[i].lambda);
        CHECK(back[i].multiplicity == recs[i].multiplicity);
        CHECK(back[i].sigma_min == recs[i].sigma_min);
        CHECK(back[i].half_width == recs[i].half_width);
        CHECK(back[i].basis_N == recs[i].basis_N);
    }
    std::stringstream again;
    write_eigenvalue_csv(again, back);
    std::stringstream first;
    write_eigenvalue_csv(first, recs);
    CHECK(again.str() == first.str());

    std::stringstream bad_header("lam,mult\n1,1\n");
    CHECK_THROWS_AS(read_eigenvalue_csv(bad_header), InvalidArgument);
    std::stringstream unsorted("lambda,multiplicity,sigma_min,half_width,basis_N\n2,1,0,0,1\n1,1,0,0,1\n");
    CHECK_THROWS_AS(read_eigenvalue_csv(unsorted), InvalidArgument);
    std::stringstream zero_mult("lambda,multiplicity,sigma_min,half_width,basis_N\n2,0,0,0,1\n");
    CHECK_THROWS_AS(read_eigenvalue_csv(zero_mult), InvalidArgument);
    std::stringstream junk("lambda,multiplicity,sigma_min,half_width,basis_N\n2,x,0,0,1\n");
    CHECK_THROWS_AS(read_eigenvalue_csv(junk), InvalidArgument);
    std::stringstream short_row("lambda,multiplicity,sigma_min,half_width,basis_N\n2,1,0\n");
    CHECK_THROWS_AS(read_eigenvalue_csv(short_row), InvalidArgument);
}
