#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hypspec/cylinder_modes.hpp"
#include "hypspec/geometry.hpp"
#include "hypspec/gsvd.hpp"

namespace hypspec {

/// Modes k = 0..N per piece; for each k the order is (even, cos), (odd, cos)
/// and, for k > 0, (even, sin), (odd, sin).
struct BasisSpec {
    int N = 0;
    int pieces = 0;

    void validate() const;
    int per_piece() const { return 2 * (2 * N + 1); }
    int dimension() const { return per_piece() * pieces; }
    int column(int piece, const ModeIndex& mode) const;
    ModeIndex mode_of(int column) const;
};

struct SystemOptions {
    bool weight_rows = true;            ///< scale rows by sqrt(arclength weight)
    bool balance_normal_rows = true;    ///< extra 1/sqrt(1 + lambda) on normal rows
    RadialOptions radial{};
};

struct SystemMatrices {
    Eigen::MatrixXd q;  ///< [A - A~ ; B + B~]
    Eigen::MatrixXd r;  ///< [A ; A~ ; B ; B~]
};

SystemMatrices build_system(const SurfaceDecomposition& dec, const BasisSpec& basis,
                            const CollocationSet& coll, double lambda,
                            const SystemOptions& opts = {});

/// Collocation density rule: four points per wavelength 2 pi / sqrt(lambda)
/// and at least `oversample` times as many points as basis columns.
double default_density(const SurfaceDecomposition& dec, const BasisSpec& basis, double lambda,
                       double oversample = 2.0);

struct EigenvalueRecord {
    double lambda = 0.0;
    int multiplicity = 1;
    double sigma_min = 0.0;
    int basis_N = 0;
    double density = 0.0;
    double half_width = 0.0;
    double epsilon = 0.0;
    double eta = 0.0;
    double c_const = 1.0;
    std::vector<double> sigmas;  ///< the m smallest sigma values at lambda
};

struct SearchOptions {
    int N = 0;                  ///< 0: auto_basis_N per 20-wide lambda chunk
    double density = 0.0;       ///< 0: default_density at the top of the range
    double step = 0.05;         ///< below lambda = 50; scaled by sqrt(50/lambda) above
    int m = 6;                  ///< sigma values kept per sample
    double tau = 1e-12;
    double theta_rel = 1e-3;    ///< multiplicity threshold relative to the local background
    double theta_abs = 0.0;     ///< if > 0, overrides theta_rel
    double detect_ratio = 0.2;  ///< candidate if sigma_1 < ratio * local background
    double tol_lambda = 1e-11;
    double c_const = 1.0;       ///< constant C of the inclusion theorem (not rigorous)
    int threads = 0;
    SystemOptions system{};
};

class SurfaceProblem {
public:
    SurfaceProblem(SurfaceDecomposition dec, BasisSpec basis, CollocationSet coll,
                   SystemOptions opts = {});

    const SurfaceDecomposition& decomposition() const { return dec_; }
    const BasisSpec& basis() const { return basis_; }
    const CollocationSet& collocation() const { return coll_; }

    SystemMatrices system(double lambda) const;
    gsvd::GeneralizedSingulars singulars(double lambda, int m, double tau = 1e-12) const;
    Eigen::VectorXd sigma(double lambda, int m = 6, double tau = 1e-12) const;

private:
    SurfaceDecomposition dec_;
    BasisSpec basis_;
    CollocationSet coll_;
    SystemOptions opts_;
};

/// Scan grid: uniform step below 50, step * sqrt(50 / lambda) above.
std::vector<double> search_grid(double lo, double hi, double step);

/// Mode cutoff used when SearchOptions::N is 0: max(24, ceil(12 + 2 sqrt(lambda))).
int auto_basis_N(double lambda);

std::vector<EigenvalueRecord> find_eigenvalues(const SurfaceDecomposition& dec, double lambda_lo,
                                               double lambda_hi, const SearchOptions& opts);

/// [lambda - h, lambda + h] with h = ((1 + lambda) eps + eta) / (1 - eps).
std::pair<double, double> inclusion_interval(double lambda, double eps, double eta);

struct JumpDefect {
    double epsilon = 0.0;  ///< discrete L2 norm of (D phi, D_n phi) over the interface
    double eta = 0.0;
};

/// Coefficient vector is rescaled so the discrete norm ||R v|| equals 1.
JumpDefect jump_defect(const SurfaceProblem& problem, const Eigen::VectorXd& v, double lambda);

void write_eigenvalue_csv(std::ostream& os, const std::vector<EigenvalueRecord>& recs);
std::vector<EigenvalueRecord> read_eigenvalue_csv(std::istream& is);

}  // namespace hypspec
