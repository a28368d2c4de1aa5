#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hypspec::gsvd {

struct GeneralizedSingulars {
    Eigen::VectorXd sigma;    ///< ascending
    Eigen::MatrixXd vectors;  ///< column i is v_i, scaled so ||R v_i|| = 1
    int rank = 0;             ///< retained dimension of the column space of R
};

/// The m smallest values of ||Q v|| / ||R v|| over the part of the column
/// space where R is numerically nonsingular (singular values of R below
/// tau * sigma_max(R) are discarded). Columns are equilibrated first; the
/// discarded directions are those of the equilibrated R.
GeneralizedSingulars smallest_generalized_singulars(const Eigen::MatrixXd& q,
                                                    const Eigen::MatrixXd& r, int m,
                                                    double tau = 1e-12);

using Builder = std::function<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>(double)>;
using SigmaFn = std::function<Eigen::VectorXd(double)>;

struct CurveSample {
    double lambda = 0.0;
    std::vector<double> sigma;
};

struct SingularCurve {
    std::vector<CurveSample> samples;
    void validate() const;
};

/// Uniform grid lo, lo + step, ... up to hi (inclusive within rounding).
std::vector<double> uniform_grid(double lo, double hi, double step);

/// Evaluates sigma on every grid point, in parallel; output is in grid order.
SingularCurve scan_grid(const std::vector<double>& grid, const SigmaFn& sigma, int threads = 0);
SingularCurve scan(double lo, double hi, double step, const Builder& builder, int m,
                   double tau = 1e-12, int threads = 0);

SigmaFn sigma_from_builder(const Builder& builder, int m, double tau = 1e-12);

struct Bracket {
    double a = 0.0, b = 0.0, c = 0.0;
};

struct Minimum {
    double lambda = 0.0;
    double sigma = 0.0;
    int evaluations = 0;
};

/// Golden-section search on f inside [a, c] until the bracket is no wider than
/// tol. Requires f(b) < min(f(a), f(c)). Exact ties keep the left part.
Minimum refine_minimum(const Bracket& br, const std::function<double(double)>& f, double tol);

/// Number of sigma values below theta.
int multiplicity_estimate(const std::vector<double>& sigma, double theta);

/// Indices of strict interior local minima of sigma_1 along the curve.
std::vector<std::size_t> local_minima(const SingularCurve& curve, int which = 0);

/// sigma_1..sigma_m at lambda, evaluated with the discretization attached to
/// the grid point `anchor` (so a refinement bracket sees one fixed system).
using AnchoredSigma = std::function<Eigen::VectorXd(double anchor, double lambda, int m)>;

struct DetectOptions {
    int m = 6;
    double detect_ratio = 0.2;  ///< candidate if sigma_j < ratio * local background
    double theta_rel = 1e-3;    ///< multiplicity threshold relative to the local background
    double theta_abs = 0.0;     ///< if > 0, overrides theta_rel
    double window = 2.0;        ///< half-width in lambda of the background median window
    double tol_lambda = 1e-11;
    int threads = 0;
};

struct DetectedMinimum {
    double lambda = 0.0;
    std::vector<double> sigmas;  ///< sigma_1..sigma_m at lambda
    int multiplicity = 0;
    double theta = 0.0;
    double anchor = 0.0;
};

/// Scans the grid, refines strict local minima of sigma_1 that sit well below
/// the local background (median of sigma_1 nearby), then looks for dips of
/// higher sigma_j that no refined minimum explains. Minima whose sigma_1 is
/// not below the multiplicity threshold are dropped; results closer than
/// 1e-6 relative are merged. Sorted by lambda.
std::vector<DetectedMinimum> detect_minima(const std::vector<double>& grid, const AnchoredSigma& sigma,
                                           const DetectOptions& opts);

}  // namespace hypspec::gsvd
