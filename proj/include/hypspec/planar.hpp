#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hypspec/gsvd.hpp"

namespace hypspec::planar {

/// Bounded planar domain with a closed boundary curve gamma(t), t in [0, 1].
struct PlanarDomain {
    std::string name;
    std::function<Eigen::Vector2d(double)> curve;
    std::function<Eigen::Vector2d(double)> velocity;  ///< d gamma / dt
    /// Zero on the boundary, negative inside.
    std::function<double(const Eigen::Vector2d&)> level;
    double area = 0.0;
    Eigen::Vector2d box_min{0.0, 0.0}, box_max{0.0, 0.0};

    bool inside(const Eigen::Vector2d& x) const { return level(x) < 0.0; }
    double perimeter() const;
    void validate() const;
};

/// x^2/a^2 + y^2/b^2 < 1.
PlanarDomain ellipse(double a = 2.0, double b = 1.0);
PlanarDomain disk(double r = 1.0);
/// c * Omega.
PlanarDomain scaled(const PlanarDomain& d, double c);

/// cos(k_j . x) and sin(k_j . x) with |k_j| = sqrt(lambda) and directions
/// rotation + pi j / n_dir. Columns are ordered cos_0, sin_0, cos_1, ...
struct PlaneWaveBasis {
    double k = 0.0;
    std::vector<double> theta;

    int size() const { return 2 * static_cast<int>(theta.size()); }
    Eigen::RowVectorXd values(const Eigen::Vector2d& x) const;
    /// Rows d/dx and d/dy.
    Eigen::Matrix<double, 2, Eigen::Dynamic> gradients(const Eigen::Vector2d& x) const;
};

PlaneWaveBasis plane_wave_basis(double lambda, int n_dir, double rotation = 0.0);

/// Quadrature node on the boundary.
struct BoundaryNode {
    Eigen::Vector2d x;
    double weight = 0.0;  ///< arclength
};

/// M nodes at t = (i + 1/2) / M.
std::vector<BoundaryNode> boundary_nodes(const PlanarDomain& d, int m);

/// Q points drawn uniformly from the bounding box and kept if inside. The
/// generator is mt19937_64 with a fixed integer-to-double map, so the points
/// are identical on every platform.
std::vector<Eigen::Vector2d> interior_points(const PlanarDomain& d, int q, std::uint64_t seed);

struct Discretization {
    int n_dir = 16;
    int m_boundary = 0;  ///< 0: 4 * basis size
    int q_interior = 0;  ///< 0: 4 * basis size
    std::uint64_t seed = 1;
    double rotation = 0.0;
};

/// Fixed point sets for one basis size.
class PlanarProblem {
public:
    PlanarProblem(PlanarDomain domain, const Discretization& disc);

    const PlanarDomain& domain() const { return dom_; }
    const Discretization& discretization() const { return disc_; }
    const std::vector<BoundaryNode>& boundary() const { return bnd_; }
    const std::vector<Eigen::Vector2d>& interior() const { return pts_; }

    PlaneWaveBasis basis(double lambda) const { return plane_wave_basis(lambda, disc_.n_dir, disc_.rotation); }

    /// A: boundary values scaled by sqrt(arclength); B: interior values scaled
    /// by sqrt(area / Q). Then ||A v|| / ||B v|| approximates the ratio of L2
    /// norms on the boundary and in the domain.
    std::pair<Eigen::MatrixXd, Eigen::MatrixXd> matrices(double lambda) const;

    gsvd::GeneralizedSingulars singulars(double lambda, int m, double tau = 1e-12) const;
    Eigen::VectorXd sigma(double lambda, int m, double tau = 1e-12) const;

private:
    PlanarDomain dom_;
    Discretization disc_;
    std::vector<BoundaryNode> bnd_;
    std::vector<Eigen::Vector2d> pts_;
};

Eigen::VectorXd planar_sigma(const PlanarDomain& d, double lambda, int m, const Discretization& disc,
                             double tau = 1e-12);

/// (sqrt 2 eps + eps^2) / (1 - eps^2), relative to lambda.
double fhm_bound(double epsilon);

struct SupEstimate {
    double epsilon = 0.0;   ///< sqrt|Omega| * sup|u| / ||u||
    double sup = 0.0;       ///< sampled maximum plus the Lipschitz margin
    double sampled = 0.0;   ///< sampled maximum alone
    double margin = 0.0;
    double l2_norm = 0.0;   ///< Monte Carlo estimate of ||u||_{L2}
    double l2_stderr = 0.0;
    bool rigorous = false;  ///< always false
};

/// Non-rigorous estimate of eps for u = sum v_j phi_j. The boundary is sampled
/// at dense_factor * M points; the margin is the largest node spacing times
/// the largest sampled tangential derivative. The L2 norm uses Q uniform
/// points drawn with seed + 1.
SupEstimate boundary_sup_estimate(const PlanarProblem& pr, double lambda, const Eigen::VectorXd& v,
                                  int dense_factor = 10);

struct SearchOptions {
    Discretization disc;
    int m = 4;
    double tau = 1e-12;
    double detect_ratio = 0.2;
    double theta_rel = 1e-3;
    double tol_lambda = 1e-11;
    int threads = 0;
};

struct PlanarRecord {
    double lambda = 0.0;
    int multiplicity = 1;
    double sigma_min = 0.0;
    double epsilon = 0.0;
    double rel_half_width = 0.0;  ///< fhm_bound(epsilon); infinite when epsilon >= 1
    double half_width = 0.0;
    std::vector<double> sigmas;
};

/// Scan of sigma on a uniform grid, refined as in the surface search.
std::vector<PlanarRecord> planar_find_eigenvalues(const PlanarDomain& d, double lambda_lo, double lambda_hi,
                                                  double step, const SearchOptions& opts = {});

}  // namespace hypspec::planar
