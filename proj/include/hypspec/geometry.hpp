#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hypspec {

using cplx = std::complex<double>;

namespace hyp {

/// Upper half-plane point for Fermi coordinates about the imaginary axis:
/// z = e^t (tanh rho + i sech rho).
cplx fermi_to_halfplane(double rho, double t);
/// Inverse chart: rho = asinh(x/y), t = log|z|.
std::array<double, 2> halfplane_to_fermi(cplx z);

double distance(cplx z, cplx w);

/// Mobius action of a 2x2 real matrix on the upper half-plane.
cplx apply(const Eigen::Matrix2d& g, cplx z);

/// Translation by h along the imaginary axis (multiplication by e^h).
Eigen::Matrix2d axis_translation(double h);
/// Translation by h along the unit-circle geodesic; moves i towards +1.
Eigen::Matrix2d circle_translation(double h);

/// Unit Euclidean tangent at p of the geodesic from p to q.
cplx geodesic_tangent(cplx p, cplx q);

/// Interior angle at p between geodesics towards q1 and q2, in [0, pi].
double angle(cplx p, cplx q1, cplx q2);

}  // namespace hyp

/// Geodesic segment z(s) = G(i e^{u0 + dir s}), s in [0, length], unit speed.
struct GeodesicArc {
    Eigen::Matrix2d g = Eigen::Matrix2d::Identity();
    double u0 = 0.0;
    double dir = 1.0;
    double length = 0.0;

    cplx point(double s) const;
    /// Velocity dz/ds in the half-plane.
    cplx velocity(double s) const;
    std::array<double, 2> fermi(double s) const;
    /// (d rho/ds, dt/ds); unit length in the Fermi metric.
    std::array<double, 2> fermi_velocity(double s) const;
};

struct Hexagon {
    std::array<double, 3> a{};  ///< a1, a2, a3
    std::array<double, 3> b{};  ///< b_i opposite a_i
    /// Vertices in order along a1, b3, a2, b1, a3, b2 (V0 -> V1 is a1).
    std::array<cplx, 6> vertices{};
    std::array<double, 6> side_lengths() const;
    std::array<double, 6> angles() const;
};

/// Right-angled hexagon with alternate sides a1, a2, a3. Vertex V0 sits at i
/// with side a1 on the imaginary axis, so the a1 geodesic is the core of the
/// Fermi chart used for pieces.
Hexagon right_angled_hexagon(double a1, double a2, double a3);

struct Pants {
    std::array<double, 3> lengths{};
    Hexagon hexagon;
    double area() const;
};

Pants pants_from_lengths(double l1, double l2, double l3);

enum class SideKind { Core, Boundary2, Boundary3, Seam, SeamMirror };

/// One boundary side of a cylinder piece, parameterized by arclength.
struct PieceSide {
    SideKind kind = SideKind::Core;
    double length = 0.0;
    GeodesicArc arc;  ///< unused for Core

    /// Fermi coordinates (rho, t) of the point at arclength s.
    std::array<double, 2> point(double s) const;
    /// Outward unit normal (n_rho, n_t) in the Fermi metric.
    std::array<double, 2> normal(double s) const;
};

/// Pants cut along seam b1 and laid out in the Fermi chart of its first
/// boundary geodesic: 0 <= rho <= f(t). Sides: core circle, the arc of the
/// third boundary (centered at t = 0), seam b1, the arc of the second boundary
/// (centered at t = l1/2), mirrored seam. The core uses t as parameter; the
/// outer arcs run against t, so the boundary is traversed with the region on
/// the left in (t, rho).
struct CylinderPiece {
    int id = 0;
    double core_length = 0.0;
    std::array<double, 3> boundary_lengths{};
    std::vector<PieceSide> sides;
    double rho_max = 0.0;  ///< largest rho on the piece

    double area() const;
    /// Index of the side carrying boundary slot 0, 1 or 2.
    int side_of_slot(int slot) const;
};

CylinderPiece cut_pants_to_cylinder_piece(const Pants& pants, int id = 0);

struct FNEdge {
    int v1 = 0, v2 = 0;
    double length = 0.0;
    double twist = 0.0;  ///< fraction of length
};

/// Fenchel-Nielsen data on a trivalent graph. Boundary slots of each vertex
/// are assigned in order of first appearance in the edge list (a loop takes
/// two consecutive slots); slot 0 becomes the cylinder core.
struct FenchelNielsen {
    int genus = 2;
    std::vector<FNEdge> edges;
    void validate() const;
};

/// Identification of side (piece_a, side_a) with (piece_b, side_b): the point
/// at arclength s on a goes to arclength wrap(sign*s + offset) on b, wrapped
/// modulo the length when the curve is closed.
struct SegmentPair {
    int piece_a = 0, side_a = 0;
    int piece_b = 0, side_b = 0;
    double length = 0.0;
    double sign = -1.0;
    double offset = 0.0;
    bool closed = true;

    double partner(double s) const;
};

struct SurfaceDecomposition {
    int genus = 2;
    std::vector<CylinderPiece> pieces;
    std::vector<SegmentPair> interface;

    double area() const;
    double interface_length() const;
};

SurfaceDecomposition assemble_surface(const FenchelNielsen& fn);

/// Bolza surface Fenchel-Nielsen data.
FenchelNielsen bolza_mw_coordinates();
FenchelNielsen bolza_symmetric_coordinates();

struct CollocationPoint {
    int piece = 0;  ///< x+ side
    double rho = 0.0, t = 0.0;
    double n_rho = 0.0, n_t = 0.0;
    int piece_tilde = 0;  ///< x- side
    double rho_tilde = 0.0, t_tilde = 0.0;
    double n_rho_tilde = 0.0, n_t_tilde = 0.0;
    double weight = 0.0;  ///< arclength weight
    int segment = 0;
};

using CollocationSet = std::vector<CollocationPoint>;

/// Midpoint rule on every interface segment with round(length * density)
/// points (at least one). Corners are never sampled.
CollocationSet collocate(const SurfaceDecomposition& dec, double points_per_unit_length);

}  // namespace hypspec
