#include "hypspec/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "hypspec/errors.hpp"
#include "hypspec/specfun.hpp"

namespace hypspec {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

Eigen::Matrix2d normalized(Eigen::Matrix2d g) {
    const double det = g.determinant();
    if (!(det > 0.0)) throw NumericalFailure("geometry: non-orientation-preserving Mobius map");
    return g / std::sqrt(det);
}

// Geodesic arc from p to q, unit speed.
GeodesicArc arc_between(cplx p, cplx q) {
    Eigen::Matrix2d g;
    if (std::abs(p.real() - q.real()) <= 1e-14 * (1.0 + std::abs(p) + std::abs(q))) {
        g << 1.0, p.real(), 0.0, 1.0;
    } else {
        const double c = (std::norm(q) - std::norm(p)) / (2.0 * (q.real() - p.real()));
        const double r = std::abs(p - c);
        const double e0 = c - r, e1 = c + r;
        // w = 0 -> e0, w = inf -> e1
        g << e1, e0, 1.0, 1.0;
        if (g.determinant() < 0.0) g << e1, -e0, 1.0, -1.0;
        if (g.determinant() < 0.0) g << e0, e1, 1.0, 1.0;
    }
    g = normalized(g);
    Eigen::Matrix2d inv;
    inv << g(1, 1), -g(0, 1), -g(1, 0), g(0, 0);
    const double up = std::log(std::abs(hyp::apply(inv, p)));
    const double uq = std::log(std::abs(hyp::apply(inv, q)));
    GeodesicArc arc;
    arc.g = g;
    arc.u0 = up;
    arc.dir = uq >= up ? 1.0 : -1.0;
    arc.length = std::abs(uq - up);
    return arc;
}

cplx mirror(cplx z) { return z / std::norm(z); }

double hexagon_side(double ai, double aj, double ak) {
    return std::acosh((std::cosh(ai) + std::cosh(aj) * std::cosh(ak)) /
                      (std::sinh(aj) * std::sinh(ak)));
}

}  // namespace

namespace hyp {

cplx fermi_to_halfplane(double rho, double t) {
    return std::exp(t) * cplx(std::tanh(rho), 1.0 / std::cosh(rho));
}

std::array<double, 2> halfplane_to_fermi(cplx z) {
    return {std::asinh(z.real() / z.imag()), std::log(std::abs(z))};
}

double distance(cplx z, cplx w) {
    return 2.0 * std::asinh(std::abs(z - w) / (2.0 * std::sqrt(z.imag() * w.imag())));
}

cplx apply(const Eigen::Matrix2d& g, cplx z) {
    return (g(0, 0) * z + g(0, 1)) / (g(1, 0) * z + g(1, 1));
}

Eigen::Matrix2d axis_translation(double h) {
    Eigen::Matrix2d m;
    m << std::exp(0.5 * h), 0.0, 0.0, std::exp(-0.5 * h);
    return m;
}

Eigen::Matrix2d circle_translation(double h) {
    Eigen::Matrix2d m;
    m << std::cosh(0.5 * h), std::sinh(0.5 * h), std::sinh(0.5 * h), std::cosh(0.5 * h);
    return m;
}

cplx geodesic_tangent(cplx p, cplx q) {
    if (std::abs(p.real() - q.real()) <= 1e-14 * (1.0 + std::abs(p) + std::abs(q))) {
        return q.imag() > p.imag() ? kI : -kI;
    }
    const double c = (std::norm(q) - std::norm(p)) / (2.0 * (q.real() - p.real()));
    const cplx rp = p - c;
    const bool ccw = std::arg(q - c) > std::arg(rp);
    const cplx tan = kI * rp / std::abs(rp);
    return ccw ? tan : -tan;
}

double angle(cplx p, cplx q1, cplx q2) {
    const cplx t1 = geodesic_tangent(p, q1);
    const cplx t2 = geodesic_tangent(p, q2);
    return std::acos(std::clamp((t1 * std::conj(t2)).real(), -1.0, 1.0));
}

}  // namespace hyp

cplx GeodesicArc::point(double s) const { return hyp::apply(g, kI * std::exp(u0 + dir * s)); }

cplx GeodesicArc::velocity(double s) const {
    const cplx w = kI * std::exp(u0 + dir * s);
    const cplx den = g(1, 0) * w + g(1, 1);
    return dir * w / (den * den);
}

std::array<double, 2> GeodesicArc::fermi(double s) const { return hyp::halfplane_to_fermi(point(s)); }

std::array<double, 2> GeodesicArc::fermi_velocity(double s) const {
    const cplx z = point(s);
    const cplx dz = velocity(s);
    const double x = z.real(), y = z.imag();
    const double drho = (dz.real() * y - x * dz.imag()) / (y * std::abs(z));
    const double dt = (dz / z).real();
    return {drho, dt};
}

std::array<double, 6> Hexagon::side_lengths() const {
    std::array<double, 6> out{};
    for (int i = 0; i < 6; ++i) out[i] = hyp::distance(vertices[i], vertices[(i + 1) % 6]);
    return out;
}

std::array<double, 6> Hexagon::angles() const {
    std::array<double, 6> out{};
    for (int i = 0; i < 6; ++i) {
        out[i] = hyp::angle(vertices[i], vertices[(i + 5) % 6], vertices[(i + 1) % 6]);
    }
    return out;
}

Hexagon right_angled_hexagon(double a1, double a2, double a3) {
    if (!(a1 > 0.0 && a2 > 0.0 && a3 > 0.0)) {
        throw InvalidArgument("right_angled_hexagon: side lengths must be positive");
    }
    Hexagon h;
    h.a = {a1, a2, a3};
    h.b = {hexagon_side(a1, a2, a3), hexagon_side(a2, a3, a1), hexagon_side(a3, a1, a2)};
    const double b2 = h.b[1], b3 = h.b[2];
    // a1 along the imaginary axis, b2 and b3 on the rays t = 0 and t = a1.
    const Eigen::Matrix2d g2 = hyp::axis_translation(a1) * hyp::circle_translation(b3);
    const Eigen::Matrix2d g3 = hyp::circle_translation(b2);
    h.vertices[0] = kI;
    h.vertices[1] = kI * std::exp(a1);
    h.vertices[2] = hyp::apply(g2, kI);
    h.vertices[3] = hyp::apply(g2, kI * std::exp(-a2));
    h.vertices[4] = hyp::apply(g3, kI * std::exp(a3));
    h.vertices[5] = hyp::apply(g3, kI);

    const double b1_closure = hyp::distance(h.vertices[3], h.vertices[4]);
    if (std::abs(b1_closure - h.b[0]) > 1e-9 * (1.0 + h.b[0])) {
        throw NumericalFailure("right_angled_hexagon: closure check failed (b1 = " +
                               std::to_string(h.b[0]) + ", measured " + std::to_string(b1_closure) +
                               ")");
    }
    for (double ang : h.angles()) {
        if (std::abs(ang - 0.5 * kPi) > 1e-9) {
            throw NumericalFailure("right_angled_hexagon: angle check failed");
        }
    }
    return h;
}

// Two hexagons, each of area 4 pi minus its angle sum.
double Pants::area() const {
    const auto ang = hexagon.angles();
    double sum = 0.0;
    for (double x : ang) sum += x;
    return 2.0 * (4.0 * kPi - sum);
}

Pants pants_from_lengths(double l1, double l2, double l3) {
    if (!(l1 > 0.0 && l2 > 0.0 && l3 > 0.0)) {
        throw InvalidArgument("pants_from_lengths: boundary lengths must be positive");
    }
    Pants p;
    p.lengths = {l1, l2, l3};
    p.hexagon = right_angled_hexagon(0.5 * l1, 0.5 * l2, 0.5 * l3);
    return p;
}

std::array<double, 2> PieceSide::point(double s) const {
    if (kind == SideKind::Core) return {0.0, s};
    return arc.fermi(s);
}

std::array<double, 2> PieceSide::normal(double s) const {
    if (kind == SideKind::Core) return {-1.0, 0.0};
    const auto [rho, t] = arc.fermi(s);
    const auto v = arc.fermi_velocity(s);
    const double c = std::cosh(rho);
    double nr = c * v[1], nt = -v[0] / c;
    // The piece lies below its outer boundary, so outward means rho increasing.
    if (nr < 0.0) {
        nr = -nr;
        nt = -nt;
    }
    (void)t;
    return {nr, nt};
}

double CylinderPiece::area() const {
    double total = 0.0;
    for (const auto& side : sides) {
        if (side.kind == SideKind::Core) continue;
        auto f = [&](double s) {
            const auto [rho, t] = side.arc.fermi(s);
            (void)t;
            return std::sinh(rho) * std::abs(side.arc.fermi_velocity(s)[1]);
        };
        total += specfun::integrate(f, 0.0, side.length, 1e-13).value;
    }
    return total;
}

int CylinderPiece::side_of_slot(int slot) const {
    const SideKind want = slot == 0 ? SideKind::Core : slot == 1 ? SideKind::Boundary2 : SideKind::Boundary3;
    for (std::size_t i = 0; i < sides.size(); ++i) {
        if (sides[i].kind == want) return static_cast<int>(i);
    }
    throw InvalidArgument("CylinderPiece: no side for slot " + std::to_string(slot));
}

CylinderPiece cut_pants_to_cylinder_piece(const Pants& pants, int id) {
    const Hexagon& h = pants.hexagon;
    const double a2 = h.a[1], a3 = h.a[2];
    const double b2 = h.b[1], b3 = h.b[2];

    CylinderPiece piece;
    piece.id = id;
    piece.core_length = pants.lengths[0];
    piece.boundary_lengths = pants.lengths;

    PieceSide core;
    core.kind = SideKind::Core;
    core.length = pants.lengths[0];

    // Outer arcs run from s = 0 at t > center to s = length at the mirror end.
    PieceSide g3;
    g3.kind = SideKind::Boundary3;
    g3.length = pants.lengths[2];
    g3.arc.g = hyp::circle_translation(b2);
    g3.arc.u0 = a3;
    g3.arc.dir = -1.0;
    g3.arc.length = g3.length;

    PieceSide g2;
    g2.kind = SideKind::Boundary2;
    g2.length = pants.lengths[1];
    g2.arc.g = hyp::axis_translation(h.a[0]) * hyp::circle_translation(b3);
    g2.arc.u0 = a2;
    g2.arc.dir = -1.0;
    g2.arc.length = g2.length;

    PieceSide seam;
    seam.kind = SideKind::Seam;
    seam.arc = arc_between(h.vertices[4], h.vertices[3]);
    seam.length = seam.arc.length;

    PieceSide seam_m;
    seam_m.kind = SideKind::SeamMirror;
    seam_m.arc = arc_between(mirror(h.vertices[4]), mirror(h.vertices[3]));
    seam_m.length = seam_m.arc.length;

    if (std::abs(seam.length - h.b[0]) > 1e-9 * (1.0 + h.b[0])) {
        throw NumericalFailure("cut_pants_to_cylinder_piece: seam length mismatch");
    }
    piece.sides = {core, g3, seam, g2, seam_m};

    double rmax = 0.0;
    for (const auto& side : piece.sides) {
        if (side.kind == SideKind::Core) continue;
        for (int i = 0; i <= 64; ++i) rmax = std::max(rmax, side.point(side.length * i / 64.0)[0]);
    }
    piece.rho_max = rmax * (1.0 + 1e-9);
    return piece;
}

void FenchelNielsen::validate() const {
    if (genus < 2) throw InvalidArgument("FenchelNielsen: genus must be >= 2");
    const int nv = 2 * genus - 2;
    const int ne = 3 * genus - 3;
    if (static_cast<int>(edges.size()) != ne) {
        throw InvalidArgument("FenchelNielsen: genus " + std::to_string(genus) + " needs " +
                              std::to_string(ne) + " edges, got " + std::to_string(edges.size()));
    }
    std::vector<int> degree(nv, 0);
    std::vector<int> parent(nv);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& e : edges) {
        if (e.v1 < 0 || e.v1 >= nv || e.v2 < 0 || e.v2 >= nv) {
            throw InvalidArgument("FenchelNielsen: edge vertex out of range");
        }
        if (!(e.length > 0.0) || !std::isfinite(e.length)) {
            throw InvalidArgument("FenchelNielsen: edge lengths must be positive");
        }
        if (!std::isfinite(e.twist)) throw InvalidArgument("FenchelNielsen: twist must be finite");
        ++degree[e.v1];
        ++degree[e.v2];
        parent[find(e.v1)] = find(e.v2);
    }
    for (int v = 0; v < nv; ++v) {
        if (degree[v] != 3) {
            throw InvalidArgument("FenchelNielsen: vertex " + std::to_string(v) + " has degree " +
                                  std::to_string(degree[v]) + ", expected 3");
        }
        if (find(v) != find(0)) throw InvalidArgument("FenchelNielsen: graph is not connected");
    }
}

double SegmentPair::partner(double s) const {
    double v = sign * s + offset;
    if (closed) {
        v = std::fmod(v, length);
        if (v < 0.0) v += length;
    }
    return v;
}

double SurfaceDecomposition::area() const {
    double a = 0.0;
    for (const auto& p : pieces) a += p.area();
    return a;
}

double SurfaceDecomposition::interface_length() const {
    double l = 0.0;
    for (const auto& s : interface) l += s.length;
    return l;
}

SurfaceDecomposition assemble_surface(const FenchelNielsen& fn) {
    fn.validate();
    const int nv = 2 * fn.genus - 2;

    struct Slot {
        int edge;
    };
    std::vector<std::vector<Slot>> slots(nv);
    std::vector<std::array<int, 2>> edge_slots(fn.edges.size());
    for (std::size_t e = 0; e < fn.edges.size(); ++e) {
        const auto& ed = fn.edges[e];
        edge_slots[e][0] = static_cast<int>(slots[ed.v1].size());
        slots[ed.v1].push_back({static_cast<int>(e)});
        edge_slots[e][1] = static_cast<int>(slots[ed.v2].size());
        slots[ed.v2].push_back({static_cast<int>(e)});
    }

    SurfaceDecomposition dec;
    dec.genus = fn.genus;
    for (int v = 0; v < nv; ++v) {
        const auto pants = pants_from_lengths(fn.edges[slots[v][0].edge].length,
                                              fn.edges[slots[v][1].edge].length,
                                              fn.edges[slots[v][2].edge].length);
        dec.pieces.push_back(cut_pants_to_cylinder_piece(pants, v));
    }

    // Curve coordinate u on slot boundaries: core u = s, outer arcs u = s - l/2,
    // so u = 0 sits on a seam foot. Gluing is u_b = -u_a + twist * l.
    auto u_offset = [](int slot, double len) { return slot == 0 ? 0.0 : -0.5 * len; };
    for (std::size_t e = 0; e < fn.edges.size(); ++e) {
        const auto& ed = fn.edges[e];
        SegmentPair sp;
        sp.piece_a = ed.v1;
        sp.piece_b = ed.v2;
        sp.side_a = dec.pieces[ed.v1].side_of_slot(edge_slots[e][0]);
        sp.side_b = dec.pieces[ed.v2].side_of_slot(edge_slots[e][1]);
        sp.length = ed.length;
        sp.sign = -1.0;
        sp.offset = ed.twist * ed.length - u_offset(edge_slots[e][0], ed.length) -
                    u_offset(edge_slots[e][1], ed.length);
        sp.closed = true;
        dec.interface.push_back(sp);
    }
    for (int v = 0; v < nv; ++v) {
        SegmentPair sp;
        sp.piece_a = sp.piece_b = v;
        sp.side_a = 2;
        sp.side_b = 4;
        sp.length = dec.pieces[v].sides[2].length;
        sp.sign = 1.0;
        sp.offset = 0.0;
        sp.closed = false;
        dec.interface.push_back(sp);
    }
    return dec;
}

FenchelNielsen bolza_mw_coordinates() {
    const double ls = 2.0 * std::acosh(1.0 + std::sqrt(2.0));
    const double l1 = 2.0 * std::acosh(3.0 + 2.0 * std::sqrt(2.0));
    FenchelNielsen fn;
    fn.genus = 2;
    fn.edges = {{0, 1, l1, 0.5}, {0, 1, ls, 0.0}, {0, 1, ls, 0.0}};
    return fn;
}

FenchelNielsen bolza_symmetric_coordinates() {
    const double ls = 2.0 * std::acosh(1.0 + std::sqrt(2.0));
    const double t = std::acosh(std::sqrt(2.0 / 7.0 * (3.0 + std::sqrt(2.0)))) /
                     std::acosh(1.0 + std::sqrt(2.0));
    FenchelNielsen fn;
    fn.genus = 2;
    fn.edges = {{0, 1, ls, t}, {0, 1, ls, t}, {0, 1, ls, t}};
    return fn;
}

CollocationSet collocate(const SurfaceDecomposition& dec, double points_per_unit_length) {
    if (!(points_per_unit_length > 0.0)) {
        throw InvalidArgument("collocate: points_per_unit_length must be > 0");
    }
    CollocationSet out;
    for (std::size_t k = 0; k < dec.interface.size(); ++k) {
        const auto& sp = dec.interface[k];
        const auto& side_a = dec.pieces[sp.piece_a].sides[sp.side_a];
        const auto& side_b = dec.pieces[sp.piece_b].sides[sp.side_b];
        const long n = std::max(1L, std::lround(sp.length * points_per_unit_length));
        const double w = sp.length / static_cast<double>(n);
        for (long j = 0; j < n; ++j) {
            const double s = (static_cast<double>(j) + 0.5) * w;
            const double sb = sp.partner(s);
            const auto pa = side_a.point(s);
            const auto na = side_a.normal(s);
            const auto pb = side_b.point(sb);
            const auto nb = side_b.normal(sb);
            CollocationPoint c;
            c.piece = sp.piece_a;
            c.rho = pa[0];
            c.t = pa[1];
            c.n_rho = na[0];
            c.n_t = na[1];
            c.piece_tilde = sp.piece_b;
            c.rho_tilde = pb[0];
            c.t_tilde = pb[1];
            c.n_rho_tilde = nb[0];
            c.n_t_tilde = nb[1];
            c.weight = w;
            c.segment = static_cast<int>(k);
            // Smaller piece id is the x+ side.
            if (sp.piece_b < sp.piece_a) {
                std::swap(c.piece, c.piece_tilde);
                std::swap(c.rho, c.rho_tilde);
                std::swap(c.t, c.t_tilde);
                std::swap(c.n_rho, c.n_rho_tilde);
                std::swap(c.n_t, c.n_t_tilde);
            }
            out.push_back(c);
        }
    }
    return out;
}

}  // namespace hypspec
