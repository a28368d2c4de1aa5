#include "hypspec/planar.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "hypspec/errors.hpp"
#include "hypspec/parallel.hpp"

namespace hypspec::planar {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double unit_double(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

}  // namespace

double PlanarDomain::perimeter() const {
    // Periodic trapezoid rule, spectrally accurate for smooth closed curves.
    const int n = 4096;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += velocity((i + 0.5) / n).norm();
    return s / n;
}

void PlanarDomain::validate() const {
    if (!curve || !velocity || !level) throw InvalidArgument("PlanarDomain '" + name + "': incomplete definition");
    if (!(area > 0.0) || !std::isfinite(area)) throw InvalidArgument("PlanarDomain '" + name + "': area must be > 0");
    if ((curve(0.0) - curve(1.0)).norm() > 1e-12) {
        throw InvalidArgument("PlanarDomain '" + name + "': boundary curve does not close");
    }
    for (int i = 0; i < 64; ++i) {
        const Eigen::Vector2d x = curve(i / 64.0);
        if (std::abs(level(x)) > 1e-10) {
            throw InvalidArgument("PlanarDomain '" + name + "': boundary point off the implicit curve");
        }
        if ((x.array() < box_min.array() - 1e-12).any() || (x.array() > box_max.array() + 1e-12).any()) {
            throw InvalidArgument("PlanarDomain '" + name + "': boundary leaves the bounding box");
        }
    }
}

PlanarDomain ellipse(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw InvalidArgument("ellipse: semi-axes must be positive");
    }
    PlanarDomain d;
    d.name = a == b ? "disk" : "ellipse";
    d.curve = [a, b](double t) { return Eigen::Vector2d(a * std::cos(kTwoPi * t), b * std::sin(kTwoPi * t)); };
    d.velocity = [a, b](double t) {
        return Eigen::Vector2d(-kTwoPi * a * std::sin(kTwoPi * t), kTwoPi * b * std::cos(kTwoPi * t));
    };
    d.level = [a, b](const Eigen::Vector2d& x) { return (x(0) / a) * (x(0) / a) + (x(1) / b) * (x(1) / b) - 1.0; };
    d.area = std::numbers::pi * a * b;
    d.box_min = {-a, -b};
    d.box_max = {a, b};
    return d;
}

PlanarDomain disk(double r) { return ellipse(r, r); }

PlanarDomain scaled(const PlanarDomain& d, double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("scaled: factor must be > 0");
    PlanarDomain s;
    s.name = d.name;
    s.curve = [f = d.curve, c](double t) -> Eigen::Vector2d { return c * f(t); };
    s.velocity = [f = d.velocity, c](double t) -> Eigen::Vector2d { return c * f(t); };
    s.level = [f = d.level, c](const Eigen::Vector2d& x) { return f(x / c); };
    s.area = c * c * d.area;
    s.box_min = c * d.box_min;
    s.box_max = c * d.box_max;
    return s;
}

Eigen::RowVectorXd PlaneWaveBasis::values(const Eigen::Vector2d& x) const {
    Eigen::RowVectorXd out(size());
    for (std::size_t j = 0; j < theta.size(); ++j) {
        const double ph = k * (std::cos(theta[j]) * x(0) + std::sin(theta[j]) * x(1));
        out(2 * j) = std::cos(ph);
        out(2 * j + 1) = std::sin(ph);
    }
    return out;
}

Eigen::Matrix<double, 2, Eigen::Dynamic> PlaneWaveBasis::gradients(const Eigen::Vector2d& x) const {
    Eigen::Matrix<double, 2, Eigen::Dynamic> g(2, size());
    for (std::size_t j = 0; j < theta.size(); ++j) {
        const double cx = std::cos(theta[j]), sy = std::sin(theta[j]);
        const double ph = k * (cx * x(0) + sy * x(1));
        const double c = std::cos(ph), s = std::sin(ph);
        g(0, 2 * j) = -k * cx * s;
        g(1, 2 * j) = -k * sy * s;
        g(0, 2 * j + 1) = k * cx * c;
        g(1, 2 * j + 1) = k * sy * c;
    }
    return g;
}

PlaneWaveBasis plane_wave_basis(double lambda, int n_dir, double rotation) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("plane_wave_basis: lambda must be > 0");
    if (n_dir < 1) throw InvalidArgument("plane_wave_basis: need at least one direction");
    PlaneWaveBasis b;
    b.k = std::sqrt(lambda);
    b.theta.resize(n_dir);
    for (int j = 0; j < n_dir; ++j) b.theta[j] = rotation + std::numbers::pi * j / n_dir;
    return b;
}

std::vector<BoundaryNode> boundary_nodes(const PlanarDomain& d, int m) {
    if (m < 1) throw InvalidArgument("boundary_nodes: need at least one node");
    std::vector<BoundaryNode> out(m);
    for (int i = 0; i < m; ++i) {
        const double t = (i + 0.5) / m;
        out[i].x = d.curve(t);
        out[i].weight = d.velocity(t).norm() / m;
    }
    return out;
}

std::vector<Eigen::Vector2d> interior_points(const PlanarDomain& d, int q, std::uint64_t seed) {
    if (q < 1) throw InvalidArgument("interior_points: need at least one point");
    std::mt19937_64 gen(seed);
    std::vector<Eigen::Vector2d> out;
    out.reserve(q);
    const Eigen::Vector2d span = d.box_max - d.box_min;
    const long max_draws = 1000L * q;
    for (long n = 0; static_cast<int>(out.size()) < q; ++n) {
        if (n >= max_draws) throw NumericalFailure("interior_points: rejection sampling accepts almost nothing");
        const double u = unit_double(gen), v = unit_double(gen);
        const Eigen::Vector2d x(d.box_min(0) + u * span(0), d.box_min(1) + v * span(1));
        if (d.inside(x)) out.push_back(x);
    }
    return out;
}

PlanarProblem::PlanarProblem(PlanarDomain domain, const Discretization& disc) : dom_(std::move(domain)), disc_(disc) {
    dom_.validate();
    if (disc_.n_dir < 1) throw InvalidArgument("PlanarProblem: n_dir must be >= 1");
    if (disc_.m_boundary < 0 || disc_.q_interior < 0) {
        throw InvalidArgument("PlanarProblem: point counts must be >= 0");
    }
    const int nb = 2 * disc_.n_dir;
    if (disc_.m_boundary == 0) disc_.m_boundary = 4 * nb;
    if (disc_.q_interior == 0) disc_.q_interior = 4 * nb;
    bnd_ = boundary_nodes(dom_, disc_.m_boundary);
    pts_ = interior_points(dom_, disc_.q_interior, disc_.seed);
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> PlanarProblem::matrices(double lambda) const {
    const auto b = basis(lambda);
    Eigen::MatrixXd a(bnd_.size(), b.size()), r(pts_.size(), b.size());
    for (std::size_t i = 0; i < bnd_.size(); ++i) a.row(i) = std::sqrt(bnd_[i].weight) * b.values(bnd_[i].x);
    const double w = std::sqrt(dom_.area / static_cast<double>(pts_.size()));
    for (std::size_t i = 0; i < pts_.size(); ++i) r.row(i) = w * b.values(pts_[i]);
    return {std::move(a), std::move(r)};
}

gsvd::GeneralizedSingulars PlanarProblem::singulars(double lambda, int m, double tau) const {
    const auto [a, r] = matrices(lambda);
    try {
        return gsvd::smallest_generalized_singulars(a, r, m, tau);
    } catch (const Error& e) {
        std::ostringstream os;
        os.precision(17);
        os << "planar: at lambda = " << lambda << ": " << e.what();
        throw NumericalFailure(os.str());
    }
}

Eigen::VectorXd PlanarProblem::sigma(double lambda, int m, double tau) const { return singulars(lambda, m, tau).sigma; }

Eigen::VectorXd planar_sigma(const PlanarDomain& d, double lambda, int m, const Discretization& disc, double tau) {
    return PlanarProblem(d, disc).sigma(lambda, m, tau);
}

double fhm_bound(double epsilon) {
    if (!(epsilon >= 0.0) || !(epsilon < 1.0)) throw InvalidArgument("fhm_bound: need 0 <= eps < 1");
    return (std::numbers::sqrt2 * epsilon + epsilon * epsilon) / (1.0 - epsilon * epsilon);
}

SupEstimate boundary_sup_estimate(const PlanarProblem& pr, double lambda, const Eigen::VectorXd& v, int dense_factor) {
    if (dense_factor < 1) throw InvalidArgument("boundary_sup_estimate: dense_factor must be >= 1");
    const auto b = pr.basis(lambda);
    if (v.size() != b.size()) throw InvalidArgument("boundary_sup_estimate: coefficient length mismatch");
    const auto& dom = pr.domain();
    const auto& disc = pr.discretization();

    SupEstimate est;
    double h = 0.0, slope = 0.0;
    const int nd = dense_factor * disc.m_boundary;
    for (int i = 0; i < nd; ++i) {
        const double t = (i + 0.5) / nd;
        const Eigen::Vector2d x = dom.curve(t), vel = dom.velocity(t);
        est.sampled = std::max(est.sampled, std::abs(b.values(x).dot(v)));
        slope = std::max(slope, std::abs((b.gradients(x) * v).dot(vel.normalized())));
        h = std::max(h, vel.norm() / nd);
    }
    // Twice the half-spacing times the sampled tangential slope.
    est.margin = h * slope;
    est.sup = est.sampled + est.margin;

    const auto pts = interior_points(dom, disc.q_interior, disc.seed + 1);
    const auto q = static_cast<double>(pts.size());
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double u = b.values(pts[i]).dot(v);
        const double f = u * u;
        const double delta = f - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (f - mean);
    }
    const double var = pts.size() > 1 ? m2 / (q - 1.0) : 0.0;
    est.l2_norm = std::sqrt(dom.area * mean);
    est.l2_stderr = est.l2_norm > 0.0 ? dom.area * std::sqrt(var / q) / (2.0 * est.l2_norm) : 0.0;
    est.epsilon = est.l2_norm > 0.0 ? std::sqrt(dom.area) * est.sup / est.l2_norm
                                    : std::numeric_limits<double>::infinity();
    return est;
}

std::vector<PlanarRecord> planar_find_eigenvalues(const PlanarDomain& d, double lambda_lo, double lambda_hi,
                                                  double step, const SearchOptions& opts) {
    if (!(lambda_lo > 0.0)) throw InvalidArgument("planar_find_eigenvalues: lambda_lo must be > 0");
    const auto grid = gsvd::uniform_grid(lambda_lo, lambda_hi, step);
    const PlanarProblem pr(d, opts.disc);

    gsvd::DetectOptions det;
    det.m = opts.m;
    det.detect_ratio = opts.detect_ratio;
    det.theta_rel = opts.theta_rel;
    det.tol_lambda = opts.tol_lambda;
    det.threads = opts.threads;
    const auto minima =
        gsvd::detect_minima(grid, [&](double, double l, int m) { return pr.sigma(l, m, opts.tau); }, det);

    const int threads = opts.threads > 0 ? opts.threads : parallel::default_threads();
    return parallel::map<PlanarRecord>(minima.size(), threads, [&](std::size_t i) {
        const auto& mn = minima[i];
        const auto gs = pr.singulars(mn.lambda, opts.m, opts.tau);
        PlanarRecord r;
        r.lambda = mn.lambda;
        r.multiplicity = mn.multiplicity;
        r.sigmas.assign(gs.sigma.data(), gs.sigma.data() + gs.sigma.size());
        r.sigma_min = r.sigmas.empty() ? 0.0 : r.sigmas[0];
        r.epsilon = boundary_sup_estimate(pr, mn.lambda, gs.vectors.col(0)).epsilon;
        r.rel_half_width = r.epsilon < 1.0 ? fhm_bound(r.epsilon) : std::numeric_limits<double>::infinity();
        r.half_width = r.lambda * r.rel_half_width;
        return r;
    });
}

}  // namespace hypspec::planar
