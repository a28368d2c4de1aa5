#include "hypspec/surface_mps.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "hypspec/errors.hpp"
#include "hypspec/parallel.hpp"

namespace hypspec {

namespace {

constexpr double kPi = std::numbers::pi;

struct PieceModes {
    std::vector<RadialSolution> even, odd;  // indexed by k
};

// Writes basis values and normal derivatives of one piece at (rho, t) into
// the row segments starting at col.
void fill_row(const PieceModes& pm, double core_length, int N, double rho, double t, double n_rho,
              double n_t, double* val, double* nd) {
    const double w1 = 2.0 * kPi / core_length;
    const std::complex<double> step = std::polar(1.0, w1 * t);
    std::complex<double> e = 1.0;
    int c = 0;
    for (int k = 0; k <= N; ++k) {
        const double pe = pm.even[k].value(rho), dpe = pm.even[k].derivative(rho);
        const double po = pm.odd[k].value(rho), dpo = pm.odd[k].derivative(rho);
        const double co = e.real(), si = e.imag();
        const double om = w1 * k;
        val[c] = pe * co;
        nd[c] = n_rho * dpe * co - n_t * om * pe * si;
        ++c;
        val[c] = po * co;
        nd[c] = n_rho * dpo * co - n_t * om * po * si;
        ++c;
        if (k > 0) {
            val[c] = pe * si;
            nd[c] = n_rho * dpe * si + n_t * om * pe * co;
            ++c;
            val[c] = po * si;
            nd[c] = n_rho * dpo * si + n_t * om * po * co;
            ++c;
        }
        e *= step;
    }
}

}  // namespace

void BasisSpec::validate() const {
    if (N < 0) throw InvalidArgument("BasisSpec: N must be >= 0");
    if (pieces < 1) throw InvalidArgument("BasisSpec: need at least one piece");
}

int BasisSpec::column(int piece, const ModeIndex& mode) const {
    mode.validate();
    if (mode.k > N || piece < 0 || piece >= pieces) throw InvalidArgument("BasisSpec: out of range");
    int c = piece * per_piece();
    c += mode.k == 0 ? 0 : 2 + 4 * (mode.k - 1);
    if (mode.angular == Angular::Sin) c += 2;
    if (mode.parity == Parity::Odd) c += 1;
    return c;
}

ModeIndex BasisSpec::mode_of(int column) const {
    int c = column % per_piece();
    ModeIndex m;
    if (c < 2) {
        m.k = 0;
        m.parity = c == 0 ? Parity::Even : Parity::Odd;
        return m;
    }
    c -= 2;
    m.k = 1 + c / 4;
    const int r = c % 4;
    m.angular = r < 2 ? Angular::Cos : Angular::Sin;
    m.parity = r % 2 == 0 ? Parity::Even : Parity::Odd;
    return m;
}

SystemMatrices build_system(const SurfaceDecomposition& dec, const BasisSpec& basis,
                            const CollocationSet& coll, double lambda, const SystemOptions& opts) {
    basis.validate();
    if (basis.pieces != static_cast<int>(dec.pieces.size())) {
        throw InvalidArgument("build_system: basis piece count does not match decomposition");
    }
    const int N = basis.N;
    // Pieces with the same core length and radial range share their modes.
    std::map<std::pair<double, double>, PieceModes> cache;
    std::vector<const PieceModes*> modes(dec.pieces.size());
    for (std::size_t p = 0; p < dec.pieces.size(); ++p) {
        const auto& pc = dec.pieces[p];
        auto key = std::make_pair(pc.core_length, pc.rho_max);
        auto it = cache.find(key);
        if (it == cache.end()) {
            PieceModes pm;
            for (int k = 0; k <= N; ++k) {
                try {
                    pm.even.push_back(solve_radial(pc.core_length, k, Parity::Even, lambda, pc.rho_max, opts.radial));
                    pm.odd.push_back(solve_radial(pc.core_length, k, Parity::Odd, lambda, pc.rho_max, opts.radial));
                } catch (const NumericalFailure& e) {
                    std::ostringstream os;
                    os.precision(17);
                    os << "build_system: radial solve failed at lambda = " << lambda << ": " << e.what();
                    throw NumericalFailure(os.str());
                }
            }
            it = cache.emplace(key, std::move(pm)).first;
        }
        modes[p] = &it->second;
    }

    const Eigen::Index npts = static_cast<Eigen::Index>(coll.size());
    const Eigen::Index ncols = basis.dimension();
    const int pp = basis.per_piece();
    SystemMatrices out;
    out.q = Eigen::MatrixXd::Zero(2 * npts, ncols);
    out.r = Eigen::MatrixXd::Zero(4 * npts, ncols);
    std::vector<double> val(pp), nd(pp);
    const double nscale = opts.balance_normal_rows ? 1.0 / std::sqrt(1.0 + std::abs(lambda)) : 1.0;
    for (Eigen::Index i = 0; i < npts; ++i) {
        const auto& c = coll[i];
        const double ws = opts.weight_rows ? std::sqrt(c.weight) : 1.0;
        const double wn = ws * nscale;
        for (int side = 0; side < 2; ++side) {
            const int piece = side == 0 ? c.piece : c.piece_tilde;
            const auto& pc = dec.pieces[piece];
            if (side == 0) {
                fill_row(*modes[piece], pc.core_length, N, c.rho, c.t, c.n_rho, c.n_t, val.data(), nd.data());
            } else {
                fill_row(*modes[piece], pc.core_length, N, c.rho_tilde, c.t_tilde, c.n_rho_tilde,
                         c.n_t_tilde, val.data(), nd.data());
            }
            const Eigen::Index c0 = static_cast<Eigen::Index>(piece) * pp;
            const double sgn = side == 0 ? 1.0 : -1.0;
            for (int j = 0; j < pp; ++j) {
                out.q(i, c0 + j) += sgn * ws * val[j];
                out.q(npts + i, c0 + j) += wn * nd[j];
                out.r(side * npts + i, c0 + j) = ws * val[j];
                out.r((2 + side) * npts + i, c0 + j) = wn * nd[j];
            }
        }
    }
    return out;
}

double default_density(const SurfaceDecomposition& dec, const BasisSpec& basis, double lambda,
                       double oversample) {
    const double len = dec.interface_length();
    const double wave = 4.0 * std::sqrt(std::max(lambda, 0.0)) / (2.0 * kPi);
    const double cols = oversample * basis.dimension() / len;
    return std::max(wave, cols);
}

SurfaceProblem::SurfaceProblem(SurfaceDecomposition dec, BasisSpec basis, CollocationSet coll,
                               SystemOptions opts)
    : dec_(std::move(dec)), basis_(basis), coll_(std::move(coll)), opts_(opts) {
    basis_.validate();
}

SystemMatrices SurfaceProblem::system(double lambda) const {
    return build_system(dec_, basis_, coll_, lambda, opts_);
}

gsvd::GeneralizedSingulars SurfaceProblem::singulars(double lambda, int m, double tau) const {
    const auto sys = system(lambda);
    return gsvd::smallest_generalized_singulars(sys.q, sys.r, m, tau);
}

Eigen::VectorXd SurfaceProblem::sigma(double lambda, int m, double tau) const {
    return singulars(lambda, m, tau).sigma;
}

std::vector<double> search_grid(double lo, double hi, double step) {
    if (!(lo < hi)) throw InvalidArgument("search_grid: requires lo < hi");
    if (!(step > 0.0)) throw InvalidArgument("search_grid: requires step > 0");
    std::vector<double> g;
    // Index-based stepping below 50 keeps grid points reproducible.
    long i = 0;
    double x = lo;
    while (x <= hi + 1e-12 && x < 50.0) {
        g.push_back(x);
        ++i;
        x = lo + static_cast<double>(i) * step;
    }
    while (x <= hi + 1e-12) {
        g.push_back(x);
        x += step * std::sqrt(50.0 / x);
    }
    return g;
}

int auto_basis_N(double lambda) {
    return std::max(24, static_cast<int>(std::ceil(12.0 + 2.0 * std::sqrt(std::max(lambda, 0.0)))));
}

namespace {

// Chunk top used to fix N and the collocation density for a grid point.
double chunk_top(double lambda) {
    if (lambda <= 40.0) return 40.0;
    return 40.0 + 20.0 * std::ceil((lambda - 40.0) / 20.0);
}

}  // namespace

std::vector<EigenvalueRecord> find_eigenvalues(const SurfaceDecomposition& dec, double lambda_lo,
                                               double lambda_hi, const SearchOptions& opts) {
    if (!(lambda_lo < lambda_hi)) throw InvalidArgument("find_eigenvalues: empty range");
    if (opts.m < 1) throw InvalidArgument("find_eigenvalues: m must be >= 1");
    const int npieces = static_cast<int>(dec.pieces.size());

    // One problem per chunk (fixed N and density inside a chunk).
    auto key_of = [&](double lambda) { return opts.N > 0 ? std::max(lambda_hi, 0.0) : chunk_top(lambda); };
    std::map<double, SurfaceProblem> problems;
    const auto grid = search_grid(lambda_lo, lambda_hi, opts.step);
    for (double l : grid) {
        const double top = key_of(l);
        if (problems.count(top)) continue;
        BasisSpec basis{opts.N > 0 ? opts.N : auto_basis_N(top), npieces};
        const double dens = opts.density > 0.0 ? opts.density : default_density(dec, basis, top);
        problems.emplace(top, SurfaceProblem(dec, basis, collocate(dec, dens), opts.system));
    }
    auto problem_for = [&](double lambda) -> const SurfaceProblem& { return problems.at(key_of(lambda)); };

    gsvd::DetectOptions d;
    d.m = opts.m;
    d.detect_ratio = opts.detect_ratio;
    d.theta_rel = opts.theta_rel;
    d.theta_abs = opts.theta_abs;
    d.tol_lambda = opts.tol_lambda;
    d.threads = opts.threads;
    const auto minima = gsvd::detect_minima(
        grid, [&](double anchor, double l, int m) { return problem_for(anchor).sigma(l, m, opts.tau); }, d);

    auto make_record = [&](const SurfaceProblem& pr, double lambda, const gsvd::GeneralizedSingulars& gs,
                           int multiplicity) {
        EigenvalueRecord r;
        r.lambda = lambda;
        r.sigmas.assign(gs.sigma.data(), gs.sigma.data() + gs.sigma.size());
        r.multiplicity = multiplicity;
        r.sigma_min = r.sigmas.empty() ? 0.0 : r.sigmas[0];
        r.basis_N = pr.basis().N;
        r.density = static_cast<double>(pr.collocation().size()) / dec.interface_length();
        return r;
    };

    const int threads = opts.threads > 0 ? opts.threads : parallel::default_threads();
    std::vector<EigenvalueRecord> out;
    if (lambda_lo <= 0.0 && lambda_hi >= 0.0) {
        // Constants: lambda = 0 is simple on a connected surface.
        const auto& pr = problem_for(0.0);
        out.push_back(make_record(pr, 0.0, pr.singulars(0.0, opts.m, opts.tau), 1));
    }
    auto recs = parallel::map<EigenvalueRecord>(minima.size(), threads, [&](std::size_t i) {
        const auto& mn = minima[i];
        const auto& pr = problem_for(mn.anchor);
        const auto gs = pr.singulars(mn.lambda, opts.m, opts.tau);
        auto r = make_record(pr, mn.lambda, gs, mn.multiplicity);
        const auto jd = jump_defect(pr, gs.vectors.col(0), mn.lambda);
        r.c_const = opts.c_const;
        r.epsilon = r.c_const * jd.epsilon;
        r.eta = jd.eta;
        r.half_width = r.epsilon < 1.0 ? ((1.0 + r.lambda) * r.epsilon + r.eta) / (1.0 - r.epsilon)
                                        : std::numeric_limits<double>::infinity();
        return r;
    });
    for (auto& r : recs) {
        if (!out.empty() && r.lambda <= out.back().lambda) continue;  // minimum hugging lambda = 0
        out.push_back(std::move(r));
    }
    return out;
}

JumpDefect jump_defect(const SurfaceProblem& problem, const Eigen::VectorXd& v, double lambda) {
    const auto sys = problem.system(lambda);
    if (v.size() != sys.q.cols()) throw InvalidArgument("jump_defect: coefficient vector has wrong size");
    const double rn = (sys.r * v).norm();
    if (!(rn > 0.0)) throw InvalidArgument("jump_defect: coefficient vector has zero boundary norm");
    JumpDefect d;
    d.epsilon = (sys.q * v).norm() / rn;
    double size = 0.0;
    for (Eigen::Index j = 0; j < v.size(); ++j) size += std::abs(v(j)) * sys.r.col(j).norm();
    d.eta = RadialOptions{}.rel_tol * size / rn;
    return d;
}

void write_eigenvalue_csv(std::ostream& os, const std::vector<EigenvalueRecord>& recs) {
    os << "lambda,multiplicity,sigma_min,half_width,basis_N\n";
    char buf[256];
    for (const auto& r : recs) {
        std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g,%d\n", r.lambda, r.multiplicity, r.sigma_min,
                      r.half_width, r.basis_N);
        os << buf;
    }
}

std::vector<EigenvalueRecord> read_eigenvalue_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw InvalidArgument("eigenvalue CSV: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "lambda,multiplicity,sigma_min,half_width,basis_N") {
        throw InvalidArgument("eigenvalue CSV: unexpected header '" + line + "'");
    }
    std::vector<EigenvalueRecord> out;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string f[5];
        for (int i = 0; i < 5; ++i) {
            if (!std::getline(ss, f[i], ',')) {
                throw InvalidArgument("eigenvalue CSV: line " + std::to_string(lineno) + " has too few fields");
            }
        }
        EigenvalueRecord r;
        try {
            std::size_t pos = 0;
            r.lambda = std::stod(f[0], &pos);
            r.multiplicity = std::stoi(f[1]);
            r.sigma_min = std::stod(f[2]);
            r.half_width = std::stod(f[3]);
            r.basis_N = std::stoi(f[4]);
        } catch (const std::exception&) {
            throw InvalidArgument("eigenvalue CSV: line " + std::to_string(lineno) + " is malformed");
        }
        if (r.lambda < 0.0 || r.multiplicity < 1) {
            throw InvalidArgument("eigenvalue CSV: line " + std::to_string(lineno) + " violates lambda >= 0, multiplicity >= 1");
        }
        if (!out.empty() && !(r.lambda > out.back().lambda)) {
            throw InvalidArgument("eigenvalue CSV: eigenvalues must be strictly ascending");
        }
        out.push_back(r);
    }
    return out;
}

std::pair<double, double> inclusion_interval(double lambda, double eps, double eta) {
    if (!(eps >= 0.0 && eps < 1.0)) throw InvalidArgument("inclusion_interval: requires 0 <= eps < 1");
    if (!(eta >= 0.0)) throw InvalidArgument("inclusion_interval: requires eta >= 0");
    const double h = ((1.0 + lambda) * eps + eta) / (1.0 - eps);
    return {lambda - h, lambda + h};
}

}  // namespace hypspec
