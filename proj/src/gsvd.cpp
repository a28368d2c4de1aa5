#include "hypspec/gsvd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "hypspec/errors.hpp"
#include "hypspec/parallel.hpp"

namespace hypspec {

namespace parallel {

namespace {
std::atomic<int> g_threads{1};
}

int default_threads() { return g_threads.load(); }
void set_default_threads(int n) { g_threads.store(std::max(1, n)); }

double tree_sum(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    std::vector<double> level = v;
    while (level.size() > 1) {
        std::vector<double> next((level.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < level.size(); i += 2) next[i / 2] = level[i] + level[i + 1];
        if (level.size() % 2 == 1) next.back() = level.back();
        level.swap(next);
    }
    return level[0];
}

}  // namespace parallel

namespace gsvd {

GeneralizedSingulars smallest_generalized_singulars(const Eigen::MatrixXd& q,
                                                    const Eigen::MatrixXd& r, int m, double tau) {
    if (q.cols() != r.cols()) {
        throw InvalidArgument("smallest_generalized_singulars: Q and R column counts differ");
    }
    if (m < 1) throw InvalidArgument("smallest_generalized_singulars: m must be >= 1");
    if (!(tau > 0.0 && tau < 1.0)) {
        throw InvalidArgument("smallest_generalized_singulars: tau must lie in (0, 1)");
    }
    const Eigen::Index n = r.cols();
    Eigen::VectorXd d(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double cn = r.col(j).norm();
        d(j) = cn > 0.0 ? 1.0 / cn : 1.0;
    }
    const Eigen::MatrixXd rs = r * d.asDiagonal();

    // Thin QR first keeps the SVD square.
    Eigen::MatrixXd rt;
    if (rs.rows() > rs.cols()) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(rs);
        rt = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    } else {
        rt = rs;
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd_r(rt, Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd_r.singularValues();
    if (s.size() == 0 || !(s(0) > 0.0)) {
        throw NumericalFailure("smallest_generalized_singulars: R is numerically zero");
    }
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) >= tau * s(0)) ++rank;

    const Eigen::MatrixXd w =
        svd_r.matrixV().leftCols(rank) * s.head(rank).cwiseInverse().asDiagonal();
    const Eigen::MatrixXd qw = q * (d.asDiagonal() * w);
    Eigen::BDCSVD<Eigen::MatrixXd> svd_q(qw, Eigen::ComputeThinV);
    const Eigen::VectorXd& sq = svd_q.singularValues();  // descending, length min(rows, rank)

    GeneralizedSingulars out;
    out.rank = static_cast<int>(rank);
    const Eigen::Index avail = rank;
    const Eigen::Index k = std::min<Eigen::Index>(m, avail);
    out.sigma.resize(k);
    out.vectors.resize(n, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        // Directions beyond the row count of Q have zero quotient.
        const Eigen::Index idx = avail - 1 - i;
        if (idx >= sq.size()) {
            out.sigma(i) = 0.0;
            out.vectors.col(i) = d.asDiagonal() * (w * Eigen::VectorXd::Unit(rank, idx));
        } else {
            out.sigma(i) = sq(idx);
            out.vectors.col(i) = d.asDiagonal() * (w * svd_q.matrixV().col(idx));
        }
    }
    return out;
}

void SingularCurve::validate() const {
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (i > 0 && !(samples[i].lambda > samples[i - 1].lambda)) {
            throw InvalidArgument("SingularCurve: lambda must be strictly increasing");
        }
        for (std::size_t j = 0; j < samples[i].sigma.size(); ++j) {
            if (samples[i].sigma[j] < 0.0) throw InvalidArgument("SingularCurve: negative sigma");
            if (j > 0 && samples[i].sigma[j] < samples[i].sigma[j - 1]) {
                throw InvalidArgument("SingularCurve: sigma list not ascending");
            }
        }
    }
}

std::vector<double> uniform_grid(double lo, double hi, double step) {
    if (!(lo < hi)) throw InvalidArgument("scan: requires lo < hi");
    if (!(step > 0.0)) throw InvalidArgument("scan: requires step > 0");
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    std::vector<double> g;
    g.reserve(n + 1);
    for (long i = 0; i <= n; ++i) g.push_back(lo + static_cast<double>(i) * step);
    return g;
}

SigmaFn sigma_from_builder(const Builder& builder, int m, double tau) {
    return [builder, m, tau](double lambda) {
        auto [q, r] = builder(lambda);
        return smallest_generalized_singulars(q, r, m, tau).sigma;
    };
}

SingularCurve scan_grid(const std::vector<double>& grid, const SigmaFn& sigma, int threads) {
    if (threads <= 0) threads = parallel::default_threads();
    SingularCurve curve;
    curve.samples.resize(grid.size());
    parallel::for_each_index(grid.size(), threads, [&](std::size_t i) {
        Eigen::VectorXd s;
        try {
            s = sigma(grid[i]);
        } catch (const Error& e) {
            std::ostringstream os;
            os.precision(17);
            os << "scan: failure at lambda = " << grid[i] << ": " << e.what();
            throw NumericalFailure(os.str());
        }
        curve.samples[i].lambda = grid[i];
        curve.samples[i].sigma.assign(s.data(), s.data() + s.size());
    });
    return curve;
}

SingularCurve scan(double lo, double hi, double step, const Builder& builder, int m, double tau,
                   int threads) {
    return scan_grid(uniform_grid(lo, hi, step), sigma_from_builder(builder, m, tau), threads);
}

Minimum refine_minimum(const Bracket& br, const std::function<double(double)>& f, double tol) {
    if (!(br.a < br.b && br.b < br.c)) throw InvalidArgument("refine_minimum: need a < b < c");
    if (!(tol > 0.0)) throw InvalidArgument("refine_minimum: tol must be > 0");
    Minimum res;
    double a = br.a, b = br.b, c = br.c;
    const double fa = f(a), fc = f(c);
    double fb = f(b);
    res.evaluations = 3;
    if (!(fb < std::min(fa, fc))) {
        throw InvalidArgument("refine_minimum: f(b) is not below both bracket ends");
    }
    const double gr = 0.5 * (3.0 - std::sqrt(5.0));  // 0.381966...
    while (c - a > tol) {
        const bool right_larger = (c - b) > (b - a);
        const double x = right_larger ? b + gr * (c - b) : b - gr * (b - a);
        const double fx = f(x);
        ++res.evaluations;
        if (right_larger) {
            // left candidate b, right candidate x
            if (fb <= fx) {
                c = x;
            } else {
                a = b;
                b = x;
                fb = fx;
            }
        } else {
            // left candidate x, right candidate b
            if (fx <= fb) {
                c = b;
                b = x;
                fb = fx;
            } else {
                a = x;
            }
        }
        if (res.evaluations > 500) break;
    }
    res.lambda = b;
    res.sigma = fb;
    return res;
}

int multiplicity_estimate(const std::vector<double>& sigma, double theta) {
    int n = 0;
    for (double s : sigma) n += s < theta ? 1 : 0;
    return n;
}

std::vector<std::size_t> local_minima(const SingularCurve& curve, int which) {
    std::vector<std::size_t> out;
    const auto& s = curve.samples;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        const auto w = static_cast<std::size_t>(which);
        if (s[i].sigma.size() <= w) continue;
        const double v = s[i].sigma[w];
        if (v < s[i - 1].sigma[w] && v < s[i + 1].sigma[w]) out.push_back(i);
    }
    return out;
}

std::vector<DetectedMinimum> detect_minima(const std::vector<double>& grid, const AnchoredSigma& sigma,
                                           const DetectOptions& opts) {
    if (opts.m < 1) throw InvalidArgument("detect_minima: m must be >= 1");
    if (grid.size() < 3) throw InvalidArgument("detect_minima: need at least 3 grid points");
    const int threads = opts.threads > 0 ? opts.threads : parallel::default_threads();
    const auto curve = scan_grid(grid, [&](double l) { return sigma(l, l, opts.m); }, threads);
    const auto& smp = curve.samples;
    const std::size_t n = smp.size();

    std::vector<double> background(n);
    {
        std::size_t lo = 0, hi = 0;
        std::vector<double> w;
        for (std::size_t i = 0; i < n; ++i) {
            while (smp[i].lambda - smp[lo].lambda > opts.window) ++lo;
            while (hi < n && smp[hi].lambda - smp[i].lambda <= opts.window) ++hi;
            w.clear();
            for (std::size_t j = lo; j < hi; ++j) w.push_back(smp[j].sigma[0]);
            const auto mid = w.begin() + static_cast<std::ptrdiff_t>(w.size() / 2);
            std::nth_element(w.begin(), mid, w.end());
            background[i] = *mid;
        }
    }
    auto theta_at = [&](std::size_t i) {
        return opts.theta_abs > 0.0 ? opts.theta_abs : opts.theta_rel * background[i];
    };
    auto is_dip = [&](std::size_t i, std::size_t j) {
        if (smp[i].sigma.size() <= j) return false;
        const double v = smp[i].sigma[j];
        return v < smp[i - 1].sigma[j] && v < smp[i + 1].sigma[j] && v < opts.detect_ratio * background[i];
    };

    struct Candidate {
        std::size_t index;
        int which;
    };
    struct Found {
        std::size_t index;
        DetectedMinimum rec;
    };
    std::vector<Found> found;
    auto run = [&](const std::vector<Candidate>& cands) {
        auto res = parallel::map<Found>(cands.size(), threads, [&](std::size_t k) {
            const auto& c = cands[k];
            const double anchor = smp[c.index].lambda;
            auto f = [&](double l) { return sigma(anchor, l, c.which + 1)(c.which); };
            const auto mn = refine_minimum({smp[c.index - 1].lambda, anchor, smp[c.index + 1].lambda}, f,
                                           opts.tol_lambda);
            const Eigen::VectorXd s = sigma(anchor, mn.lambda, opts.m);
            Found out;
            out.index = c.index;
            out.rec.lambda = mn.lambda;
            out.rec.anchor = anchor;
            out.rec.sigmas.assign(s.data(), s.data() + s.size());
            out.rec.theta = theta_at(c.index);
            out.rec.multiplicity = multiplicity_estimate(out.rec.sigmas, out.rec.theta);
            return out;
        });
        for (auto& f : res) {
            if (f.rec.multiplicity > 0) found.push_back(std::move(f));
        }
    };

    std::vector<Candidate> first;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (is_dip(i, 0)) first.push_back({i, 0});
    }
    run(first);

    std::vector<Candidate> second;
    for (int j = 1; j < opts.m; ++j) {
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (!is_dip(i, static_cast<std::size_t>(j))) continue;
            bool covered = false;
            for (const auto& f : found) {
                const auto d = f.index > i ? f.index - i : i - f.index;
                if (d <= 2 && f.rec.multiplicity > j) covered = true;
            }
            if (!covered) second.push_back({i, j});
        }
    }
    run(second);

    std::sort(found.begin(), found.end(),
              [](const Found& a, const Found& b) { return a.rec.lambda < b.rec.lambda; });
    std::vector<DetectedMinimum> out;
    for (auto& f : found) {
        if (!out.empty() && std::abs(f.rec.lambda - out.back().lambda) <= 1e-6 * std::max(1.0, f.rec.lambda)) {
            const auto& b = out.back();
            if (f.rec.multiplicity > b.multiplicity ||
                (f.rec.multiplicity == b.multiplicity && f.rec.sigmas[0] < b.sigmas[0])) {
                out.back() = f.rec;
            }
            continue;
        }
        out.push_back(f.rec);
    }
    return out;
}

}  // namespace gsvd
}  // namespace hypspec
