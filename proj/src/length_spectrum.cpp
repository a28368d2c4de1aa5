#include "hypspec/length_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "hypspec/errors.hpp"

namespace hypspec {

namespace {

constexpr double kPi = std::numbers::pi;
using cd = std::complex<double>;

// Stored elements of the group ball, indexed by the position of g(0) on the
// hyperboloid. Orbit points of 0 are at least a systole apart, so a unit grid
// holds at most one point per cell.
class OrbitIndex {
public:
    int find(const SU11& g) const {
        const cd p = key_point(g);
        const auto cx = static_cast<std::int64_t>(std::floor(p.real()));
        const auto cy = static_cast<std::int64_t>(std::floor(p.imag()));
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                auto it = cells_.find(cell(cx + dx, cy + dy));
                if (it != cells_.end() && std::abs(points_[it->second] - p) < 0.5) return it->second;
            }
        }
        return -1;
    }
    int insert(const SU11& g) {
        const cd p = key_point(g);
        const int id = static_cast<int>(points_.size());
        points_.push_back(p);
        cells_.emplace(cell(static_cast<std::int64_t>(std::floor(p.real())),
                            static_cast<std::int64_t>(std::floor(p.imag()))),
                       id);
        return id;
    }

private:
    static cd key_point(const SU11& g) { return 2.0 * g.a * g.b; }
    static std::uint64_t cell(std::int64_t x, std::int64_t y) {
        return (static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ull) ^ static_cast<std::uint64_t>(y);
    }
    std::vector<cd> points_;
    std::unordered_map<std::uint64_t, int> cells_;
};

// Distance from 0 to the axis of a hyperbolic element.
double axis_distance(const SU11& g) {
    const double ch = std::abs(g.b) / std::sqrt(g.a.real() * g.a.real() - 1.0);
    return std::acosh(std::max(1.0, ch));
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int root(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int x, int y) {
        x = root(x);
        y = root(y);
        if (x != y) parent[std::max(x, y)] = std::min(x, y);
    }
};

}  // namespace

SU11 SU11::operator*(const SU11& o) const {
    return {a * o.a + b * std::conj(o.b), a * o.b + b * std::conj(o.a)};
}

SU11 SU11::inverse() const { return {std::conj(a), -b}; }

std::complex<double> SU11::apply(std::complex<double> z) const {
    return (a * z + b) / (std::conj(b) * z + std::conj(a));
}

double SU11::displacement() const {
    return std::acosh(std::max(1.0, 2.0 * std::norm(a) - 1.0));
}

double SU11::translation_length() const {
    const double h = std::abs(trace()) / 2.0;
    return h > 1.0 ? 2.0 * std::acosh(h) : 0.0;
}

BolzaGroup bolza_group() {
    BolzaGroup G;
    const double systole = 2.0 * std::acosh(1.0 + std::sqrt(2.0));
    const double ch = std::cosh(systole / 2.0), sh = std::sinh(systole / 2.0);
    for (int k = 0; k < 4; ++k) {
        G.generators.push_back({cd(ch, 0.0), std::polar(sh, kPi / 8.0 + k * kPi / 4.0)});
    }
    for (int k = 0; k < 4; ++k) G.generators.push_back(G.generators[k].inverse());
    const double rv = std::pow(2.0, -0.25);
    for (int k = 0; k < 8; ++k) G.octagon.push_back(std::polar(rv, k * kPi / 4.0));
    G.circumradius = 2.0 * std::atanh(rv);
    G.inradius = systole / 2.0;
    return G;
}

void LengthSpectrum::validate() const {
    if (!(l_max > 0.0)) throw InvalidArgument("LengthSpectrum: L_MAX must be > 0");
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        if (!(e.length > 0.0)) throw InvalidArgument("LengthSpectrum: lengths must be > 0");
        if (e.multiplicity < 1) throw InvalidArgument("LengthSpectrum: multiplicities must be >= 1");
        if (e.length > l_max * (1.0 + 1e-12)) throw InvalidArgument("LengthSpectrum: length above L_MAX");
        if (i > 0 && !(e.length > entries[i - 1].length)) {
            throw InvalidArgument("LengthSpectrum: lengths must be strictly increasing");
        }
    }
}

double LengthSpectrum::systole() const {
    if (entries.empty()) throw InvalidArgument("LengthSpectrum: empty");
    return entries.front().length;
}

LengthSpectrum bolza_length_spectrum(double l_max) {
    if (!(l_max > 0.0)) throw InvalidArgument("bolza_length_spectrum: L_max must be > 0");
    const BolzaGroup G = bolza_group();
    const double rF = G.circumradius;
    // A class of length l has a representative whose axis passes within rF of
    // 0; such an element moves 0 by at most r1.
    const double r1 = 2.0 * std::asinh(std::cosh(rF) * std::sinh(l_max / 2.0));
    const double r_walk = r1 + rF;
    // Ball area over octagon area estimates the element count.
    const double estimate = (std::cosh(r_walk) - 1.0) / 2.0;
    if (estimate > 1.2e7) {
        throw InvalidArgument("bolza_length_spectrum: L_max = " + std::to_string(l_max) +
                              " is intractable (about " + std::to_string(static_cast<long long>(estimate)) +
                              " group elements); use L_max <= 11");
    }

    // Breadth-first walk over adjacent octagon tiles.
    std::vector<SU11> elems{SU11{}};
    OrbitIndex index;
    index.insert(elems[0]);
    for (std::size_t head = 0; head < elems.size(); ++head) {
        const SU11 h = elems[head];
        for (const auto& gen : G.generators) {
            const SU11 x = h * gen;
            if (x.displacement() > r_walk) continue;
            if (index.find(x) >= 0) continue;
            index.insert(x);
            elems.push_back(x);
        }
    }

    // Candidates: hyperbolic, short, axis near 0.
    const double tol = 1e-9;
    std::vector<int> cand;
    std::vector<int> cand_of(elems.size(), -1);
    for (std::size_t i = 0; i < elems.size(); ++i) {
        const auto& g = elems[i];
        if (!g.hyperbolic()) continue;
        if (g.translation_length() > l_max + tol) continue;
        if (axis_distance(g) > rF + tol) continue;
        cand_of[i] = static_cast<int>(cand.size());
        cand.push_back(static_cast<int>(i));
    }

    // Proper powers share the axis, so they are candidates too.
    std::vector<char> primitive(cand.size(), 1);
    for (std::size_t c = 0; c < cand.size(); ++c) {
        const SU11& h = elems[cand[c]];
        const double l = h.translation_length();
        SU11 p = h;
        for (int n = 2; n * l <= l_max + tol; ++n) {
            p = p * h;
            const int j = index.find(p);
            if (j >= 0 && cand_of[j] >= 0) primitive[cand_of[j]] = 0;
        }
    }

    // Conjugators: short elements, sorted by displacement.
    std::vector<int> by_disp(elems.size());
    std::iota(by_disp.begin(), by_disp.end(), 0);
    const double k_max = 2.0 * rF + l_max / 2.0 + tol;
    by_disp.erase(std::remove_if(by_disp.begin(), by_disp.end(),
                                 [&](int i) { return elems[i].displacement() > k_max; }),
                  by_disp.end());
    std::stable_sort(by_disp.begin(), by_disp.end(),
                     [&](int x, int y) { return elems[x].displacement() < elems[y].displacement(); });
    std::vector<SU11> kinv(by_disp.size());
    for (std::size_t i = 0; i < by_disp.size(); ++i) kinv[i] = elems[by_disp[i]].inverse();

    UnionFind uf(cand.size());
    for (std::size_t c = 0; c < cand.size(); ++c) {
        if (!primitive[c]) continue;
        const SU11& g = elems[cand[c]];
        const double bound = 2.0 * rF + g.translation_length() / 2.0 + tol;
        for (std::size_t i = 0; i < by_disp.size(); ++i) {
            const SU11& k = elems[by_disp[i]];
            if (k.displacement() > bound) break;
            const SU11 x = k * g * kinv[i];
            if (axis_distance(x) > rF + tol) continue;
            const int j = index.find(x);
            if (j >= 0 && cand_of[j] >= 0) uf.unite(static_cast<int>(c), cand_of[j]);
        }
    }

    std::vector<double> lengths;
    for (std::size_t c = 0; c < cand.size(); ++c) {
        if (primitive[c] && uf.root(static_cast<int>(c)) == static_cast<int>(c)) {
            lengths.push_back(elems[cand[c]].translation_length());
        }
    }
    std::sort(lengths.begin(), lengths.end());
    LengthSpectrum ls;
    ls.l_max = l_max;
    ls.tail_certified = true;
    for (std::size_t i = 0; i < lengths.size();) {
        std::size_t j = i;
        double sum = 0.0;
        while (j < lengths.size() && lengths[j] - lengths[i] <= 1e-8 * (1.0 + lengths[i])) sum += lengths[j++];
        ls.entries.push_back({sum / static_cast<double>(j - i), static_cast<int>(j - i)});
        i = j;
    }
    return ls;
}

void write_length_spectrum(std::ostream& os, const LengthSpectrum& ls) {
    ls.validate();
    char buf[128];
    std::snprintf(buf, sizeof buf, "L_MAX %.17g\n", ls.l_max);
    os << buf;
    os << "# length multiplicity (oriented primitive classes)\n";
    for (const auto& e : ls.entries) {
        std::snprintf(buf, sizeof buf, "%.17g %d\n", e.length, e.multiplicity);
        os << buf;
    }
}

LengthSpectrum read_length_spectrum(std::istream& is) {
    LengthSpectrum ls;
    bool have_header = false;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string first;
        if (!(ss >> first)) continue;
        const std::string where = "length spectrum line " + std::to_string(lineno);
        if (!have_header) {
            if (first != "L_MAX" || !(ss >> ls.l_max)) throw InvalidArgument(where + ": expected 'L_MAX <value>'");
            have_header = true;
        } else {
            LengthEntry e;
            try {
                e.length = std::stod(first);
            } catch (const std::exception&) {
                throw InvalidArgument(where + ": malformed length");
            }
            if (!(ss >> e.multiplicity)) throw InvalidArgument(where + ": missing multiplicity");
            ls.entries.push_back(e);
        }
        std::string extra;
        if (ss >> extra) throw InvalidArgument(where + ": trailing text");
    }
    if (!have_header) throw InvalidArgument("length spectrum: missing L_MAX header");
    ls.tail_certified = true;
    ls.validate();
    return ls;
}

}  // namespace hypspec
