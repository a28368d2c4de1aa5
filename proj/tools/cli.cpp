#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hypspec/errors.hpp"
#include "hypspec/geometry.hpp"
#include "hypspec/gsvd.hpp"
#include "hypspec/length_spectrum.hpp"
#include "hypspec/parallel.hpp"
#include "hypspec/planar.hpp"
#include "hypspec/selberg.hpp"
#include "hypspec/solver1d.hpp"
#include "hypspec/surface_mps.hpp"

#ifndef HYPSPEC_VERSION
#define HYPSPEC_VERSION "0.0.0"
#endif

namespace hypspec::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Kind { Number, Integer, String, Bool, Range, NumberList, Value };

struct Key {
    std::string name;
    Kind kind;
    json def;  // null: unset
    std::string help;
    double lo = -kInf, hi = kInf;
    std::vector<std::string> choices{};
    bool required = false;
};

/// Output bookkeeping for one run.
struct Run {
    fs::path out;
    json outputs = json::array();
    json seeds = json::object();
    int threads = 1;

    fs::path file(const std::string& name, const std::string& description) {
        outputs.push_back({{"file", name}, {"description", description}});
        return out / name;
    }
};

using Action = std::function<void(const json&, Run&)>;

struct Command {
    std::string name, help;
    std::vector<Key> keys;
    Action action;
};

std::string flag_name(const std::string& key) {
    std::string s = key;
    for (auto& c : s)
        if (c == '_') c = '-';
    return s;
}

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double to_number(const std::string& key, const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != s.size()) throw ConfigError("'" + key + "': not a number: " + s);
    return v;
}

json from_text(const Key& k, const std::vector<std::string>& v) {
    switch (k.kind) {
        case Kind::Number: return to_number(k.name, v.at(0));
        case Kind::Integer: {
            std::size_t pos = 0;
            long long n = 0;
            try {
                n = std::stoll(v.at(0), &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos == 0 || pos != v[0].size()) throw ConfigError("'" + k.name + "': not an integer: " + v[0]);
            return n;
        }
        case Kind::String: return v.at(0);
        case Kind::Bool: return true;
        case Kind::Range:
        case Kind::NumberList: {
            json a = json::array();
            for (const auto& s : v) a.push_back(to_number(k.name, s));
            return a;
        }
        case Kind::Value: {
            const json j = json::parse(v.at(0), nullptr, false);
            if (!j.is_discarded() && (j.is_object() || j.is_array())) return j;
            return v[0];
        }
    }
    return nullptr;
}

void check_number(const Key& k, double x) {
    if (!std::isfinite(x) || x < k.lo || x > k.hi) {
        std::ostringstream os;
        os << "'" << k.name << "' = " << fmt(x) << " outside [" << fmt(k.lo) << ", " << fmt(k.hi) << "]";
        throw ConfigError(os.str());
    }
}

void validate_value(const Key& k, const json& v) {
    if (v.is_null()) {
        if (k.required) throw ConfigError("'" + k.name + "' is required");
        return;
    }
    const std::string bad = "'" + k.name + "': wrong type";
    switch (k.kind) {
        case Kind::Number:
            if (!v.is_number()) throw ConfigError(bad + ", expected a number");
            check_number(k, v.get<double>());
            break;
        case Kind::Integer:
            if (!v.is_number_integer()) throw ConfigError(bad + ", expected an integer");
            check_number(k, static_cast<double>(v.get<long long>()));
            break;
        case Kind::String:
            if (!v.is_string()) throw ConfigError(bad + ", expected a string");
            if (!k.choices.empty() &&
                std::find(k.choices.begin(), k.choices.end(), v.get<std::string>()) == k.choices.end())
                throw ConfigError("'" + k.name + "': unknown choice '" + v.get<std::string>() + "'");
            break;
        case Kind::Bool:
            if (!v.is_boolean()) throw ConfigError(bad + ", expected true or false");
            break;
        case Kind::Range:
            if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
                throw ConfigError(bad + ", expected [lo, hi]");
            check_number(k, v[0].get<double>());
            check_number(k, v[1].get<double>());
            if (!(v[0].get<double>() < v[1].get<double>())) throw ConfigError("'" + k.name + "': need lo < hi");
            break;
        case Kind::NumberList:
            if (!v.is_array() || v.empty()) throw ConfigError(bad + ", expected a non-empty list of numbers");
            for (const auto& x : v) {
                if (!x.is_number()) throw ConfigError(bad + ", expected a list of numbers");
                check_number(k, x.get<double>());
            }
            break;
        case Kind::Value:
            break;
    }
}

double num(const json& c, const char* k) { return c.at(k).get<double>(); }
int integer(const json& c, const char* k) { return c.at(k).get<int>(); }
std::string str(const json& c, const char* k) { return c.at(k).get<std::string>(); }

void ensure_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

void write_two_column(Run& run, const std::string& name, const std::string& x, const std::string& y,
                      const std::string& description, const std::vector<double>& xs,
                      const std::vector<double>& ys) {
    {
        std::ofstream f(run.file(name, description));
        f << x << "," << y << "\n";
        for (std::size_t i = 0; i < xs.size(); ++i) f << fmt(xs[i]) << "," << fmt(ys[i]) << "\n";
    }
    const json meta = {{"data", name}, {"x", x}, {"y", y}, {"description", description}, {"rows", xs.size()}};
    std::ofstream f(run.file(name + ".meta.json", "column description for " + name));
    f << meta.dump(2) << "\n";
}

void write_json(Run& run, const std::string& name, const std::string& description, const json& j) {
    std::ofstream f(run.file(name, description));
    f << j.dump(2) << "\n";
}

// ---------------------------------------------------------------- surfaces

FenchelNielsen parse_fn(const json& j) {
    ensure_keys(j, {"genus", "edges"}, "surface");
    FenchelNielsen fn;
    if (!j.contains("genus") || !j["genus"].is_number_integer()) throw ConfigError("surface: integer 'genus' required");
    if (!j.contains("edges") || !j["edges"].is_array()) throw ConfigError("surface: 'edges' list required");
    fn.genus = j["genus"].get<int>();
    for (const auto& e : j["edges"]) {
        if (!e.is_object()) throw ConfigError("surface: each edge is an object");
        ensure_keys(e, {"v1", "v2", "length", "twist"}, "surface edge");
        FNEdge ed;
        try {
            ed.v1 = e.at("v1").get<int>();
            ed.v2 = e.at("v2").get<int>();
            ed.length = e.at("length").get<double>();
            ed.twist = e.value("twist", 0.0);
        } catch (const json::exception&) {
            throw ConfigError("surface edge: need integer v1, v2 and numeric length, twist");
        }
        fn.edges.push_back(ed);
    }
    try {
        fn.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("surface: ") + e.what());
    }
    return fn;
}

FenchelNielsen surface_fn(const json& c) {
    const json& s = c.at("surface");
    if (s.is_string()) {
        if (s.get<std::string>() != "bolza") throw ConfigError("surface: unknown name '" + s.get<std::string>() + "'");
        return str(c, "coordinates") == "symmetric" ? bolza_symmetric_coordinates() : bolza_mw_coordinates();
    }
    if (s.is_object()) return parse_fn(s);
    throw ConfigError("surface: expected \"bolza\" or a Fenchel-Nielsen object");
}

void require_bolza(const json& c, const std::string& what) {
    if (!c.at("surface").is_string()) throw ConfigError(what + " is available for the Bolza surface only");
    if (str(c, "surface") != "bolza") throw ConfigError("surface: unknown name '" + str(c, "surface") + "'");
}

// ---------------------------------------------------------------- solve1d

void run_solve1d(const json& c, Run& run) {
    const double L = num(c, "half_length");
    solver1d::Problem1D p;
    const json& pot = c.at("potential");
    if (pot.is_string()) {
        if (pot == "zero")
            p = solver1d::zero_potential(L);
        else if (pot == "parabolic5")
            p = solver1d::parabolic5(L);
        else
            throw ConfigError("potential: unknown name '" + pot.get<std::string>() + "'");
    } else if (pot.is_array()) {
        std::vector<double> coeffs;
        for (const auto& x : pot) {
            if (!x.is_number()) throw ConfigError("potential: coefficients must be numbers");
            coeffs.push_back(x.get<double>());
        }
        if (coeffs.empty()) throw ConfigError("potential: empty coefficient list");
        p = solver1d::polynomial_potential(coeffs, L);
    } else {
        throw ConfigError("potential: expected a name or a coefficient list");
    }
    p.tol = num(c, "tol");
    solver1d::EigenOptions o;
    o.residual_tol = num(c, "residual_tol");
    o.threads = run.threads;
    const auto& r = c.at("range");
    const auto ev = solver1d::eigenvalues_1d(p, r[0].get<double>(), r[1].get<double>(), num(c, "step"), o);
    std::ofstream f(run.file("eigenvalues_1d.csv", "Dirichlet eigenvalues on [-L, L], ascending"));
    f << "index,lambda\n";
    for (std::size_t i = 0; i < ev.size(); ++i) f << i + 1 << "," << fmt(ev[i]) << "\n";
}

// ---------------------------------------------------------------- solve-domain

void run_solve_domain(const json& c, Run& run) {
    planar::PlanarDomain d =
        str(c, "domain") == "disk" ? planar::disk(num(c, "radius")) : planar::ellipse(num(c, "a"), num(c, "b"));
    if (num(c, "scale") != 1.0) d = planar::scaled(d, num(c, "scale"));
    planar::SearchOptions o;
    o.disc.n_dir = integer(c, "n_dir");
    o.disc.m_boundary = integer(c, "m_boundary");
    o.disc.q_interior = integer(c, "q_interior");
    o.disc.seed = c.at("seed").get<std::uint64_t>();
    o.disc.rotation = num(c, "rotation");
    o.m = integer(c, "m");
    o.tau = num(c, "tau");
    o.detect_ratio = num(c, "detect_ratio");
    o.theta_rel = num(c, "theta_rel");
    o.tol_lambda = num(c, "tol_lambda");
    o.threads = run.threads;
    run.seeds["interior_points"] = o.disc.seed;
    run.seeds["l2_estimate"] = o.disc.seed + 1;
    const auto& r = c.at("range");
    const double lo = r[0].get<double>(), hi = r[1].get<double>();
    if (lo <= 0.0) throw ConfigError("range: lower end must be positive for a planar domain");
    const auto recs = planar::planar_find_eigenvalues(d, lo, hi, num(c, "step"), o);
    {
        std::ofstream f(run.file("planar_eigenvalues.csv", "Dirichlet eigenvalues with FHM relative bounds"));
        f << "lambda,multiplicity,sigma_min,epsilon,rel_half_width,half_width\n";
        for (const auto& x : recs)
            f << fmt(x.lambda) << "," << x.multiplicity << "," << fmt(x.sigma_min) << "," << fmt(x.epsilon) << ","
              << fmt(x.rel_half_width) << "," << fmt(x.half_width) << "\n";
    }
    if (c.at("sigma_curve").get<bool>()) {
        const planar::PlanarProblem pr(d, o.disc);
        const auto grid = gsvd::uniform_grid(lo, hi, num(c, "step"));
        const auto s = parallel::map<double>(grid.size(), run.threads,
                                             [&](std::size_t i) { return pr.sigma(grid[i], 1, o.tau)(0); });
        write_two_column(run, "sigma_curve.csv", "lambda", "sigma_1",
                         "smallest generalized singular value of (A, B) on the scan grid", grid, s);
    }
}

// ---------------------------------------------------------------- solve-surface

void run_solve_surface(const json& c, Run& run) {
    const auto dec = assemble_surface(surface_fn(c));
    SearchOptions o;
    o.N = integer(c, "N");
    o.density = num(c, "density");
    o.step = num(c, "step");
    o.m = integer(c, "m");
    o.tau = num(c, "tau");
    o.theta_rel = num(c, "theta_rel");
    o.theta_abs = num(c, "theta_abs");
    o.detect_ratio = num(c, "detect_ratio");
    o.tol_lambda = num(c, "tol_lambda");
    o.c_const = num(c, "c_const");
    o.threads = run.threads;
    const auto& r = c.at("range");
    const double lo = r[0].get<double>(), hi = r[1].get<double>();
    const auto recs = find_eigenvalues(dec, lo, hi, o);
    {
        std::ofstream f(run.file("eigenvalues.csv", "eigenvalue list: lambda, multiplicity, sigma_min, half_width, basis_N"));
        write_eigenvalue_csv(f, recs);
    }
    if (c.at("sigma_curve").get<bool>()) {
        BasisSpec basis;
        basis.N = o.N > 0 ? o.N : auto_basis_N(hi);
        basis.pieces = static_cast<int>(dec.pieces.size());
        const double density = o.density > 0.0 ? o.density : default_density(dec, basis, hi);
        const SurfaceProblem pr(dec, basis, collocate(dec, density), o.system);
        const auto grid = search_grid(lo, hi, o.step);
        const auto s = parallel::map<double>(grid.size(), run.threads,
                                             [&](std::size_t i) { return pr.sigma(grid[i], 1, o.tau)(0); });
        write_two_column(run, "sigma_curve.csv", "lambda", "sigma_1",
                         "smallest generalized singular value with fixed N and density on the scan grid", grid, s);
    }
}

// ---------------------------------------------------------------- length-spectrum

void run_length_spectrum(const json& c, Run& run) {
    require_bolza(c, "length-spectrum");
    const auto ls = bolza_length_spectrum(num(c, "l_max"));
    std::ofstream f(run.file("length_spectrum.txt", "primitive oriented closed geodesics up to l_max"));
    write_length_spectrum(f, ls);
}

// ---------------------------------------------------------------- spectral side

std::vector<EigenvalueRecord> load_records(const json& c) {
    const std::string path = str(c, "eigenvalues");
    std::ifstream f(path);
    if (!f) throw ConfigError("eigenvalues: cannot open '" + path + "'");
    try {
        return read_eigenvalue_csv(f);
    } catch (const InvalidArgument& e) {
        throw ConfigError("eigenvalues: " + std::string(e.what()));
    }
}

std::vector<double> load_mu(const json& c) {
    auto mu = selberg::expand(load_records(c));
    if (mu.empty() || mu[0] != 0.0) mu.insert(mu.begin(), 0.0);
    const int n = integer(c, "n_eigen");
    if (n > 0) {
        if (static_cast<std::size_t>(n) + 1 > mu.size())
            throw ConfigError("n_eigen = " + std::to_string(n) + " exceeds the " + std::to_string(mu.size() - 1) +
                              " nonzero eigenvalues in the list");
        mu.resize(static_cast<std::size_t>(n) + 1);
    }
    return mu;
}

selberg::SpectralInput load_input(const json& c) {
    require_bolza(c, "the trace formula");
    LengthSpectrum ls;
    if (c.at("lengths").is_null()) {
        ls = bolza_length_spectrum(num(c, "l_max"));
    } else {
        const std::string path = str(c, "lengths");
        std::ifstream f(path);
        if (!f) throw ConfigError("lengths: cannot open '" + path + "'");
        try {
            ls = read_length_spectrum(f);
        } catch (const InvalidArgument& e) {
            throw ConfigError("lengths: " + std::string(e.what()));
        }
    }
    return selberg::bolza_input(load_mu(c), std::move(ls));
}

selberg::ZetaOptions zeta_options(const json& c, const Run& run) {
    selberg::ZetaOptions o;
    o.epsilon = num(c, "epsilon");
    o.n_heat = integer(c, "n_heat");
    o.tol.quad_abs = num(c, "quad_abs");
    o.tol.threads = run.threads;
    o.max_error = num(c, "max_error");
    return o;
}

json budget_json(const selberg::Budget& b) {
    return {{"spectral_tail", b.spectral_tail},
            {"length_tail", b.length_tail},
            {"quadrature", b.quadrature},
            {"heat_truncation", b.heat_truncation},
            {"total", b.total()}};
}

void run_zeta(const json& c, Run& run) {
    const auto in = load_input(c);
    const auto o = zeta_options(c, run);
    json evals = json::array();
    std::vector<double> ss, vs;
    for (const auto& sj : c.at("s")) {
        const auto z = selberg::zeta(sj.get<double>(), in, o);
        evals.push_back({{"s", z.s},
                         {"value", z.value},
                         {"error_budget", budget_json(z.budget)},
                         {"terms", {{"T1", z.t1}, {"T2", z.t2}, {"T3", z.t3}, {"T4", z.t4}}},
                         {"epsilon", z.epsilon},
                         {"n_eigen", z.n_eigen},
                         {"n_heat", z.n_heat},
                         {"l_max", z.l_max}});
        ss.push_back(z.s);
        vs.push_back(z.value);
    }
    write_json(run, "zeta.json", "spectral zeta values with error budgets", {{"evaluations", evals}});
    write_two_column(run, "zeta.csv", "s", "zeta", "spectral zeta function at the requested s", ss, vs);
}

void run_det(const json& c, Run& run) {
    const auto in = load_input(c);
    const auto d = selberg::log_det(in, zeta_options(c, run));
    write_json(run, "det.json", "zeta-regularized determinant",
               {{"det", d.det},
                {"det_error", d.det_error},
                {"zeta_prime0", d.zeta_prime0},
                {"terms", {{"L1", d.l1}, {"L2", d.l2}, {"L3", d.l3}}},
                {"error_budget", budget_json(d.budget)},
                {"epsilon", d.epsilon},
                {"n_eigen", d.n_eigen},
                {"l_max", d.l_max}});
}

std::vector<double> grid_from(const json& c, const char* range, const char* step) {
    const auto& r = c.at(range);
    return gsvd::uniform_grid(r[0].get<double>(), r[1].get<double>(), num(c, step));
}

void run_verify_heat(const json& c, Run& run) {
    const auto in = load_input(c);
    selberg::Tolerances tol;
    tol.quad_abs = num(c, "quad_abs");
    tol.threads = run.threads;
    const int n = static_cast<int>(in.eigenvalues.size()) - 1;
    const double t = num(c, "t"), big_t = num(c, "T");

    const auto grid = grid_from(c, "t_range", "t_step");
    const auto rc = selberg::r_n_curve(in, n, grid, tol);
    write_two_column(run, "rn_curve.csv", "t", "R_N",
                     "truncated spectral heat trace minus the identity term, N = " + std::to_string(n), rc.t, rc.r);

    const auto cert = selberg::completeness_certificate(in.eigenvalues, in, t, big_t, tol);
    std::vector<double> ct, cl;
    for (double x : grid) {
        if (x >= big_t) break;
        const auto cx = selberg::completeness_certificate(in.eigenvalues, in, x, big_t, tol);
        if (cx.certified) {
            ct.push_back(x);
            cl.push_back(cx.lambda_max);
        }
    }
    write_two_column(run, "certificate_curve.csv", "t", "lambda_max",
                     "certified completeness threshold against t at fixed T (uncertified t omitted)", ct, cl);

    json heat = json::array();
    for (const auto& hj : c.at("heat_t")) {
        const double ht = hj.get<double>();
        const auto g = selberg::heat_trace_geometric(ht, in, tol);
        heat.push_back({{"t", ht},
                        {"geometric", g.value},
                        {"geometric_error", g.error()},
                        {"identity", g.identity},
                        {"hyperbolic", g.geodesic},
                        {"spectral_truncated", selberg::heat_trace_spectral(ht, in.eigenvalues, n)}});
    }
    write_json(run, "verify_heat.json", "R_N summary, completeness certificate and heat trace comparison",
               {{"n_eigen", n},
                {"r_n", {{"crossover", rc.crossover}, {"sign_changes", rc.sign_changes}}},
                {"certificate",
                 {{"certified", cert.certified},
                  {"lambda_max", cert.certified ? json(cert.lambda_max) : json(nullptr)},
                  {"t", cert.t},
                  {"T", cert.big_t},
                  {"F_T", cert.f_t},
                  {"F_T_trace", cert.f_t_trace},
                  {"F_T_trace_error", cert.f_t_trace_error},
                  {"R_tilde", cert.r_tilde}}},
                {"heat_trace", heat}});
}

void run_verify_riesz(const json& c, Run& run) {
    auto mu = load_mu(c);
    if (!c.at("remove").is_null()) {
        std::vector<std::size_t> drop;
        for (const auto& x : c.at("remove")) {
            if (!x.is_number_integer() || x.get<long long>() < 1 ||
                x.get<long long>() >= static_cast<long long>(mu.size()))
                throw ConfigError("remove: indices must be integers in [1, " + std::to_string(mu.size() - 1) + "]");
            drop.push_back(x.get<std::size_t>());
        }
        std::sort(drop.begin(), drop.end());
        drop.erase(std::unique(drop.begin(), drop.end()), drop.end());
        for (auto it = drop.rbegin(); it != drop.rend(); ++it) mu.erase(mu.begin() + static_cast<long>(*it));
    }
    const double vol = selberg::genus_area(integer(c, "genus"));
    const auto grid = grid_from(c, "t_range", "t_step");
    const auto f = selberg::riesz_test(mu, vol, grid);
    write_two_column(run, "riesz.csv", "t", "F_test", "Riesz-mean test function of the eigenvalue list", grid, f);
    double worst = 0.0, at = grid.front();
    for (std::size_t i = 0; i < f.size(); ++i)
        if (std::abs(f[i]) > worst) {
            worst = std::abs(f[i]);
            at = grid[i];
        }
    json summary = {{"entries", mu.size()}, {"max_abs_F", worst}, {"argmax_t", at}};
    if (mu.size() >= 50) {
        const auto w = selberg::weyl_check(mu, vol);
        summary["weyl"] = {{"slope", w.slope}, {"expected", w.expected}, {"relative_error", w.relative_error}};
    }
    write_json(run, "riesz.json", "Riesz test summary", summary);
}

// ---------------------------------------------------------------- tables

std::vector<Key> spectral_keys() {
    return {
        {"surface", Kind::Value, "bolza", "surface (only \"bolza\" for the trace formula)"},
        {"eigenvalues", Kind::String, nullptr, "eigenvalue CSV", -kInf, kInf, {}, true},
        {"lengths", Kind::String, nullptr, "length spectrum file (computed when absent)"},
        {"l_max", Kind::Number, 8.0, "length cutoff when lengths are computed", 3.1, 12.0},
        {"n_eigen", Kind::Integer, 0, "use the first n nonzero eigenvalues (0: all)", 0, 1e7},
        {"quad_abs", Kind::Number, 1e-14, "absolute quadrature tolerance", 1e-16, 1e-4},
    };
}

std::vector<Key> zeta_keys(bool with_s) {
    auto k = spectral_keys();
    k.push_back({"epsilon", Kind::Number, 0.1, "split point of the heat integral", 0.01, 0.5});
    k.push_back({"n_heat", Kind::Integer, 8, "heat coefficients used below epsilon", 1, 20});
    k.push_back({"max_error", Kind::Number, 0.0, "fail if the error budget exceeds this (0: off)", 0.0, kInf});
    if (with_s) k.push_back({"s", Kind::NumberList, json::array({-0.5}), "evaluation points", -7.0, 50.0});
    return k;
}

std::vector<Command> commands() {
    std::vector<Command> cs;
    cs.push_back({"solve1d",
                  "Dirichlet eigenvalues of -u'' + V u on [-L, L]",
                  {
                      {"potential", Kind::Value, "zero", "zero, parabolic5 or a coefficient list [c0, c1, ...]"},
                      {"half_length", Kind::Number, 1.0, "L", 1e-6, 1e6},
                      {"range", Kind::Range, json::array({0.0, 100.0}), "lambda interval", -1e8, 1e8},
                      {"step", Kind::Number, 0.5, "scan step", 1e-8, 1e6},
                      {"tol", Kind::Number, 1e-12, "integrator tolerance", 1e-15, 1e-3},
                      {"residual_tol", Kind::Number, 1e-12, "relative residual for refinement", 1e-15, 1e-3},
                  },
                  run_solve1d});
    cs.push_back({"solve-domain",
                  "Dirichlet eigenvalues of a planar domain by plane waves",
                  {
                      {"domain", Kind::String, "ellipse", "disk or ellipse", -kInf, kInf, {"disk", "ellipse"}},
                      {"a", Kind::Number, 2.0, "ellipse semi-axis along x", 1e-6, 1e6},
                      {"b", Kind::Number, 1.0, "ellipse semi-axis along y", 1e-6, 1e6},
                      {"radius", Kind::Number, 1.0, "disk radius", 1e-6, 1e6},
                      {"scale", Kind::Number, 1.0, "extra dilation", 1e-6, 1e6},
                      {"n_dir", Kind::Integer, 20, "plane-wave directions", 1, 2000},
                      {"m_boundary", Kind::Integer, 0, "boundary nodes (0: four per basis function)", 0, 1e6},
                      {"q_interior", Kind::Integer, 0, "interior points (0: four per basis function)", 0, 1e6},
                      {"seed", Kind::Integer, 1, "interior point seed", 0, 9.0e15},
                      {"rotation", Kind::Number, 0.0, "rotation of the direction set", -10.0, 10.0},
                      {"range", Kind::Range, json::array({1.0, 42.0}), "lambda interval", 0.0, 1e6},
                      {"step", Kind::Number, 0.1, "scan step", 1e-6, 1e3},
                      {"m", Kind::Integer, 4, "singular values kept", 1, 50},
                      {"tau", Kind::Number, 1e-12, "GSVD truncation", 1e-16, 1e-4},
                      {"detect_ratio", Kind::Number, 0.2, "dip threshold relative to background", 1e-6, 1.0},
                      {"theta_rel", Kind::Number, 1e-3, "multiplicity threshold", 1e-12, 1.0},
                      {"tol_lambda", Kind::Number, 1e-11, "refinement tolerance", 1e-15, 1e-2},
                      {"sigma_curve", Kind::Bool, false, "also write sigma_curve.csv"},
                  },
                  run_solve_domain});
    cs.push_back({"solve-surface",
                  "Laplace eigenvalues of a closed hyperbolic surface",
                  {
                      {"surface", Kind::Value, "bolza", "\"bolza\" or {\"genus\": g, \"edges\": [...]}"},
                      {"coordinates", Kind::String, "mw", "Bolza coordinates", -kInf, kInf, {"mw", "symmetric"}},
                      {"range", Kind::Range, json::array({0.0, 40.0}), "lambda interval", -1.0, 1e5},
                      {"N", Kind::Integer, 0, "modes per piece (0: automatic)", 0, 400},
                      {"density", Kind::Number, 0.0, "collocation points per unit length (0: automatic)", 0.0, 1e4},
                      {"step", Kind::Number, 0.05, "scan step below lambda = 50", 1e-6, 10.0},
                      {"m", Kind::Integer, 6, "singular values kept", 1, 50},
                      {"tau", Kind::Number, 1e-12, "GSVD truncation", 1e-16, 1e-4},
                      {"theta_rel", Kind::Number, 1e-3, "multiplicity threshold", 1e-12, 1.0},
                      {"theta_abs", Kind::Number, 0.0, "absolute multiplicity threshold (0: off)", 0.0, 1.0},
                      {"detect_ratio", Kind::Number, 0.2, "dip threshold relative to background", 1e-6, 1.0},
                      {"tol_lambda", Kind::Number, 1e-11, "refinement tolerance", 1e-15, 1e-2},
                      {"c_const", Kind::Number, 1.0, "constant in the inclusion bound", 1e-6, 1e6},
                      {"sigma_curve", Kind::Bool, false, "also write sigma_curve.csv"},
                  },
                  run_solve_surface});
    cs.push_back({"length-spectrum",
                  "primitive closed geodesics of the Bolza surface",
                  {
                      {"surface", Kind::Value, "bolza", "only \"bolza\""},
                      {"l_max", Kind::Number, 8.0, "length cutoff", 0.1, 12.0},
                  },
                  run_length_spectrum});
    cs.push_back({"zeta", "spectral zeta function", zeta_keys(true), run_zeta});
    cs.push_back({"det", "zeta-regularized determinant", zeta_keys(false), run_det});
    {
        auto k = spectral_keys();
        k[4].def = 200;
        k.push_back({"t", Kind::Number, 0.095, "certificate t", 1e-4, 2.3});
        k.push_back({"T", Kind::Number, 2.0, "certificate T", 1e-4, 2.3});
        k.push_back({"t_range", Kind::Range, json::array({0.02, 0.5}), "t interval for the curves", 1e-4, 100.0});
        k.push_back({"t_step", Kind::Number, 0.005, "t spacing", 1e-5, 10.0});
        k.push_back({"heat_t", Kind::NumberList, json::array({1.0}), "t values for the heat trace check", 1e-3, 100.0});
        cs.push_back({"verify-heat", "R_N curve, completeness certificate, heat trace", k, run_verify_heat});
    }
    cs.push_back({"verify-riesz",
                  "Riesz-mean test of an eigenvalue list",
                  {
                      {"eigenvalues", Kind::String, nullptr, "eigenvalue CSV", -kInf, kInf, {}, true},
                      {"n_eigen", Kind::Integer, 0, "use the first n nonzero eigenvalues (0: all)", 0, 1e7},
                      {"genus", Kind::Integer, 2, "genus (area 4 pi (g - 1))", 2, 1000},
                      {"t_range", Kind::Range, json::array({1.0, 14.0}), "t interval", 1e-6, 1e4},
                      {"t_step", Kind::Number, 0.01, "t spacing", 1e-6, 100.0},
                      {"remove", Kind::Value, nullptr, "indices (1-based, with multiplicity) to delete"},
                  },
                  run_verify_riesz});
    for (auto& c : cs) {
        c.keys.push_back({"out", Kind::String, "hypspec_out", "output directory"});
        c.keys.push_back({"threads", Kind::Integer, 1, "worker threads", 1, 1024});
    }
    return cs;
}

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void report(const std::string& kind, const std::string& command, const std::string& message) {
    const json e = {{"error", {{"kind", kind}, {"command", command}, {"message", message}}}};
    std::cerr << e.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args) {
    const auto cmds = commands();
    CLI::App app{"hypspec: spectra of hyperbolic surfaces and planar domains"};
    app.require_subcommand(1);
    app.set_version_flag("--version", HYPSPEC_VERSION);

    struct Slot {
        std::vector<std::string> text;
        std::string single;
        bool flag = false;
        CLI::Option* opt = nullptr;
    };
    std::map<std::string, std::map<std::string, Slot>> slots;
    std::map<std::string, std::string> config_paths;
    std::map<std::string, CLI::App*> subs;

    for (const auto& c : cmds) {
        auto* sub = app.add_subcommand(c.name, c.help);
        subs[c.name] = sub;
        sub->add_option("--config", config_paths[c.name], "JSON config file");
        auto& ss = slots[c.name];
        for (const auto& k : c.keys) {
            auto& s = ss[k.name];
            const std::string fl = "--" + flag_name(k.name);
            std::string help = k.help;
            if (!k.def.is_null()) help += " [" + k.def.dump() + "]";
            if (k.kind == Kind::Bool)
                s.opt = sub->add_flag(fl, s.flag, help);
            else if (k.kind == Kind::Range)
                s.opt = sub->add_option(fl, s.text, help)->expected(2);
            else if (k.kind == Kind::NumberList)
                s.opt = sub->add_option(fl, s.text, help)->expected(1, 1000)->delimiter(',');
            else
                s.opt = sub->add_option(fl, s.single, help);
        }
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::Success& e) {
        std::ostringstream out, err;
        app.exit(e, out, err);
        std::cout << out.str();
        return kOk;
    } catch (const CLI::ParseError& e) {
        report("config", "", e.what());
        return kConfigError;
    }

    const Command* cmd = nullptr;
    for (const auto& c : cmds)
        if (subs[c.name]->parsed()) cmd = &c;
    if (cmd == nullptr) {
        report("config", "", "no subcommand");
        return kConfigError;
    }

    const auto t0 = std::chrono::steady_clock::now();
    const std::string started = utc_now();
    json cfg = json::object();
    Run run;
    try {
        for (const auto& k : cmd->keys) cfg[k.name] = k.def;
        const std::string& path = config_paths[cmd->name];
        if (!path.empty()) {
            std::ifstream f(path);
            if (!f) throw ConfigError("cannot open config '" + path + "'");
            json file;
            try {
                file = json::parse(f);
            } catch (const json::parse_error& e) {
                throw ConfigError("config '" + path + "': " + e.what());
            }
            if (!file.is_object()) throw ConfigError("config must be a JSON object");
            for (auto it = file.begin(); it != file.end(); ++it) {
                if (!cfg.contains(it.key()))
                    throw ConfigError("unknown key '" + it.key() + "' for " + cmd->name);
                cfg[it.key()] = it.value();
            }
        }
        for (const auto& k : cmd->keys) {
            const auto& s = slots[cmd->name][k.name];
            if (s.opt->count() > 0) cfg[k.name] = from_text(k, s.text.empty() ? std::vector<std::string>{s.single} : s.text);
        }
        for (const auto& k : cmd->keys) validate_value(k, cfg[k.name]);

        run.out = str(cfg, "out");
        run.threads = integer(cfg, "threads");
        parallel::set_default_threads(run.threads);
        std::error_code ec;
        fs::create_directories(run.out, ec);
        if (ec) throw ConfigError("cannot create output directory '" + run.out.string() + "': " + ec.message());

        cmd->action(cfg, run);
    } catch (const ConfigError& e) {
        report("config", cmd->name, e.what());
        return kConfigError;
    } catch (const InvalidArgument& e) {
        report("config", cmd->name, e.what());
        return kConfigError;
    } catch (const NumericalFailure& e) {
        report("numerical", cmd->name, e.what());
        return kNumericalError;
    } catch (const std::exception& e) {
        report("numerical", cmd->name, e.what());
        return kNumericalError;
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const json manifest = {{"tool", "hypspec"},
                           {"version", HYPSPEC_VERSION},
                           {"command", cmd->name},
                           {"config_file", config_paths[cmd->name].empty() ? json(nullptr)
                                                                          : json(config_paths[cmd->name])},
                           {"config", cfg},
                           {"threads", run.threads},
                           {"seeds", run.seeds},
                           {"outputs", run.outputs},
                           {"started_utc", started},
                           {"wall_seconds", wall}};
    std::ofstream(run.out / "manifest.json") << manifest.dump(2) << "\n";
    return kOk;
}

}  // namespace hypspec::cli
