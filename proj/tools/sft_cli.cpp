// sft: command-line front end for the verification and estimation routines.
//
// Every subcommand writes one JSON report (pretty printed, fixed key order)
// to --out, to $SFT_OUT_DIR/<subcommand>.json when --out is absent and the
// variable is set, and to stdout otherwise. Reports never contain timing or
// the worker count, so a rerun with the same seed is byte-identical.
//
// Exit codes: 0 ok, 2 bad parameters, 3 identity check outside tolerance,
// 4 estimate flagged unreliable, 1 anything else.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "sft/bridge.hpp"
#include "sft/change_of_variables.hpp"
#include "sft/errors.hpp"
#include "sft/expr.hpp"
#include "sft/metric.hpp"
#include "sft/mobius.hpp"
#include "sft/orbital.hpp"
#include "sft/special_maps.hpp"
#include "sft/spline.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace sft;

namespace {

constexpr double pi = std::numbers::pi;

enum Exit { ok = 0, failure = 1, bad_parameter = 2, check_failed = 3, unreliable = 4 };

struct Common {
    std::string out;
    unsigned workers = 1;
};

struct Outcome {
    json report;
    bool passed = true;
    bool reliable = true;
};

json estimate_json(const MCEstimate& e) {
    json j;
    j["mean"] = e.mean;
    j["std_error"] = e.std_error;
    j["n"] = e.n;
    j["max_weight_fraction"] = e.max_weight_fraction;
    j["reliable"] = e.reliable();
    return j;
}

json mc_json(const MCOptions& o) {
    json j;
    j["grid"] = o.grid;
    j["samples"] = o.samples;
    j["seed"] = o.seed;
    j["chunks"] = o.chunks;
    return j;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ParameterError("cannot parse number '" + item + "'");
        }
    }
    if (v.empty()) throw ParameterError("empty list");
    return v;
}

double parse_number(const std::string& s, const std::string& what) {
    const auto v = parse_list(s);
    if (v.size() != 1) throw ParameterError(what + ": expected one number");
    return v[0];
}

// "name" or "name:arg"
std::pair<std::string, std::string> split_tag(const std::string& s) {
    const auto p = s.find(':');
    if (p == std::string::npos) return {s, ""};
    return {s.substr(0, p), s.substr(p + 1)};
}

PeriodicFunction periodic_from_expr(const std::string& text, const std::string& what) {
    const Expr e = Expr::parse(load_expression(text));
    const Expr d = e.derivative();
    const Expr d2 = d.derivative();
    for (const Expr* x : {&e, &d})
        if (std::abs((*x)(0.0) - (*x)(1.0)) > 1e-9 * (1 + std::abs((*x)(0.0))))
            throw ParameterError(what + ": expression is not 1-periodic");
    return PeriodicFunction{[e](double t) { return e(t); }, [d](double t) { return d(t); },
                            [d2](double t) { return d2(t); }};
}

void add_mc_flags(CLI::App* c, MCOptions& o, bool with_grid = true) {
    if (with_grid) c->add_option("--grid", o.grid, "grid intervals N")->check(CLI::Range(2, 1 << 24));
    c->add_option("--samples", o.samples, "Monte Carlo samples")->check(CLI::Range(std::uint64_t(2), std::uint64_t(1) << 40));
    c->add_option("--seed", o.seed, "master seed");
    c->add_option("--unreliable-threshold", o.unreliable_threshold,
                  "largest single-sample share of sum |sample| before the estimate is flagged");
}

// partition-ratio
struct PartitionArgs {
    double alpha2 = 0, sigma2 = 1;
    bool exact_only = false;
    double bias_allowance = 0.01;
    MCOptions mc;
};

Outcome run_partition(const PartitionArgs& a) {
    const OrbitalParams p(a.alpha2, a.sigma2);
    Outcome r;
    json& j = r.report;
    j["command"] = "partition-ratio";
    j["identity"] = "Z^alpha / Z^0 = (alpha / sin alpha) exp(2 alpha^2 / sigma^2)";
    j["params"] = {{"alpha2", a.alpha2}, {"sigma2", a.sigma2}, {"exact_only", a.exact_only},
                   {"bias_allowance", a.bias_allowance}, {"allow_strong_elliptic", a.mc.allow_strong_elliptic}};
    const double exact = partition_ratio_exact(p);
    j["exact"] = exact;
    if (a.exact_only) return r;
    j["mc"] = mc_json(a.mc);
    const MCEstimate e = mc_partition_ratio(p, a.mc);
    j["estimate"] = estimate_json(e);
    const double gap = std::abs(e.mean - exact);
    const double tol = 3 * e.std_error + a.bias_allowance * std::abs(exact);
    j["abs_gap"] = gap;
    j["z_score"] = e.std_error > 0 ? gap / e.std_error : 0.0;
    j["tolerance"] = tol;
    r.passed = gap <= tol;
    r.reliable = e.reliable();
    j["passed"] = r.passed;
    return r;
}

// defect-check
struct DefectArgs {
    double alpha2 = 1, sigma2 = 2;
    std::string functional = "all";
    MCOptions mc;
};

Outcome run_defect(const DefectArgs& a) {
    const OrbitalParams p(a.alpha2, a.sigma2);
    std::vector<NamedFunctional> Gs;
    for (auto& g : standard_defect_functionals())
        if (a.functional == "all" || a.functional == g.name) Gs.push_back(g);
    if (Gs.empty()) throw ParameterError("unknown functional '" + a.functional + "'");

    Outcome r;
    json& j = r.report;
    j["command"] = "defect-check";
    j["identity"] = "boundary defect: E[G(f_alpha o P) w_alpha(P)] = (alpha / sin alpha) E[G(P) exp(8 sin^2(alpha/2) P'(0) / sigma^2)]";
    j["params"] = {{"alpha2", a.alpha2}, {"sigma2", a.sigma2}, {"functional", a.functional}};
    j["mc"] = mc_json(a.mc);
    j["results"] = json::array();
    for (const auto& s : defect_identity_check(p, Gs, a.mc)) {
        const double se = std::hypot(s.lhs.std_error, s.rhs.std_error);
        const double gap = std::abs(s.lhs.mean - s.rhs.mean);
        const bool pass = gap <= 3 * se;
        r.passed = r.passed && pass;
        r.reliable = r.reliable && s.lhs.reliable() && s.rhs.reliable();
        j["results"].push_back({{"functional", s.name},
                                {"lhs", estimate_json(s.lhs)},
                                {"rhs", estimate_json(s.rhs)},
                                {"abs_gap", gap},
                                {"combined_std_error", se},
                                {"passed", pass}});
    }
    j["passed"] = r.passed;
    return r;
}

// cov-check
struct CovArgs {
    std::string map = "falpha:1";
    double sigma2 = 1;
    bool crn = false;
    MCOptions mc;
};

SmoothMap map_from_tag(const std::string& tag) {
    const auto [kind, arg] = split_tag(tag);
    if (kind == "id" && arg.empty()) return identity_map();
    if (kind == "falpha") return f_alpha(parse_number(arg, "falpha"));
    if (kind == "exp") return exp_map(parse_number(arg, "exp"));
    if (kind == "spline") return load_spline_map(arg);
    throw ParameterError("unknown map '" + tag + "' (id, falpha:<a2>, exp:<lambda>, spline:<file>)");
}

Outcome run_cov(const CovArgs& a) {
    if (!(a.sigma2 > 0)) throw ParameterError("sigma2 must be positive");
    const SmoothMap f = map_from_tag(a.map);
    Outcome r;
    json& j = r.report;
    j["command"] = "cov-check";
    j["identity"] = "bridge pushforward: mass(0) E_0[F(P^{-1}(f^{-1} o P_xi))] = mass(-b) E_{-b}[F(xi) density(xi)]";
    j["params"] = {{"map", a.map}, {"sigma2", a.sigma2}, {"common_random_numbers", a.crn}};
    j["mc"] = mc_json(a.mc);
    const auto rep = verify_pushforward(f, standard_path_functionals(), a.sigma2, a.mc, a.crn);
    j["b"] = rep.b;
    j["results"] = json::array();
    for (const auto& s : rep.sides) {
        const double se = std::hypot(s.side_a.std_error, s.side_b.std_error);
        const double gap = std::abs(s.side_a.mean - s.side_b.mean);
        const bool pass = gap <= 3 * se;
        r.passed = r.passed && pass;
        r.reliable = r.reliable && s.side_a.reliable() && s.side_b.reliable();
        j["results"].push_back({{"functional", s.name},
                                {"side_a", estimate_json(s.side_a)},
                                {"side_b", estimate_json(s.side_b)},
                                {"abs_gap", gap},
                                {"combined_std_error", se},
                                {"passed", pass}});
    }
    j["passed"] = r.passed;
    return r;
}

// hill-solve
struct HillArgs {
    std::string q = "-(1 + sin(2*pi*t)^2)";
    double step = 1e-4;
    int table = 101;
    double tol = 1e-6;
};

Outcome run_hill(const HillArgs& a) {
    const std::string text = load_expression(a.q);
    const Expr e = Expr::parse(text);
    const auto q = [e](double t) { return e(t); };
    const HillSolution sol = hill_construct(q, a.step);
    const double res = hill_residual(sol, q);
    Outcome r;
    json& j = r.report;
    j["command"] = "hill-solve";
    j["identity"] = "S(f_q, t) = q(t), f_q = a g2 / (c g2 + g1)";
    j["params"] = {{"q", text}, {"step", a.step}, {"table", a.table}, {"tol", a.tol}};
    j["a"] = sol.a;
    j["c"] = sol.c;
    const Jet3 j0 = sol.map.jet(0.0), j1 = sol.map.jet(1.0);
    j["f2_at_0"] = j0.d2;
    j["f2_at_1"] = j1.d2;
    j["endpoint_signs_ok"] = j1.d2 < 0 && 0 < j0.d2;
    j["max_residual"] = res;
    json rows = json::array();
    for (int i = 0; i < a.table; ++i) {
        const double t = a.table == 1 ? 0.0 : double(i) / (a.table - 1);
        const Jet3 x = sol.map.jet(t);
        rows.push_back({t, x.f, x.d1, x.d2});
    }
    j["table_columns"] = {"t", "f", "f1", "f2"};
    j["table"] = rows;
    r.passed = res <= a.tol;
    j["passed"] = r.passed;
    return r;
}

// poisson-check
struct PoissonArgs {
    std::string rho_list = "0,0.3,0.9,0.99";
    int nodes = 1 << 14;
    double tol = 1e-10;
};

Outcome run_poisson(const PoissonArgs& a) {
    Outcome r;
    json& j = r.report;
    j["command"] = "poisson-check";
    j["identity"] = "int_0^1 phi_z'(t)^2 dt = (1 + rho^2) / (1 - rho^2), rho = |z|";
    j["params"] = {{"rho_list", a.rho_list}, {"nodes", a.nodes}, {"tol", a.tol}};
    j["results"] = json::array();
    for (double rho : parse_list(a.rho_list)) {
        if (!(rho >= 0 && rho < 1)) throw ParameterError("rho must lie in [0, 1)");
        const MobiusElement m(std::polar(rho, 0.7), 0.0);
        const double quad = mobius_energy_quadrature(m, a.nodes);
        const double closed = mobius_energy(m);
        const double gap = std::abs(quad - closed) / closed;
        const bool pass = gap <= a.tol;
        r.passed = r.passed && pass;
        j["results"].push_back({{"rho", rho}, {"quadrature", quad}, {"closed_form", closed}, {"rel_gap", gap}, {"passed", pass}});
    }
    j["passed"] = r.passed;
    return r;
}

// haar-regularizer
struct HaarArgs {
    double alpha2 = 1, sigma2 = 1;
    std::string phi = "id";
    int grid = 1024;
    double phi_sigma2 = 1.0;
    bool limit_table = false;
    double tol = 1e-8;
};

CircleDiffeo phi_from_tag(const HaarArgs& a) {
    const auto [kind, arg] = split_tag(a.phi);
    if (kind == "id" && arg.empty()) return CircleDiffeo::identity(a.grid);
    if (kind == "sample") {
        const auto seed = static_cast<std::uint64_t>(parse_number(arg, "sample seed"));
        Stream s(seed, 0, 0);
        return CircleDiffeo::from_path(sample_bridge(a.phi_sigma2, 0.0, 1.0, a.grid, s));
    }
    if (kind == "sine") return CircleDiffeo::from_map(sine_perturbation(parse_number(arg, "sine amplitude"), 1), a.grid);
    throw ParameterError("unknown phi '" + a.phi + "' (id, sample:<seed>, sine:<eps>)");
}

Outcome run_haar(const HaarArgs& a) {
    if (a.grid < 8) throw ParameterError("grid must be at least 8");
    if (!(a.phi_sigma2 > 0)) throw ParameterError("phi-sigma2 must be positive");
    const OrbitalParams p(a.alpha2, a.sigma2);
    const CircleDiffeo phi = phi_from_tag(a);
    const bool is_id = a.phi == "id";
    Outcome r;
    json& j = r.report;
    j["command"] = "haar-regularizer";
    j["identity"] = "D^alpha(phi) <= 2 pi / (pi + alpha); D^alpha(id) = (2 pi / (pi + alpha)) exp(-2 (pi^2 - alpha^2) / sigma^2)";
    j["params"] = {{"alpha2", a.alpha2}, {"sigma2", a.sigma2}, {"phi", a.phi}, {"grid", a.grid},
                   {"phi_sigma2", a.phi_sigma2}, {"limit_table", a.limit_table}, {"tol", a.tol}};
    const HaarResult h = haar_regularizer_D(phi, p);
    j["value"] = h.value;
    j["bound"] = h.bound;
    j["tail_estimate"] = h.tail_estimate;
    j["accuracy_warning"] = h.accuracy_warning;
    r.passed = h.value <= h.bound * (1 + 1e-12);
    j["bound_holds"] = r.passed;
    if (is_id) {
        const double closed = haar_regularizer_identity(p);
        const double gap = std::abs(h.value - closed) / closed;
        j["closed_form"] = closed;
        j["rel_gap"] = gap;
        r.passed = r.passed && gap <= a.tol;
    }
    if (a.limit_table) {
        json rows = json::array();
        for (int k = 1; k <= 4; ++k) {
            const double al = pi - std::pow(10.0, -k);
            const HaarResult x = haar_regularizer_D(phi, OrbitalParams(al * al, a.sigma2));
            rows.push_back({{"k", k}, {"alpha", al}, {"value", x.value}, {"bound", x.bound}, {"abs_gap_to_one", std::abs(x.value - 1)}});
        }
        j["limit_table"] = rows;
    }
    r.reliable = !h.accuracy_warning;
    j["passed"] = r.passed;
    return r;
}

// spectral-check
struct SpectralArgs {
    double sigma2 = 2;
    double tol = 1e-8;
};

Outcome run_spectral(const SpectralArgs& a) {
    if (!(a.sigma2 > 0)) throw ParameterError("sigma2 must be positive");
    const SpectralCheck s = spectral_density_check(a.sigma2);
    Outcome r;
    json& j = r.report;
    j["command"] = "spectral-check";
    j["identity"] = "int_0^inf e^{-sigma^2 E} 2 sinh(2 pi sqrt(2E)) dE = (2 pi / sigma^2)^{3/2} exp(2 pi^2 / sigma^2)";
    j["params"] = {{"sigma2", a.sigma2}, {"tol", a.tol}};
    j["quadrature"] = s.quadrature;
    j["quadrature_k"] = s.quadrature_k;
    j["closed_form"] = s.closed_form;
    j["tail_bound"] = s.tail_bound;
    j["rel_gap"] = s.rel_gap;
    j["form_gap"] = s.form_gap;
    r.passed = s.rel_gap <= a.tol && s.form_gap <= a.tol;
    j["passed"] = r.passed;
    return r;
}

// schwarzian-z
struct SchwarzianArgs {
    double sigma2 = 1;
    bool limit_table = false;
    double tol = 1e-5;
};

Outcome run_schwarzian(const SchwarzianArgs& a) {
    if (!(a.sigma2 > 0)) throw ParameterError("sigma2 must be positive");
    Outcome r;
    json& j = r.report;
    j["command"] = "schwarzian-z";
    j["identity"] = "Z(sigma^2) = (2 pi / sigma^2)^{3/2} exp(2 pi^2 / sigma^2) = lim 4 pi (pi - alpha) / sigma^2 Z^alpha";
    j["params"] = {{"sigma2", a.sigma2}, {"limit_table", a.limit_table}, {"tol", a.tol}};
    j["value"] = schwarzian_partition(a.sigma2);
    if (a.limit_table) {
        json rows = json::array();
        const auto tab = schwarzian_limit_table(a.sigma2);
        for (const auto& row : tab)
            rows.push_back({{"k", row.k}, {"delta", row.delta}, {"value", row.value}, {"rel_gap", row.rel_gap}});
        j["limit_table"] = rows;
        // first order: the gap shrinks tenfold per row
        json ratios = json::array();
        for (std::size_t i = 1; i < tab.size(); ++i) ratios.push_back(tab[i - 1].rel_gap / tab[i].rel_gap);
        j["gap_ratios"] = ratios;
        r.passed = tab.back().rel_gap <= a.tol;
        j["passed"] = r.passed;
    }
    return r;
}

// metric
struct MetricArgs {
    std::string rho = "1";
    bool partition = false;
    int correlator = 0;
    int fd_check = 0;
    std::vector<std::string> h;
    double step = 1e-4;
    double tol = 1e-4;
};

Outcome run_metric(const MetricArgs& a) {
    const int modes = int(a.partition) + int(a.correlator > 0) + int(a.fd_check > 0);
    if (modes != 1) throw ParameterError("choose exactly one of --partition, --correlator k, --fd-check k");
    const std::string text = load_expression(a.rho);
    const MetricProfile rho = MetricProfile::from_rho(periodic_from_expr(text, "rho"));
    Outcome r;
    json& j = r.report;
    j["command"] = "metric";
    json params = {{"rho", text}};
    std::vector<PeriodicFunction> hs;
    std::vector<std::string> htext;
    for (const auto& s : a.h) {
        htext.push_back(load_expression(s));
        hs.push_back(periodic_from_expr(htext.back(), "h"));
    }
    j["sigma2_rho"] = rho.sigma2_rho();
    if (a.partition) {
        j["identity"] = "log Z(rho) = 1/2 int rho'^2 / rho^3 + log[(2 pi / s)^{3/2} exp(2 pi^2 / s)], s = int rho";
        j["params"] = params;
        const NormaliserRoutes routes = normaliser_routes(rho);
        j["normaliser_routes"] = {{"gradient", routes.gradient}, {"schwarzian", routes.schwarzian}, {"second", routes.second}};
        j["log_C"] = std::log(normaliser_C(rho));
        j["log_Z"] = log_partition_Z_metric(rho);
        j["Z"] = partition_Z_metric(rho);
        return r;
    }
    const int k = a.correlator > 0 ? a.correlator : a.fd_check;
    if (!hs.empty() && static_cast<int>(hs.size()) != k) throw ParameterError("--test-fn needs exactly k functions");
    if (hs.empty()) hs.assign(k, constant_function(1.0));
    if (htext.empty()) htext.assign(k, "1");
    params["k"] = k;
    params["h"] = htext;
    if (!rho.is_constant()) {
        // an expression is constant if it never varies on a fine grid
        for (int i = 0; i <= 256; ++i)
            if (std::abs(rho.rho(i / 256.0) - rho.rho(0)) > 0) throw ParameterError("correlators need a constant rho");
    }
    const double s = rho.sigma2_rho();
    if (a.correlator > 0) {
        j["identity"] = "truncated correlator 2 pi^2 k! s^{k-1} + 3/2 (k-1)! s^k; smeared correlator from the set-partition formula";
        j["params"] = params;
        j["truncated"] = truncated_correlator(k, s);
        j["smeared"] = correlator_formula(s, hs);
        return r;
    }
    if (k > 4) throw ParameterError("--fd-check supports k <= 4");
    params["step"] = a.step;
    params["tol"] = a.tol;
    j["identity"] = "d^k log Z(rho_eps) / d eps_1..d eps_k = set-partition formula, 1/rho_eps = 1/s + sum eps_i h_i";
    j["params"] = params;
    const FdCheck c = functional_derivative_check(k, s, hs, a.step);
    j["numeric"] = c.numeric;
    j["formula"] = c.formula;
    j["rel_gap"] = c.rel_gap;
    r.passed = c.rel_gap <= a.tol;
    j["passed"] = r.passed;
    return r;
}

// sample
struct SampleArgs {
    double sigma2 = 1, alpha2 = 0;
    std::string dump_dir;
    int dumps = 4;
    std::string pairs = "0:0.5,0.1:0.3,0.25:0.75";
    MCOptions mc;
};

Outcome run_sample(const SampleArgs& a) {
    const OrbitalParams p(a.alpha2, a.sigma2);
    if (a.alpha2 >= pi * pi / 4 && !a.mc.allow_strong_elliptic)
        throw ParameterError("alpha2 >= pi^2/4 needs --allow-strong-elliptic");
    if (a.dumps < 0) throw ParameterError("dumps must be non-negative");
    std::vector<std::pair<double, double>> pairs;
    {
        std::stringstream ss(a.pairs);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto [s, t] = split_tag(item);
            if (t.empty()) throw ParameterError("pairs are written s:t");
            pairs.emplace_back(parse_number(s, "pair"), parse_number(t, "pair"));
        }
    }
    for (auto [s, t] : pairs) {
        const double d = t - s;
        if (std::abs(d - std::round(d)) < 1e-9) throw ParameterError("pair points must differ mod 1");
    }

    std::string dir = a.dump_dir;
    if (dir.empty())
        if (const char* env = std::getenv("SFT_OUT_DIR")) dir = (fs::path(env) / "paths").string();
    const int N = a.mc.grid;

    // dumps: the first samples of chunk 0, the same paths the estimator uses
    json files = json::array();
    if (!dir.empty() && a.dumps > 0) {
        fs::create_directories(dir);
        Stream st(a.mc.seed, 0, 0);
        std::vector<double> xi(N + 1);
        const int n = static_cast<int>(std::min<std::uint64_t>(a.dumps, chunk_size(a.mc.run(), 0)));
        for (int i = 0; i < n; ++i) {
            sample_bridge_into(st, a.sigma2, 0.0, 1.0, xi);
            const fs::path file = fs::path(dir) / ("sample_" + std::to_string(i) + ".csv");
            std::ofstream os(file);
            if (!os) throw ParameterError("cannot write " + file.string());
            os.precision(17);
            os << "t,xi\n";
            for (int k = 0; k <= N; ++k) os << double(k) / N << ',' << xi[k] << '\n';
            files.push_back(file.filename().string());
        }
    }

    // per sample: w, then (cr, cr^2, w cr) for every pair
    const std::size_t m = pairs.size();
    const auto ests = estimate_many(a.mc.run(), 1 + 3 * m, [&](Stream& st, std::span<double> out) {
        std::vector<double> xi(N + 1);
        sample_bridge_into(st, a.sigma2, 0.0, 1.0, xi);
        const CircleDiffeo phi = ms_map(GridPath(std::move(xi)));
        const double w = a.alpha2 == 0 ? 1.0 : weight_alpha(phi, p);
        out[0] = w;
        for (std::size_t i = 0; i < m; ++i) {
            const double c = cross_ratio(phi, pairs[i].first, pairs[i].second);
            out[1 + 3 * i] = c;
            out[2 + 3 * i] = c * c;
            out[3 + 3 * i] = w * c;
        }
    });

    Outcome r;
    json& j = r.report;
    j["command"] = "sample";
    j["identity"] = "cross ratio pi sqrt(phi'(s) phi'(t)) / sin(pi (phi(t) - phi(s))) under the alpha-orbital measure";
    j["params"] = {{"sigma2", a.sigma2}, {"alpha2", a.alpha2}, {"pairs", a.pairs}, {"dumps", a.dumps}};
    j["mc"] = mc_json(a.mc);
    j["dump_files"] = files;
    j["weight"] = estimate_json(ests[0]);
    r.reliable = ests[0].reliable();
    json rows = json::array();
    for (std::size_t i = 0; i < m; ++i) {
        const MCEstimate& c = ests[1 + 3 * i];
        const MCEstimate& c2 = ests[2 + 3 * i];
        const MCEstimate& wc = ests[3 + 3 * i];
        const double var = std::max(0.0, c2.mean - c.mean * c.mean);
        rows.push_back({{"s", pairs[i].first},
                        {"t", pairs[i].second},
                        {"bridge_mean", c.mean},
                        {"bridge_std_error", c.std_error},
                        {"bridge_sd", std::sqrt(var)},
                        {"orbital_mean", wc.mean / ests[0].mean}});
        r.reliable = r.reliable && wc.reliable();
    }
    j["cross_ratio"] = rows;
    return r;
}

void write_report(const json& report, const std::string& command, const std::string& out) {
    const std::string text = report.dump(2) + "\n";
    std::string path = out;
    if (path.empty())
        if (const char* env = std::getenv("SFT_OUT_DIR")) path = (fs::path(env) / (command + ".json")).string();
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ParameterError("cannot write " + path);
    os << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Schwarzian field theory numerics: Monte Carlo estimators and identity checks"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--out", common.out, "report path ('-' for stdout)");
    app.add_option("--workers", common.workers, "worker threads (results do not depend on it)")->check(CLI::Range(1u, 1024u));

    auto attach_common = [&](CLI::App* c) {
        c->add_option("--out", common.out, "report path ('-' for stdout)");
        c->add_option("--workers", common.workers, "worker threads (results do not depend on it)")->check(CLI::Range(1u, 1024u));
    };

    PartitionArgs pa;
    auto* c_part = app.add_subcommand("partition-ratio", "Monte Carlo vs exact Z^alpha / Z^0");
    c_part->add_option("--alpha2", pa.alpha2, "alpha^2 (negative: hyperbolic)")->required();
    c_part->add_option("--sigma2", pa.sigma2, "sigma^2")->required();
    c_part->add_flag("--exact-only", pa.exact_only, "skip the Monte Carlo run");
    c_part->add_flag("--allow-strong-elliptic", pa.mc.allow_strong_elliptic, "permit pi^2/4 < alpha^2 < pi^2");
    c_part->add_option("--bias-allowance", pa.bias_allowance, "grid-bias allowance, relative to the exact value");
    add_mc_flags(c_part, pa.mc);
    attach_common(c_part);

    DefectArgs da;
    auto* c_def = app.add_subcommand("defect-check", "both sides of the boundary-defect identity");
    c_def->add_option("--alpha2", da.alpha2, "alpha^2");
    c_def->add_option("--sigma2", da.sigma2, "sigma^2");
    c_def->add_option("--functional", da.functional, "one, phid0, expneg or all")
        ->check(CLI::IsMember({"one", "phid0", "expneg", "all"}));
    c_def->add_flag("--allow-strong-elliptic", da.mc.allow_strong_elliptic, "permit pi^2/4 < alpha^2 < pi^2");
    add_mc_flags(c_def, da.mc);
    attach_common(c_def);

    CovArgs ca;
    auto* c_cov = app.add_subcommand("cov-check", "bridge change-of-variables pushforward test");
    c_cov->add_option("--map", ca.map, "id, falpha:<a2>, exp:<lambda> or spline:<file>");
    c_cov->add_option("--sigma2", ca.sigma2, "sigma^2");
    c_cov->add_flag("--crn", ca.crn, "drive both sides with common random numbers");
    add_mc_flags(c_cov, ca.mc);
    attach_common(c_cov);

    HillArgs ha;
    auto* c_hill = app.add_subcommand("hill-solve", "solve S(f) = q through the Hill equation");
    c_hill->add_option("--q", ha.q, "expression in t, or a file holding one; q <= 0");
    c_hill->add_option("--step", ha.step, "integration step");
    c_hill->add_option("--table", ha.table, "rows in the f table")->check(CLI::Range(1, 100001));
    c_hill->add_option("--tol", ha.tol, "residual tolerance");
    attach_common(c_hill);

    PoissonArgs pq;
    auto* c_poi = app.add_subcommand("poisson-check", "energy of Moebius maps against (1 + rho^2) / (1 - rho^2)");
    c_poi->add_option("--rho-list", pq.rho_list, "comma-separated |z| values in [0, 1)");
    c_poi->add_option("--nodes", pq.nodes, "trapezoid nodes")->check(CLI::Range(8, 1 << 24));
    c_poi->add_option("--tol", pq.tol, "relative tolerance");
    attach_common(c_poi);

    HaarArgs hr;
    auto* c_haar = app.add_subcommand("haar-regularizer", "D^alpha(phi), its bound and the alpha -> pi limit");
    c_haar->add_option("--alpha2", hr.alpha2, "alpha^2 in [0, pi^2)");
    c_haar->add_option("--sigma2", hr.sigma2, "sigma^2");
    c_haar->add_option("--phi", hr.phi, "id, sample:<seed> or sine:<eps>");
    c_haar->add_option("--grid", hr.grid, "nodes describing phi");
    c_haar->add_option("--phi-sigma2", hr.phi_sigma2, "bridge variance for sampled phi");
    c_haar->add_flag("--limit-table", hr.limit_table, "D^alpha at alpha = pi - 10^-k, k = 1..4");
    c_haar->add_option("--tol", hr.tol, "relative tolerance against the closed form (phi = id)");
    attach_common(c_haar);

    SpectralArgs sa;
    auto* c_spec = app.add_subcommand("spectral-check", "spectral-density integral against its closed form");
    c_spec->add_option("--sigma2", sa.sigma2, "sigma^2");
    c_spec->add_option("--tol", sa.tol, "relative tolerance");
    attach_common(c_spec);

    SchwarzianArgs za;
    auto* c_z = app.add_subcommand("schwarzian-z", "Schwarzian partition function and the alpha -> pi limit");
    c_z->add_option("--sigma2", za.sigma2, "sigma^2");
    c_z->add_flag("--limit-table", za.limit_table, "rows alpha = pi - 10^-k, k = 2..6");
    c_z->add_option("--tol", za.tol, "tolerance on the last row");
    attach_common(c_z);

    MetricArgs ma;
    auto* c_met = app.add_subcommand("metric", "partition function and correlators for a metric profile rho");
    c_met->add_option("--rho", ma.rho, "expression in t, or a file holding one; rho > 0, 1-periodic");
    c_met->add_flag("--partition", ma.partition, "log Z(rho) and the normaliser");
    c_met->add_option("--correlator", ma.correlator, "k-point correlator (constant rho)")->check(CLI::Range(1, 8));
    c_met->add_option("--fd-check", ma.fd_check, "finite-difference check of the k-th derivative")->check(CLI::Range(1, 4));
    c_met->add_option("--test-fn", ma.h, "test functions for --fd-check, one per point");
    c_met->add_option("--step", ma.step, "finite-difference step");
    c_met->add_option("--tol", ma.tol, "relative tolerance");
    attach_common(c_met);

    SampleArgs sp;
    auto* c_smp = app.add_subcommand("sample", "path dumps and cross-ratio statistics");
    c_smp->add_option("--sigma2", sp.sigma2, "sigma^2");
    c_smp->add_option("--alpha2", sp.alpha2, "alpha^2 for the orbital reweighting");
    c_smp->add_option("--dump-dir", sp.dump_dir, "directory for sample_<i>.csv (t,xi)");
    c_smp->add_option("--dumps", sp.dumps, "paths to dump");
    c_smp->add_option("--pairs", sp.pairs, "cross-ratio points s:t,s:t,...");
    c_smp->add_flag("--allow-strong-elliptic", sp.mc.allow_strong_elliptic, "permit pi^2/4 <= alpha^2 < pi^2");
    add_mc_flags(c_smp, sp.mc);
    sp.mc.samples = 10000;
    attach_common(c_smp);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return bad_parameter;
    }

    for (MCOptions* o : {&pa.mc, &da.mc, &ca.mc, &sp.mc}) o->workers = common.workers;

    try {
        Outcome r;
        CLI::App* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        if (sub == c_part) r = run_partition(pa);
        else if (sub == c_def) r = run_defect(da);
        else if (sub == c_cov) r = run_cov(ca);
        else if (sub == c_hill) r = run_hill(ha);
        else if (sub == c_poi) r = run_poisson(pq);
        else if (sub == c_haar) r = run_haar(hr);
        else if (sub == c_spec) r = run_spectral(sa);
        else if (sub == c_z) r = run_schwarzian(za);
        else if (sub == c_met) r = run_metric(ma);
        else r = run_sample(sp);
        write_report(r.report, name, common.out);
        if (!r.passed) return check_failed;
        if (!r.reliable) return unreliable;
        return ok;
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return bad_parameter;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return failure;
    }
}
