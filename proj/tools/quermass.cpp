// Command-line front end: functionals, deficits, lemma suites, the bump
// counterexample, the conjecture search and mesh export.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "quermass/appendix_counterexample.hpp"
#include "quermass/axisym.hpp"
#include "quermass/config.hpp"
#include "quermass/conjecture_search.hpp"
#include "quermass/inequality_lab.hpp"
#include "quermass/io.hpp"
#include "quermass/numerics.hpp"
#include "quermass/star_domain.hpp"
#include "quermass/suites.hpp"

using namespace quermass;
using nlohmann::json;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitError = 2;

struct RunConfig {
    std::string command;
    std::string target;  // lemma for verify, deficit family for deficits
    int n = 3;
    int resolution = 0;
    int degree_cap = 0;
    double lambda_cut = 0;
    double eps = 0;
    double kappa = 0;
    std::vector<double> kappas;
    std::uint64_t seed = 1;
    int restarts = 10;
    int samples = 0;
    double delta = 0.01;
    double amplitude_cap = 0;
    bool sweep = false;
    bool grid = false;
    bool green = false;
    std::vector<int> ks = {8, 16, 32, 64};
    std::string domain_file;
    std::string axial_file;
    std::string obj;
    std::string out;
    std::string format = "csv";
    std::vector<std::string> tolerances;
};

json config_json(const RunConfig& c, const std::map<std::string, double>& resolved) {
    json j = {{"command", c.command},
              {"target", c.target},
              {"n", c.n},
              {"resolution", c.resolution},
              {"degree_cap", c.degree_cap},
              {"lambda_cut", c.lambda_cut},
              {"eps", c.eps},
              {"kappa", c.kappa},
              {"kappas", c.kappas},
              {"seed", c.seed},
              {"restarts", c.restarts},
              {"samples", c.samples},
              {"delta", c.delta},
              {"amplitude_cap", c.amplitude_cap},
              {"sweep", c.sweep},
              {"grid", c.grid},
              {"green", c.green},
              {"ks", c.ks},
              {"domain", c.domain_file},
              {"axial", c.axial_file},
              {"obj", c.obj},
              {"out", c.out},
              {"format", c.format},
              {"tolerances", default_tolerances().as_map()}};
    // Suite defaults replace the "0 = default" placeholders.
    for (const auto& [k, v] : resolved) {
        if (v == std::floor(v) && std::abs(v) < 9e15)
            j[k] = static_cast<std::int64_t>(v);
        else
            j[k] = v;
    }
    j["threads"] = thread_count();
    return j;
}

// Splits one RFC-4180 line without quoted fields (none of our writers quote).
std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

json csv_to_json(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    std::vector<std::string> keys = split_csv(line);
    json rows = json::array();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells = split_csv(line);
        json row = json::object();
        for (std::size_t i = 0; i < keys.size() && i < cells.size(); ++i) {
            const std::string& c = cells[i];
            char* end = nullptr;
            double v = std::strtod(c.c_str(), &end);
            if (!c.empty() && end == c.c_str() + c.size())
                row[keys[i]] = std::isfinite(v) ? json(v) : json(c);
            else
                row[keys[i]] = c;
        }
        rows.push_back(row);
    }
    return rows;
}

// Tables go to --out DIR as name.csv / name.json, or to stdout.
class Output {
public:
    explicit Output(const RunConfig& c) : cfg_(c) {
        if (!c.out.empty()) std::filesystem::create_directories(c.out);
    }

    void table(const std::string& name, const std::string& csv) {
        if (cfg_.format == "json") {
            json j = csv_to_json(csv);
            if (cfg_.out.empty())
                std::cout << json{{name, j}}.dump(2) << '\n';
            else
                save_json(j, path(name + ".json"));
        } else if (cfg_.out.empty()) {
            if (tables_++ > 0) std::cout << '\n';
            std::cout << csv;
        } else {
            std::ofstream f(path(name + ".csv"), std::ios::binary);
            f << csv;
        }
    }

    void document(const std::string& name, const json& j) {
        if (cfg_.out.empty())
            std::cerr << name << ": " << j.dump() << '\n';
        else
            save_json(j, path(name + ".json"));
    }

    std::string path(const std::string& file) const { return (std::filesystem::path(cfg_.out) / file).string(); }
    bool has_dir() const { return !cfg_.out.empty(); }

private:
    const RunConfig& cfg_;
    int tables_ = 0;
};

int finish(const RunConfig& cfg, Output& out, const SuiteOutcome& outcome) {
    out.document("config", config_json(cfg, outcome.resolved));
    json summary = {{"status", outcome.passed ? "pass" : "fail"},
                    {"command", cfg.command},
                    {"target", cfg.target},
                    {"stats", outcome.stats},
                    {"failures", outcome.failures}};
    out.document(outcome.passed ? "summary" : "failure", summary);
    std::cerr << (outcome.passed ? "PASS" : "FAIL") << ' ' << cfg.command
              << (cfg.target.empty() ? "" : " " + cfg.target) << '\n';
    return outcome.passed ? 0 : kExitFail;
}

SuiteParams suite_params(const RunConfig& c) {
    SuiteParams p;
    p.n = c.n;
    p.resolution = c.resolution;
    p.degree_cap = c.degree_cap;
    p.lambda_cut = c.lambda_cut;
    p.eps = c.eps;
    p.samples = c.samples;
    p.seed = c.seed;
    return p;
}

void row(std::ostream& os, const std::string& key, double v) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << key << ',' << buf << '\n';
}

StarDomain load_domain(const RunConfig& c) {
    if (c.domain_file.empty()) return unit_ball(make_sphere(c.n, c.resolution > 0 ? c.resolution : 32));
    return domain_from_json(load_json(c.domain_file), c.resolution);
}

int cmd_functionals(const RunConfig& c) {
    Output out(c);
    std::ostringstream csv;
    csv << "quantity,value\n";
    if (!c.axial_file.empty()) {
        AxialProfile V = axial_from_json(load_json(c.axial_file));
        AxialFunctionals f = axial_functionals(V);
        row(csv, "n", V.n());
        row(csv, "volume", f.volume);
        row(csv, "perimeter", f.perimeter);
        row(csv, "int_H", f.integrals.H);
        row(csv, "int_H_plus", f.integrals.H_plus);
        row(csv, "int_H_minus", f.integrals.H_minus);
        row(csv, "int_nuclear", f.integrals.nuclear);
        row(csv, "eps_size", axial_eps_size(V).value);
    } else {
        StarDomain K = load_domain(c);
        CurvatureIntegrals I = curvature_integrals(K);
        row(csv, "n", K.n());
        row(csv, "volume", volume(K));
        row(csv, "perimeter", perimeter(K));
        row(csv, "int_H", I.H);
        row(csv, "int_H_plus", I.H_plus);
        row(csv, "int_H_minus", I.H_minus);
        row(csv, "int_abs_H", I.abs_H);
        row(csv, "int_nuclear", I.nuclear);
        for (std::size_t k = 0; k < I.sigma.size(); ++k) row(csv, "int_sigma_" + std::to_string(k), I.sigma[k]);
        row(csv, "min_principal_curvature", I.min_principal);
        Eigen::VectorXd b = barycenter(K);
        for (int i = 0; i < b.size(); ++i) row(csv, "barycenter_" + std::to_string(i), b[i]);
        row(csv, "eps_size", eps_size(K).value);
    }
    out.table("functionals", csv.str());
    return finish(c, out, SuiteOutcome{});
}

int cmd_deficits(const RunConfig& c) {
    Output out(c);
    std::ostringstream csv;
    if (!c.axial_file.empty()) {
        write_deficit_csv_header(csv);
        write_deficit_csv_row(csv, axial_minkowski_deficit(axial_from_json(load_json(c.axial_file))), c.seed);
        out.table("deficits", csv.str());
        return finish(c, out, SuiteOutcome{});
    }
    if (c.domain_file.empty()) {
        // Randomized suite over the chosen family.
        SuiteOutcome o = run_deficit_suite(c.target.empty() ? "nuclear" : c.target, suite_params(c), csv);
        out.table("deficits", csv.str());
        return finish(c, out, o);
    }
    StarDomain K = load_domain(c);
    DomainSummary s = summarize(K);
    const std::string w = c.target.empty() ? "all" : c.target;
    auto want = [&](const char* name) { return w == "all" || w == name; };
    write_deficit_csv_header(csv);
    if (want("minkowski")) write_deficit_csv_row(csv, minkowski_deficit(s), c.seed);
    if (want("volumetric")) write_deficit_csv_row(csv, volumetric_minkowski_deficit(s), c.seed);
    if (want("nuclear")) write_deficit_csv_row(csv, nuclear_minkowski_deficit(s), c.seed);
    if (want("almost_sharp")) write_deficit_csv_row(csv, almost_sharp_margin(s, c.delta), c.seed);
    if (want("quermass"))
        for (int k = 1; k < K.n(); ++k) write_deficit_csv_row(csv, quermassintegral_ratio(K, k), c.seed);
    out.table("deficits", csv.str());
    std::ostringstream extra;
    extra << "quantity,value\n";
    if (want("fuglede")) {
        FugledeReport f = fuglede_deficit(K);
        row(extra, "fuglede_exact", f.exact);
        row(extra, "fuglede_model", f.model);
        row(extra, "fuglede_residual", f.residual);
        row(extra, "fuglede_scale", f.scale);
    }
    if (want("stability") && K.n() >= 4) row(extra, "stability_ratio", stability_ratio(s));
    row(extra, "eps_size", s.eps.value);
    out.table("extras", extra.str());
    return finish(c, out, SuiteOutcome{});
}

int cmd_verify(const RunConfig& c, const CLI::App& sub) {
    Output out(c);
    std::ostringstream csv;
    SuiteParams p = suite_params(c);
    SuiteOutcome o;
    if (c.target == "3.2") {
        o = run_lemma32_suite(p, csv);
    } else if (c.target == "4.1") {
        o = run_lemma41_suite(p, csv);
    } else if (c.target == "4.2") {
        o = run_lemma42_suite(p, csv);
    } else if (c.target == "A.1") {
        std::vector<int> ns = sub.count("--n") ? std::vector<int>{c.n} : std::vector<int>{3, 4, 5};
        std::vector<double> ks = sub.count("--kappa") ? std::vector<double>{c.kappa} : std::vector<double>{10, 40};
        std::vector<double> es = sub.count("--eps") ? std::vector<double>{c.eps} : std::vector<double>{0.1, 0.3};
        o = run_lemma_a1_suite(ns, ks, es, csv);
    } else if (c.target == "pole") {
        o = run_pole_suite(p, csv);
    } else {
        throw std::invalid_argument("unknown lemma " + c.target);
    }
    out.table("verify_" + c.target, csv.str());
    return finish(c, out, o);
}

// Mesh of the bump domain over an S^2 grid; H per vertex from the zonal bump
// profile about the nearest center.
void write_counterexample_obj(const RunConfig& c, double eps, double kappa, const std::string& path) {
    Counterexample ce = build_counterexample(3, eps, kappa, c.seed);
    SpherePtr s = make_sphere(3, c.resolution > 0 ? c.resolution : 64);
    const auto& g = s->grid();
    AxialProfile V = bump_axial_profile(ce.bump, 3);
    const double R = ce.bump.radius();
    Eigen::MatrixXd verts(3, g.size());
    Eigen::VectorXd H(g.size());
    for (int k = 0; k < g.size(); ++k) {
        Eigen::VectorXd x = g.nodes.col(k);
        verts.col(k) = (1.0 + counterexample_value(ce, x)) * x;
        double best = 10;
        for (int i = 0; i < ce.centers.points.cols(); ++i)
            best = std::min(best, std::acos(std::clamp(x.dot(ce.centers.points.col(i)), -1.0, 1.0)));
        H[k] = best < R ? axial_curvature_at(V, {best}).H[0] : 2.0;
    }
    write_obj(g, verts, H, path, "bump counterexample (1 + u(x)) x over the quadrature grid");
}

int cmd_counterexample(const RunConfig& c, const CLI::App& sub) {
    Output out(c);
    std::ostringstream csv;
    const double eps = sub.count("--eps") ? c.eps : 0.3;
    SuiteOutcome o;
    if (c.sweep) {
        o = run_negative_h_search(c.n, eps, c.seed, csv);
    } else {
        std::vector<double> ks = !c.kappas.empty() ? c.kappas : std::vector<double>{sub.count("--kappa") ? c.kappa : 20.0};
        o = run_counterexample_sweep(c.n, eps, ks, c.seed, c.grid, csv);
    }
    o.resolved["eps"] = eps;
    out.table("counterexample", csv.str());
    if (!c.obj.empty()) {
        if (c.n != 3) throw std::invalid_argument("OBJ export needs n = 3");
        double kappa = c.sweep ? o.stats["kappa_star"] : (!c.kappas.empty() ? c.kappas.front() : (sub.count("--kappa") ? c.kappa : 20.0));
        if (!std::isfinite(kappa)) throw std::invalid_argument("no kappa to export");
        write_counterexample_obj(c, eps, kappa, c.obj);
    }
    return finish(c, out, o);
}

int cmd_conjecture(const RunConfig& c) {
    Output out(c);
    SearchOptions opt;
    opt.amplitude_cap = c.amplitude_cap;
    const int cap = c.degree_cap > 0 ? c.degree_cap : (c.n <= 3 ? 10 : 24);
    std::ostringstream csv;
    SearchResult r;
    SuiteOutcome o = run_conjecture_search(c.n, cap, c.restarts, c.seed, opt, csv, &r);
    o.resolved["degree_cap"] = cap;
    out.table("conjecture", csv.str());
    std::ostringstream rcsv;
    rcsv << "restart,seed,gradient_rel_error,ratio,constraint_margin,grad_inf,steps\n";
    for (std::size_t i = 0; i < r.restarts.size(); ++i) {
        const RestartRecord& x = r.restarts[i];
        char buf[512];
        std::snprintf(buf, sizeof buf, "%zu,%llu,%.17g,%.17g,%.17g,%.17g,%d\n", i,
                      static_cast<unsigned long long>(x.seed), x.gradient_rel_error, x.ratio, x.constraint_margin,
                      x.grad_norm_inf, x.steps);
        rcsv << buf;
    }
    out.table("restarts", rcsv.str());
    if (out.has_dir()) save_json(candidate_to_json(r.best), out.path("best_candidate.json"));
    if (c.green) {
        std::ostringstream g;
        SuiteOutcome go = run_green_sequence(c.n, c.ks, g);
        out.table("green", g.str());
        for (const auto& [k, v] : go.stats) o.stats["green_" + k] = v;
        for (const std::string& f : go.failures) o.fail("green: " + f);
    }
    return finish(c, out, o);
}

int cmd_export_mesh(const RunConfig& c) {
    Output out(c);
    StarDomain K = load_domain(c);
    std::string path = !c.obj.empty() ? c.obj : out.has_dir() ? out.path("mesh.obj") : "mesh.obj";
    write_obj(K, path);
    std::cerr << "wrote " << path << '\n';
    return finish(c, out, SuiteOutcome{});
}

void add_common(CLI::App* sub, RunConfig& c) {
    sub->add_option("--seed", c.seed, "64-bit seed for randomized suites");
    sub->add_option("--out", c.out, "output directory (config echo, tables, extra files)");
    sub->add_option("--format", c.format, "table format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--tolerance", c.tolerances, "override a tolerance, KEY=VAL (repeatable)");
}

void add_geometry(CLI::App* sub, RunConfig& c) {
    sub->add_option("--n", c.n, "ambient dimension")->check(CLI::Range(2, 12));
    sub->add_option("--resolution", c.resolution, "grid resolution (polar nodes per level)")->check(CLI::NonNegativeNumber);
    sub->add_option("--degree-cap", c.degree_cap, "maximum harmonic degree")->check(CLI::NonNegativeNumber);
}

void apply_tolerances(const RunConfig& c) {
    for (const std::string& kv : c.tolerances) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--tolerance expects KEY=VAL, got " + kv);
        std::string key = kv.substr(0, eq);
        double v = 0;
        try {
            std::size_t used = 0;
            v = std::stod(kv.substr(eq + 1), &used);
            if (used != kv.size() - eq - 1) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw std::invalid_argument("--tolerance " + key + ": not a number");
        }
        if (!(v > 0)) throw std::invalid_argument("--tolerance " + key + ": must be positive");
        if (!default_tolerances().set(key, v)) throw std::invalid_argument("unknown tolerance " + key);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Functionals, deficits and lemma checks for star-shaped perturbations of the ball"};
    app.require_subcommand(1);
    RunConfig c;

    auto* functionals = app.add_subcommand("functionals", "volume, perimeter and curvature integrals");
    add_geometry(functionals, c);
    functionals->add_option("--domain", c.domain_file, "domain JSON (default: unit ball)");
    functionals->add_option("--axial", c.axial_file, "axial profile JSON");
    add_common(functionals, c);

    auto* deficits = app.add_subcommand("deficits", "deficit reports for a domain, or a randomized suite");
    add_geometry(deficits, c);
    deficits->add_option("--domain", c.domain_file, "domain JSON");
    deficits->add_option("--axial", c.axial_file, "axial profile JSON");
    deficits->add_option("--which", c.target,
                         "file: all|minkowski|volumetric|nuclear|almost_sharp|quermass|fuglede|stability; "
                         "suite: nuclear|volumetric|minkowski|axial");
    deficits->add_option("--eps", c.eps, "suite eps-size");
    deficits->add_option("--samples", c.samples, "suite size");
    deficits->add_option("--delta", c.delta, "almost-sharp offset");
    add_common(deficits, c);

    auto* verify = app.add_subcommand("verify", "randomized lemma suite");
    verify->add_option("lemma", c.target, "3.2, 4.1, 4.2, A.1 or pole")
        ->required()
        ->check(CLI::IsMember({"3.2", "4.1", "4.2", "A.1", "pole"}));
    add_geometry(verify, c);
    verify->add_option("--lambda-cut", c.lambda_cut, "frequency cutoff (default 10 n)");
    verify->add_option("--eps", c.eps, "C^1 / eps-size scale");
    verify->add_option("--kappa", c.kappa, "bump concentration (A.1)");
    verify->add_option("--samples", c.samples, "suite size");
    add_common(verify, c);

    auto* counter = app.add_subcommand("counterexample", "bump construction with negative total mean curvature");
    counter->add_option("--n", c.n, "ambient dimension")->check(CLI::Range(3, 12));
    counter->add_option("--resolution", c.resolution, "grid resolution of the OBJ export");
    counter->add_option("--eps", c.eps, "C^1 size (default 0.3)");
    counter->add_option("--kappa", c.kappa, "bump concentration (default 20)");
    counter->add_option("--kappas", c.kappas, "explicit kappa sweep");
    counter->add_flag("--sweep", c.sweep, "double kappa until int H < -1");
    counter->add_flag("--grid", c.grid, "add the per-cap 2-D cross-check (n = 3)");
    counter->add_option("--obj", c.obj, "write an OBJ mesh (n = 3)");
    add_common(counter, c);

    auto* conj = app.add_subcommand("conjecture", "penalized search for int lap u |grad u|^2 / int |grad u|^2");
    add_geometry(conj, c);
    conj->add_option("--restarts", c.restarts, "restarts")->check(CLI::PositiveNumber);
    conj->add_option("--amplitude-cap", c.amplitude_cap, "cap on ||grad u||_inf (0 = none)");
    conj->add_flag("--green", c.green, "add the truncated Green sequence (n >= 4)");
    conj->add_option("--ks", c.ks, "Green truncation degrees");
    add_common(conj, c);

    auto* mesh = app.add_subcommand("export-mesh", "Wavefront OBJ of a domain (n = 3)");
    mesh->add_option("--domain", c.domain_file, "domain JSON")->required();
    mesh->add_option("--resolution", c.resolution, "grid resolution override");
    mesh->add_option("--obj", c.obj, "output path (default: OUT/mesh.obj)");
    add_common(mesh, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    RunConfig& cfg = c;
    try {
        apply_tolerances(cfg);
        if (functionals->parsed()) {
            cfg.command = "functionals";
            return cmd_functionals(cfg);
        }
        if (deficits->parsed()) {
            cfg.command = "deficits";
            return cmd_deficits(cfg);
        }
        if (verify->parsed()) {
            cfg.command = "verify";
            return cmd_verify(cfg, *verify);
        }
        if (counter->parsed()) {
            cfg.command = "counterexample";
            return cmd_counterexample(cfg, *counter);
        }
        if (conj->parsed()) {
            cfg.command = "conjecture";
            return cmd_conjecture(cfg);
        }
        cfg.command = "export-mesh";
        return cmd_export_mesh(cfg);
    } catch (const std::exception& e) {
        json err = {{"status", "error"}, {"command", cfg.command}, {"message", e.what()}};
        std::cerr << err.dump() << '\n';
        if (!cfg.out.empty()) {
            try {
                std::filesystem::create_directories(cfg.out);
                save_json(err, (std::filesystem::path(cfg.out) / "failure.json").string());
            } catch (const std::exception&) {
            }
        }
        return kExitError;
    }
}
