// rydimer: geometry, coverings, ground-state sweeps, annealing and
// perturbative scaling fits for Rydberg-atom dimer models.

#include "rydimer/config.hpp"
#include "rydimer/dynamics.hpp"
#include "rydimer/effective.hpp"
#include "rydimer/solve.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace rydimer;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitCapacity = 4;

struct Options {
    std::string preset;
    std::string config_file;
    std::vector<std::string> overrides;
    std::optional<double> alpha;
    std::string lambda;  // lo:hi:step
    std::string T;       // comma list
    std::string alpha_scan;
    std::string deltas;
    std::optional<double> delta0, delta_f, dt;
    std::string integrator;
    bool tails = false;
    std::string out;
    bool versioned = false;
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> cap;
    std::string cache_dir;
    std::string cache_action = "inspect";
};

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) {
            try {
                v.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw ConfigError("'" + item + "' is not a number");
            }
        }
    return v;
}

RunConfig resolve(const Options& o) {
    RunConfig base = o.preset.empty() ? RunConfig{} : preset(o.preset);
    json tree = to_json(base);
    if (!o.config_file.empty()) tree = to_json(load_config_file(o.config_file, base));
    for (const auto& ov : o.overrides) apply_override(tree, ov);
    RunConfig c = from_json(tree);
    if (o.alpha) c.alpha = *o.alpha;
    if (!o.lambda.empty()) {
        auto parts = o.lambda;
        std::replace(parts.begin(), parts.end(), ':', ',');
        const auto v = parse_list(parts);
        if (v.size() != 3) throw ConfigError("--lambda expects lo:hi:step");
        c.lambda_min = v[0];
        c.lambda_max = v[1];
        c.lambda_step = v[2];
    }
    if (!o.T.empty()) c.T_list = parse_list(o.T);
    if (!o.alpha_scan.empty()) c.alpha_scan = parse_list(o.alpha_scan);
    if (!o.deltas.empty()) c.scaling_deltas = parse_list(o.deltas);
    if (o.delta0) c.delta0 = *o.delta0;
    if (o.delta_f) c.delta_f = *o.delta_f;
    if (o.dt) c.dt = *o.dt;
    if (!o.integrator.empty()) c.integrator = o.integrator;
    if (o.tails) c.tails = true;
    if (o.threads) c.threads = *o.threads;
    if (o.seed) c.seed = *o.seed;
    if (o.cap) c.dimension_cap = *o.cap;
    if (!o.out.empty()) c.output_dir = o.out;
    if (!o.cache_dir.empty()) c.cache_dir = o.cache_dir;
    if (c.output_dir.empty()) {
        const char* root = std::getenv("RYDIMER_OUTPUT_ROOT");
        c.output_dir = root && *root ? root : "rydimer-out";
    }
    return c;
}

/// Output files for one run. Refuses to reuse a directory that already holds a
/// manifest unless `versioned`, in which case the next free run-NNN subdirectory is used.
fs::path claim_output_dir(const fs::path& dir, bool versioned) {
    if (!fs::exists(dir / "manifest.json")) {
        fs::create_directories(dir);
        return dir;
    }
    if (!versioned)
        throw ConfigError("output directory " + dir.string() + " already holds a run; pass --versioned or choose another --out");
    for (int k = 2; k < 10000; ++k) {
        char name[16];
        std::snprintf(name, sizeof name, "run-%03d", k);
        const fs::path p = dir / name;
        if (!fs::exists(p / "manifest.json")) {
            fs::create_directories(p);
            return p;
        }
    }
    throw ConfigError("no free versioned run directory under " + dir.string());
}

void write_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot write " + tmp.string());
        os << content;
        if (!os) throw Error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

class Run {
  public:
    Run(std::string command, RunConfig cfg, const fs::path& dir) : command_(std::move(command)), cfg_(std::move(cfg)), dir_(dir) {
        manifest_["tool"] = "rydimer";
        manifest_["version"] = RYDIMER_VERSION;
        manifest_["command"] = command_;
        manifest_["config"] = to_json(cfg_);
        manifest_["config_hash"] = hex64(config_hash(cfg_));
        manifest_["warnings"] = json::array();
        manifest_["outputs"] = json::array();
        manifest_["timings"] = json::object();
    }

    template <class F>
    auto timed(const std::string& phase, F&& f) {
        const auto t0 = std::chrono::steady_clock::now();
        auto r = f();
        manifest_["timings"][phase] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    }

    void warn(const std::string& w) {
        std::cerr << "warning: " << w << '\n';
        manifest_["warnings"].push_back(w);
    }

    void output(const std::string& name, const std::string& content) {
        write_atomic(dir_ / name, content);
        manifest_["outputs"].push_back(name);
    }

    json& manifest() { return manifest_; }

    void describe(const Model& m) {
        manifest_["basis_dim"] = m.dim();
        manifest_["coverings"] = m.coverings.size();
        manifest_["atoms"] = m.array.size();
        manifest_["basis_from_cache"] = m.basis_from_cache;
        manifest_["conflict_graph_hash"] = hex64(m.graph.content_hash());
        if (m.array.is_gadget() && !gadget_structure_violations(m.array, m.graph).empty())
            warn("blockade graph differs from the ideal gadget structure at these radii");
    }

    void finish() { write_atomic(dir_ / "manifest.json", manifest_.dump(2) + "\n"); }

  private:
    std::string command_;
    RunConfig cfg_;
    fs::path dir_;
    json manifest_;
};

Model make_model(const RunConfig& c, Run& run) {
    ModelOptions mo;
    mo.radii = c.radii;
    mo.dimension_cap = c.dimension_cap;
    mo.cache_dir = c.cache_dir;
    if (c.tails) mo.tails = TailParams{1.0, c.tail_cutoff};
    Model m = run.timed("model", [&] { return build_model(c.lattice, c.alpha, mo); });
    run.describe(m);
    return m;
}

LanczosOptions lanczos_options(const RunConfig& c) {
    LanczosOptions o;
    o.tol = c.solver_tol;
    o.krylov_dim = c.krylov_dim;
    o.seed = c.seed;
    return o;
}

void report_diagnostics(const std::vector<Diagnostic>& diags) {
    for (const auto& d : diags) std::cerr << (d.severity == Severity::error ? "error: " : "warning: ") << d.message << '\n';
}

int cmd_geometry(const RunConfig& c, Run& run) {
    const auto arr = build_array(c.lattice, c.alpha);
    const auto radii = c.radii.value_or(default_radii(c.lattice));
    const auto g = conflict_graph(arr, radii);
    std::ostringstream atoms;
    write_atoms_csv(atoms, arr);
    run.output("atoms.csv", atoms.str());
    std::ostringstream pairs;
    pairs << "i,j,distance\n";
    for (auto [i, j] : g.pairs) pairs << i << ',' << j << ',' << fmt(arr.distance(i, j)) << '\n';
    run.output("blockade_pairs.csv", pairs.str());

    json windows = json::array();
    if (c.lattice.model == DimerModel::gadget) {
        const double r = c.lattice.gadget_offset;
        std::vector<std::pair<PairClass, const char*>> classes;
        if (c.lattice.species_count == 1) classes = {{PairClass::single_species, "single_species"}};
        else classes = {{PairClass::intra_species, "intra_species"}, {PairClass::inter_species, "inter_species"}};
        for (auto [pc, label] : classes) {
            try {
                const auto w = blockade_window(c.lattice.kind, r, pc);
                windows.push_back({{"pair", label}, {"r_min", w.r_min}, {"r_max", w.r_max}, {"contrast", w.ratio}});
                std::cout << label << ": r_min=" << fmt(w.r_min) << " r_max=" << fmt(w.r_max) << " contrast (r_max/r_min)^6="
                          << fmt(w.ratio) << '\n';
            } catch (const InfeasibleWindowError& e) {
                windows.push_back({{"pair", label}, {"error", e.what()}});
                run.warn(e.what());
            }
        }
        const auto viol = gadget_structure_violations(arr, g);
        run.manifest()["structure_violations"] = viol.size();
        for (std::size_t k = 0; k < std::min<std::size_t>(viol.size(), 10); ++k) run.warn(viol[k]);
    }
    run.manifest()["windows"] = windows;
    run.manifest()["radii"] = {{"intra", radii.intra}, {"inter", radii.inter}};
    run.manifest()["atoms"] = arr.size();
    run.manifest()["blockade_pairs"] = g.pairs.size();
    std::cout << arr.size() << " atoms, " << g.pairs.size() << " blockade pairs\n";
    return kExitOk;
}

int cmd_coverings(const RunConfig& c, Run& run) {
    const auto cl = Cluster::build(c.lattice);
    const auto covs = run.timed("coverings", [&] { return enumerate_coverings(cl); });
    std::ostringstream os;
    write_coverings_csv(os, covs);
    run.output("coverings.csv", os.str());
    run.manifest()["coverings"] = covs.size();
    run.manifest()["parallel_edges"] = has_parallel_edges(c.lattice);
    std::cout << covs.size() << " dimer coverings\n";
    return kExitOk;
}

int cmd_sweep(const RunConfig& c, Run& run) {
    const Model m = make_model(c, run);
    SweepOptions so;
    so.delta_lambda = c.delta_lambda;
    so.lanczos = lanczos_options(c);
    const auto grid = linear_grid(c.lambda_min, c.lambda_max, c.lambda_step);
    const auto rows = run.timed("sweep", [&] { return sweep(m, grid, so); });
    std::ostringstream os;
    write_sweep_csv(os, rows);
    run.output("sweep.csv", os.str());
    int failed = 0;
    for (const auto& r : rows) {
        if (!r.error.empty()) {
            ++failed;
            run.warn("lambda=" + fmt(r.lambda) + ": " + r.error);
        }
        if (r.degenerate) run.warn("lambda=" + fmt(r.lambda) + ": degenerate ground state; chi not trustworthy");
    }
    run.manifest()["rows"] = rows.size();
    run.manifest()["delta_lambda"] = so.delta_lambda > 0 ? so.delta_lambda : default_delta_lambda(grid);
    if (rows.size() >= 5) run.manifest()["chi_peaks"] = peak_count(rows, "chi");
    std::cout << rows.size() << " rows, dim " << m.dim() << '\n';
    return failed ? kExitNumerical : kExitOk;
}

int cmd_anneal(const RunConfig& c, Run& run) {
    const Model m = make_model(c, run);
    AnnealOptions ao;
    ao.delta0 = c.delta0;
    ao.delta_f = c.delta_f;
    ao.evolve.dt = c.dt;
    ao.evolve.integrator = parse_integrator(c.integrator);
    std::vector<ScanRow> rows;
    std::string file, column;
    if (!c.alpha_scan.empty()) {
        if (c.T_list.size() != 1) throw ConfigError("alpha scan needs exactly one T value");
        rows = run.timed("anneal", [&] { return scan_alpha(m, c.alpha_scan, c.T_list.front(), ao); });
        file = "anneal_alpha.csv";
        column = "alpha";
    } else {
        rows = run.timed("anneal", [&] { return scan_T(m, c.T_list, ao); });
        file = "anneal_T.csv";
        column = "T_over_N";
    }
    std::ostringstream os;
    write_scan_csv(os, rows, column, c.tails);
    run.output(file, os.str());
    int failed = 0;
    for (const auto& r : rows)
        if (!r.error.empty()) {
            ++failed;
            run.warn(column + "=" + fmt(r.parameter) + ": " + r.error);
        }
    run.manifest()["rows"] = rows.size();
    std::cout << rows.size() << " rows, dim " << m.dim() << '\n';
    return failed ? kExitNumerical : kExitOk;
}

int cmd_scaling(const RunConfig& c, Run& run) {
    const Model m = make_model(c, run);
    if (has_parallel_edges(c.lattice))
        run.warn("cluster has parallel edges: single-dimer hops contribute to the low-energy splitting");
    auto lo = lanczos_options(c);
    lo.tol = std::min(lo.tol, 1e-12);
    const auto fit = run.timed("scaling", [&] { return scaling_fit(m, c.scaling_deltas, parse_splitting(c.splitting), lo); });
    std::ostringstream os;
    os << "delta,splitting\n";
    for (const auto& p : fit.points) os << fmt(p.delta) << ',' << fmt(p.splitting) << '\n';
    run.output("scaling.csv", os.str());
    run.manifest()["exponent"] = fit.exponent;
    run.manifest()["r2"] = fit.r2;
    std::cout << "exponent " << fmt(fit.exponent) << " (r^2 " << fmt(fit.r2) << ")\n";
    return kExitOk;
}

int cmd_cache(const Options& o) {
    const fs::path dir = o.cache_dir.empty() ? fs::path("rydimer-cache") : fs::path(o.cache_dir);
    if (!fs::exists(dir)) {
        std::cout << "no cache at " << dir.string() << '\n';
        return kExitOk;
    }
    int n = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (name.rfind("basis-", 0) != 0 || e.path().extension() != ".bin") continue;
        ++n;
        if (o.cache_action == "clear") {
            fs::remove(e.path());
            std::cout << "removed " << name << '\n';
        } else {
            std::cout << name << "  " << e.file_size() << " bytes\n";
        }
    }
    if (n == 0) std::cout << "no basis files in " << dir.string() << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rydberg-atom dimer models: geometry, exact diagonalization, annealing"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* s) {
        s->add_option("--preset", o.preset, "Built-in configuration")->check(CLI::IsMember(preset_names()));
        s->add_option("--config", o.config_file, "JSON config file (applied after the preset)");
        s->add_option("--set", o.overrides, "Override key=value, dotted keys (repeatable)");
        s->add_option("--alpha", o.alpha, "Gadget detuning ratio");
        s->add_option("--out", o.out, "Output directory (default $RYDIMER_OUTPUT_ROOT or ./rydimer-out)");
        s->add_flag("--versioned", o.versioned, "Write into a new run-NNN subdirectory instead of refusing");
        s->add_option("--threads", o.threads, "Worker threads");
        s->add_option("--seed", o.seed, "Solver seed");
        s->add_option("--cap", o.cap, "Hilbert-space dimension cap");
        s->add_option("--cache-dir", o.cache_dir, "Basis cache directory");
    };
    auto* geo = app.add_subcommand("geometry", "Atom positions, blockade pairs, window report");
    auto* cov = app.add_subcommand("coverings", "Enumerate dimer coverings");
    auto* swp = app.add_subcommand("sweep", "Ground-state sweep in lambda = Delta/Omega");
    auto* ann = app.add_subcommand("anneal", "Annealing infidelity vs T or alpha");
    auto* scl = app.add_subcommand("scaling", "Log-log fit of low-energy splittings vs Delta");
    auto* cch = app.add_subcommand("cache", "Inspect or clear basis caches");
    for (auto* s : {geo, cov, swp, ann, scl}) common(s);
    swp->add_option("--lambda", o.lambda, "Grid lo:hi:step");
    ann->add_option("--T", o.T, "Total times, comma separated");
    ann->add_option("--alpha-scan", o.alpha_scan, "Alpha values at one fixed T, comma separated");
    ann->add_option("--delta0", o.delta0, "Initial detuning");
    ann->add_option("--delta-f", o.delta_f, "Final detuning");
    ann->add_option("--dt", o.dt, "Time step (default T/2000)");
    ann->add_option("--integrator", o.integrator, "magnus4 (default) or midpoint");
    ann->add_flag("--tails", o.tails, "Include van der Waals tails");
    scl->add_option("--deltas", o.deltas, "Delta values, comma separated");
    cch->add_option("action", o.cache_action, "inspect or clear")->check(CLI::IsMember({"inspect", "clear"}));
    cch->add_option("--cache-dir", o.cache_dir, "Basis cache directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (cch->parsed()) return cmd_cache(o);
        const RunConfig cfg = resolve(o);
        ValidationScope scope;
        scope.sweep = swp->parsed();
        scope.anneal = ann->parsed();
        scope.scaling = scl->parsed();
        scope.count_basis = !geo->parsed() && !cov->parsed();
        const auto diags = validate_config(cfg, scope);
        report_diagnostics(diags);
        if (has_errors(diags)) {
            const bool capacity = std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) {
                return d.severity == Severity::error && d.kind == DiagnosticKind::capacity;
            });
            return capacity ? kExitCapacity : kExitConfig;
        }
#ifdef _OPENMP
        omp_set_num_threads(cfg.threads);
#endif
        const std::string command = app.get_subcommands().front()->get_name();
        Run run(command, cfg, claim_output_dir(cfg.output_dir, o.versioned));
        for (const auto& d : diags) run.manifest()["warnings"].push_back(d.message);
        int rc = kExitOk;
        if (geo->parsed()) rc = cmd_geometry(cfg, run);
        else if (cov->parsed()) rc = cmd_coverings(cfg, run);
        else if (swp->parsed()) rc = cmd_sweep(cfg, run);
        else if (ann->parsed()) rc = cmd_anneal(cfg, run);
        else if (scl->parsed()) rc = cmd_scaling(cfg, run);
        run.manifest()["exit_code"] = rc;
        run.finish();
        return rc;
    } catch (const CapacityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCapacity;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const GeometryError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
