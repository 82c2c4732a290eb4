#pragma once

// Run configuration: a JSON tree with built-in presets, dotted-key overrides,
// validation diagnostics and a stable content hash for manifests.

#include "rydimer/dynamics.hpp"
#include "rydimer/effective.hpp"
#include "rydimer/geometry.hpp"
#include "rydimer/hilbert.hpp"
#include "rydimer/io.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace rydimer {

using json = nlohmann::json;

struct RunConfig {
    LatticeSpec lattice;
    double alpha = 5.0;
    std::optional<BlockadeRadii> radii;

    double lambda_min = 0.5;
    double lambda_max = 6.0;
    double lambda_step = 0.1;
    double delta_lambda = 0.0;  ///< 0: derived from the grid

    std::vector<double> T_list;
    std::vector<double> alpha_scan;
    double delta0 = -5.0;
    double delta_f = 1.5;
    double dt = 0.0;  ///< 0: T/2000
    std::string integrator = "magnus4";

    bool tails = false;
    double tail_cutoff = 2.0;

    std::vector<double> scaling_deltas;
    std::string splitting = "doublet";

    double solver_tol = 1e-10;
    int krylov_dim = 80;
    std::uint64_t seed = 20240611;

    std::string output_dir;
    std::size_t dimension_cap = kDefaultDimensionCap;
    int threads = 1;
    std::string cache_dir;
};

inline LatticeKind parse_lattice_kind(const std::string& s) {
    if (s == "square") return LatticeKind::square;
    if (s == "triangular") return LatticeKind::triangular;
    throw ConfigError("unknown lattice kind '" + s + "' (square, triangular)");
}

inline DimerModel parse_dimer_model(const std::string& s) {
    if (s == "gadget") return DimerModel::gadget;
    if (s == "diluted") return DimerModel::diluted;
    throw ConfigError("unknown model '" + s + "' (gadget, diluted)");
}

inline SplittingKind parse_splitting(const std::string& s) {
    if (s == "doublet") return SplittingKind::doublet;
    if (s == "spread") return SplittingKind::manifold_spread;
    throw ConfigError("unknown splitting '" + s + "' (doublet, spread)");
}

inline Integrator parse_integrator(const std::string& s) {
    if (s == "magnus4") return Integrator::magnus4;
    if (s == "midpoint") return Integrator::midpoint;
    throw ConfigError("unknown integrator '" + s + "' (magnus4, midpoint)");
}

inline json to_json(const RunConfig& c) {
    json j;
    j["lattice"] = {{"kind", to_string(c.lattice.kind)},
                    {"model", to_string(c.lattice.model)},
                    {"span1", {c.lattice.span1.x, c.lattice.span1.y}},
                    {"span2", {c.lattice.span2.x, c.lattice.span2.y}},
                    {"gadget_offset", c.lattice.gadget_offset},
                    {"species", c.lattice.species_count}};
    j["alpha"] = c.alpha;
    j["radii"] = c.radii ? json{{"intra", c.radii->intra}, {"inter", c.radii->inter}} : json(nullptr);
    j["sweep"] = {{"lambda_min", c.lambda_min},
                  {"lambda_max", c.lambda_max},
                  {"lambda_step", c.lambda_step},
                  {"delta_lambda", c.delta_lambda}};
    j["anneal"] = {{"T", c.T_list},   {"alpha_scan", c.alpha_scan}, {"delta0", c.delta0},
                   {"delta_f", c.delta_f}, {"dt", c.dt},              {"integrator", c.integrator}};
    j["tails"] = {{"enabled", c.tails}, {"cutoff", c.tail_cutoff}};
    j["scaling"] = {{"deltas", c.scaling_deltas}, {"splitting", c.splitting}};
    j["solver"] = {{"tol", c.solver_tol}, {"krylov_dim", c.krylov_dim}, {"seed", c.seed}};
    j["run"] = {{"output_dir", c.output_dir},
                {"dimension_cap", c.dimension_cap},
                {"threads", c.threads},
                {"cache_dir", c.cache_dir}};
    return j;
}

/// Reads every known key present in `j`; unknown keys are an error.
inline RunConfig from_json(const json& j, RunConfig c = {}) {
    auto known = [](const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
        if (!obj.is_object()) throw ConfigError("'" + where + "' must be an object");
        for (auto it = obj.begin(); it != obj.end(); ++it)
            if (std::find_if(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }) == keys.end())
                throw ConfigError("unknown config key '" + where + (where.empty() ? "" : ".") + it.key() + "'");
    };
    try {
        known(j, {"lattice", "alpha", "radii", "sweep", "anneal", "tails", "scaling", "solver", "run"}, "");
        if (j.contains("lattice")) {
            const auto& l = j["lattice"];
            known(l, {"kind", "model", "span1", "span2", "gadget_offset", "species"}, "lattice");
            if (l.contains("kind")) c.lattice.kind = parse_lattice_kind(l["kind"].get<std::string>());
            if (l.contains("model")) c.lattice.model = parse_dimer_model(l["model"].get<std::string>());
            if (l.contains("span1")) c.lattice.span1 = {l["span1"].at(0).get<int>(), l["span1"].at(1).get<int>()};
            if (l.contains("span2")) c.lattice.span2 = {l["span2"].at(0).get<int>(), l["span2"].at(1).get<int>()};
            if (l.contains("gadget_offset")) c.lattice.gadget_offset = l["gadget_offset"].get<double>();
            if (l.contains("species")) c.lattice.species_count = l["species"].get<int>();
        }
        if (j.contains("alpha")) c.alpha = j["alpha"].get<double>();
        if (j.contains("radii")) {
            if (j["radii"].is_null()) {
                c.radii.reset();
            } else {
                known(j["radii"], {"intra", "inter"}, "radii");
                BlockadeRadii r;
                r.intra = j["radii"].at("intra").get<double>();
                r.inter = j["radii"].value("inter", r.intra);
                c.radii = r;
            }
        }
        if (j.contains("sweep")) {
            const auto& s = j["sweep"];
            known(s, {"lambda_min", "lambda_max", "lambda_step", "delta_lambda"}, "sweep");
            c.lambda_min = s.value("lambda_min", c.lambda_min);
            c.lambda_max = s.value("lambda_max", c.lambda_max);
            c.lambda_step = s.value("lambda_step", c.lambda_step);
            c.delta_lambda = s.value("delta_lambda", c.delta_lambda);
        }
        if (j.contains("anneal")) {
            const auto& a = j["anneal"];
            known(a, {"T", "alpha_scan", "delta0", "delta_f", "dt", "integrator"}, "anneal");
            if (a.contains("T")) c.T_list = a["T"].get<std::vector<double>>();
            if (a.contains("alpha_scan")) c.alpha_scan = a["alpha_scan"].get<std::vector<double>>();
            c.delta0 = a.value("delta0", c.delta0);
            c.delta_f = a.value("delta_f", c.delta_f);
            c.dt = a.value("dt", c.dt);
            c.integrator = a.value("integrator", c.integrator);
        }
        if (j.contains("tails")) {
            known(j["tails"], {"enabled", "cutoff"}, "tails");
            c.tails = j["tails"].value("enabled", c.tails);
            c.tail_cutoff = j["tails"].value("cutoff", c.tail_cutoff);
        }
        if (j.contains("scaling")) {
            known(j["scaling"], {"deltas", "splitting"}, "scaling");
            if (j["scaling"].contains("deltas")) c.scaling_deltas = j["scaling"]["deltas"].get<std::vector<double>>();
            c.splitting = j["scaling"].value("splitting", c.splitting);
        }
        if (j.contains("solver")) {
            known(j["solver"], {"tol", "krylov_dim", "seed"}, "solver");
            c.solver_tol = j["solver"].value("tol", c.solver_tol);
            c.krylov_dim = j["solver"].value("krylov_dim", c.krylov_dim);
            c.seed = j["solver"].value("seed", c.seed);
        }
        if (j.contains("run")) {
            known(j["run"], {"output_dir", "dimension_cap", "threads", "cache_dir"}, "run");
            c.output_dir = j["run"].value("output_dir", c.output_dir);
            c.dimension_cap = j["run"].value("dimension_cap", c.dimension_cap);
            c.threads = j["run"].value("threads", c.threads);
            c.cache_dir = j["run"].value("cache_dir", c.cache_dir);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return c;
}

/// Sets a dotted key ("lattice.kind=triangular", "anneal.T=[10,20]"). The
/// value is parsed as JSON when possible, otherwise taken as a string.
inline void apply_override(json& tree, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    json* node = &tree;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("empty path component in '" + key + "'");
        if (dot == std::string::npos) {
            (*node)[part] = value;
            break;
        }
        node = &(*node)[part];
        start = dot + 1;
    }
}

inline std::vector<std::string> preset_names() {
    return {"square-gadget-6",       "square-diluted-6",      "triangular-gadget-6",    "triangular-diluted-6",
            "square-gadget-6-tails", "square-multispecies-6", "triangular-multispecies-6",
            "square-diluted-minimal", "triangular-diluted-minimal", "triangular-gadget-minimal"};
}

/// Cluster shapes: 6-cell tori with the torus vectors chosen so that no two
/// edges join the same vertex pair where that is possible (square), and the
/// smallest such tori for the perturbative fits.
inline RunConfig preset(const std::string& name) {
    RunConfig c;
    auto& l = c.lattice;
    l.gadget_offset = 1.0 / 6.0;
    if (name == "square-gadget-6" || name == "square-diluted-6" || name == "square-gadget-6-tails" ||
        name == "square-multispecies-6") {
        l.kind = LatticeKind::square;
        l.span1 = {3, 0};
        l.span2 = {1, 2};
        l.model = name == "square-diluted-6" ? DimerModel::diluted : DimerModel::gadget;
        c.T_list = {36, 72, 144, 288};
        if (name == "square-gadget-6-tails") {
            l.gadget_offset = 0.16;
            const double rb = std::sqrt(0.25 + 0.16 * 0.16);
            c.radii = BlockadeRadii{rb, rb};
            c.tails = true;
        }
        if (name == "square-multispecies-6") {
            l.gadget_offset = 0.16;
            l.species_count = 2;
        }
    } else if (name == "triangular-gadget-6" || name == "triangular-diluted-6" || name == "triangular-multispecies-6") {
        l.kind = LatticeKind::triangular;
        l.span1 = {3, 0};
        l.span2 = {0, 2};
        l.model = name == "triangular-diluted-6" ? DimerModel::diluted : DimerModel::gadget;
        c.T_list = {54, 108, 216, 432};
        if (name == "triangular-multispecies-6") {
            l.gadget_offset = 0.11;
            l.species_count = 3;
            c.delta_f = 3.0;
        }
    } else if (name == "square-diluted-minimal") {
        l.kind = LatticeKind::square;
        l.model = DimerModel::diluted;
        l.span1 = {3, 0};
        l.span2 = {1, 2};
        c.scaling_deltas = {8, 11.3137084989848, 16, 22.627416997969522, 32};
        c.splitting = "spread";
    } else if (name == "triangular-diluted-minimal") {
        l.kind = LatticeKind::triangular;
        l.model = DimerModel::diluted;
        l.span1 = {4, 0};
        l.span2 = {1, 2};
        c.scaling_deltas = {8, 11.3137084989848, 16, 22.627416997969522, 32};
        c.splitting = "spread";
    } else if (name == "triangular-gadget-minimal") {
        l.kind = LatticeKind::triangular;
        l.model = DimerModel::gadget;
        l.span1 = {2, 0};
        l.span2 = {0, 2};
        c.scaling_deltas = {3, 4, 5, 6};
        c.splitting = "spread";
    } else {
        std::string known;
        for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
    }
    return c;
}

inline std::uint64_t config_hash(const RunConfig& c) {
    const std::string s = to_json(c).dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// ---------------------------------------------------------------------------
// Validation

enum class Severity { warning, error };

/// Which failure class an error belongs to; decides the process exit code.
enum class DiagnosticKind { config, capacity };

struct Diagnostic {
    Severity severity = Severity::warning;
    DiagnosticKind kind = DiagnosticKind::config;
    std::string message;
};

inline bool has_errors(const std::vector<Diagnostic>& d) {
    return std::any_of(d.begin(), d.end(), [](const Diagnostic& x) { return x.severity == Severity::error; });
}

struct ValidationScope {
    bool sweep = false;
    bool anneal = false;
    bool scaling = false;
    bool count_basis = true;  ///< enumerate independent sets up to the cap
};

/// Every problem found, not only the first.
inline std::vector<Diagnostic> validate_config(const RunConfig& c, const ValidationScope& scope = {}) {
    std::vector<Diagnostic> out;
    auto error = [&](std::string m, DiagnosticKind k = DiagnosticKind::config) { out.push_back({Severity::error, k, std::move(m)}); };
    auto warn = [&](std::string m) { out.push_back({Severity::warning, DiagnosticKind::config, std::move(m)}); };

    bool lattice_ok = true;
    try {
        c.lattice.validate();
    } catch (const GeometryError& e) {
        error(e.what());
        lattice_ok = false;
    }
    const bool gadget = c.lattice.model == DimerModel::gadget;
    if (gadget) {
        const double th = alpha_threshold(c.lattice.kind);
        if (!(c.alpha > 0.0)) error("alpha must be positive");
        else if (c.alpha <= th)
            warn("alpha=" + fmt(c.alpha) + " is at or below the threshold " + fmt(th) + " for the " + to_string(c.lattice.kind) +
                 " lattice: classical ground states are not fully packed");
    }
    if (gadget && lattice_ok && c.radii) {
        const double r = c.lattice.gadget_offset;
        auto check = [&](double rb, PairClass pc, const char* label) {
            try {
                const auto w = blockade_window(c.lattice.kind, r, pc);
                if (rb <= w.r_min)
                    warn(std::string(label) + " Rb=" + fmt(rb) + " violates Rb > r_min=" + fmt(w.r_min));
                else if (rb >= w.r_max)
                    warn(std::string(label) + " Rb=" + fmt(rb) + " violates Rb < r_max=" + fmt(w.r_max));
            } catch (const InfeasibleWindowError& e) {
                warn(std::string(label) + " window is empty at r=" + fmt(r) + ": " + e.what());
            }
        };
        if (c.lattice.species_count == 1) {
            check(c.radii->intra, PairClass::single_species, "single-species");
        } else {
            check(c.radii->intra, PairClass::intra_species, "intra-species");
            check(c.radii->inter, PairClass::inter_species, "inter-species");
        }
    }
    if (scope.sweep) {
        if (!(c.lambda_step > 0.0)) error("lambda grid step must be positive");
        if (c.lambda_max < c.lambda_min) error("lambda grid is empty (max < min)");
        if (c.delta_lambda < 0.0) error("delta_lambda must be non-negative");
    }
    if (scope.anneal) {
        if (c.T_list.empty() && c.alpha_scan.empty()) error("anneal needs a T list");
        for (double T : c.T_list)
            if (!(T > 0.0)) error("total time T=" + fmt(T) + " must be positive");
        for (double a : c.alpha_scan)
            if (!(a > 0.0)) error("scanned alpha=" + fmt(a) + " must be positive");
        if (!c.alpha_scan.empty() && c.T_list.empty()) error("alpha scan needs one T value");
        if (c.dt < 0.0) error("dt must be non-negative");
        try {
            parse_integrator(c.integrator);
        } catch (const ConfigError& e) {
            error(e.what());
        }
        if (c.tails && !gadget) error("tails need a gadget (geometric) array");
    }
    if (scope.scaling) {
        if (c.scaling_deltas.size() < 2) error("scaling needs at least two Delta values");
        for (double d : c.scaling_deltas)
            if (!(d > 0.0)) error("scaling Delta=" + fmt(d) + " must be positive");
        try {
            parse_splitting(c.splitting);
        } catch (const ConfigError& e) {
            error(e.what());
        }
    }
    if (c.threads < 1) error("threads must be >= 1");
    if (c.krylov_dim < 4) error("krylov_dim must be >= 4");
    if (!(c.solver_tol > 0.0)) error("solver tolerance must be positive");

    if (scope.count_basis && lattice_ok && !has_errors(out)) {
        try {
            const auto arr = build_array(c.lattice, c.alpha);
            const auto g = conflict_graph(arr, c.radii.value_or(default_radii(c.lattice)));
            count_independent_sets(g, c.dimension_cap);
        } catch (const CapacityError& e) {
            error(e.what(), DiagnosticKind::capacity);
        } catch (const GeometryError& e) {
            error(e.what());
        }
    }
    return out;
}

inline RunConfig load_config_file(const std::string& path, RunConfig base = {}) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file " + path);
    const json j = json::parse(is, nullptr, false, true);
    if (j.is_discarded()) throw ConfigError("config file " + path + " is not valid JSON");
    return from_json(j, std::move(base));
}

}  // namespace rydimer
