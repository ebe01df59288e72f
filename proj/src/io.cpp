#include "strongcomp/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace strongcomp {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s = {
        {"model", {"N", "D", "lambda", "mu", "d", "omega", "k", "a", "beta", "delta"}},
        {"grid", {"dim", "extents", "counts"}},
        {"solve", {"tau", "tol_residual", "tol_update", "max_steps", "newton", "linear_tol"}},
        {"continuation", {"betas", "start", "factor", "count"}},
        {"analysis",
         {"alpha", "threshold", "decay_center", "decay_rho", "decay_component", "test_functions",
          "seed", "max_pairs", "snapshot"}},
        {"initial",
         {"kind", "u", "w", "centers", "amplitudes", "width", "mirror", "seeds", "amplitude",
          "path"}},
    };
    return s;
}

std::string where(const std::string& section, const std::string& key) {
    return section + "." + key;
}

double get_number(const json& sec, const std::string& section, const std::string& key,
                  double fallback) {
    if (!sec.contains(key)) return fallback;
    const json& v = sec.at(key);
    if (!v.is_number())
        throw ConfigError("type mismatch: " + where(section, key) + " must be a number");
    return v.get<double>();
}

std::uint64_t get_count(const json& sec, const std::string& section, const std::string& key,
                        std::uint64_t fallback) {
    if (!sec.contains(key)) return fallback;
    const json& v = sec.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_float() && v.get<double>() >= 0.0 &&
        std::floor(v.get<double>()) == v.get<double>())
        return static_cast<std::uint64_t>(v.get<double>());
    throw ConfigError("type mismatch: " + where(section, key) + " must be a nonnegative integer");
}

bool get_bool(const json& sec, const std::string& section, const std::string& key, bool fallback) {
    if (!sec.contains(key)) return fallback;
    if (!sec.at(key).is_boolean())
        throw ConfigError("type mismatch: " + where(section, key) + " must be a boolean");
    return sec.at(key).get<bool>();
}

std::string get_string(const json& sec, const std::string& section, const std::string& key,
                       const std::string& fallback) {
    if (!sec.contains(key)) return fallback;
    if (!sec.at(key).is_string())
        throw ConfigError("type mismatch: " + where(section, key) + " must be a string");
    return sec.at(key).get<std::string>();
}

/// A number broadcast to `n` entries, or a list of exactly `n` numbers.
std::vector<double> get_vector(const json& sec, const std::string& section, const std::string& key,
                               std::size_t n, double fallback) {
    if (!sec.contains(key)) return std::vector<double>(n, fallback);
    const json& v = sec.at(key);
    if (v.is_number()) return std::vector<double>(n, v.get<double>());
    if (!v.is_array())
        throw ConfigError("type mismatch: " + where(section, key) + " must be a number or list");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number())
            throw ConfigError("type mismatch: " + where(section, key) + " entries must be numbers");
        out.push_back(e.get<double>());
    }
    if (n != 0 && out.size() != n)
        throw ConfigError(where(section, key) + " must have " + std::to_string(n) + " entries");
    return out;
}

std::vector<double> get_list(const json& sec, const std::string& section, const std::string& key) {
    return get_vector(sec, section, key, 0, 0.0);
}

void check_keys(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config root must be an object");
    for (const auto& [section, body] : doc.items()) {
        auto it = schema().find(section);
        if (it == schema().end()) throw ConfigError("unknown key '" + section + "'");
        if (!body.is_object())
            throw ConfigError("type mismatch: section '" + section + "' must be an object");
        for (const auto& [key, _] : body.items())
            if (!it->second.count(key))
                throw ConfigError("unknown key '" + section + "." + key + "'");
    }
}

void apply_override(json& doc, const std::string& item) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override '" + item + "' must have the form key=value");
    const std::string key = item.substr(0, eq);
    const std::string raw = item.substr(eq + 1);
    std::string section, field;
    if (const auto dot = key.find('.'); dot != std::string::npos) {
        section = key.substr(0, dot);
        field = key.substr(dot + 1);
        auto it = schema().find(section);
        if (it == schema().end() || !it->second.count(field))
            throw ConfigError("unknown override key '" + key + "'");
    } else {
        for (const auto& [sec, keys] : schema())
            if (keys.count(key)) {
                if (!section.empty())
                    throw ConfigError("ambiguous override key '" + key + "'; use section.key");
                section = sec;
            }
        if (section.empty()) throw ConfigError("unknown override key '" + key + "'");
        field = key;
    }
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;
    }
    doc[section][field] = value;
}

std::string line_col(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte > 0 ? byte - 1 : 0, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

ModelParams model_from_json(const json& m) {
    const std::string sec = "model";
    ModelParams p;
    const auto n = get_count(m, sec, "N", 1);
    if (n == 0) throw ConfigError("model.N must be positive");
    p.n = n;
    p.D = get_number(m, sec, "D", 1.0);
    p.lambda = get_number(m, sec, "lambda", 1.0);
    p.mu = get_number(m, sec, "mu", 1.0);
    p.d = get_vector(m, sec, "d", n, 1.0);
    p.omega = get_vector(m, sec, "omega", n, 0.2);
    p.k = get_vector(m, sec, "k", n, 1.0);
    p.beta = get_number(m, sec, "beta", 0.0);
    p.delta = get_number(m, sec, "delta", 0.2);
    p.a.assign(n * n, 1.0);
    if (m.contains("a")) {
        const json& a = m.at("a");
        if (a.is_number()) {
            std::fill(p.a.begin(), p.a.end(), a.get<double>());
        } else if (a.is_array() && a.size() == n) {
            for (std::size_t i = 0; i < n; ++i) {
                if (!a[i].is_array() || a[i].size() != n)
                    throw ConfigError("model.a must be an N x N nested list");
                for (std::size_t j = 0; j < n; ++j) {
                    if (!a[i][j].is_number())
                        throw ConfigError("type mismatch: model.a entries must be numbers");
                    p.a[i * n + j] = a[i][j].get<double>();
                }
            }
        } else {
            throw ConfigError("model.a must be a number or an N x N nested list");
        }
    }
    for (std::size_t i = 0; i < n; ++i) p.a[i * n + i] = 0.0;
    try {
        check_structure(p);
    } catch (const StructuralError& e) {
        throw ConfigError(e.what());
    }
    return p;
}

ordered_json model_to_json(const ModelParams& p) {
    ordered_json j;
    j["N"] = p.n;
    j["D"] = p.D;
    j["lambda"] = p.lambda;
    j["mu"] = p.mu;
    j["d"] = p.d;
    j["omega"] = p.omega;
    j["k"] = p.k;
    ordered_json a = ordered_json::array();
    for (std::size_t i = 0; i < p.n; ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t jj = 0; jj < p.n; ++jj) row.push_back(i == jj ? 0.0 : p.interaction(i, jj));
        a.push_back(row);
    }
    j["a"] = a;
    j["beta"] = p.beta;
    j["delta"] = p.delta;
    return j;
}

Grid grid_from_json(const json& g) {
    const std::string sec = "grid";
    const auto dim = static_cast<int>(get_count(g, sec, "dim", 1));
    if (dim != 1 && dim != 2) throw ConfigError("grid.dim must be 1 or 2");
    const auto extents = get_vector(g, sec, "extents", dim, 1.0);
    std::vector<std::size_t> counts(dim, 201);
    if (g.contains("counts")) {
        const json& c = g.at("counts");
        if (c.is_number_unsigned()) {
            std::fill(counts.begin(), counts.end(), c.get<std::size_t>());
        } else if (c.is_array() && c.size() == static_cast<std::size_t>(dim)) {
            for (int a = 0; a < dim; ++a) {
                if (!c[a].is_number_unsigned())
                    throw ConfigError("type mismatch: grid.counts entries must be integers");
                counts[a] = c[a].get<std::size_t>();
            }
        } else {
            throw ConfigError("grid.counts must be an integer or a list of dim integers");
        }
    }
    try {
        return Grid(dim, extents, counts);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

ordered_json grid_to_json(const Grid& g) {
    ordered_json j;
    j["dim"] = g.dim();
    std::vector<double> e;
    std::vector<std::size_t> c;
    for (int a = 0; a < g.dim(); ++a) {
        e.push_back(g.extent(a));
        c.push_back(g.count(a));
    }
    j["extents"] = e;
    j["counts"] = c;
    return j;
}

ConfigDocument parse_config(std::string_view text, const std::vector<std::string>& overrides) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError("syntax error at " + line_col(text, e.byte) + ": " + e.what());
    }
    check_keys(doc);
    for (const auto& o : overrides) apply_override(doc, o);
    check_keys(doc);

    const json empty = json::object();
    auto section = [&](const char* name) -> const json& {
        return doc.contains(name) ? doc.at(name) : empty;
    };

    ConfigDocument cfg;
    cfg.model = model_from_json(section("model"));
    cfg.grid = grid_from_json(section("grid"));

    const json& s = section("solve");
    cfg.solve.tau = get_number(s, "solve", "tau", cfg.solve.tau);
    cfg.solve.tol_residual = get_number(s, "solve", "tol_residual", cfg.solve.tol_residual);
    cfg.solve.tol_update = get_number(s, "solve", "tol_update", cfg.solve.tol_update);
    cfg.solve.max_steps = get_count(s, "solve", "max_steps", cfg.solve.max_steps);
    cfg.solve.newton = get_bool(s, "solve", "newton", cfg.solve.newton);
    cfg.solve.linear_tol = get_number(s, "solve", "linear_tol", cfg.solve.linear_tol);
    if (!(cfg.solve.tau > 0.0 && cfg.solve.tol_residual > 0.0 && cfg.solve.tol_update > 0.0 &&
          cfg.solve.linear_tol > 0.0 && cfg.solve.max_steps >= 1))
        throw ConfigError("solve: tolerances and tau must be positive, max_steps >= 1");

    const json& c = section("continuation");
    if (c.contains("betas")) {
        if (c.contains("start") || c.contains("factor") || c.contains("count"))
            throw ConfigError("continuation: give either betas or start/factor/count");
        cfg.betas = get_list(c, "continuation", "betas");
    } else if (c.contains("start") || c.contains("factor") || c.contains("count")) {
        const double start = get_number(c, "continuation", "start", 1.0);
        const double factor = get_number(c, "continuation", "factor", 10.0);
        const auto count = get_count(c, "continuation", "count", 1);
        if (!(start > 0.0 && factor > 1.0))
            throw ConfigError("continuation: start must be > 0 and factor > 1");
        double b = start;
        for (std::uint64_t i = 0; i < count; ++i, b *= factor) cfg.betas.push_back(b);
    }
    for (std::size_t i = 1; i < cfg.betas.size(); ++i)
        if (!(cfg.betas[i] > cfg.betas[i - 1]))
            throw ConfigError("continuation.betas must be strictly increasing");

    const json& a = section("analysis");
    auto& an = cfg.analysis;
    an.alpha = get_number(a, "analysis", "alpha", an.alpha);
    if (!(an.alpha > 0.0 && an.alpha < 1.0)) throw ConfigError("analysis.alpha must lie in (0,1)");
    if (a.contains("threshold") && !a.at("threshold").is_null())
        an.threshold = get_number(a, "analysis", "threshold", 0.0);
    if (a.contains("decay_center")) an.decay_center = get_list(a, "analysis", "decay_center");
    an.decay_rho = get_number(a, "analysis", "decay_rho", an.decay_rho);
    const auto comp = get_count(a, "analysis", "decay_component", 1);
    if (comp < 1 || comp > cfg.model.n)
        throw ConfigError("analysis.decay_component must be in 1..N");
    an.decay_component = comp - 1;
    an.test_functions = get_count(a, "analysis", "test_functions", an.test_functions);
    an.seed = get_count(a, "analysis", "seed", an.seed);
    an.max_pairs = get_count(a, "analysis", "max_pairs", an.max_pairs);
    an.snapshot = get_string(a, "analysis", "snapshot", an.snapshot);

    const json& in = section("initial");
    auto& init = cfg.initial;
    init.kind = get_string(in, "initial", "kind", init.kind);
    init.u = get_number(in, "initial", "u", init.u);
    init.w = get_vector(in, "initial", "w", cfg.model.n, 0.1);
    init.width = get_number(in, "initial", "width", init.width);
    init.mirror = get_bool(in, "initial", "mirror", init.mirror);
    init.amplitude = get_number(in, "initial", "amplitude", init.amplitude);
    init.path = get_string(in, "initial", "path", init.path);
    if (in.contains("seeds")) {
        init.seeds.clear();
        if (!in.at("seeds").is_array()) throw ConfigError("type mismatch: initial.seeds must be a list");
        for (const auto& v : in.at("seeds")) {
            if (!v.is_number_unsigned())
                throw ConfigError("type mismatch: initial.seeds entries must be integers");
            init.seeds.push_back(v.get<std::uint64_t>());
        }
        if (init.seeds.empty()) throw ConfigError("initial.seeds must not be empty");
    }
    if (in.contains("centers")) {
        const json& cs = in.at("centers");
        if (!cs.is_array()) throw ConfigError("type mismatch: initial.centers must be a list");
        for (const auto& ctr : cs) {
            if (!ctr.is_array() || ctr.size() != static_cast<std::size_t>(cfg.grid.dim()))
                throw ConfigError("initial.centers entries must be lists of dim coordinates");
            std::vector<double> pt;
            for (const auto& v : ctr) {
                if (!v.is_number()) throw ConfigError("type mismatch: initial.centers coordinates");
                pt.push_back(v.get<double>());
            }
            init.centers.push_back(pt);
        }
    }
    if (in.contains("amplitudes")) init.amplitudes = get_list(in, "initial", "amplitudes");
    static const std::set<std::string> kinds = {"constant", "bumps", "random", "snapshot"};
    if (!kinds.count(init.kind)) throw ConfigError("initial.kind must be constant|bumps|random|snapshot");
    if (init.kind == "bumps") {
        const std::size_t own = init.mirror ? cfg.model.n / 2 : cfg.model.n;
        if (init.mirror && cfg.model.n % 2 != 0)
            throw ConfigError("initial.mirror requires an even number of components");
        if (init.centers.size() != own)
            throw ConfigError("initial.centers must list " + std::to_string(own) + " centers");
        if (init.amplitudes.empty()) init.amplitudes.assign(own, 1.0);
        if (init.amplitudes.size() != own)
            throw ConfigError("initial.amplitudes must list " + std::to_string(own) + " values");
    }
    if (init.kind == "snapshot" && init.path.empty())
        throw ConfigError("initial.kind = snapshot requires initial.path");

    cfg.admissibility = validate_uniform(cfg.model);
    if (!cfg.admissibility.admissible) {
        std::string msg = "parameters violate the uniform assumption:";
        for (const auto& v : cfg.admissibility.violations) msg += " [" + v.message + "]";
        cfg.warnings.push_back(msg);
    }
    return cfg;
}

ConfigDocument load_config(const std::filesystem::path& path,
                           const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), overrides);
}

FieldSet build_initial_state(const ConfigDocument& cfg, std::uint64_t seed) {
    const Grid& g = cfg.grid;
    const auto& init = cfg.initial;
    const std::size_t n = cfg.model.n;
    if (init.kind == "snapshot") {
        Snapshot snap = read_snapshot(init.path);
        if (snap.state.n() != n)
            throw ConfigError("initial snapshot has " + std::to_string(snap.state.n()) +
                              " components, model has " + std::to_string(n));
        return snap.state;
    }
    FieldSet s(g, n);
    s.u = ScalarField(g, init.u);
    if (init.kind == "constant") {
        for (std::size_t i = 0; i < n; ++i) s.w[i] = ScalarField(g, init.w[i]);
    } else if (init.kind == "bumps") {
        const std::size_t own = init.centers.size();
        const double inv = 1.0 / (2.0 * init.width * init.width);
        for (std::size_t i = 0; i < own; ++i)
            for (std::size_t q = 0; q < g.size(); ++q) {
                double r2 = 0.0;
                for (int a = 0; a < g.dim(); ++a) {
                    const double dx = g.coord(q, a) - init.centers[i][a];
                    r2 += dx * dx;
                }
                s.w[i][q] = init.amplitudes[i] * std::exp(-r2 * inv);
            }
        if (init.mirror) {
            const std::size_t nx = g.count(0);
            for (std::size_t i = 0; i < own; ++i)
                for (std::size_t q = 0; q < g.size(); ++q) {
                    const std::size_t ix = q % nx;
                    s.w[own + i][q] = s.w[i][q - ix + (nx - 1 - ix)];
                }
        }
    } else {  // random
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> coef(-0.3, 0.3);
        const double pi = std::numbers::pi;
        auto smooth = [&](double amp) {
            ScalarField f(g);
            double cx[6], cy[6];
            for (int m = 0; m < 6; ++m) {
                cx[m] = coef(rng);
                cy[m] = coef(rng);
            }
            for (std::size_t q = 0; q < g.size(); ++q) {
                double v = 0.5;
                for (int m = 1; m < 6; ++m) {
                    v += cx[m] * std::cos(m * pi * g.coord(q, 0) / g.extent(0));
                    if (g.dim() == 2) v += cy[m] * std::cos(m * pi * g.coord(q, 1) / g.extent(1));
                }
                f[q] = amp * std::max(v, 0.0);
            }
            return f;
        };
        s.u = ScalarField(g, init.u);
        for (std::size_t i = 0; i < n; ++i) s.w[i] = smooth(init.amplitude);
    }
    return s;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

double parse_number(std::string_view tok, std::size_t line) {
    double v = 0.0;
    const auto* first = tok.data();
    const auto* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw SnapshotError("malformed number '" + std::string(tok) + "' on data row " +
                            std::to_string(line));
    return v;
}

}  // namespace

std::string snapshot_to_string(const FieldSet& state, const SnapshotMeta& meta) {
    const Grid& g = state.grid();
    std::ostringstream os;
    os << "# strongcomp snapshot\n";
    os << "# version " << snapshot_version << "\n";
    os << "# params " << model_to_json(meta.params).dump() << "\n";
    os << "# grid " << grid_to_json(g).dump() << "\n";
    os << "# beta " << format_number(meta.beta) << "\n";
    os << "# residual " << format_number(meta.residual) << "\n";
    os << "# timestamp " << meta.timestamp << "\n";
    os << "# rows " << g.size() << "\n";
    os << "# columns x";
    if (g.dim() == 2) os << "\ty";
    os << "\tu";
    for (std::size_t i = 0; i < state.n(); ++i) os << "\tw_" << i + 1;
    os << "\n";
    for (std::size_t q = 0; q < g.size(); ++q) {
        os << format_number(g.coord(q, 0));
        if (g.dim() == 2) os << '\t' << format_number(g.coord(q, 1));
        os << '\t' << format_number(state.u[q]);
        for (std::size_t i = 0; i < state.n(); ++i) os << '\t' << format_number(state.w[i][q]);
        os << '\n';
    }
    return os.str();
}

void write_snapshot(const FieldSet& state, const SnapshotMeta& meta,
                    const std::filesystem::path& path) {
    write_text_file(path, snapshot_to_string(state, meta));
}

Snapshot snapshot_from_string(std::string_view text) {
    std::map<std::string, std::string> header;
    std::vector<std::string_view> data;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.empty()) continue;
        if (line.front() == '#') {
            line.remove_prefix(1);
            while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
            const auto sp = line.find(' ');
            if (sp == std::string_view::npos) {
                header[std::string(line)] = "";
            } else {
                header[std::string(line.substr(0, sp))] = std::string(line.substr(sp + 1));
            }
        } else {
            data.push_back(line);
        }
    }
    for (const char* key : {"version", "params", "grid", "beta", "residual", "rows", "columns"})
        if (!header.count(key)) throw SnapshotError(std::string("snapshot header lacks '") + key + "'");
    if (header["version"] != std::to_string(snapshot_version))
        throw SnapshotError("snapshot version mismatch: file has " + header["version"] +
                            ", reader expects " + std::to_string(snapshot_version));

    Snapshot snap;
    try {
        snap.meta.params = model_from_json(json::parse(header["params"]));
        const Grid g = grid_from_json(json::parse(header["grid"]));
        snap.state = FieldSet(g, snap.meta.params.n);
    } catch (const std::exception& e) {
        throw SnapshotError(std::string("bad snapshot header: ") + e.what());
    }
    snap.meta.beta = parse_number(header["beta"], 0);
    snap.meta.residual = parse_number(header["residual"], 0);
    snap.meta.timestamp = header.count("timestamp") ? header["timestamp"] : "unset";

    const Grid& g = snap.state.grid();
    const std::size_t rows = std::stoul(header["rows"]);
    if (rows != g.size()) throw SnapshotError("row count mismatch: header rows vs grid node count");
    if (data.size() != rows)
        throw SnapshotError("row count mismatch: expected " + std::to_string(rows) + ", found " +
                            std::to_string(data.size()));
    const std::size_t n = snap.state.n();
    const std::size_t ncols = static_cast<std::size_t>(g.dim()) + 1 + n;
    std::size_t header_cols = 1;
    for (char ch : header["columns"])
        if (ch == '\t') ++header_cols;
    if (header_cols != ncols) throw SnapshotError("column count mismatch in header");
    for (std::size_t q = 0; q < rows; ++q) {
        std::vector<std::string_view> toks;
        std::string_view line = data[q];
        std::size_t start = 0;
        while (true) {
            const auto tab = line.find('\t', start);
            toks.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos
                                                                             : tab - start));
            if (tab == std::string_view::npos) break;
            start = tab + 1;
        }
        if (toks.size() != ncols)
            throw SnapshotError("column count mismatch on data row " + std::to_string(q + 1));
        std::size_t c = static_cast<std::size_t>(g.dim());
        snap.state.u[q] = parse_number(toks[c++], q + 1);
        for (std::size_t i = 0; i < n; ++i) snap.state.w[i][q] = parse_number(toks[c++], q + 1);
    }
    snap.state.params_hash = params_hash(snap.meta.params);
    return snap;
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SnapshotError("cannot read snapshot '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return snapshot_from_string(ss.str());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string Table::str() const {
    std::ostringstream os;
    os << "# ";
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "\t" : "") << columns[c];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "\t" : "") << row[c];
        os << "\n";
    }
    return os.str();
}

namespace {

std::string flag(bool b) { return b ? "pass" : "fail"; }

ordered_json num(double v) {
    if (std::isfinite(v)) return v;
    return format_number(v);
}

}  // namespace

Table to_table(const BoundReport& r) {
    Table t{{"bound", "value", "cap", "excess", "pass"}, {}};
    auto row = [&](const char* name, double v, double cap, bool pass) {
        t.rows.push_back({name, format_number(v), format_number(cap), format_number(v - cap), flag(pass)});
    };
    auto lower = [&](const char* name, double v, bool pass) {
        t.rows.push_back({name, format_number(v), "0", format_number(v < 0.0 ? -v : 0.0), flag(pass)});
    };
    lower("u_min>=0", r.u_min, r.u_lower_pass);
    row("u_max<=lambda/mu", r.u_max, r.u_cap, r.u_upper_pass);
    row("S_max<=delta^-5", r.s_max, r.s_cap, r.s_pass);
    lower("wsum_min>=0", r.wsum_min, r.wsum_lower_pass);
    row("wsum_max<=delta^-6", r.wsum_max, r.wsum_cap, r.wsum_upper_pass);
    return t;
}

ordered_json to_structured(const BoundReport& r) {
    ordered_json j;
    j["u_min"] = r.u_min;
    j["u_max"] = r.u_max;
    j["u_cap"] = r.u_cap;
    j["s_max"] = r.s_max;
    j["s_cap"] = r.s_cap;
    j["wsum_min"] = r.wsum_min;
    j["wsum_max"] = r.wsum_max;
    j["wsum_cap"] = r.wsum_cap;
    j["pass"] = {{"u_lower", r.u_lower_pass}, {"u_upper", r.u_upper_pass}, {"s", r.s_pass},
                 {"wsum_lower", r.wsum_lower_pass}, {"wsum_upper", r.wsum_upper_pass}};
    return j;
}

Table to_table(const SegregationReport& r) {
    Table t{{"i", "j", "overlap", "scaled_overlap"}, {}};
    for (std::size_t i = 0; i < r.n; ++i)
        for (std::size_t j = i + 1; j < r.n; ++j)
            t.rows.push_back({std::to_string(i + 1), std::to_string(j + 1),
                              format_number(r.overlap_at(i, j)), format_number(r.scaled_at(i, j))});
    return t;
}

ordered_json to_structured(const SegregationReport& r) {
    ordered_json j;
    j["beta"] = r.beta;
    ordered_json ov = ordered_json::array(), sc = ordered_json::array();
    for (std::size_t i = 0; i < r.n; ++i) {
        ordered_json a = ordered_json::array(), b = ordered_json::array();
        for (std::size_t k = 0; k < r.n; ++k) {
            a.push_back(r.overlap_at(i, k));
            b.push_back(r.scaled_at(i, k));
        }
        ov.push_back(a);
        sc.push_back(b);
    }
    j["overlap"] = ov;
    j["scaled_overlap"] = sc;
    j["interaction_mass"] = r.interaction_mass;
    j["product_sup"] = r.product_sup;
    return j;
}

Table to_table(const SolveReport& r) {
    return Table{{"converged", "residual_sup", "steps", "newton_iterations", "projected_negative"},
                 {{r.converged ? "true" : "false", format_number(r.residual_sup),
                   std::to_string(r.steps_taken), std::to_string(r.newton_iterations),
                   r.projected_negative ? "true" : "false"}}};
}

ordered_json to_structured(const SolveReport& r) {
    ordered_json j;
    j["converged"] = r.converged;
    j["residual_sup"] = r.residual_sup;
    j["steps"] = r.steps_taken;
    j["newton_iterations"] = r.newton_iterations;
    j["projected_negative"] = r.projected_negative;
    j["u_max"] = r.state.u.max();
    std::vector<double> wmax;
    for (const auto& f : r.state.w) wmax.push_back(f.max());
    j["w_max"] = wmax;
    return j;
}

Table to_table(const std::vector<FaberKrahnRecord>& r) {
    Table t{{"component", "lambda1", "cap", "allowed", "status"}, {}};
    for (const auto& rec : r)
        t.rows.push_back({std::to_string(rec.component + 1), format_number(rec.lambda1),
                          format_number(rec.cap), format_number(faber_krahn_allowance * rec.cap),
                          rec.skipped ? "skipped" : flag(rec.pass)});
    return t;
}

ordered_json to_structured(const std::vector<FaberKrahnRecord>& r) {
    ordered_json arr = ordered_json::array();
    for (const auto& rec : r) {
        ordered_json j;
        j["component"] = rec.component + 1;
        j["skipped"] = rec.skipped;
        j["lambda1"] = rec.lambda1;
        j["cap"] = rec.cap;
        j["allowance"] = faber_krahn_allowance;
        j["pass"] = rec.pass;
        arr.push_back(j);
    }
    return arr;
}

Table to_table(const DecayFit& r) {
    Table t{{"beta", "sqrt_beta", "sup_h", "log_sup_h"}, {}};
    for (std::size_t k = 0; k < r.betas.size(); ++k)
        t.rows.push_back({format_number(r.betas[k]), format_number(std::sqrt(r.betas[k])),
                          format_number(r.sup_h[k]),
                          format_number(r.sup_h[k] > 0 ? std::log(r.sup_h[k])
                                                       : -std::numeric_limits<double>::infinity())});
    return t;
}

ordered_json to_structured(const DecayFit& r) {
    ordered_json j;
    j["center"] = r.center;
    j["rho"] = r.rho;
    j["betas"] = r.betas;
    j["sup_h"] = r.sup_h;
    j["slope"] = num(r.slope);
    j["intercept"] = num(r.intercept);
    j["r_squared"] = num(r.r_squared);
    j["fully_segregated"] = r.fully_segregated;
    return j;
}

Table to_table(const ComplementarityReport& r) {
    Table t{{"component", "test", "kind", "lhs", "rhs", "margin", "tol", "pass"}, {}};
    for (const auto& e : r.entries)
        t.rows.push_back({std::to_string(e.component + 1), std::to_string(e.test_index + 1),
                          to_string(e.kind), format_number(e.lhs), format_number(e.rhs),
                          format_number(e.margin), format_number(e.tol), flag(e.margin >= -e.tol)});
    return t;
}

ordered_json to_structured(const ComplementarityReport& r) {
    ordered_json j;
    j["worst_margin"] = num(r.worst_margin);
    j["worst_relative"] = num(r.worst_relative);
    j["pass"] = r.pass;
    ordered_json arr = ordered_json::array();
    for (const auto& e : r.entries)
        arr.push_back({{"component", e.component + 1}, {"test", e.test_index + 1},
                       {"kind", to_string(e.kind)}, {"lhs", e.lhs}, {"rhs", e.rhs},
                       {"margin", e.margin}, {"tol", e.tol}});
    j["entries"] = arr;
    return j;
}

Table to_table(const SurvivorReport& r) {
    return Table{{"threshold", "count", "nhat_weyl", "soft_cap", "within_soft_bound", "u_distance"},
                 {{format_number(r.threshold), std::to_string(r.count), format_number(r.nhat_weyl),
                   std::to_string(r.soft_cap), r.within_soft_bound ? "true" : "false",
                   r.u_distance ? format_number(*r.u_distance) : "-"}}};
}

ordered_json to_structured(const SurvivorReport& r) {
    ordered_json j;
    j["threshold"] = r.threshold;
    j["count"] = r.count;
    std::vector<std::size_t> one_based;
    for (auto s : r.survivors) one_based.push_back(s + 1);
    j["survivors"] = one_based;
    j["nhat_weyl"] = r.nhat_weyl;
    j["soft_cap"] = r.soft_cap;
    j["within_soft_bound"] = r.within_soft_bound;
    j["u_distance"] = r.u_distance ? ordered_json(*r.u_distance) : ordered_json(nullptr);
    return j;
}

Table to_table(const IsolationReport& r) {
    Table t{{"trial", "outcome", "escaped", "initial_u_sup", "final_sup", "final_u_sup", "residual"}, {}};
    for (const auto& tr : r.trials)
        t.rows.push_back({std::to_string(tr.index), to_string(tr.outcome),
                          tr.escaped ? "true" : "false", format_number(tr.initial_u_sup),
                          format_number(tr.final_sup), format_number(tr.final_u_sup),
                          format_number(tr.residual)});
    return t;
}

ordered_json to_structured(const IsolationReport& r) {
    ordered_json j;
    j["eta"] = r.eta;
    j["violations"] = r.violations;
    ordered_json arr = ordered_json::array();
    for (const auto& tr : r.trials)
        arr.push_back({{"trial", tr.index}, {"outcome", to_string(tr.outcome)},
                       {"escaped", tr.escaped}, {"initial_u_sup", tr.initial_u_sup},
                       {"final_sup", tr.final_sup}, {"final_u_sup", tr.final_u_sup},
                       {"residual", tr.residual}});
    j["trials"] = arr;
    return j;
}

Table to_table(const Table& t) { return t; }

ordered_json to_structured(const Table& t) {
    ordered_json arr = ordered_json::array();
    for (const auto& row : t.rows) {
        ordered_json j;
        for (std::size_t c = 0; c < t.columns.size() && c < row.size(); ++c) j[t.columns[c]] = row[c];
        arr.push_back(j);
    }
    return arr;
}

Table overlap_table(const ContinuationTrace& trace, const ModelParams& params) {
    Table t;
    t.columns.push_back("beta");
    const std::size_t n = params.n;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            t.columns.push_back("overlap_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
            t.columns.push_back("scaled_overlap_" + std::to_string(i + 1) + "_" +
                                std::to_string(j + 1));
        }
    t.columns.push_back("product_sup");
    ModelParams p = params;
    for (std::size_t b = 0; b < trace.reports.size(); ++b) {
        p.beta = trace.betas[b];
        const auto seg = segregation_report(trace.reports[b].state, p);
        std::vector<std::string> row{format_number(trace.betas[b])};
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                row.push_back(format_number(seg.overlap_at(i, j)));
                row.push_back(format_number(seg.scaled_at(i, j)));
            }
        row.push_back(format_number(seg.product_sup));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table holder_table(const ContinuationTrace& trace, double alpha, std::size_t max_pairs) {
    Table t;
    t.columns.push_back("beta");
    const std::size_t n = trace.reports.empty() ? 0 : trace.reports.front().state.n();
    for (std::size_t i = 0; i < n; ++i) t.columns.push_back("holder_w_" + std::to_string(i + 1));
    for (std::size_t b = 0; b < trace.reports.size(); ++b) {
        std::vector<std::string> row{format_number(trace.betas[b])};
        for (const auto& f : trace.reports[b].state.w)
            row.push_back(format_number(holder_seminorm(f, alpha, max_pairs)));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table continuation_table(const ContinuationTrace& trace) {
    Table t{{"beta", "converged", "residual_sup", "steps", "newton_iterations"}, {}};
    for (std::size_t b = 0; b < trace.reports.size(); ++b) {
        const auto& r = trace.reports[b];
        t.rows.push_back({format_number(trace.betas[b]), r.converged ? "true" : "false",
                          format_number(r.residual_sup), std::to_string(r.steps_taken),
                          std::to_string(r.newton_iterations)});
    }
    return t;
}

}  // namespace strongcomp
