#include "strongcomp/cli.hpp"

#include "strongcomp/acceptance.hpp"
#include "strongcomp/analysis.hpp"
#include "strongcomp/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <sstream>

namespace strongcomp::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config;
    std::string out;
    std::vector<std::string> overrides;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string timestamp() {
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) return std::string("epoch:") + epoch;
    return "unset";
}

ConfigDocument load(const Options& o, std::ostream& err) {
    ConfigDocument cfg = load_config(o.config, o.overrides);
    for (const auto& w : cfg.warnings) err << "warning: " << w << "\n";
    return cfg;
}

template <typename Report>
void emit(const Report& r, const fs::path& dir, const std::string& stem) {
    write_report(r, dir / (stem + ".tsv"), ReportFormat::table);
    write_report(r, dir / (stem + ".json"), ReportFormat::structured);
}

std::string beta_label(std::size_t index, double beta) {
    std::ostringstream os;
    os << "snapshot_" << index << "_beta_" << format_number(beta) << ".tsv";
    return os.str();
}

SolveReport solve_once(const FieldSet& init, const ModelParams& p, const SolveSettings& s) {
    SolveReport rep = march_to_steady(init, p, s);
    if (s.newton && !rep.converged) {
        try {
            SolveReport polished = newton_refine(rep.state, p, s);
            polished.steps_taken = rep.steps_taken;
            polished.wall_time += rep.wall_time;
            if (polished.residual_sup < rep.residual_sup) rep = std::move(polished);
        } catch (const NewtonError&) {
        }
    }
    return rep;
}

int run_solve(const Options& o, std::ostream& out, std::ostream& err) {
    const auto cfg = load(o, err);
    const fs::path dir(o.out);
    const FieldSet init = build_initial_state(cfg, cfg.initial.seeds.front());
    const SolveReport rep = solve_once(init, cfg.model, cfg.solve);
    write_snapshot(rep.state, {cfg.model, cfg.model.beta, rep.residual_sup, timestamp()},
                   dir / "snapshot.tsv");
    emit(rep, dir, "solve_report");
    out << (rep.converged ? "converged" : "not converged") << ": residual "
        << format_number(rep.residual_sup) << " after " << rep.steps_taken << " steps\n";
    err << "wall time " << rep.wall_time << " s\n";
    return rep.converged ? exit_ok : exit_check_failed;
}

int run_sweep(const Options& o, std::ostream& out, std::ostream& err) {
    const auto cfg = load(o, err);
    if (cfg.betas.empty()) throw ConfigError("sweep needs a continuation schedule");
    const fs::path root(o.out);
    bool all_converged = true;
    for (std::uint64_t seed : cfg.initial.seeds) {
        const fs::path dir = cfg.initial.seeds.size() > 1 ? root / ("seed_" + std::to_string(seed)) : root;
        const FieldSet init = build_initial_state(cfg, seed);
        const auto trace = continue_in_beta(init, cfg.model, cfg.betas, cfg.solve,
                                            cfg.initial.kind + " seed " + std::to_string(seed));
        for (std::size_t k = 0; k < trace.betas.size(); ++k) {
            const auto& r = trace.reports[k];
            ModelParams p = cfg.model;
            p.beta = trace.betas[k];
            write_snapshot(r.state, {p, p.beta, r.residual_sup, timestamp()},
                           dir / beta_label(k, trace.betas[k]));
            all_converged = all_converged && r.converged;
        }
        write_text_file(dir / "continuation.tsv", continuation_table(trace).str());
        write_text_file(dir / "overlaps.tsv", overlap_table(trace, cfg.model).str());
        write_text_file(dir / "holder.tsv",
                        holder_table(trace, cfg.analysis.alpha, cfg.analysis.max_pairs).str());
        if (trace.betas.size() >= 3) {
            std::vector<double> center = cfg.analysis.decay_center;
            const std::size_t c = cfg.analysis.decay_component;
            if (center.empty()) {
                const FieldSet& s = trace.reports.front().state;
                std::size_t peak = 0;
                for (std::size_t q = 0; q < s.u.size(); ++q)
                    if (s.w[c][q] > s.w[c][peak]) peak = q;
                for (int a = 0; a < s.grid().dim(); ++a) center.push_back(s.grid().coord(peak, a));
            }
            try {
                emit(decay_fit(trace, cfg.model, c, center, cfg.analysis.decay_rho), dir, "decay");
            } catch (const PreconditionError& e) {
                err << "decay fit skipped: " << e.what() << "\n";
            }
        }
        out << "seed " << seed << ": " << trace.betas.size() << " beta values written to "
            << dir.string() << "\n";
    }
    return all_converged ? exit_ok : exit_check_failed;
}

Snapshot input_snapshot(const ConfigDocument& cfg, const Options& o) {
    const fs::path path =
        cfg.analysis.snapshot.empty() ? fs::path(o.out) / "snapshot.tsv" : fs::path(cfg.analysis.snapshot);
    return read_snapshot(path);
}

int run_analyze(const Options& o, std::ostream& out, std::ostream& err) {
    const auto cfg = load(o, err);
    const Snapshot snap = input_snapshot(cfg, o);
    const ModelParams& p = snap.meta.params;
    const FieldSet& s = snap.state;
    const fs::path dir(o.out);
    const double theta = cfg.analysis.threshold.value_or(default_threshold(s));

    const auto bounds = check_linf_bounds(s, p);
    emit(bounds, dir, "bounds");
    emit(segregation_report(s, p), dir, "segregation");
    const auto comp = complementarity_check(s, p, cosine_test_functions(s.grid(), cfg.analysis.test_functions));
    emit(comp, dir, "complementarity");
    bool fk_pass = true;
    if (theta > 0.0) {
        const auto fk = faber_krahn_check(s, p, theta);
        for (const auto& r : fk) fk_pass = fk_pass && r.pass;
        emit(fk, dir, "faber_krahn");
        emit(survivor_count(s, p, theta), dir, "survivors");
    }
    out << "bounds " << (bounds.pass() ? "pass" : "fail") << ", complementarity "
        << (comp.pass ? "pass" : "fail") << ", faber-krahn " << (fk_pass ? "pass" : "fail")
        << " (theta " << format_number(theta) << ")\n";
    return bounds.pass() && comp.pass && fk_pass ? exit_ok : exit_check_failed;
}

int run_eig(const Options& o, std::ostream& out, std::ostream& err) {
    const auto cfg = load(o, err);
    const Snapshot snap = input_snapshot(cfg, o);
    const double theta = cfg.analysis.threshold.value_or(default_threshold(snap.state));
    if (!(theta > 0.0)) throw ConfigError("eig needs a positive threshold (state is zero)");
    const auto fk = faber_krahn_check(snap.state, snap.meta.params, theta);
    emit(fk, fs::path(o.out), "eig");
    for (const auto& r : fk)
        out << "w_" << r.component + 1 << ": "
            << (r.skipped ? std::string("empty support") : "lambda1 " + format_number(r.lambda1)) << "\n";
    return exit_ok;
}

int run_verify(const Options& o, std::ostream& out, std::ostream& err) {
    if (!o.config.empty()) load(o, err);
    Table t{{"id", "name", "result", "detail"}, {}};
    const auto results = run_acceptance([&](const CriterionResult& r) {
        out << format_result(r) << "\n" << std::flush;
    });
    bool all = true;
    for (const auto& r : results) {
        all = all && r.pass;
        t.rows.push_back({std::to_string(r.id), r.name, r.pass ? "PASS" : "FAIL", r.detail});
    }
    if (!o.out.empty()) write_text_file(fs::path(o.out) / "verify.tsv", t.str());
    out << (all ? "all criteria passed" : "some criteria failed") << "\n";
    return all ? exit_ok : exit_check_failed;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Steady states and singular-limit diagnostics for strongly competing predators"};
    app.name("strongcomp");
    app.require_subcommand(1, 1);
    Options o;
    struct Entry {
        const char* name;
        const char* help;
        int (*fn)(const Options&, std::ostream&, std::ostream&);
        bool needs_config;
    };
    const Entry entries[] = {
        {"solve", "march one configuration to steady state", run_solve, true},
        {"sweep", "continue in beta and write per-beta snapshots and tables", run_sweep, true},
        {"analyze", "run the diagnostics on a snapshot", run_analyze, true},
        {"verify", "run the acceptance suite", run_verify, false},
        {"eig", "restricted first eigenvalue of each support", run_eig, true},
    };
    for (const auto& e : entries) {
        auto* sub = app.add_subcommand(e.name, e.help);
        auto* cfg = sub->add_option("--config", o.config, "JSON configuration file");
        if (e.needs_config) cfg->required();
        sub->add_option("--out", o.out, "output directory")->required(e.needs_config);
        sub->add_option("--set", o.overrides, "override key=value (section.key or unique key)")
            ->take_all()
            ->allow_extra_args(false);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return exit_usage;
    }
    const auto* chosen = app.get_subcommands().front();
    for (const auto& e : entries) {
        if (chosen->get_name() != e.name) continue;
        try {
            return e.fn(o, out, err);
        } catch (const ConfigError& ex) {
            err << "config error: " << ex.what() << "\n";
            return exit_usage;
        } catch (const SnapshotError& ex) {
            err << "snapshot error: " << ex.what() << "\n";
            return exit_usage;
        } catch (const BlowUpError& ex) {
            err << "solve failed: " << ex.what() << "\n";
            return exit_check_failed;
        } catch (const std::exception& ex) {
            err << "error: " << ex.what() << "\n";
            return exit_check_failed;
        }
    }
    return exit_usage;
}

}  // namespace strongcomp::cli
