#include "replidyn/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "replidyn/error.hpp"

namespace replidyn {

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ostringstream suffix;
    suffix << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id());
    const fs::path tmp = path.string() + suffix.str();
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

std::filesystem::path output_root(const ExperimentConfig& config) {
    if (const char* env = std::getenv("REPLIDYN_OUT"); env && *env) return env;
    return config.output_dir;
}

Field scaled_torsion_profile(const TorsionSolution& torsion, double mass, double noise, std::uint64_t seed) {
    const Grid& g = *torsion.phi.grid;
    Field u0 = torsion.phi;
    if (noise > 0.0) {
        // Smooth perturbation: seeded amplitudes on the lowest sine modes,
        // scaled so the factor stays within 1 +- noise.
        constexpr int kModes = 4;
        std::mt19937_64 rng(seed);
        auto unit = [&rng] {
            // Raw bits keep the stream identical across standard libraries.
            return static_cast<double>(rng() >> 11) * 0x1.0p-53;
        };
        const int my = g.dimension == 2 ? kModes : 1;
        std::vector<double> amp(static_cast<std::size_t>(kModes * my));
        for (auto& a : amp) a = (2.0 * unit() - 1.0) / static_cast<double>(amp.size());
        const Field factor = sample(torsion.phi.grid, [&](double x, double y) {
            double s = 0.0;
            for (int p = 0; p < kModes; ++p) {
                const double sx = std::sin((p + 1) * std::numbers::pi * x / g.extents[0]);
                for (int q = 0; q < my; ++q) {
                    const double sy = g.dimension == 2 ? std::sin((q + 1) * std::numbers::pi * y / g.extents[1]) : 1.0;
                    s += amp[static_cast<std::size_t>(p * my + q)] * sx * sy;
                }
            }
            return 1.0 + noise * s;
        });
        for (std::size_t k = 0; k < g.size(); ++k) u0[k] *= factor[k];
    }
    const double scale = mass / integrate(u0);
    for (auto& v : u0.values) v *= scale;
    return u0;
}

PreparedInitial prepare_initial(const ExperimentConfig& config) {
    PreparedInitial p;
    p.grid = build_grid(config.grid.dimension, config.grid.extents, config.grid.n);
    p.torsion = solve_torsion(p.grid);
    Field u0 = scaled_torsion_profile(p.torsion, config.init.mass, config.init.noise, config.seed);
    p.recipe = default_recipe(std::move(u0), config.solver.epsilon, p.torsion);
    if (config.init.mollify_radius) p.recipe.mollify_radius = *config.init.mollify_radius;
    if (config.init.margin_rho) p.recipe.margin_rho = *config.init.margin_rho;
    if (config.init.margin_theta) p.recipe.margin_theta = *config.init.margin_theta;
    if (config.init.L) p.recipe.L = *config.init.L;
    if (config.init.method == "compatible") {
        p.init = construct_initial(p.recipe, p.torsion);
    } else {
        p.init.u0eps = p.recipe.u0;
        for (auto& v : p.init.u0eps.values) v += config.solver.epsilon;
        p.init.mass_offset = config.solver.epsilon * p.grid->measure();
    }
    return p;
}

std::string json_number(double v) { return std::isfinite(v) ? format_double(v) : "null"; }

namespace {
std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }
std::string json_bool(bool b) { return b ? "true" : "false"; }
}  // namespace

std::string summary_json(const FlatSummary& summary) {
    std::ostringstream os;
    os << "{\n";
    for (std::size_t i = 0; i < summary.size(); ++i) {
        os << "  " << json_string(summary[i].first) << ": " << summary[i].second;
        os << (i + 1 < summary.size() ? ",\n" : "\n");
    }
    os << "}\n";
    return os.str();
}

std::string initdata_report_csv(const std::vector<PropertyCheck>& report) {
    std::ostringstream os;
    os << "property,measured,threshold,pass\n";
    for (const auto& r : report)
        os << r.property << ',' << format_double(r.measured) << ',' << format_double(r.threshold) << ','
           << (r.pass ? "true" : "false") << '\n';
    return os.str();
}

BlowupAnalysis analyse_blowup(const Trace& trace_in, const std::vector<Snapshot>& snapshots, const BlowupSpec& spec) {
    if (snapshots.empty()) throw Error("blowup analysis: no snapshots");
    if (trace_in.size() < 2) throw Error("blowup analysis: trace too short");
    Trace trace = trace_in;
    const GridPtr grid = grid_from_snapshot(snapshots.front());
    if (trace.epsilon == 0.0) trace.epsilon = snapshots.front().boundary_value.value_or(0.0);
    trace.measure = grid->measure();
    if (trace.sup_cap == 0.0) trace.sup_cap = 1e4 * trace.rows[0].sup_norm;

    BlowupAnalysis a;
    try {
        const TmaxFit fit = estimate_tmax(trace);
        a.report.t_max_estimate = fit.t_max;
        a.report.fit_residual = fit.residual;
    } catch (const Error& e) {
        a.fit_error = e.what();
        a.report.t_max_estimate = std::numeric_limits<double>::quiet_NaN();
        a.report.fit_residual = std::numeric_limits<double>::quiet_NaN();
    }
    const std::vector<double> cps = default_checkpoints(snapshots.back().t);
    const double margins[] = {spec.core_margin};
    BlowupReport set = blowup_set_estimate(snapshots, cps, spec.growth_threshold, margins);
    set.t_max_estimate = a.report.t_max_estimate;
    set.fit_residual = a.report.fit_residual;
    a.report = std::move(set);

    const double y0 = trace.corrected_mass(0);
    a.poincare_constant = poincare_constant(grid);
    a.poincare_bound = y0 > 1.0 ? poincare_blowup_bound(y0, a.poincare_constant, trace.measure)
                                : std::numeric_limits<double>::quiet_NaN();
    const std::size_t pre = std::max<std::size_t>(1, precap_rows(trace));
    a.energy_ratio = final_over_median(trace, pre, true);
    a.mass_ratio = final_over_median(trace, pre, false);
    a.mass_growth = y0 > 0.0 ? trace.corrected_mass(pre - 1) / y0 : std::numeric_limits<double>::quiet_NaN();
    return a;
}

std::string blowup_csv(const BlowupAnalysis& a) {
    std::ostringstream os;
    os << "metric,value\n";
    os << "t_max_estimate," << format_double(a.report.t_max_estimate) << '\n';
    os << "fit_method," << a.report.fit_method << '\n';
    os << "fit_residual," << format_double(a.report.fit_residual) << '\n';
    os << "blowup_set_fraction," << format_double(a.report.blowup_set_fraction) << '\n';
    for (std::size_t i = 0; i < a.report.checkpoint_times.size(); ++i)
        os << "checkpoint_" << i + 1 << "," << format_double(a.report.checkpoint_times[i]) << '\n';
    for (const auto& c : a.report.cores)
        os << "core_min_growth_margin_" << format_double(c.margin) << "," << format_double(c.min_growth) << '\n';
    os << "poincare_constant," << format_double(a.poincare_constant) << '\n';
    os << "poincare_blowup_bound," << format_double(a.poincare_bound) << '\n';
    os << "energy_final_over_median," << format_double(a.energy_ratio) << '\n';
    os << "mass_final_over_median," << format_double(a.mass_ratio) << '\n';
    os << "mass_growth," << format_double(a.mass_growth) << '\n';
    return os.str();
}

namespace {

std::string snapshots_ndjson(const std::vector<Snapshot>& snaps) {
    std::ostringstream os;
    write_snapshots(os, snaps);
    return os.str();
}

ExperimentResult execute(const ExperimentConfig& config, const std::filesystem::path& dir) {
    ExperimentResult r;
    r.dir = dir;
    const PreparedInitial prep = prepare_initial(config);
    const SimulationResult sim = run(prep.init.u0eps, config.solver, prep.torsion);
    const Trace& tr = sim.trace;

    std::vector<CheckRow> checks;
    if (config.diagnostics.enabled)
        checks = run_checks(tr, sim.snapshots, config.diagnostics.checks, config.diagnostics.options);

    const std::size_t pre = precap_rows(tr);
    r.max_mass_ode_residual =
        pre >= 3 ? mass_ode_residual(tr, pre).normalized : std::numeric_limits<double>::quiet_NaN();
    r.outcome = sim.outcome;
    r.t_max_estimate = sim.t_max_estimate;
    r.final_snapshot = sim.snapshots.back();

    std::optional<BlowupAnalysis> blow;
    if (sim.outcome == Outcome::BlowUp) blow = analyse_blowup(tr, sim.snapshots, config.blowup);

    const double y0 = tr.corrected_mass(0);
    double drift = 0.0;
    for (std::size_t k = 0; k < tr.size(); ++k) drift = std::max(drift, std::abs(tr.corrected_mass(k) - y0));
    const std::size_t failed =
        static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const CheckRow& c) { return !c.pass; }));
    const bool init_ok = all_pass(prep.init.report);

    FlatSummary& s = r.summary;
    s.emplace_back("outcome", json_string(to_string(sim.outcome)));
    s.emplace_back("stop_reason", json_string(to_string(sim.reason)));
    s.emplace_back("t_max_estimate", json_number(sim.t_max_estimate));
    s.emplace_back("t_last", json_number(sim.t_last));
    s.emplace_back("steps", std::to_string(sim.steps));
    s.emplace_back("epsilon", json_number(config.solver.epsilon));
    s.emplace_back("initial_corrected_mass", json_number(y0));
    s.emplace_back("final_corrected_mass", json_number(tr.corrected_mass(tr.size() - 1)));
    s.emplace_back("max_mass_drift", json_number(drift));
    s.emplace_back("max_mass_ode_residual", json_number(r.max_mass_ode_residual));
    s.emplace_back("final_energy", json_number(tr.rows.back().dirichlet_energy));
    s.emplace_back("final_sup_norm", json_number(tr.rows.back().sup_norm));
    s.emplace_back("sup_cap", json_number(tr.sup_cap));
    s.emplace_back("floored_total", std::to_string(sim.floored_total));
    s.emplace_back("floor_flagged", json_bool(sim.floor_flagged));
    s.emplace_back("initdata_method", json_string(config.init.method));
    s.emplace_back("initdata_C", json_number(prep.init.C));
    s.emplace_back("initdata_alpha", json_number(prep.init.alpha));
    s.emplace_back("initdata_pass", json_bool(init_ok));
    s.emplace_back("checks_run", std::to_string(checks.size()));
    s.emplace_back("checks_failed", std::to_string(failed));
    if (blow) {
        s.emplace_back("blowup_set_fraction", json_number(blow->report.blowup_set_fraction));
        s.emplace_back("poincare_blowup_bound", json_number(blow->poincare_bound));
    }

    namespace fs = std::filesystem;
    fs::create_directories(dir);
    write_file_atomic(dir / "trace.csv", trace_to_csv(tr));
    write_file_atomic(dir / "snapshots.ndjson", snapshots_ndjson(sim.snapshots));
    write_file_atomic(dir / "initdata_report.csv", initdata_report_csv(prep.init.report));
    write_file_atomic(dir / "diagnostics.csv", checks_to_csv(checks));
    if (blow) write_file_atomic(dir / "blowup.csv", blowup_csv(*blow));
    write_file_atomic(dir / "summary.json", summary_json(s));

    r.exit_code = (failed > 0 || !init_ok) ? 2 : 0;
    if (r.exit_code == 2) r.message = std::to_string(failed) + " diagnostic row(s) failed";
    return r;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_root) {
    const std::filesystem::path dir = out_root / config.name;
    try {
        return execute(config, dir);
    } catch (const std::exception& e) {
        ExperimentResult r;
        r.exit_code = 1;
        r.dir = dir;
        r.message = e.what();
        return r;
    }
}

SweepResult run_sweep(const SweepSpec& spec, const std::filesystem::path& out_root) {
    if (spec.values.empty()) throw Error("sweep: values list must be nonempty");
    const std::filesystem::path root = out_root / spec.base.name;
    const std::size_t n = spec.values.size();
    std::vector<ExperimentResult> results(n);
    std::vector<SweepRow> rows(n);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            rows[i].axis_value = spec.values[i];
            try {
                ExperimentConfig cfg = apply_axis(spec.base, spec.axis, spec.values[i]);
                cfg.name = spec.axis + "_" + format_double(spec.values[i]);
                results[i] = run_experiment(cfg, root);
            } catch (const std::exception& e) {
                results[i].exit_code = 1;
                results[i].message = e.what();
            }
        }
    };
    const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, spec.parallelism)), n);
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    SweepResult out;
    std::ostringstream csv;
    csv << "axis_value,outcome,t_max_estimate,max_mass_ode_residual\n";
    for (std::size_t i = 0; i < n; ++i) {
        const ExperimentResult& r = results[i];
        SweepRow& row = rows[i];
        row.exit_code = r.exit_code;
        row.message = r.message;
        row.outcome = r.exit_code == 1 ? "error" : to_string(r.outcome);
        row.t_max_estimate = r.exit_code == 1 ? std::numeric_limits<double>::quiet_NaN() : r.t_max_estimate;
        row.max_mass_ode_residual = r.exit_code == 1 ? std::numeric_limits<double>::quiet_NaN() : r.max_mass_ode_residual;
        if (r.exit_code != 0) out.exit_code = 2;
        csv << format_double(row.axis_value) << ',' << row.outcome << ',' << format_double(row.t_max_estimate) << ','
            << format_double(row.max_mass_ode_residual) << '\n';
    }
    out.rows = rows;
    write_file_atomic(root / "sweep_summary.csv", csv.str());

    if (spec.axis == "epsilon" && n >= 2) {
        std::ostringstream pl;
        pl << "epsilon_a,epsilon_b,t,l2_distance\n";
        for (std::size_t i = 0; i + 1 < n; ++i) {
            double d = std::numeric_limits<double>::quiet_NaN();
            double t = std::numeric_limits<double>::quiet_NaN();
            const auto& a = results[i].final_snapshot;
            const auto& b = results[i + 1].final_snapshot;
            if (a && b && a->shape == b->shape && std::abs(a->t - b->t) <= 1e-12 * std::max(1.0, a->t)) {
                const GridPtr grid = grid_from_snapshot(*a);
                Field diff(grid);
                for (std::size_t k = 0; k < diff.size(); ++k)
                    diff[k] = (a->values[k] - spec.values[i]) - (b->values[k] - spec.values[i + 1]);
                d = l2_norm(diff);
                t = a->t;
            }
            out.pairwise_l2.push_back(d);
            pl << format_double(spec.values[i]) << ',' << format_double(spec.values[i + 1]) << ','
               << format_double(t) << ',' << format_double(d) << '\n';
        }
        write_file_atomic(root / "pairwise_l2.csv", pl.str());
    }
    return out;
}

int run_initdata(const ExperimentConfig& config, const std::filesystem::path& out_root, std::string* message) {
    try {
        ExperimentConfig cfg = config;
        cfg.init.method = "compatible";
        const PreparedInitial prep = prepare_initial(cfg);
        const std::filesystem::path dir = out_root / config.name;
        std::vector<Snapshot> snaps{make_snapshot(0.0, prep.init.u0eps, config.solver.epsilon)};
        write_file_atomic(dir / "u0eps.ndjson", snapshots_ndjson(snaps));
        write_file_atomic(dir / "initdata_report.csv", initdata_report_csv(prep.init.report));
        FlatSummary s;
        s.emplace_back("C", json_number(prep.init.C));
        s.emplace_back("alpha", json_number(prep.init.alpha));
        s.emplace_back("A", json_number(prep.init.A));
        s.emplace_back("B", json_number(prep.init.B));
        s.emplace_back("Gamma", json_number(prep.init.Gamma));
        s.emplace_back("C_K", json_number(prep.init.C_K));
        s.emplace_back("mass_offset", json_number(prep.init.mass_offset));
        s.emplace_back("target_energy", json_number(dirichlet_energy(prep.recipe.u0, 0.0)));
        s.emplace_back("all_pass", json_bool(all_pass(prep.init.report)));
        write_file_atomic(dir / "summary.json", summary_json(s));
        if (!all_pass(prep.init.report)) {
            if (message) *message = "initial-data property check failed";
            return 2;
        }
        return 0;
    } catch (const std::exception& e) {
        if (message) *message = e.what();
        return 1;
    }
}

PayoffMatrix build_game(const ReplicatorSpec& spec) {
    const auto m = static_cast<std::size_t>(spec.m);
    PayoffMatrix a(m);
    if (spec.game == "coordination" || spec.game == "identity") {
        for (std::size_t i = 0; i < m; ++i) a(i, i) = 1.0;
    } else if (spec.game == "constant") {
        a = PayoffMatrix(m, 1.0);
    } else if (spec.game == "kernel") {
        const std::array<double, 1> ext{1.0};
        const std::array<int, 1> nodes{spec.m};
        a = payoff_matrix_from_kernel(*build_grid(1, ext, nodes), spec.sigma);
    } else {
        throw Error("unknown game '" + spec.game + "'");
    }
    for (auto& v : a.a) v += spec.payoff_shift;
    return a;
}

int run_replicator(const ExperimentConfig& config, const std::filesystem::path& out_root, std::string* message) {
    try {
        const ReplicatorSpec& spec = config.replicator;
        const PayoffMatrix a = build_game(spec);
        std::vector<double> p0 = spec.p0;
        if (p0.empty()) p0.assign(static_cast<std::size_t>(spec.m), 1.0 / spec.m);
        const ReplicatorTrace tr =
            integrate_replicator(p0, a, spec.t_end, spec.dt, static_cast<std::size_t>(spec.record_stride));
        const std::filesystem::path dir = out_root / config.name;
        std::ostringstream os;
        const bool csv = static_cast<std::size_t>(spec.m) <= kReplicatorCsvMaxColumns;
        if (csv)
            write_replicator_csv(os, tr);
        else
            write_replicator_ndjson(os, tr);
        write_file_atomic(dir / (csv ? "replicator_trace.csv" : "replicator_trace.ndjson"), os.str());
        double worst = 0.0;
        for (const auto& p : tr.p) {
            double s = 0.0;
            for (double v : p) s += v;
            worst = std::max(worst, std::abs(s - 1.0));
        }
        FlatSummary s;
        s.emplace_back("game", json_string(spec.game));
        s.emplace_back("m", std::to_string(spec.m));
        s.emplace_back("steps", std::to_string(tr.t.size() - 1));
        s.emplace_back("max_clip", json_number(tr.max_clip));
        s.emplace_back("max_simplex_error", json_number(worst));
        write_file_atomic(dir / "summary.json", summary_json(s));
        return 0;
    } catch (const std::exception& e) {
        if (message) *message = e.what();
        return 1;
    }
}

}  // namespace replidyn
