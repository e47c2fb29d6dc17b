// Run-based examples on full solver runs. Slower than the unit suite.

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "replidyn/config.hpp"
#include "replidyn/experiment.hpp"

using namespace replidyn;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigDir = REPLIDYN_CONFIG_DIR;

ExperimentConfig load(const std::string& file) { return parse_config(read_text_file(kConfigDir / file)); }

fs::path scratch(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("replidyn_examples_" + std::to_string(::getpid()) + "_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

struct Finished {
    Trace trace;
    std::vector<Snapshot> snapshots;
};

Finished run_to_files(const ExperimentConfig& cfg, const fs::path& root) {
    const ExperimentResult r = run_experiment(cfg, root);
    REQUIRE_MESSAGE(r.exit_code != 1, r.message);
    Finished f;
    f.trace = read_trace_csv(root / cfg.name / "trace.csv");
    f.snapshots = read_snapshots(root / cfg.name / "snapshots.ndjson");
    f.trace.epsilon = cfg.solver.epsilon;
    f.trace.measure = 1.0;
    f.trace.sup_cap =
        cfg.solver.sup_cap > 0.0 ? cfg.solver.sup_cap : cfg.solver.sup_cap_factor * f.trace.rows.front().sup_norm;
    return f;
}

bool all_rows_pass(const std::vector<CheckRow>& rows, const std::string& name) {
    bool any = false;
    for (const auto& r : rows)
        if (r.check.rfind(name, 0) == 0) {
            any = true;
            if (!r.pass) return false;
        }
    return any;
}

}  // namespace

TEST_CASE("mass-1.5 run: estimates hold before the cap") {
    const fs::path root = scratch("estimates");
    const Finished f = run_to_files(load("trichotomy_blowup.cfg"), root);
    const std::size_t pre = precap_rows(f.trace);
    CHECK(h_identity_check(f.trace, pre).max_rel_error <= 0.05);
    const auto rows = run_checks(f.trace, f.snapshots, {"gradient_bound", "phi_norm"});
    CHECK(all_rows_pass(rows, "gradient_bound"));
    CHECK(all_rows_pass(rows, "phi_norm"));
    fs::remove_all(root);
}

TEST_CASE("mass-1.5 run at dt_max 1e-4: mass identity residual") {
    const fs::path root = scratch("mass_ode");
    ExperimentConfig cfg = load("trichotomy_blowup.cfg");
    cfg.solver.dt_max = 1e-4;
    const Finished f = run_to_files(cfg, root);
    const MassOdeResidual r = mass_ode_residual(f.trace, precap_rows(f.trace));
    CHECK(r.normalized <= 0.05);
    fs::remove_all(root);
}

TEST_CASE("mass-1.5 run: T_max fit and cap robustness") {
    const fs::path root = scratch("tmax");
    ExperimentConfig lo = load("trichotomy_blowup.cfg");
    ExperimentConfig hi = lo;
    lo.solver.sup_cap_factor = 1e3;
    lo.name = "cap_1e3";
    hi.solver.sup_cap_factor = 1e4;
    hi.name = "cap_1e4";
    const Finished a = run_to_files(lo, root), b = run_to_files(hi, root);
    const TmaxFit fa = estimate_tmax(a.trace), fb = estimate_tmax(b.trace);
    CHECK(std::isfinite(fb.t_max));
    CHECK(fb.residual <= 1e-2);
    CHECK(std::abs(fa.t_max - fb.t_max) <= 0.1 * fb.t_max);

    const GridPtr grid = grid_from_snapshot(b.snapshots.front());
    const double bound = poincare_blowup_bound(b.trace.corrected_mass(0), poincare_constant(grid), grid->measure());
    CHECK(fb.t_max <= bound);
    fs::remove_all(root);
}

TEST_CASE("blow-up set of the deep mass-1.5 run covers the interval") {
    const fs::path root = scratch("deep");
    const Finished f = run_to_files(load("blowup_deep.cfg"), root);
    const std::vector<double> checkpoints = default_checkpoints(f.snapshots.back().t);
    const BlowupReport rep = blowup_set_estimate(f.snapshots, checkpoints, 10.0);
    CHECK(rep.blowup_set_fraction >= 0.99);
    fs::remove_all(root);
}

TEST_CASE("decayed run: comparison bound and boundary concentration") {
    const fs::path root = scratch("decay");
    const Finished f = run_to_files(load("trichotomy_decay.cfg"), root);
    const auto rows = run_checks(f.trace, f.snapshots, {"comparison_bound", "boundary_concentration"});
    CHECK(all_rows_pass(rows, "comparison_bound"));
    CHECK(all_rows_pass(rows, "boundary_concentration"));
    fs::remove_all(root);
}

TEST_CASE("mass sweep reproduces the trichotomy") {
    const fs::path root = scratch("mass_sweep");
    const SweepResult r = run_sweep(parse_sweep(read_text_file(kConfigDir / "mass_sweep.cfg")), root);
    REQUIRE(r.rows.size() == 5u);
    const char* expected[] = {"Decayed", "Decayed", "RanToEnd", "BlowUp", "BlowUp"};
    for (std::size_t i = 0; i < 5; ++i) CHECK(r.rows[i].outcome == expected[i]);
    fs::remove_all(root);
}

// eps + (scaled torsion) at corrected mass 1 is a discrete steady state for
// every eps here, so the final states agree to roundoff.
TEST_CASE("epsilon sweep at mass 1.0 stays on the steady state") {
    const fs::path root = scratch("eps_critical");
    SweepSpec spec = parse_sweep(read_text_file(kConfigDir / "eps_sweep.cfg"));
    spec.base.init.mass = 1.0;
    spec.values = {1e-2, 1e-3, 1e-4};
    const SweepResult r = run_sweep(spec, root);
    REQUIRE(r.pairwise_l2.size() == 2u);
    for (double d : r.pairwise_l2) CHECK(d <= 1e-12);
    fs::remove_all(root);
}
