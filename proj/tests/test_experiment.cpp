#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "replidyn/error.hpp"
#include "replidyn/experiment.hpp"

using namespace replidyn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("replidyn_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

ExperimentConfig small(double mass) {
    return parse_config("grid.n = 101\ninit.mass = " + std::to_string(mass) +
                        "\nsolver.t_end = 0.3\nsolver.snapshot_stride = 5\n");
}

}  // namespace

TEST_CASE("write_file_atomic replaces the target and leaves no temporary") {
    const fs::path dir = scratch("atomic");
    write_file_atomic(dir / "a.txt", "one");
    write_file_atomic(dir / "a.txt", "two");
    CHECK(slurp(dir / "a.txt") == "two");
    int files = 0;
    for (const auto& e : fs::directory_iterator(dir)) files += e.is_regular_file();
    CHECK(files == 1);
}

TEST_CASE("scaled torsion profile hits the requested mass") {
    const ExperimentConfig c = small(0.7);
    const PreparedInitial p = prepare_initial(c);
    CHECK(integrate(p.recipe.u0) == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(integrate(p.init.u0eps) == doctest::Approx(0.7 + c.solver.epsilon).epsilon(1e-14));
    const Field noisy = scaled_torsion_profile(p.torsion, 0.7, 0.1, 9);
    CHECK(integrate(noisy) == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(noisy.values == scaled_torsion_profile(p.torsion, 0.7, 0.1, 9).values);
    CHECK(noisy.values != scaled_torsion_profile(p.torsion, 0.7, 0.1, 10).values);
}

TEST_CASE("run_experiment writes every artifact") {
    const fs::path out = scratch("run");
    ExperimentConfig c = small(0.5);
    c.name = "decay";
    const ExperimentResult r = run_experiment(c, out);
    CHECK_MESSAGE(r.exit_code == 0, r.message);
    for (const char* f : {"trace.csv", "snapshots.ndjson", "diagnostics.csv", "initdata_report.csv", "summary.json"})
        CHECK_MESSAGE(fs::exists(out / "decay" / f), f);
    CHECK_FALSE(fs::exists(out / "decay" / "blowup.csv"));
    const auto summary = nlohmann::json::parse(slurp(out / "decay" / "summary.json"));
    CHECK(summary["outcome"] == "RanToEnd");
    CHECK(summary["initdata_method"] == "shifted");
    CHECK(summary["t_max_estimate"].is_null());
    for (const auto& [k, v] : summary.items()) CHECK_MESSAGE(v.is_primitive(), k);
    CHECK(slurp(out / "decay" / "trace.csv").rfind(kTraceHeader, 0) == 0);
}

TEST_CASE("blow-up runs also write the blow-up report") {
    const fs::path out = scratch("blowup");
    ExperimentConfig c = small(1.5);
    c.solver.dt_max = 2e-5;
    c.solver.snapshot_stride = 1;
    c.name = "up";
    const ExperimentResult r = run_experiment(c, out);
    CHECK(r.outcome == Outcome::BlowUp);
    const std::string csv = slurp(out / "up" / "blowup.csv");
    CHECK(csv.rfind("metric,value\nt_max_estimate,", 0) == 0);
    CHECK(csv.find("blowup_set_fraction,") != std::string::npos);
}

TEST_CASE("module errors map to exit code 1") {
    const fs::path out = scratch("error");
    ExperimentConfig c = small(0.5);
    c.init.method = "compatible";
    c.init.mass = 1.5;  // the quadratic has no real root at this collar width
    const ExperimentResult r = run_experiment(c, out);
    CHECK(r.exit_code == 1);
    CHECK(r.message.find("no real root") != std::string::npos);
}

TEST_CASE("failed diagnostics map to exit code 2") {
    const fs::path out = scratch("fail");
    ExperimentConfig c = small(0.5);
    c.diagnostics.checks = {"phi_norm"};
    c.diagnostics.options.phi_norm_tol = -0.9;  // impossible bound
    CHECK(run_experiment(c, out).exit_code == 2);
}

TEST_CASE("sweep output is independent of parallelism") {
    const fs::path a = scratch("sweep_a"), b = scratch("sweep_b");
    SweepSpec s;
    s.base = small(1.0);
    s.base.name = "sw";
    s.axis = "initial_mass";
    s.values = {0.5, 0.8, 1.2};
    s.parallelism = 1;
    const SweepResult ra = run_sweep(s, a);
    s.parallelism = 3;
    const SweepResult rb = run_sweep(s, b);
    REQUIRE(ra.rows.size() == 3u);
    CHECK(ra.rows[2].outcome == rb.rows[2].outcome);
    CHECK(slurp(a / "sw" / "sweep_summary.csv") == slurp(b / "sw" / "sweep_summary.csv"));
    for (const char* d : {"initial_mass_0.5", "initial_mass_0.8", "initial_mass_1.2"})
        CHECK(slurp(a / "sw" / d / "trace.csv") == slurp(b / "sw" / d / "trace.csv"));
    CHECK(slurp(a / "sw" / "sweep_summary.csv").rfind("axis_value,outcome,t_max_estimate,max_mass_ode_residual\n", 0) == 0);
}

TEST_CASE("epsilon sweep writes pairwise distances") {
    const fs::path out = scratch("eps");
    SweepSpec s;
    s.base = small(1.0);
    s.base.name = "eps";
    s.base.diagnostics.enabled = false;
    s.axis = "epsilon";
    s.values = {1e-2, 1e-3};
    const SweepResult r = run_sweep(s, out);
    REQUIRE(r.pairwise_l2.size() == 1u);
    CHECK(std::isfinite(r.pairwise_l2[0]));
    CHECK(fs::exists(out / "eps" / "pairwise_l2.csv"));
}

TEST_CASE("initdata and replicator entry points") {
    const fs::path out = scratch("entry");
    ExperimentConfig c = parse_config("grid.n = 201\ninit.mass = 0.25\noutput.name = init\n");
    std::string msg;
    CHECK_MESSAGE(run_initdata(c, out, &msg) == 0, msg);
    CHECK(slurp(out / "init" / "initdata_report.csv").rfind("property,measured,threshold,pass\n", 0) == 0);
    CHECK(fs::exists(out / "init" / "u0eps.ndjson"));

    c = parse_config("replicator.game = coordination\nreplicator.p0 = 0.6 0.4\nreplicator.t_end = 1\noutput.name = rep\n");
    CHECK(run_replicator(c, out, &msg) == 0);
    CHECK(slurp(out / "rep" / "replicator_trace.csv").rfind("t,p_1,p_2\n", 0) == 0);

    c = parse_config("replicator.game = kernel\nreplicator.m = 80\nreplicator.sigma = 0.05\nreplicator.t_end = 0.1\n"
                     "output.name = wide\n");
    CHECK(run_replicator(c, out, &msg) == 0);
    CHECK(fs::exists(out / "wide" / "replicator_trace.ndjson"));
}

TEST_CASE("output root honours REPLIDYN_OUT") {
    ExperimentConfig c;
    c.output_dir = "here";
    ::unsetenv("REPLIDYN_OUT");
    CHECK(output_root(c) == fs::path("here"));
    ::setenv("REPLIDYN_OUT", "/tmp/elsewhere", 1);
    CHECK(output_root(c) == fs::path("/tmp/elsewhere"));
    ::unsetenv("REPLIDYN_OUT");
}

TEST_CASE("summary JSON maps non-finite numbers to null") {
    CHECK(json_number(std::nan("")) == "null");
    CHECK(json_number(0.5) == "0.5");
    const std::string s = summary_json({{"a", "1"}, {"b", "\"x\""}});
    CHECK(nlohmann::json::parse(s)["b"] == "x");
}
