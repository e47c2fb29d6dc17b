#include "replidyn/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "replidyn/error.hpp"

namespace replidyn {

namespace {

struct Entry {
    std::string key;
    std::string value;
    int line = 0;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<Entry> split_lines(const std::string& text) {
    std::vector<Entry> out;
    std::map<std::string, int> seen;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error("line " + std::to_string(lineno) + ": expected 'key = value'");
        Entry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno};
        if (e.key.empty()) throw Error("line " + std::to_string(lineno) + ": empty key");
        if (e.value.empty())
            throw Error("line " + std::to_string(lineno) + ": key '" + e.key + "' has an empty value");
        if (auto it = seen.find(e.key); it != seen.end())
            throw Error("line " + std::to_string(lineno) + ": key '" + e.key + "' repeats line " +
                        std::to_string(it->second));
        seen[e.key] = lineno;
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<std::string> tokens(const std::string& v) {
    std::string s = v;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

double to_double(const std::string& s) {
    double v = 0.0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw Error("expected a number, got '" + s + "'");
    if (!std::isfinite(v)) throw Error("value must be finite");
    return v;
}

long long to_integer(const std::string& s) {
    long long v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw Error("expected an integer, got '" + s + "'");
    return v;
}

std::uint64_t to_u64(const std::string& s) {
    std::uint64_t v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw Error("expected a nonnegative integer, got '" + s + "'");
    return v;
}

bool to_bool(const std::string& s) {
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    throw Error("expected a boolean, got '" + s + "'");
}

std::string to_string_value(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

double single_double(const std::string& v) {
    const auto t = tokens(v);
    if (t.size() != 1) throw Error("expected a single number");
    return to_double(t[0]);
}

int single_int(const std::string& v) {
    const auto t = tokens(v);
    if (t.size() != 1) throw Error("expected a single integer");
    const long long x = to_integer(t[0]);
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) throw Error("integer out of range");
    return static_cast<int>(x);
}

double positive(double x) {
    if (!(x > 0.0)) throw Error("must be positive");
    return x;
}

double nonnegative(double x) {
    if (!(x >= 0.0)) throw Error("must be nonnegative");
    return x;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> m;
        m["grid.dimension"] = [](ExperimentConfig& c, const std::string& v) {
            c.grid.dimension = single_int(v);
            if (c.grid.dimension != 1 && c.grid.dimension != 2) throw Error("must be 1 or 2");
        };
        m["grid.extents"] = [](ExperimentConfig& c, const std::string& v) {
            c.grid.extents.clear();
            for (const auto& t : tokens(v)) c.grid.extents.push_back(positive(to_double(t)));
            if (c.grid.extents.empty() || c.grid.extents.size() > 2) throw Error("expected 1 or 2 lengths");
        };
        m["grid.n"] = [](ExperimentConfig& c, const std::string& v) {
            c.grid.n.clear();
            for (const auto& t : tokens(v)) {
                const long long x = to_integer(t);
                if (x < 3 || x > 1'000'000) throw Error("node counts must lie in [3, 1e6]");
                c.grid.n.push_back(static_cast<int>(x));
            }
            if (c.grid.n.empty() || c.grid.n.size() > 2) throw Error("expected 1 or 2 node counts");
        };
        m["init.method"] = [](ExperimentConfig& c, const std::string& v) {
            c.init.method = to_string_value(v);
            if (c.init.method != "shifted" && c.init.method != "compatible")
                throw Error("expected 'shifted' or 'compatible'");
        };
        m["init.mass"] = [](ExperimentConfig& c, const std::string& v) { c.init.mass = positive(single_double(v)); };
        m["init.noise"] = [](ExperimentConfig& c, const std::string& v) {
            c.init.noise = nonnegative(single_double(v));
            if (c.init.noise >= 0.5) throw Error("must be below 0.5");
        };
        m["init.mollify_radius"] = [](ExperimentConfig& c, const std::string& v) {
            c.init.mollify_radius = positive(single_double(v));
        };
        m["init.margin_theta"] = [](ExperimentConfig& c, const std::string& v) {
            c.init.margin_theta = positive(single_double(v));
        };
        m["init.margin_rho"] = [](ExperimentConfig& c, const std::string& v) {
            c.init.margin_rho = positive(single_double(v));
        };
        m["init.L"] = [](ExperimentConfig& c, const std::string& v) { c.init.L = positive(single_double(v)); };

        m["solver.epsilon"] = [](ExperimentConfig& c, const std::string& v) {
            c.solver.epsilon = positive(single_double(v));
            if (c.solver.epsilon >= 1.0) throw Error("must lie in (0,1)");
        };
        m["solver.dt_init"] = [](ExperimentConfig& c, const std::string& v) { c.solver.dt_init = positive(single_double(v)); };
        m["solver.dt_min"] = [](ExperimentConfig& c, const std::string& v) { c.solver.dt_min = positive(single_double(v)); };
        m["solver.dt_max"] = [](ExperimentConfig& c, const std::string& v) { c.solver.dt_max = positive(single_double(v)); };
        m["solver.cfl_c"] = [](ExperimentConfig& c, const std::string& v) {
            c.solver.cfl_c = positive(single_double(v));
            if (c.solver.cfl_c > 1.0) throw Error("must lie in (0,1]");
        };
        m["solver.t_end"] = [](ExperimentConfig& c, const std::string& v) { c.solver.t_end = positive(single_double(v)); };
        m["solver.sup_cap"] = [](ExperimentConfig& c, const std::string& v) { c.solver.sup_cap = nonnegative(single_double(v)); };
        m["solver.sup_cap_factor"] = [](ExperimentConfig& c, const std::string& v) {
            c.solver.sup_cap_factor = single_double(v);
            if (!(c.solver.sup_cap_factor > 1.0)) throw Error("must exceed 1");
        };
        m["solver.scheme"] = [](ExperimentConfig& c, const std::string& v) {
            c.solver.scheme = parse_scheme(to_string_value(v));
        };
        m["solver.snapshot_stride"] = [](ExperimentConfig& c, const std::string& v) {
            c.solver.snapshot_stride = single_int(v);
            if (c.solver.snapshot_stride < 1) throw Error("must be >= 1");
        };
        m["solver.trace_stride"] = [](ExperimentConfig& c, const std::string& v) {
            c.solver.trace_stride = single_int(v);
            if (c.solver.trace_stride < 1) throw Error("must be >= 1");
        };
        m["solver.decay_threshold"] = [](ExperimentConfig& c, const std::string& v) {
            c.solver.decay_threshold = positive(single_double(v));
            if (c.solver.decay_threshold >= 1.0) throw Error("must lie in (0,1)");
        };
        m["solver.stop_on_saturation"] = [](ExperimentConfig& c, const std::string& v) {
            c.solver.stop_on_saturation = to_bool(v);
        };
        m["solver.linear_tol"] = [](ExperimentConfig& c, const std::string& v) {
            c.solver.linear_tol = positive(single_double(v));
        };

        m["diagnostics.enabled"] = [](ExperimentConfig& c, const std::string& v) { c.diagnostics.enabled = to_bool(v); };
        m["diagnostics.checks"] = [](ExperimentConfig& c, const std::string& v) {
            c.diagnostics.checks = tokens(v);
            for (const auto& n : c.diagnostics.checks)
                if (std::find(check_names().begin(), check_names().end(), n) == check_names().end())
                    throw Error("unknown check '" + n + "'");
        };
        m["diagnostics.subdomain_margin"] = [](ExperimentConfig& c, const std::string& v) {
            c.diagnostics.options.subdomain_margin = positive(single_double(v));
        };
        m["diagnostics.concentration_q"] = [](ExperimentConfig& c, const std::string& v) {
            c.diagnostics.options.concentration_q = positive(single_double(v));
            if (c.diagnostics.options.concentration_q >= 1.0) throw Error("must lie in (0,1)");
        };
        m["diagnostics.concentration_margin"] = [](ExperimentConfig& c, const std::string& v) {
            c.diagnostics.options.concentration_margin = positive(single_double(v));
        };
        m["diagnostics.mass_residual_tol"] = [](ExperimentConfig& c, const std::string& v) {
            c.diagnostics.options.mass_residual_tol = positive(single_double(v));
        };
        m["diagnostics.h_identity_tol"] = [](ExperimentConfig& c, const std::string& v) {
            c.diagnostics.options.h_identity_tol = positive(single_double(v));
        };
        m["diagnostics.gradient_tol"] = [](ExperimentConfig& c, const std::string& v) {
            c.diagnostics.options.gradient_tol = nonnegative(single_double(v));
        };
        m["diagnostics.phi_norm_tol"] = [](ExperimentConfig& c, const std::string& v) {
            c.diagnostics.options.phi_norm_tol = nonnegative(single_double(v));
        };
        m["diagnostics.weak_form_tol"] = [](ExperimentConfig& c, const std::string& v) {
            c.diagnostics.options.weak_form_tol = positive(single_double(v));
        };
        m["diagnostics.poincare_slack"] = [](ExperimentConfig& c, const std::string& v) {
            c.diagnostics.options.poincare_slack = nonnegative(single_double(v));
            if (c.diagnostics.options.poincare_slack >= 1.0) throw Error("must lie in [0,1)");
        };

        m["blowup.growth_threshold"] = [](ExperimentConfig& c, const std::string& v) {
            c.blowup.growth_threshold = single_double(v);
            if (!(c.blowup.growth_threshold > 1.0)) throw Error("must exceed 1");
        };
        m["blowup.core_margin"] = [](ExperimentConfig& c, const std::string& v) {
            c.blowup.core_margin = positive(single_double(v));
        };

        m["replicator.game"] = [](ExperimentConfig& c, const std::string& v) {
            const std::string g = to_string_value(v);
            if (g != "coordination" && g != "identity" && g != "constant" && g != "kernel")
                throw Error("expected coordination, identity, constant or kernel");
            c.replicator.game = g;
        };
        m["replicator.m"] = [](ExperimentConfig& c, const std::string& v) {
            c.replicator.m = single_int(v);
            if (c.replicator.m < 1) throw Error("must be >= 1");
        };
        m["replicator.sigma"] = [](ExperimentConfig& c, const std::string& v) {
            c.replicator.sigma = positive(single_double(v));
        };
        m["replicator.payoff_shift"] = [](ExperimentConfig& c, const std::string& v) {
            c.replicator.payoff_shift = single_double(v);
        };
        m["replicator.p0"] = [](ExperimentConfig& c, const std::string& v) {
            c.replicator.p0.clear();
            for (const auto& t : tokens(v)) c.replicator.p0.push_back(nonnegative(to_double(t)));
        };
        m["replicator.t_end"] = [](ExperimentConfig& c, const std::string& v) {
            c.replicator.t_end = nonnegative(single_double(v));
        };
        m["replicator.dt"] = [](ExperimentConfig& c, const std::string& v) { c.replicator.dt = positive(single_double(v)); };
        m["replicator.record_stride"] = [](ExperimentConfig& c, const std::string& v) {
            c.replicator.record_stride = single_int(v);
            if (c.replicator.record_stride < 1) throw Error("must be >= 1");
        };

        m["output.dir"] = [](ExperimentConfig& c, const std::string& v) { c.output_dir = to_string_value(v); };
        m["output.name"] = [](ExperimentConfig& c, const std::string& v) {
            c.name = to_string_value(v);
            if (c.name.find('/') != std::string::npos || c.name == "." || c.name == "..")
                throw Error("must be a plain directory name");
        };
        m["seed"] = [](ExperimentConfig& c, const std::string& v) { c.seed = to_u64(trim(v)); };
        return m;
    }();
    return table;
}

[[noreturn]] void key_error(const std::string& key, int line, const std::string& msg) {
    if (line > 0) throw Error("line " + std::to_string(line) + ": key '" + key + "': " + msg);
    throw Error("key '" + key + "': " + msg);
}

void validate_config(ExperimentConfig& c, const std::map<std::string, int>& lines) {
    auto line_of = [&](const std::string& k) {
        auto it = lines.find(k);
        return it == lines.end() ? 0 : it->second;
    };
    const int d = c.grid.dimension;
    if (c.grid.n.size() == 1 && d == 2) c.grid.n.push_back(c.grid.n[0]);
    if (c.grid.extents.size() == 1 && d == 2) c.grid.extents.push_back(c.grid.extents[0]);
    if (static_cast<int>(c.grid.n.size()) != d)
        key_error("grid.n", line_of("grid.n"), "expected " + std::to_string(d) + " node count(s)");
    if (static_cast<int>(c.grid.extents.size()) != d)
        key_error("grid.extents", line_of("grid.extents"), "expected " + std::to_string(d) + " length(s)");

    const SolverParams& p = c.solver;
    if (!(p.dt_min <= p.dt_init)) key_error("solver.dt_init", line_of("solver.dt_init"), "must be >= solver.dt_min");
    if (!(p.dt_init <= p.dt_max)) key_error("solver.dt_max", line_of("solver.dt_max"), "must be >= solver.dt_init");
    if (p.sup_cap != 0.0 && !(p.sup_cap > p.epsilon))
        key_error("solver.sup_cap", line_of("solver.sup_cap"), "must exceed solver.epsilon");
    if (c.init.margin_theta && c.init.margin_rho && !(*c.init.margin_theta > *c.init.margin_rho))
        key_error("init.margin_theta", line_of("init.margin_theta"), "must exceed init.margin_rho");
    if (!c.replicator.p0.empty() && static_cast<int>(c.replicator.p0.size()) != c.replicator.m)
        key_error("replicator.p0", line_of("replicator.p0"), "needs replicator.m entries");
    try {
        validate(c.solver);
    } catch (const Error& e) {
        throw Error(std::string("solver section: ") + e.what());
    }
}

ExperimentConfig parse_entries(const std::vector<Entry>& entries, const std::vector<std::string>& skip) {
    ExperimentConfig c;
    std::map<std::string, int> lines;
    for (const auto& e : entries) {
        if (std::find(skip.begin(), skip.end(), e.key) != skip.end()) continue;
        const auto& table = setters();
        auto it = table.find(e.key);
        if (it == table.end()) key_error(e.key, e.line, "unknown key");
        try {
            it->second(c, e.value);
        } catch (const Error& err) {
            key_error(e.key, e.line, err.what());
        }
        lines[e.key] = e.line;
    }
    validate_config(c, lines);
    return c;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) { return parse_entries(split_lines(text), {}); }

const std::vector<std::string>& sweep_axes() {
    static const std::vector<std::string> axes{"initial_mass", "epsilon", "n", "dt_init", "margin"};
    return axes;
}

SweepSpec parse_sweep(const std::string& text) {
    const std::vector<Entry> entries = split_lines(text);
    static const std::vector<std::string> sweep_keys{"sweep.axis", "sweep.values", "sweep.parallelism"};
    SweepSpec spec;
    spec.base = parse_entries(entries, sweep_keys);
    bool has_axis = false, has_values = false;
    for (const auto& e : entries) {
        try {
            if (e.key == "sweep.axis") {
                spec.axis = to_string_value(e.value);
                if (std::find(sweep_axes().begin(), sweep_axes().end(), spec.axis) == sweep_axes().end())
                    throw Error("expected one of initial_mass, epsilon, n, dt_init, margin");
                has_axis = true;
            } else if (e.key == "sweep.values") {
                for (const auto& t : tokens(e.value)) spec.values.push_back(to_double(t));
                has_values = true;
            } else if (e.key == "sweep.parallelism") {
                spec.parallelism = single_int(e.value);
                if (spec.parallelism < 1) throw Error("must be >= 1");
            }
        } catch (const Error& err) {
            key_error(e.key, e.line, err.what());
        }
    }
    if (!has_axis) key_error("sweep.axis", 0, "missing");
    if (!has_values || spec.values.empty()) key_error("sweep.values", 0, "values list must be nonempty");
    for (double v : spec.values) (void)apply_axis(spec.base, spec.axis, v);
    return spec;
}

ExperimentConfig apply_axis(const ExperimentConfig& base, const std::string& axis, double value) {
    ExperimentConfig c = base;
    auto fail = [&](const std::string& m) { throw Error("sweep axis " + axis + ": " + m); };
    if (axis == "initial_mass") {
        if (!(value > 0.0)) fail("mass must be positive");
        c.init.mass = value;
    } else if (axis == "epsilon") {
        if (!(value > 0.0 && value < 1.0)) fail("epsilon must lie in (0,1)");
        c.solver.epsilon = value;
    } else if (axis == "n") {
        if (value < 3 || value != std::floor(value)) fail("n must be an integer >= 3");
        for (auto& n : c.grid.n) n = static_cast<int>(value);
    } else if (axis == "dt_init") {
        if (!(value >= c.solver.dt_min && value <= c.solver.dt_max)) fail("dt_init must lie in [dt_min, dt_max]");
        c.solver.dt_init = value;
    } else if (axis == "margin") {
        if (!(value > 0.0)) fail("margin must be positive");
        c.diagnostics.options.subdomain_margin = value;
    } else {
        fail("unknown axis");
    }
    return c;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace replidyn
