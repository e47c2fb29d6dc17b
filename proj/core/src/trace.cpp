#include "replidyn/trace.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "replidyn/error.hpp"

namespace replidyn {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
    os << kTraceHeader << '\n';
    for (const auto& r : trace.rows) {
        os << format_double(r.t) << ',' << format_double(r.dt) << ',' << format_double(r.mass) << ','
           << format_double(r.dirichlet_energy) << ',' << format_double(r.sup_norm) << ','
           << format_double(r.phi_norm) << ',' << format_double(r.rho_eps_value) << ',' << r.floored_nodes << '\n';
    }
}

std::string trace_to_csv(const Trace& trace) {
    std::ostringstream os;
    write_trace_csv(os, trace);
    return os.str();
}

namespace {
double parse_double(const std::string& s, std::size_t line) {
    if (s == "nan") return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw Error("trace line " + std::to_string(line) + ": cannot parse '" + s + "'");
    return v;
}
}  // namespace

Trace read_trace_csv(std::istream& is) {
    Trace trace;
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(is, line)) throw Error("empty trace file");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTraceHeader) throw Error("unexpected trace header: " + line);
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
        if (cols.size() != 8) throw Error("trace line " + std::to_string(lineno) + ": expected 8 columns");
        TraceRow r;
        r.t = parse_double(cols[0], lineno);
        r.dt = parse_double(cols[1], lineno);
        r.mass = parse_double(cols[2], lineno);
        r.dirichlet_energy = parse_double(cols[3], lineno);
        r.sup_norm = parse_double(cols[4], lineno);
        r.phi_norm = parse_double(cols[5], lineno);
        r.rho_eps_value = parse_double(cols[6], lineno);
        r.floored_nodes = std::stoll(cols[7]);
        trace.rows.push_back(r);
    }
    return trace;
}

Trace read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open trace file " + path.string());
    return read_trace_csv(in);
}

}  // namespace replidyn
