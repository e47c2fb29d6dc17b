#include "replidyn/snapshot_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "replidyn/error.hpp"

namespace replidyn {

using nlohmann::json;

Snapshot make_snapshot(double t, const Field& f, std::optional<double> boundary_value,
                       std::optional<std::string> domain_tag) {
    Snapshot s;
    s.t = t;
    s.shape = f.grid->shape();
    s.values = f.values;
    s.extents.assign(f.grid->extents.begin(), f.grid->extents.begin() + f.grid->dimension);
    s.boundary_value = boundary_value;
    s.domain_tag = std::move(domain_tag);
    return s;
}

std::string to_ndjson(const Snapshot& s) {
    json j;
    j["t"] = s.t;
    j["shape"] = s.shape;
    j["values"] = s.values;
    if (!s.extents.empty()) j["extents"] = s.extents;
    if (s.boundary_value) j["boundary_value"] = *s.boundary_value;
    if (s.domain_tag) j["domain_tag"] = *s.domain_tag;
    return j.dump();
}

Snapshot snapshot_from_json(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw Error(std::string("malformed snapshot record: ") + e.what());
    }
    if (!j.contains("t") || !j.contains("shape") || !j.contains("values"))
        throw Error("snapshot record needs keys t, shape, values");
    Snapshot s;
    s.t = j.at("t").get<double>();
    s.shape = j.at("shape").get<std::vector<int>>();
    s.values = j.at("values").get<std::vector<double>>();
    if (j.contains("extents")) s.extents = j.at("extents").get<std::vector<double>>();
    if (j.contains("boundary_value")) s.boundary_value = j.at("boundary_value").get<double>();
    if (j.contains("domain_tag")) s.domain_tag = j.at("domain_tag").get<std::string>();

    std::size_t expected = 1;
    for (int n : s.shape) expected *= static_cast<std::size_t>(n);
    if (s.shape.empty() || expected != s.values.size())
        throw Error("snapshot shape does not match the number of values");
    return s;
}

void write_snapshots(std::ostream& os, const std::vector<Snapshot>& snaps) {
    for (const auto& s : snaps) os << to_ndjson(s) << '\n';
}

std::vector<Snapshot> read_snapshots(std::istream& is) {
    std::vector<Snapshot> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.push_back(snapshot_from_json(line));
    }
    return out;
}

std::vector<Snapshot> read_snapshots(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open snapshot file " + path.string());
    return read_snapshots(in);
}

GridPtr grid_from_snapshot(const Snapshot& s) {
    const int dim = static_cast<int>(s.shape.size());
    std::vector<double> ext = s.extents;
    if (ext.empty()) ext.assign(dim, 1.0);
    return build_grid(dim, ext, s.shape);
}

Field field_from_snapshot(const Snapshot& s, const GridPtr& grid) {
    if (grid->shape() != s.shape) throw Error("snapshot shape does not match grid");
    return Field(grid, s.values);
}

}  // namespace replidyn
