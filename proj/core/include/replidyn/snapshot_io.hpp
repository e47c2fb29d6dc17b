#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "replidyn/mesh.hpp"

namespace replidyn {

/// One NDJSON snapshot record:
///   {"t": .., "shape": [n...], "values": [...], optional extras}
/// Extras written by this library: "extents", "boundary_value", "domain_tag".
struct Snapshot {
    double t = 0.0;
    std::vector<int> shape;
    std::vector<double> values;
    std::vector<double> extents;
    std::optional<double> boundary_value;
    std::optional<std::string> domain_tag;
};

Snapshot make_snapshot(double t, const Field& f, std::optional<double> boundary_value = std::nullopt,
                       std::optional<std::string> domain_tag = std::nullopt);

/// Serializes one record (no trailing newline). Doubles round-trip exactly.
std::string to_ndjson(const Snapshot& s);
Snapshot snapshot_from_json(const std::string& line);

void write_snapshots(std::ostream& os, const std::vector<Snapshot>& snaps);
std::vector<Snapshot> read_snapshots(std::istream& is);
std::vector<Snapshot> read_snapshots(const std::filesystem::path& path);

/// Grid described by a snapshot; unit extents when the record carries none.
GridPtr grid_from_snapshot(const Snapshot& s);
Field field_from_snapshot(const Snapshot& s, const GridPtr& grid);

}  // namespace replidyn
