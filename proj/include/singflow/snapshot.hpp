#pragma once

#include "singflow/flow.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace singflow {

// Binary field file: "SGF1", u32 version, u32 n x3, f64 L, f64 alpha, f64 t, u32 field count,
// then per field a u32 name length and the name bytes, then per field n^3 little-endian f64 in
// node order (x3 fastest).
struct SnapshotFile {
    std::uint32_t version = 1;
    std::uint32_t n[3] = {0, 0, 0};
    double L = 1.0;
    double alpha = 1.5;
    double t = 0.0;
    std::vector<std::string> names;
    std::vector<Field> fields;

    const Field& field(const std::string& name) const;
};

void write_snapshot(const std::string& path, const SnapshotFile& snap);
SnapshotFile read_snapshot(const std::string& path);

SnapshotFile snapshot_from_state(const TorusGrid& grid, double alpha, const FlowState& s);
FlowState state_from_snapshot(const SnapshotFile& snap);

}  // namespace singflow
