#include "singflow/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace singflow {

namespace {

constexpr char kMagic[4] = {'S', 'G', 'F', '1'};

template <class T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
        std::memcpy(&v, b, sizeof(T));
        return v;
    }
}

template <class T>
void put(std::ostream& out, T v) {
    v = to_little(v);
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in, const std::string& path) {
    T v;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw std::runtime_error("truncated snapshot " + path);
    return to_little(v);
}

}  // namespace

const Field& SnapshotFile::field(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return fields[i];
    throw std::out_of_range("snapshot has no field '" + name + "'");
}

void write_snapshot(const std::string& path, const SnapshotFile& snap) {
    if (snap.names.size() != snap.fields.size()) throw std::invalid_argument("field names and payloads differ");
    const std::size_t count = static_cast<std::size_t>(snap.n[0]) * snap.n[1] * snap.n[2];
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write snapshot " + path);
    out.write(kMagic, 4);
    put<std::uint32_t>(out, snap.version);
    for (auto v : snap.n) put<std::uint32_t>(out, v);
    put<double>(out, snap.L);
    put<double>(out, snap.alpha);
    put<double>(out, snap.t);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(snap.fields.size()));
    for (const auto& name : snap.names) {
        put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
    }
    for (const auto& f : snap.fields) {
        if (static_cast<std::size_t>(f.size()) != count) throw std::invalid_argument("field size does not match n^3");
        for (Eigen::Index q = 0; q < f.size(); ++q) put<double>(out, f[q]);
    }
    if (!out) throw std::runtime_error("failed writing snapshot " + path);
}

SnapshotFile read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read snapshot " + path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("bad magic in " + path);
    SnapshotFile s;
    s.version = get<std::uint32_t>(in, path);
    if (s.version != 1) throw std::runtime_error("unsupported snapshot version in " + path);
    for (auto& v : s.n) v = get<std::uint32_t>(in, path);
    s.L = get<double>(in, path);
    s.alpha = get<double>(in, path);
    s.t = get<double>(in, path);
    const auto count = get<std::uint32_t>(in, path);
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto len = get<std::uint32_t>(in, path);
        std::string name(len, '\0');
        if (!in.read(name.data(), len)) throw std::runtime_error("truncated snapshot " + path);
        s.names.push_back(std::move(name));
    }
    const std::size_t nodes = static_cast<std::size_t>(s.n[0]) * s.n[1] * s.n[2];
    for (std::uint32_t i = 0; i < count; ++i) {
        Field f(static_cast<Eigen::Index>(nodes));
        for (std::size_t q = 0; q < nodes; ++q) f[static_cast<Eigen::Index>(q)] = get<double>(in, path);
        s.fields.push_back(std::move(f));
    }
    if (in.peek() != std::char_traits<char>::eof()) throw std::runtime_error("trailing bytes in snapshot " + path);
    return s;
}

SnapshotFile snapshot_from_state(const TorusGrid& grid, double alpha, const FlowState& st) {
    SnapshotFile s;
    const auto n = static_cast<std::uint32_t>(grid.n());
    s.n[0] = s.n[1] = s.n[2] = n;
    s.L = grid.length();
    s.alpha = alpha;
    s.t = st.t;
    s.names = {"phi1", "phi2_dev", "phi2_mean", "dphi1_dt", "dphi2_dt"};
    s.fields = {st.phi1, st.phi2_dev, Field::Constant(grid.size(), st.phi2_mean), st.dphi1_dt, st.dphi2_dt};
    return s;
}

FlowState state_from_snapshot(const SnapshotFile& snap) {
    FlowState s;
    s.t = snap.t;
    s.phi1 = snap.field("phi1");
    s.phi2_dev = snap.field("phi2_dev");
    s.phi2_mean = snap.field("phi2_mean")[0];
    s.dphi1_dt = snap.field("dphi1_dt");
    s.dphi2_dt = snap.field("dphi2_dt");
    return s;
}

}  // namespace singflow
