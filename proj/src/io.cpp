// SPDX-License-Identifier: Apache-2.0
#include "frl/io.hpp"

#include <bit>
#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "frl/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "ensemble container assumes a little-endian host");

namespace frl {

namespace {

constexpr char kMagic[4] = {'F', 'R', 'L', 'P'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& s, std::uint32_t v) {
    s.append(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_u64(std::string& s, std::uint64_t v) {
    s.append(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_f64(std::string& s, double v) {
    s.append(reinterpret_cast<const char*>(&v), sizeof v);
}

class Cursor {
public:
    Cursor(const std::string& buf, std::string path)
        : buf_(buf), path_(std::move(path)) {}

    std::uint32_t u32() { return get<std::uint32_t>(); }
    std::uint64_t u64() { return get<std::uint64_t>(); }
    double f64() { return get<double>(); }

    void raw(void* dst, std::size_t n) {
        if (pos_ + n > buf_.size())
            throw ValidationError("truncated ensemble file: " + path_);
        std::memcpy(dst, buf_.data() + pos_, n);
        pos_ += n;
    }

    std::size_t remaining() const { return buf_.size() - pos_; }

private:
    template <class T>
    T get() {
        T v;
        raw(&v, sizeof v);
        return v;
    }

    const std::string& buf_;
    std::string path_;
    std::size_t pos_ = 0;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void atomic_write_bytes(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot open file for writing: " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw ValidationError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw ValidationError("cannot rename temporary file onto: " + path);
    }
}

std::string format_f64(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void save_ensemble(const PathEnsemble& ens, const std::string& path) {
    const KernelSpec& spec = ens.spec();
    const Grid& grid = ens.grid();

    std::string out;
    out.reserve(128 + ens.n_samples() * ens.n_points() *
                          static_cast<std::size_t>(ens.dim()) * sizeof(double));
    out.append(kMagic, sizeof kMagic);
    put_u32(out, kVersion);
    put_u32(out, spec.geom.type == GeometryType::Circle ? 0u : 1u);
    put_u32(out, static_cast<std::uint32_t>(spec.dim));
    put_f64(out, spec.hurst);
    put_u64(out, ens.n_samples());
    put_u64(out, ens.n_points());
    put_u64(out, ens.seed.master_seed);
    put_u64(out, ens.first_index);
    put_u32(out, static_cast<std::uint32_t>(grid.n_per_branch));
    if (spec.geom.type == GeometryType::Circle) {
        put_u32(out, 0u);
        put_f64(out, spec.geom.T);
    } else {
        put_u32(out, static_cast<std::uint32_t>(spec.geom.lengths.size()));
        for (double L : spec.geom.lengths) put_f64(out, L);
    }
    for (std::size_t s = 0; s < ens.n_samples(); ++s) {
        out.append(reinterpret_cast<const char*>(ens.path(s)),
                   ens.n_points() * static_cast<std::size_t>(ens.dim()) *
                       sizeof(double));
    }
    atomic_write_bytes(path, out);
}

PathEnsemble load_ensemble(const std::string& path) {
    const std::string buf = read_file(path);
    Cursor c(buf, path);

    char magic[4];
    c.raw(magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw ValidationError("not an ensemble file (bad magic): " + path);
    const std::uint32_t version = c.u32();
    if (version != kVersion)
        throw ValidationError("unsupported ensemble file version " +
                              std::to_string(version) + ": " + path);

    const std::uint32_t geom_type = c.u32();
    const auto dim = static_cast<int>(c.u32());
    const double hurst = c.f64();
    const std::uint64_t n_samples = c.u64();
    const std::uint64_t n_points = c.u64();
    const std::uint64_t seed = c.u64();
    const std::uint64_t first_index = c.u64();
    const auto n_per_branch = static_cast<int>(c.u32());
    const std::uint32_t n_lengths = c.u32();

    Geometry geom;
    Grid grid;
    if (geom_type == 0u) {
        if (n_lengths != 0)
            throw ValidationError("malformed ensemble header: " + path);
        geom = Geometry::circle(c.f64());
        grid = Grid::circle_uniform(geom.T, n_per_branch);
    } else if (geom_type == 1u) {
        std::vector<double> lengths(n_lengths);
        for (auto& L : lengths) L = c.f64();
        geom = Geometry::star(lengths);
        grid = Grid::star_uniform(lengths, n_per_branch);
    } else {
        throw ValidationError("malformed ensemble header: " + path);
    }
    if (grid.size() != n_points)
        throw ValidationError("ensemble header is inconsistent with its grid: " +
                              path);

    KernelSpec spec(geom, hurst, dim);
    PathEnsemble ens(spec, grid, n_samples);
    ens.seed.master_seed = seed;
    ens.first_index = first_index;
    const std::size_t payload =
        n_points * static_cast<std::size_t>(dim) * sizeof(double);
    for (std::uint64_t s = 0; s < n_samples; ++s) c.raw(ens.path(s), payload);
    if (c.remaining() != 0)
        throw ValidationError("trailing bytes after ensemble payload: " + path);
    return ens;
}

void save_ensemble_csv(const PathEnsemble& ens, const std::string& path,
                       const std::string& comment) {
    const Grid& grid = ens.grid();
    const int d = ens.dim();

    std::string out;
    if (!comment.empty()) {
        out += "# ";
        for (char c : comment) out += (c == '\n' ? ' ' : c);
        out += '\n';
    }
    out += "sample_id,branch,t";
    for (int k = 1; k <= d; ++k) out += ",x_" + std::to_string(k);
    out += "\n";
    for (std::size_t s = 0; s < ens.n_samples(); ++s) {
        for (std::size_t p = 0; p < ens.n_points(); ++p) {
            out += std::to_string(s);
            out += ',';
            out += std::to_string(grid.points[p].branch);
            out += ',';
            out += format_f64(grid.points[p].t);
            for (int k = 0; k < d; ++k) {
                out += ',';
                out += format_f64(ens.value(s, p, k));
            }
            out += '\n';
        }
    }
    atomic_write_bytes(path, out);
}

PathEnsemble load_ensemble_csv(const std::string& path, const KernelSpec& spec,
                               int grid_n) {
    const std::string buf = read_file(path);

    Grid grid = spec.geom.type == GeometryType::Circle
                    ? Grid::circle_uniform(spec.geom.T, grid_n)
                    : Grid::star_uniform(spec.geom.lengths, grid_n);
    const int d = spec.dim;

    std::istringstream in(buf);
    std::string line;
    do {
        if (!std::getline(in, line))
            throw ValidationError("empty CSV file: " + path);
    } while (line.empty() || line[0] == '#');

    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != 3 + static_cast<std::size_t>(d))
            throw ValidationError("CSV row has the wrong column count: " + path);
        const std::size_t p = rows % grid.size();
        const int branch = std::stoi(cells[1]);
        const double t = std::stod(cells[2]);
        if (branch != grid.points[p].branch ||
            std::abs(t - grid.points[p].t) > 1e-9 * (1.0 + std::abs(t)))
            throw ValidationError("CSV rows do not follow a uniform grid of the "
                                  "given geometry: " + path);
        for (int k = 0; k < d; ++k) values.push_back(std::stod(cells[3 + k]));
        ++rows;
    }
    if (rows == 0 || rows % grid.size() != 0)
        throw ValidationError("CSV row count is not a whole number of samples: " +
                              path);

    PathEnsemble ens(spec, grid, rows / grid.size());
    std::size_t off = 0;
    for (std::size_t s = 0; s < ens.n_samples(); ++s) {
        double* dst = ens.path(s);
        for (std::size_t p = 0; p < ens.n_points(); ++p)
            for (int k = 0; k < d; ++k) dst[p * d + k] = values[off++];
    }
    return ens;
}

void atomic_write_text(const std::string& path, const std::string& content) {
    atomic_write_bytes(path, content);
}

nlohmann::json kernel_spec_to_json(const KernelSpec& spec) {
    nlohmann::json g;
    if (spec.geom.type == GeometryType::Circle) {
        g["type"] = "circle";
        g["T"] = spec.geom.T;
    } else {
        g["type"] = "star";
        g["lengths"] = spec.geom.lengths;
    }
    return {{"geometry", g}, {"hurst", spec.hurst}, {"dim", spec.dim}};
}

KernelSpec kernel_spec_from_json(const nlohmann::json& j) {
    const auto& g = j.at("geometry");
    const std::string type = g.at("type").get<std::string>();
    Geometry geom;
    if (type == "circle") {
        geom = Geometry::circle(g.at("T").get<double>());
    } else if (type == "star") {
        geom = Geometry::star(g.at("lengths").get<std::vector<double>>());
    } else {
        throw ValidationError("unknown geometry type: " + type);
    }
    return KernelSpec(geom, j.at("hurst").get<double>(),
                      j.at("dim").get<int>());
}

nlohmann::json estimate_to_json(const LocalTimeEstimate& est,
                                const KernelSpec& spec,
                                const std::string& quantity) {
    nlohmann::json j;
    j["quantity"] = quantity;
    j["kernel"] = kernel_spec_to_json(spec);
    j["epsilon"] = est.epsilon;
    j["centered"] = est.centered;
    if (est.gap) j["gap"] = *est.gap;
    j["n_samples"] = est.per_path.size();
    j["grid_points"] = est.grid.size();
    j["mean"] = est.mean;
    j["std_error"] = est.std_error;
    return j;
}

void write_json(const std::string& path, const nlohmann::json& j) {
    atomic_write_text(path, j.dump(2) + "\n");
}

}  // namespace frl
