#include "infotrans/field_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace infotrans {
namespace {

void atomic_write(const fs::path& path, const std::string& bytes) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), std::streamsize(bytes.size()));
        if (!out) throw ValidationError("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw ValidationError("cannot move " + tmp.string() + " into place: " + ec.message());
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// doubles as little-endian bytes regardless of host order
void push_le(std::string& out, double v) {
    auto u = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) out.push_back(char((u >> (8 * b)) & 0xFF));
}

double pull_le(const char* p) {
    std::uint64_t u = 0;
    for (int b = 0; b < 8; ++b) u |= std::uint64_t(std::uint8_t(p[b])) << (8 * b);
    return std::bit_cast<double>(u);
}

fs::path sidecar_path(fs::path path) {
    path.replace_extension(".json");
    return path;
}

} // namespace

void write_csv(const fs::path& path, const ScalarField& f) {
    if (f.grid().dim != 1) throw WrongDimension("CSV export is for 1-D fields");
    std::string out = "x,value\n";
    int n = f.grid().sizes[0];
    for (int i = 0; i < n; ++i) {
        out += format_double(double(i) / n);
        out += ',';
        out += format_double(f[std::size_t(i)]);
        out += '\n';
    }
    atomic_write(path, out);
}

ScalarField read_csv_field(const fs::path& path) {
    std::istringstream in(slurp(path));
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(path.string() + " is empty");
    std::vector<double> vals;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ValidationError(path.string() + ": expected two comma-separated columns");
        vals.push_back(std::stod(line.substr(comma + 1)));
    }
    if (vals.size() < 8 || vals.size() % 2 != 0)
        throw ValidationError(path.string() + ": sample count must be even and at least 8");
    Grid g = make_grid(int(vals.size()));
    return ScalarField(g, std::move(vals));
}

void write_pgm(const fs::path& path, const ScalarField& f, int bits) {
    if (f.grid().dim != 2) throw WrongDimension("PGM export is for 2-D fields");
    if (bits != 8 && bits != 16) throw ValidationError("PGM depth must be 8 or 16 bits");
    if (!all_finite(f)) throw ValidationError("field has non-finite samples");

    double lo = f[0], hi = f[0];
    for (std::size_t i = 0; i < f.size(); ++i) {
        lo = std::min(lo, f[i]);
        hi = std::max(hi, f[i]);
    }
    unsigned maxval = bits == 8 ? 255u : 65535u;
    double scale = hi > lo ? (hi - lo) / maxval : 1.0;
    double offset = lo;

    std::string out = "P5\n# scale=" + format_double(scale) + " offset=" + format_double(offset) +
                      "\n" + std::to_string(f.grid().sizes[1]) + " " +
                      std::to_string(f.grid().sizes[0]) + "\n" + std::to_string(maxval) + "\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        double t = (f[i] - offset) / scale;
        long p = std::lround(std::clamp(t, 0.0, double(maxval)));
        if (bits == 16) out.push_back(char((p >> 8) & 0xFF)); // big-endian per the format
        out.push_back(char(p & 0xFF));
    }
    atomic_write(path, out);
}

ScalarField read_pgm(const fs::path& path) {
    std::string bytes = slurp(path);
    std::size_t pos = 0;
    double scale = 1.0, offset = 0.0;

    auto skip_ws = [&] {
        while (pos < bytes.size()) {
            if (std::isspace(std::uint8_t(bytes[pos]))) {
                ++pos;
            } else if (bytes[pos] == '#') {
                std::size_t eol = bytes.find('\n', pos);
                std::string comment = bytes.substr(pos + 1, eol - pos - 1);
                std::istringstream cs(comment);
                std::string tok;
                while (cs >> tok) {
                    if (tok.rfind("scale=", 0) == 0) scale = std::stod(tok.substr(6));
                    if (tok.rfind("offset=", 0) == 0) offset = std::stod(tok.substr(7));
                }
                pos = eol == std::string::npos ? bytes.size() : eol + 1;
            } else {
                break;
            }
        }
    };
    auto next_int = [&] {
        skip_ws();
        std::size_t start = pos;
        while (pos < bytes.size() && std::isdigit(std::uint8_t(bytes[pos]))) ++pos;
        if (start == pos) throw ValidationError(path.string() + ": malformed PGM header");
        return std::stol(bytes.substr(start, pos - start));
    };

    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
        throw ValidationError(path.string() + " is not a binary PGM");
    pos = 2;
    long width = next_int();
    long height = next_int();
    long maxval = next_int();
    if (maxval != 255 && maxval != 65535)
        throw ValidationError(path.string() + ": unsupported PGM depth");
    ++pos; // single whitespace byte after maxval

    Grid g = make_grid(int(height), int(width));
    ScalarField f(g);
    int bytes_per = maxval == 255 ? 1 : 2;
    if (bytes.size() - pos < std::size_t(width) * height * bytes_per)
        throw ValidationError(path.string() + ": truncated pixel data");
    for (std::size_t i = 0; i < f.size(); ++i) {
        unsigned long p;
        if (bytes_per == 1) {
            p = std::uint8_t(bytes[pos + i]);
        } else {
            p = (std::uint32_t(std::uint8_t(bytes[pos + 2 * i])) << 8) |
                std::uint8_t(bytes[pos + 2 * i + 1]);
        }
        f[i] = offset + scale * double(p);
    }
    return f;
}

namespace {

void write_binary_raw(const fs::path& path, const Grid& g, const std::string& kind,
                      const std::vector<const ScalarField*>& comps) {
    std::string out;
    out.reserve(comps.size() * g.points() * 8);
    for (const ScalarField* c : comps)
        for (std::size_t i = 0; i < c->size(); ++i) push_le(out, (*c)[i]);
    atomic_write(path, out);

    nlohmann::json side;
    side["dim"] = g.dim;
    side["sizes"] = g.dim == 1 ? std::vector<int>{g.sizes[0]}
                               : std::vector<int>{g.sizes[0], g.sizes[1]};
    side["kind"] = kind;
    atomic_write(sidecar_path(path), side.dump(2) + "\n");
}

} // namespace

void write_binary(const fs::path& path, const ScalarField& f) {
    write_binary_raw(path, f.grid(), "scalar", {&f});
}

void write_binary(const fs::path& path, const VectorField& v, const std::string& kind) {
    if (kind != "vector" && kind != "displacement")
        throw ValidationError("vector payload kind must be vector or displacement");
    std::vector<const ScalarField*> comps;
    for (int c = 0; c < v.components(); ++c) comps.push_back(&v[c]);
    write_binary_raw(path, v.grid(), kind, comps);
}

FieldData read_binary(const fs::path& path) {
    nlohmann::json side = nlohmann::json::parse(slurp(sidecar_path(path)));
    FieldData d;
    d.kind = side.at("kind").get<std::string>();
    int dim = side.at("dim").get<int>();
    auto sizes = side.at("sizes").get<std::vector<int>>();
    if (dim == 1 && sizes.size() == 1) {
        d.grid = make_grid(sizes[0]);
    } else if (dim == 2 && sizes.size() == 2) {
        d.grid = make_grid(sizes[0], sizes[1]);
    } else {
        throw ValidationError(path.string() + ": sidecar dim and sizes disagree");
    }
    int comps = d.kind == "scalar" ? 1 : d.grid.dim;

    std::string bytes = slurp(path);
    std::size_t expect = d.grid.points() * std::size_t(comps) * 8;
    if (bytes.size() != expect)
        throw ValidationError(path.string() + ": payload size does not match sidecar");
    d.data.resize(d.grid.points() * comps);
    for (std::size_t i = 0; i < d.data.size(); ++i) d.data[i] = pull_le(bytes.data() + 8 * i);
    return d;
}

ScalarField as_scalar(const FieldData& d) {
    if (d.kind != "scalar") throw ValidationError("payload holds vector data, not a scalar");
    return ScalarField(d.grid, d.data);
}

VectorField as_vector(const FieldData& d) {
    if (d.kind == "scalar") throw ValidationError("payload holds scalar data, not a vector");
    VectorField v(d.grid);
    std::size_t np = d.grid.points();
    for (int c = 0; c < d.grid.dim; ++c)
        std::copy_n(d.data.begin() + std::ptrdiff_t(c * np), np, v[c].values().begin());
    return v;
}

void write_matrix_csv(const fs::path& path, const Mat& m) {
    std::string out;
    for (int i = 0; i < m.n; ++i) {
        for (int j = 0; j < m.n; ++j) {
            if (j) out += ',';
            out += format_double(m(i, j));
        }
        out += '\n';
    }
    atomic_write(path, out);
}

Mat read_matrix_csv(const fs::path& path) {
    std::istringstream in(slurp(path));
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        rows.emplace_back();
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) rows.back().push_back(std::stod(cell));
    }
    if (rows.empty()) throw ValidationError(path.string() + " holds no matrix rows");
    int n = int(rows.size());
    Mat m(n);
    for (int i = 0; i < n; ++i) {
        if (int(rows[i].size()) != n)
            throw ValidationError(path.string() + ": matrix must be square");
        for (int j = 0; j < n; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

ScalarField read_scalar_any(const fs::path& path) {
    std::string ext = path.extension().string();
    if (ext == ".csv") return read_csv_field(path);
    if (ext == ".pgm") return read_pgm(path);
    if (ext == ".bin" || ext == ".json") {
        fs::path bin = path;
        bin.replace_extension(".bin");
        return as_scalar(read_binary(bin));
    }
    throw ValidationError("unrecognised field extension: " + ext);
}

} // namespace infotrans
