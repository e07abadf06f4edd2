#pragma once

#include <filesystem>
#include <string>

#include "infotrans/grid.hpp"
#include "infotrans/matrix_transport.hpp"

namespace infotrans {

// All writers go through a temp file + rename, so a crash mid-write never
// leaves a partial file under the final name.

// 1-D interchange: two-column CSV "x,value", 17 significant digits.
void write_csv(const std::filesystem::path& path, const ScalarField& f);
ScalarField read_csv_field(const std::filesystem::path& path);

// 2-D raster: binary PGM (P5), 8 or 16 bit, with the affine transform kept in
// a header comment "# scale=<s> offset=<o>" so value = offset + scale * pixel.
void write_pgm(const std::filesystem::path& path, const ScalarField& f, int bits = 16);
ScalarField read_pgm(const std::filesystem::path& path);

// Raw little-endian float64, row-major, plus a JSON sidecar
// {"dim":..,"sizes":[..],"kind":"scalar"|"vector"|"displacement"}.
// Round-trips bit-exactly. Vector data is stored component-major.
void write_binary(const std::filesystem::path& path, const ScalarField& f);
void write_binary(const std::filesystem::path& path, const VectorField& v,
                  const std::string& kind = "vector");

struct FieldData {
    Grid grid;
    std::string kind;
    std::vector<double> data; // points() * components
};

FieldData read_binary(const std::filesystem::path& path);
ScalarField as_scalar(const FieldData& d);
VectorField as_vector(const FieldData& d);

// Matrices travel as plain CSV rows.
void write_matrix_csv(const std::filesystem::path& path, const Mat& m);
Mat read_matrix_csv(const std::filesystem::path& path);

// Reads a scalar field in whatever format the extension names
// (.csv, .pgm, .bin/.json).
ScalarField read_scalar_any(const std::filesystem::path& path);

} // namespace infotrans
