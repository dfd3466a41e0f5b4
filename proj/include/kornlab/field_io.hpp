#pragma once

// Grid-field files: one JSON header line
//   {"n": 256, "L": 20.0, "components": 2, "encoding": "csv"}
// followed by the samples of each component in turn, each component n x n
// row-major (index i*n + j, i along x1). "csv" writes one grid row per line,
// comma separated, full round-trip precision; "binary" writes raw
// little-endian float64.

#include <filesystem>
#include <string>
#include <vector>

#include "kornlab/gridfield.hpp"

namespace kornlab {

enum class FieldEncoding { Csv, Binary };

struct FieldFile {
  PeriodicGrid grid;
  std::vector<Samples> components;
};

void write_field(const std::filesystem::path& path, const FieldFile& field,
                 FieldEncoding encoding = FieldEncoding::Csv);
FieldFile read_field(const std::filesystem::path& path);

FieldFile to_file(const ScalarField& f);
FieldFile to_file(const VectorField2& f);
ScalarField scalar_from_file(const FieldFile& f);
VectorField2 vector_from_file(const FieldFile& f);

}  // namespace kornlab
