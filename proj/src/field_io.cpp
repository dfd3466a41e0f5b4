#include "kornlab/field_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "kornlab/errors.hpp"

namespace kornlab {

using nlohmann::json;

void write_field(const std::filesystem::path& path, const FieldFile& field, FieldEncoding encoding) {
  static_assert(std::endian::native == std::endian::little, "binary field files are little-endian");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot open " + path.string() + " for writing");
  const json header = {{"n", field.grid.n()},
                       {"L", field.grid.box_length()},
                       {"components", field.components.size()},
                       {"encoding", encoding == FieldEncoding::Csv ? "csv" : "binary"}};
  out << header.dump() << '\n';
  const int n = field.grid.n();
  for (const auto& c : field.components) {
    if (encoding == FieldEncoding::Binary) {
      out.write(reinterpret_cast<const char*>(c.data()), static_cast<std::streamsize>(c.size() * sizeof(double)));
      continue;
    }
    char buf[32];
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const auto res = std::to_chars(buf, buf + sizeof buf, c[field.grid.index(i, j)]);
        if (j) out << ',';
        out.write(buf, res.ptr - buf);
      }
      out << '\n';
    }
  }
  if (!out) throw InvalidInput("failed writing " + path.string());
}

FieldFile read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open field file " + path.string());
  std::string line;
  std::getline(in, line);
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw InvalidInput("field header is not JSON: " + std::string(e.what()));
  }
  for (const char* key : {"n", "L", "components"})
    if (!header.contains(key)) throw InvalidInput(std::string("field header lacks key '") + key + "'");
  const std::string enc = header.value("encoding", "csv");
  if (enc != "csv" && enc != "binary") throw InvalidInput("unknown field encoding '" + enc + "'");
  FieldFile f{PeriodicGrid(header["n"].get<int>(), header["L"].get<double>()), {}};
  const int ncomp = header["components"].get<int>();
  if (ncomp < 1 || ncomp > 4) throw InvalidInput("field must have 1 to 4 components");
  const int n = f.grid.n();
  for (int c = 0; c < ncomp; ++c) {
    Samples s(f.grid.size());
    if (enc == "binary") {
      in.read(reinterpret_cast<char*>(s.data()), static_cast<std::streamsize>(s.size() * sizeof(double)));
      if (!in) throw InvalidInput("field file truncated in component " + std::to_string(c));
    } else {
      for (int i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw InvalidInput("field file truncated at row " + std::to_string(i));
        const char* p = line.data();
        const char* end = p + line.size();
        for (int j = 0; j < n; ++j) {
          double v = 0;
          const auto res = std::from_chars(p, end, v);
          if (res.ec != std::errc()) throw InvalidInput("bad number in field row " + std::to_string(i));
          s[f.grid.index(i, j)] = v;
          p = res.ptr;
          if (j + 1 < n) {
            if (p == end || *p != ',') throw InvalidInput("field row " + std::to_string(i) + " too short");
            ++p;
          }
        }
      }
    }
    for (double v : s)
      if (!std::isfinite(v)) throw InvalidInput("field contains non-finite samples");
    f.components.push_back(std::move(s));
  }
  return f;
}

FieldFile to_file(const ScalarField& f) { return {f.grid, {f.values}}; }
FieldFile to_file(const VectorField2& f) { return {f.grid, {f.comp[0], f.comp[1]}}; }

ScalarField scalar_from_file(const FieldFile& f) {
  if (f.components.size() != 1) throw InvalidInput("expected a scalar field file");
  return ScalarField(f.grid, f.components[0]);
}

VectorField2 vector_from_file(const FieldFile& f) {
  if (f.components.size() != 2) throw InvalidInput("expected a 2-component field file");
  return VectorField2(ScalarField(f.grid, f.components[0]), ScalarField(f.grid, f.components[1]));
}

}  // namespace kornlab
