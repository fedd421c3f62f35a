#include "bohm/dump.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "bohm/error.hpp"
#include "json.hpp"

namespace bohm {

static_assert(std::endian::native == std::endian::little, "grid dumps assume a little-endian host");

namespace {

template <typename T>
void put(std::ostream& os, T v) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  os.write(bytes, sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  char bytes[sizeof(T)];
  is.read(bytes, sizeof(T));
  require(static_cast<bool>(is), ErrorKind::io, "truncated grid dump");
  T v;
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

void write_sidecar(const std::filesystem::path& path, const nlohmann::ordered_json& meta) {
  std::ofstream os(path);
  require(static_cast<bool>(os), ErrorKind::io, "cannot open " + path.string());
  os << meta.dump(2) << '\n';
}

nlohmann::ordered_json grid_meta(const Grid& grid, const std::string& kind, int components) {
  nlohmann::ordered_json meta;
  meta["kind"] = kind;
  meta["format_version"] = kGridDumpVersion;
  meta["dims_per_particle"] = grid.dims_per_particle();
  meta["particle_count"] = grid.particle_count();
  meta["components"] = components;
  meta["boundary"] = std::string(to_string(grid.boundary()));
  return meta;
}

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* suffix) {
  return std::filesystem::path(stem.string() + suffix);
}

}  // namespace

void write_grid_dump(const std::filesystem::path& path, const Grid& grid, int components,
                     std::span<const cplx> values) {
  require(values.size() == grid.size() * static_cast<std::size_t>(components), ErrorKind::io,
          "grid dump: value count does not match grid x components");
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), ErrorKind::io, "cannot open " + path.string());
  os.write("BOHM", 4);
  put<std::uint32_t>(os, kGridDumpVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(grid.dimension()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(components));
  for (int p : grid.points()) put<std::uint32_t>(os, static_cast<std::uint32_t>(p));
  for (double e : grid.extents()) put<double>(os, e);
  for (const cplx& z : values) {
    put<float>(os, static_cast<float>(z.real()));
    put<float>(os, static_cast<float>(z.imag()));
  }
  require(static_cast<bool>(os), ErrorKind::io, "write failed for " + path.string());
}

GridDump read_grid_dump(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorKind::io, "cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  require(is && std::memcmp(magic, "BOHM", 4) == 0, ErrorKind::io, path.string() + " is not a grid dump");
  const auto version = get<std::uint32_t>(is);
  require(version == kGridDumpVersion, ErrorKind::io, "unsupported grid dump version " + std::to_string(version));
  GridDump d;
  const auto dim = get<std::uint32_t>(is);
  d.components = static_cast<int>(get<std::uint32_t>(is));
  require(dim >= 1 && dim <= 3 && d.components >= 1, ErrorKind::io, "corrupt grid dump header");
  std::size_t count = static_cast<std::size_t>(d.components);
  for (std::uint32_t a = 0; a < dim; ++a) {
    d.points.push_back(static_cast<int>(get<std::uint32_t>(is)));
    count *= static_cast<std::size_t>(d.points.back());
  }
  for (std::uint32_t a = 0; a < dim; ++a) d.extents.push_back(get<double>(is));
  d.values.resize(count);
  for (auto& z : d.values) {
    const float re = get<float>(is);
    const float im = get<float>(is);
    z = cplx{re, im};
  }
  return d;
}

void write_wave_dump(const std::filesystem::path& stem, const WaveFunction& psi) {
  write_grid_dump(with_suffix(stem, ".bin"), psi.grid(), psi.components(), psi.amplitudes());
  auto meta = grid_meta(psi.grid(), "wavefunction", psi.components());
  meta["masses"] = std::vector<double>(psi.masses().begin(), psi.masses().end());
  meta["hbar"] = psi.hbar();
  write_sidecar(with_suffix(stem, ".json"), meta);
}

void write_field_dump(const std::filesystem::path& stem, const ScalarField& field, const std::string& kind) {
  std::vector<cplx> values(field.values.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = field.valid(i) ? field.values[i] : 0.0;
  write_grid_dump(with_suffix(stem, ".bin"), field.grid, 1, values);
  auto meta = grid_meta(field.grid, kind, 1);
  meta["masked_fraction"] = field.masked_fraction();
  write_sidecar(with_suffix(stem, ".json"), meta);
}

void write_field_dump(const std::filesystem::path& stem, const VectorField& field, const std::string& kind) {
  std::vector<cplx> values(field.values.size());
  const auto c = static_cast<std::size_t>(field.components);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = field.valid(i / c) ? field.values[i] : 0.0;
  write_grid_dump(with_suffix(stem, ".bin"), field.grid, field.components, values);
  write_sidecar(with_suffix(stem, ".json"), grid_meta(field.grid, kind, field.components));
}

void write_mask_dump(const std::filesystem::path& stem, const Grid& grid, std::span<const std::uint8_t> mask,
                     const std::string& kind) {
  std::vector<cplx> values(grid.size(), cplx{1.0, 0.0});
  for (std::size_t i = 0; i < mask.size() && i < values.size(); ++i) values[i] = mask[i] ? 1.0 : 0.0;
  write_grid_dump(with_suffix(stem, ".bin"), grid, 1, values);
  write_sidecar(with_suffix(stem, ".json"), grid_meta(grid, kind, 1));
}

}  // namespace bohm
