#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "bohm/grid.hpp"
#include "bohm/wave.hpp"

namespace bohm {

/// Binary grid dump, little-endian:
///
///   char[4]  magic "BOHM"
///   u32      version (= kGridDumpVersion)
///   u32      D
///   u32      C (components per lattice point)
///   u32[D]   points per axis
///   f64[D]   extent per axis
///   then grid.size() * C (re, im) pairs of f32, row-major over the lattice
///   (last axis fastest) with the component index fastest of all.
///
/// Every dump is accompanied by `<name>.json` holding the metadata that does
/// not fit the header (masses, hbar, boundary, particle layout, field kind).
inline constexpr std::uint32_t kGridDumpVersion = 1;

struct GridDump {
  std::vector<int> points;
  std::vector<double> extents;
  int components = 1;
  std::vector<cplx> values;
};

void write_grid_dump(const std::filesystem::path& path, const Grid& grid, int components,
                     std::span<const cplx> values);
GridDump read_grid_dump(const std::filesystem::path& path);

/// Writes `<stem>.bin` and `<stem>.json`. The sidecar records masses, hbar and boundary.
void write_wave_dump(const std::filesystem::path& stem, const WaveFunction& psi);
/// Real field dump (imaginary parts zero). `kind` names the quantity in the sidecar.
void write_field_dump(const std::filesystem::path& stem, const ScalarField& field, const std::string& kind);
void write_field_dump(const std::filesystem::path& stem, const VectorField& field, const std::string& kind);
/// Validity mask as a real 0/1 field.
void write_mask_dump(const std::filesystem::path& stem, const Grid& grid, std::span<const std::uint8_t> mask,
                     const std::string& kind);

}  // namespace bohm
