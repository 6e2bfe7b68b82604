#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lqgv/voronoi.hpp"

namespace lqgv::io {

struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, top row first
};

void write_ppm(const Image& img, const std::filesystem::path& path);
Image read_ppm(const std::filesystem::path& path);

/// Bijective 24-bit colour for an owner id (kNoOwner maps to black).
std::uint32_t owner_color(std::int32_t owner);
std::int32_t color_owner(std::uint32_t rgb);

/// One pixel per vertex, coloured by owner; vertex row 0 is the bottom image row.
Image render_owners(const Tessellation& t);
/// Inverse of render_owners.
std::vector<std::int32_t> decode_owners(const Image& img);
/// Boundary cells in their owner colour, interior cells light grey, and every
/// vertex with a differently owned neighbour drawn black.
Image render_boundary_outline(const Tessellation& t);

std::string sha256_file(const std::filesystem::path& path);

/// Writes `root/manifest.txt`: "<sha256>  <relative path>" for every regular
/// file under root except the manifest itself, sorted by path.
std::filesystem::path write_manifest(const std::filesystem::path& root,
                                     const std::vector<std::filesystem::path>& exclude = {});

/// Checks every manifest entry exists and matches its hash.
bool verify_manifest(const std::filesystem::path& root);

}  // namespace lqgv::io
