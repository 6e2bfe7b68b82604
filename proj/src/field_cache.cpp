#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "lqgv/field.hpp"

namespace lqgv {

namespace {

constexpr char kMagic[4] = {'L', 'Q', 'G', 'F'};
constexpr std::uint16_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw std::runtime_error("field cache: truncated file");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_field_cache(const Field& f, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("field cache: cannot open " + path.string() + " for writing");
  const Grid& g = f.grid();
  out.write(kMagic, 4);
  put<std::uint16_t>(out, kVersion);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(g.topology()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.n()));
  put<double>(out, g.side());
  put<double>(out, f.scales().t_min);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(f.kind()));
  put<std::uint64_t>(out, f.seed().master);
  put<std::uint64_t>(out, f.seed().stream);
  for (double v : f.values()) put<double>(out, v);
  if (!out) throw std::runtime_error("field cache: write failed for " + path.string());
}

Field read_field_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("field cache: cannot open " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("field cache: bad magic in " + path.string());
  }
  const auto version = get<std::uint16_t>(in);
  if (version != kVersion) {
    throw std::runtime_error("field cache: unsupported version " + std::to_string(version));
  }
  const auto topology = get<std::uint8_t>(in);
  if (topology > 1) throw std::runtime_error("field cache: bad topology tag");
  const auto n = get<std::uint32_t>(in);
  const auto side = get<double>(in);
  const auto t_min = get<double>(in);
  const auto kind = get<std::uint8_t>(in);
  if (kind > 3) throw std::runtime_error("field cache: bad field kind tag");
  RngSeed seed;
  seed.master = get<std::uint64_t>(in);
  seed.stream = get<std::uint64_t>(in);
  Grid grid(n, side, static_cast<Topology>(topology));
  std::vector<double> values(grid.vertex_count());
  for (double& v : values) v = get<double>(in);
  return Field(grid, std::move(values), ScaleRange{t_min, 1.0}, static_cast<FieldKind>(kind), seed);
}

}  // namespace lqgv
