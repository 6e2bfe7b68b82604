#include "lqgv/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

namespace lqgv::io {

namespace fs = std::filesystem;

void write_ppm(const Image& img, const fs::path& path) {
  if (img.rgb.size() != 3 * img.width * img.height) throw std::invalid_argument("write_ppm: bad buffer size");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Image read_ppm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string magic;
  int maxval = 0;
  Image img;
  in >> magic >> img.width >> img.height >> maxval;
  if (magic != "P6" || maxval != 255) throw std::runtime_error("read_ppm: unsupported format in " + path.string());
  in.get();
  img.rgb.resize(3 * img.width * img.height);
  if (!in.read(reinterpret_cast<char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()))) {
    throw std::runtime_error("read_ppm: truncated pixel data in " + path.string());
  }
  return img;
}

namespace {

constexpr std::uint32_t kMask24 = 0xFFFFFF;
// Odd multiplier scrambles neighbouring ids into distant colours; its inverse mod 2^24.
constexpr std::uint32_t kScramble = 0x9E3779;
constexpr std::uint32_t inverse_mod24(std::uint32_t a) {
  std::uint32_t x = 1;
  for (int i = 0; i < 5; ++i) x = (x * (2 - a * x)) & kMask24;
  return x;
}
constexpr std::uint32_t kUnscramble = inverse_mod24(kScramble);
static_assert(((kScramble * kUnscramble) & kMask24) == 1);

void put_pixel(Image& img, std::size_t x, std::size_t y, std::uint32_t c) {
  const std::size_t k = 3 * (y * img.width + x);
  img.rgb[k] = static_cast<std::uint8_t>(c >> 16);
  img.rgb[k + 1] = static_cast<std::uint8_t>(c >> 8);
  img.rgb[k + 2] = static_cast<std::uint8_t>(c);
}

}  // namespace

std::uint32_t owner_color(std::int32_t owner) {
  if (owner < kNoOwner || owner >= static_cast<std::int32_t>(kMask24)) {
    throw std::invalid_argument("owner_color: id does not fit in 24 bits");
  }
  return (static_cast<std::uint32_t>(owner + 1) * kScramble) & kMask24;
}

std::int32_t color_owner(std::uint32_t rgb) {
  return static_cast<std::int32_t>(((rgb & kMask24) * kUnscramble) & kMask24) - 1;
}

Image render_owners(const Tessellation& t) {
  const std::size_t n = t.grid.n();
  Image img{n, n, std::vector<std::uint8_t>(3 * n * n)};
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) put_pixel(img, i, n - 1 - j, owner_color(t.owner[t.grid.index(i, j)]));
  }
  return img;
}

std::vector<std::int32_t> decode_owners(const Image& img) {
  const std::size_t n = img.width;
  std::vector<std::int32_t> owners(img.width * img.height);
  for (std::size_t y = 0; y < img.height; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      const std::size_t k = 3 * (y * n + x);
      const std::uint32_t c = (std::uint32_t{img.rgb[k]} << 16) | (std::uint32_t{img.rgb[k + 1]} << 8) | img.rgb[k + 2];
      owners[(img.height - 1 - y) * n + x] = color_owner(c);
    }
  }
  return owners;
}

Image render_boundary_outline(const Tessellation& t) {
  const std::size_t n = t.grid.n();
  Image img{n, n, std::vector<std::uint8_t>(3 * n * n)};
  std::array<VertexId, 4> nb;
  for (VertexId v = 0; v < t.owner.size(); ++v) {
    const std::int32_t o = t.owner[v];
    std::uint32_t c = 0xFFFFFF;
    if (o != kNoOwner) {
      c = t.graph.is_boundary(static_cast<CellId>(o)) ? owner_color(o) : 0xDDDDDD;
      const std::size_t k = t.grid.neighbors(v, nb);
      for (std::size_t a = 0; a < k; ++a) {
        if (t.owner[nb[a]] != o && t.owner[nb[a]] != kNoOwner) c = 0x000000;
      }
    }
    put_pixel(img, t.grid.column(v), n - 1 - t.grid.row(v), c);
  }
  return img;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest initialisation failed");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return hex.str();
}

fs::path write_manifest(const fs::path& root, const std::vector<fs::path>& exclude) {
  const fs::path manifest = root / "manifest.txt";
  std::vector<std::string> entries;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), root);
    if (rel == "manifest.txt") continue;
    if (std::find(exclude.begin(), exclude.end(), rel) != exclude.end()) continue;
    entries.push_back(rel.generic_string());
  }
  std::sort(entries.begin(), entries.end());
  std::ofstream out(manifest, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + manifest.string());
  for (const auto& rel : entries) out << sha256_file(root / rel) << "  " << rel << '\n';
  if (!out) throw std::runtime_error("write failed for " + manifest.string());
  return manifest;
}

bool verify_manifest(const fs::path& root) {
  std::ifstream in(root / "manifest.txt");
  if (!in) return false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.size() < 67) return false;
    const std::string hash = line.substr(0, 64);
    const fs::path rel = line.substr(66);
    if (!fs::exists(root / rel) || sha256_file(root / rel) != hash) return false;
  }
  return true;
}

}  // namespace lqgv::io
