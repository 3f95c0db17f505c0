#include "spikelab/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace spikelab {

namespace {
constexpr char kMagic[4] = {'S', 'P', 'K', 'F'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void write_field_binary(const std::filesystem::path& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open for writing: " + path.string());
  const Grid& g = f.dom->grid;
  const std::uint32_t nx = static_cast<std::uint32_t>(g.nx);
  const std::uint32_t ny = static_cast<std::uint32_t>(g.ny);
  os.write(kMagic, 4);
  os.write(reinterpret_cast<const char*>(&kVersion), 4);
  os.write(reinterpret_cast<const char*>(&nx), 4);
  os.write(reinterpret_cast<const char*>(&ny), 4);
  os.write(reinterpret_cast<const char*>(&g.h), 8);
  os.write(reinterpret_cast<const char*>(&g.origin.x), 8);
  os.write(reinterpret_cast<const char*>(&g.origin.y), 8);
  os.write(reinterpret_cast<const char*>(f.v.data()), static_cast<std::streamsize>(f.v.size() * 8));
  if (!os) throw Error("write failed: " + path.string());
}

RawFieldData read_field_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open for reading: " + path.string());
  char magic[4];
  std::uint32_t version = 0, nx = 0, ny = 0;
  is.read(magic, 4);
  is.read(reinterpret_cast<char*>(&version), 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0 || version != kVersion)
    throw Error("bad field file header: " + path.string());
  is.read(reinterpret_cast<char*>(&nx), 4);
  is.read(reinterpret_cast<char*>(&ny), 4);
  RawFieldData raw;
  raw.grid.nx = static_cast<int>(nx);
  raw.grid.ny = static_cast<int>(ny);
  is.read(reinterpret_cast<char*>(&raw.grid.h), 8);
  is.read(reinterpret_cast<char*>(&raw.grid.origin.x), 8);
  is.read(reinterpret_cast<char*>(&raw.grid.origin.y), 8);
  raw.values.resize(static_cast<std::size_t>(nx) * ny);
  is.read(reinterpret_cast<char*>(raw.values.data()), static_cast<std::streamsize>(raw.values.size() * 8));
  if (!is) throw Error("truncated field file: " + path.string());
  return raw;
}

Field field_from_raw(const RawFieldData& raw, const DomainPtr& dom) {
  const Grid& g = dom->grid;
  if (raw.grid.nx != g.nx || raw.grid.ny != g.ny || raw.grid.h != g.h ||
      raw.grid.origin.x != g.origin.x || raw.grid.origin.y != g.origin.y)
    throw Error("field file grid does not match the target domain");
  Field f(dom);
  f.v = raw.values;
  enforce_mask(f);
  return f;
}

double write_field_pgm(const std::filesystem::path& path, const Field& f) {
  double vmax = 0.0;
  for (double x : f.v) vmax = std::max(vmax, std::abs(x));
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open for writing: " + path.string());
  const Grid& g = f.dom->grid;
  os << "P5\n" << g.nx << " " << g.ny << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(g.nx));
  for (int j = g.ny - 1; j >= 0; --j) {  // top row first
    for (int i = 0; i < g.nx; ++i) {
      const double x = std::abs(f.v[g.index(i, j)]);
      row[static_cast<std::size_t>(i)] =
          vmax > 0.0 ? static_cast<unsigned char>(255.0 * x / vmax + 0.5) : 0;
    }
    os.write(reinterpret_cast<const char*>(row.data()), g.nx);
  }
  if (!os) throw Error("write failed: " + path.string());
  return vmax;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

}  // namespace spikelab
