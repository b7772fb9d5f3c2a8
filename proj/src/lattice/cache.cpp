#include "bigjump/lattice/cache.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "bigjump/errors.hpp"

namespace bigjump::lattice {

static_assert(std::endian::native == std::endian::little, "cache format assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'B', 'J', 'L', 'C'};
constexpr std::uint32_t kVersion = 1;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

template <class T>
void put(std::ofstream& o, T v) {
  o.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
bool get(std::ifstream& in, T& v) {
  return bool(in.read(reinterpret_cast<char*>(&v), sizeof v));
}

}  // namespace

LawCache::LawCache(std::string dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ConfigError("cache: cannot create directory " + dir_);
}

std::string LawCache::path_for(const std::string& key) const {
  char name[32];
  std::snprintf(name, sizeof name, "%016llx.bjl", (unsigned long long)fnv1a(key));
  return (std::filesystem::path(dir_) / name).string();
}

std::optional<LatticePMF> LawCache::load(const std::string& key) const {
  std::ifstream in(path_for(key), std::ios::binary);
  if (!in) return std::nullopt;
  char magic[4];
  std::uint32_t version = 0, klen = 0;
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) return std::nullopt;
  if (!get(in, version) || version != kVersion) return std::nullopt;
  if (!get(in, klen) || klen != key.size()) return std::nullopt;
  std::string stored(klen, '\0');
  if (!in.read(stored.data(), klen) || stored != key) return std::nullopt;
  LatticePMF p;
  std::uint64_t len = 0;
  if (!get(in, p.delta) || !get(in, p.origin) || !get(in, len)) return std::nullopt;
  if (!get(in, p.spill_low) || !get(in, p.low_ceiling) || !get(in, p.spill_high) || !get(in, p.high_floor) ||
      !get(in, p.unresolved))
    return std::nullopt;
  p.masses.resize(len);
  if (!in.read(reinterpret_cast<char*>(p.masses.data()), std::streamsize(len * sizeof(double)))) return std::nullopt;
  return p;
}

void LawCache::store(const std::string& key, const LatticePMF& p) const {
  const std::string path = path_for(key);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
    if (!o) throw Error("cache: cannot write " + tmp);
    o.write(kMagic, 4);
    put(o, kVersion);
    put(o, std::uint32_t(key.size()));
    o.write(key.data(), std::streamsize(key.size()));
    put(o, p.delta);
    put(o, p.origin);
    put(o, std::uint64_t(p.masses.size()));
    put(o, p.spill_low);
    put(o, p.low_ceiling);
    put(o, p.spill_high);
    put(o, p.high_floor);
    put(o, p.unresolved);
    o.write(reinterpret_cast<const char*>(p.masses.data()), std::streamsize(p.masses.size() * sizeof(double)));
    if (!o) throw Error("cache: write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace bigjump::lattice
