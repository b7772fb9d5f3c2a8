#pragma once

#include <optional>
#include <string>

#include "bigjump/lattice/lattice_pmf.hpp"

namespace bigjump::lattice {

// On-disk store of computed laws. One file per key:
//   magic "BJLC", u32 version, u32 key length, key bytes,
//   f64 delta, f64 origin, u64 length,
//   f64 spill_low, low_ceiling, spill_high, high_floor, unresolved,
//   length f64 masses. All little-endian.
class LawCache {
 public:
  explicit LawCache(std::string dir);

  std::optional<LatticePMF> load(const std::string& key) const;
  void store(const std::string& key, const LatticePMF& p) const;
  std::string path_for(const std::string& key) const;

 private:
  std::string dir_;
};

}  // namespace bigjump::lattice
