#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "pfc/wrench.hpp"

namespace pfc {

/// Provenance carried by estimate documents.
struct EstimateProvenance {
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  double phi = 0.0;  // object rotation when the estimate was finalized
};

/// Plain-text estimate document, stable field order, diffable.
void write_estimate(std::ostream& os, const PolyhedralCone& cone,
                    const EstimateProvenance& prov);
void write_estimate_file(const std::string& path, const PolyhedralCone& cone,
                         const EstimateProvenance& prov);

struct EstimateDocument {
  PolyhedralCone cone;
  EstimateProvenance provenance;
};

EstimateDocument read_estimate(std::istream& is);
EstimateDocument read_estimate_file(const std::string& path);

/// FNV-1a over a byte string; configuration fingerprints.
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace pfc
