#pragma once

#include <iosfwd>
#include <string>

#include "dicert/analysis.hpp"

// vendored single-header nlohmann/json
#include "json.hpp"

namespace dicert {

inline constexpr const char* kToolVersion = "0.1.0";

/// Reproducibility header embedded in every output: tool version, seed,
/// NPA level, solver tolerances.
struct Provenance {
  std::uint64_t seed = 42;
  int level = 2;
  sdp::Tolerances tolerances;
  int restarts = -1;

  nlohmann::json to_json() const;
  void write_csv_header(std::ostream& os) const;
};

/// Numbers in reports carry 7 decimal places.
std::string fmt7(double v);

nlohmann::json catalog_json(const CatalogEntry& entry);
void catalog_table(std::ostream& os, const std::vector<CatalogEntry>& entries);

nlohmann::json certificate_json(const EntropyCertificate& cert,
                                const CatalogEntry& entry,
                                std::pair<int, int> spot_paper);
std::string certificate_summary(const EntropyCertificate& cert,
                                const CatalogEntry& entry);

void bounds_csv(std::ostream& os, const BoundBox& box, const Provenance& prov);

/// Fixed column order: p, shannon_lower, min_entropy, conjecture_entropy,
/// agreement, lo_mm, hi_mm, lo_mp, hi_mp, lo_pm, hi_pm, lo_pp, hi_pp, status.
void sweep_csv(std::ostream& os, const SweepResult& sweep,
               const Provenance& prov);

void convexity_csv(std::ostream& os, const DerivativeReport& report,
                   const Provenance& prov);

}  // namespace dicert
