#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dicert/scenario.hpp"
#include "dicert/sdp.hpp"

namespace dicert {

struct FamilyParams {
  std::optional<int> n;        // BC chain length
  std::optional<double> delta; // I_delta
  std::optional<double> gamma; // J_gamma
};

/// Catalog entry for one Bell-expression family instance. Input labels in
/// spot_settings are stored paper-native; label_base says whether the
/// family counts settings from 1 (CHSH..I2) or from 0 (Idelta/Jgamma).
struct CatalogEntry {
  std::string name;
  FamilyParams params;
  BellExpression expression;  // internal 0-based indices
  std::optional<double> tsirelson_claimed;
  bool claim_suspect = false;
  std::string note;
  double tsirelson_verified = 0.0;
  int verified_level = 0;
  std::vector<std::pair<int, int>> spot_settings;  // paper-native labels
  int label_base = 1;

  std::pair<int, int> spot_internal(std::size_t idx = 0) const;
  std::pair<int, int> to_internal(std::pair<int, int> paper_spot) const;
  std::string display_name() const;  // e.g. "BC3", "Idelta(0.5235988)"
};

/// NPA upper bound on the expression's value over quantum behaviors.
/// Throws SolverError on solver failure.
double tsirelson_numeric(const BellExpression& expr, int level,
                         const sdp::Tolerances& tolerances = {},
                         sdp::KernelMode mode = sdp::KernelMode::openmp);

/// Family lookup. Names: CHSH, ModCHSH, BC (needs n>=2), I1, I2,
/// Idelta (needs 0 < delta < pi/4), Jgamma (needs finite gamma).
/// tsirelson_verified is computed numerically at `level` (cached per
/// family/params/level across calls).
CatalogEntry get(const std::string& name, const FamilyParams& params = {},
                 int level = 2,
                 sdp::KernelMode mode = sdp::KernelMode::openmp);

/// The nine standard instances used throughout: CHSH, ModCHSH, BC3, BC5,
/// BC7, I1, I2, Idelta(pi/6), Jgamma(pi/12).
std::vector<CatalogEntry> standard_entries(
    int level = 2, sdp::KernelMode mode = sdp::KernelMode::openmp);

}  // namespace dicert
