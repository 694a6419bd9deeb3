#include "dicert/report.hpp"

#include <cstdio>
#include <iomanip>
#include <ostream>

namespace dicert {

using nlohmann::json;

std::string fmt7(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.7f", v);
  return buf;
}

namespace {

double round7(double v) {
  if (!std::isfinite(v)) return v;
  return std::round(v * 1e7) / 1e7;
}

json params_json(const FamilyParams& p) {
  json j = json::object();
  if (p.n) j["n"] = *p.n;
  if (p.delta) j["delta"] = round7(*p.delta);
  if (p.gamma) j["gamma"] = round7(*p.gamma);
  return j;
}

}  // namespace

json Provenance::to_json() const {
  json j;
  j["tool"] = "dicert";
  j["version"] = kToolVersion;
  j["seed"] = seed;
  j["level"] = level;
  j["feasibility_tol"] = tolerances.feasibility;
  j["gap_tol"] = tolerances.gap;
  j["max_iterations"] = tolerances.max_iterations;
  if (restarts >= 0) j["restarts"] = restarts;
  return j;
}

void Provenance::write_csv_header(std::ostream& os) const {
  os << "# dicert " << kToolVersion << "\n";
  os << "# seed=" << seed << " level=" << level
     << " feas_tol=" << tolerances.feasibility << " gap_tol=" << tolerances.gap
     << " max_iterations=" << tolerances.max_iterations;
  if (restarts >= 0) os << " restarts=" << restarts;
  os << "\n";
}

json catalog_json(const CatalogEntry& entry) {
  json j;
  j["name"] = entry.name;
  j["params"] = params_json(entry.params);
  json coeffs = json::array();
  for (const auto& [xy, c] : entry.expression.correlator_coeffs) {
    if (c == 0.0) continue;
    coeffs.push_back({{"x", xy.first + entry.label_base},
                      {"y", xy.second + entry.label_base},
                      {"coeff", round7(c)}});
  }
  j["coeffs"] = coeffs;
  j["constant"] = round7(entry.expression.constant);
  if (entry.tsirelson_claimed && !entry.claim_suspect)
    j["tsirelson_claimed"] = round7(*entry.tsirelson_claimed);
  else
    j["tsirelson_claimed"] = nullptr;
  j["tsirelson_verified"] = round7(entry.tsirelson_verified);
  json spots = json::array();
  for (const auto& [x, y] : entry.spot_settings) spots.push_back({x, y});
  j["spot_settings"] = spots;
  if (entry.claim_suspect) j["claim_suspect"] = true;
  if (!entry.note.empty()) j["note"] = entry.note;
  return j;
}

void catalog_table(std::ostream& os, const std::vector<CatalogEntry>& entries) {
  os << std::left << std::setw(18) << "name" << std::setw(14) << "claimed"
     << std::setw(14) << "verified" << std::setw(8) << "level"
     << "spots\n";
  for (const auto& e : entries) {
    std::string claimed = "-";
    if (e.tsirelson_claimed && !e.claim_suspect)
      claimed = fmt7(*e.tsirelson_claimed);
    else if (e.tsirelson_claimed)
      claimed = fmt7(*e.tsirelson_claimed) + "?";
    os << std::left << std::setw(18) << e.display_name() << std::setw(14)
       << claimed << std::setw(14) << fmt7(e.tsirelson_verified)
       << std::setw(8) << e.verified_level;
    for (const auto& [x, y] : e.spot_settings) os << "(" << x << "," << y << ") ";
    if (!e.note.empty()) os << " [" << e.note << "]";
    os << "\n";
  }
}

json certificate_json(const EntropyCertificate& cert,
                      const CatalogEntry& entry,
                      std::pair<int, int> spot_paper) {
  json j;
  j["inequality"] = entry.display_name();
  j["params"] = params_json(entry.params);
  j["noise"] = cert.noise;
  j["spot"] = {spot_paper.first, spot_paper.second};
  j["level"] = cert.level;
  j["shannon_lower"] = round7(cert.shannon_lower);
  j["min_entropy"] = round7(cert.min_entropy_bits);
  json od = json::array(), cd = json::array();
  for (double p : cert.optimizer_dist) od.push_back(round7(p));
  for (double p : cert.conjecture_dist) cd.push_back(round7(p));
  j["optimizer_dist"] = od;
  if (cert.conjecture_applicable) {
    j["conjecture_dist"] = cd;
    j["conjecture_entropy"] = round7(cert.conjecture_entropy);
    j["agreement"] = round7(cert.agreement);
  } else {
    j["conjecture_dist"] = nullptr;
    j["conjecture_entropy"] = nullptr;
    j["agreement"] = nullptr;
  }
  j["restarts_used"] = cert.restarts_used;
  j["bell_constraint"] = round7((1.0 - cert.noise) *
                                entry.tsirelson_verified);
  j["solver_status"] = sdp::to_string(cert.status);
  return j;
}

std::string certificate_summary(const EntropyCertificate& cert,
                                const CatalogEntry& entry) {
  std::string s = entry.display_name() + " p=" + fmt7(cert.noise) +
                  ": shannon_lower=" + fmt7(cert.shannon_lower) +
                  " min_entropy=" + fmt7(cert.min_entropy_bits);
  if (cert.conjecture_applicable)
    s += " conjecture=" + fmt7(cert.conjecture_entropy) + " agreement=" +
         fmt7(cert.agreement);
  s += std::string(" status=") + sdp::to_string(cert.status);
  return s;
}

void bounds_csv(std::ostream& os, const BoundBox& box, const Provenance& prov) {
  prov.write_csv_header(os);
  os << "# inequality=" << box.inequality.display_name()
     << " noise=" << fmt7(box.noise) << " spot_internal=(" << box.spot.first
     << "," << box.spot.second << ") level=" << box.level << "\n";
  os << "label,lo,hi,solver_status_lo,solver_status_hi,gap_lo,gap_hi\n";
  for (const auto& e : box.entries) {
    char gl[32], gh[32];
    std::snprintf(gl, sizeof(gl), "%.3e", e.gap_lo);
    std::snprintf(gh, sizeof(gh), "%.3e", e.gap_hi);
    os << e.expr.label << "," << fmt7(e.lo) << "," << fmt7(e.hi) << ","
       << sdp::to_string(e.status_lo) << "," << sdp::to_string(e.status_hi)
       << "," << gl << "," << gh << "\n";
  }
}

void sweep_csv(std::ostream& os, const SweepResult& sw, const Provenance& prov) {
  prov.write_csv_header(os);
  os << "# inequality=" << sw.entry.display_name() << " spot_internal=("
     << sw.spot.first << "," << sw.spot.second << ")\n";
  os << "p,shannon_lower,min_entropy,conjecture_entropy,agreement,"
        "lo_mm,hi_mm,lo_mp,hi_mp,lo_pm,hi_pm,lo_pp,hi_pp,status\n";
  for (const auto& pt : sw.points) {
    os << fmt7(pt.noise) << ",";
    if (!pt.cert) {
      os << ",,,,,,,,,,,,failed\n";
      continue;
    }
    const EntropyCertificate& c = *pt.cert;
    os << fmt7(c.shannon_lower) << "," << fmt7(c.min_entropy_bits) << ",";
    if (c.conjecture_applicable)
      os << fmt7(c.conjecture_entropy) << "," << fmt7(c.agreement) << ",";
    else
      os << "nan,nan,";
    for (int i = 0; i < 4; ++i)
      os << fmt7(c.box.single(i).lo) << "," << fmt7(c.box.single(i).hi) << ",";
    os << sdp::to_string(c.status) << "\n";
  }
}

void convexity_csv(std::ostream& os, const DerivativeReport& r,
                   const Provenance& prov) {
  prov.write_csv_header(os);
  os << "# " << r.printed_beta_verdict << "\n";
  os << "p,dH_dp,d2H_dp2,d2H_dp2_analytic,d2H_dp2_printed,d2H_dp2_reference,"
        "dl1,dl2,du3,d2l1,d2l2,d2u3,alpha,beta1,beta2,beta3,"
        "beta1_printed,beta2_printed,beta3_printed,region\n";
  for (std::size_t i = 0; i < r.grid_interior.size(); ++i) {
    os << fmt7(r.grid_interior[i]) << "," << fmt7(r.dh_dp[i]) << ","
       << fmt7(r.d2h_dp2[i]) << "," << fmt7(r.d2h_dp2_analytic[i]) << ","
       << fmt7(r.d2h_dp2_printed[i]) << "," << fmt7(r.d2h_dp2_reference[i])
       << "," << fmt7(r.dl1[i]) << "," << fmt7(r.dl2[i]) << ","
       << fmt7(r.du3[i]) << "," << fmt7(r.d2l1[i]) << "," << fmt7(r.d2l2[i])
       << "," << fmt7(r.d2u3[i]) << "," << fmt7(r.alpha[i]) << ","
       << fmt7(r.beta1[i]) << "," << fmt7(r.beta2[i]) << ","
       << fmt7(r.beta3[i]) << "," << fmt7(r.beta1_printed[i]) << ","
       << fmt7(r.beta2_printed[i]) << "," << fmt7(r.beta3_printed[i]) << ","
       << (r.region[i] < 0 ? "concave" : (r.region[i] > 0 ? "convex" : "flat"))
       << "\n";
  }
}

}  // namespace dicert
