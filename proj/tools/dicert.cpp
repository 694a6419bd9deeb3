// dicert: device-independent Shannon-entropy certification for Bell-based
// randomness. Subcommands: catalog, tsirelson, bounds, certify, sweep,
// convexity, compare.

#include <omp.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "dicert/report.hpp"

namespace {

using namespace dicert;

struct RunConfig {
  std::string inequality = "CHSH";
  std::vector<std::string> params;  // k=v pairs: n=, delta=, gamma=
  std::string spot;                 // "x,y" paper-native; empty = default
  int level = 2;
  bool extras = false;
  int restarts = -1;
  std::uint64_t seed = 42;
  std::string grid_spec = "0:0.5:0.005";
  double noise = 1e-6;
  double feas_tol = 1e-9;
  double gap_tol = 1e-8;
  int max_iter = 500;
  std::string out;
  std::string format = "csv";
  int threads = 0;
  bool serial = false;
  bool bell_inequality = false;
  bool json_catalog = false;
  std::vector<std::string> compare_ineqs;

  sdp::Tolerances tolerances() const {
    return {feas_tol, gap_tol, max_iter};
  }
  sdp::KernelMode mode() const {
    return serial ? sdp::KernelMode::serial : sdp::KernelMode::openmp;
  }
};

FamilyParams parse_params(const std::vector<std::string>& kv) {
  FamilyParams p;
  for (const std::string& s : kv) {
    auto eq = s.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--param", "expected key=value, got " + s);
    std::string key = s.substr(0, eq);
    std::string val = s.substr(eq + 1);
    try {
      if (key == "n")
        p.n = std::stoi(val);
      else if (key == "delta")
        p.delta = std::stod(val);
      else if (key == "gamma")
        p.gamma = std::stod(val);
      else
        throw CLI::ValidationError("--param", "unknown parameter " + key);
    } catch (const std::invalid_argument&) {
      throw CLI::ValidationError("--param", "bad value for " + key);
    }
  }
  return p;
}

FamilyParams with_defaults(const std::string& name, FamilyParams p) {
  constexpr double kPi = 3.14159265358979323846;
  if (name == "Idelta" && !p.delta) p.delta = kPi / 6.0;
  if (name == "Jgamma" && !p.gamma) p.gamma = kPi / 12.0;
  if (name == "BC" && !p.n) p.n = 3;
  return p;
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> grid;
  if (spec.find(':') != std::string::npos) {
    double start, stop, step;
    char c1, c2;
    std::istringstream is(spec);
    if (!(is >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' ||
        step <= 0)
      throw CLI::ValidationError("--grid", "expected start:stop:step");
    for (int i = 0;; ++i) {
      double p = start + i * step;
      if (p > stop + 1e-12) break;
      grid.push_back(std::min(p, stop));
    }
  } else {
    std::istringstream is(spec);
    std::string tok;
    while (std::getline(is, tok, ',')) grid.push_back(std::stod(tok));
  }
  if (grid.empty()) throw CLI::ValidationError("--grid", "empty grid");
  return grid;
}

std::pair<int, int> parse_spot(const CatalogEntry& entry,
                               const std::string& spec) {
  if (spec.empty()) return entry.spot_internal(0);
  int x, y;
  char c;
  std::istringstream is(spec);
  if (!(is >> x >> c >> y) || c != ',')
    throw CLI::ValidationError("--spot", "expected x,y");
  return entry.to_internal({x, y});
}

std::pair<int, int> to_paper(const CatalogEntry& entry,
                             std::pair<int, int> spot_internal) {
  return {spot_internal.first + entry.label_base,
          spot_internal.second + entry.label_base};
}

void write_output(const RunConfig& cfg, const std::string& content) {
  if (cfg.out.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream f(cfg.out);
  if (!f) throw std::runtime_error("cannot write " + cfg.out);
  f << content;
}

Provenance make_provenance(const RunConfig& cfg) {
  Provenance p;
  p.seed = cfg.seed;
  p.level = cfg.level;
  p.tolerances = cfg.tolerances();
  p.restarts = cfg.restarts;
  return p;
}

CertifyOptions certify_options(const RunConfig& cfg) {
  CertifyOptions o;
  o.level = cfg.level;
  o.extras = cfg.extras;
  o.restarts = cfg.restarts;
  o.seed = cfg.seed;
  o.tolerances = cfg.tolerances();
  o.mode = cfg.mode();
  o.bell_inequality = cfg.bell_inequality;
  return o;
}

bool all_clean(const SweepResult& sw) {
  for (const auto& pt : sw.points)
    if (!pt.cert || (pt.cert->status != sdp::Status::optimal &&
                     pt.cert->status != sdp::Status::near_optimal))
      return false;
  return true;
}

int cmd_catalog(const RunConfig& cfg) {
  std::vector<CatalogEntry> entries;
  if (cfg.inequality == "all") {
    entries = standard_entries(cfg.level, cfg.mode());
  } else {
    entries.push_back(get(cfg.inequality,
                          with_defaults(cfg.inequality, parse_params(cfg.params)),
                          cfg.level, cfg.mode()));
  }
  std::ostringstream os;
  if (cfg.json_catalog || cfg.format == "json") {
    nlohmann::json j;
    j["provenance"] = make_provenance(cfg).to_json();
    j["entries"] = nlohmann::json::array();
    for (const auto& e : entries) j["entries"].push_back(catalog_json(e));
    os << j.dump(2) << "\n";
  } else {
    catalog_table(os, entries);
  }
  write_output(cfg, os.str());
  return 0;
}

int cmd_tsirelson(const RunConfig& cfg) {
  std::vector<CatalogEntry> entries;
  if (cfg.inequality == "all")
    entries = standard_entries(cfg.level, cfg.mode());
  else
    entries.push_back(get(cfg.inequality,
                          with_defaults(cfg.inequality, parse_params(cfg.params)),
                          cfg.level, cfg.mode()));
  std::ostringstream os;
  os << "name,claimed,verified,level,delta\n";
  for (const auto& e : entries) {
    os << e.display_name() << ",";
    if (e.tsirelson_claimed && !e.claim_suspect) {
      os << fmt7(*e.tsirelson_claimed) << "," << fmt7(e.tsirelson_verified)
         << "," << e.verified_level << ","
         << fmt7(std::abs(*e.tsirelson_claimed - e.tsirelson_verified));
    } else {
      os << "suspect," << fmt7(e.tsirelson_verified) << ","
         << e.verified_level << ",nan";
    }
    os << "\n";
  }
  write_output(cfg, os.str());
  return 0;
}

int cmd_bounds(const RunConfig& cfg) {
  CatalogEntry entry =
      get(cfg.inequality, with_defaults(cfg.inequality, parse_params(cfg.params)),
          cfg.level, cfg.mode());
  auto spot = parse_spot(entry, cfg.spot);
  BoundBoxOptions opt;
  opt.tolerances = cfg.tolerances();
  opt.mode = cfg.mode();
  opt.bell_inequality = cfg.bell_inequality;
  BoundBox box = bound_box(entry, cfg.noise, spot, cfg.level,
                           standard_expressions(spot, cfg.extras), opt);
  std::ostringstream os;
  bounds_csv(os, box, make_provenance(cfg));
  write_output(cfg, os.str());
  return box.worst_status() == sdp::Status::optimal ||
                 box.worst_status() == sdp::Status::near_optimal
             ? 0
             : 3;
}

int cmd_certify(const RunConfig& cfg) {
  CatalogEntry entry =
      get(cfg.inequality, with_defaults(cfg.inequality, parse_params(cfg.params)),
          cfg.level, cfg.mode());
  auto spot = parse_spot(entry, cfg.spot);
  EntropyCertificate cert = certify(entry, cfg.noise, spot, certify_options(cfg));
  nlohmann::json j = certificate_json(cert, entry, to_paper(entry, spot));
  j["provenance"] = make_provenance(cfg).to_json();
  std::ostringstream os;
  os << j.dump(2) << "\n";
  write_output(cfg, os.str());
  std::cerr << certificate_summary(cert, entry) << "\n";
  return cert.status == sdp::Status::optimal ||
                 cert.status == sdp::Status::near_optimal
             ? 0
             : 3;
}

SweepResult run_sweep(const RunConfig& cfg, const CatalogEntry& entry,
                      std::pair<int, int> spot) {
  SweepOptions so;
  so.certify = certify_options(cfg);
  so.mode = cfg.mode();
  return sweep(entry, spot, parse_grid(cfg.grid_spec), so);
}

int cmd_sweep(const RunConfig& cfg) {
  CatalogEntry entry =
      get(cfg.inequality, with_defaults(cfg.inequality, parse_params(cfg.params)),
          cfg.level, cfg.mode());
  auto spot = parse_spot(entry, cfg.spot);
  SweepResult sw = run_sweep(cfg, entry, spot);
  std::ostringstream os;
  sweep_csv(os, sw, make_provenance(cfg));
  write_output(cfg, os.str());
  return all_clean(sw) ? 0 : 3;
}

int cmd_convexity(const RunConfig& cfg) {
  CatalogEntry entry =
      get(cfg.inequality, with_defaults(cfg.inequality, parse_params(cfg.params)),
          cfg.level, cfg.mode());
  auto spot = parse_spot(entry, cfg.spot);
  SweepResult sw = run_sweep(cfg, entry, spot);
  DerivativeReport rep = convexity_report(sw);
  std::ostringstream os;
  convexity_csv(os, rep, make_provenance(cfg));
  write_output(cfg, os.str());
  return all_clean(sw) ? 0 : 3;
}

int cmd_compare(const RunConfig& cfg) {
  if (cfg.compare_ineqs.size() < 2)
    throw CLI::ValidationError("--ineq", "compare needs two inequalities");
  std::vector<SweepResult> sweeps;
  for (const std::string& name : cfg.compare_ineqs) {
    CatalogEntry entry = get(name, with_defaults(name, parse_params(cfg.params)),
                             cfg.level, cfg.mode());
    auto spot = cfg.spot.empty() ? entry.spot_internal(0)
                                 : parse_spot(entry, cfg.spot);
    sweeps.push_back(run_sweep(cfg, entry, spot));
  }
  std::ostringstream os;
  nlohmann::json j;
  j["provenance"] = make_provenance(cfg).to_json();
  j["pairs"] = nlohmann::json::array();
  bool clean = true;
  for (std::size_t i = 0; i < sweeps.size(); ++i) {
    clean = clean && all_clean(sweeps[i]);
    for (std::size_t k = i + 1; k < sweeps.size(); ++k) {
      auto p = find_crossover(sweeps[i], sweeps[k]);
      nlohmann::json pj;
      pj["a"] = sweeps[i].entry.display_name();
      pj["b"] = sweeps[k].entry.display_name();
      if (p)
        pj["crossover"] = std::round(*p * 1e7) / 1e7;
      else
        pj["crossover"] = nullptr;
      j["pairs"].push_back(pj);
    }
  }
  os << j.dump(2) << "\n";
  write_output(cfg, os.str());
  return clean ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"device-independent Shannon-entropy certification toolkit"};
  app.set_config("--config", "", "flat key=value config file; flags override");

  RunConfig cfg;
  app.add_option("--threads", cfg.threads, "OpenMP thread count (0 = default)");
  app.add_flag("--serial", cfg.serial, "run all kernels on one thread");

  auto add_common = [&](CLI::App* sub, bool with_solver = true) {
    sub->add_option("--ineq", cfg.inequality,
                    "inequality name (CHSH, ModCHSH, BC, I1, I2, Idelta, Jgamma, all)");
    sub->add_option("--param", cfg.params, "family parameter k=v (n, delta, gamma)");
    sub->add_option("--level", cfg.level, "NPA hierarchy level")->check(CLI::PositiveNumber);
    if (with_solver) {
      sub->add_option("--feas-tol", cfg.feas_tol, "solver feasibility tolerance");
      sub->add_option("--gap-tol", cfg.gap_tol, "solver gap tolerance");
      sub->add_option("--max-iter", cfg.max_iter, "solver iteration cap");
    }
    sub->add_option("--out", cfg.out, "output path (default: stdout)");
  };
  auto add_point = [&](CLI::App* sub) {
    sub->add_option("--noise", cfg.noise, "noise level p in [0,1]")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--spot", cfg.spot, "spot setting x,y (paper-native labels)");
    sub->add_flag("--extras", cfg.extras, "include pair/triple constraints");
    sub->add_flag("--bell-ge", cfg.bell_inequality,
                  "constrain G >= (1-p)B instead of equality");
  };
  auto add_optim = [&](CLI::App* sub) {
    sub->add_option("--restarts", cfg.restarts,
                    "basin-hopping restarts (-1: 1500, or 100 with extras)");
    sub->add_option("--seed", cfg.seed, "random seed");
  };

  CLI::App* c_catalog = app.add_subcommand("catalog", "list Bell-expression entries");
  add_common(c_catalog);
  c_catalog->add_flag("--json", cfg.json_catalog, "emit JSON instead of a table");

  CLI::App* c_tsirelson =
      app.add_subcommand("tsirelson", "verify Tsirelson bounds numerically");
  add_common(c_tsirelson);

  CLI::App* c_bounds =
      app.add_subcommand("bounds", "certified probability bounds at one noise level");
  add_common(c_bounds);
  add_point(c_bounds);

  CLI::App* c_certify =
      app.add_subcommand("certify", "entropy certificate at one noise level");
  add_common(c_certify);
  add_point(c_certify);
  add_optim(c_certify);

  CLI::App* c_sweep = app.add_subcommand("sweep", "entropy certificates over a noise grid");
  add_common(c_sweep);
  add_point(c_sweep);
  add_optim(c_sweep);
  c_sweep->add_option("--grid", cfg.grid_spec, "start:stop:step or comma list");

  CLI::App* c_convexity =
      app.add_subcommand("convexity", "second-derivative report along a sweep");
  add_common(c_convexity);
  add_point(c_convexity);
  add_optim(c_convexity);
  c_convexity->add_option("--grid", cfg.grid_spec, "start:stop:step or comma list");

  CLI::App* c_compare =
      app.add_subcommand("compare", "sweep several inequalities and report crossovers");
  c_compare->add_option("--ineq", cfg.compare_ineqs, "inequality (repeat twice or more)");
  c_compare->add_option("--param", cfg.params, "family parameter k=v");
  c_compare->add_option("--level", cfg.level, "NPA hierarchy level");
  c_compare->add_option("--spot", cfg.spot, "spot setting x,y");
  c_compare->add_option("--grid", cfg.grid_spec, "start:stop:step or comma list");
  c_compare->add_option("--restarts", cfg.restarts, "basin-hopping restarts");
  c_compare->add_option("--seed", cfg.seed, "random seed");
  c_compare->add_option("--out", cfg.out, "output path");

  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
  if (cfg.serial) omp_set_num_threads(1);

  try {
    if (c_catalog->parsed()) return cmd_catalog(cfg);
    if (c_tsirelson->parsed()) return cmd_tsirelson(cfg);
    if (c_bounds->parsed()) return cmd_bounds(cfg);
    if (c_certify->parsed()) return cmd_certify(cfg);
    if (c_sweep->parsed()) return cmd_sweep(cfg);
    if (c_convexity->parsed()) return cmd_convexity(cfg);
    if (c_compare->parsed()) return cmd_compare(cfg);
  } catch (const sdp::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
