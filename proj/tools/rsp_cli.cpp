// rsp: point generation, coverage analysis, table reproduction, protocol
// simulation and the teleportation comparison.
//
// Exit codes: 0 success, 2 validation or coverage failure, 3 parse or I/O failure.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "rsp/protocol.hpp"

using namespace rsp;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

struct Config {
  std::uint64_t seed = 1;
  std::string format = "json";
  std::string out;
  unsigned jobs = 1;
  bool degrees = false;

  std::size_t k = 0;
  std::string method = "auto";
  std::string latitudes = "hemisphere";
  std::size_t restarts = 0;
  std::string pointsFile;

  std::optional<double> thetaR;
  std::optional<double> r0;
  std::string target = "1,0,0";
  std::size_t trials = 1;
  std::vector<std::size_t> ks{2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
};

double angle_in(const Config& c, double v) { return c.degrees ? v * kPi / 180.0 : v; }

bool is_power_of_two(std::size_t k) { return k != 0 && (k & (k - 1)) == 0; }

void warn_bits(std::size_t k) {
  if (!is_power_of_two(k))
    std::cerr << "warning: K = " << k << " is not a power of 2, so log2 K is not a whole number of bits\n";
}

std::string csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// Primary output goes to --out when given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw IoError("cannot write '" + path + "'");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw IoError("failed while writing output");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

KoayLatitudes parse_latitudes(const std::string& s) {
  if (s == "hemisphere") return KoayLatitudes::hemisphere;
  if (s == "full") return KoayLatitudes::full_sphere;
  throw InvalidArgument("unknown Koay latitude grid '" + s + "'");
}

struct GeneratedPoints {
  SphericalPointSet points;
  std::string method;
  std::optional<double> energy;
};

GeneratedPoints generate(const Config& c, std::size_t k) {
  if (k == 0) throw InvalidArgument("K must be at least 1");
  if (k == 1) return {pole_pair(), "analytic", std::nullopt};
  std::string method = c.method;
  if (method == "auto") method = k <= 128 ? "minimize" : "koay";
  if (method == "koay") return {koay_points(k, parse_latitudes(c.latitudes)), "koay", std::nullopt};
  if (method == "minimize") {
    const std::size_t restarts = c.restarts ? c.restarts : default_restarts(k);
    MinimizeResult res = minimize_points(k, c.seed, restarts);
    return {std::move(res.points), "minimize", res.energy};
  }
  throw InvalidArgument("unknown method '" + method + "' (expected koay, minimize or auto)");
}

SphericalPointSet points_for(const Config& c) {
  if (!c.pointsFile.empty()) return load_points(c.pointsFile);
  if (c.k == 0) throw InvalidArgument("give --k or --points");
  return generate(c, c.k).points;
}

ResourceState resource_for(const Config& c) {
  if (c.thetaR) return ResourceState::from_theta(angle_in(c, *c.thetaR));
  if (c.r0) return ResourceState::from_r0(*c.r0);
  throw InvalidArgument("give --theta-r or --r0");
}

TargetState target_for(const Config& c) {
  std::vector<double> v;
  std::stringstream ss(c.target);
  std::string field;
  while (std::getline(ss, field, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(field, &used));
      if (used != field.size()) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      throw InvalidArgument("--target expects p,theta,phi; got '" + c.target + "'");
    }
  }
  if (v.size() != 3) throw InvalidArgument("--target expects p,theta,phi; got '" + c.target + "'");
  return TargetState::from_angles(v[0], angle_in(c, v[1]), angle_in(c, v[2]));
}

json matrix_json(const Matrix2& m) { return complex_rows(m); }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------

void cmd_points(const Config& c) {
  if (c.k == 0) throw InvalidArgument("--k is required");
  const GeneratedPoints g = generate(c, c.k);
  const bool asJson = c.out.empty() ? c.format == "json" : c.out.size() > 5 && c.out.ends_with(".json");
  Sink sink(c.out);
  write_points(sink.stream(), g.points, asJson);
  sink.finish();
  if (c.out.empty()) return;

  json meta{{"method", g.method},
            {"k", c.k},
            {"points", g.points.size()},
            {"seed", c.seed},
            {"energy", g.energy ? json(*g.energy) : json(nullptr)},
            {"timestamp", utc_timestamp()}};
  if (g.method == "koay") meta["koay_latitudes"] = c.latitudes;
  std::ofstream side(c.out + ".meta.json");
  if (!side) throw IoError("cannot write '" + c.out + ".meta.json'");
  side << meta.dump(2) << '\n';
}

void cmd_coverage(const Config& c) {
  const SphericalPointSet pts = points_for(c);
  warn_bits(pts.k());
  const CoverageReport r = analyze_coverage(pts);
  Sink sink(c.out);
  if (c.format == "csv") {
    sink.stream() << "k,total_bits,covering_radius_rad,theta_r_lower_bound_rad,e_lower_bound_bits\n"
                  << r.k << ',' << csv_number(r.totalBits) << ',' << csv_number(r.coveringRadius) << ','
                  << csv_number(r.thetaRLowerBound) << ',' << csv_number(r.entanglementLowerBound) << '\n';
  } else {
    sink.stream() << json(r).dump(2) << '\n';
  }
  sink.finish();
}

void cmd_table1(const Config& c) {
  std::vector<std::optional<CoverageReport>> rows(c.ks.size());
  std::vector<std::string> methods(c.ks.size());
  std::vector<std::exception_ptr> errors(c.ks.size());
  auto work = [&](std::size_t i) {
    try {
      const GeneratedPoints g = generate(c, c.ks[i]);
      methods[i] = g.method;
      rows[i] = c.ks[i] == 1 ? analyze_coverage(g.points) : table_row(c.ks[i], g.points);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  std::size_t next = 0;
  while (next < c.ks.size()) {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < c.jobs && next < c.ks.size(); ++w) pool.emplace_back(work, next++);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (std::size_t k : c.ks) warn_bits(k);

  Sink sink(c.out);
  if (c.format == "csv") {
    sink.stream() << "k,total_bits,covering_radius_rad,e_lower_bound_bits,method\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
      sink.stream() << rows[i]->k << ',' << csv_number(rows[i]->totalBits) << ','
                    << csv_number(rows[i]->coveringRadius) << ',' << csv_number(rows[i]->entanglementLowerBound)
                    << ',' << methods[i] << '\n';
  } else {
    json table = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      json row = *rows[i];
      row["method"] = methods[i];
      table.push_back(row);
    }
    sink.stream() << json{{"seed", c.seed}, {"rows", table}}.dump(2) << '\n';
  }
  sink.finish();
}

void cmd_rsp(const Config& c) {
  const ResourceState res = resource_for(c);
  const TargetState target = target_for(c);
  const RotationSet rot = build_rotation_set(points_for(c));
  warn_bits(rot.size());
  if (!validate_coverage(res, rot.coverage()))
    throw InsufficientEntanglement("theta_r = " + std::to_string(res.theta()) + " rad is below the covering radius " +
                                   std::to_string(rot.covering_radius()) + " rad of the K = " +
                                   std::to_string(rot.size()) + " rotation set");
  if (c.trials == 0) throw InvalidArgument("--trials must be positive");

  const auto runs = run_trials(res, rot, target, c.trials, c.seed, c.jobs);
  const DensityMatrix exact = exact_output(res, rot, target);
  const double exactError = trace_distance(exact, target.density());
  const Matrix2 average = average_final_state(runs);
  const auto ev = hermitian_eigenvalues(average - target.density().matrix());
  const double empiricalDistance = 0.5 * (std::abs(ev[0]) + std::abs(ev[1]));

  Sink sink(c.out);
  auto& os = sink.stream();
  if (c.format == "csv") {
    os << "seed,m,stage1_bits,randomized,j,k,total_bits\n";
    for (const auto& t : runs)
      os << *t.seed << ',' << t.outcome << ',' << encode_bits(t.message) << ',' << (t.randomized ? 1 : 0) << ','
         << t.rotation + 1 << ',' << t.k << ',' << csv_number(t.total_bits()) << '\n';
  } else {
    for (const auto& t : runs) os << json(t).dump() << '\n';
  }
  const auto freq = message_frequencies(runs);
  const auto dist = message_distribution(res, rot, target);
  json summary{{"seed", c.seed},
               {"trials", c.trials},
               {"k", rot.size()},
               {"theta_r", res.theta()},
               {"covering_radius_rad", rot.covering_radius()},
               {"message_frequencies", freq},
               {"message_distribution", dist},
               {"trace_distance_average_to_target", empiricalDistance},
               {"exact_output_error", exactError},
               {"exact_check", exactError < 1e-10 ? "pass" : "fail"},
               {"target", matrix_json(target.density().matrix())}};
  if (c.format == "csv") {
    os << "\nsummary,value\n";
    for (const auto& [key, value] : summary.items()) os << key << ',' << value.dump() << '\n';
  } else {
    os << json{{"summary", summary}}.dump() << '\n';
  }
  sink.finish();
}

void cmd_compare_teleport(const Config& c) {
  const ResourceState res = c.thetaR || c.r0 ? resource_for(c) : ResourceState::maximal();
  if (std::abs(res.theta() - kPi / 2) > 1e-12)
    throw InvalidArgument("compare-teleport needs a maximally entangled resource (theta_r = pi/2); the "
                          "equivalence does not hold at theta_r = " + std::to_string(res.theta()));
  const TargetState target = target_for(c);
  const RotationSet rot = build_rotation_set(pole_pair());
  const std::size_t trials = c.trials > 1 ? c.trials : 100000;

  const auto rspExact = message_distribution(res, rot, target);
  const auto tpExact = teleport_outcome_distribution(target.density());
  const auto runs = run_trials(res, rot, target, trials, c.seed, c.jobs);
  const auto rspEmpirical = message_frequencies(runs);
  std::array<double, 4> tpEmpirical{};
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(mix_seed(mix_seed(c.seed, 0x7e1e), t));
    tpEmpirical[teleport(target.density(), rng).outcome] += 1.0;
  }
  for (auto& f : tpEmpirical) f /= static_cast<double>(trials);
  double exactGap = 0.0, empiricalGap = 0.0;
  for (int m = 0; m < 4; ++m) {
    exactGap = std::max(exactGap, std::abs(rspExact[m] - tpExact[m]));
    empiricalGap = std::max(empiricalGap, std::abs(rspEmpirical[m] - tpEmpirical[m]));
  }
  Sink sink(c.out);
  if (c.format == "csv") {
    auto& os = sink.stream();
    os << "message,rsp_exact,teleport_exact,rsp_empirical,teleport_empirical\n";
    for (std::size_t m = 0; m < 4; ++m)
      os << encode_bits(m) << ',' << csv_number(rspExact[m]) << ',' << csv_number(tpExact[m]) << ','
         << csv_number(rspEmpirical[m]) << ',' << csv_number(tpEmpirical[m]) << '\n';
  } else {
    sink.stream() << json{{"seed", c.seed},
                          {"trials", trials},
                          {"rsp_exact", rspExact},
                          {"teleport_exact", tpExact},
                          {"exact_max_deviation", exactGap},
                          {"rsp_empirical", rspEmpirical},
                          {"teleport_empirical", tpEmpirical},
                          {"empirical_max_deviation", empiricalGap}}
                         .dump(2)
                  << '\n';
  }
  sink.finish();
}

}  // namespace

int main(int argc, char** argv) {
  Config cfg;
  CLI::App app{"Remote state preparation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", cfg.seed, "Random seed (default 1)");
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", cfg.out, "Output path (stdout when omitted)");
  app.add_option("--jobs", cfg.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--degrees", cfg.degrees, "Read angles in degrees");

  auto addPointSource = [&](CLI::App* sub) {
    sub->add_option("--k", cfg.k, "Number of antipodal pairs");
    sub->add_option("--method", cfg.method, "koay, minimize or auto")
        ->check(CLI::IsMember({"auto", "koay", "minimize"}));
    sub->add_option("--koay-latitudes", cfg.latitudes, "hemisphere or full")
        ->check(CLI::IsMember({"hemisphere", "full"}));
    sub->add_option("--restarts", cfg.restarts, "Minimizer restarts (0 picks a default)");
  };
  auto addResource = [&](CLI::App* sub) {
    auto* theta = sub->add_option("--theta-r", cfg.thetaR, "Resource angle theta_r");
    auto* r0 = sub->add_option("--r0", cfg.r0, "Larger Schmidt coefficient r0");
    theta->excludes(r0);
    sub->add_option("--target", cfg.target, "Target as p,theta,phi");
    sub->add_option("--trials", cfg.trials, "Number of protocol runs");
  };

  auto* points = app.add_subcommand("points", "Generate an antipodal point set");
  addPointSource(points);
  auto* coverage = app.add_subcommand("coverage", "Covering radius and entanglement bound of a point set");
  addPointSource(coverage);
  coverage->add_option("--points", cfg.pointsFile, "Point file (.csv/.txt or .json)");
  auto* table1 = app.add_subcommand("table1", "Bits against entanglement for a list of K");
  table1->add_option("--ks", cfg.ks, "Comma-separated K values")->delimiter(',');
  table1->add_option("--method", cfg.method, "koay, minimize or auto")
      ->check(CLI::IsMember({"auto", "koay", "minimize"}));
  table1->add_option("--koay-latitudes", cfg.latitudes, "hemisphere or full")
      ->check(CLI::IsMember({"hemisphere", "full"}));
  table1->add_option("--restarts", cfg.restarts, "Minimizer restarts (0 picks a default)");
  auto* rspCmd = app.add_subcommand("rsp", "Run the preparation protocol");
  addPointSource(rspCmd);
  rspCmd->add_option("--points", cfg.pointsFile, "Point file (.csv/.txt or .json)");
  addResource(rspCmd);
  auto* compare = app.add_subcommand("compare-teleport", "Compare stage-1 messages with teleportation outcomes");
  addResource(compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*points) cmd_points(cfg);
    else if (*coverage) cmd_coverage(cfg);
    else if (*table1) cmd_table1(cfg);
    else if (*rspCmd) cmd_rsp(cfg);
    else if (*compare) cmd_compare_teleport(cfg);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitIo;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const InsufficientEntanglement& e) {
    std::cerr << "insufficient entanglement: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
