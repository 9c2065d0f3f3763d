#ifndef RSP_POINTSETS_HPP
#define RSP_POINTSETS_HPP

// Antipodally symmetric point sets on the unit sphere.
//
// Three sources are supported: Koay's deterministic ring construction (good
// for K in the hundreds and beyond), an electrostatic-energy minimizer for
// small K, and plain-text / JSON files holding externally tabulated sets.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rsp/errors.hpp"
#include "rsp/linalg.hpp"
#include "rsp/qubit.hpp"
#include "rsp/random.hpp"

namespace rsp {

enum class PointSource { koay, minimized, loaded, analytic };

inline std::string to_string(PointSource s) {
  switch (s) {
    case PointSource::koay: return "koay";
    case PointSource::minimized: return "minimized";
    case PointSource::loaded: return "loaded";
    case PointSource::analytic: return "analytic";
  }
  return "unknown";
}

// Points closer than this (in radians) count as the same point.
inline constexpr double kCoincidenceAngle = 1e-6;

// 2K unit vectors closed under negation.
class SphericalPointSet {
 public:
  // Validates unit norm, antipodal closure and pairwise distinctness.
  SphericalPointSet(std::vector<Vec3> points, PointSource source, double tol = kInputTol)
      : points_(std::move(points)), source_(source) {
    if (points_.size() < 2 || points_.size() % 2 != 0)
      throw ValidationError("point set must hold an even number (>= 2) of points");
    for (const Vec3& p : points_)
      if (!(std::abs(norm(p) - 1.0) <= tol)) throw ValidationError("point set contains a non-unit vector");
    const double closeCos = std::cos(kCoincidenceAngle);
    for (std::size_t a = 0; a < points_.size(); ++a) {
      bool hasAntipode = false;
      for (std::size_t b = 0; b < points_.size(); ++b) {
        const double d = dot(points_[a], points_[b]);
        if (b > a && d >= closeCos) throw ValidationError("point set contains coincident points");
        if (norm(points_[a] + points_[b]) <= tol) hasAntipode = true;
      }
      if (!hasAntipode) throw ValidationError("point set is not antipodally symmetric");
    }
  }

  const std::vector<Vec3>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  std::size_t k() const { return points_.size() / 2; }
  PointSource source() const { return source_; }
  const Vec3& operator[](std::size_t i) const { return points_[i]; }

 private:
  std::vector<Vec3> points_;
  PointSource source_;
};

// Appends -q for every q without an antipode already present, and drops
// repeated points.
inline std::vector<Vec3> symmetrize(const std::vector<Vec3>& input, double tol = kInputTol) {
  const double closeCos = std::cos(kCoincidenceAngle);
  std::vector<Vec3> out;
  out.reserve(2 * input.size());
  auto contains = [&](const Vec3& q) {
    return std::any_of(out.begin(), out.end(), [&](const Vec3& p) { return dot(p, q) >= closeCos; });
  };
  for (const Vec3& q : input)
    if (!contains(q)) out.push_back(q);
  const std::size_t base = out.size();
  for (std::size_t a = 0; a < base; ++a) {
    const Vec3 anti = -out[a];
    bool found = false;
    for (const Vec3& p : out)
      if (norm(p - anti) <= tol) {
        found = true;
        break;
      }
    if (!found) out.push_back(anti);
  }
  return out;
}

// The pair {+z, -z}: the single cap pair used with a maximal resource.
inline SphericalPointSet pole_pair() { return SphericalPointSet({kZAxis, -kZAxis}, PointSource::analytic); }

// ---------------------------------------------------------------------------
// Koay ring construction

// Which latitude grid the rings use. The hemisphere grid places [N] rings in
// the open upper hemisphere, theta_i = (i - 1/2) pi / (2 [N]), and mirrors them;
// the full-sphere grid spreads them over (0, pi) with theta_i = (i - 1/2) pi / [N].
// The ring weights sin(pi / (4 [N])) only sum to K on the hemisphere grid.
enum class KoayLatitudes { hemisphere, full_sphere };

inline std::string to_string(KoayLatitudes l) {
  return l == KoayLatitudes::hemisphere ? "hemisphere" : "full_sphere";
}

struct KoayLayout {
  double ringEquationRoot = 0.0;  // N solving N = (K/2) sin(pi / (4N))
  std::size_t ringCount = 0;      // [N]
  std::vector<double> latitudes;  // theta_i, strictly increasing
  std::vector<std::size_t> ringSizes;
};

inline std::int64_t round_half_away(double x) {
  return static_cast<std::int64_t>(x < 0.0 ? -std::floor(-x + 0.5) : std::floor(x + 0.5));
}

// Fixed point of N = (K/2) sin(pi/(4N)). The plain iteration has slope close
// to -1 at the root, so it switches to half-damped updates once it oscillates.
inline double koay_ring_equation_root(std::size_t k) {
  const double half = 0.5 * static_cast<double>(k);
  double n = std::sqrt(kPi * static_cast<double>(k) / 8.0);
  double damping = 1.0;
  double prevDelta = 0.0;
  for (int iter = 0; iter < 10000; ++iter) {
    const double delta = half * std::sin(kPi / (4.0 * n)) - n;
    if (std::abs(delta) < 1e-12) break;
    if (prevDelta != 0.0 && (delta > 0.0) != (prevDelta > 0.0)) damping = 0.5;
    n += damping * delta;
    prevDelta = delta;
  }
  return n;
}

inline KoayLayout koay_layout(std::size_t k, KoayLatitudes grid = KoayLatitudes::hemisphere) {
  if (k < 2) throw InvalidArgument("Koay construction needs K >= 2");
  KoayLayout layout;
  layout.ringEquationRoot = koay_ring_equation_root(k);
  const std::int64_t rings = std::max<std::int64_t>(1, round_half_away(layout.ringEquationRoot));
  layout.ringCount = static_cast<std::size_t>(rings);

  const double span = grid == KoayLatitudes::hemisphere ? 0.5 * kPi : kPi;
  const double weight = 2.0 * std::sin(kPi / (4.0 * static_cast<double>(rings)));
  std::int64_t assigned = 0;
  for (std::int64_t i = 1; i <= rings; ++i) {
    const double theta = (static_cast<double>(i) - 0.5) * span / static_cast<double>(rings);
    layout.latitudes.push_back(theta);
    std::int64_t size = 0;
    if (i < rings) {
      size = round_half_away(weight * std::sin(theta) * static_cast<double>(k));
    } else {
      size = static_cast<std::int64_t>(k) - assigned;
      if (size < 0) throw InvalidArgument("Koay layout over-assigns points for this K");
    }
    assigned += size;
    layout.ringSizes.push_back(static_cast<std::size_t>(size));
  }
  return layout;
}

// K ring points plus their antipodes. On the full-sphere grid some antipodes
// coincide with constructed points and are merged, so fewer than 2K remain.
inline SphericalPointSet koay_points(std::size_t k, KoayLatitudes grid = KoayLatitudes::hemisphere) {
  const KoayLayout layout = koay_layout(k, grid);
  std::vector<Vec3> pts;
  pts.reserve(2 * k);
  for (std::size_t i = 0; i < layout.ringCount; ++i) {
    const double theta = layout.latitudes[i];
    const std::size_t n = layout.ringSizes[i];
    for (std::size_t j = 1; j <= n; ++j) {
      const double phi = (static_cast<double>(j) - 0.5) * 2.0 * kPi / static_cast<double>(n);
      pts.push_back({std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)});
    }
  }
  return SphericalPointSet(symmetrize(pts), PointSource::koay);
}

// ---------------------------------------------------------------------------
// Electrostatic minimization

// Coulomb energy of the 2K-point set {q_a} u {-q_a}.
inline double antipodal_coulomb_energy(const std::vector<Vec3>& half) {
  const std::size_t k = half.size();
  double e = 0.5 * static_cast<double>(k);  // each |q - (-q)| = 2
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b)
      e += 2.0 / norm(half[a] - half[b]) + 2.0 / norm(half[a] + half[b]);
  return e;
}

inline double coulomb_energy(const std::vector<Vec3>& pts) {
  double e = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b) e += 1.0 / norm(pts[a] - pts[b]);
  return e;
}

struct MinimizeRun {
  double initialEnergy = 0.0;
  double finalEnergy = 0.0;
  std::size_t iterations = 0;
};

struct MinimizeResult {
  SphericalPointSet points;
  double energy;
  std::size_t bestRestart;
  std::vector<MinimizeRun> runs;
};

struct MinimizeOptions {
  std::size_t maxIterations = 20000;
  double energyTol = 1e-12;
};

inline std::size_t default_restarts(std::size_t k) { return k <= 32 ? 8 : 4; }

namespace detail {

// Tangential gradient of the antipodal Coulomb energy with respect to each q_a.
inline std::vector<Vec3> antipodal_energy_gradient(const std::vector<Vec3>& half) {
  const std::size_t k = half.size();
  std::vector<Vec3> grad(k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) {
      const Vec3 dm = half[a] - half[b];
      const Vec3 dp = half[a] + half[b];
      const double nm = norm(dm);
      const double np = norm(dp);
      const Vec3 fm = dm * (2.0 / (nm * nm * nm));
      const Vec3 fp = dp * (2.0 / (np * np * np));
      grad[a] -= fm + fp;
      grad[b] += fm - fp;
    }
  for (std::size_t a = 0; a < k; ++a) grad[a] -= half[a] * dot(grad[a], half[a]);
  return grad;
}

// Steps are only accepted when they strictly lower the energy.
inline MinimizeRun descend(std::vector<Vec3>& half, const MinimizeOptions& opt) {
  MinimizeRun run;
  double energy = antipodal_coulomb_energy(half);
  run.initialEnergy = energy;
  double step = 0.1 / static_cast<double>(half.size());
  std::vector<Vec3> trial(half.size());
  for (; run.iterations < opt.maxIterations; ++run.iterations) {
    const auto grad = antipodal_energy_gradient(half);
    bool accepted = false;
    double trialEnergy = energy;
    while (step > 1e-16) {
      for (std::size_t a = 0; a < half.size(); ++a) trial[a] = normalized(half[a] - grad[a] * step);
      trialEnergy = antipodal_coulomb_energy(trial);
      if (trialEnergy < energy) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const double change = energy - trialEnergy;
    half.swap(trial);
    energy = trialEnergy;
    step *= 1.5;
    if (change < opt.energyTol) break;
  }
  run.finalEnergy = energy;
  return run;
}

}  // namespace detail

// Best-of-`restarts` projected gradient descent over K free unit vectors,
// each paired with its antipode. Restart r starts from uniform random points
// drawn from a stream derived from (seed, r).
inline MinimizeResult minimize_points(std::size_t k, std::uint64_t seed, std::size_t restarts,
                                      const MinimizeOptions& opt = {}) {
  if (k == 0) throw InvalidArgument("minimizer needs K >= 1");
  restarts = std::max<std::size_t>(restarts, 1);
  std::vector<MinimizeRun> runs;
  std::vector<Vec3> best;
  double bestEnergy = 0.0;
  std::size_t bestRestart = 0;
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng(mix_seed(seed, r));
    std::vector<Vec3> half(k);
    for (auto& q : half) q = random_unit_vector(rng);
    runs.push_back(detail::descend(half, opt));
    if (best.empty() || runs.back().finalEnergy < bestEnergy) {
      best = half;
      bestEnergy = runs.back().finalEnergy;
      bestRestart = r;
    }
  }
  std::vector<Vec3> full = best;
  for (const Vec3& q : best) full.push_back(-q);
  return {SphericalPointSet(std::move(full), PointSource::minimized), bestEnergy, bestRestart, std::move(runs)};
}

// ---------------------------------------------------------------------------
// File I/O
//
// Text format: one `x,y,z` point per line, `#` starts a comment line. Files
// ending in `.json` hold an array of [x, y, z] triples instead.

// Accepted slack on |q| before a loaded vector is renormalized.
inline constexpr double kLoadNormTol = 1e-6;

namespace detail {

inline bool has_json_extension(const std::string& path) {
  return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
}

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_number(std::string_view field, std::size_t line) {
  const std::string text(trim(field));
  if (text.empty()) throw ParseError("empty coordinate", line);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ParseError("invalid number '" + text + "'", line);
  }
  if (used != text.size() || !std::isfinite(v)) throw ParseError("invalid number '" + text + "'", line);
  return v;
}

inline Vec3 checked_unit(const Vec3& v, std::size_t line) {
  const double n = norm(v);
  if (!(std::abs(n - 1.0) <= kLoadNormTol))
    throw ValidationError("point on line " + std::to_string(line) + " is not a unit vector (norm " +
                          std::to_string(n) + ")");
  return v * (1.0 / n);
}

}  // namespace detail

inline std::vector<Vec3> parse_point_text(std::istream& in) {
  std::vector<Vec3> pts;
  std::string raw;
  for (std::size_t line = 1; std::getline(in, raw); ++line) {
    const std::string_view s = detail::trim(raw);
    if (s.empty() || s.front() == '#') continue;
    std::array<double, 3> c{};
    std::size_t field = 0;
    std::size_t start = 0;
    for (;;) {
      const auto comma = s.find(',', start);
      if (field == 3) throw ParseError("expected exactly three comma-separated fields", line);
      c[field++] = detail::parse_number(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start), line);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (field != 3) throw ParseError("expected exactly three comma-separated fields", line);
    pts.push_back(detail::checked_unit({c[0], c[1], c[2]}, line));
  }
  return pts;
}

inline std::vector<Vec3> parse_point_json(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON point file: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("JSON point file must be an array of [x, y, z]");
  std::vector<Vec3> pts;
  std::size_t index = 0;
  for (const auto& row : doc) {
    ++index;
    if (!row.is_array() || row.size() != 3 || !row[0].is_number() || !row[1].is_number() || !row[2].is_number())
      throw ParseError("entry is not a numeric [x, y, z] triple", index);
    pts.push_back(detail::checked_unit({row[0].get<double>(), row[1].get<double>(), row[2].get<double>()}, index));
  }
  return pts;
}

// Reads a point file, renormalizes near-unit vectors and adds any missing
// antipodes. For JSON input the reported "line" is the 1-based array index.
inline SphericalPointSet load_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open point file '" + path + "'");
  std::vector<Vec3> pts = detail::has_json_extension(path) ? parse_point_json(in) : parse_point_text(in);
  if (pts.empty()) throw ParseError("point file '" + path + "' holds no points");
  return SphericalPointSet(symmetrize(pts), PointSource::loaded);
}

inline std::string format_coordinate(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_points(std::ostream& out, const SphericalPointSet& set, bool json) {
  if (json) {
    out << "[\n";
    for (std::size_t i = 0; i < set.size(); ++i) {
      const Vec3& p = set[i];
      out << "  [" << format_coordinate(p.x) << ", " << format_coordinate(p.y) << ", " << format_coordinate(p.z)
          << (i + 1 < set.size() ? "],\n" : "]\n");
    }
    out << "]\n";
    return;
  }
  for (const Vec3& p : set.points())
    out << format_coordinate(p.x) << ',' << format_coordinate(p.y) << ',' << format_coordinate(p.z) << '\n';
}

inline void write_points(const std::string& path, const SphericalPointSet& set) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write point file '" + path + "'");
  write_points(out, set, detail::has_json_extension(path));
  if (!out) throw IoError("failed while writing '" + path + "'");
}

}  // namespace rsp

#endif  // RSP_POINTSETS_HPP
