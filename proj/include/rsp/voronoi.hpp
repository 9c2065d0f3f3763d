#ifndef RSP_VORONOI_HPP
#define RSP_VORONOI_HPP

// Spherical Voronoi diagrams and covering radii.
//
// For points on the unit sphere the spherical Delaunay triangulation is the
// convex hull, and the Voronoi vertices are the outward unit normals of the
// hull faces. The covering radius (largest distance from any direction to its
// nearest site) is attained at one of those vertices.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "rsp/errors.hpp"
#include "rsp/linalg.hpp"
#include "rsp/pointsets.hpp"
#include "rsp/qubit.hpp"

namespace rsp {

using Triangle = std::array<std::size_t, 3>;

// Points within this distance of a face plane count as lying on it.
inline constexpr double kCoplanarTol = 1e-12;

struct SphericalVoronoi {
  std::vector<Vec3> sites;
  std::vector<Triangle> triangles;  // counter-clockwise seen from outside
  std::vector<Vec3> vertices;       // vertices[f] is the circumcenter of triangles[f]
  bool planar = false;              // all sites on one circle; the hull is a doubled polygon
};

namespace detail {

class IncrementalHull {
 public:
  explicit IncrementalHull(const std::vector<Vec3>& pts) : pts_(pts) {}

  // Returns false when every point lies in one plane.
  bool build() {
    const auto seed = initial_simplex();
    if (!seed) return false;
    const auto [a, b, c, d] = *seed;
    add_face(a, b, c);
    add_face(a, c, d);
    add_face(a, d, b);
    add_face(b, d, c);
    std::vector<bool> used(pts_.size(), false);
    for (std::size_t i : {a, b, c, d}) used[i] = true;
    for (std::size_t p = 0; p < pts_.size(); ++p)
      if (!used[p]) insert(p);
    return true;
  }

  std::vector<Triangle> faces() const {
    std::vector<Triangle> out;
    for (const auto& f : faces_)
      if (f.alive) out.push_back(f.v);
    return out;
  }

 private:
  struct Face {
    Triangle v;
    Vec3 normal;  // unit, outward
    double offset;
    bool alive;
  };

  static std::uint64_t edge_key(std::size_t a, std::size_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
  }

  std::optional<std::array<std::size_t, 4>> initial_simplex() const {
    const std::size_t n = pts_.size();
    const std::size_t a = 0;
    std::size_t b = 1;
    double best = 0.0;
    for (std::size_t i = 1; i < n; ++i)
      if (const double d = norm(pts_[i] - pts_[a]); d > best) best = d, b = i;
    std::size_t c = 0;
    best = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (const double d = norm(cross(pts_[b] - pts_[a], pts_[i] - pts_[a])); d > best) best = d, c = i;
    if (best <= kCoplanarTol) return std::nullopt;
    const Vec3 nrm = normalized(cross(pts_[b] - pts_[a], pts_[c] - pts_[a]));
    std::size_t d = 0;
    best = 0.0;
    double signedBest = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double h = dot(nrm, pts_[i] - pts_[a]);
      if (std::abs(h) > best) best = std::abs(h), signedBest = h, d = i;
    }
    if (best <= kCoplanarTol) return std::nullopt;
    // Put d below the plane of (a, b, c) so that (a, b, c) faces outward.
    if (signedBest > 0.0) std::swap(b, c);
    return std::array<std::size_t, 4>{a, b, c, d};
  }

  void add_face(std::size_t a, std::size_t b, std::size_t c) {
    Face f{{a, b, c}, {}, 0.0, true};
    f.normal = normalized(cross(pts_[b] - pts_[a], pts_[c] - pts_[a]));
    f.offset = dot(f.normal, pts_[a]);
    const std::size_t id = faces_.size();
    faces_.push_back(f);
    edges_[edge_key(a, b)] = id;
    edges_[edge_key(b, c)] = id;
    edges_[edge_key(c, a)] = id;
  }

  bool visible(const Face& f, std::size_t p) const { return dot(f.normal, pts_[p]) - f.offset > -kCoplanarTol; }

  void insert(std::size_t p) {
    // Faces the new point lies on count as visible: on a sphere such a point
    // is cocircular with the face and must become a hull vertex.
    std::vector<std::size_t> seen;
    for (std::size_t id = 0; id < faces_.size(); ++id)
      if (faces_[id].alive && visible(faces_[id], p)) seen.push_back(id);
    if (seen.empty())
      throw DegeneracyError("point lies inside the hull; input is not on a common sphere");

    std::vector<bool> isSeen(faces_.size(), false);
    for (std::size_t id : seen) isSeen[id] = true;
    std::vector<std::pair<std::size_t, std::size_t>> horizon;
    for (std::size_t id : seen) {
      const Triangle& t = faces_[id].v;
      for (int e = 0; e < 3; ++e) {
        const std::size_t u = t[e];
        const std::size_t w = t[(e + 1) % 3];
        const auto twin = edges_.find(edge_key(w, u));
        if (twin == edges_.end()) throw DegeneracyError("hull lost an edge twin");
        if (!isSeen[twin->second]) horizon.emplace_back(u, w);
      }
    }
    for (std::size_t id : seen) {
      faces_[id].alive = false;
      const Triangle& t = faces_[id].v;
      for (int e = 0; e < 3; ++e) edges_.erase(edge_key(t[e], t[(e + 1) % 3]));
    }
    for (const auto& [u, w] : horizon) add_face(u, w, p);
  }

  const std::vector<Vec3>& pts_;
  std::vector<Face> faces_;
  std::unordered_map<std::uint64_t, std::size_t> edges_;
};

// All sites on one circle: triangulate the polygon as a fan on both sides.
inline SphericalVoronoi planar_diagram(const std::vector<Vec3>& sites) {
  const std::size_t n = sites.size();
  Vec3 axis{};
  for (std::size_t i = 1; i < n && norm(axis) < 1e-6; ++i)
    for (std::size_t j = i + 1; j < n && norm(axis) < 1e-6; ++j) axis = cross(sites[i] - sites[0], sites[j] - sites[0]);
  if (norm(axis) < 1e-6) throw DegeneracyError("sites do not span a plane");
  axis = normalized(axis);
  const Vec3 u = normalized(sites[0] - axis * dot(axis, sites[0]));
  const Vec3 v = cross(axis, u);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::vector<double> angle(n);
  for (std::size_t i = 0; i < n; ++i) angle[i] = std::atan2(dot(sites[i], v), dot(sites[i], u));
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return angle[a] < angle[b]; });

  SphericalVoronoi out;
  out.sites = sites;
  out.planar = true;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out.triangles.push_back({order[0], order[i], order[i + 1]});
    out.vertices.push_back(axis);
    out.triangles.push_back({order[0], order[i + 1], order[i]});
    out.vertices.push_back(-axis);
  }
  return out;
}

}  // namespace detail

// Outward unit normal of the plane through a, b, c, i.e. the point of the
// sphere equidistant from all three (oriented toward their centroid).
inline Vec3 spherical_circumcenter(const Vec3& a, const Vec3& b, const Vec3& c) {
  Vec3 n = normalized(cross(b - a, c - a));
  if (dot(n, a + b + c) < 0.0) n = -n;
  return n;
}

inline SphericalVoronoi build_voronoi(const std::vector<Vec3>& sites) {
  if (sites.size() < 4) throw DegeneracyError("a spherical Voronoi diagram needs at least 4 sites");
  const double closeCos = std::cos(kCoincidenceAngle);
  for (std::size_t a = 0; a < sites.size(); ++a)
    for (std::size_t b = a + 1; b < sites.size(); ++b)
      if (dot(sites[a], sites[b]) >= closeCos) throw DegeneracyError("coincident sites");

  detail::IncrementalHull hull(sites);
  if (!hull.build()) return detail::planar_diagram(sites);

  SphericalVoronoi out;
  out.sites = sites;
  out.triangles = hull.faces();
  out.vertices.reserve(out.triangles.size());
  for (const Triangle& t : out.triangles)
    out.vertices.push_back(spherical_circumcenter(sites[t[0]], sites[t[1]], sites[t[2]]));
  return out;
}

inline SphericalVoronoi build_voronoi(const SphericalPointSet& points) { return build_voronoi(points.points()); }

// ---------------------------------------------------------------------------

inline constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();

struct CoverageReport {
  std::size_t k = 0;
  double totalBits = 0.0;            // 2 + log2 K
  double coveringRadius = 0.0;       // radians
  double thetaRLowerBound = 0.0;     // radians, equal to coveringRadius
  double entanglementLowerBound = 0.0;  // bits
  std::size_t argmaxSite = kNoIndex;
  std::size_t argmaxVertex = kNoIndex;
};

inline double total_bits(std::size_t k) { return 2.0 + std::log2(static_cast<double>(k)); }

inline CoverageReport make_report(std::size_t k, double radius, std::size_t site, std::size_t vertex) {
  CoverageReport r;
  r.k = k;
  r.totalBits = total_bits(k);
  r.coveringRadius = radius;
  r.thetaRLowerBound = radius;
  r.entanglementLowerBound = entanglement_entropy_at(std::min(radius, 0.5 * kPi));
  r.argmaxSite = site;
  r.argmaxVertex = vertex;
  return r;
}

// Largest site-to-vertex angle. Each vertex is measured against the nearest
// of its three generating sites.
inline CoverageReport covering_radius(const SphericalVoronoi& v) {
  double best = -1.0;
  std::size_t bestSite = kNoIndex;
  std::size_t bestVertex = kNoIndex;
  for (std::size_t f = 0; f < v.triangles.size(); ++f) {
    double nearest = std::numeric_limits<double>::infinity();
    std::size_t nearestSite = kNoIndex;
    for (std::size_t s : v.triangles[f])
      if (const double d = angle_between(v.vertices[f], v.sites[s]); d < nearest) nearest = d, nearestSite = s;
    if (nearest > best) best = nearest, bestSite = nearestSite, bestVertex = f;
  }
  return make_report(v.sites.size() / 2, best, bestSite, bestVertex);
}

// Covering report for any antipodal set, including the single pair {q, -q}
// whose "diagram" is the great circle orthogonal to q.
inline CoverageReport analyze_coverage(const SphericalPointSet& points) {
  if (points.size() == 2) return make_report(1, 0.5 * kPi, 0, kNoIndex);
  return covering_radius(build_voronoi(points));
}

// One column of the bits-versus-entanglement table.
inline CoverageReport table_row(std::size_t k, const SphericalPointSet& points) {
  if (points.size() != 2 * k)
    throw InvalidArgument("table row for K=" + std::to_string(k) + " needs " + std::to_string(2 * k) +
                          " points, got " + std::to_string(points.size()));
  return analyze_coverage(points);
}

// True when the resource's caps are wide enough to cover every Voronoi cell.
inline bool validate_coverage(const ResourceState& r, const CoverageReport& report, double tol = kInputTol) {
  return r.theta() >= report.coveringRadius - tol;
}

inline void to_json(nlohmann::json& j, const CoverageReport& r) {
  auto index = [](std::size_t i) { return i == kNoIndex ? nlohmann::json(nullptr) : nlohmann::json(i); };
  j = nlohmann::json{{"k", r.k},
                     {"total_bits", r.totalBits},
                     {"covering_radius_rad", r.coveringRadius},
                     {"theta_r_lower_bound_rad", r.thetaRLowerBound},
                     {"e_lower_bound_bits", r.entanglementLowerBound},
                     {"argmax_site", index(r.argmaxSite)},
                     {"argmax_vertex", index(r.argmaxVertex)}};
}

}  // namespace rsp

#endif  // RSP_VORONOI_HPP
