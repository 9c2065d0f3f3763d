#ifndef RSP_TESTS_ORACLES_HPP
#define RSP_TESTS_ORACLES_HPP

// Independent reference computations used to check the library. Nothing here
// calls the routine it is meant to verify.

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "rsp/linalg.hpp"

namespace oracle {

using rsp::Complex;
using rsp::Vec3;
using Mat2 = std::array<std::array<Complex, 2>, 2>;

inline constexpr double kPi = 3.14159265358979323846;

// Bob's unnormalized state tr_A((M (x) I)|r><r|) from the explicit 4x4 joint
// operator, with basis index 2*a + b for (Alice a, Bob b).
inline Mat2 bob_state_via_joint(double r0, double r1, const Mat2& aliceOp) {
  std::array<Complex, 4> psi{r0, 0.0, 0.0, r1};
  std::array<std::array<Complex, 4>, 4> joint{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      // (M (x) I) |psi><psi|
      Complex acc = 0.0;
      for (int k = 0; k < 4; ++k) {
        const int ai = i / 2, bi = i % 2, ak = k / 2, bk = k % 2;
        const Complex op = (bi == bk) ? aliceOp[ai][ak] : Complex(0.0);
        acc += op * psi[k] * std::conj(psi[j]);
      }
      joint[i][j] = acc;
    }
  Mat2 bob{};
  for (int b = 0; b < 2; ++b)
    for (int bp = 0; bp < 2; ++bp)
      for (int a = 0; a < 2; ++a) bob[b][bp] += joint[2 * a + b][2 * a + bp];
  return bob;
}

// <psi|(M (x) I)|psi> for the same resource.
inline double outcome_probability_via_joint(double r0, double r1, const Mat2& aliceOp) {
  const Mat2 bob = bob_state_via_joint(r0, r1, aliceOp);
  return (bob[0][0] + bob[1][1]).real();
}

// Quasi-uniform Fibonacci lattice on the sphere.
inline std::vector<Vec3> fibonacci_sphere(std::size_t n) {
  std::vector<Vec3> out;
  out.reserve(n);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
    const double r = std::sqrt(1.0 - z * z);
    const double phi = golden * static_cast<double>(i);
    out.push_back({r * std::cos(phi), r * std::sin(phi), z});
  }
  return out;
}

// Typical spacing between neighbouring probes of an n-point lattice.
inline double probe_spacing(std::size_t n) { return std::sqrt(4.0 * kPi / static_cast<double>(n)); }

// max over probes of the angle to the nearest site.
inline double brute_force_covering_radius(const std::vector<Vec3>& sites, std::size_t probes) {
  double worst = 0.0;
  for (const Vec3& q : fibonacci_sphere(probes)) {
    double bestDot = -2.0;
    for (const Vec3& s : sites) bestDot = std::max(bestDot, q.x * s.x + q.y * s.y + q.z * s.z);
    worst = std::max(worst, std::acos(std::min(1.0, bestDot)));
  }
  return worst;
}

// Rotation of v about a unit axis via v cos + (k x v) sin + k (k . v)(1 - cos).
inline Vec3 rotate(const Vec3& axis, double angle, const Vec3& v) {
  const double c = std::cos(angle), s = std::sin(angle);
  const Vec3 kxv{axis.y * v.z - axis.z * v.y, axis.z * v.x - axis.x * v.z, axis.x * v.y - axis.y * v.x};
  const double kv = axis.x * v.x + axis.y * v.y + axis.z * v.z;
  return {v.x * c + kxv.x * s + axis.x * kv * (1 - c), v.y * c + kxv.y * s + axis.y * kv * (1 - c),
          v.z * c + kxv.z * s + axis.z * kv * (1 - c)};
}

// Pure-state teleportation on an explicit 8-amplitude state vector
// (input, Alice, Bob). Returns Bob's normalized, uncorrected state after the
// Bell outcome `m` (Phi+, Phi-, Psi+, Psi-) and that outcome's probability.
struct TeleportBranch {
  double probability;
  std::array<Complex, 2> bob;
};

inline TeleportBranch teleport_state_vector(const std::array<Complex, 2>& input, int m) {
  const double h = std::sqrt(0.5);
  std::array<Complex, 8> psi{};
  for (int q = 0; q < 2; ++q) {
    psi[4 * q + 0] += input[q] * h;  // |q 0 0>
    psi[4 * q + 3] += input[q] * h;  // |q 1 1>
  }
  const std::array<std::array<double, 4>, 4> bell{{{h, 0, 0, h}, {h, 0, 0, -h}, {0, h, h, 0}, {0, h, -h, 0}}};
  std::array<Complex, 2> bob{};
  for (int b = 0; b < 2; ++b)
    for (int ab = 0; ab < 4; ++ab) bob[b] += bell[m][ab] * psi[2 * ab + b];
  const double p = std::norm(bob[0]) + std::norm(bob[1]);
  if (p > 0) {
    bob[0] /= std::sqrt(p);
    bob[1] /= std::sqrt(p);
  }
  return {p, bob};
}

}  // namespace oracle

#endif  // RSP_TESTS_ORACLES_HPP
