#ifndef RSP_QUBIT_HPP
#define RSP_QUBIT_HPP

// Single-qubit algebra: Pauli matrices, density matrices and their Bloch-ball
// coordinates, pure states, the two-qubit resource state and its entanglement.

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "rsp/errors.hpp"
#include "rsp/linalg.hpp"

namespace rsp {

using Matrix2 = SquareMatrix<2>;
using Matrix4 = SquareMatrix<4>;

inline constexpr double kPi = std::numbers::pi;

// Tolerance for algebraic identities (Hermiticity, trace, unitarity).
inline constexpr double kAlgebraicTol = 1e-12;
// Tolerance applied to normalized quantities read from files or user input.
inline constexpr double kInputTol = 1e-9;

namespace pauli {

inline const Matrix2& identity() {
  static const Matrix2 m = Matrix2::identity();
  return m;
}
inline const Matrix2& x() {
  static const Matrix2 m({0.0, 1.0, 1.0, 0.0});
  return m;
}
inline const Matrix2& y() {
  static const Matrix2 m({Complex{}, Complex(0.0, -1.0), Complex(0.0, 1.0), Complex{}});
  return m;
}
inline const Matrix2& z() {
  static const Matrix2 m({1.0, 0.0, 0.0, -1.0});
  return m;
}

}  // namespace pauli

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 vec() const { return {x, y, z}; }
  double length() const { return norm(vec()); }
  static BlochVector from(const Vec3& v) { return {v.x, v.y, v.z}; }
};

// Eigenvalues of a Hermitian 2x2 matrix,
// smallest first.
inline std::array<double, 2> hermitian_eigenvalues(const Matrix2& m) {
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const double b = std::abs(0.5 * (m(0, 1) + std::conj(m(1, 0))));
  const double mean = 0.5 * (a + d);
  const double half_gap = std::hypot(0.5 * (a - d), b);
  return {mean - half_gap, mean + half_gap};
}

// A validated qubit density matrix: Hermitian, unit trace, positive semidefinite.
class DensityMatrix {
 public:
  // Throws InvalidState when `rho` violates any invariant by more than `tol`.
  explicit DensityMatrix(const Matrix2& rho, double tol = kAlgebraicTol) : rho_(rho) {
    if (!rho.all_finite()) throw InvalidState("density matrix has non-finite entries");
    if (max_abs_diff(rho, rho.adjoint()) > tol) throw InvalidState("density matrix is not Hermitian");
    if (std::abs(rho.trace() - 1.0) > tol) throw InvalidState("density matrix trace is not 1");
    if (hermitian_eigenvalues(rho)[0] < -tol) throw InvalidState("density matrix is not positive semidefinite");
  }

  static DensityMatrix maximally_mixed() { return DensityMatrix(0.5 * Matrix2::identity()); }

  const Matrix2& matrix() const { return rho_; }
  Complex operator()(std::size_t r, std::size_t c) const { return rho_(r, c); }

  double purity() const { return (rho_ * rho_).trace().real(); }

 private:
  Matrix2 rho_;
};

// (I + x sx + y sy + z sz) / 2
inline DensityMatrix bloch_to_density(const BlochVector& v, double tol = kAlgebraicTol) {
  if (!(v.length() <= 1.0 + tol)) throw InvalidState("Bloch vector lies outside the unit ball");
  const Matrix2 rho = 0.5 * (pauli::identity() + v.x * pauli::x() + v.y * pauli::y() + v.z * pauli::z());
  return DensityMatrix(rho, std::max(tol, kAlgebraicTol));
}

inline BlochVector density_to_bloch(const DensityMatrix& rho) {
  const Matrix2& m = rho.matrix();
  return {(m * pauli::x()).trace().real(), (m * pauli::y()).trace().real(), (m * pauli::z()).trace().real()};
}

// (1/2) tr|a - b|. For qubits this is half the Euclidean distance between
// the Bloch vectors.
inline double trace_distance(const Matrix2& a, const Matrix2& b) {
  const auto ev = hermitian_eigenvalues(a - b);
  return 0.5 * (std::abs(ev[0]) + std::abs(ev[1]));
}

inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  return trace_distance(a.matrix(), b.matrix());
}

// cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>, theta in [0, pi], phi in [0, 2pi).
class PureState {
 public:
  static PureState from_angles(double theta, double phi) {
    if (!(theta >= -kInputTol && theta <= kPi + kInputTol) || !std::isfinite(phi))
      throw InvalidArgument("pure state polar angle must lie in [0, pi]");
    theta = std::clamp(theta, 0.0, kPi);
    phi = std::fmod(phi, 2.0 * kPi);
    if (phi < 0.0) phi += 2.0 * kPi;
    if (phi >= 2.0 * kPi) phi = 0.0;
    return PureState(theta, phi);
  }

  // Pure state whose Bloch vector points along `direction` (normalized here).
  static PureState from_direction(const Vec3& direction) {
    const double n = norm(direction);
    if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("direction must be a non-zero finite vector");
    const Vec3 d = direction * (1.0 / n);
    const double theta = std::atan2(std::hypot(d.x, d.y), d.z);
    const double phi = (d.x == 0.0 && d.y == 0.0) ? 0.0 : std::atan2(d.y, d.x);
    return from_angles(theta, phi);
  }

  double theta() const { return theta_; }
  double phi() const { return phi_; }
  double i0() const { return std::cos(0.5 * theta_); }
  double i1() const { return std::sin(0.5 * theta_); }

  std::array<Complex, 2> amplitudes() const { return {Complex(i0()), std::polar(i1(), phi_)}; }

  Vec3 direction() const {
    return {std::sin(theta_) * std::cos(phi_), std::sin(theta_) * std::sin(phi_), std::cos(theta_)};
  }

  Matrix2 projector() const {
    const auto a = amplitudes();
    Matrix2 m;
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < 2; ++c) m(r, c) = a[r] * std::conj(a[c]);
    return m;
  }

 private:
  PureState(double theta, double phi) : theta_(theta), phi_(phi) {}

  double theta_;
  double phi_;
};

// r0|00> + r1|11> with r0 = cos(theta_r/2) >= r1 = sin(theta_r/2).
class ResourceState {
 public:
  static ResourceState from_theta(double thetaR) {
    if (!(thetaR >= -kInputTol && thetaR <= 0.5 * kPi + kInputTol))
      throw InvalidArgument("theta_r must lie in [0, pi/2]");
    thetaR = std::clamp(thetaR, 0.0, 0.5 * kPi);
    return ResourceState(std::cos(0.5 * thetaR), std::sin(0.5 * thetaR));
  }

  static ResourceState from_r0(double r0) {
    if (!(r0 >= std::sqrt(0.5) - kInputTol && r0 <= 1.0 + kInputTol))
      throw InvalidArgument("r0 must lie in [1/sqrt(2), 1]");
    r0 = std::clamp(r0, std::sqrt(0.5), 1.0);
    return ResourceState(r0, std::sqrt(std::max(0.0, 1.0 - r0 * r0)));
  }

  static ResourceState maximal() { return ResourceState(std::sqrt(0.5), std::sqrt(0.5)); }

  double r0() const { return r0_; }
  double r1() const { return r1_; }
  double theta() const { return 2.0 * std::atan2(r1_, r0_); }

  bool is_maximal(double tol = kInputTol) const { return std::abs(theta() - 0.5 * kPi) <= tol; }

  // Amplitudes in the |AB> basis ordered 00, 01, 10, 11.
  std::array<Complex, 4> amplitudes() const { return {Complex(r0_), Complex{}, Complex{}, Complex(r1_)}; }

 private:
  ResourceState(double r0, double r1) : r0_(r0), r1_(r1) {}

  double r0_;
  double r1_;
};

namespace detail {
inline double entropy_term(double q) { return q > 0.0 ? -q * std::log2(q) : 0.0; }
}  // namespace detail

// Shannon entropy of the distribution {x, 1-x} in bits, with 0 log 0 = 0.
inline double binary_entropy(double x) { return detail::entropy_term(x) + detail::entropy_term(1.0 - x); }

// Von Neumann entropy (bits) of either reduced state of the resource.
inline double entanglement_entropy(const ResourceState& r) {
  return detail::entropy_term(r.r0() * r.r0()) + detail::entropy_term(r.r1() * r.r1());
}

inline double entanglement_entropy_at(double thetaR) {
  return entanglement_entropy(ResourceState::from_theta(thetaR));
}

// cos(angle/2) I - i sin(angle/2) (axis . sigma). Conjugation by the result
// rotates Bloch vectors by `angle` about `axis`.
inline Matrix2 su2_from_axis_angle(const Vec3& axis, double angle) {
  const double n = norm(axis);
  if (!(n > 0.0)) throw InvalidArgument("rotation axis must be non-zero");
  if (std::abs(n - 1.0) > kInputTol) throw InvalidArgument("rotation axis must be a unit vector");
  const Vec3 a = axis * (1.0 / n);
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  const Complex mis(0.0, -s);
  return c * pauli::identity() + mis * (a.x * pauli::x() + a.y * pauli::y() + a.z * pauli::z());
}

inline DensityMatrix conjugate(const Matrix2& u, const DensityMatrix& rho) {
  return DensityMatrix(u * rho.matrix() * u.adjoint(), 1e-10);
}

// Bob's corrections, indexed by the outcome m: I, s3, s1, -s3 s1.
inline const std::array<Matrix2, 4>& correction_unitaries() {
  static const std::array<Matrix2, 4> us{pauli::identity(), pauli::z(), pauli::x(),
                                         -(pauli::z() * pauli::x())};
  return us;
}

inline bool is_unitary(const Matrix2& u, double tol = kAlgebraicTol) {
  return max_abs_diff(u * u.adjoint(), Matrix2::identity()) <= tol;
}

}  // namespace rsp

#endif  // RSP_QUBIT_HPP
