#ifndef RSP_LINALG_HPP
#define RSP_LINALG_HPP

// Fixed-size real 3-vectors, 3x3 rotations and small dense complex matrices.
// Everything here is a value type; sizes are compile-time constants so the
// 2x2 qubit algebra and the 4x4 / 8x8 oracle computations share one template.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <ostream>

namespace rsp {

using Complex = std::complex<double>;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x; y += o.y; z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x; y -= o.y; z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s; y *= s; z *= s;
    return *this;
  }

  friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Vec3& v) {
    return os << '(' << v.x << ", " << v.y << ", " << v.z << ')';
  }
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalized(const Vec3& v) { return v * (1.0 / norm(v)); }

// Geodesic distance between two unit vectors, robust near 0 and pi.
inline double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(norm(cross(a, b)), dot(a, b));
}

inline constexpr Vec3 kXAxis{1.0, 0.0, 0.0};
inline constexpr Vec3 kYAxis{0.0, 1.0, 0.0};
inline constexpr Vec3 kZAxis{0.0, 0.0, 1.0};

// Real 3x3 matrix, used for SO(3) rotations of Bloch vectors.
class Rotation3 {
 public:
  constexpr Rotation3() : m_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}
  explicit constexpr Rotation3(const std::array<double, 9>& rowMajor) : m_(rowMajor) {}

  // Rodrigues formula; `axis` must be a unit vector.
  static Rotation3 from_axis_angle(const Vec3& axis, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const double t = 1.0 - c;
    const auto [x, y, z] = std::array<double, 3>{axis.x, axis.y, axis.z};
    return Rotation3({t * x * x + c,     t * x * y - s * z, t * x * z + s * y,
                      t * x * y + s * z, t * y * y + c,     t * y * z - s * x,
                      t * x * z - s * y, t * y * z + s * x, t * z * z + c});
  }

  constexpr double operator()(std::size_t r, std::size_t c) const { return m_[3 * r + c]; }

  constexpr Vec3 apply(const Vec3& v) const {
    return {m_[0] * v.x + m_[1] * v.y + m_[2] * v.z,
            m_[3] * v.x + m_[4] * v.y + m_[5] * v.z,
            m_[6] * v.x + m_[7] * v.y + m_[8] * v.z};
  }

  constexpr Rotation3 transposed() const {
    return Rotation3({m_[0], m_[3], m_[6], m_[1], m_[4], m_[7], m_[2], m_[5], m_[8]});
  }

  friend constexpr Rotation3 operator*(const Rotation3& a, const Rotation3& b) {
    std::array<double, 9> out{};
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t k = 0; k < 3; ++k) out[3 * r + c] += a(r, k) * b(k, c);
    return Rotation3(out);
  }

 private:
  std::array<double, 9> m_;
};

// Dense N x N complex matrix, row-major.
template <std::size_t N>
class SquareMatrix {
 public:
  static constexpr std::size_t dim = N;

  constexpr SquareMatrix() : a_{} {}
  explicit constexpr SquareMatrix(const std::array<Complex, N * N>& rowMajor) : a_(rowMajor) {}

  static constexpr SquareMatrix identity() {
    SquareMatrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }

  constexpr Complex& operator()(std::size_t r, std::size_t c) { return a_[N * r + c]; }
  constexpr const Complex& operator()(std::size_t r, std::size_t c) const { return a_[N * r + c]; }

  constexpr const std::array<Complex, N * N>& entries() const { return a_; }

  SquareMatrix& operator+=(const SquareMatrix& o) {
    for (std::size_t k = 0; k < N * N; ++k) a_[k] += o.a_[k];
    return *this;
  }
  SquareMatrix& operator-=(const SquareMatrix& o) {
    for (std::size_t k = 0; k < N * N; ++k) a_[k] -= o.a_[k];
    return *this;
  }
  SquareMatrix& operator*=(Complex s) {
    for (auto& v : a_) v *= s;
    return *this;
  }

  friend SquareMatrix operator+(SquareMatrix a, const SquareMatrix& b) { return a += b; }
  friend SquareMatrix operator-(SquareMatrix a, const SquareMatrix& b) { return a -= b; }
  friend SquareMatrix operator*(SquareMatrix a, Complex s) { return a *= s; }
  friend SquareMatrix operator*(Complex s, SquareMatrix a) { return a *= s; }
  friend SquareMatrix operator*(SquareMatrix a, double s) { return a *= Complex(s); }
  friend SquareMatrix operator*(double s, SquareMatrix a) { return a *= Complex(s); }
  SquareMatrix operator-() const { return *this * -1.0; }

  friend SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
    SquareMatrix out;
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t k = 0; k < N; ++k) {
        const Complex ark = a(r, k);
        if (ark == Complex{}) continue;
        for (std::size_t c = 0; c < N; ++c) out(r, c) += ark * b(k, c);
      }
    return out;
  }

  SquareMatrix adjoint() const {
    SquareMatrix out;
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t c = 0; c < N; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
  }

  SquareMatrix transpose() const {
    SquareMatrix out;
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t c = 0; c < N; ++c) out(c, r) = (*this)(r, c);
    return out;
  }

  Complex trace() const {
    Complex t{};
    for (std::size_t i = 0; i < N; ++i) t += (*this)(i, i);
    return t;
  }

  bool all_finite() const {
    for (const auto& v : a_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }

  // Largest entrywise modulus; the norm every tolerance in this library uses.
  double max_abs() const {
    double m = 0.0;
    for (const auto& v : a_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  std::array<Complex, N * N> a_;
};

template <std::size_t N>
double max_abs_diff(const SquareMatrix<N>& a, const SquareMatrix<N>& b) {
  return (a - b).max_abs();
}

// U rho U^dagger.
template <std::size_t N>
SquareMatrix<N> conjugate(const SquareMatrix<N>& u, const SquareMatrix<N>& rho) {
  return u * rho * u.adjoint();
}

template <std::size_t N, std::size_t M>
SquareMatrix<N * M> kron(const SquareMatrix<N>& a, const SquareMatrix<M>& b) {
  SquareMatrix<N * M> out;
  for (std::size_t r1 = 0; r1 < N; ++r1)
    for (std::size_t c1 = 0; c1 < N; ++c1)
      for (std::size_t r2 = 0; r2 < M; ++r2)
        for (std::size_t c2 = 0; c2 < M; ++c2) out(r1 * M + r2, c1 * M + c2) = a(r1, c1) * b(r2, c2);
  return out;
}

template <std::size_t N>
std::ostream& operator<<(std::ostream& os, const SquareMatrix<N>& m) {
  os << '[';
  for (std::size_t r = 0; r < N; ++r) {
    os << (r ? ", [" : "[");
    for (std::size_t c = 0; c < N; ++c) os << (c ? ", " : "") << m(r, c);
    os << ']';
  }
  return os << ']';
}

}  // namespace rsp

#endif  // RSP_LINALG_HPP
