#ifndef RSP_POVM_HPP
#define RSP_POVM_HPP

// Alice's four-outcome measurement on her half of r0|00> + r1|11>.
//
// Outcome m leaves Bob with rho_m = U_m^dagger |i><i| U_m, so that after the
// correction U_m he always holds |i>. The elements are
//
//   M_m = p_m D rho_m^T D,   D = diag(1/r0, 1/r1),
//
// with p_0 = p_1 = P1/2 and p_2 = p_3 = P2/2 chosen so that the weights
// reproduce Bob's reduced state: sum_m p_m rho_m = diag(r0^2, r1^2).

#include <array>
#include <cmath>
#include <random>

#include "rsp/errors.hpp"
#include "rsp/qubit.hpp"
#include "rsp/random.hpp"

namespace rsp {

// Smallest Schmidt coefficient r1 for which D stays numerically bounded.
inline constexpr double kMinSchmidtCoefficient = 1e-6;
// Angular slack when testing cap membership.
inline constexpr double kPreparableAngleTol = 1e-9;

struct BranchProbs {
  double P1 = 0.5;  // weight of the I / s3 branch
  double P2 = 0.5;  // weight of the s1 / -s3 s1 branch

  std::array<double, 4> per_outcome() const { return {0.5 * P1, 0.5 * P1, 0.5 * P2, 0.5 * P2}; }
};

// True when the pure state lies in the antipodal pair of caps of half-angle
// theta_r around the poles.
inline bool preparable(const ResourceState& r, const PureState& i, double angleTol = kPreparableAngleTol) {
  const double fromPole = std::min(i.theta(), kPi - i.theta());
  return fromPole <= r.theta() + angleTol;
}

// Solves i0^2 P1 + i1^2 P2 = r0^2 with P1 + P2 = 1.
inline BranchProbs solve_branch_probs(const ResourceState& r, const PureState& i) {
  if (!preparable(r, i))
    throw InsufficientEntanglement("target lies outside the preparable caps of the resource state");
  const double i0sq = i.i0() * i.i0();
  const double i1sq = i.i1() * i.i1();
  const double r0sq = r.r0() * r.r0();
  const double denom = i0sq - i1sq;
  if (std::abs(denom) < 1e-15) {
    // Equator: any P1 works for a maximal resource; 1/2 keeps the messages uniform.
    if (std::abs(r0sq - 0.5) > kInputTol)
      throw InsufficientEntanglement("equatorial targets require a maximally entangled resource");
    return {0.5, 0.5};
  }
  const double P1 = std::clamp((r0sq - i1sq) / denom, 0.0, 1.0);
  return {P1, 1.0 - P1};
}

// Bob's state after outcome m, before any correction: tr_A((M (x) I)|r><r|)
// normalized. Unnormalized it is R M^T R with R = diag(r0, r1).
inline Matrix2 bob_unnormalized_state(const ResourceState& r, const Matrix2& element) {
  const std::array<double, 2> rr{r.r0(), r.r1()};
  Matrix2 out;
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) out(a, b) = rr[a] * rr[b] * element(b, a);
  return out;
}

// <r|(M (x) I)|r>
inline double outcome_probability(const ResourceState& r, const Matrix2& element) {
  return r.r0() * r.r0() * element(0, 0).real() + r.r1() * r.r1() * element(1, 1).real();
}

class PovmSet {
 public:
  const std::array<Matrix2, 4>& elements() const { return elements_; }
  const Matrix2& element(std::size_t m) const { return elements_.at(m); }
  const BranchProbs& branch_probs() const { return probs_; }
  std::array<double, 4> probabilities() const { return probs_.per_outcome(); }
  const PureState& target() const { return target_; }
  const ResourceState& resource() const { return resource_; }

  // Bob's conditional state for outcome m.
  const Matrix2& post_state(std::size_t m) const { return post_.at(m); }

  friend PovmSet build_povm(const ResourceState& r, const PureState& i);

 private:
  PovmSet(const ResourceState& r, const PureState& i) : resource_(r), target_(i) {}

  ResourceState resource_;
  PureState target_;
  BranchProbs probs_;
  std::array<Matrix2, 4> elements_;
  std::array<Matrix2, 4> post_;
};

inline PovmSet build_povm(const ResourceState& r, const PureState& i) {
  if (!(r.r1() > kMinSchmidtCoefficient))
    throw UnentangledResource("resource state is not entangled enough to build the measurement");
  PovmSet povm(r, i);
  povm.probs_ = solve_branch_probs(r, i);

  const Matrix2 target = i.projector();
  const auto p = povm.probs_.per_outcome();
  Matrix2 d;
  d(0, 0) = 1.0 / r.r0();
  d(1, 1) = 1.0 / r.r1();
  for (std::size_t m = 0; m < 4; ++m) {
    const Matrix2& u = correction_unitaries()[m];
    povm.post_[m] = u.adjoint() * target * u;
    povm.elements_[m] = p[m] * (d * povm.post_[m].transpose() * d);
  }
  return povm;
}

// Draws an outcome according to the branch probabilities.
template <class Rng>
std::size_t sample_outcome(const PovmSet& povm, Rng& rng) {
  return sample_discrete(povm.probabilities(), uniform01(rng));
}

}  // namespace rsp

#endif  // RSP_POVM_HPP
