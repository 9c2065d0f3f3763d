#ifndef RSP_TESTS_SUPPORT_HPP
#define RSP_TESTS_SUPPORT_HPP

#include <array>
#include <cmath>

#include "rsp/povm.hpp"
#include "rsp/random.hpp"

namespace testing {

// Random (resource, pure target) pair with the target inside the caps.
struct PreparableCase {
  rsp::ResourceState resource;
  rsp::PureState target;
};

template <class Engine>
PreparableCase random_preparable_case(Engine& rng) {
  // Keep r1 well above the unentangled floor.
  const double thetaR = 0.05 + (0.5 * rsp::kPi - 0.05) * rsp::uniform01(rng);
  const auto r = rsp::ResourceState::from_theta(thetaR);
  double thetaI = thetaR * rsp::uniform01(rng);
  if (rsp::uniform01(rng) < 0.5) thetaI = rsp::kPi - thetaI;
  const double phi = 2.0 * rsp::kPi * rsp::uniform01(rng);
  return {r, rsp::PureState::from_angles(thetaI, phi)};
}

// Pearson chi-square statistic against expected probabilities.
template <std::size_t N>
double chi_square(const std::array<double, N>& counts, const std::array<double, N>& probs, double n) {
  double chi = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    const double e = probs[k] * n;
    chi += (counts[k] - e) * (counts[k] - e) / e;
  }
  return chi;
}

// Upper 0.001 quantile of chi-square with 3 degrees of freedom.
inline constexpr double kChiSquare3dfAlpha001 = 16.266236196238129;

}  // namespace testing

#endif  // RSP_TESTS_SUPPORT_HPP
