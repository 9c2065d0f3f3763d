#ifndef RSP_PROTOCOL_HPP
#define RSP_PROTOCOL_HPP

// Two-stage remote state preparation and the teleportation reference scheme.
//
// Stage 1: Alice measures her half of the resource with the four-outcome
// measurement built for a pure intermediate |i>, then sends 2 bits naming
// Bob's correction (replaced by uniformly random bits with probability 1 - p
// when the target has purity p). Bob now holds p|i><i| + (1 - p) I/2.
// Stage 2: Alice sends the index j of the rotation R_j that carries the
// intermediate onto the target; Bob applies it.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "rsp/errors.hpp"
#include "rsp/pointsets.hpp"
#include "rsp/povm.hpp"
#include "rsp/qubit.hpp"
#include "rsp/random.hpp"
#include "rsp/voronoi.hpp"

namespace rsp {

// p |t><t| + (1 - p) I/2
class TargetState {
 public:
  static TargetState from_angles(double purity, double theta, double phi) {
    check_purity(purity);
    return TargetState(purity, PureState::from_angles(theta, phi));
  }

  static TargetState from_direction(double purity, const Vec3& direction) {
    check_purity(purity);
    return TargetState(purity, PureState::from_direction(direction));
  }

  // A zero Bloch vector maps to the maximally mixed state with direction +z.
  static TargetState from_bloch(const Vec3& bloch) {
    const double p = norm(bloch);
    if (p > 1.0 + kAlgebraicTol) throw InvalidState("Bloch vector lies outside the unit ball");
    if (p == 0.0) return TargetState(0.0, PureState::from_angles(0.0, 0.0));
    return TargetState(std::min(p, 1.0), PureState::from_direction(bloch));
  }

  double purity() const { return purity_; }
  const PureState& pure() const { return pure_; }

  // Direction used by the protocol; +z for the maximally mixed state.
  Vec3 direction() const { return purity_ == 0.0 ? kZAxis : pure_.direction(); }
  Vec3 bloch() const { return pure_.direction() * purity_; }

  DensityMatrix density() const {
    return DensityMatrix(purity_ * pure_.projector() + (1.0 - purity_) * 0.5 * Matrix2::identity());
  }

 private:
  TargetState(double purity, PureState pure) : purity_(purity), pure_(pure) {}

  static void check_purity(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("purity must lie in [0, 1]");
  }

  double purity_;
  PureState pure_;
};

struct Rotation {
  Vec3 site;      // image of +z
  Matrix2 su2;    // acts on states
  Rotation3 so3;  // acts on Bloch vectors
};

// One rotation per antipodal pair of sites, ordered by the pair
// representative: z descending, then x descending, then y descending.
class RotationSet {
 public:
  RotationSet(std::vector<Rotation> rotations, CoverageReport coverage)
      : rotations_(std::move(rotations)), coverage_(coverage) {}

  std::size_t size() const { return rotations_.size(); }
  const Rotation& operator[](std::size_t j) const { return rotations_.at(j); }
  const std::vector<Rotation>& rotations() const { return rotations_; }

  // Covering report of the 2K sites the set was built from.
  const CoverageReport& coverage() const { return coverage_; }
  double covering_radius() const { return coverage_.coveringRadius; }

  // Classical bits of the stage-2 message.
  double index_bits() const { return std::log2(static_cast<double>(rotations_.size())); }

 private:
  std::vector<Rotation> rotations_;
  CoverageReport coverage_;
};

// Rotation taking +z to `site` about the axis z x site. The pole itself maps
// to the identity and its antipode to the pi-rotation about x.
inline Rotation rotation_to(const Vec3& site) {
  const Vec3 s = normalized(site);
  const Vec3 axis = cross(kZAxis, s);
  const double sinAngle = norm(axis);
  if (sinAngle < 1e-15) {
    if (s.z > 0.0) return {s, Matrix2::identity(), Rotation3()};
    return {s, su2_from_axis_angle(kXAxis, kPi), Rotation3::from_axis_angle(kXAxis, kPi)};
  }
  const Vec3 unitAxis = axis * (1.0 / sinAngle);
  const double angle = std::atan2(sinAngle, s.z);
  return {s, su2_from_axis_angle(unitAxis, angle), Rotation3::from_axis_angle(unitAxis, angle)};
}

inline RotationSet build_rotation_set(const SphericalPointSet& points) {
  constexpr double tie = 1e-12;
  auto representative = [&](const Vec3& q) {
    if (std::abs(q.z) > tie) return q.z > 0.0;
    if (std::abs(q.x) > tie) return q.x > 0.0;
    return q.y > 0.0;
  };
  std::vector<Vec3> reps;
  for (const Vec3& q : points.points())
    if (representative(q)) reps.push_back(q);
  if (reps.size() != points.k()) throw ValidationError("point set does not split into antipodal pairs");
  std::sort(reps.begin(), reps.end(), [&](const Vec3& a, const Vec3& b) {
    if (std::abs(a.z - b.z) > tie) return a.z > b.z;
    if (std::abs(a.x - b.x) > tie) return a.x > b.x;
    return a.y > b.y;
  });
  std::vector<Rotation> rotations;
  rotations.reserve(reps.size());
  for (const Vec3& s : reps) rotations.push_back(rotation_to(s));
  return RotationSet(std::move(rotations), analyze_coverage(points));
}

inline RotationSet build_rotation_set(const std::vector<Vec3>& points) {
  return build_rotation_set(SphericalPointSet(points, PointSource::loaded));
}

struct RotationChoice {
  std::size_t index;         // 0-based; transmitted as index + 1
  TargetState intermediate;  // R_j^-1 applied to the target
  double alignment;          // |s_j . t|
};

// Picks the cap pair whose center (or antipode) is closest to the target
// direction; ties go to the smallest index.
inline RotationChoice select_rotation(const RotationSet& rot, const TargetState& target) {
  const Vec3 t = target.direction();
  std::size_t best = 0;
  double bestAlign = -1.0;
  for (std::size_t j = 0; j < rot.size(); ++j) {
    const double a = std::abs(dot(rot[j].site, t));
    if (a > bestAlign + 1e-12) best = j, bestAlign = a;
  }
  const Vec3 local = rot[best].so3.transposed().apply(t);
  return {best, TargetState::from_direction(target.purity(), local), bestAlign};
}

// ---------------------------------------------------------------------------

inline std::string encode_bits(std::size_t message) {
  static const std::array<const char*, 4> codes{"00", "01", "10", "11"};
  return codes.at(message);
}

struct ProtocolTranscript {
  std::optional<std::uint64_t> seed;
  std::size_t outcome = 0;   // Alice's measurement outcome m
  std::size_t message = 0;   // stage-1 message, equal to m unless randomized
  bool randomized = false;
  std::size_t rotation = 0;  // 0-based stage-2 index
  std::size_t k = 1;
  double stage1Bits = 2.0;
  double stage2Bits = 0.0;
  Matrix2 finalState;

  double total_bits() const { return stage1Bits + stage2Bits; }
};

namespace detail {

inline void require_coverage(const ResourceState& resource, const RotationSet& rot) {
  if (!validate_coverage(resource, rot.coverage()))
    throw InsufficientEntanglement("theta_r = " + std::to_string(resource.theta()) +
                                   " is below the covering radius " + std::to_string(rot.covering_radius()) +
                                   " of the " + std::to_string(rot.size()) + "-rotation set");
}

}  // namespace detail

// One protocol run drawing Alice's outcome and the randomization from `rng`.
template <class Engine>
ProtocolTranscript prepare(const ResourceState& resource, const RotationSet& rot, const TargetState& target,
                           Engine& rng) {
  detail::require_coverage(resource, rot);
  const RotationChoice choice = select_rotation(rot, target);
  const PovmSet povm = build_povm(resource, choice.intermediate.pure());

  ProtocolTranscript tr;
  tr.k = rot.size();
  tr.stage2Bits = rot.index_bits();
  tr.rotation = choice.index;
  tr.outcome = sample_outcome(povm, rng);
  const double coin = uniform01(rng);
  const auto randomBits = static_cast<std::size_t>(4.0 * uniform01(rng));
  tr.randomized = !(coin < target.purity());
  tr.message = tr.randomized ? std::min<std::size_t>(randomBits, 3) : tr.outcome;

  const Matrix2 afterStage1 = conjugate(correction_unitaries()[tr.message], povm.post_state(tr.outcome));
  tr.finalState = conjugate(rot[choice.index].su2, afterStage1);
  return tr;
}

// Bob's state averaged over every branch of the protocol, computed exactly.
inline DensityMatrix exact_output(const ResourceState& resource, const RotationSet& rot, const TargetState& target) {
  detail::require_coverage(resource, rot);
  const RotationChoice choice = select_rotation(rot, target);
  const PovmSet povm = build_povm(resource, choice.intermediate.pure());
  const auto pm = povm.probabilities();
  const double p = target.purity();

  Matrix2 unconditioned;  // Bob's state before any message: sum_m p_m rho_m
  for (std::size_t m = 0; m < 4; ++m) unconditioned += pm[m] * povm.post_state(m);

  Matrix2 stage1;
  for (std::size_t m = 0; m < 4; ++m) {
    const Matrix2& u = correction_unitaries()[m];
    stage1 += (p * pm[m]) * conjugate(u, povm.post_state(m));
    stage1 += (0.25 * (1.0 - p)) * conjugate(u, unconditioned);
  }
  return DensityMatrix(conjugate(rot[choice.index].su2, stage1), 1e-10);
}

// Exact probability of each stage-1 message for an intermediate state that is
// already inside the resource's caps.
inline std::array<double, 4> message_distribution(const ResourceState& resource, const TargetState& intermediate) {
  const auto pm = solve_branch_probs(resource, PureState::from_direction(intermediate.direction())).per_outcome();
  const double p = intermediate.purity();
  std::array<double, 4> out{};
  for (std::size_t m = 0; m < 4; ++m) out[m] = p * pm[m] + 0.25 * (1.0 - p);
  return out;
}

inline std::array<double, 4> message_distribution(const ResourceState& resource, const RotationSet& rot,
                                                  const TargetState& target) {
  detail::require_coverage(resource, rot);
  return message_distribution(resource, select_rotation(rot, target).intermediate);
}

// Runs `trials` independent preparations; trial t uses the stream
// mix_seed(seed, t), so results do not depend on `jobs`.
inline std::vector<ProtocolTranscript> run_trials(const ResourceState& resource, const RotationSet& rot,
                                                  const TargetState& target, std::size_t trials, std::uint64_t seed,
                                                  unsigned jobs = 1) {
  detail::require_coverage(resource, rot);
  std::vector<ProtocolTranscript> out(trials);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      const std::uint64_t s = mix_seed(seed, t);
      Rng rng(s);
      out[t] = prepare(resource, rot, target, rng);
      out[t].seed = s;
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(trials, 1))));
  if (jobs == 1) {
    work(0, trials);
    return out;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (trials + jobs - 1) / jobs;
  for (unsigned w = 0; w < jobs; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(trials, begin + chunk);
    if (begin < end) pool.emplace_back(work, begin, end);
  }
  for (auto& th : pool) th.join();
  return out;
}

inline Matrix2 average_final_state(const std::vector<ProtocolTranscript>& runs) {
  Matrix2 sum;
  for (const auto& r : runs) sum += r.finalState;
  return runs.empty() ? sum : sum * (1.0 / static_cast<double>(runs.size()));
}

inline std::array<double, 4> message_frequencies(const std::vector<ProtocolTranscript>& runs) {
  std::array<double, 4> f{};
  for (const auto& r : runs) f[r.message] += 1.0;
  for (auto& v : f) v /= std::max<double>(1.0, static_cast<double>(runs.size()));
  return f;
}

// ---------------------------------------------------------------------------
// Teleportation through |Phi+>, qubit order (input, Alice, Bob).

using Matrix8 = SquareMatrix<8>;

struct TeleportBranch {
  double probability;
  Matrix2 bobState;  // before correction, normalized
};

struct TeleportTranscript {
  std::size_t outcome = 0;
  Matrix2 correction;
  Matrix2 finalState;
};

// Bell basis in the order Phi+, Phi-, Psi+, Psi-, matching the corrections
// I, s3, s1, -s3 s1.
inline const std::array<std::array<Complex, 4>, 4>& bell_basis() {
  const double h = std::sqrt(0.5);
  static const std::array<std::array<Complex, 4>, 4> basis{{{h, 0.0, 0.0, h},
                                                           {h, 0.0, 0.0, -h},
                                                           {0.0, h, h, 0.0},
                                                           {0.0, h, -h, 0.0}}};
  return basis;
}

inline std::array<TeleportBranch, 4> teleport_branches(const DensityMatrix& input) {
  Matrix4 phiPlus;
  const auto& b0 = bell_basis()[0];
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) phiPlus(r, c) = b0[r] * std::conj(b0[c]);
  const Matrix8 joint = kron(input.matrix(), phiPlus);

  std::array<TeleportBranch, 4> out{};
  for (std::size_t m = 0; m < 4; ++m) {
    Matrix4 bell;
    const auto& bm = bell_basis()[m];
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 4; ++c) bell(r, c) = bm[r] * std::conj(bm[c]);
    const Matrix8 proj = kron(bell, Matrix2::identity());
    const Matrix8 post = proj * joint * proj;
    Matrix2 bob;
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) bob(r, c) += post(2 * a + r, 2 * a + c);
    const double prob = bob.trace().real();
    out[m] = {prob, prob > 0.0 ? bob * (1.0 / prob) : bob};
  }
  return out;
}

inline std::array<double, 4> teleport_outcome_distribution(const DensityMatrix& input) {
  const auto branches = teleport_branches(input);
  return {branches[0].probability, branches[1].probability, branches[2].probability, branches[3].probability};
}

template <class Engine>
TeleportTranscript teleport(const DensityMatrix& input, Engine& rng) {
  const auto branches = teleport_branches(input);
  const std::array<double, 4> probs{branches[0].probability, branches[1].probability, branches[2].probability,
                                    branches[3].probability};
  TeleportTranscript tr;
  tr.outcome = sample_discrete(probs, uniform01(rng));
  tr.correction = correction_unitaries()[tr.outcome];
  tr.finalState = conjugate(tr.correction, branches[tr.outcome].bobState);
  return tr;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json complex_rows(const Matrix2& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < 2; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < 2; ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

inline void to_json(nlohmann::json& j, const ProtocolTranscript& t) {
  j = nlohmann::json{{"seed", t.seed ? nlohmann::json(*t.seed) : nlohmann::json(nullptr)},
                     {"m", t.outcome},
                     {"stage1_bits", encode_bits(t.message)},
                     {"randomized", t.randomized},
                     {"j", t.rotation + 1},
                     {"k", t.k},
                     {"total_bits", t.total_bits()},
                     {"final_state", complex_rows(t.finalState)}};
}

}  // namespace rsp

#endif  // RSP_PROTOCOL_HPP
