#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "rsp/protocol.hpp"
#include "test_support.hpp"

using namespace rsp;
using Catch::Approx;

namespace {

SphericalPointSet octahedron() {
  return SphericalPointSet({kXAxis, -kXAxis, kYAxis, -kYAxis, kZAxis, -kZAxis}, PointSource::analytic);
}

bool near(const Vec3& a, const Vec3& b, double tol) { return norm(a - b) <= tol; }

double trace_dist(const Matrix2& a, const Matrix2& b) {
  const auto ev = hermitian_eigenvalues(a - b);
  return 0.5 * (std::abs(ev[0]) + std::abs(ev[1]));
}

TargetState random_target(Rng& rng, double purity) {
  return TargetState::from_direction(purity, random_unit_vector(rng));
}

}  // namespace

TEST_CASE("rotation sets", "[protocol][rotation]") {
  SECTION("single pole pair gives the identity") {
    const RotationSet rot = build_rotation_set(pole_pair());
    REQUIRE(rot.size() == 1);
    CHECK(max_abs_diff(rot[0].su2, Matrix2::identity()) == 0.0);
    CHECK(rot.index_bits() == 0.0);
  }
  SECTION("rotation onto x") {
    const Rotation r = rotation_to(kXAxis);
    CHECK(near(r.so3.apply(kZAxis), kXAxis, 1e-15));
    const auto bloch = density_to_bloch(conjugate(r.su2, bloch_to_density({0, 0, 1})));
    CHECK(near(bloch.vec(), kXAxis, 1e-15));
  }
  SECTION("south pole uses the pi rotation about x") {
    const Rotation r = rotation_to(-kZAxis);
    CHECK(near(r.so3.apply(kZAxis), -kZAxis, 1e-15));
  }
  SECTION("octahedron representatives are z, x, y") {
    const RotationSet rot = build_rotation_set(octahedron());
    REQUIRE(rot.size() == 3);
    CHECK(near(rot[0].so3.apply(kZAxis), kZAxis, 1e-15));
    CHECK(near(rot[1].so3.apply(kZAxis), kXAxis, 1e-15));
    CHECK(near(rot[2].so3.apply(kZAxis), kYAxis, 1e-15));
    CHECK(rot.covering_radius() == Approx(0.955316618124509278).margin(1e-14));
  }
  SECTION("SU(2) and SO(3) parts agree on random sites") {
    const RotationSet rot = build_rotation_set(minimize_points(10, 4, 1).points);
    Rng rng(4);
    for (std::size_t j = 0; j < rot.size(); ++j) {
      REQUIRE(near(rot[j].so3.apply(kZAxis), rot[j].site, 1e-12));
      const Vec3 v = random_unit_vector(rng) * 0.7;
      const auto moved = density_to_bloch(conjugate(rot[j].su2, bloch_to_density(BlochVector::from(v))));
      REQUIRE(near(moved.vec(), rot[j].so3.apply(v), 1e-12));
    }
  }
}

TEST_CASE("select_rotation", "[protocol][rotation]") {
  const RotationSet rot = build_rotation_set(minimize_points(8, 3, 1).points);
  const Vec3 s5 = rot[4].site;
  SECTION("target on a site") {
    const auto c = select_rotation(rot, TargetState::from_direction(1.0, s5));
    CHECK(c.index == 4);
    CHECK(near(c.intermediate.direction(), kZAxis, 1e-12));
  }
  SECTION("target on the antipode of a site") {
    const auto c = select_rotation(rot, TargetState::from_direction(0.5, -s5));
    CHECK(c.index == 4);
    CHECK(near(c.intermediate.direction(), -kZAxis, 1e-12));
    CHECK(c.intermediate.purity() == 0.5);
  }
  SECTION("ties go to the smallest index") {
    const auto c = select_rotation(build_rotation_set(octahedron()),
                                   TargetState::from_direction(1.0, Vec3{1, 1, 1} * (1.0 / std::sqrt(3.0))));
    CHECK(c.index == 0);
    CHECK(c.alignment == Approx(1.0 / std::sqrt(3.0)).margin(1e-15));
  }
  SECTION("maximally mixed targets use +z") {
    const auto c = select_rotation(build_rotation_set(octahedron()), TargetState::from_bloch({0, 0, 0}));
    CHECK(c.index == 0);
  }
  SECTION("intermediate lies within the covering radius of a pole") {
    Rng rng(8);
    for (int t = 0; t < 500; ++t) {
      const auto c = select_rotation(rot, random_target(rng, 1.0));
      REQUIRE(std::acos(std::min(1.0, std::abs(c.intermediate.direction().z))) <= rot.covering_radius() + 1e-12);
    }
  }
}

TEST_CASE("prepare with a maximal resource and K = 1 is exact", "[protocol]") {
  const RotationSet rot = build_rotation_set(pole_pair());
  const TargetState target = TargetState::from_angles(1.0, 0.3, 1.1);
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    const auto tr = prepare(ResourceState::maximal(), rot, target, rng);
    REQUIRE(max_abs_diff(tr.finalState, target.density().matrix()) < 1e-12);
    REQUIRE_FALSE(tr.randomized);
    REQUIRE(tr.total_bits() == 2.0);
  }
}

TEST_CASE("prepare with p = 0 averages to I/2", "[protocol]") {
  const RotationSet rot = build_rotation_set(octahedron());
  const auto runs = run_trials(ResourceState::from_theta(1.2), rot, TargetState::from_bloch({0, 0, 0}), 100000, 5, 4);
  CHECK(trace_dist(average_final_state(runs), 0.5 * Matrix2::identity()) < 0.01);
  for (const auto& r : runs) REQUIRE(r.randomized);
}

TEST_CASE("prepare is deterministic for a fixed seed", "[protocol]") {
  const RotationSet rot = build_rotation_set(octahedron());
  const auto res = ResourceState::from_theta(1.1);
  const auto target = TargetState::from_angles(0.6, 2.0, 0.4);
  Rng a(77), b(77);
  for (int t = 0; t < 100; ++t) {
    const auto x = prepare(res, rot, target, a);
    const auto y = prepare(res, rot, target, b);
    REQUIRE(x.outcome == y.outcome);
    REQUIRE(x.message == y.message);
    REQUIRE(x.randomized == y.randomized);
    REQUIRE(max_abs_diff(x.finalState, y.finalState) == 0.0);
  }
}

TEST_CASE("prepare rejects insufficient entanglement", "[protocol]") {
  const RotationSet rot = build_rotation_set(octahedron());
  Rng rng(1);
  const auto target = TargetState::from_angles(1.0, 0.0, 0.0);
  CHECK_THROWS_AS(prepare(ResourceState::from_theta(0.2), rot, target, rng), InsufficientEntanglement);
  CHECK_THROWS_AS(exact_output(ResourceState::from_theta(0.9), rot, target), InsufficientEntanglement);
}

TEST_CASE("exact_output reproduces the target", "[protocol][property]") {
  SECTION("random grid") {
    const RotationSet oct = build_rotation_set(octahedron());
    const RotationSet pole = build_rotation_set(pole_pair());
    Rng rng(2718);
    for (int t = 0; t < 1000; ++t) {
      const bool maximal = t % 2 == 0;
      const auto res = maximal ? ResourceState::maximal() : ResourceState::from_theta(0.96 + 0.6 * uniform01(rng));
      const auto target = random_target(rng, uniform01(rng));
      const auto out = exact_output(res, maximal ? pole : oct, target);
      REQUIRE(trace_distance(out, target.density()) < 1e-10);
    }
  }
  SECTION("cap boundary with p = 1") {
    // Target on a Voronoi vertex of the octahedron, resource exactly at the covering radius.
    const RotationSet oct = build_rotation_set(octahedron());
    const auto res = ResourceState::from_theta(oct.covering_radius());
    const auto target = TargetState::from_direction(1.0, Vec3{1, 1, 1} * (1.0 / std::sqrt(3.0)));
    const auto choice = select_rotation(oct, target);
    CHECK(build_povm(res, choice.intermediate.pure()).branch_probs().P1 == Approx(1.0).margin(1e-9));
    CHECK(trace_distance(exact_output(res, oct, target), target.density()) < 1e-10);
  }
  SECTION("maximal resource with p = 0.37") {
    const auto target = TargetState::from_angles(0.37, 2.3, 4.1);
    const auto out = exact_output(ResourceState::maximal(), build_rotation_set(pole_pair()), target);
    CHECK(trace_distance(out, target.density()) < 1e-10);
  }
}

TEST_CASE("message_distribution", "[protocol]") {
  SECTION("maximal resource is uniform") {
    Rng rng(3);
    const RotationSet pole = build_rotation_set(pole_pair());
    for (int t = 0; t < 100; ++t) {
      const auto d = message_distribution(ResourceState::maximal(), pole, random_target(rng, uniform01(rng)));
      for (double v : d) REQUIRE(std::abs(v - 0.25) < 1e-12);
    }
  }
  SECTION("p = 0 is uniform for any resource") {
    const auto d = message_distribution(ResourceState::from_theta(1.0), TargetState::from_bloch({0, 0, 0}));
    for (double v : d) CHECK(v == Approx(0.25).margin(1e-15));
  }
  SECTION("r0^2 = 0.8, target |0>, p = 1") {
    const auto d = message_distribution(ResourceState::from_r0(std::sqrt(0.8)), TargetState::from_angles(1.0, 0, 0));
    CHECK(d[0] == Approx(0.4).margin(1e-12));
    CHECK(d[1] == Approx(0.4).margin(1e-12));
    CHECK(d[2] == Approx(0.1).margin(1e-12));
    CHECK(d[3] == Approx(0.1).margin(1e-12));
  }
  SECTION("empirical frequencies match") {
    const auto res = ResourceState::from_theta(1.3);
    const RotationSet oct = build_rotation_set(octahedron());
    const auto target = TargetState::from_angles(0.8, 1.0, 0.5);
    const auto runs = run_trials(res, oct, target, 100000, 9, 4);
    const auto exact = message_distribution(res, oct, target);
    std::array<double, 4> counts{};
    for (const auto& r : runs) counts[r.message] += 1.0;
    CHECK(testing::chi_square(counts, exact, 100000.0) < testing::kChiSquare3dfAlpha001);
  }
}

TEST_CASE("teleportation", "[protocol][teleport]") {
  SECTION("corrected state equals the input") {
    Rng rng(21);
    for (int t = 0; t < 200; ++t) {
      const auto input = bloch_to_density(BlochVector::from(random_unit_vector(rng) * uniform01(rng)));
      for (const auto& b : teleport_branches(input)) REQUIRE(b.probability == Approx(0.25).margin(1e-12));
      const auto tr = teleport(input, rng);
      REQUIRE(max_abs_diff(tr.finalState, input.matrix()) < 1e-12);
    }
  }
  SECTION("branches match a state-vector simulation") {
    const PureState s = PureState::from_angles(1.1, 0.7);
    const auto amps = s.amplitudes();
    const auto branches = teleport_branches(DensityMatrix(s.projector()));
    for (int m = 0; m < 4; ++m) {
      const auto ref = oracle::teleport_state_vector({amps[0], amps[1]}, m);
      CHECK(branches[m].probability == Approx(ref.probability).margin(1e-14));
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          CHECK(std::abs(branches[m].bobState(r, c) - ref.bob[r] * std::conj(ref.bob[c])) < 1e-14);
    }
  }
  SECTION("outcomes pass chi-square uniformity") {
    Rng rng(100);
    const auto input = bloch_to_density({0.2, -0.5, 0.6});
    std::array<double, 4> counts{};
    for (int t = 0; t < 100000; ++t) counts[teleport(input, rng).outcome] += 1.0;
    CHECK(testing::chi_square(counts, {0.25, 0.25, 0.25, 0.25}, 100000.0) < testing::kChiSquare3dfAlpha001);
  }
  SECTION("teleport and stage-1 distributions coincide at maximal entanglement") {
    const auto input = TargetState::from_angles(0.6, 0.4, 2.0);
    const auto a = teleport_outcome_distribution(input.density());
    const auto b = message_distribution(ResourceState::maximal(), build_rotation_set(pole_pair()), input);
    for (int m = 0; m < 4; ++m) CHECK(std::abs(a[m] - b[m]) < 1e-12);
  }
}

TEST_CASE("bit accounting and batch runs", "[protocol]") {
  const auto set = minimize_points(16, 1, 1).points;
  const RotationSet rot = build_rotation_set(set);
  const auto res = ResourceState::from_theta(std::min(kPi / 2, rot.covering_radius() + 0.05));
  const auto target = TargetState::from_angles(0.9, 2.2, 5.0);
  const auto serial = run_trials(res, rot, target, 500, 42, 1);
  const auto parallel = run_trials(res, rot, target, 500, 42, 7);
  REQUIRE(serial.size() == 500);
  for (std::size_t t = 0; t < serial.size(); ++t) {
    REQUIRE(serial[t].total_bits() == 6.0);
    REQUIRE(serial[t].seed == parallel[t].seed);
    REQUIRE(serial[t].outcome == parallel[t].outcome);
    REQUIRE(max_abs_diff(serial[t].finalState, parallel[t].finalState) == 0.0);
  }
}

TEST_CASE("transcript JSON", "[protocol][io]") {
  const RotationSet rot = build_rotation_set(octahedron());
  const auto runs = run_trials(ResourceState::from_theta(1.2), rot, TargetState::from_angles(1.0, 1.5, 0.2), 1, 3);
  const nlohmann::json j = runs[0];
  for (const char* key : {"seed", "m", "stage1_bits", "randomized", "j", "k", "total_bits", "final_state"})
    CHECK(j.contains(key));
  CHECK(j["j"] == runs[0].rotation + 1);
  CHECK(j["k"] == 3);
  CHECK(j["stage1_bits"].get<std::string>().size() == 2);
  CHECK(j["final_state"].size() == 2);
  CHECK(j["final_state"][0][0].size() == 2);
  CHECK(encode_bits(3) == "11");
}
