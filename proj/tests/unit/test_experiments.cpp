#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "xfel/error.hpp"
#include "xfel/experiments.hpp"
#include "xfel/radial.hpp"
#include "xfel/scalings.hpp"

using namespace xfel;

namespace {

PhysicsParams cubic(double b) {
  PhysicsParams pp;
  pp.b = b;
  pp.lambda2 = 0.01;
  pp.p = 2.0;
  pp.omega = 1.0;
  return pp;
}

const GridSpec& grid64() {
  static const GridSpec g = GridSpec::make(64, 6.0);
  return g;
}

const KernelSet& kernels64() {
  static const KernelSet ks = make_kernels(grid64());
  return ks;
}

const GroundStateResult& soliton() {
  static const GroundStateResult r = solve_d_omega(cubic(0.0), grid64(), oracle::gaussian(grid64()), SolveConfig{});
  return r;
}

const GroundStateResult& trapped() {
  static const GroundStateResult r = solve_dK(cubic(1.0), grid64(), oracle::gaussian(grid64()), SolveConfig{});
  return r;
}

// On 64^3 the lattice caps gradient growth near 4x, so collapse is flagged at 3x.
EvolveConfig collapse_run(double t_end) {
  EvolveConfig c;
  c.t_end = t_end;
  c.dt_init = 2e-3;
  c.dt_min = 1e-7;
  c.blowup_gradient_factor = 3.0;
  c.monitor_stride = 10;
  return c;
}

}  // namespace

TEST_CASE("classify places scaled ground states on either side") {
  const GroundStateResult& gs = soliton();
  REQUIRE(gs.converged);
  const PhysicsParams pp = cubic(0.0);
  const KernelSet& ks = kernels64();
  const ScalingKind mp = ScalingKind::mass_preserving();
  const Classification up = classify(rescale(gs.field, mp, 1.2), pp, gs, ks);
  CHECK(up.set_tag == SetTag::B_omega);
  CHECK(up.q_value < 0.0);
  CHECK(up.s_value < up.reference_action);
  // widening by 0.7 pushes tail mass out of the box, so the terms are scaled exactly
  const Classification down = classify(scaled_terms(gs.report.terms(), mp, 0.7, pp.p), pp, gs);
  CHECK(down.set_tag == SetTag::A_omega);
  CHECK(down.q_value > 0.0);
  CHECK(classify(gs.field, pp, gs, ks).set_tag == SetTag::neither);
  const auto j = up.to_json();
  CHECK(j["set"] == "B_omega");
}

TEST_CASE("classify rejects a ground state from other parameters") {
  const GroundStateResult& gs = soliton();
  PhysicsParams pp = cubic(0.0);
  pp.lambda2 = 0.02;
  CHECK_THROWS_AS(classify(gs.field, pp, gs, kernels64()), InvalidArgument);
  pp = cubic(0.0);
  pp.omega = 1.5;
  CHECK_THROWS_AS(classify(gs.field, pp, gs, kernels64()), InvalidArgument);
  CHECK_THROWS_AS(classify(gs.field, cubic(1.0), gs, kernels64()), InvalidArgument);
}

TEST_CASE("dichotomy: B data collapse, A data stay bounded") {
  const GroundStateResult& gs = soliton();
  const PhysicsParams pp = cubic(0.0);
  Field b_data = gs.field;
  b_data *= 1.1;
  const DichotomyReport b = dichotomy_run(b_data, pp, gs, collapse_run(2.0), kernels64());
  CHECK(b.initial.set_tag == SetTag::B_omega);
  CHECK(b.trace.status == "blowup_detected");
  CHECK(b.invariant);
  CHECK(b.key_estimate_ok);
  CHECK(b.verdict == "confirmed");
  for (double q : b.trace.q_b) CHECK(q <= 2 * (b.initial.s_value - b.initial.reference_action) + 1e-6);

  Field a_data = gs.field;
  a_data *= 0.9;
  const DichotomyReport a = dichotomy_run(a_data, pp, gs, collapse_run(0.5), kernels64());
  CHECK(a.initial.set_tag == SetTag::A_omega);
  CHECK(a.trace.status == "completed");
  REQUIRE(a.gradient_bound);
  CHECK(a.max_gradient <= *a.gradient_bound);
  CHECK(a.verdict == "confirmed");
  CHECK(a.sample_tags.size() == a.trace.size());
  CHECK(a.to_json()["verdict"] == "confirmed");

  CHECK_THROWS_AS(dichotomy_run(gs.field, pp, gs, collapse_run(0.1), kernels64()), InvalidArgument);
}

TEST_CASE("the ground state itself evolves as neither") {
  const GroundStateResult& gs = soliton();
  const PhysicsParams pp = cubic(0.0);
  EvolveConfig cfg = collapse_run(0.2);
  cfg.dt_init = 1e-3;
  int samples = 0, neither = 0;
  evolve(gs.field, pp, cfg, kernels64(), [&](double, const Field&, const TermValues& t) {
    ++samples;
    if (classify(t, pp, gs).set_tag == SetTag::neither) ++neither;
  });
  CHECK(samples > 5);
  CHECK(neither == samples);
}

TEST_CASE("mass threshold rescales with lambda3 and rises with a defocusing Hartree term") {
  const GridSpec g = GridSpec::make(32, 4.0);
  const KernelSet ks = make_kernels(g);
  const RadialProfile R = solve_classical_R();
  const Field seed = lift_radial(R, g, 1.0, 2.0);
  PhysicsParams pp;
  pp.p = 4.0 / 3.0;
  EvolveConfig cfg = collapse_run(2.0);
  cfg.dt_init = 1e-3;
  const ThresholdResult base = mass_threshold_bisect(seed, pp, cfg, ks, 0.8 * R.mass, 1.2 * R.mass, 0.02);
  CAPTURE(base.to_json().dump());
  CHECK(std::abs(base.threshold / R.mass - 1.0) < 0.05);
  CHECK(base.mass_lo < base.mass_hi);
  CHECK(base.runs.size() >= 4);

  pp.lambda3 = 16.0;
  const ThresholdResult strong =
      mass_threshold_bisect(seed, pp, cfg, ks, 0.8 * R.mass / 64, 1.2 * R.mass / 64, 0.02);
  CHECK(std::abs(strong.threshold * 64 / base.threshold - 1.0) < 0.05);

  pp.lambda3 = 1.0;
  pp.lambda2 = 1.0;
  const ThresholdResult hartree = mass_threshold_bisect(seed, pp, cfg, ks, 0.9 * R.mass, 1.6 * R.mass, 0.05);
  CAPTURE(hartree.to_json().dump());
  CHECK(hartree.threshold >= base.mass_lo);

  pp.lambda2 = 0.0;
  CHECK_THROWS_AS(mass_threshold_bisect(seed, pp, cfg, ks, 1.1 * R.mass, 1.2 * R.mass), ExperimentFailure);
  pp.p = 2.0;
  CHECK_THROWS_AS(mass_threshold_bisect(seed, pp, cfg, ks, 0.8 * R.mass, 1.2 * R.mass), InvalidArgument);
}

TEST_CASE("instability probe without trap") {
  const GroundStateResult& gs = soliton();
  const ProbeReport r = instability_probe(gs, cubic(0.0), collapse_run(2.0), kernels64(), {1.1, 1.05, 1.02}, 3.0);
  CHECK(r.family == "mass_preserving");
  REQUIRE(r.entries.size() == 3);
  for (const auto& e : r.entries) {
    CHECK(e.membership.set_tag == SetTag::B_omega);
    CHECK(e.status == "blowup_detected");
  }
  CHECK(r.all_in_set);
  CHECK(r.all_blowup);
  CHECK(r.distances_decrease);
  CHECK(r.key_estimate_ok);
  CHECK(r.entries.back().h1_distance < 0.3 * r.entries.front().h1_distance);
  CHECK_THROWS_AS(instability_probe(gs, cubic(0.0), collapse_run(1.0), kernels64(), {1.05, 1.1}, 3.0),
                  InvalidArgument);
  CHECK_THROWS_AS(instability_probe(gs, cubic(0.0), collapse_run(1.0), kernels64(), {0.9}, 3.0),
                  InvalidArgument);
}

TEST_CASE("instability probe with trap uses the amplitude family and finds N") {
  const GroundStateResult& gs = trapped();
  REQUIRE(gs.converged);
  const PhysicsParams pp = cubic(1.0);
  const ProbeReport r = instability_probe(gs, pp, collapse_run(2.0), kernels64(), {1.1, 1.05}, 3.0);
  CHECK(r.family == "amplitude");
  for (const auto& e : r.entries) {
    CHECK(e.membership.set_tag == SetTag::K_omega_set);
    CHECK(e.membership.k_value < 0.0);
    CHECK(e.membership.q_value < 0.0);
    CHECK(e.status == "blowup_detected");
    CHECK(e.key_estimate_ok);
  }
  CHECK(r.distances_decrease);
  REQUIRE(!r.cross_points.empty());
  for (const auto& cp : r.cross_points) {
    CHECK(std::abs(cp.q_value) < cross_tolerance * cp.kinetic);
    CHECK(cp.k_value < 0.0);
    const Field v = cross_point_field(gs.field, cp, pp);
    CHECK(classify(v, pp, gs, kernels64()).set_tag == SetTag::N_cross);
  }
  REQUIRE(r.alpha_estimate);
  CHECK(*r.alpha_estimate >= gs.value * (1 - 1e-6));
}

TEST_CASE("gamma(c) scan is non-increasing") {
  PhysicsParams pp = cubic(0.0);
  pp.omega.reset();
  const ScanReport r =
      scan_monotonic(ScanProblem::gamma_c, pp, {16, 17, 18, 19, 20}, grid64(), oracle::gaussian(grid64()), SolveConfig{});
  CAPTURE(r.to_json().dump());
  CHECK(r.complete);
  CHECK(r.non_increasing);
  CHECK(!r.subadditive);
}

TEST_CASE("m(c) scan is strictly subadditive") {
  const GridSpec g = GridSpec::make(32, 6.0);
  PhysicsParams pp;
  pp.b = 1.0;
  pp.lambda1 = -0.5;
  pp.lambda2 = 0.0;
  pp.p = 1.0;
  const ScanReport r = scan_monotonic(ScanProblem::m_c, pp, {0.5, 1.0, 1.5, 2.0}, g, oracle::gaussian(g), SolveConfig{});
  CAPTURE(r.to_json().dump());
  CHECK(r.complete);
  REQUIRE(r.subadditive);
  CHECK(*r.subadditive);
  CHECK(r.subadditive_pairs == 6);

  const ScanReport single = scan_monotonic(ScanProblem::m_c, pp, {1.0}, g, oracle::gaussian(g), SolveConfig{});
  CHECK(single.non_increasing);
  CHECK(single.subadditive_pairs == 0);
  CHECK_THROWS_AS(scan_monotonic(ScanProblem::m_c, pp, {1.0, 0.5}, g, oracle::gaussian(g), SolveConfig{}),
                  InvalidArgument);
}

TEST_CASE("lambda0 equals the planar oscillator energy 2b") {
  const GridSpec g = GridSpec::make(32, 6.0);
  for (double b : {1.0, 2.0}) {
    CAPTURE(b);
    const Lambda0Result r = lambda0_check(b, g);
    CHECK(std::abs(r.lambda_small - 2 * b) < 1e-2 * 2 * b);
    CHECK(std::abs(r.lambda_big - 2 * b) < 1e-2 * 2 * b);
    CHECK(r.lambda_big >= r.lambda_small - 1e-8);
    for (std::size_t i = 1; i < r.big_history.size(); ++i) CHECK(r.big_history[i] <= r.big_history[i - 1] + 1e-9);
  }
  CHECK_THROWS_AS(lambda0_check(0.0, g), InvalidArgument);
}
