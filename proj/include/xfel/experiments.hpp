#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xfel/dynamics.hpp"
#include "xfel/ground_states.hpp"

namespace xfel {

enum class SetTag { A_omega, B_omega, neither, N_cross, K_omega_set };
const char* to_string(SetTag t);

// Relative dead-band of the strict set inequalities.
inline constexpr double set_dead_band = 1e-8;
// |Q_b| below this fraction of the kinetic term counts as Q_b = 0 for N.
inline constexpr double cross_tolerance = 1e-6;

// For b = 0 the tag is A_omega / B_omega / neither from S_omega and Q; for
// b != 0 it is N_cross / K_omega_set / neither from S_{b,omega}, K_{b,omega}, Q_b.
struct Classification {
  SetTag set_tag = SetTag::neither;
  double s_value = 0.0;
  double q_value = 0.0;
  double k_value = 0.0;
  double reference_action = 0.0;

  nlohmann::ordered_json to_json() const;
};

Classification classify(const TermValues& t, const PhysicsParams& pp, const GroundStateResult& gs);
// Throws InvalidArgument when gs was not computed for pp on this grid.
Classification classify(const Field& v, const PhysicsParams& pp, const GroundStateResult& gs,
                        const KernelSet& kernels);

struct DichotomyReport {
  Classification initial;
  EvolutionTrace trace;
  std::vector<SetTag> sample_tags;
  bool invariant = true;            // every sample kept the initial tag
  bool outcome_ok = false;          // A: completed, B: blowup_detected
  bool key_estimate_ok = true;      // B: Q(psi(t)) <= 2 (S(psi0) - S(u)) at every sample
  double max_gradient = 0.0;
  std::optional<double> gradient_bound;  // A: sqrt(6p / (3p - 4) S(u)), when lambdas are >= 0
  // confirmed | numerical_drift | contradiction | outcome_mismatch | bound_violated
  std::string verdict;
  std::optional<double> first_violation_time;
  std::optional<double> rerun_violation_time;

  bool passed() const { return verdict == "confirmed"; }
  nlohmann::ordered_json to_json() const;
};

// Needs classify(v) in {A_omega, B_omega}. On an invariance violation the run
// is repeated at dt/2: a violation that moves later or disappears is drift.
DichotomyReport dichotomy_run(const Field& v, const PhysicsParams& pp, const GroundStateResult& gs,
                              const EvolveConfig& cfg, const KernelSet& kernels);

struct ThresholdRun {
  double mass = 0.0;
  std::string status;
  double end_time = 0.0;
};

struct ThresholdResult {
  double threshold = 0.0;
  double mass_lo = 0.0;  // largest mass seen to survive
  double mass_hi = 0.0;  // smallest mass seen to blow up
  std::vector<ThresholdRun> runs;

  nlohmann::ordered_json to_json() const;
};

// Bisects m in {sqrt(m) / ||seed|| * seed} between completed and blow-up runs
// until (hi - lo) < rel_tol * hi. Needs p = 4/3.
ThresholdResult mass_threshold_bisect(const Field& family_seed, const PhysicsParams& pp, const EvolveConfig& cfg,
                                      const KernelSet& kernels, double mass_lo, double mass_hi,
                                      double rel_tol = 0.02);

struct ProbeEntry {
  double lambda = 0.0;
  double h1_distance = 0.0;
  Classification membership;
  bool in_set = false;
  std::string status;
  double end_time = 0.0;  // detection time for blow-ups
  bool key_estimate_ok = true;  // Q (b = 0) or Q_b <= 2 (S(psi0) - S(u)) at every sample
  bool invariant = true;        // every sample kept the initial tag
};

struct CrossPoint {
  double amplitude = 0.0;  // mu in mu * u
  double stretch = 0.0;    // lambda in lambda^{3/(p+2)} v(lambda x)
  double s_value = 0.0;
  double q_value = 0.0;
  double k_value = 0.0;
  double kinetic = 0.0;
};

struct ProbeReport {
  std::string family;  // mass_preserving | amplitude
  std::vector<ProbeEntry> entries;
  bool all_in_set = false;
  bool all_blowup = false;
  bool distances_decrease = false;
  bool key_estimate_ok = false;
  double reference_action = 0.0;
  // b != 0: points found on N = {K < 0, Q_b = 0}; alpha is the least action among them.
  std::vector<CrossPoint> cross_points;
  std::optional<double> alpha_estimate;

  nlohmann::ordered_json to_json() const;
};

// Data chi_M u_lambda (b = 0, or b != 0 with p < 2) or chi_M (lambda u) (b != 0,
// p >= 2) for each lambda; each must lie in B_omega resp. K_omega before it is evolved.
ProbeReport instability_probe(const GroundStateResult& gs, const PhysicsParams& pp, const EvolveConfig& cfg,
                              const KernelSet& kernels, const std::vector<double>& lambdas, double cutoff_radius);

// Points mu u with mu > 1 moved onto Q_b = 0 by the p2 scaling, keeping K < 0.
std::vector<CrossPoint> find_cross_points(const Field& u, const PhysicsParams& pp, const KernelSet& kernels,
                                          const std::vector<double>& amplitudes);
Field cross_point_field(const Field& u, const CrossPoint& cp, const PhysicsParams& pp);

enum class ScanProblem { gamma_c, m_c };

struct ScanReport {
  std::string problem;
  std::vector<double> c_values;
  std::vector<std::optional<double>> values;  // empty where the solve did not converge
  std::vector<std::string> statuses;
  bool complete = false;
  bool non_increasing = false;
  // m_c only: m(c) < m(c - mu) + m(mu) for every grid pair with c - mu also on the grid
  std::optional<bool> subadditive;
  int subadditive_pairs = 0;

  nlohmann::ordered_json to_json() const;
};

// Solves each c in ascending order, seeding from the previous minimizer.
// Verdicts allow a 1e-5 relative slack.
ScanReport scan_monotonic(ScanProblem problem, const PhysicsParams& pp, const std::vector<double>& c_values,
                          const GridSpec& grid, const Field& seed, const SolveConfig& cfg);

struct Lambda0Result {
  double lambda_small = 0.0;  // 2D ground eigenvalue of -Delta + b^2 |x|^2
  double lambda_big = 0.0;    // 3D Rayleigh-quotient infimum for -Delta + b^2 (x1^2 + x2^2)
  std::vector<double> big_history;  // quotient after each 3D stage

  nlohmann::ordered_json to_json() const;
};

// Imaginary-time iteration in 2D, and in 3D from a profile elongated along x3.
Lambda0Result lambda0_check(double b, const GridSpec& grid);

// sqrt(||grad(a - b)||^2 + ||a - b||^2)
double h1_distance(const Field& a, const Field& b);

}  // namespace xfel
