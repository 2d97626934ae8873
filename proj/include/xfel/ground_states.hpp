#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xfel/field.hpp"
#include "xfel/functionals.hpp"
#include "xfel/kernels.hpp"

namespace xfel {

struct SolveConfig {
  int max_iters = 3000;
  // Converged when the Euler-Lagrange residual is below tol * ||u||_{L^2}.
  double tol = 1e-4;
  // Relative constraint residual accepted at convergence.
  double constraint_tol = 1e-6;
  // Relative residual of the Pohozaev-type identity (Q or K) accepted at
  // convergence; on a grid it only holds to discretization accuracy.
  double identity_tol = 1e-2;
  // Initial step for the preconditioned direction; Barzilai-Borwein afterwards.
  double initial_step = 1.0;
  // sigma in the (-Delta + sigma)^{-1} preconditioner; <= 0 picks it from the problem.
  double preconditioner_shift = 0.0;
  // Cubic-symmetry averaging period for the radial problems; 0 disables.
  int symmetrize_period = 10;
  // Keep the objective value of every accepted iterate.
  bool record_history = true;

  void validate() const;
};

struct GroundStateResult {
  std::string problem;
  Field field;
  double value = 0.0;
  std::optional<double> multiplier;
  FunctionalReport report;
  double residual = 0.0;           // ||Euler-Lagrange residual||_{L^2}
  double constraint_residual = 0.0;
  double identity_residual = 0.0;  // |Q| or |K| relative, where the problem has one
  int iterations = 0;
  bool converged = false;
  std::string status;              // converged | max_iterations | stagnated
  bool expect_nonexistence = false;
  bool boundary_warning = false;
  double x3_spread = 0.0;          // sqrt(int x3^2 |u|^2 / mass)
  std::vector<double> history;     // objective at accepted iterates

  nlohmann::ordered_json to_json() const;
};

// inf { S_omega(v) : Q(v) = 0 } over radial v; b = 0.
GroundStateResult solve_d_omega(const PhysicsParams& pp, const GridSpec& grid, const Field& seed,
                                const SolveConfig& cfg);
// inf { E(u) : ||u||^2 = c, Q(u) = 0 } over radial u; multiplier is omega_c.
GroundStateResult solve_gamma_c(const PhysicsParams& pp, double c, const GridSpec& grid,
                                const Field& seed, const SolveConfig& cfg);
// inf { E_b(u) : ||u||^2 = c }; multiplier is omega.
GroundStateResult solve_m_c(const PhysicsParams& pp, double c, const GridSpec& grid, const Field& seed,
                            const SolveConfig& cfg);
// inf { E_b(u) : ||u||^2 = c, ||u||_{X~}^2 <= r }.
GroundStateResult solve_local_min(const PhysicsParams& pp, double c, double r_ball, const GridSpec& grid,
                                  const Field& seed, const SolveConfig& cfg);
// inf { S_{b,omega}(v) : K_{b,omega}(v) = 0 }.
GroundStateResult solve_dK(const PhysicsParams& pp, const GridSpec& grid, const Field& seed,
                           const SolveConfig& cfg);

// L^2 norm of the Euler-Lagrange residual of -Delta u + omega u + V u = 0 (full
// equation including the partial harmonic term).
double stationary_residual(const Field& u, const PhysicsParams& pp, const KernelSet& kernels);

// ||R||_{L^2}^2 of the classical soliton, computed once.
double classical_mass();

}  // namespace xfel
