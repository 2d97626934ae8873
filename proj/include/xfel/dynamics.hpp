#pragma once

#include <functional>
#include <string>
#include <vector>

#include "xfel/field.hpp"
#include "xfel/functionals.hpp"
#include "xfel/kernels.hpp"

namespace xfel {

struct EvolveConfig {
  double t_end = 1.0;
  double dt_init = 1e-3;
  double dt_min = 1e-7;
  // blowup_detected once ||grad psi|| reaches this multiple of its initial value.
  double blowup_gradient_factor = 1e3;
  // Largest potential phase dt * max|V| per step, in units of pi.
  double cfl_safety = 0.5;
  // Relative per-step energy change that triggers dt halving.
  double energy_jump_tol = 1e-3;
  int monitor_stride = 10;
  int snapshot_stride = 0;  // 0 disables
  std::string snapshot_prefix;
  void validate() const;
};

struct EvolutionTrace {
  std::vector<double> times, mass, energy_b, virial_J, q_b, grad_norm, x_norm;
  std::string status = "completed";  // completed | blowup_detected | dt_underflow
  int steps = 0;
  double final_dt = 0.0;

  std::size_t size() const { return times.size(); }
  std::string to_csv() const;
};

struct Evolution {
  Field final;
  EvolutionTrace trace;
};

// Called at every trace sample with the time, the state and its term integrals.
using EvolveObserver = std::function<void(double, const Field&, const TermValues&)>;

// One Strang step: potential half step, kinetic step exp(i dt Delta), potential half step.
Field strang_step(const Field& psi, double dt, const PhysicsParams& pp, const KernelSet& kernels);

// Pointwise multiplication by exp(-i tau V[psi]); |psi| is unchanged.
void potential_substep(Field& psi, double tau, const PhysicsParams& pp, const KernelSet& kernels);

Evolution evolve(const Field& psi0, const PhysicsParams& pp, const EvolveConfig& cfg, const KernelSet& kernels,
                 const EvolveObserver& observer = {});

// max over interior samples of |J'' - 8 Q_b| / (1 + |8 Q_b|), J'' by central differences.
double virial_check(const EvolutionTrace& trace);

}  // namespace xfel
