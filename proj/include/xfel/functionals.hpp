#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "xfel/field.hpp"
#include "xfel/kernels.hpp"

namespace xfel {

enum class Regime { subcritical, critical, supercritical };

struct PhysicsParams {
  double b = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda3 = 1.0;
  double p = 2.0;
  std::optional<double> omega;

  void validate() const;
  Regime regime() const;
  bool is_critical() const;
  double require_omega(const char* who) const;
};

// The six integrals every functional is built from.
struct TermValues {
  double mass = 0.0;
  double kinetic = 0.0;
  double harmonic_partial = 0.0;
  double coulomb = 0.0;
  double hartree = 0.0;
  double lp = 0.0;
};

// A functional written as a linear combination of the six integrals.
struct TermCoefficients {
  double mass = 0.0;
  double kinetic = 0.0;
  double harmonic_partial = 0.0;
  double coulomb = 0.0;
  double hartree = 0.0;
  double lp = 0.0;

  double apply(const TermValues& t) const;
  // Largest |coefficient * term|, the natural scale for relative comparisons.
  double dominant(const TermValues& t) const;
};

namespace coeffs {
TermCoefficients E(const PhysicsParams& pp);
TermCoefficients E_b(const PhysicsParams& pp);
TermCoefficients S_omega(const PhysicsParams& pp);
TermCoefficients S_b_omega(const PhysicsParams& pp);
TermCoefficients Q(const PhysicsParams& pp);
TermCoefficients Q_b(const PhysicsParams& pp);
TermCoefficients K_b_omega(const PhysicsParams& pp);
TermCoefficients I_b_omega(const PhysicsParams& pp);
TermCoefficients J_b_omega(const PhysicsParams& pp);
TermCoefficients tilde_S_omega(const PhysicsParams& pp);
TermCoefficients tilde_E(const PhysicsParams& pp);
TermCoefficients tilde_S_b_omega(const PhysicsParams& pp);
TermCoefficients mass();
}  // namespace coeffs

struct FunctionalReport {
  double mass = 0.0;
  double kinetic = 0.0;
  double harmonic_partial = 0.0;
  double coulomb = 0.0;
  double hartree = 0.0;
  double lp = 0.0;
  double E = 0.0;
  double E_b = 0.0;
  std::optional<double> S_omega;
  std::optional<double> S_b_omega;
  double Q = 0.0;
  double Q_b = 0.0;
  std::optional<double> K_b_omega;
  std::optional<double> I_b_omega;
  std::optional<double> J_b_omega;
  std::optional<double> tilde_S_omega;
  double tilde_E = 0.0;
  std::optional<double> tilde_S_b_omega;
  double x_norm_sq = 0.0;
  double x_tilde_norm_sq = 0.0;

  TermValues terms() const;
};

TermValues compute_terms(const Field& u, double p, const KernelSet& kernels);
FunctionalReport report_from_terms(const TermValues& t, const PhysicsParams& pp);
FunctionalReport compute_report(const Field& u, const PhysicsParams& pp, const KernelSet& kernels);

nlohmann::ordered_json to_json(const FunctionalReport& r);
nlohmann::ordered_json to_json(const PhysicsParams& pp);

// (3/10)||u||_{10/3}^{10/3} / (||u||_2^{4/3} ||grad u||^2 / 2); at most ||R||_2^{-4/3}.
double gn_ratio(const Field& u);

// Pieces of the first variation at u; the gradient of sum c_T T(u) with respect
// to Re<.,.>_{L^2} is assembled from these by `gradient`.
struct Variations {
  Field u;
  Field neg_lap_u;   // -Delta u
  Field harmonic_u;  // (x1^2 + x2^2) u
  Field coulomb_u;   // u / |x|
  Field hartree_u;   // (|x|^{-1} * |u|^2) u; zero when skipped
  Field power_u;     // |u|^p u
  TermValues terms;  // hartree is 0 when skipped
  bool has_hartree = false;
};

Variations compute_variations(const Field& u, double p, const KernelSet& kernels, bool with_hartree);
Field gradient(const TermCoefficients& c, const Variations& v, double p);

}  // namespace xfel
