#pragma once

#include <utility>

#include "xfel/field.hpp"
#include "xfel/functionals.hpp"
#include "xfel/kernels.hpp"

namespace xfel {

// v -> lambda^a v(lambda^s x) with s in {0, 1}.
class ScalingKind {
 public:
  enum class Tag { mass_preserving, cubed, amplitude, p_scaling, p2_scaling };

  static ScalingKind mass_preserving() { return {Tag::mass_preserving, 0.0}; }
  static ScalingKind cubed() { return {Tag::cubed, 0.0}; }
  static ScalingKind amplitude() { return {Tag::amplitude, 0.0}; }
  // mu^{2/p} v(mu x)
  static ScalingKind p_scaling(double p) { return {Tag::p_scaling, p}; }
  // lambda^{3/(p+2)} v(lambda x)
  static ScalingKind p2_scaling(double p) { return {Tag::p2_scaling, p}; }

  Tag tag() const { return tag_; }
  double amplitude_exponent() const;
  double spatial_exponent() const { return tag_ == Tag::amplitude ? 0.0 : 1.0; }
  // Power of lambda picked up by each integral; `p` is the nonlinearity exponent.
  TermValues term_exponents(double p) const;
  const char* name() const;

 private:
  ScalingKind(Tag tag, double p) : tag_(tag), p_(p) {}
  Tag tag_;
  double p_;
};

Field rescale(const Field& u, const ScalingKind& kind, double lambda);

// Integrals of the scaled field from those of the unscaled one.
TermValues scaled_terms(const TermValues& t, const ScalingKind& kind, double lambda, double p);
// A functional along a scaling family and its lambda-derivative, in closed form.
double along_family(const TermCoefficients& c, const TermValues& t, const ScalingKind& kind,
                    double lambda, double p);
double along_family_derivative(const TermCoefficients& c, const TermValues& t,
                               const ScalingKind& kind, double lambda, double p);

struct Projection {
  double lambda = 1.0;
  Field projected;
};

// Root of lambda -> Q(u_lambda) on the mass-preserving family.
double pohozaev_lambda(const TermValues& t, const PhysicsParams& pp);
Projection project_pohozaev(const Field& u, const PhysicsParams& pp, const KernelSet& kernels);
Projection project_pohozaev(const Field& u, const TermValues& t, const PhysicsParams& pp);

// Smallest positive root of lambda -> K_{b,omega}(lambda u).
double k_lambda(const TermValues& t, const PhysicsParams& pp);
Projection project_K(const Field& u, const PhysicsParams& pp, const KernelSet& kernels);
Projection project_K(const Field& u, const TermValues& t, const PhysicsParams& pp);

// chi(|x|/M) u with chi = 1 on [0,1], 0 on [2,inf) and a C^2 quintic in between.
Field apply_cutoff(const Field& u, double M);
double cutoff_profile(double s);

// Bracketed scalar root on a geometric grid, then bisection in log(lambda).
// Returns the first sign change scanning upward from lo; throws NoCrossing.
template <class F>
double first_root(F&& f, double lo = 1e-4, double hi = 1e4, int points = 4001);

}  // namespace xfel

#include "xfel/detail/root.hpp"
