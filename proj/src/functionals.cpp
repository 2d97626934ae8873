#include "xfel/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "xfel/error.hpp"

namespace xfel {

void PhysicsParams::validate() const {
  if (!(p > 0.0 && p < 4.0)) throw InvalidArgument("p in (0,4) violated: p = " + std::to_string(p));
  for (double v : {b, lambda1, lambda2, lambda3})
    if (!std::isfinite(v)) throw InvalidArgument("physics coefficients must be finite");
  if (omega && !std::isfinite(*omega)) throw InvalidArgument("omega must be finite");
}

bool PhysicsParams::is_critical() const { return std::abs(p - 4.0 / 3.0) < 1e-12; }

Regime PhysicsParams::regime() const {
  if (is_critical()) return Regime::critical;
  return p < 4.0 / 3.0 ? Regime::subcritical : Regime::supercritical;
}

double PhysicsParams::require_omega(const char* who) const {
  if (!omega) throw InvalidArgument(std::string(who) + " requires omega");
  return *omega;
}

double TermCoefficients::apply(const TermValues& t) const {
  return mass * t.mass + kinetic * t.kinetic + harmonic_partial * t.harmonic_partial +
         coulomb * t.coulomb + hartree * t.hartree + lp * t.lp;
}

double TermCoefficients::dominant(const TermValues& t) const {
  return std::max({std::abs(mass * t.mass), std::abs(kinetic * t.kinetic),
                   std::abs(harmonic_partial * t.harmonic_partial), std::abs(coulomb * t.coulomb),
                   std::abs(hartree * t.hartree), std::abs(lp * t.lp)});
}

namespace coeffs {

TermCoefficients E(const PhysicsParams& pp) {
  return {0.0, 0.5, 0.0, pp.lambda1 / 2, pp.lambda2 / 4, -pp.lambda3 / (pp.p + 2)};
}

TermCoefficients E_b(const PhysicsParams& pp) {
  TermCoefficients c = E(pp);
  c.harmonic_partial = pp.b * pp.b / 2;
  return c;
}

TermCoefficients S_omega(const PhysicsParams& pp) {
  TermCoefficients c = E(pp);
  c.mass = pp.require_omega("S_omega") / 2;
  return c;
}

TermCoefficients S_b_omega(const PhysicsParams& pp) {
  TermCoefficients c = E_b(pp);
  c.mass = pp.require_omega("S_b_omega") / 2;
  return c;
}

TermCoefficients Q(const PhysicsParams& pp) {
  const double p = pp.p;
  return {0.0, 1.0, 0.0, pp.lambda1 / 2, pp.lambda2 / 4, -3 * pp.lambda3 * p / (2 * (p + 2))};
}

TermCoefficients Q_b(const PhysicsParams& pp) {
  TermCoefficients c = Q(pp);
  c.harmonic_partial = -pp.b * pp.b;
  return c;
}

TermCoefficients K_b_omega(const PhysicsParams& pp) {
  const double w = pp.require_omega("K_b_omega"), p = pp.p, b2 = pp.b * pp.b;
  return {1.5 * w, 2.5, b2 / 2, 2 * pp.lambda1, 7 * pp.lambda2 / 4,
          -pp.lambda3 * (3 * p + 3) / (p + 2)};
}

TermCoefficients I_b_omega(const PhysicsParams& pp) {
  const double w = pp.require_omega("I_b_omega");
  return {w, 1.0, pp.b * pp.b, pp.lambda1, pp.lambda2, -pp.lambda3};
}

TermCoefficients J_b_omega(const PhysicsParams& pp) {
  const double w = pp.require_omega("J_b_omega"), p = pp.p;
  return {1.5 * w, 0.5, 2.5 * pp.b * pp.b, pp.lambda1, 1.25 * pp.lambda2, -3 * pp.lambda3 / (p + 2)};
}

// The lp term cancels in all three reduced functionals.
TermCoefficients tilde_E(const PhysicsParams& pp) {
  const double p = pp.p;
  return {0.0, (3 * p - 4) / (6 * p), 0.0, pp.lambda1 * (3 * p - 2) / (6 * p),
          pp.lambda2 * (3 * p - 2) / (12 * p), 0.0};
}

TermCoefficients tilde_S_omega(const PhysicsParams& pp) {
  TermCoefficients c = tilde_E(pp);
  c.mass = pp.require_omega("tilde_S_omega") / 2;
  return c;
}

TermCoefficients tilde_S_b_omega(const PhysicsParams& pp) {
  const double w = pp.require_omega("tilde_S_b_omega"), p = pp.p, b2 = pp.b * pp.b;
  const double d = 6 * p + 6;
  return {3 * p * w / d,           (3 * p - 2) / d, b2 * (3 * p + 2) / d, pp.lambda1 * (3 * p - 1) / d,
          pp.lambda2 * (3 * p - 4) / (2 * d), 0.0};
}

TermCoefficients mass() { return {1.0, 0.0, 0.0, 0.0, 0.0, 0.0}; }

}  // namespace coeffs

TermValues FunctionalReport::terms() const {
  return {mass, kinetic, harmonic_partial, coulomb, hartree, lp};
}

TermValues compute_terms(const Field& u, double p, const KernelSet& kernels) {
  require_same_grid(u.grid(), kernels.grid);
  TermValues t;
  const double dv = u.grid().volume_element();
  std::vector<double> v = hartree_potential(u, kernels);
  double m = 0, h = 0, c = 0, hh = 0, l = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a2 = std::norm(u[i]);
    m += a2;
    h += kernels.harmonic_partial_grid[i] * a2;
    c += kernels.coulomb_grid[i] * a2;
    hh += v[i] * a2;
    l += std::pow(a2, 0.5 * (p + 2));
  }
  t.mass = m * dv;
  t.kinetic = gradient_norm_sq(u);
  t.harmonic_partial = h * dv;
  t.coulomb = c * dv;
  t.hartree = hh * dv;
  t.lp = l * dv;
  return t;
}

FunctionalReport report_from_terms(const TermValues& t, const PhysicsParams& pp) {
  pp.validate();
  FunctionalReport r;
  r.mass = t.mass;
  r.kinetic = t.kinetic;
  r.harmonic_partial = t.harmonic_partial;
  r.coulomb = t.coulomb;
  r.hartree = t.hartree;
  r.lp = t.lp;
  r.E = coeffs::E(pp).apply(t);
  r.E_b = coeffs::E_b(pp).apply(t);
  r.Q = coeffs::Q(pp).apply(t);
  r.Q_b = coeffs::Q_b(pp).apply(t);
  r.tilde_E = coeffs::tilde_E(pp).apply(t);
  if (pp.omega) {
    r.S_omega = coeffs::S_omega(pp).apply(t);
    r.S_b_omega = coeffs::S_b_omega(pp).apply(t);
    r.K_b_omega = coeffs::K_b_omega(pp).apply(t);
    r.I_b_omega = coeffs::I_b_omega(pp).apply(t);
    r.J_b_omega = coeffs::J_b_omega(pp).apply(t);
    r.tilde_S_omega = coeffs::tilde_S_omega(pp).apply(t);
    r.tilde_S_b_omega = coeffs::tilde_S_b_omega(pp).apply(t);
  }
  r.x_norm_sq = t.kinetic + t.mass + t.harmonic_partial;
  r.x_tilde_norm_sq = t.kinetic + pp.b * pp.b * t.harmonic_partial;
  return r;
}

FunctionalReport compute_report(const Field& u, const PhysicsParams& pp, const KernelSet& kernels) {
  pp.validate();
  return report_from_terms(compute_terms(u, pp.p, kernels), pp);
}

nlohmann::ordered_json to_json(const FunctionalReport& r) {
  auto opt = [](const std::optional<double>& v) -> nlohmann::ordered_json {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json j;
  j["mass"] = r.mass;
  j["kinetic"] = r.kinetic;
  j["harmonic_partial"] = r.harmonic_partial;
  j["coulomb"] = r.coulomb;
  j["hartree"] = r.hartree;
  j["lp"] = r.lp;
  j["E"] = r.E;
  j["E_b"] = r.E_b;
  j["S_omega"] = opt(r.S_omega);
  j["S_b_omega"] = opt(r.S_b_omega);
  j["Q"] = r.Q;
  j["Q_b"] = r.Q_b;
  j["K_b_omega"] = opt(r.K_b_omega);
  j["I_b_omega"] = opt(r.I_b_omega);
  j["J_b_omega"] = opt(r.J_b_omega);
  j["tilde_S_omega"] = opt(r.tilde_S_omega);
  j["tilde_E"] = r.tilde_E;
  j["tilde_S_b_omega"] = opt(r.tilde_S_b_omega);
  j["x_norm_sq"] = r.x_norm_sq;
  j["x_tilde_norm_sq"] = r.x_tilde_norm_sq;
  return j;
}

nlohmann::ordered_json to_json(const PhysicsParams& pp) {
  nlohmann::ordered_json j;
  j["b"] = pp.b;
  j["lambda1"] = pp.lambda1;
  j["lambda2"] = pp.lambda2;
  j["lambda3"] = pp.lambda3;
  j["p"] = pp.p;
  j["omega"] = pp.omega ? nlohmann::ordered_json(*pp.omega) : nlohmann::ordered_json(nullptr);
  return j;
}

double gn_ratio(const Field& u) {
  const double m = u.mass();
  const double a = gradient_norm_sq(u);
  if (m == 0.0 || a == 0.0) throw InvalidArgument("gn_ratio of a zero (or constant) field");
  return 0.3 * lp_norm_pow(u, 10.0 / 3.0) / (std::pow(m, 2.0 / 3.0) * a / 2);
}

Variations compute_variations(const Field& u, double p, const KernelSet& kernels, bool with_hartree) {
  require_same_grid(u.grid(), kernels.grid);
  Variations v;
  v.u = u;
  v.neg_lap_u = neg_laplacian(u, kernels);
  v.harmonic_u = Field(u.grid());
  v.coulomb_u = Field(u.grid());
  v.hartree_u = Field(u.grid());
  v.power_u = Field(u.grid());
  v.has_hartree = with_hartree;
  std::vector<double> pot;
  if (with_hartree) pot = hartree_potential(u, kernels);
  const double dv = u.grid().volume_element();
  double m = 0, k = 0, h = 0, c = 0, hh = 0, l = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const cplx ui = u[i];
    const double a2 = std::norm(ui);
    const double ap = std::pow(a2, 0.5 * p);
    v.harmonic_u[i] = kernels.harmonic_partial_grid[i] * ui;
    v.coulomb_u[i] = kernels.coulomb_grid[i] * ui;
    v.power_u[i] = ap * ui;
    m += a2;
    k += ui.real() * v.neg_lap_u[i].real() + ui.imag() * v.neg_lap_u[i].imag();
    h += kernels.harmonic_partial_grid[i] * a2;
    c += kernels.coulomb_grid[i] * a2;
    l += ap * a2;
    if (with_hartree) {
      v.hartree_u[i] = pot[i] * ui;
      hh += pot[i] * a2;
    }
  }
  v.terms = {m * dv, k * dv, h * dv, c * dv, hh * dv, l * dv};
  return v;
}

Field gradient(const TermCoefficients& c, const Variations& v, double p) {
  Field g(v.u.grid());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = 2 * c.mass * v.u[i] + 2 * c.kinetic * v.neg_lap_u[i] +
           2 * c.harmonic_partial * v.harmonic_u[i] + 2 * c.coulomb * v.coulomb_u[i] +
           4 * c.hartree * v.hartree_u[i] + (p + 2) * c.lp * v.power_u[i];
  }
  return g;
}

}  // namespace xfel
