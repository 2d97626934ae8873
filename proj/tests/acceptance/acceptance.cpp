// End-to-end acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
// Optional arguments select criteria by index (1-12).
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "xfel/dynamics.hpp"
#include "xfel/error.hpp"
#include "xfel/experiments.hpp"
#include "xfel/functionals.hpp"
#include "xfel/ground_states.hpp"
#include "xfel/radial.hpp"
#include "xfel/scalings.hpp"

using namespace xfel;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double rel(double a, double b, double scale) { return std::abs(a - b) / std::max(scale, 1e-300); }

const RadialProfile& classical_R() {
  static const RadialProfile R = solve_classical_R(0.005, 30.0);
  return R;
}

// Collapse is flagged at 3x the initial gradient: the 64^3 lattice caps growth near 4x.
EvolveConfig collapse_run(double t_end, double dt = 2e-3) {
  EvolveConfig c;
  c.t_end = t_end;
  c.dt_init = dt;
  c.dt_min = 1e-7;
  c.blowup_gradient_factor = 3.0;
  c.monitor_stride = 10;
  return c;
}

PhysicsParams cubic(double b, double lambda1, double lambda2, std::optional<double> omega) {
  PhysicsParams pp;
  pp.b = b;
  pp.lambda1 = lambda1;
  pp.lambda2 = lambda2;
  pp.p = 2.0;
  pp.omega = omega;
  return pp;
}

Outcome functional_algebra() {
  const GridSpec g = GridSpec::make(16, 4.0);
  const KernelSet ks = make_kernels(g);
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> coef(-2.0, 2.0), pdist(0.2, 3.8), wdist(0.1, 3.0);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const PhysicsParams pp{coef(rng), coef(rng), coef(rng), coef(rng), pdist(rng), wdist(rng)};
    const Field u = t % 2 ? oracle::random_smooth_field(g, rng) : oracle::random_field(g, rng);
    const FunctionalReport r = compute_report(u, pp, ks);
    const TermValues tv = r.terms();
    const double si = std::max(coeffs::I_b_omega(pp).dominant(tv), coeffs::J_b_omega(pp).dominant(tv));
    const double ss = coeffs::S_omega(pp).dominant(tv) + coeffs::Q(pp).dominant(tv);
    const double sk = coeffs::S_b_omega(pp).dominant(tv) + coeffs::K_b_omega(pp).dominant(tv);
    const double q = 2.0 / (3 * pp.p);
    worst = std::max({worst, rel(r.Q_b, 1.5 * *r.I_b_omega - *r.J_b_omega, si),
                      rel(*r.tilde_S_omega, *r.S_omega - q * r.Q, ss), rel(r.tilde_E, r.E - q * r.Q, ss),
                      rel(*r.tilde_S_b_omega, *r.S_b_omega - *r.K_b_omega / (3 * pp.p + 3), sk)});
  }
  return {worst < 1e-10, fmt("1000 fields, worst relative identity error %.2e (tol 1e-10)", worst)};
}

Outcome gaussian_terms() {
  const GridSpec g = GridSpec::make(64, 8.0);
  const TermValues t = compute_terms(oracle::gaussian(g), 2.0, make_kernels(g));
  const double got[6] = {t.mass, t.kinetic, t.harmonic_partial, t.coulomb, t.hartree, t.lp};
  const double want[6] = {oracle::gauss_mass(),    oracle::gauss_kinetic(), oracle::gauss_harmonic_partial(),
                          oracle::gauss_coulomb(), oracle::gauss_hartree(), oracle::gauss_l4()};
  double worst = 0.0;
  for (int i = 0; i < 6; ++i) worst = std::max(worst, std::abs(got[i] / want[i] - 1.0));
  return {worst < 1e-2, fmt("worst relative error over six terms %.2e (tol 1e-2)", worst)};
}

Outcome classical_soliton() {
  const RadialProfile& R = classical_R();
  const RadialProfile fine = solve_classical_R(0.0025, 30.0);
  const double drift = std::abs(fine.mass - R.mass) / R.mass;
  const bool ok = R.pohozaev_residual() < 1e-4 && R.nehari_residual() < 1e-4 && drift < 1e-4;
  return {ok, fmt("||R||^2 = %.6f, Pohozaev %.1e, Nehari %.1e, dr-halving change %.1e", R.mass,
                  R.pohozaev_residual(), R.nehari_residual(), drift)};
}

Outcome sharp_gn() {
  const RadialProfile& R = classical_R();
  const double bound = std::pow(R.mass, -2.0 / 3.0);
  const GridSpec fine = GridSpec::make(64, 8.0);
  const double at_R = gn_ratio(lift_radial(R, fine));
  const GridSpec g = GridSpec::make(32, 6.0);
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) worst = std::max(worst, gn_ratio(oracle::random_smooth_field(g, rng, 1 + i % 4)));
  const double err = std::abs(at_R / bound - 1.0);
  return {err < 5e-3 && worst <= bound * (1 + 1e-2),
          fmt("rho(R) off by %.2e (tol 5e-3); max rho over 100 fields = %.3f x bound", err, worst / bound)};
}

Outcome pohozaev_crossing() {
  const GridSpec g = GridSpec::make(16, 6.0);
  const KernelSet ks = make_kernels(g);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> coef(0.0, 1.0);
  const ScalingKind kind = ScalingKind::mass_preserving();
  const double ps[3] = {1.5, 2.0, 3.0};
  int bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    PhysicsParams pp;
    pp.p = ps[trial % 3];
    pp.lambda1 = coef(rng);
    pp.lambda2 = coef(rng);
    pp.lambda3 = 0.5 + coef(rng);
    pp.omega = 1.0;
    const double p = pp.p;
    Field v = oracle::random_smooth_field(g, rng);
    // amplitude puts the crossing inside the sampled window
    const TermValues t1 = compute_terms(v, p, ks);
    v *= std::pow((1.0 + 2.0 * coef(rng)) * t1.kinetic / (pp.lambda3 * t1.lp), 1.0 / p);
    const TermValues t = compute_terms(v, p, ks);
    int changes = 0;
    double prev = 0.0, crossing = 0.0;
    for (int i = 0; i < 400; ++i) {
      const double l = std::pow(10.0, -2.0 + 4.0 * i / 399.0);
      const double q = along_family(coeffs::Q(pp), t, kind, l, p);
      if (i > 0 && (q < 0) != (prev < 0)) ++changes, crossing = l;
      prev = q;
    }
    double worst = -1e300;
    if (changes == 1) {
      const double dl = 50.0 * crossing / 400.0;
      for (int i = 1; i < 399; ++i) {
        const double l = crossing + i * dl;
        worst = std::max(worst, along_family(coeffs::S_omega(pp), t, kind, l + dl, p) -
                                    2 * along_family(coeffs::S_omega(pp), t, kind, l, p) +
                                    along_family(coeffs::S_omega(pp), t, kind, l - dl, p));
      }
    }
    if (changes != 1 || worst > 1e-8) ++bad;
  }
  return {bad == 0, fmt("%d of 100 fields violate a single crossing or concavity", bad)};
}

// Largest |I|, |J|, |Q_b| relative to the dominant term; pp carries the frequency or multiplier.
double identity_error(const Field& u, const PhysicsParams& pp, const KernelSet& ks) {
  const FunctionalReport f = compute_report(u, pp, ks);
  const double w = *pp.omega;
  const double scale = std::max({f.kinetic, std::abs(w) * f.mass, pp.b * pp.b * f.harmonic_partial,
                                 std::abs(pp.lambda1) * f.coulomb, std::abs(pp.lambda2) * f.hartree,
                                 std::abs(pp.lambda3) * f.lp});
  return std::max({std::abs(*f.I_b_omega), std::abs(*f.J_b_omega), std::abs(f.Q_b)}) / scale;
}

Outcome solver_consistency() {
  const GridSpec g = GridSpec::make(64, 6.0);
  const KernelSet ks = make_kernels(g);
  struct Case {
    std::string name;
    PhysicsParams pp;
    GroundStateResult r;
  };
  std::vector<Case> cases;
  const PhysicsParams soliton = cubic(0.0, 0.0, 0.01, 1.0);
  cases.push_back({"d_omega", soliton, solve_d_omega(soliton, g, oracle::gaussian(g), SolveConfig{})});
  const PhysicsParams normalized = cubic(0.0, 0.0, 0.01, std::nullopt);
  for (double c : {16.0, 18.0, 20.0})
    cases.push_back({fmt("gamma_%g", c), normalized, solve_gamma_c(normalized, c, g, oracle::gaussian(g), SolveConfig{})});
  const PhysicsParams trapped = cubic(1.0, 0.0, 0.01, 1.0);
  cases.push_back({"d_K", trapped, solve_dK(trapped, g, oracle::gaussian(g), SolveConfig{})});
  bool ok = true;
  std::string detail;
  for (auto& c : cases) {
    PhysicsParams pp = c.pp;
    if (c.r.multiplier) pp.omega = *c.r.multiplier;
    const double el = stationary_residual(c.r.field, pp, ks) / std::sqrt(c.r.report.mass);
    const double id = identity_error(c.r.field, pp, ks);
    ok = ok && c.r.converged && el < 1e-4 && id < 1e-2;
    detail += fmt("%s%s: %s EL %.1e, identities %.1e", detail.empty() ? "" : "; ", c.name.c_str(),
                  c.r.converged ? "converged" : c.r.status.c_str(), el, id);
  }
  return {ok, detail};
}

Outcome gamma_blowup() {
  // The minimizer width scales like c, so the box does too.
  const PhysicsParams pp = cubic(0.0, 0.0, 0.01, std::nullopt);
  std::vector<double> e, k, w;
  bool converged = true;
  std::string statuses;
  for (double c : {5.0, 8.0, 12.0, 20.0}) {
    const GridSpec g = GridSpec::make(64, 0.3 * c);
    const GroundStateResult r = solve_gamma_c(pp, c, g, oracle::gaussian(g, 0.05 * c), SolveConfig{});
    converged = converged && r.converged;
    statuses += fmt(" %s", r.status.c_str());
    e.push_back(r.report.E);
    k.push_back(r.report.kinetic);
    w.push_back(r.multiplier.value_or(0.0));
  }
  bool ok = converged && w[0] > 0.0;
  for (int i = 1; i < 4; ++i) ok = ok && e[i] < e[i - 1] && k[i] < k[i - 1];
  return {ok, fmt("c = 5, 8, 12, 20:%s; omega_c %.3f %.3f %.3f %.3f; E %.3f %.3f %.3f %.3f; kinetic %.2f %.2f %.2f %.2f",
                  statuses.c_str(), w[0], w[1], w[2], w[3], e[0], e[1], e[2], e[3], k[0], k[1], k[2], k[3])};
}

Outcome conservation_virial() {
  const GridSpec g = GridSpec::make(32, 6.0);
  const KernelSet ks = make_kernels(g);
  PhysicsParams pp = cubic(0.5, 0.2, 0.1, std::nullopt);
  std::mt19937_64 rng(2);
  Field psi0 = oracle::random_smooth_field(g, rng, 3, false, false, 1.0);
  psi0 *= std::sqrt(2.0 / psi0.mass());
  auto run = [&](double t_end, double dt, int stride, const PhysicsParams& p, const Field& f) {
    EvolveConfig c;
    c.t_end = t_end;
    c.dt_init = dt;
    c.dt_min = 1e-3 * dt;
    c.monitor_stride = stride;
    return evolve(f, p, c, ks).trace;
  };
  double mass_drift = 0.0;
  std::vector<double> energy;
  for (double dt : {0.02, 0.01, 0.005}) {
    const EvolutionTrace tr = run(1.0, dt, 10, pp, psi0);
    if (tr.status != "completed" || tr.final_dt != dt) return {false, "conservation run did not complete at fixed dt"};
    for (double m : tr.mass) mass_drift = std::max(mass_drift, std::abs(m / tr.mass.front() - 1.0));
    energy.push_back(std::abs(tr.energy_b.back() - tr.energy_b.front()));
  }
  const double r1 = energy[0] / energy[1], r2 = energy[1] / energy[2];

  const GridSpec wide = GridSpec::make(64, 8.0);
  PhysicsParams free_flow;
  free_flow.lambda3 = 0.0;
  EvolveConfig fc;
  fc.t_end = 0.5;
  fc.dt_init = 1e-3;
  fc.monitor_stride = 50;
  const double free_res = virial_check(evolve(oracle::gaussian(wide), free_flow, fc, make_kernels(wide)).trace);

  pp.lambda1 = 0.0;
  const double v1 = virial_check(run(0.2, 0.01, 2, pp, psi0)), v2 = virial_check(run(0.2, 0.005, 2, pp, psi0));
  const bool ok = mass_drift < 1e-10 && r1 > 3 && r1 < 5 && r2 > 3 && r2 < 5 && free_res < 1e-2 && v2 < 1e-2 &&
                  v1 / v2 > 3 && v1 / v2 < 5;
  return {ok, fmt("mass drift %.1e; energy drift ratios %.2f %.2f; free virial %.1e; virial %.1e -> %.1e (x%.2f)",
                  mass_drift, r1, r2, free_res, v1, v2, v1 / v2)};
}

Outcome dichotomy() {
  const GridSpec g = GridSpec::make(64, 6.0);
  const KernelSet ks = make_kernels(g);
  bool ok = true;
  std::string detail;
  for (double l1 : {0.1, 0.0}) {
    const PhysicsParams pp = cubic(0.0, l1, 0.1, 1.0);
    const GroundStateResult gs = solve_d_omega(pp, g, oracle::gaussian(g), SolveConfig{});
    if (!gs.converged) return {false, fmt("lambda1 = %g: ground state %s", l1, gs.status.c_str())};
    detail += fmt("%slambda1 = %g:", detail.empty() ? "" : "; ", l1);
    for (double mu : {0.8, 0.9, 0.95, 1.1, 1.2, 1.3}) {
      Field v = gs.field;
      v *= mu;
      const DichotomyReport r = dichotomy_run(v, pp, gs, collapse_run(2.0), ks);
      const bool want_a = mu < 1.0;
      const bool tag_ok = r.initial.set_tag == (want_a ? SetTag::A_omega : SetTag::B_omega);
      ok = ok && tag_ok && r.passed() && r.invariant && r.key_estimate_ok;
      if (want_a) ok = ok && r.trace.times.back() == 2.0 && r.gradient_bound && r.max_gradient <= *r.gradient_bound;
      detail += fmt(" %g %s/%s", mu, to_string(r.initial.set_tag), r.verdict.c_str());
    }
  }
  return {ok, detail};
}

Outcome mass_threshold() {
  const GridSpec g = GridSpec::make(48, 4.0);
  const KernelSet ks = make_kernels(g);
  const RadialProfile& R = classical_R();
  const Field seed = lift_radial(R, g, 1.0, 2.0);
  PhysicsParams pp;
  pp.p = 4.0 / 3.0;
  const EvolveConfig cfg = collapse_run(3.0, 1e-3);
  const ThresholdResult base = mass_threshold_bisect(seed, pp, cfg, ks, 0.8 * R.mass, 1.2 * R.mass, 0.02);
  pp.lambda3 = 16.0;
  const ThresholdResult strong = mass_threshold_bisect(seed, pp, cfg, ks, 0.8 * R.mass / 64, 1.2 * R.mass / 64, 0.02);
  const double e1 = base.threshold / R.mass - 1.0, e16 = strong.threshold * 64 / base.threshold - 1.0;
  return {std::abs(e1) < 0.05 && std::abs(e16) < 0.05,
          fmt("threshold %.3f vs ||R||^2 %.3f (%+.2f%%); lambda3 = 16 rescaling off by %+.2f%%", base.threshold,
              R.mass, 100 * e1, 100 * e16)};
}

Outcome instability_probes() {
  const GridSpec g = GridSpec::make(64, 6.0);
  const KernelSet ks = make_kernels(g);
  std::string detail;
  bool ok = true;
  for (double b : {0.0, 1.0}) {
    const PhysicsParams pp = cubic(b, 0.0, 0.01, 1.0);
    const GroundStateResult gs = b == 0.0 ? solve_d_omega(pp, g, oracle::gaussian(g), SolveConfig{})
                                          : solve_dK(pp, g, oracle::gaussian(g), SolveConfig{});
    if (!gs.converged) return {false, fmt("b = %g: ground state %s", b, gs.status.c_str())};
    const ProbeReport r = instability_probe(gs, pp, collapse_run(2.0), ks, {1.1, 1.05, 1.02}, 3.0);
    ok = ok && r.all_in_set && r.all_blowup && r.distances_decrease && r.key_estimate_ok;
    detail += fmt("%sb = %g (%s): distances", detail.empty() ? "" : "; ", b, r.family.c_str());
    for (const auto& e : r.entries) detail += fmt(" %.3f", e.h1_distance);
    detail += fmt(", in set %s, blow-up %s, key estimate %s", r.all_in_set ? "yes" : "no",
                  r.all_blowup ? "yes" : "no", r.key_estimate_ok ? "yes" : "no");
  }
  return {ok, detail};
}

Outcome lambda0() {
  const GridSpec g = GridSpec::make(64, 6.0);
  bool ok = true;
  std::string detail;
  for (double b : {1.0, 2.0}) {
    const Lambda0Result r = lambda0_check(b, g);
    const double e2 = std::abs(r.lambda_small / (2 * b) - 1), e3 = std::abs(r.lambda_big / (2 * b) - 1),
                 e23 = std::abs(r.lambda_big / r.lambda_small - 1);
    ok = ok && e2 < 1e-2 && e3 < 1e-2 && e23 < 1e-2;
    detail += fmt("%sb = %g: 2D %.6f, 3D %.6f", detail.empty() ? "" : "; ", b, r.lambda_small, r.lambda_big);
  }
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"functional algebra", functional_algebra},
      {"Gaussian closed forms", gaussian_terms},
      {"classical soliton", classical_soliton},
      {"sharp Gagliardo-Nirenberg", sharp_gn},
      {"unique Pohozaev crossing", pohozaev_crossing},
      {"solver consistency", solver_consistency},
      {"gamma(c) multiplier and blow-up", gamma_blowup},
      {"conservation and virial", conservation_virial},
      {"dichotomy", dichotomy},
      {"critical mass threshold", mass_threshold},
      {"instability probes", instability_probes},
      {"Lambda0 = lambda0", lambda0},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("[%s] %2d %s (%.0f s): %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
