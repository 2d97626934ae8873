#include "xfel/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "xfel/error.hpp"
#include "xfel/fft.hpp"
#include "xfel/scalings.hpp"

namespace xfel {
namespace {

std::string fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

bool blew_up(const std::string& status) { return status != "completed"; }

const char* expected_problem(const PhysicsParams& pp) { return pp.b == 0.0 ? "d_omega" : "d_K"; }

double reference_of(const TermValues& t, const PhysicsParams& pp) {
  return pp.b == 0.0 ? coeffs::S_omega(pp).apply(t) : coeffs::S_b_omega(pp).apply(t);
}

void check_pairing(const PhysicsParams& pp, const GroundStateResult& gs, const GridSpec& grid) {
  pp.validate();
  if (!pp.omega) throw InvalidArgument("classification needs omega");
  if (!gs.converged) throw InvalidArgument("ground state did not converge (" + gs.status + ")");
  if (gs.problem != expected_problem(pp))
    throw InvalidArgument("ground state problem " + gs.problem + " does not match b = " + std::to_string(pp.b));
  if (!(gs.field.grid() == grid)) throw GridMismatch("ground state lives on a different grid");
  const double ref = reference_of(gs.report.terms(), pp);
  if (std::abs(ref - gs.value) > 1e-9 * std::max(1.0, std::abs(gs.value)))
    throw InvalidArgument(fmt("ground state action %.12g differs from %.12g under these parameters", gs.value, ref));
}

// Samples of one evolution, classified as they are produced.
struct Watched {
  EvolutionTrace trace;
  std::vector<SetTag> tags;
  std::optional<double> first_violation;
  bool key_ok = true;
  double max_gradient = 0.0;
};

Watched watch(const Field& v, const PhysicsParams& pp, const GroundStateResult& gs, const EvolveConfig& cfg,
              const KernelSet& ks, const Classification& initial) {
  Watched w;
  const double key_rhs = 2.0 * (initial.s_value - initial.reference_action);
  const double key_slack = 1e-6 * std::max(1.0, std::abs(initial.reference_action));
  Evolution ev = evolve(v, pp, cfg, ks, [&](double t, const Field&, const TermValues& terms) {
    const Classification c = classify(terms, pp, gs);
    w.tags.push_back(c.set_tag);
    if (c.set_tag != initial.set_tag && !w.first_violation) w.first_violation = t;
    const bool collapsing = initial.set_tag == SetTag::B_omega || initial.set_tag == SetTag::K_omega_set;
    if (collapsing && c.q_value > key_rhs + key_slack) w.key_ok = false;
    w.max_gradient = std::max(w.max_gradient, std::sqrt(terms.kinetic));
  });
  w.trace = std::move(ev.trace);
  return w;
}

}  // namespace

const char* to_string(SetTag t) {
  switch (t) {
    case SetTag::A_omega: return "A_omega";
    case SetTag::B_omega: return "B_omega";
    case SetTag::neither: return "neither";
    case SetTag::N_cross: return "N_cross";
    case SetTag::K_omega_set: return "K_omega_set";
  }
  return "?";
}

double h1_distance(const Field& a, const Field& b) {
  const Field d = a - b;
  return std::sqrt(gradient_norm_sq(d) + d.mass());
}

Classification classify(const TermValues& t, const PhysicsParams& pp, const GroundStateResult& gs) {
  Classification c;
  c.reference_action = gs.value;
  c.k_value = coeffs::K_b_omega(pp).apply(t);
  const double band = set_dead_band;
  if (pp.b == 0.0) {
    const TermCoefficients s = coeffs::S_omega(pp), q = coeffs::Q(pp);
    c.s_value = s.apply(t);
    c.q_value = q.apply(t);
    const double s_scale = std::max(std::abs(c.reference_action), s.dominant(t));
    const bool below = c.reference_action - c.s_value > band * s_scale;
    const double q_band = band * q.dominant(t);
    if (below && c.q_value > q_band) c.set_tag = SetTag::A_omega;
    else if (below && c.q_value < -q_band) c.set_tag = SetTag::B_omega;
    return c;
  }
  const TermCoefficients s = coeffs::S_b_omega(pp), q = coeffs::Q_b(pp), k = coeffs::K_b_omega(pp);
  c.s_value = s.apply(t);
  c.q_value = q.apply(t);
  const bool k_neg = c.k_value < -band * k.dominant(t);
  const bool below = c.reference_action - c.s_value > band * std::max(std::abs(c.reference_action), s.dominant(t));
  if (k_neg && std::abs(c.q_value) <= cross_tolerance * t.kinetic) c.set_tag = SetTag::N_cross;
  else if (k_neg && below && c.q_value < -band * q.dominant(t)) c.set_tag = SetTag::K_omega_set;
  return c;
}

Classification classify(const Field& v, const PhysicsParams& pp, const GroundStateResult& gs,
                        const KernelSet& kernels) {
  check_pairing(pp, gs, v.grid());
  return classify(compute_terms(v, pp.p, kernels), pp, gs);
}

nlohmann::ordered_json Classification::to_json() const {
  return {{"set", to_string(set_tag)},
          {"s_value", s_value},
          {"q_value", q_value},
          {"k_value", k_value},
          {"reference_action", reference_action}};
}

DichotomyReport dichotomy_run(const Field& v, const PhysicsParams& pp, const GroundStateResult& gs,
                              const EvolveConfig& cfg, const KernelSet& kernels) {
  if (pp.b != 0.0) throw InvalidArgument("dichotomy_run is for b = 0");
  DichotomyReport r;
  r.initial = classify(v, pp, gs, kernels);
  if (r.initial.set_tag != SetTag::A_omega && r.initial.set_tag != SetTag::B_omega)
    throw InvalidArgument(std::string("dichotomy data must lie in A_omega or B_omega, got ") +
                          to_string(r.initial.set_tag));
  const bool in_a = r.initial.set_tag == SetTag::A_omega;
  if (in_a && pp.lambda1 >= 0.0 && pp.lambda2 >= 0.0 && pp.p > 4.0 / 3.0)
    r.gradient_bound = std::sqrt(6.0 * pp.p / (3.0 * pp.p - 4.0) * r.initial.reference_action);

  Watched w = watch(v, pp, gs, cfg, kernels, r.initial);
  r.trace = std::move(w.trace);
  r.sample_tags = std::move(w.tags);
  r.first_violation_time = w.first_violation;
  r.invariant = !w.first_violation;
  r.key_estimate_ok = w.key_ok;
  r.max_gradient = w.max_gradient;
  r.outcome_ok = in_a ? r.trace.status == "completed" : r.trace.status == "blowup_detected";

  if (!r.invariant) {
    EvolveConfig half = cfg;
    half.dt_init *= 0.5;
    half.dt_min *= 0.5;
    const Watched again = watch(v, pp, gs, half, kernels, r.initial);
    r.rerun_violation_time = again.first_violation;
    const bool drift = !again.first_violation || *again.first_violation > *w.first_violation;
    r.verdict = drift ? "numerical_drift" : "contradiction";
  } else if (!r.outcome_ok) {
    r.verdict = "outcome_mismatch";
  } else if (!r.key_estimate_ok || (r.gradient_bound && r.max_gradient > *r.gradient_bound * (1 + 1e-3))) {
    r.verdict = "bound_violated";
  } else {
    r.verdict = "confirmed";
  }
  return r;
}

nlohmann::ordered_json DichotomyReport::to_json() const {
  nlohmann::ordered_json tags = nlohmann::ordered_json::array();
  for (SetTag t : sample_tags) tags.push_back(to_string(t));
  nlohmann::ordered_json j;
  j["initial"] = initial.to_json();
  j["status"] = trace.status;
  j["end_time"] = trace.times.empty() ? 0.0 : trace.times.back();
  j["sample_tags"] = tags;
  j["invariant"] = invariant;
  j["outcome_ok"] = outcome_ok;
  j["key_estimate_ok"] = key_estimate_ok;
  j["max_gradient"] = max_gradient;
  j["gradient_bound"] = gradient_bound ? nlohmann::ordered_json(*gradient_bound) : nlohmann::ordered_json(nullptr);
  j["verdict"] = verdict;
  if (first_violation_time) j["first_violation_time"] = *first_violation_time;
  if (rerun_violation_time) j["rerun_violation_time"] = *rerun_violation_time;
  return j;
}

ThresholdResult mass_threshold_bisect(const Field& family_seed, const PhysicsParams& pp, const EvolveConfig& cfg,
                                      const KernelSet& kernels, double mass_lo, double mass_hi, double rel_tol) {
  pp.validate();
  if (!pp.is_critical()) throw InvalidArgument("mass_threshold_bisect needs p = 4/3");
  if (!(mass_lo > 0.0) || !(mass_hi > mass_lo)) throw InvalidArgument("need 0 < mass_lo < mass_hi");
  if (!(rel_tol > 0.0)) throw InvalidArgument("rel_tol must be > 0");
  const double seed_mass = family_seed.mass();
  if (!(seed_mass > 0.0)) throw InvalidArgument("family seed is zero");

  ThresholdResult res;
  auto run = [&](double m) {
    Field v = family_seed;
    v *= std::sqrt(m / seed_mass);
    const Evolution ev = evolve(v, pp, cfg, kernels);
    res.runs.push_back({m, ev.trace.status, ev.trace.times.back()});
    return blew_up(ev.trace.status);
  };
  if (run(mass_lo)) throw ExperimentFailure(fmt("bracket error: mass %.6g already blows up", mass_lo));
  if (!run(mass_hi)) throw ExperimentFailure(fmt("bracket error: mass %.6g stays global", mass_hi));
  double lo = mass_lo, hi = mass_hi;
  while (hi - lo >= rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (run(mid) ? hi : lo) = mid;
  }
  res.mass_lo = lo;
  res.mass_hi = hi;
  res.threshold = 0.5 * (lo + hi);
  return res;
}

nlohmann::ordered_json ThresholdResult::to_json() const {
  nlohmann::ordered_json runs_j = nlohmann::ordered_json::array();
  for (const auto& r : runs) runs_j.push_back({{"mass", r.mass}, {"status", r.status}, {"end_time", r.end_time}});
  return {{"threshold", threshold}, {"mass_lo", mass_lo}, {"mass_hi", mass_hi}, {"runs", runs_j}};
}

std::vector<CrossPoint> find_cross_points(const Field& u, const PhysicsParams& pp, const KernelSet& kernels,
                                          const std::vector<double>& amplitudes) {
  pp.validate();
  if (pp.b == 0.0 || !pp.omega) throw InvalidArgument("find_cross_points needs b != 0 and omega");
  const TermCoefficients q = coeffs::Q_b(pp), s = coeffs::S_b_omega(pp), k = coeffs::K_b_omega(pp);
  const ScalingKind kind = ScalingKind::p2_scaling(pp.p);
  std::vector<CrossPoint> out;
  for (double mu : amplitudes) {
    if (!(mu > 1.0)) throw InvalidArgument("cross-point amplitudes must be > 1");
    Field w = u;
    w *= mu;
    const TermValues tw = compute_terms(w, pp.p, kernels);
    if (!(q.apply(tw) < 0.0)) continue;
    double lam;
    try {
      lam = first_root([&](double l) { return along_family(q, tw, kind, l, pp.p); }, 1.0, 1e3, 2001);
    } catch (const NoCrossing&) {
      continue;
    }
    // secant on the grid fields; the scalar root is exact only for the continuous scaling
    auto q_at = [&](double l, TermValues& t) {
      t = compute_terms(rescale(w, kind, l), pp.p, kernels);
      return q.apply(t);
    };
    TermValues t;
    double l0 = lam, q0;
    try {
      q0 = q_at(l0, t);
      double l1 = lam * (1 + 1e-4), q1 = 0.0;
      TermValues t1;
      for (int it = 0; it < 12 && std::abs(q0) > 0.1 * cross_tolerance * t.kinetic; ++it) {
        q1 = q_at(l1, t1);
        if (q1 == q0) break;
        const double l2 = l1 - q1 * (l1 - l0) / (q1 - q0);
        l0 = l1;
        q0 = q1;
        t = t1;
        l1 = l2;
      }
    } catch (const ResolutionError&) {
      continue;
    }
    CrossPoint cp{mu, l0, s.apply(t), q0, k.apply(t), t.kinetic};
    if (std::abs(cp.q_value) <= cross_tolerance * cp.kinetic && cp.k_value < 0.0) out.push_back(cp);
  }
  return out;
}

Field cross_point_field(const Field& u, const CrossPoint& cp, const PhysicsParams& pp) {
  Field w = u;
  w *= cp.amplitude;
  return rescale(w, ScalingKind::p2_scaling(pp.p), cp.stretch);
}

ProbeReport instability_probe(const GroundStateResult& gs, const PhysicsParams& pp, const EvolveConfig& cfg,
                              const KernelSet& kernels, const std::vector<double>& lambdas, double cutoff_radius) {
  check_pairing(pp, gs, kernels.grid);
  if (lambdas.empty()) throw InvalidArgument("instability_probe needs at least one lambda");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 1.0)) throw InvalidArgument("instability_probe lambdas must be > 1");
    if (i > 0 && !(lambdas[i] < lambdas[i - 1])) throw InvalidArgument("lambdas must decrease toward 1");
  }
  const bool amplitude = pp.b != 0.0 && pp.p >= 2.0;
  const ScalingKind kind = amplitude ? ScalingKind::amplitude() : ScalingKind::mass_preserving();
  const SetTag wanted = pp.b == 0.0 ? SetTag::B_omega : SetTag::K_omega_set;

  ProbeReport rep;
  rep.family = kind.name();
  rep.reference_action = gs.value;
  for (double lam : lambdas) {
    const Field v = apply_cutoff(rescale(gs.field, kind, lam), cutoff_radius);
    ProbeEntry e;
    e.lambda = lam;
    e.h1_distance = h1_distance(v, gs.field);
    e.membership = classify(v, pp, gs, kernels);
    e.in_set = e.membership.set_tag == wanted;
    if (!e.in_set)
      throw ExperimentFailure(fmt("probe datum at lambda %.6g is not in the target set: S = %.10g, Q = %.6g, K = %.6g",
                                  lam, e.membership.s_value, e.membership.q_value, e.membership.k_value) +
                              " (set " + to_string(e.membership.set_tag) + ")");
    const Watched w = watch(v, pp, gs, cfg, kernels, e.membership);
    e.status = w.trace.status;
    e.end_time = w.trace.times.back();
    e.key_estimate_ok = w.key_ok;
    e.invariant = !w.first_violation;
    rep.entries.push_back(e);
  }
  rep.all_in_set = true;
  rep.key_estimate_ok = std::all_of(rep.entries.begin(), rep.entries.end(),
                                    [](const ProbeEntry& e) { return e.key_estimate_ok; });
  rep.all_blowup = std::all_of(rep.entries.begin(), rep.entries.end(),
                               [](const ProbeEntry& e) { return e.status == "blowup_detected"; });
  rep.distances_decrease = true;
  for (std::size_t i = 1; i < rep.entries.size(); ++i)
    if (!(rep.entries[i].h1_distance < rep.entries[i - 1].h1_distance)) rep.distances_decrease = false;
  if (pp.b != 0.0) {
    rep.cross_points = find_cross_points(gs.field, pp, kernels, {1.02, 1.05, 1.1, 1.2, 1.5});
    for (const auto& cp : rep.cross_points)
      rep.alpha_estimate = std::min(rep.alpha_estimate.value_or(cp.s_value), cp.s_value);
  }
  return rep;
}

nlohmann::ordered_json ProbeReport::to_json() const {
  nlohmann::ordered_json es = nlohmann::ordered_json::array();
  for (const auto& e : entries)
    es.push_back({{"lambda", e.lambda},
                  {"h1_distance", e.h1_distance},
                  {"membership", e.membership.to_json()},
                  {"in_set", e.in_set},
                  {"status", e.status},
                  {"end_time", e.end_time},
                  {"key_estimate_ok", e.key_estimate_ok},
                  {"invariant", e.invariant}});
  nlohmann::ordered_json cps = nlohmann::ordered_json::array();
  for (const auto& c : cross_points)
    cps.push_back({{"amplitude", c.amplitude},
                   {"stretch", c.stretch},
                   {"s_value", c.s_value},
                   {"q_value", c.q_value},
                   {"k_value", c.k_value}});
  nlohmann::ordered_json j;
  j["family"] = family;
  j["entries"] = es;
  j["all_in_set"] = all_in_set;
  j["all_blowup"] = all_blowup;
  j["distances_decrease"] = distances_decrease;
  j["key_estimate_ok"] = key_estimate_ok;
  j["reference_action"] = reference_action;
  j["cross_points"] = cps;
  j["alpha_estimate"] = alpha_estimate ? nlohmann::ordered_json(*alpha_estimate) : nlohmann::ordered_json(nullptr);
  return j;
}

ScanReport scan_monotonic(ScanProblem problem, const PhysicsParams& pp, const std::vector<double>& c_values,
                          const GridSpec& grid, const Field& seed, const SolveConfig& cfg) {
  if (c_values.empty()) throw InvalidArgument("scan needs at least one c");
  for (std::size_t i = 1; i < c_values.size(); ++i)
    if (!(c_values[i] > c_values[i - 1])) throw InvalidArgument("c values must be strictly ascending");
  constexpr double slack = 1e-5;
  ScanReport rep;
  rep.problem = problem == ScanProblem::gamma_c ? "gamma_c" : "m_c";
  rep.c_values = c_values;
  Field current = seed;
  for (double c : c_values) {
    auto solve = [&](const Field& s) {
      return problem == ScanProblem::gamma_c ? solve_gamma_c(pp, c, grid, s, cfg) : solve_m_c(pp, c, grid, s, cfg);
    };
    GroundStateResult r;
    try {
      r = solve(current);
    } catch (const ConvergenceError&) {
      // the previous minimizer may be too sharp to rescale onto the new constraint set
      r = solve(seed);
    }
    rep.statuses.push_back(r.status);
    if (r.converged) {
      rep.values.push_back(r.value);
      current = r.field;
    } else {
      rep.values.push_back(std::nullopt);
    }
  }
  rep.complete = std::all_of(rep.values.begin(), rep.values.end(), [](const auto& v) { return v.has_value(); });
  auto leq = [&](double a, double b) { return a <= b + slack * std::max(std::abs(a), std::abs(b)); };
  rep.non_increasing = true;
  std::optional<double> prev;
  for (const auto& v : rep.values) {
    if (!v) continue;
    if (prev && !leq(*v, *prev)) rep.non_increasing = false;
    prev = v;
  }
  if (problem == ScanProblem::m_c) {
    auto value_at = [&](double c) -> std::optional<double> {
      for (std::size_t i = 0; i < c_values.size(); ++i)
        if (std::abs(c_values[i] - c) <= 1e-12 * c) return rep.values[i];
      return std::nullopt;
    };
    bool ok = true;
    for (std::size_t i = 0; i < c_values.size(); ++i) {
      if (!rep.values[i]) continue;
      for (std::size_t j = 0; j < i; ++j) {
        const double mu = c_values[j];
        const auto rest = value_at(c_values[i] - mu);
        if (!rest || !rep.values[j]) continue;
        ++rep.subadditive_pairs;
        const double sum = *rest + *rep.values[j];
        if (!(*rep.values[i] < sum + slack * std::max(std::abs(sum), std::abs(*rep.values[i])))) ok = false;
      }
    }
    rep.subadditive = ok;
  }
  return rep;
}

nlohmann::ordered_json ScanReport::to_json() const {
  nlohmann::ordered_json vals = nlohmann::ordered_json::array();
  for (const auto& v : values) vals.push_back(v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr));
  nlohmann::ordered_json j;
  j["problem"] = problem;
  j["c_values"] = c_values;
  j["values"] = vals;
  j["statuses"] = statuses;
  j["complete"] = complete;
  j["non_increasing"] = non_increasing;
  j["subadditive"] = subadditive ? nlohmann::ordered_json(*subadditive) : nlohmann::ordered_json(nullptr);
  j["subadditive_pairs"] = subadditive_pairs;
  return j;
}

namespace {

// Normalized imaginary-time iteration for -Delta + V on a periodic box in
// `dims` dimensions; returns the Rayleigh quotient at the end of each stage.
std::vector<double> imaginary_time(std::vector<cplx>& psi, const std::vector<double>& potential,
                                   const std::vector<double>& k2, int n, int dims) {
  auto forward = [&](cplx* d) { dims == 2 ? fft::forward2(d, n) : fft::forward3(d, n); };
  auto inverse = [&](cplx* d) { dims == 2 ? fft::inverse2(d, n) : fft::inverse3(d, n); };
  auto normalize = [&] {
    double s = 0.0;
    for (const cplx& z : psi) s += std::norm(z);
    const double inv = 1.0 / std::sqrt(s);
    for (cplx& z : psi) z *= inv;
  };
  std::vector<cplx> modes(psi.size());
  auto quotient = [&] {
    modes = psi;
    forward(modes.data());
    double num = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) num += k2[i] * std::norm(modes[i]) + potential[i] * std::norm(psi[i]);
    return num;  // psi is normalized
  };
  std::vector<double> stages;
  normalize();
  for (double tau : {0.05, 0.01, 0.002}) {
    std::vector<double> half(psi.size()), kin(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
      half[i] = std::exp(-0.5 * tau * potential[i]);
      kin[i] = std::exp(-tau * k2[i]);
    }
    double prev = quotient();
    bool done = false;
    for (int it = 1; it <= 40000 && !done; ++it) {
      for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= half[i];
      forward(psi.data());
      for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= kin[i];
      inverse(psi.data());
      for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= half[i];
      normalize();
      if (it % 10 == 0) {
        const double q = quotient();
        done = std::abs(prev - q) < 1e-13 * std::abs(q);
        prev = q;
      }
    }
    if (!done) throw ConvergenceError(fmt("imaginary-time iteration stalled at tau = %.3g", tau));
    stages.push_back(prev);
  }
  return stages;
}

}  // namespace

Lambda0Result lambda0_check(double b, const GridSpec& grid) {
  if (b == 0.0 || !std::isfinite(b)) throw InvalidArgument("lambda0_check needs b != 0");
  grid.validate();
  const int n = grid.n_per_axis;
  const auto nn = static_cast<std::size_t>(n);
  const double b2 = b * b;
  Lambda0Result res;

  {
    std::vector<cplx> psi(nn * nn);
    std::vector<double> pot(nn * nn), k2(nn * nn);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double x = grid.coord(i), y = grid.coord(j);
        const std::size_t idx = i * nn + j;
        psi[idx] = std::exp(-0.5 * (x * x + y * y));
        pot[idx] = b2 * (x * x + y * y);
        k2[idx] = grid.wavenumber(i) * grid.wavenumber(i) + grid.wavenumber(j) * grid.wavenumber(j);
      }
    res.lambda_small = imaginary_time(psi, pot, k2, n, 2).back();
  }
  {
    const double ell = 0.5 * grid.half_length;
    std::vector<cplx> psi(nn * nn * nn);
    std::vector<double> pot(psi.size()), k2(psi.size());
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k, ++idx) {
          const double x = grid.coord(i), y = grid.coord(j), z = grid.coord(k);
          psi[idx] = std::exp(-0.5 * (x * x + y * y) - 0.5 * z * z / (ell * ell));
          pot[idx] = b2 * (x * x + y * y);
          k2[idx] = grid.wavenumber(i) * grid.wavenumber(i) + grid.wavenumber(j) * grid.wavenumber(j) +
                    grid.wavenumber(k) * grid.wavenumber(k);
        }
    res.big_history = imaginary_time(psi, pot, k2, n, 3);
    res.lambda_big = res.big_history.back();
  }
  return res;
}

nlohmann::ordered_json Lambda0Result::to_json() const {
  return {{"lambda_small", lambda_small}, {"lambda_big", lambda_big}, {"big_history", big_history}};
}

}  // namespace xfel
