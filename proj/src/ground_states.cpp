#include "xfel/ground_states.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <mutex>

#include "xfel/error.hpp"
#include "xfel/fft.hpp"
#include "xfel/radial.hpp"
#include "xfel/scalings.hpp"

namespace xfel {
namespace {

struct Residual {
  double norm = 0.0;
  std::optional<double> multiplier;
};

struct Problem {
  std::string name;
  TermCoefficients objective;
  std::vector<TermCoefficients> constraints;
  std::function<Field(const Field&)> retract;
  std::function<Residual(const Variations&)> residual;
  std::function<double(const TermValues&)> constraint_residual;
  bool symmetrize = false;
  std::optional<double> ball;  // bound on ||u||_{X~}^2
  double preconditioner_shift = 1.0;
  // Stationarity system finished by Newton once the descent has settled.
  std::optional<TermCoefficients> polish_action;
  std::optional<double> mass;  // mass constraint kept by the polish
  // Residual of the identity (Q or K) that the stationarity equation implies.
  std::function<double(const TermValues&)> identity_residual;
};

Field precondition(const Field& f, const KernelSet& ks, double shift) {
  Field out = f;
  const int n = f.grid().n_per_axis;
  fft::forward3(out.data(), n);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= (shift - ks.laplacian_multiplier[i]);
  fft::inverse3(out.data(), n);
  return out;
}

double x_tilde(const TermValues& t, const PhysicsParams& pp) {
  return t.kinetic + pp.b * pp.b * t.harmonic_partial;
}

double x3_spread(const Field& u) {
  const GridSpec& g = u.grid();
  const int n = g.n_per_axis;
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) s += g.coord(k) * g.coord(k) * std::norm(u.at(i, j, k));
  const double m = u.mass();
  return m > 0 ? std::sqrt(s * g.volume_element() / m) : 0.0;
}

Residual fixed_frequency_residual(const TermCoefficients& action, const Variations& v, double p) {
  return {l2_norm(gradient(action, v, p)), std::nullopt};
}

Residual normalized_residual(const TermCoefficients& energy, const Variations& v, double p) {
  Field g = gradient(energy, v, p);
  const double omega = -inner(g, v.u) / v.terms.mass;
  g.axpy(omega, v.u);
  return {l2_norm(g), omega};
}

double positive_part(const TermCoefficients& c, const TermValues& t) {
  double s = 0.0;
  for (double x : {c.mass * t.mass, c.kinetic * t.kinetic, c.harmonic_partial * t.harmonic_partial,
                   c.coulomb * t.coulomb, c.hartree * t.hartree, c.lp * t.lp})
    s += std::max(x, 0.0);
  return s;
}

Field scale_to_mass(const Field& u, double c) {
  const double m = u.mass();
  if (!(m > 0.0)) throw InvalidArgument("cannot normalize the zero field");
  Field out = u;
  out *= std::sqrt(c / m);
  return out;
}

// Unknowns of the Newton polish: the field and one multiplier per constraint.
struct State {
  Field u;
  Eigen::VectorXd s;
};

double dot(const State& a, const State& b) { return inner(a.u, b.u) + a.s.dot(b.s); }

void axpy(State& y, double a, const State& x) {
  y.u.axpy(a, x.u);
  y.s += a * x.s;
}

void scale(State& x, double a) {
  x.u *= a;
  x.s *= a;
}

// Newton-GMRES on the Lagrange system  action'(u) = sum mu_a C_a'(u),  C_a(u) = target_a.
class Polisher {
 public:
  Polisher(TermCoefficients action, std::vector<TermCoefficients> constraints, std::vector<double> targets,
           const PhysicsParams& pp, const KernelSet& ks, double shift, bool symmetric)
      : action_(action), cons_(std::move(constraints)), targets_(std::move(targets)), pp_(pp), ks_(ks),
        shift_(shift), symmetric_(symmetric) {}

  // Least-squares multipliers at u; also fixes the scaling of the constraint rows.
  State start(const Field& u) {
    const Variations v = compute_variations(u, pp_.p, ks_, pp_.lambda2 != 0.0);
    const Field g = gradient(action_, v, pp_.p);
    const std::size_t n = cons_.size();
    std::vector<Field> normals;
    Eigen::MatrixXd gram(n, n);
    Eigen::VectorXd rhs(n);
    row_scale_.resize(n);
    for (const auto& c : cons_) normals.push_back(gradient(c, v, pp_.p));
    for (std::size_t a = 0; a < n; ++a) {
      rhs(a) = inner(normals[a], g);
      for (std::size_t b = 0; b < n; ++b) gram(a, b) = inner(normals[a], normals[b]);
      row_scale_[a] = 1.0 / std::sqrt(gram(a, a));
    }
    if (n == 0) return {u, Eigen::VectorXd()};
    return {u, gram.colPivHouseholderQr().solve(rhs)};
  }

  State residual(const State& x) const {
    TermCoefficients c = action_;
    for (std::size_t a = 0; a < cons_.size(); ++a) c = combine(c, cons_[a], -x.s(a));
    const Variations v = compute_variations(x.u, pp_.p, ks_, pp_.lambda2 != 0.0);
    State r{gradient(c, v, pp_.p), Eigen::VectorXd(cons_.size())};
    for (std::size_t a = 0; a < cons_.size(); ++a)
      r.s(a) = (cons_[a].apply(v.terms) - targets_[a]) * row_scale_[a];
    return r;
  }

  // Returns false when no step reduces the residual.
  bool step(State& x, State& fx, double& fnorm, double forcing) const {
    const double base = std::sqrt(dot(x, x));
    auto jac = [&](const State& d) {
      const double eps = 1e-7 * (1.0 + base) / std::sqrt(dot(d, d));
      State xe = x;
      axpy(xe, eps, d);
      State out = residual(xe);
      axpy(out, -1.0, fx);
      scale(out, 1.0 / eps);
      if (symmetric_) out.u = symmetrize_cubic(out.u);
      return out;
    };
    auto prec = [&](const State& y) { return State{precondition(y.u, ks_, shift_), y.s}; };
    // Right-preconditioned GMRES(m) for J P y = -F.
    const int m = 40;
    State rhs = fx;
    scale(rhs, -1.0);
    State sol{Field(x.u.grid()), Eigen::VectorXd::Zero(x.s.size())};
    double beta = fnorm;
    bool stop = false;
    for (int cycle = 0; cycle < 3 && !stop && beta > forcing * fnorm; ++cycle) {
      State r0 = rhs;
      if (cycle > 0) axpy(r0, -1.0, jac(prec(sol)));
      beta = std::sqrt(dot(r0, r0));
      if (beta <= forcing * fnorm) break;
      std::vector<State> basis;
      scale(r0, 1.0 / beta);
      basis.push_back(std::move(r0));
      Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(m + 1, m);
      Eigen::VectorXd y;
      std::vector<double> ests;
      int k = 0;
      while (k < m) {
        State w = jac(prec(basis[k]));
        for (int j = 0; j <= k; ++j) {
          hess(j, k) = dot(w, basis[j]);
          axpy(w, -hess(j, k), basis[j]);
        }
        hess(k + 1, k) = std::sqrt(dot(w, w));
        ++k;
        Eigen::VectorXd e = Eigen::VectorXd::Zero(k + 1);
        e(0) = beta;
        const Eigen::MatrixXd hk = hess.topLeftCorner(k + 1, k);
        y = hk.colPivHouseholderQr().solve(e);
        const double est = (e - hk * y).norm();
        ests.push_back(est);
        // Stalled: further vectors only fit finite-difference noise.
        const bool stalled = k > 5 && est > 0.95 * ests[k - 6];
        if (stalled) {
          --k;
          y = hess.topLeftCorner(k + 1, k).colPivHouseholderQr().solve(e.head(k + 1));
          stop = true;
          break;
        }
        if (hess(k, k - 1) <= 1e-14 * beta || est <= forcing * fnorm) break;
        scale(w, 1.0 / hess(k, k - 1));
        basis.push_back(std::move(w));
      }
      for (int j = 0; j < k; ++j) axpy(sol, y(j), basis[j]);
    }
    State d = prec(sol);
    for (double a = 1.0; a >= 1.0 / 64; a *= 0.5) {
      State xt = x;
      axpy(xt, a, d);
      if (!xt.u.all_finite()) continue;
      State ft = residual(xt);
      const double fn = std::sqrt(dot(ft, ft));
      if (fn < (1.0 - 1e-4 * a) * fnorm) {
        x = std::move(xt);
        fx = std::move(ft);
        fnorm = fn;
        return true;
      }
    }
    return false;
  }

 private:
  static TermCoefficients combine(TermCoefficients c, const TermCoefficients& d, double w) {
    c.mass += w * d.mass;
    c.kinetic += w * d.kinetic;
    c.harmonic_partial += w * d.harmonic_partial;
    c.coulomb += w * d.coulomb;
    c.hartree += w * d.hartree;
    c.lp += w * d.lp;
    return c;
  }

  TermCoefficients action_;
  std::vector<TermCoefficients> cons_;
  std::vector<double> targets_;
  std::vector<double> row_scale_;
  const PhysicsParams& pp_;
  const KernelSet& ks_;
  double shift_;
  bool symmetric_;
};

GroundStateResult descend(const Problem& pb, const PhysicsParams& pp, const KernelSet& ks,
                          const Field& seed, const SolveConfig& cfg) {
  cfg.validate();
  require_same_grid(seed.grid(), ks.grid);
  if (!seed.all_finite()) throw InvalidArgument("seed has non-finite values");
  const bool hartree = pp.lambda2 != 0.0;
  const double p = pp.p;
  const double shift = cfg.preconditioner_shift > 0 ? cfg.preconditioner_shift : pb.preconditioner_shift;

  // Retraction repeated until the discrete constraint holds; false if it cannot be met.
  auto settle = [&](Field& w, Variations& vw) {
    try {
      for (int k = 0; k < 8; ++k) {
        w = pb.retract(w);
        vw = compute_variations(w, p, ks, hartree);
        if (pb.constraint_residual(vw.terms) < 1e-11) return true;
      }
    } catch (const Error&) {
      return false;
    }
    return pb.constraint_residual(vw.terms) < cfg.constraint_tol;
  };

  GroundStateResult res;
  res.problem = pb.name;
  Field u = pb.symmetrize ? symmetrize_cubic(seed) : seed;
  Variations v;
  if (!settle(u, v)) throw ConvergenceError(pb.name + ": seed cannot be placed on the constraint set");
  double f = pb.objective.apply(v.terms);
  double tau = cfg.initial_step;
  Field u_prev, z_prev;
  bool have_prev = false;
  res.status = "max_iterations";
  if (cfg.record_history) res.history.push_back(f);

  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    if (pb.symmetrize && cfg.symmetrize_period > 0 && it > 0 && it % cfg.symmetrize_period == 0) {
      Field w = symmetrize_cubic(u);
      Variations vw;
      if (settle(w, vw) && pb.objective.apply(vw.terms) <= f + 1e-12 * std::abs(f)) {
        u = std::move(w);
        v = std::move(vw);
        f = pb.objective.apply(v.terms);
        have_prev = false;
      }
    }
    const Residual r = pb.residual(v);
    if (!std::isfinite(r.norm) || !std::isfinite(f))
      throw ConvergenceError(pb.name + ": iterate diverged at iteration " + std::to_string(it));
    if (r.norm < cfg.tol * std::sqrt(v.terms.mass) && pb.constraint_residual(v.terms) < cfg.constraint_tol) {
      res.status = "converged";
      break;
    }

    const Field g = gradient(pb.objective, v, p);
    Field z = precondition(g, ks, shift);
    const std::size_t nc = pb.constraints.size();
    if (nc > 0) {
      std::vector<Field> normals, pnormals;
      for (const auto& c : pb.constraints) {
        normals.push_back(gradient(c, v, p));
        pnormals.push_back(precondition(normals.back(), ks, shift));
      }
      Eigen::MatrixXd gram(nc, nc);
      Eigen::VectorXd rhs(nc);
      for (std::size_t a = 0; a < nc; ++a) {
        rhs(a) = inner(normals[a], z);
        for (std::size_t b = 0; b < nc; ++b) gram(a, b) = inner(normals[a], pnormals[b]);
      }
      const Eigen::VectorXd alpha = gram.colPivHouseholderQr().solve(rhs);
      for (std::size_t a = 0; a < nc; ++a) z.axpy(-alpha(a), pnormals[a]);
    }
    const double slope = inner(g, z);
    if (!(slope > 0.0)) {
      res.status = "stagnated";
      break;
    }
    if (pb.polish_action && std::sqrt(slope) < 5e-2 * std::sqrt(v.terms.mass)) {
      res.status = "handoff";
      break;
    }

    if (have_prev) {
      Field s = u - u_prev, y = z - z_prev;
      const double sy = inner(s, y);
      if (sy > 0.0) tau = std::clamp(inner(s, s) / sy, 1e-3 * cfg.initial_step, 1e3 * cfg.initial_step);
    }

    bool accepted = false;
    Field trial;
    Variations vt;
    double ft = 0.0;
    for (int bt = 0; bt < 60 && tau > 1e-14; ++bt, tau *= 0.5) {
      trial = u;
      trial.axpy(-tau, z);
      if (!settle(trial, vt)) continue;
      if (pb.ball && x_tilde(vt.terms, pp) > *pb.ball) continue;
      ft = pb.objective.apply(vt.terms);
      if (ft <= f - 1e-4 * tau * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.status = "stagnated";
      break;
    }
    u_prev = std::move(u);
    z_prev = std::move(z);
    have_prev = true;
    u = std::move(trial);
    v = std::move(vt);
    f = ft;
    if (cfg.record_history) res.history.push_back(f);
  }

  if (pb.polish_action && cfg.max_iters > 0) {
    std::vector<TermCoefficients> cons;
    std::vector<double> targets;
    if (pb.mass) {
      cons.push_back(coeffs::mass());
      targets.push_back(*pb.mass);
    }
    Polisher pol(*pb.polish_action, cons, targets, pp, ks, shift, pb.symmetrize);
    State x = pol.start(u);
    State fx = pol.residual(x);
    double fn = std::sqrt(dot(fx, fx));
    auto done = [&] {
      const TermValues t = compute_terms(x.u, p, ks);
      return l2_norm(fx.u) < 0.1 * cfg.tol * std::sqrt(t.mass) &&
             (!pb.mass || std::abs(t.mass - *pb.mass) < 0.1 * cfg.constraint_tol * *pb.mass);
    };
    for (int k = 0; k < 20 && !done(); ++k) {
      if (!pol.step(x, fx, fn, std::clamp(fn, 1e-2, 0.1))) break;
      ++it;
    }
    if (pb.mass) x.u *= std::sqrt(*pb.mass / x.u.mass());
    const Variations vx = compute_variations(x.u, p, ks, hartree);
    const bool inside = !pb.ball || x_tilde(vx.terms, pp) <= *pb.ball;
    if (inside && pb.residual(vx).norm < pb.residual(v).norm) u = std::move(x.u);
  }

  // Independent recomputation of everything reported.
  const Variations fin = compute_variations(u, p, ks, true);
  const Residual r = pb.residual(fin);
  PhysicsParams report_pp = pp;
  if (r.multiplier) report_pp.omega = *r.multiplier;
  res.report = compute_report(u, report_pp, ks);
  res.residual = r.norm;
  res.multiplier = r.multiplier;
  res.constraint_residual = pb.constraint_residual(res.report.terms());
  res.iterations = it;
  const TermValues ft = res.report.terms();
  if (pb.identity_residual) res.identity_residual = pb.identity_residual(ft);
  res.converged = res.residual < cfg.tol * std::sqrt(res.report.mass) &&
                  (!pb.mass || std::abs(ft.mass - *pb.mass) < cfg.constraint_tol * *pb.mass) &&
                  (!pb.identity_residual || res.identity_residual < cfg.identity_tol);
  if (res.converged) res.status = "converged";
  else if (res.status == "converged" || res.status == "handoff") res.status = "stagnated";
  res.x3_spread = x3_spread(u);
  if (pb.ball) res.boundary_warning = x_tilde(res.report.terms(), pp) > *pb.ball * (1.0 - 1e-3);
  res.field = std::move(u);
  return res;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

bool is_radial(const Field& f) {
  return max_abs_diff(symmetrize_cubic(f), f) <= 1e-8 * std::max(f.max_abs(), 1e-300);
}

}  // namespace

void SolveConfig::validate() const {
  if (max_iters < 0) throw InvalidArgument("max_iters must be >= 0");
  if (!(tol > 0.0)) throw InvalidArgument("tol must be > 0");
  if (!(constraint_tol > 0.0)) throw InvalidArgument("constraint_tol must be > 0");
  if (!(initial_step > 0.0)) throw InvalidArgument("initial_step must be > 0");
  if (symmetrize_period < 0) throw InvalidArgument("symmetrize_period must be >= 0");
  if (!(identity_tol > 0.0)) throw InvalidArgument("identity_tol must be > 0");
}

double classical_mass() {
  static const double mass = solve_classical_R(0.005, 30.0).mass;
  return mass;
}

double stationary_residual(const Field& u, const PhysicsParams& pp, const KernelSet& kernels) {
  const Variations v = compute_variations(u, pp.p, kernels, true);
  return l2_norm(gradient(coeffs::S_b_omega(pp), v, pp.p));
}

GroundStateResult solve_d_omega(const PhysicsParams& pp, const GridSpec& grid, const Field& seed,
                                const SolveConfig& cfg) {
  pp.validate();
  const double w = pp.require_omega("solve_d_omega");
  require(pp.b == 0.0, "solve_d_omega needs b = 0");
  require(pp.lambda1 >= 0.0 && pp.lambda2 > 0.0 && pp.lambda3 > 0.0 && w > 0.0,
          "solve_d_omega needs lambda1 >= 0, lambda2 > 0, lambda3 > 0, omega > 0");
  require(pp.p >= 4.0 / 3.0 - 1e-12, "solve_d_omega needs 4/3 <= p < 4");
  require(is_radial(seed), "solve_d_omega needs a radially symmetric seed");
  const KernelSet ks = make_kernels(grid);
  Problem pb;
  pb.name = "d_omega";
  pb.objective = coeffs::tilde_S_omega(pp);
  pb.constraints = {coeffs::Q(pp)};
  pb.retract = [&](const Field& u) { return project_pohozaev(u, pp, ks).projected; };
  const TermCoefficients action = coeffs::S_omega(pp);
  pb.residual = [&, action](const Variations& v) { return fixed_frequency_residual(action, v, pp.p); };
  pb.constraint_residual = [&](const TermValues& t) { return std::abs(coeffs::Q(pp).apply(t)) / t.kinetic; };
  pb.identity_residual = pb.constraint_residual;
  pb.symmetrize = true;
  pb.preconditioner_shift = w;
  pb.polish_action = action;
  // Amplitude prefit so the first projection stays within the resolvable range.
  Field start = seed;
  try {
    const TermValues t = compute_terms(seed, pp.p, ks);
    start *= first_root([&](double a) {
      return along_family(coeffs::Q(pp), t, ScalingKind::amplitude(), a, pp.p) / (a * a);
    });
  } catch (const NoCrossing&) {
  }
  GroundStateResult r = descend(pb, pp, ks, start, cfg);
  r.value = *r.report.S_omega;
  return r;
}

GroundStateResult solve_gamma_c(const PhysicsParams& pp, double c, const GridSpec& grid,
                                const Field& seed, const SolveConfig& cfg) {
  pp.validate();
  require(c > 0.0, "solve_gamma_c needs c > 0");
  require(pp.b == 0.0, "solve_gamma_c needs b = 0");
  require(pp.lambda1 >= 0.0 && pp.lambda2 > 0.0 && pp.lambda3 > 0.0,
          "solve_gamma_c needs lambda1 >= 0, lambda2 > 0, lambda3 > 0");
  if (pp.is_critical()) {
    const double cstar = std::pow(pp.lambda3, -1.5) * classical_mass();
    if (c <= cstar)
      throw Infeasible("critical p with c <= lambda3^{-3/2} ||R||^2 = " + std::to_string(cstar) +
                       ": the energy has no critical point on the constraint");
    require(c < std::pow(9.0 / 7.0, 1.5) * cstar, "critical p needs c < (9/7)^{3/2} lambda3^{-3/2} ||R||^2");
  } else {
    require(pp.p > 4.0 / 3.0, "solve_gamma_c needs p >= 4/3");
  }
  require(is_radial(seed), "solve_gamma_c needs a radially symmetric seed");
  const KernelSet ks = make_kernels(grid);
  Problem pb;
  pb.name = "gamma_c";
  pb.objective = coeffs::tilde_E(pp);
  pb.constraints = {coeffs::mass(), coeffs::Q(pp)};
  pb.mass = c;
  pb.retract = [&, c](const Field& u) { return project_pohozaev(scale_to_mass(u, c), pp, ks).projected; };
  const TermCoefficients energy = coeffs::E(pp);
  pb.residual = [&, energy](const Variations& v) { return normalized_residual(energy, v, pp.p); };
  pb.polish_action = energy;
  pb.identity_residual = [&](const TermValues& t) { return std::abs(coeffs::Q(pp).apply(t)) / t.kinetic; };
  pb.constraint_residual = [&, c](const TermValues& t) {
    return std::max(std::abs(t.mass - c) / c, std::abs(coeffs::Q(pp).apply(t)) / t.kinetic);
  };
  pb.symmetrize = true;
  {
    const Field u0 = scale_to_mass(seed, c);
    const Residual r0 = normalized_residual(energy, compute_variations(u0, pp.p, ks, pp.lambda2 != 0), pp.p);
    pb.preconditioner_shift = std::max(std::abs(r0.multiplier.value_or(1.0)), 1.0);
  }
  GroundStateResult r = descend(pb, pp, ks, seed, cfg);
  r.value = r.report.E;
  return r;
}

namespace {

Problem mass_problem(const std::string& name, const PhysicsParams& pp, double c, const KernelSet& ks,
                     const Field& seed) {
  Problem pb;
  pb.name = name;
  pb.objective = coeffs::E_b(pp);
  pb.constraints = {coeffs::mass()};
  pb.mass = c;
  pb.retract = [c](const Field& u) { return scale_to_mass(u, c); };
  const TermCoefficients energy = coeffs::E_b(pp);
  const double p = pp.p;
  pb.residual = [energy, p](const Variations& v) { return normalized_residual(energy, v, p); };
  pb.polish_action = energy;
  pb.constraint_residual = [c](const TermValues& t) { return std::abs(t.mass - c) / c; };
  const Field u0 = scale_to_mass(seed, c);
  const Residual r0 = normalized_residual(energy, compute_variations(u0, p, ks, pp.lambda2 != 0), p);
  pb.preconditioner_shift = std::max(std::abs(r0.multiplier.value_or(1.0)), 1.0);
  return pb;
}

}  // namespace

GroundStateResult solve_m_c(const PhysicsParams& pp, double c, const GridSpec& grid, const Field& seed,
                            const SolveConfig& cfg) {
  pp.validate();
  require(c > 0.0, "solve_m_c needs c > 0");
  require(pp.lambda3 > 0.0, "solve_m_c needs lambda3 > 0");
  if (pp.is_critical())
    require(c < std::pow(pp.lambda3, -1.5) * classical_mass(),
            "critical p needs c < lambda3^{-3/2} ||R||^2 for a bounded energy");
  else
    require(pp.p < 4.0 / 3.0, "solve_m_c needs p <= 4/3 for a bounded energy");
  const KernelSet ks = make_kernels(grid);
  Problem pb = mass_problem("m_c", pp, c, ks, seed);
  GroundStateResult r = descend(pb, pp, ks, seed, cfg);
  r.expect_nonexistence = pp.lambda1 > 0.0 && pp.lambda2 <= 0.0;
  r.value = r.report.E_b;
  return r;
}

GroundStateResult solve_local_min(const PhysicsParams& pp, double c, double r_ball, const GridSpec& grid,
                                  const Field& seed, const SolveConfig& cfg) {
  pp.validate();
  require(c > 0.0, "solve_local_min needs c > 0");
  require(r_ball > 0.0, "solve_local_min needs r > 0");
  require(pp.lambda2 <= 0.0 && pp.lambda3 > 0.0, "solve_local_min needs lambda2 <= 0, lambda3 > 0");
  require(pp.p >= 4.0 / 3.0 - 1e-12, "solve_local_min needs 4/3 <= p < 4");
  const KernelSet ks = make_kernels(grid);
  Problem pb = mass_problem("local_min", pp, c, ks, seed);
  pb.ball = r_ball;
  const Field u0 = scale_to_mass(seed, c);
  if (x_tilde(compute_terms(u0, pp.p, ks), pp) > r_ball)
    throw InvalidArgument("seed normalized to mass c lies outside the ball");
  GroundStateResult r = descend(pb, pp, ks, seed, cfg);
  r.expect_nonexistence = pp.lambda1 > 0.0;
  r.value = r.report.E_b;
  return r;
}

GroundStateResult solve_dK(const PhysicsParams& pp, const GridSpec& grid, const Field& seed,
                           const SolveConfig& cfg) {
  pp.validate();
  const double w = pp.require_omega("solve_dK");
  require(pp.lambda1 == 0.0 && pp.lambda2 >= 0.0 && pp.lambda3 > 0.0 && w > 0.0,
          "solve_dK needs lambda1 = 0, lambda2 >= 0, lambda3 > 0, omega > 0");
  require(pp.p >= 4.0 / 3.0 - 1e-12, "solve_dK needs 4/3 <= p < 4");
  require(pp.b != 0.0, "solve_dK needs b != 0");
  const KernelSet ks = make_kernels(grid);
  Problem pb;
  pb.name = "d_K";
  pb.objective = coeffs::tilde_S_b_omega(pp);
  pb.constraints = {coeffs::K_b_omega(pp)};
  pb.retract = [&](const Field& u) { return project_K(u, pp, ks).projected; };
  const TermCoefficients action = coeffs::S_b_omega(pp);
  pb.residual = [&, action](const Variations& v) { return fixed_frequency_residual(action, v, pp.p); };
  pb.polish_action = action;
  pb.constraint_residual = [&](const TermValues& t) {
    const TermCoefficients k = coeffs::K_b_omega(pp);
    return std::abs(k.apply(t)) / positive_part(k, t);
  };
  pb.identity_residual = pb.constraint_residual;
  pb.preconditioner_shift = w + 2 * std::abs(pp.b);
  GroundStateResult r = descend(pb, pp, ks, seed, cfg);
  r.value = *r.report.S_b_omega;
  return r;
}

nlohmann::ordered_json GroundStateResult::to_json() const {
  nlohmann::ordered_json j;
  j["problem"] = problem;
  j["value"] = value;
  j["multiplier"] = multiplier ? nlohmann::ordered_json(*multiplier) : nlohmann::ordered_json(nullptr);
  j["residual"] = residual;
  j["constraint_residual"] = constraint_residual;
  j["identity_residual"] = identity_residual;
  j["iterations"] = iterations;
  j["converged"] = converged;
  j["status"] = status;
  j["expect_nonexistence"] = expect_nonexistence;
  j["boundary_warning"] = boundary_warning;
  j["x3_spread"] = x3_spread;
  j["report"] = xfel::to_json(report);
  return j;
}

}  // namespace xfel
