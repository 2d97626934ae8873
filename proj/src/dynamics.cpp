#include "xfel/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "xfel/error.hpp"
#include "xfel/snapshot.hpp"

namespace xfel {
namespace {

// Local potential V[psi] = b^2 (x1^2+x2^2) + lambda1/|x| + lambda2 V_h - lambda3 |psi|^p.
// It depends on |psi| only, which the potential sub-step leaves unchanged, so
// one evaluation per step serves both half steps and the monitors.
struct Potential {
  std::vector<double> hartree, power, total;
  double max_abs = 0.0;
};

struct Stepper {
  const PhysicsParams& pp;
  const KernelSet& ks;

  Potential potential_of(const Field& f) const {
    Potential v;
    v.hartree = pp.lambda2 != 0.0 ? hartree_potential(f, ks) : std::vector<double>(f.size(), 0.0);
    v.power.resize(f.size());
    v.total.resize(f.size());
    const double b2 = pp.b * pp.b, half_p = 0.5 * pp.p;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double a2 = std::norm(f[i]);
      v.power[i] = half_p == 1.0 ? a2 : std::pow(a2, half_p);
      v.total[i] = b2 * ks.harmonic_partial_grid[i] + pp.lambda1 * ks.coulomb_grid[i] +
                   pp.lambda2 * v.hartree[i] - pp.lambda3 * v.power[i];
      v.max_abs = std::max(v.max_abs, std::abs(v.total[i]));
    }
    return v;
  }

  static void apply(Field& f, double tau, const Potential& v) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double ph = -tau * v.total[i];
      f[i] *= cplx{std::cos(ph), std::sin(ph)};
    }
  }

  // Advances f in place given v = V[f]; returns V of the result.
  Potential step(Field& f, const Potential& v, double dt) const {
    apply(f, 0.5 * dt, v);
    kinetic_propagate(f, dt, ks);
    Potential next = potential_of(f);
    apply(f, 0.5 * dt, next);
    return next;
  }

  TermValues terms(const Field& f, const Potential& v) const {
    const double dv = f.grid().volume_element();
    double m = 0, h = 0, c = 0, hh = 0, l = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double a2 = std::norm(f[i]);
      m += a2;
      h += ks.harmonic_partial_grid[i] * a2;
      c += ks.coulomb_grid[i] * a2;
      hh += v.hartree[i] * a2;
      l += v.power[i] * a2;
    }
    return {m * dv, gradient_norm_sq(f), h * dv, c * dv, hh * dv, l * dv};
  }

  double virial(const Field& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += ks.radius_sq_grid[i] * std::norm(f[i]);
    return s * f.grid().volume_element();
  }
};

double abs_scale(const TermCoefficients& c, const TermValues& t) {
  return std::abs(c.mass * t.mass) + std::abs(c.kinetic * t.kinetic) +
         std::abs(c.harmonic_partial * t.harmonic_partial) + std::abs(c.coulomb * t.coulomb) +
         std::abs(c.hartree * t.hartree) + std::abs(c.lp * t.lp);
}

}  // namespace

void EvolveConfig::validate() const {
  if (!(t_end > 0.0)) throw InvalidArgument("t_end must be > 0");
  if (!(dt_min > 0.0) || !(dt_min <= dt_init)) throw InvalidArgument("need 0 < dt_min <= dt_init");
  if (!(blowup_gradient_factor > 1.0)) throw InvalidArgument("blowup_gradient_factor must be > 1");
  if (!(cfl_safety > 0.0)) throw InvalidArgument("cfl_safety must be > 0");
  if (!(energy_jump_tol > 0.0)) throw InvalidArgument("energy_jump_tol must be > 0");
  if (monitor_stride < 1) throw InvalidArgument("monitor_stride must be >= 1");
  if (snapshot_stride < 0) throw InvalidArgument("snapshot_stride must be >= 0");
  if (snapshot_stride > 0 && snapshot_prefix.empty())
    throw InvalidArgument("snapshot_stride needs a snapshot_prefix");
}

std::string EvolutionTrace::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "t,mass,energy_b,virial_j,q_b,grad_norm,x_norm\n";
  for (std::size_t i = 0; i < times.size(); ++i)
    os << times[i] << ',' << mass[i] << ',' << energy_b[i] << ',' << virial_J[i] << ',' << q_b[i] << ','
       << grad_norm[i] << ',' << x_norm[i] << '\n';
  return os.str();
}

void potential_substep(Field& psi, double tau, const PhysicsParams& pp, const KernelSet& kernels) {
  pp.validate();
  require_same_grid(psi.grid(), kernels.grid);
  const Stepper st{pp, kernels};
  Stepper::apply(psi, tau, st.potential_of(psi));
}

Field strang_step(const Field& psi, double dt, const PhysicsParams& pp, const KernelSet& kernels) {
  if (!(dt > 0.0)) throw InvalidArgument("strang_step needs dt > 0");
  pp.validate();
  require_same_grid(psi.grid(), kernels.grid);
  const Stepper st{pp, kernels};
  Field out = psi;
  st.step(out, st.potential_of(out), dt);
  return out;
}

Evolution evolve(const Field& psi0, const PhysicsParams& pp, const EvolveConfig& cfg, const KernelSet& kernels,
                 const EvolveObserver& observer) {
  cfg.validate();
  pp.validate();
  require_same_grid(psi0.grid(), kernels.grid);
  const Stepper st{pp, kernels};
  const TermCoefficients e_b = coeffs::E_b(pp), q_b = coeffs::Q_b(pp);

  Evolution ev{psi0, {}};
  EvolutionTrace& tr = ev.trace;
  Field& psi = ev.final;
  Potential vh = st.potential_of(psi);
  TermValues terms = st.terms(psi, vh);
  double energy = e_b.apply(terms);

  auto record = [&](double t) {
    tr.times.push_back(t);
    tr.mass.push_back(terms.mass);
    tr.energy_b.push_back(energy);
    tr.virial_J.push_back(st.virial(psi));
    tr.q_b.push_back(q_b.apply(terms));
    tr.grad_norm.push_back(std::sqrt(terms.kinetic));
    tr.x_norm.push_back(std::sqrt(terms.kinetic + terms.mass + terms.harmonic_partial));
    if (observer) observer(t, psi, terms);
  };
  record(0.0);
  const double grad0 = tr.grad_norm.front();

  double t = 0.0, dt = cfg.dt_init;
  const double t_eps = 1e-12 * cfg.t_end;
  while (t < cfg.t_end - t_eps) {
    const double h = std::min(dt, cfg.t_end - t);
    if (h * vh.max_abs > cfg.cfl_safety * std::numbers::pi) {
      dt *= 0.5;
      if (dt < cfg.dt_min) {
        tr.status = "dt_underflow";
        break;
      }
      continue;
    }
    Field next = psi;
    Potential vnext = st.step(next, vh, h);
    const TermValues nt = st.terms(next, vnext);
    const double ne = e_b.apply(nt);
    const double jump = std::abs(ne - energy) / std::max(abs_scale(e_b, terms), 1e-300);
    if (!(jump <= cfg.energy_jump_tol) || !next.all_finite()) {
      dt *= 0.5;
      if (dt < cfg.dt_min) {
        tr.status = "dt_underflow";
        break;
      }
      continue;
    }
    psi = std::move(next);
    vh = std::move(vnext);
    terms = nt;
    energy = ne;
    // the clipped final step lands exactly on t_end
    t = h < dt ? cfg.t_end : t + h;
    ++tr.steps;

    if (cfg.snapshot_stride > 0 && tr.steps % cfg.snapshot_stride == 0) {
      char suffix[32];
      std::snprintf(suffix, sizeof suffix, "_%08d.bin", tr.steps);
      write_snapshot(cfg.snapshot_prefix + suffix, psi);
    }
    const bool blown = std::sqrt(terms.kinetic) >= cfg.blowup_gradient_factor * grad0;
    if (blown || tr.steps % cfg.monitor_stride == 0 || t >= cfg.t_end - t_eps) record(t);
    if (blown) {
      tr.status = "blowup_detected";
      break;
    }
  }
  if (tr.times.back() < t) record(t);
  tr.final_dt = dt;
  return ev;
}

double virial_check(const EvolutionTrace& trace) {
  const auto& ts = trace.times;
  if (ts.size() < 5) throw InvalidArgument("virial_check needs at least 5 samples");
  const double step = ts[1] - ts[0];
  std::size_t n = 2;
  while (n < ts.size() && std::abs((ts[n] - ts[n - 1]) - step) <= 1e-9 * step) ++n;
  if (n < 5) throw InvalidArgument("virial_check needs at least 5 uniform samples");
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double jpp = (trace.virial_J[i + 1] - 2 * trace.virial_J[i] + trace.virial_J[i - 1]) / (step * step);
    const double rhs = 8.0 * trace.q_b[i];
    worst = std::max(worst, std::abs(jpp - rhs) / (1.0 + std::abs(rhs)));
  }
  return worst;
}

}  // namespace xfel
