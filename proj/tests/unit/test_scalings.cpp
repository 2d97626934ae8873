#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "xfel/error.hpp"
#include "xfel/scalings.hpp"

using namespace xfel;

namespace {

PhysicsParams focusing(double p, double l1 = 0.0, double l2 = 0.0, double l3 = 1.0) {
  PhysicsParams pp;
  pp.lambda1 = l1;
  pp.lambda2 = l2;
  pp.lambda3 = l3;
  pp.p = p;
  pp.omega = 1.0;
  return pp;
}

// Independent scalar oracle: bisection on a fixed bracket in plain lambda.
template <class F>
double bisect(F f, double a, double b) {
  double fa = f(a);
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b), fm = f(m);
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("rescale identity and argument checks") {
  GridSpec g = GridSpec::make(32, 6.0);
  std::mt19937_64 rng(1);
  Field u = oracle::random_smooth_field(g, rng);
  for (auto kind : {ScalingKind::mass_preserving(), ScalingKind::cubed(), ScalingKind::amplitude(),
                    ScalingKind::p_scaling(2.0), ScalingKind::p2_scaling(1.5)})
    CHECK(max_abs_diff(rescale(u, kind, 1.0), u) < 1e-12);
  CHECK_THROWS_AS(rescale(u, ScalingKind::cubed(), 0.0), InvalidArgument);
  CHECK_THROWS_AS(rescale(u, ScalingKind::cubed(), -1.0), InvalidArgument);
  // a wide field cannot be stretched, a coarse one cannot be compressed
  Field wide = oracle::gaussian(g, 2.5);
  CHECK_THROWS_AS(rescale(wide, ScalingKind::mass_preserving(), 0.5), ResolutionError);
  Field narrow = oracle::gaussian(g, 0.5);
  CHECK_THROWS_AS(rescale(narrow, ScalingKind::mass_preserving(), 4.0), ResolutionError);
}

TEST_CASE("rescale on the Gaussian") {
  GridSpec g = GridSpec::make(64, 8.0);
  Field gauss = oracle::gaussian(g);
  const double m0 = gauss.mass(), k0 = gradient_norm_sq(gauss);
  Field mp = rescale(gauss, ScalingKind::mass_preserving(), 1.5);
  CHECK(mp.mass() == doctest::Approx(m0).epsilon(1e-6));
  CHECK(gradient_norm_sq(mp) == doctest::Approx(2.25 * k0).epsilon(1e-4));
  Field cu = rescale(gauss, ScalingKind::cubed(), 1.2);
  CHECK(cu.mass() == doctest::Approx(1.728 * m0).epsilon(1e-4));
  // pointwise against the analytic scaled Gaussian
  Field exact = Field::from_function(g, [](double x, double y, double z) {
    return cplx{std::pow(1.5, 1.5) * std::exp(-2.25 * (x * x + y * y + z * z) / 2), 0.0};
  });
  CHECK(max_abs_diff(mp, exact) < 1e-8);
}

TEST_CASE("integrals follow the scaling exponents") {
  GridSpec g = GridSpec::make(64, 8.0);
  KernelSet ks = make_kernels(g);
  std::mt19937_64 rng(77);
  Field v = oracle::random_smooth_field(g, rng, 2, true, false, 0.6);
  const double p = 2.5;
  const TermValues t0 = compute_terms(v, p, ks);
  for (auto kind : {ScalingKind::mass_preserving(), ScalingKind::cubed(), ScalingKind::p_scaling(p),
                    ScalingKind::p2_scaling(p)})
    for (double lambda : {0.8, 1.25}) {
      CAPTURE(kind.name());
      CAPTURE(lambda);
      const TermValues actual = compute_terms(rescale(v, kind, lambda), p, ks);
      const TermValues predicted = scaled_terms(t0, kind, lambda, p);
      CHECK(actual.mass == doctest::Approx(predicted.mass).epsilon(5e-3));
      CHECK(actual.kinetic == doctest::Approx(predicted.kinetic).epsilon(5e-3));
      CHECK(actual.harmonic_partial == doctest::Approx(predicted.harmonic_partial).epsilon(5e-3));
      CHECK(actual.coulomb == doctest::Approx(predicted.coulomb).epsilon(5e-3));
      CHECK(actual.hartree == doctest::Approx(predicted.hartree).epsilon(5e-3));
      CHECK(actual.lp == doctest::Approx(predicted.lp).epsilon(5e-3));
    }
  // exponents written out for the cubed family
  const TermValues e = ScalingKind::cubed().term_exponents(p);
  CHECK(e.kinetic == 5.0);
  CHECK(e.mass == 3.0);
  CHECK(e.harmonic_partial == 1.0);
  CHECK(e.coulomb == 4.0);
  CHECK(e.hartree == 7.0);
  CHECK(e.lp == 3 * p + 3);
  const TermValues em = ScalingKind::mass_preserving().term_exponents(p);
  CHECK(em.mass == 0.0);
  CHECK(em.lp == 1.5 * p);
  CHECK(ScalingKind::p2_scaling(p).term_exponents(p).lp == doctest::Approx(0.0));
}

TEST_CASE("Pohozaev root for the Gaussian") {
  TermValues t{oracle::gauss_mass(), oracle::gauss_kinetic(), oracle::gauss_harmonic_partial(),
               oracle::gauss_coulomb(), oracle::gauss_hartree(), oracle::gauss_l4()};
  PhysicsParams pp = focusing(2.0);
  const double lstar = pohozaev_lambda(t, pp);
  CHECK(lstar == doctest::Approx(4 * std::sqrt(2.0)).epsilon(1e-6));
  const double A = t.kinetic, B = t.lp;
  const double scalar = bisect([&](double l) { return l * l * A - l * l * l * 0.75 * B; }, 1.0, 100.0);
  CHECK(lstar == doctest::Approx(scalar).epsilon(1e-10));
  const double q_at = along_family(coeffs::Q(pp), t, ScalingKind::mass_preserving(), lstar, pp.p);
  CHECK(std::abs(q_at) < 1e-8 * A * lstar * lstar);
}

TEST_CASE("project_pohozaev on a grid field") {
  GridSpec g = GridSpec::make(64, 8.0);
  KernelSet ks = make_kernels(g);
  Field gauss = oracle::gaussian(g);
  // choose lambda3 so that the projection lands near 1.3 with Hartree and Coulomb present
  PhysicsParams pp = focusing(2.0, 0.2, 0.1, 1.0);
  const TermValues t = compute_terms(gauss, pp.p, ks);
  const double target = 1.3;
  pp.lambda3 = (target * t.kinetic + 0.1 * t.coulomb + 0.025 * t.hartree) / (0.75 * std::pow(target, 2) * t.lp);
  Projection pr = project_pohozaev(gauss, pp, ks);
  CHECK(pr.lambda == doctest::Approx(target).epsilon(1e-9));
  FunctionalReport r = compute_report(pr.projected, pp, ks);
  // the discrete Coulomb term is scale-covariant only up to its O(h^2) regularization
  CHECK(std::abs(r.Q) < 1e-3 * r.kinetic);
  CHECK(r.mass == doctest::Approx(t.mass).epsilon(1e-8));

  // repeated projection reaches a discrete fixed point, where the root is 1
  Field u = pr.projected;
  for (int i = 0; i < 4; ++i) u = project_pohozaev(u, pp, ks).projected;
  CHECK(std::abs(compute_report(u, pp, ks).Q) < 1e-10 * r.kinetic);
  CHECK(project_pohozaev(u, pp, ks).lambda == doctest::Approx(1.0).epsilon(1e-8));

  PhysicsParams local = focusing(2.0, 0.0, 0.0, pp.lambda3);
  Projection pl = project_pohozaev(gauss, local, ks);
  CHECK(std::abs(compute_report(pl.projected, local, ks).Q) < 1e-6 * compute_report(pl.projected, local, ks).kinetic);

  // Q < 0 gives lambda in (0, 1]
  Field big = rescale(gauss, ScalingKind::mass_preserving(), 1.6);
  REQUIRE(compute_report(big, pp, ks).Q < 0);
  const double l = project_pohozaev(big, pp, ks).lambda;
  CHECK(l > 0.0);
  CHECK(l <= 1.0);

  CHECK_THROWS_AS(project_pohozaev(Field(g), pp, ks), InvalidArgument);
  // critical power with too little nonlinearity has no maximum
  PhysicsParams crit = focusing(4.0 / 3.0, 0.0, 0.0, 0.1);
  CHECK_THROWS_AS(project_pohozaev(gauss, crit, ks), NoMaximum);
}

TEST_CASE("unimodality and concavity along the mass-preserving family") {
  GridSpec g = GridSpec::make(16, 6.0);
  KernelSet ks = make_kernels(g);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> coef(0.0, 1.0);
  const ScalingKind kind = ScalingKind::mass_preserving();
  for (double p : {1.5, 2.0, 3.0})
    for (int trial = 0; trial < 10; ++trial) {
      PhysicsParams pp = focusing(p, coef(rng), coef(rng), 0.5 + coef(rng));
      Field v = oracle::random_smooth_field(g, rng);
      // amplitude chosen so the crossing sits inside the sampled window
      const TermValues t1 = compute_terms(v, p, ks);
      v *= std::pow((1.0 + 2.0 * coef(rng)) * t1.kinetic / (pp.lambda3 * t1.lp), 1.0 / p);
      const TermValues t = compute_terms(v, p, ks);
      const double lu = pohozaev_lambda(t, pp);
      std::vector<double> lam(200), s(200);
      int sign_changes = 0;
      double prev_q = 0.0;
      for (int i = 0; i < 200; ++i) {
        lam[i] = std::pow(10.0, -2.0 + 4.0 * i / 199.0);
        s[i] = along_family(coeffs::S_omega(pp), t, kind, lam[i], p);
        const double q = along_family(coeffs::Q(pp), t, kind, lam[i], p);
        if (i > 0 && (q < 0) != (prev_q < 0)) ++sign_changes;
        prev_q = q;
      }
      CHECK(sign_changes == 1);
      bool monotone = true;
      for (int i = 1; i < 200; ++i) {
        if (lam[i] <= lu) monotone = monotone && s[i] > s[i - 1];
        if (lam[i - 1] >= lu) monotone = monotone && s[i] < s[i - 1];
      }
      CHECK(monotone);
      // concavity beyond lambda_u on a uniform grid in lambda
      const double span = 50.0 * lu, dl = span / 400.0;
      double worst = -1e300;
      for (int i = 1; i < 399; ++i) {
        const double l = lu + i * dl;
        const double d2 = along_family(coeffs::S_omega(pp), t, kind, l + dl, p) -
                          2 * along_family(coeffs::S_omega(pp), t, kind, l, p) +
                          along_family(coeffs::S_omega(pp), t, kind, l - dl, p);
        worst = std::max(worst, d2);
      }
      CHECK(worst <= 1e-8);
    }
}

TEST_CASE("cubed family has a single maximum") {
  GridSpec g = GridSpec::make(16, 6.0);
  KernelSet ks = make_kernels(g);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coef(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    PhysicsParams pp = focusing(2.0, coef(rng), coef(rng), 0.5 + coef(rng));
    pp.b = coef(rng);
    pp.omega = 0.2 + coef(rng);
    const TermValues t = compute_terms(oracle::random_smooth_field(g, rng), pp.p, ks);
    int changes = 0;
    double prev = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double l = std::pow(10.0, -2.0 + 4.0 * i / 199.0);
      const double d = along_family_derivative(coeffs::S_b_omega(pp), t, ScalingKind::cubed(), l, pp.p);
      if (i > 0 && (d < 0) != (prev < 0)) ++changes;
      prev = d;
    }
    CHECK(changes == 1);
  }
}

TEST_CASE("project_K") {
  GridSpec g = GridSpec::make(32, 6.0);
  KernelSet ks = make_kernels(g);
  Field gauss = oracle::gaussian(g);
  PhysicsParams pp = focusing(2.0);
  pp.b = 1.0;
  pp.omega = 1.0;
  const TermValues t = compute_terms(gauss, pp.p, ks);
  const double P2 = 2.5 * t.kinetic + 1.5 * t.mass + 0.5 * t.harmonic_partial;
  Projection pr = project_K(gauss, pp, ks);
  CHECK(pr.lambda == doctest::Approx(std::sqrt(P2 / (2.25 * t.lp))).epsilon(1e-10));
  FunctionalReport r = compute_report(pr.projected, pp, ks);
  CHECK(std::abs(*r.K_b_omega) < 1e-8 * (2.5 * r.kinetic + 1.5 * r.mass + 0.5 * r.harmonic_partial));
  CHECK(project_K(pr.projected, pp, ks).lambda == doctest::Approx(1.0).epsilon(1e-8));

  // K < 0 gives a root inside (0, 1)
  pp.lambda2 = 0.3;
  pp.p = 3.0;
  const TermValues t3 = compute_terms(gauss, pp.p, ks);
  Field loud = gauss;
  loud *= 6.0;
  REQUIRE(*compute_report(loud, pp, ks).K_b_omega < 0);
  const double l0 = project_K(loud, pp, ks).lambda;
  CHECK(l0 > 0.0);
  CHECK(l0 < 1.0);
  auto k_of = [&](double l) { return along_family(coeffs::K_b_omega(pp), t3, ScalingKind::amplitude(), l, pp.p); };
  CHECK(6 * l0 == doctest::Approx(bisect(k_of, 1e-3, 6 * l0 * 1.5)).epsilon(1e-9));

  // two crossings: the smaller one is returned
  PhysicsParams two = focusing(1.5, 0.0, 0.3, 20.0);
  two.b = 1.0;
  two.omega = 0.05;
  const TermValues t2 = compute_terms(gauss, two.p, ks);
  auto k2 = [&](double l) { return along_family(coeffs::K_b_omega(two), t2, ScalingKind::amplitude(), l, two.p) / (l * l); };
  const double first = k_lambda(t2, two);
  bool positive_before = true;
  for (int i = 1; i < 1000; ++i) positive_before = positive_before && k2(first * i / 1000.0) > 0;
  CHECK(positive_before);
  int crossings = 0;
  for (int i = 1; i < 4000; ++i)
    crossings += (k2(std::pow(10.0, -3 + 7e-3 * i)) < 0) != (k2(std::pow(10.0, -3 + 7e-3 * (i - 1))) < 0);
  CHECK(crossings == 2);

  // strong Hartree repulsion with p < 2 keeps K positive
  PhysicsParams none = focusing(1.5, 0.0, 50.0, 0.01);
  none.b = 1.0;
  CHECK_THROWS_AS(project_K(gauss, none, ks), NoCrossing);
  PhysicsParams coul = pp;
  coul.lambda1 = 0.5;
  CHECK_THROWS_AS(project_K(gauss, coul, ks), InvalidArgument);
}

TEST_CASE("smooth cutoff") {
  GridSpec g = GridSpec::make(32, 8.0);
  Field gauss = oracle::gaussian(g);
  Field same = apply_cutoff(gauss, g.half_length * std::sqrt(3.0));
  bool identical = true;
  for (std::size_t i = 0; i < gauss.size(); ++i) identical = identical && same[i] == gauss[i];
  CHECK(identical);
  Field cut = apply_cutoff(gauss, 4.0);
  CHECK((gauss.mass() - cut.mass()) / gauss.mass() < 1e-4);
  CHECK(cut.mass() <= gauss.mass());
  std::mt19937_64 rng(8);
  Field r = oracle::random_field(g, rng);
  const double M = 2.3;
  Field rc = apply_cutoff(r, M);
  bool zero_outside = true;
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j)
      for (int k = 0; k < 32; ++k) {
        const double rr = std::sqrt(std::pow(g.coord(i), 2) + std::pow(g.coord(j), 2) + std::pow(g.coord(k), 2));
        if (rr >= 2 * M) zero_outside = zero_outside && rc.at(i, j, k) == cplx{0.0, 0.0};
      }
  CHECK(zero_outside);
  // C^2 join: value, slope and curvature match at both ends
  const double e = 1e-4;
  CHECK(cutoff_profile(1 + e) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(cutoff_profile(2 - e) == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  CHECK(std::abs((cutoff_profile(1 + 2 * e) - 2 * cutoff_profile(1 + e) + 1.0) / (e * e)) < 1e-2);
  CHECK(std::abs((cutoff_profile(2 - 2 * e) - 2 * cutoff_profile(2 - e)) / (e * e)) < 1e-2);
  CHECK_THROWS_AS(apply_cutoff(gauss, 0.0), InvalidArgument);
}
