#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "longjump/analysis/fit.hpp"
#include "longjump/analysis/holder.hpp"
#include "longjump/analysis/spectral.hpp"
#include "longjump/geometry/geometry.hpp"
#include "longjump/kernel/dense1d.hpp"
#include "longjump/kernel/kernel.hpp"
#include "longjump/kernel/stats.hpp"
#include "longjump/measure/measure.hpp"

#include "oracles.hpp"

using namespace longjump;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::Message;

namespace {

WalkSpec line_spec(double alpha = 1.0) {
  Group G = Group::zk(1);
  WalkSpec spec(G);
  spec.components.push_back(
      WalkComponent(Subgroup(G, "full"), JumpProfile::power(alpha), 1.0));
  spec.validate();
  return spec;
}

WalkSpec lazy_line_spec() {
  Group G = Group::zk(1);
  WalkSpec spec(G);
  spec.p0 = 1.0;
  spec.mu0 = {{make_element({-1}), 0.25},
              {make_element({0}), 0.5},
              {make_element({1}), 0.25}};
  spec.validate();
  return spec;
}

// Reference power iteration on (I + P)/2 for a dense symmetric kernel
// matrix; returns lambda = 2 (1 - rho).
double reference_dirichlet_lambda(const std::vector<double>& M,
                                  std::size_t L) {
  std::vector<double> v(L, 1.0 / std::sqrt(static_cast<double>(L)));
  std::vector<double> u(L, 0.0);
  double rho = 0.0;
  for (int it = 0; it < 400000; ++it) {
    for (std::size_t i = 0; i < L; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < L; ++j) s += M[i * L + j] * v[j];
      u[i] = 0.5 * (v[i] + s);
    }
    rho = 0.0;
    for (std::size_t i = 0; i < L; ++i) rho += v[i] * u[i];
    double res2 = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
      double d = u[i] - rho * v[i];
      res2 += d * d;
    }
    if (std::sqrt(res2) <= 1e-12) break;
    double norm = 0.0;
    for (double w : u) norm += w * w;
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < L; ++i) v[i] = u[i] / norm;
  }
  return 2.0 * (1.0 - rho);
}

}  // namespace

// ---------------------------------------------------------------------------
// least-squares fits
// ---------------------------------------------------------------------------

TEST_CASE("linear fit recovers an exact line") {
  std::vector<double> x{1.0, 2.0, 4.0, 9.0};
  std::vector<double> y;
  for (double xi : x) y.push_back(3.0 * xi - 2.0);
  FitResult r = fit_linear(x, y);
  CHECK(r.slope == Catch::Approx(3.0).epsilon(1e-13));
  CHECK(r.intercept == Catch::Approx(-2.0).margin(1e-12));
  CHECK(r.r2 == Catch::Approx(1.0).margin(1e-12));
  CHECK(r.residualMax < 1e-12);
  CHECK(r.pointCount == 4);
}

TEST_CASE("linear fit rejects degenerate inputs") {
  REQUIRE_THROWS_MATCHES(fit_linear({1.0, 2.0}, {1.0, 2.0, 3.0}),
                         std::invalid_argument,
                         Message("fit inputs differ in length"));
  REQUIRE_THROWS_MATCHES(fit_linear({1.0, 2.0}, {1.0, 2.0}),
                         std::invalid_argument,
                         Message("need at least three points"));
  REQUIRE_THROWS_MATCHES(fit_linear({2.0, 2.0, 2.0}, {1.0, 2.0, 3.0}),
                         std::invalid_argument,
                         Message("x values are all equal"));
}

TEST_CASE("log-log fit reads off a power law") {
  std::vector<double> x{1.0, 2.0, 5.0, 16.0, 40.0};
  std::vector<double> y;
  for (double xi : x) y.push_back(5.0 * std::pow(xi, 1.7));
  FitResult r = fit_loglog(x, y);
  CHECK(r.slope == Catch::Approx(1.7).epsilon(1e-12));
  CHECK(r.intercept == Catch::Approx(std::log(5.0)).epsilon(1e-12));

  REQUIRE_THROWS_MATCHES(fit_loglog({1.0, 0.0, 2.0}, {1.0, 1.0, 1.0}),
                         std::invalid_argument,
                         Message("log-log fit needs positive data"));
  REQUIRE_THROWS_MATCHES(fit_loglog({1.0, 2.0, 3.0}, {1.0, -1.0, 1.0}),
                         std::invalid_argument,
                         Message("log-log fit needs positive data"));
}

// ---------------------------------------------------------------------------
// Dirichlet form and eigenvalues
// ---------------------------------------------------------------------------

TEST_CASE("energy of small indicator functions by hand") {
  Measure m(lazy_line_spec());
  const Group& G = m.spec().group;

  // indicator of {0}: all energy is the escape mass 1 - mu(e) = 1/2
  std::vector<std::pair<Element, double>> f1{{make_element({0}), 1.0}};
  CHECK(dirichlet_form(G, m, f1) == Catch::Approx(0.5).margin(1e-15));

  // flat on {0,1}: no interior differences, escape 1/4 from either end
  std::vector<std::pair<Element, double>> f2{{make_element({0}), 1.0},
                                             {make_element({1}), 1.0}};
  CHECK(dirichlet_form(G, m, f2) == Catch::Approx(0.5).margin(1e-15));

  // values 2 and -1: interior pair contributes 9/4, escapes 4/4 and 1/4
  std::vector<std::pair<Element, double>> f3{{make_element({0}), 2.0},
                                             {make_element({1}), -1.0}};
  CHECK(dirichlet_form(G, m, f3) == Catch::Approx(3.5).margin(1e-14));
}

TEST_CASE("one-point ball eigenvalue is the leave-probability") {
  WalkSpec spec = lazy_line_spec();
  Measure m(spec);
  AdaptedGeometry geom = build_adapted_geometry(spec);
  DirichletEigenvalue ev =
      dirichlet_eigenvalue(spec.group, m, geom, 0.0);
  CHECK(ev.ballSize == 1);
  CHECK(ev.converged);
  CHECK(ev.lambda == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("three-point ball eigenvalue matches the closed form") {
  WalkSpec spec = line_spec(1.0);
  Measure m(spec);
  AdaptedGeometry geom = build_adapted_geometry(spec);
  const Group& G = spec.group;

  double r1 = geom.closed_norm(make_element({1}));
  double r2 = geom.closed_norm(make_element({2}));
  REQUIRE(r1 < r2);
  DirichletEigenvalue ev =
      dirichlet_eigenvalue(G, m, geom, 0.5 * (r1 + r2), 300000, 1e-10);
  REQUIRE(ev.ballSize == 3);
  CHECK(ev.converged);

  // restrict the persymmetric 3x3 kernel matrix to its symmetric subspace:
  // top eigenvalue of [[a+c, b], [2b, a]]
  double a = m.pmf(make_element({0}));
  double b = m.pmf(make_element({1}));
  double c = m.pmf(make_element({2}));
  double T = 2.0 * a + c;
  double D = (a + c) * a - 2.0 * b * b;
  double rho = 0.5 * (T + std::sqrt(T * T - 4.0 * D));
  CHECK(ev.lambda == Catch::Approx(1.0 - rho).margin(1e-8));
}

TEST_CASE("fast line path agrees with a dense reference iteration") {
  WalkSpec spec = line_spec(0.5);
  Measure m(spec);
  AdaptedGeometry geom = build_adapted_geometry(spec);
  const Group& G = spec.group;

  // pick a radius whose line ball has more than 256 points so the
  // convolution-based multiply is exercised
  double rLo = geom.closed_norm(make_element({129}));
  double rHi = geom.closed_norm(make_element({130}));
  DirichletEigenvalue ev =
      dirichlet_eigenvalue(G, m, geom, 0.5 * (rLo + rHi), 300000, 1e-11);
  REQUIRE(ev.ballSize == 259);
  REQUIRE(ev.converged);

  std::size_t L = 259;
  std::vector<double> M(L * L, 0.0);
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = 0; j < L; ++j) {
      i64 d = static_cast<i64>(j) - static_cast<i64>(i);
      M[i * L + j] = m.pmf(make_element({d}));
    }
  double ref = reference_dirichlet_lambda(M, L);
  CHECK(ev.lambda == Catch::Approx(ref).margin(1e-8));
}

TEST_CASE("eigenvalue solver rejects bad balls") {
  WalkSpec spec = line_spec(1.0);
  Measure m(spec);
  AdaptedGeometry geom = build_adapted_geometry(spec);
  REQUIRE_THROWS_AS(dirichlet_eigenvalue(spec.group, m, geom, -1.0),
                    std::logic_error);

  Group G2 = Group::zk(2);
  WalkSpec spec2(G2);
  spec2.components.push_back(
      WalkComponent(Subgroup(G2, "full"), JumpProfile::power(1.0), 1.0));
  spec2.validate();
  Measure m2(spec2);
  AdaptedGeometry geom2 = build_adapted_geometry(spec2);
  REQUIRE_THROWS_MATCHES(
      dirichlet_eigenvalue(G2, m2, geom2, 40.0), std::invalid_argument,
      Message("ball too large for the dense eigenvalue solver"));
}

TEST_CASE("tent quotient dominates the bottom eigenvalue") {
  WalkSpec spec = line_spec(1.0);
  Measure m(spec);
  AdaptedGeometry geom = build_adapted_geometry(spec);
  const Group& G = spec.group;

  // the coarse scale has exponent wUpper = 2, so radius 15 unpacks to the
  // raw ball of radius 3, which holds seven lattice points
  double R = 15.0;
  RayleighQuotient rq = rayleigh_zeta(G, m, geom, R);
  REQUIRE(rq.support >= 5);
  CHECK(rq.radius == R);

  double raw = geom.norm1_radius_to_raw(R);
  DirichletEigenvalue ev = dirichlet_eigenvalue(G, m, geom, raw);
  REQUIRE(ev.converged);
  CHECK(rq.quotient >= ev.lambda - 1e-9);

  REQUIRE_THROWS_MATCHES(rayleigh_zeta(G, m, geom, 0.0),
                         std::invalid_argument,
                         Message("radius must be positive"));
}

TEST_CASE("random trial functions give a reproducible lower constant") {
  WalkSpec spec = line_spec(1.0);
  Measure m(spec);
  AdaptedGeometry geom = build_adapted_geometry(spec);
  const Group& G = spec.group;

  PoincareEstimate a = pseudo_poincare_constant(G, m, geom, 2.0, 20, 77);
  CHECK(a.constant > 0.0);
  CHECK(a.trials == 20);
  CHECK(a.ballSize >= 3);

  // the first twenty keyed trials are a prefix of the first forty
  PoincareEstimate b = pseudo_poincare_constant(G, m, geom, 2.0, 40, 77);
  CHECK(b.constant >= a.constant);

  PoincareEstimate c = pseudo_poincare_constant(G, m, geom, 2.0, 20, 77);
  CHECK(c.constant == a.constant);

  REQUIRE_THROWS_MATCHES(pseudo_poincare_constant(G, m, geom, 2.0, 0, 1),
                         std::invalid_argument,
                         Message("need at least one trial"));
}

// ---------------------------------------------------------------------------
// kernel shift statistics
// ---------------------------------------------------------------------------

TEST_CASE("sup shift difference of the two-step lazy kernel by hand") {
  Measure m(lazy_line_spec());
  const Group& G = m.spec().group;
  DenseEngine eng(m, 4);
  DenseKernel k = eng.power(2);
  // masses {1/16, 1/4, 3/8, 1/4, 1/16}; the largest jump under a shift by
  // one sits between offsets 1 and 2: |1/16 - 1/4| = 3/16
  CHECK(sup_shift_difference(k, G, make_element({1})) ==
        Catch::Approx(0.1875).margin(1e-9));
  CHECK(sup_shift_difference(k, G, G.identity()) ==
        Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("continuity fit has a positive exponent on a smooth kernel") {
  WalkSpec spec = lazy_line_spec();
  Measure m(spec);
  const Group& G = spec.group;
  WalkSpec gspec = line_spec(1.0);
  AdaptedGeometry geom = build_adapted_geometry(gspec);

  DenseEngine eng(m, 256);
  DenseKernel k = eng.power(64);
  std::vector<Element> ys{make_element({1}), make_element({2}),
                          make_element({4}), make_element({8}),
                          make_element({16})};
  FitResult fit = holder_fit(k, G, geom, ys);
  CHECK(fit.slope > 0.0);
  CHECK(fit.slope < 2.5);
  CHECK(fit.pointCount == 5);
}

TEST_CASE("continuity fit rejects identity shifts and flat kernels") {
  WalkSpec gspec = line_spec(1.0);
  Measure m(gspec);
  const Group& G = gspec.group;
  AdaptedGeometry geom = build_adapted_geometry(gspec);

  DenseEngine eng(m, 32);
  DenseKernel k = eng.power(4);
  REQUIRE_THROWS_MATCHES(
      holder_fit(k, G, geom, {G.identity()}), std::invalid_argument,
      Message("translation must differ from the identity"));

  DenseKernel flat;
  flat.W = 4;
  flat.steps = 4;
  flat.a0.assign(9, 0.0);
  REQUIRE_THROWS_MATCHES(
      holder_fit(flat, G, geom, {make_element({1})}), std::runtime_error,
      Message("kernel shows no variation under translation"));
}

TEST_CASE("regularity ratio is finite, positive, and validated") {
  WalkSpec spec = line_spec(1.0);
  Measure m(spec);
  const Group& G = spec.group;
  AdaptedGeometry geom = build_adapted_geometry(spec);

  DenseEngine eng(m, 128);
  DenseKernel kn = eng.power(16);
  DenseKernel knm = eng.power(20);
  std::vector<Element> ys{make_element({1}), make_element({4})};
  double ratio = regularity_ratio(kn, knm, G, geom, ys);
  CHECK(ratio > 0.0);
  CHECK(ratio < 1e6);
  CHECK(regularity_ratio(kn, knm, G, geom, ys) == ratio);

  REQUIRE_THROWS_MATCHES(regularity_ratio(knm, kn, G, geom, ys),
                         std::invalid_argument,
                         Message("need knm.steps > kn.steps >= 1"));
  DenseKernel dead;
  dead.W = 128;
  dead.steps = 16;
  dead.a0.assign(257, 0.0);
  REQUIRE_THROWS_MATCHES(regularity_ratio(dead, knm, G, geom, ys),
                         std::runtime_error,
                         Message("kernel vanishes at the identity"));
}

// ---------------------------------------------------------------------------
// near-diagonal profiles
// ---------------------------------------------------------------------------

TEST_CASE("near-diagonal profile brackets the kernel over a central ball") {
  WalkSpec spec = line_spec(1.0);
  Measure m(spec);
  AdaptedGeometry geom = build_adapted_geometry(spec);

  DenseEngine eng(m, 2048);
  DenseKernel k = eng.power(16);
  NearDiagonalProfile prof = near_diagonal_profile(k, geom, 0.5);
  CHECK(prof.minValue > 0.0);
  CHECK(prof.maxValue >= prof.minValue);
  CHECK(prof.spread() >= 1.0);
  CHECK(prof.ballPoints >= 3);
  CHECK(prof.volumeAtN == geom.volume().eval(16.0));

  TruncationPolicy pol;
  pol.epsPerStep = 1e-7;
  SparseKernel s =
      kernel_power(spec.group, one_step_kernel(m, pol), 8, pol);
  NearDiagonalProfile sprof = near_diagonal_profile(s, geom, 0.5);
  CHECK(sprof.minValue > 0.0);
  CHECK(sprof.spread() >= 1.0);
  CHECK(sprof.volumeAtN == geom.volume().eval(8.0));
}

TEST_CASE("near-diagonal profile rejects unreliable inputs") {
  WalkSpec spec = line_spec(1.0);
  Measure m(spec);
  AdaptedGeometry geom = build_adapted_geometry(spec);

  DenseEngine eng(m, 16);
  DenseKernel k0 = eng.power(0);
  REQUIRE_THROWS_MATCHES(near_diagonal_profile(k0, geom, 0.5),
                         std::invalid_argument,
                         Message("need at least one step"));

  // a tiny window loses most of the mass, and the deficit test fires
  DenseEngine tiny(m, 2);
  DenseKernel kt = tiny.power(16);
  REQUIRE_THROWS_MATCHES(
      near_diagonal_profile(kt, geom, 0.5), std::runtime_error,
      MessageMatches(ContainsSubstring("window deficit too large")));

  // bounded lazy steps keep the deficit tiny, but the requested ball can
  // still poke past the window edge
  Measure lazy(lazy_line_spec());
  DenseEngine narrow(lazy, 10);
  DenseKernel kn = narrow.power(8);
  REQUIRE_THROWS_MATCHES(
      near_diagonal_profile(kn, geom, 2.0), std::runtime_error,
      MessageMatches(ContainsSubstring("window too small")));

  TruncationPolicy pol;
  pol.mode = TruncationPolicy::Mode::TopK;
  pol.maxSupport = 3;
  pol.epsPerStep = 1e-14;
  SparseKernel s =
      kernel_power(spec.group, one_step_kernel(m, pol), 16, pol);
  REQUIRE_THROWS_MATCHES(
      near_diagonal_profile(s, geom, 0.5), std::runtime_error,
      MessageMatches(ContainsSubstring("truncation deficit too large")));
}

// ---------------------------------------------------------------------------
// collision estimator
// ---------------------------------------------------------------------------

TEST_CASE("collision estimate on tiny cohorts by hand") {
  Element a = make_element({0});
  Element b = make_element({1});
  Element c = make_element({2});

  CollisionEstimate est = collision_return_estimate({a, a, b});
  CHECK(est.samples == 3);
  CHECK(est.collisions == 1);
  CHECK(est.pHat == Catch::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(est.stderrHat == Catch::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK_FALSE(est.degenerate);

  CollisionEstimate none = collision_return_estimate({a, b, c});
  CHECK(none.collisions == 0);
  CHECK(none.pHat == 0.0);
  CHECK(none.degenerate);
  CHECK(none.upperIfDegenerate == Catch::Approx(1.0));

  CollisionEstimate all = collision_return_estimate({a, a});
  CHECK(all.pHat == 1.0);
  CHECK(all.stderrHat == Catch::Approx(0.0).margin(1e-15));

  REQUIRE_THROWS_MATCHES(collision_return_estimate({a}),
                         std::invalid_argument,
                         Message("need at least two walkers"));
}
