#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>
#include <vector>

#include "longjump/measure/measure.hpp"
#include "longjump/measure/sampler.hpp"
#include "longjump/util/rng.hpp"

#include "oracles.hpp"

using namespace longjump;

namespace {

// p0 > 0 mixes in the default bounded base law; required when the component
// subgroup alone does not generate the group.
WalkSpec lattice_spec(const Group& G, const std::string& preset,
                      JumpProfile prof, i64 shellCap = i64{1} << 20,
                      double p0 = 0.0) {
  WalkSpec spec(G);
  spec.p0 = p0;
  spec.components.push_back(
      WalkComponent(Subgroup(G, preset), prof, 1.0 - p0));
  spec.shellCap = shellCap;
  spec.validate();
  return spec;
}

}  // namespace

// ---------------------------------------------------------------------------
// normalizing constants against zeta-function values
// ---------------------------------------------------------------------------

TEST_CASE("normalizing constant on the line matches 1 + 2(zeta(2)-1)") {
  Measure m(lattice_spec(Group::zk(1), "full", JumpProfile::power(1.0)));
  CHECK(m.comp_Z(0) == Catch::Approx(2.2898681336964528729).epsilon(1e-12));
}

TEST_CASE("normalizing constant on the plane matches 1 + 4(zeta(2)-zeta(3))") {
  Measure m(lattice_spec(Group::zk(2), "full", JumpProfile::power(1.0)));
  CHECK(m.comp_Z(0) == Catch::Approx(2.7715086547545286043).epsilon(1e-12));
}

TEST_CASE("heavy-tail normalizing constant matches 1 + 2(zeta(3/2)-1)") {
  Measure m(lattice_spec(Group::zk(1), "full", JumpProfile::power(0.5)));
  CHECK(m.comp_Z(0) == Catch::Approx(4.2247506973709766867).epsilon(1e-12));
}

// ---------------------------------------------------------------------------
// shell tables
// ---------------------------------------------------------------------------

TEST_CASE("shell masses and tail integral account for all the probability") {
  Measure m(lattice_spec(Group::zk(2), "full", JumpProfile::power(0.75),
                         i64{1} << 16));
  i64 M = m.shell_horizon(0);
  const auto& cdf = m.shell_cdf(0);
  REQUIRE(static_cast<i64>(cdf.size()) == M + 1);
  double prev = 0.0;
  for (double v : cdf) {
    REQUIRE(v >= prev);
    prev = v;
  }
  CHECK(cdf.back() <= 1.0 + 1e-12);
  // table + matched tail = total mass
  CHECK(m.cumulative_shell_mass(0, M) + m.tail_mass(0, M + 1) ==
        Catch::Approx(1.0).epsilon(1e-11));
  // the tail expression is continuous across the horizon
  CHECK(m.tail_mass(0, M + 1) ==
        Catch::Approx(1.0 - m.cumulative_shell_mass(0, M)).epsilon(1e-9));
  // inside the horizon the tail is exactly the cdf complement
  CHECK(m.tail_mass(0, 10) ==
        Catch::Approx(1.0 - m.cumulative_shell_mass(0, 9)).epsilon(1e-13));
  CHECK(m.tail_mass(0, 0) == 1.0);
}

TEST_CASE("shell count polynomials agree with exact lattice counts") {
  struct Case {
    Group G;
    const char* preset;
  };
  std::vector<Case> cases = {{Group::zk(1), "full"},
                             {Group::zk(2), "full"},
                             {Group::zk(3), "full"},
                             {Group::zk(4), "full"},
                             {Group::heisenberg3(), "s1s3"}};
  for (const auto& [G, preset] : cases) {
    Measure m(lattice_spec(G, preset, JumpProfile::power(1.0), 4096, 0.5));
    Subgroup sg(G, preset);
    for (i64 r = 0; r <= 60; ++r) {
      REQUIRE(m.shell_count_poly(0, r) ==
              Catch::Approx(static_cast<double>(sg.shell_count_exact(r))));
    }
  }
}

TEST_CASE("enumerated shells carry the right word length and count") {
  Measure m(lattice_spec(Group::zk(3), "full", JumpProfile::power(1.0), 4096));
  Subgroup full(Group::zk(3), "full");
  for (i64 r : {0, 1, 2, 5}) {
    auto els = m.shell_elements(0, r);
    REQUIRE(els.size() == static_cast<std::size_t>(m.shell_count_poly(0, r)));
    std::set<Element> uniq(els.begin(), els.end());
    REQUIRE(uniq.size() == els.size());
    for (const auto& h : els) REQUIRE(full.word_length(h) == r);
  }
  CHECK_THROWS_AS(m.shell_elements(0, 5, 10), std::overflow_error);
}

TEST_CASE("translation component shells on the dihedral group") {
  Group D = Group::dihedral_inf();
  WalkSpec spec(D);
  spec.p0 = 0.5;
  spec.components.push_back(
      WalkComponent(Subgroup(D, "z"), JumpProfile::power(1.0), 0.5));
  spec.shellCap = 2048;
  Measure m(spec);
  CHECK(m.shell_count_poly(0, 0) == 1.0);
  CHECK(m.shell_count_poly(0, 7) == 2.0);
  auto els = m.shell_elements(0, 3);
  REQUIRE(els.size() == 2);
}

// ---------------------------------------------------------------------------
// pmf structure
// ---------------------------------------------------------------------------

TEST_CASE("component pmf is symmetric and uniform within a shell") {
  Group H = Group::heisenberg3();
  Measure m(lattice_spec(H, "s1s3", JumpProfile::power(1.0), 4096, 0.5));
  Element g = make_element({3, 0, -2});
  CHECK(m.comp_pmf(0, g) == Catch::Approx(m.comp_pmf(0, H.inv(g))));
  // off-subgroup elements carry no mass
  CHECK(m.comp_pmf(0, make_element({0, 1, 0})) == 0.0);
  // same shell, same mass
  Element h = make_element({-5, 0, 0});
  Element h2 = make_element({0, 0, 5});
  Subgroup sg(H, "s1s3");
  REQUIRE(sg.word_length(h) == sg.word_length(h2));
  CHECK(m.comp_pmf(0, h) == Catch::Approx(m.comp_pmf(0, h2)));
}

TEST_CASE("mixture pmf combines the base law and the components") {
  Group Z2 = Group::zk(2);
  WalkSpec spec(Z2);
  spec.p0 = 0.5;
  spec.components.push_back(
      WalkComponent(Subgroup(Z2, "full"), JumpProfile::power(1.0), 0.5));
  spec.shellCap = 4096;
  spec.validate();
  Measure m(spec);
  // default mu0 is uniform on {e, +-e1, +-e2}
  CHECK(m.mu0_pmf(Z2.identity()) == Catch::Approx(0.2));
  CHECK(m.mu0_pmf(make_element({0, -1})) == Catch::Approx(0.2));
  CHECK(m.mu0_pmf(make_element({2, 0})) == 0.0);
  Element e1 = make_element({1, 0});
  CHECK(m.pmf(e1) ==
        Catch::Approx(0.5 * 0.2 + 0.5 * m.comp_pmf(0, e1)));
  // total mass over a large box is close to 1
  double total = 0.0;
  for (i64 x = -200; x <= 200; ++x)
    for (i64 y = -200; y <= 200; ++y) total += m.pmf(make_element({x, y}));
  CHECK(total == Catch::Approx(1.0).epsilon(2e-2));
  CHECK(total < 1.0 + 1e-12);
}

TEST_CASE("finite components default their identity mass to 1/|H|") {
  Group D = Group::dihedral_inf();
  WalkSpec spec(D);
  spec.p0 = 0.5;
  spec.components.push_back(
      WalkComponent(Subgroup(D, "u"), JumpProfile::power(1.0), 0.5));
  spec.shellCap = 2048;
  spec.validate();
  Measure m(spec);
  CHECK(m.e_mass(0) == Catch::Approx(0.5));
  CHECK(m.comp_pmf(0, D.identity()) == Catch::Approx(0.5));
  CHECK(m.comp_pmf(0, make_element({0, 1})) == Catch::Approx(0.5));

  WalkSpec spec2(D);
  spec2.p0 = 0.5;
  spec2.components.push_back(
      WalkComponent(Subgroup(D, "u"), JumpProfile::power(1.0), 0.5, 0.25));
  spec2.shellCap = 2048;
  Measure m2(spec2);
  CHECK(m2.comp_pmf(0, make_element({0, 1})) == Catch::Approx(0.75));
}

// ---------------------------------------------------------------------------
// guard rails
// ---------------------------------------------------------------------------

TEST_CASE("log-corrected tails insist on a deep shell table") {
  Group Z1 = Group::zk(1);
  WalkSpec spec(Z1);
  spec.components.push_back(WalkComponent(
      Subgroup(Z1, "full"), JumpProfile::power_log(1.0, 0.5), 1.0));
  spec.shellCap = i64{1} << 16;
  CHECK_THROWS_WITH(Measure(spec),
                    Catch::Matchers::ContainsSubstring("shellCap too small"));
  spec.shellCap = i64{1} << 18;
  CHECK_NOTHROW(Measure(spec));
}

TEST_CASE("a horizon too shallow for the tail matching is rejected") {
  CHECK_THROWS_WITH(
      Measure(lattice_spec(Group::zk(1), "full", JumpProfile::power(1.0), 64)),
      Catch::Matchers::ContainsSubstring("shellCap too small"));
}

// ---------------------------------------------------------------------------
// sampling
// ---------------------------------------------------------------------------

TEST_CASE("step sampling is reproducible from the key") {
  Measure m(lattice_spec(Group::zk(2), "full", JumpProfile::power(1.0), 1024));
  StepSampler sampler(m);
  Rng a(rng_key(42, 0, 0)), b(rng_key(42, 0, 0));
  for (int i = 0; i < 200; ++i) REQUIRE(sampler.sample(a) == sampler.sample(b));
  Rng c(rng_key(42, 0, 1));
  bool anyDiff = false;
  Rng a2(rng_key(42, 0, 0));
  for (int i = 0; i < 50; ++i)
    if (!(sampler.sample(a2) == sampler.sample(c))) anyDiff = true;
  CHECK(anyDiff);
}

TEST_CASE("sampled radii follow the shell law") {
  Measure m(lattice_spec(Group::zk(1), "full", JumpProfile::power(1.0), 1024));
  StepSampler sampler(m);
  Subgroup full(Group::zk(1), "full");
  Rng rng(rng_key(1234, 0, 0));
  const int N = 200000;
  std::vector<u64> counts(6, 0);  // radii 0..4 and >=5
  i64 beyondHorizon = 0;
  for (int i = 0; i < N; ++i) {
    Element g = sampler.sample(rng);
    i64 r = full.word_length(g);
    counts[static_cast<std::size_t>(std::min<i64>(r, 5))]++;
    if (r > m.shell_horizon(0)) ++beyondHorizon;
  }
  std::vector<double> expected;
  for (i64 r = 0; r < 5; ++r) expected.push_back(m.shell_mass(0, r));
  expected.push_back(m.tail_mass(0, 5));
  double chi2 = testoracle::chi2_statistic(counts, expected, N);
  CHECK(chi2 < testoracle::chi2_quantile_999(5));

  // the envelope branch beyond the table horizon does get exercised and
  // lands in the right proportion
  double pTail = m.tail_mass(0, m.shell_horizon(0) + 1);
  double sd = std::sqrt(pTail * (1.0 - pTail) * N);
  CHECK(beyondHorizon > 0);
  CHECK(std::fabs(static_cast<double>(beyondHorizon) - pTail * N) <=
        5.0 * sd + 3.0);
}

TEST_CASE("finite-component draws respect the identity mass") {
  Group D = Group::dihedral_inf();
  WalkSpec spec(D);
  spec.p0 = 0.5;
  spec.components.push_back(
      WalkComponent(Subgroup(D, "u"), JumpProfile::power(1.0), 0.5, 0.25));
  spec.shellCap = 2048;
  Measure m(spec);
  StepSampler sampler(m);
  Rng rng(rng_key(77, 0, 0));
  int atE = 0;
  const int N = 100000;
  for (int i = 0; i < N; ++i)
    if (sampler.sample(rng) == D.identity()) ++atE;
  double pE = m.pmf(D.identity());
  double sd = std::sqrt(pE * (1.0 - pE) * N);
  CHECK(std::fabs(atE - pE * N) <= 5.0 * sd);
}
