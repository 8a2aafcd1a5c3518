#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "longjump/kernel/dense1d.hpp"
#include "longjump/kernel/kernel.hpp"
#include "longjump/kernel/stats.hpp"
#include "longjump/measure/measure.hpp"

#include "oracles.hpp"

using namespace longjump;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::Message;

namespace {

// Lazy nearest-neighbour law on the integer line: {-1: 1/4, 0: 1/2, 1: 1/4}.
// Its n-step distribution is the exact binomial C(2n, n+x) / 4^n.
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

// Lazy reflection law on the infinite dihedral group:
// {e: 1/2, (0,1): 1/4, (-1,1): 1/4}; both reflections are involutions.
WalkSpec lazy_dihedral_spec() {
  Group G = Group::dihedral_inf();
  WalkSpec spec(G);
  spec.p0 = 1.0;
  spec.mu0 = {{make_element({0, 0}), 0.5},
              {make_element({0, 1}), 0.25},
              {make_element({-1, 1}), 0.25}};
  spec.validate();
  return spec;
}

// Heavy-tailed single-component law on the line.
WalkSpec line_spec(double alpha, i64 shellCap = i64{1} << 20) {
  Group G = Group::zk(1);
  WalkSpec spec(G);
  spec.components.push_back(
      WalkComponent(Subgroup(G, "full"), JumpProfile::power(alpha), 1.0));
  spec.shellCap = shellCap;
  spec.validate();
  return spec;
}

TruncationPolicy exact_policy() {
  TruncationPolicy pol;
  pol.epsPerStep = 0.0;
  return pol;
}

// C(2n, k) as an exact double (fits in 53 bits for 2n <= 32).
double binom(int top, int k) {
  double v = 1.0;
  for (int i = 0; i < k; ++i)
    v = v * static_cast<double>(top - i) / static_cast<double>(i + 1);
  return v;
}

double lazy_step_prob(int n, i64 x) {
  if (x < -n || x > n) return 0.0;
  return binom(2 * n, n + static_cast<int>(x)) / std::pow(4.0, n);
}

}  // namespace

// ---------------------------------------------------------------------------
// one-step kernels
// ---------------------------------------------------------------------------

TEST_CASE("one-step kernel reproduces the step law on its support") {
  Measure m(line_spec(1.0));
  TruncationPolicy pol;
  pol.epsPerStep = 1e-8;
  SparseKernel k = one_step_kernel(m, pol);

  REQUIRE(k.steps == 1);
  REQUIRE(!k.entries.empty());
  i64 rMax = 0;
  for (const auto& e : k.entries) {
    CHECK(e.second == Catch::Approx(m.pmf(e.first)).epsilon(1e-14));
    CHECK(e.second >= pol.epsPerStep);
    rMax = std::max(rMax, std::abs(e.first[0]));
  }
  // support is a full interval: the per-element mass decreases with radius
  CHECK(k.entries.size() == static_cast<std::size_t>(2 * rMax + 1));
  CHECK(m.pmf(make_element({rMax + 1})) < pol.epsPerStep);
  CHECK(m.pmf(make_element({rMax})) >= pol.epsPerStep);
  CHECK(k.dropped > 0.0);
  CHECK(k.dropped < 1e-3);
  CHECK(k.mass() + k.dropped == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("two-step masses of the lazy walk on the line are exact dyadics") {
  Measure m(lazy_line_spec());
  SparseKernel k1 = one_step_kernel(m, exact_policy());

  REQUIRE(k1.entries.size() == 3);
  CHECK(k1.at(make_element({0})) == 0.5);
  CHECK(k1.at(make_element({1})) == 0.25);
  CHECK(k1.at(make_element({-1})) == 0.25);
  CHECK(k1.dropped == 0.0);

  SparseKernel k2 = convolve(m.spec().group, k1, k1, exact_policy());
  REQUIRE(k2.steps == 2);
  REQUIRE(k2.entries.size() == 5);
  CHECK(k2.at(make_element({0})) == 0.375);
  CHECK(k2.at(make_element({1})) == 0.25);
  CHECK(k2.at(make_element({-1})) == 0.25);
  CHECK(k2.at(make_element({2})) == 0.0625);
  CHECK(k2.at(make_element({-2})) == 0.0625);
  CHECK(k2.dropped == 0.0);
}

TEST_CASE("reflection bookkeeping is exact over two dihedral steps") {
  Measure m(lazy_dihedral_spec());
  const Group& G = m.spec().group;
  SparseKernel k1 = one_step_kernel(m, exact_policy());
  SparseKernel k2 = convolve(G, k1, k1, exact_policy());

  // two reflections compose to a translation, reflection mass needs exactly
  // one reflected factor
  REQUIRE(k2.entries.size() == 5);
  CHECK(k2.at(make_element({0, 0})) == 0.375);
  CHECK(k2.at(make_element({0, 1})) == 0.25);
  CHECK(k2.at(make_element({-1, 1})) == 0.25);
  CHECK(k2.at(make_element({1, 0})) == 0.0625);
  CHECK(k2.at(make_element({-1, 0})) == 0.0625);
  CHECK(k2.dropped == 0.0);
}

// ---------------------------------------------------------------------------
// powering
// ---------------------------------------------------------------------------

TEST_CASE("binary powering matches the reference product chain bit for bit") {
  Measure m(lazy_line_spec());
  const Group& G = m.spec().group;
  SparseKernel base = one_step_kernel(m, exact_policy());

  SparseKernel lib = kernel_power(G, base, 13, exact_policy());
  SparseKernel ref = testoracle::brute_power(G, base, 13);

  REQUIRE(lib.steps == 13);
  REQUIRE(lib.entries.size() == ref.entries.size());
  for (const auto& e : ref.entries) CHECK(lib.at(e.first) == e.second);
}

TEST_CASE("n-step lazy returns follow the central binomial formula") {
  Measure m(lazy_line_spec());
  const Group& G = m.spec().group;
  SparseKernel base = one_step_kernel(m, exact_policy());
  SparseKernel k = kernel_power(G, base, 16, exact_policy());

  REQUIRE(k.steps == 16);
  REQUIRE(k.entries.size() == 33);
  CHECK(k.at(G.identity()) ==
        Catch::Approx(lazy_step_prob(16, 0)).epsilon(1e-13));
  CHECK(k.at(make_element({4})) ==
        Catch::Approx(lazy_step_prob(16, 4)).epsilon(1e-13));
  CHECK(k.at(make_element({-4})) ==
        Catch::Approx(lazy_step_prob(16, -4)).epsilon(1e-13));
  CHECK(k.mass() == Catch::Approx(1.0).margin(1e-14));

  SparseKernel k0 = kernel_power(G, base, 0, exact_policy());
  CHECK(k0.steps == 0);
  CHECK(k0.entries.size() == 1);
  CHECK(k0.at(G.identity()) == 1.0);
}

// ---------------------------------------------------------------------------
// truncation policies
// ---------------------------------------------------------------------------

TEST_CASE("threshold truncation keeps entries as certified lower bounds") {
  Measure m(line_spec(1.0));
  const Group& G = m.spec().group;

  TruncationPolicy tight;
  tight.epsPerStep = 1e-8;
  TruncationPolicy loose;
  loose.epsPerStep = 1e-4;

  SparseKernel kt = kernel_power(G, one_step_kernel(m, tight), 2, tight);
  SparseKernel kl = kernel_power(G, one_step_kernel(m, loose), 2, loose);

  CHECK(kl.dropped > kt.dropped);
  CHECK(kl.entries.size() < kt.entries.size());
  // every retained mass under the coarse policy is a partial sum of the
  // finer one, and the deficit is bounded by the coarse ledger
  for (const auto& e : kl.entries) {
    double fine = kt.at(e.first);
    CHECK(e.second <= fine + 1e-15);
    CHECK(fine - e.second <= kl.dropped + 1e-15);
  }
  CHECK(kl.mass() + kl.dropped == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("top-k truncation keeps exactly the heaviest atoms") {
  Measure m(line_spec(0.5, i64{1} << 16));
  TruncationPolicy pol;
  pol.mode = TruncationPolicy::Mode::TopK;
  pol.maxSupport = 25;
  pol.epsPerStep = 1e-14;

  SparseKernel k = one_step_kernel(m, pol);
  REQUIRE(k.entries.size() == 25);
  // per-element mass decreases with |x|, so the heaviest 25 atoms are the
  // centered interval |x| <= 12
  for (i64 x = -12; x <= 12; ++x)
    CHECK(k.at(make_element({x})) == Catch::Approx(m.pmf(make_element({x}))));
  CHECK(k.dropped > 0.0);
  CHECK(k.mass() + k.dropped == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("top-k powering caps the support and grows the ledger") {
  Measure m(lazy_line_spec());
  const Group& G = m.spec().group;
  TruncationPolicy pol;
  pol.mode = TruncationPolicy::Mode::TopK;
  pol.maxSupport = 5;
  pol.epsPerStep = 0.0;

  SparseKernel base = one_step_kernel(m, pol);
  SparseKernel k4 = kernel_power(G, base, 4, pol);

  // exact four-step masses are C(8, 4+x)/256; the five heaviest live on
  // |x| <= 2 and the trimmed tail weighs (2*8 + 2*1)/256
  REQUIRE(k4.entries.size() == 5);
  CHECK(k4.at(make_element({0})) == Catch::Approx(70.0 / 256.0));
  CHECK(k4.at(make_element({1})) == Catch::Approx(56.0 / 256.0));
  CHECK(k4.at(make_element({2})) == Catch::Approx(28.0 / 256.0));
  CHECK(k4.dropped == Catch::Approx(18.0 / 256.0).margin(1e-14));
}

TEST_CASE("threshold overflow names a cutoff that would fit") {
  Measure m(line_spec(0.5, i64{1} << 16));
  TruncationPolicy pol;
  pol.epsPerStep = 1e-9;
  pol.maxSupport = 50;

  REQUIRE_THROWS_MATCHES(one_step_kernel(m, pol), std::runtime_error,
                         MessageMatches(ContainsSubstring(
                             "exceeds maxSupport 50")));
  double suggested = 0.0;
  try {
    one_step_kernel(m, pol);
  } catch (const std::runtime_error& ex) {
    std::string msg = ex.what();
    REQUIRE_THAT(msg, ContainsSubstring("would fit"));
    std::size_t pos = msg.find("at least ");
    REQUIRE(pos != std::string::npos);
    suggested = std::stod(msg.substr(pos + 9));
  }
  REQUIRE(suggested > 0.0);
  // nudged strictly above the reported cutoff the build goes through
  pol.epsPerStep = suggested * (1.0 + 1e-9);
  SparseKernel k = one_step_kernel(m, pol);
  CHECK(static_cast<i64>(k.entries.size()) <= pol.maxSupport);
}

TEST_CASE("powering overflow reports the threshold branch too") {
  Measure m(lazy_line_spec());
  const Group& G = m.spec().group;
  TruncationPolicy pol;
  pol.epsPerStep = 0.0;
  pol.maxSupport = 5;

  SparseKernel base = one_step_kernel(m, pol);
  REQUIRE_THROWS_MATCHES(kernel_power(G, base, 4, pol), std::runtime_error,
                         MessageMatches(ContainsSubstring(
                             "exceeds maxSupport 5")));
}

TEST_CASE("a zero threshold requires a finitely supported law") {
  Measure m(line_spec(1.0));
  REQUIRE_THROWS_MATCHES(
      one_step_kernel(m, exact_policy()), std::invalid_argument,
      Message("epsPerStep = 0 requires a finitely supported step law"));
}

// ---------------------------------------------------------------------------
// return series and translate distance
// ---------------------------------------------------------------------------

TEST_CASE("sparse return series reuses powers along the schedule") {
  Measure m(lazy_line_spec());
  const Group& G = m.spec().group;
  std::vector<u64> nList{8, 2, 0, 1};
  auto rows = return_series(G, m, nList, exact_policy());

  REQUIRE(rows.size() == 4);
  CHECK(rows[0].n == 0);
  CHECK(rows[0].lower == 1.0);
  CHECK(rows[0].upper == 1.0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].n > rows[i - 1].n);
    CHECK(rows[i].lower < rows[i - 1].lower);
  }
  CHECK(rows[1].lower == Catch::Approx(0.5).epsilon(1e-13));
  CHECK(rows[2].lower == Catch::Approx(0.375).epsilon(1e-13));
  CHECK(rows[3].lower ==
        Catch::Approx(lazy_step_prob(8, 0)).epsilon(1e-12));
  for (const auto& r : rows) {
    CHECK(r.upper >= r.lower);
    CHECK(r.supNorm >= r.lower);
  }
}

TEST_CASE("translate distance between exact two-step kernels") {
  Measure m(lazy_line_spec());
  const Group& G = m.spec().group;
  SparseKernel base = one_step_kernel(m, exact_policy());
  SparseKernel k2 = kernel_power(G, base, 2, exact_policy());

  // masses {1/16, 1/4, 3/8, 1/4, 1/16}; shifting by one gives
  // 3/16 + 1/8 + 1/8 + 3/16 + 1/16 plus the orphaned 1/16 at the far edge
  TvResult shifted = tv_difference(G, k2, k2, make_element({1}));
  CHECK(shifted.tv == Catch::Approx(0.75).epsilon(1e-13));
  CHECK(shifted.slack == Catch::Approx(0.0).margin(1e-15));

  TvResult still = tv_difference(G, k2, k2, G.identity());
  CHECK(still.tv == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("kernel csv bytes are stable") {
  Measure m(lazy_line_spec());
  SparseKernel k = one_step_kernel(m, exact_policy());
  std::ostringstream os;
  write_kernel_csv(os, k);
  CHECK(os.str() ==
        "# n=1 droppedMass=0\n"
        "element,prob\n"
        "-1,0.25\n"
        "0,0.5\n"
        "1,0.25\n");
}

// ---------------------------------------------------------------------------
// dense window engine
// ---------------------------------------------------------------------------

TEST_CASE("dense engine accepts only rank-one windows") {
  Group G2 = Group::zk(2);
  WalkSpec spec(G2);
  spec.components.push_back(
      WalkComponent(Subgroup(G2, "full"), JumpProfile::power(1.0), 1.0));
  spec.validate();
  Measure m2(spec);
  REQUIRE_THROWS_MATCHES(DenseEngine(m2, 16), std::invalid_argument,
                         MessageMatches(ContainsSubstring("integer line")));

  Measure m1(lazy_line_spec());
  REQUIRE_THROWS_MATCHES(DenseEngine(m1, 0), std::invalid_argument,
                         Message("window radius must be positive"));
}

TEST_CASE("dense one-step window equals the step law") {
  Measure m(line_spec(1.0));
  DenseEngine eng(m, 64);
  DenseKernel k = eng.one_step();

  REQUIRE(k.steps == 1);
  REQUIRE(k.length() == 129);
  for (i64 x = -64; x <= 64; ++x)
    CHECK(k.at(x) == m.pmf(make_element({x})));
  CHECK(k.at(65) == 0.0);
  CHECK(k.dropped > 0.0);
  CHECK(k.dropped < 0.05);
}

TEST_CASE("dense powers stay certified lower bounds on both product paths") {
  Measure m(lazy_line_spec());

  DenseEngine direct(m, 40);  // window below the fft cutoff
  DenseKernel kd = direct.power(16);
  REQUIRE(kd.steps == 16);
  double exact = lazy_step_prob(16, 0);
  CHECK(kd.at(0) <= exact + 1e-15);
  CHECK(kd.at(0) >= exact - 1e-9);
  CHECK(kd.dropped >= 0.0);
  CHECK(kd.dropped < 1e-8);

  DenseEngine fft(m, 2048);  // window above the fft cutoff
  DenseKernel kf = fft.power(16);
  REQUIRE(kf.steps == 16);
  for (i64 x = -32; x <= 32; ++x) {
    CHECK(kf.at(x) == Catch::Approx(kd.at(x)).margin(2e-11));
    CHECK(kf.at(x) <= lazy_step_prob(16, x) + 1e-13);
  }
  CHECK(kf.dropped >= 0.0);

  DenseKernel k0 = direct.power(0);
  CHECK(k0.steps == 0);
  CHECK(k0.at(0) == 1.0);
  CHECK(k0.mass() == 1.0);
}

TEST_CASE("dihedral dense two-step matches the hand computation") {
  Measure m(lazy_dihedral_spec());
  const Group& G = m.spec().group;
  DenseEngine eng(m, 8);
  DenseKernel k = eng.power(2);

  REQUIRE(k.steps == 2);
  CHECK(k.at(0, 0) == Catch::Approx(0.375).margin(1e-10));
  CHECK(k.at(0, 1) == Catch::Approx(0.25).margin(1e-10));
  CHECK(k.at(-1, 1) == Catch::Approx(0.25).margin(1e-10));
  CHECK(k.at(1, 0) == Catch::Approx(0.0625).margin(1e-10));
  CHECK(k.at(-1, 0) == Catch::Approx(0.0625).margin(1e-10));
  CHECK(k.dropped >= 0.0);
  CHECK(k.dropped < 1e-9);

  // the sparse product over the same law agrees entrywise
  SparseKernel s2 = kernel_power(G, one_step_kernel(m, exact_policy()), 2,
                                 exact_policy());
  for (const auto& e : s2.entries)
    CHECK(k.value_at(e.first) == Catch::Approx(e.second).margin(1e-10));
}

TEST_CASE("dense and sparse brackets overlap on a heavy-tailed law") {
  Measure m(line_spec(1.0));
  const Group& G = m.spec().group;

  TruncationPolicy pol;
  pol.epsPerStep = 1e-7;  // keeps the quadratic convolution supports small
  SparseKernel s = kernel_power(G, one_step_kernel(m, pol), 8, pol);

  DenseEngine eng(m, 512);
  DenseKernel d = eng.power(8);

  REQUIRE(s.steps == 8);
  REQUIRE(d.steps == 8);
  double slack = std::max(0.0, s.dropped) + std::max(0.0, d.dropped) + 1e-12;
  for (i64 x = -16; x <= 16; ++x) {
    double sv = s.at(make_element({x}));
    double dv = d.at(x);
    CHECK(std::abs(sv - dv) <= slack);
  }
}

TEST_CASE("dense products demand matching windows") {
  Measure m(lazy_line_spec());
  DenseEngine a(m, 16);
  DenseEngine b(m, 24);
  DenseKernel ka = a.power(2);
  DenseKernel kb = b.one_step();
  REQUIRE_THROWS_MATCHES(a.multiply(ka, kb), std::invalid_argument,
                         Message("kernel windows do not match"));
}

TEST_CASE("dense return series squares forward and patches the remainder") {
  Measure m(lazy_line_spec());
  DenseEngine eng(m, 64);
  auto rows = dense_return_series(eng, {0, 2, 4, 12});

  REQUIRE(rows.size() == 4);
  CHECK(rows[0].n == 0);
  CHECK(rows[0].lower == 1.0);
  CHECK(rows[1].n == 2);
  CHECK(rows[2].n == 4);
  CHECK(rows[3].n == 12);  // reached as 4 -> 8 by squaring, times power(4)
  CHECK(rows[1].lower == Catch::Approx(lazy_step_prob(2, 0)).margin(1e-10));
  CHECK(rows[2].lower == Catch::Approx(lazy_step_prob(4, 0)).margin(1e-10));
  CHECK(rows[3].lower == Catch::Approx(lazy_step_prob(12, 0)).margin(1e-9));
  for (const auto& r : rows) {
    CHECK(r.upper >= r.lower);
    CHECK(r.supNorm >= r.lower);
  }
}
