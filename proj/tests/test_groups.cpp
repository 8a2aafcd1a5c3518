#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "longjump/group/group.hpp"
#include "longjump/group/nilpotent.hpp"
#include "longjump/group/subgroup.hpp"
#include "longjump/util/rng.hpp"

#include "oracles.hpp"

using namespace longjump;

namespace {

std::vector<Group> all_groups() {
  return {Group::zk(1), Group::zk(2), Group::zk(3), Group::heisenberg3(),
          Group::dihedral_inf(), Group::delta(), Group::semidirect_zrot()};
}

// Deterministic pseudo-random element: a short word in the generators.
Element random_element(const Group& G, Rng& rng, int len = 6) {
  auto gens = G.standard_generators();
  Element g = G.identity();
  for (int i = 0; i < len; ++i) {
    const Element& s = gens[rng.next_below(gens.size())];
    g = G.mul(g, rng.next_below(2) == 0 ? s : G.inv(s));
  }
  return g;
}

}  // namespace

// ---------------------------------------------------------------------------
// group law against the reference models
// ---------------------------------------------------------------------------

TEST_CASE("multiplication matches the independent models") {
  for (const auto& G : all_groups()) {
    Rng rng(rng_key(7, static_cast<u64>(G.kind()), 0));
    for (int trial = 0; trial < 200; ++trial) {
      Element a = random_element(G, rng);
      Element b = random_element(G, rng);
      REQUIRE(G.mul(a, b) == testoracle::model_mul(G, a, b));
    }
  }
}

TEST_CASE("group axioms hold on random elements") {
  for (const auto& G : all_groups()) {
    Rng rng(rng_key(8, static_cast<u64>(G.kind()), 0));
    Element e = G.identity();
    for (int trial = 0; trial < 100; ++trial) {
      Element a = random_element(G, rng);
      Element b = random_element(G, rng);
      Element c = random_element(G, rng);
      REQUIRE(G.mul(a, e) == a);
      REQUIRE(G.mul(e, a) == a);
      REQUIRE(G.mul(a, G.inv(a)) == e);
      REQUIRE(G.mul(G.inv(a), a) == e);
      REQUIRE(G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c)));
    }
  }
}

TEST_CASE("reflection-type generators are involutions") {
  Group D = Group::dihedral_inf();
  for (const auto& s : D.standard_generators()) {
    CHECK(D.mul(s, s) == D.identity());
    CHECK(D.inv(s) == s);
  }
  Group Del = Group::delta();
  for (const auto& s : Del.standard_generators()) {
    CHECK(Del.mul(s, s) == Del.identity());
    CHECK(Del.inv(s) == s);
  }
}

TEST_CASE("dihedral relation u z u = z inverse") {
  Group D = Group::dihedral_inf();
  Element u = make_element({0, 1});
  Element z = make_element({1, 0});
  CHECK(D.mul(D.mul(u, z), u) == D.inv(z));
}

TEST_CASE("validate rejects malformed elements") {
  Group D = Group::dihedral_inf();
  CHECK_THROWS_AS(D.validate(make_element({0, 2})), std::invalid_argument);
  CHECK_THROWS_AS(D.validate(make_element({0, 0, 0})), std::invalid_argument);
  Group Del = Group::delta();
  CHECK_THROWS_AS(Del.validate(make_element({0, 0, 0, -1})),
                  std::invalid_argument);
}

TEST_CASE("evaluate_word multiplies letters left to right") {
  Group H = Group::heisenberg3();
  auto gens = H.standard_generators();
  // x y x^{-1} y^{-1} = central element (0,0,1)
  Element comm = H.evaluate_word(
      gens, {{0, +1}, {1, +1}, {0, -1}, {1, -1}});
  CHECK(comm == make_element({0, 0, 1}));
  CHECK_THROWS_AS(H.evaluate_word(gens, {{5, 1}}), std::out_of_range);
}

// ---------------------------------------------------------------------------
// subgroups
// ---------------------------------------------------------------------------

TEST_CASE("lattice subgroup coordinates round-trip") {
  Group Z3 = Group::zk(3);
  Subgroup full(Z3, "full");
  Subgroup span2(Z3, "span:2");

  Element g = make_element({4, -7, 2});
  auto c = full.coordinates(g);
  REQUIRE(c.has_value());
  CHECK(full.from_coordinates(*c) == g);

  Element onAxis = make_element({0, 5, 0});
  auto c2 = span2.coordinates(onAxis);
  REQUIRE(c2.has_value());
  CHECK((*c2)[0] == 5);
  CHECK(span2.from_coordinates(*c2) == onAxis);
  CHECK_FALSE(span2.coordinates(g).has_value());
  CHECK(span2.contains(onAxis));
  CHECK_FALSE(span2.contains(g));
}

TEST_CASE("lattice word length is the ell-1 norm of the coordinates") {
  Group Z2 = Group::zk(2);
  Subgroup full(Z2, "full");
  CHECK(full.word_length(make_element({3, -4})) == 7);
  CHECK(full.word_length(Z2.identity()) == 0);

  // independent check by BFS over the subgroup generators
  Rng rng(rng_key(3, 0, 0));
  for (int trial = 0; trial < 20; ++trial) {
    Element g = make_element({static_cast<i64>(rng.next_below(7)) - 3,
                              static_cast<i64>(rng.next_below(7)) - 3});
    int bfs = testoracle::bfs_word_length(Z2, full.generators(), g, 8);
    REQUIRE(bfs == static_cast<int>(full.word_length(g)));
  }
}

TEST_CASE("heisenberg center subgroup behaves as a rank-1 lattice") {
  Group H = Group::heisenberg3();
  Subgroup s3(H, "s3");
  CHECK(s3.rank() == 1);
  Element z = make_element({0, 0, -5});
  auto c = s3.coordinates(z);
  REQUIRE(c.has_value());
  CHECK((*c)[0] == -5);
  CHECK(s3.word_length(z) == 5);
  CHECK_FALSE(s3.contains(make_element({1, 0, 0})));
}

TEST_CASE("dihedral subgroups split into reflections and translations") {
  Group D = Group::dihedral_inf();
  Subgroup u(D, "u"), z(D, "z");
  CHECK(u.kind() == SubgroupKind::Finite);
  CHECK(u.finite_elements().size() == 2);
  CHECK(z.kind() == SubgroupKind::Lattice);
  CHECK(z.word_length(make_element({-4, 0})) == 4);
  CHECK_FALSE(z.contains(make_element({2, 1})));
}

TEST_CASE("axis subgroups of the flip group use the dihedral chart") {
  Group Del = Group::delta();
  Subgroup H1(Del, "H1");
  CHECK(H1.kind() == SubgroupKind::DihedralType);
  CHECK(H1.growth_degree() == 1);
  CHECK(H1.shell_count_exact(0) == 1);
  CHECK(H1.shell_count_exact(5) == 2);
  auto shell0 = H1.dihedral_shell(0);
  CHECK(shell0.size() == 1);
  for (i64 r : {1, 2, 3, 6}) {
    auto shell = H1.dihedral_shell(r);
    REQUIRE(shell.size() == 2);
    for (const auto& h : shell) {
      CHECK(H1.contains(h));
      CHECK(H1.word_length(h) == r);
      auto c = H1.coordinates(h);
      REQUIRE(c.has_value());
      CHECK(H1.from_coordinates(*c) == h);
    }
  }
}

TEST_CASE("shell counts match brute enumeration for small radii") {
  struct Case {
    Group G;
    const char* preset;
  };
  std::vector<Case> cases = {{Group::zk(1), "full"},
                             {Group::zk(2), "full"},
                             {Group::zk(3), "full"},
                             {Group::zk(4), "full"},
                             {Group::heisenberg3(), "s1"}};
  for (const auto& [G, preset] : cases) {
    Subgroup sg(G, preset);
    int m = sg.rank();
    for (i64 r = 1; r <= 5; ++r) {
      // count lattice points with |x|_1 = r by brute force over a box
      i64 brute = 0;
      std::vector<i64> x(static_cast<std::size_t>(m), -r);
      while (true) {
        i64 s = 0;
        for (i64 v : x) s += v < 0 ? -v : v;
        if (s == r) ++brute;
        int j = 0;
        while (j < m && ++x[static_cast<std::size_t>(j)] > r) {
          x[static_cast<std::size_t>(j)] = -r;
          ++j;
        }
        if (j == m) break;
      }
      REQUIRE(sg.shell_count_exact(r) == static_cast<u64>(brute));
    }
  }
}

TEST_CASE("unknown subgroup presets are rejected") {
  CHECK_THROWS_AS(Subgroup(Group::zk(2), "span:3"), std::invalid_argument);
  CHECK_THROWS_AS(Subgroup(Group::dihedral_inf(), "w"), std::invalid_argument);
  CHECK_THROWS_AS(Subgroup(Group::heisenberg3(), "full"),
                  std::invalid_argument);
}

// ---------------------------------------------------------------------------
// nilpotent approximation
// ---------------------------------------------------------------------------

TEST_CASE("coset decomposition reassembles the element") {
  for (const auto& G : all_groups()) {
    NilpotentApprox nil(G);
    Rng rng(rng_key(11, static_cast<u64>(G.kind()), 0));
    for (int trial = 0; trial < 50; ++trial) {
      Element g = random_element(G, rng);
      auto [h, l] = nil.coset_decompose(g);
      REQUIRE(nil.in_nilpotent(h));
      REQUIRE(G.mul(h, nil.coset_reps()[l]) == g);
    }
  }
}

TEST_CASE("full decomposition multiplies back to the element") {
  for (const auto& G : all_groups()) {
    NilpotentApprox nil(G);
    Rng rng(rng_key(12, static_cast<u64>(G.kind()), 0));
    for (int trial = 0; trial < 50; ++trial) {
      Element g = random_element(G, rng);
      Decomposition d = nil.decompose(g);
      Element acc = G.identity();
      for (const auto& f : d.factors) {
        Element pw = G.identity();
        i64 reps = f.exponent < 0 ? -f.exponent : f.exponent;
        Element step = f.exponent < 0 ? G.inv(f.base) : f.base;
        for (i64 i = 0; i < reps; ++i) pw = G.mul(pw, step);
        acc = G.mul(acc, pw);
      }
      acc = G.mul(acc, d.cosetRep);
      REQUIRE(acc == g);
    }
  }
}

TEST_CASE("nilpotent membership matches the coset structure") {
  Group D = Group::dihedral_inf();
  NilpotentApprox nil(D);
  CHECK(nil.in_nilpotent(make_element({5, 0})));
  CHECK_FALSE(nil.in_nilpotent(make_element({5, 1})));

  Group S = Group::semidirect_zrot();
  NilpotentApprox nilS(S);
  CHECK(nilS.in_nilpotent(make_element({4, 1, 2})));
  CHECK_FALSE(nilS.in_nilpotent(make_element({3, 1, 2})));
}
