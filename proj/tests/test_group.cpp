#include <doctest.h>

#include <set>

#include "anosov/error.hpp"
#include "anosov/group.hpp"

using namespace anosov;

namespace {

// |gamma eta| = |gamma| + |eta| in the free group.
bool cone_member(const GeneratorAlphabet& alphabet, const GroupWord& gamma, const GroupWord& eta) {
  return multiply(alphabet, gamma, eta).size() == gamma.size() + eta.size();
}

}  // namespace

TEST_CASE("free reduction") {
  const GeneratorAlphabet f2{2};
  CHECK(reduce(f2, {0, 1}).empty());
  CHECK(reduce(f2, {0, 2, 3, 0}) == GroupWord{{0, 0}});
  CHECK(reduce(f2, {0, 2, 1}) == GroupWord{{0, 2, 1}});
  CHECK(reduce(f2, reduce(f2, {2, 0, 1, 3, 3}).letters) == reduce(f2, {2, 0, 1, 3, 3}));
  try {
    reduce(f2, {4});
    FAIL("expected UnknownLetter");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownLetter);
  }
  CHECK(format_word(GroupWord{{0, 1, 2, 3}}) == "aAbB");
  CHECK(format_word({}) == "e");
  CHECK(parse_word(f2, "abB") == GroupWord{{0}});
}

TEST_CASE("free group automaton structure") {
  const auto a = free_group_automaton(2);
  CHECK(a.state_count() == 5);
  CHECK(a.out_degree(a.initial()) == 4);
  for (StateId s = 0; s < a.state_count(); ++s) {
    if (s != a.initial()) CHECK(a.out_degree(s) == 3);
  }
  const auto rec = a.recurrent_states();
  CHECK(rec.size() == 4);
  CHECK(std::find(rec.begin(), rec.end(), a.initial()) == rec.end());
  const auto sizes = a.sphere_sizes(12);
  std::uint64_t expected = 4;
  for (int k = 1; k <= 12; ++k) {
    CHECK(sizes[static_cast<std::size_t>(k)] == expected);
    expected *= 3;
  }
}

TEST_CASE("cone types of F2 from membership predicates") {
  const GeneratorAlphabet f2{2};
  const auto a = free_group_automaton(2);
  const auto words = ball(a, 4);
  // Group ball words by their membership signature over ball(2).
  const auto probes = ball(a, 2);
  std::set<std::vector<bool>> signatures;
  for (const auto& g : words) {
    std::vector<bool> sig;
    for (const auto& eta : probes) sig.push_back(cone_member(f2, g, eta));
    signatures.insert(sig);
    // The automaton predicate agrees.
    for (std::size_t i = 0; i < probes.size(); ++i) CHECK(in_cone(a, cone_type(a, g), probes[i]) == sig[i]);
  }
  CHECK(signatures.size() == 5);
  CHECK(cone_type(a, {}) == a.initial());
  CHECK(cone_type(a, GroupWord{{0, 2}}) == cone_type(a, GroupWord{{2}}));
}

TEST_CASE("sphere enumeration") {
  const auto a = free_group_automaton(2);
  CHECK(sphere(a, 0).size() == 1);
  CHECK(sphere(a, 1).size() == 4);
  const auto s2 = sphere(a, 2);
  CHECK(s2.size() == 12);
  CHECK(std::is_sorted(s2.begin(), s2.end()));
  CHECK(ball(a, 3).size() == 53);
  for (const auto& w : sphere(a, 5)) CHECK(reduce(a.alphabet(), w.letters) == w);
  // Prefix-restricted enumeration partitions the sphere.
  std::size_t total = 0;
  for (Letter l = 0; l < 4; ++l) {
    SphereEnumerator it(a, 4, GroupWord{{l}});
    GroupWord w;
    while (it.next(w)) {
      CHECK(w.letters.front() == l);
      ++total;
    }
  }
  CHECK(total == sphere(a, 4).size());
  const auto f3 = free_group_automaton(3);
  CHECK(sphere(f3, 3).size() == 6u * 5 * 5);
}

TEST_CASE("boundary rays") {
  const auto a = free_group_automaton(2);
  const auto r1 = sample_boundary_rays(a, 100, 30, 7);
  const auto r2 = sample_boundary_rays(a, 100, 30, 7);
  REQUIRE(r1.size() == 100);
  std::set<GroupWord> distinct;
  for (std::size_t i = 0; i < r1.size(); ++i) {
    CHECK(r1[i].prefix == r2[i].prefix);
    CHECK(a.accepts(r1[i].prefix));
    CHECK(r1[i].depth() == 30);
    distinct.insert(r1[i].prefix);
  }
  CHECK(distinct.size() == 100);
  const auto p = BoundaryRay::periodic(GroupWord{{0}}, 5);
  CHECK(p.prefix == GroupWord{{0, 0, 0, 0, 0}});
  CHECK_THROWS_AS(BoundaryRay::periodic(GroupWord{{0, 1}}, 4), Error);
}

TEST_CASE("nested pairs") {
  const GeneratorAlphabet f2{2};
  const auto a = free_group_automaton(2);
  const StateId ca = cone_type(a, GroupWord{{0}});
  const StateId cA = cone_type(a, GroupWord{{1}});
  const StateId cb = cone_type(a, GroupWord{{2}});
  const auto w = nested_pair(a, ca, cb, 1);
  REQUIRE(w.has_value());
  CHECK(*w == GroupWord{{2}});
  CHECK_FALSE(nested_pair(a, ca, cA, 1).has_value());
  const auto probes = ball(a, 5);
  for (StateId c1 : a.recurrent_states()) {
    for (StateId c2 : a.recurrent_states()) {
      const auto beta = nested_pair(a, c1, c2, 3);
      REQUIRE(beta.has_value());
      CHECK(beta->size() == 3);
      // beta . C2 inside C1: readable from c1 after beta, for sampled eta in C2.
      int checked = 0;
      for (const auto& eta : probes) {
        if (checked == 50) break;
        if (!in_cone(a, c2, eta)) continue;
        CHECK(in_cone(a, c1, multiply(f2, *beta, eta)));
        CHECK(multiply(f2, *beta, eta).size() == beta->size() + eta.size());
        ++checked;
      }
    }
  }
}

TEST_CASE("automaton file format") {
  const auto builtin = free_group_automaton(2);
  const std::string text =
      "alphabet n=2\n"
      "state e\nstate a\nstate A\nstate b\nstate B\n"
      "initial e\n"
      "edge e 1 a\nedge e 2 A\nedge e 3 b\nedge e 4 B\n"
      "edge a 1 a\nedge a 3 b\nedge a 4 B\n"
      "edge A 2 A\nedge A 3 b\nedge A 4 B\n"
      "edge b 1 a\nedge b 2 A\nedge b 3 b\n"
      "edge B 1 a\nedge B 2 A\nedge B 4 B\n";
  const auto loaded = parse_automaton(text);
  CHECK(loaded.isomorphic(builtin));
  CHECK(parse_automaton(builtin.to_text()).isomorphic(builtin));
  try {
    parse_automaton(text + "edge a 1 b\n");
    FAIL("expected ValidationError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ValidationError);
  }
  try {
    parse_automaton("alphabet n=2\nstates e\n");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
  }
}
