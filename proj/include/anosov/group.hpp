#pragma once

// Word-metric combinatorics: free-group words, cone types and the geodesic
// automaton, sphere enumeration and boundary rays.
//
// Letters are 0-based internally: generator i is letter 2i, its inverse 2i+1,
// so inverse(l) == l ^ 1.  Text formats use the 1-based convention.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace anosov {

using Letter = int;

constexpr Letter inverse_letter(Letter l) noexcept { return l ^ 1; }

struct GeneratorAlphabet {
  int rank = 0;  ///< number of free generators
  int size() const { return 2 * rank; }
  bool contains(Letter l) const { return l >= 0 && l < size(); }
};

/// A word over the alphabet.  Words produced by reduce() or by the automaton
/// are geodesic, so size() is the word length.
struct GroupWord {
  std::vector<Letter> letters;

  std::size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }
  Letter back() const { return letters.back(); }
  bool operator==(const GroupWord&) const = default;
  auto operator<=>(const GroupWord&) const = default;
};

/// Free reduction; throws UnknownLetter for letters outside the alphabet.
GroupWord reduce(const GeneratorAlphabet& alphabet, const std::vector<Letter>& raw);
GroupWord inverse(const GroupWord& w);
/// reduce(u v) for the free group.
GroupWord multiply(const GeneratorAlphabet& alphabet, const GroupWord& u, const GroupWord& v);

/// "a", "A", "b", "B", ... ; the empty word prints as "e".
std::string format_word(const GroupWord& w);
GroupWord parse_word(const GeneratorAlphabet& alphabet, std::string_view text);

using StateId = int;
inline constexpr StateId kNoState = -1;

/// Deterministic labelled graph on cone types.  Paths from the initial state
/// spell geodesic words.
class GeodesicAutomaton {
 public:
  GeodesicAutomaton(GeneratorAlphabet alphabet, std::vector<std::string> state_names, StateId initial);

  /// Adds an edge; throws ValidationError on a duplicate (state, letter).
  void add_edge(StateId from, Letter letter, StateId to);

  const GeneratorAlphabet& alphabet() const { return alphabet_; }
  int state_count() const { return static_cast<int>(names_.size()); }
  StateId initial() const { return initial_; }
  const std::string& state_name(StateId s) const { return names_[static_cast<std::size_t>(s)]; }

  StateId next(StateId from, Letter letter) const {
    return table_[static_cast<std::size_t>(from * alphabet_.size() + letter)];
  }
  int out_degree(StateId s) const;

  /// State reached by reading w from `from`, or kNoState if the path leaves
  /// the automaton.
  StateId run(StateId from, const GroupWord& w) const;
  bool accepts(const GroupWord& w) const { return run(initial_, w) != kNoState; }

  /// States lying on a cycle (the maximal recurrent subgraph).
  std::vector<StateId> recurrent_states() const;
  /// States from which arbitrarily long paths start.
  std::vector<bool> live_states() const;

  /// Number of accepted words of each length 0..radius (saturating at 2^64 - 1).
  std::vector<std::uint64_t> sphere_sizes(int radius) const;

  /// Structural equality up to renaming of states reachable from the initial one.
  bool isomorphic(const GeodesicAutomaton& other) const;

  std::string to_text() const;

 private:
  GeneratorAlphabet alphabet_;
  std::vector<std::string> names_;
  StateId initial_;
  std::vector<StateId> table_;
};

/// Built-in automaton for the free group F_n: the initial state (cone type of
/// the identity) plus one state per last letter.
GeodesicAutomaton free_group_automaton(int rank);

/// Cone type of a geodesic word, i.e. the automaton state it reaches.
StateId cone_type(const GeodesicAutomaton& automaton, const GroupWord& w);
/// eta in C(gamma) for the cone type `state`: eta is readable from `state`.
bool in_cone(const GeodesicAutomaton& automaton, StateId state, const GroupWord& eta);

/// Parses the automaton text format; throws ParseError / ValidationError.
GeodesicAutomaton parse_automaton(std::string_view text);
GeodesicAutomaton load_automaton(const std::string& path);

/// Lexicographic enumeration of the accepted words of length `radius` that
/// start with `prefix` (prefix empty: the whole sphere).
class SphereEnumerator {
 public:
  SphereEnumerator(const GeodesicAutomaton& automaton, int radius, GroupWord prefix = {});

  /// Writes the next word into `out`; returns false when exhausted.
  bool next(GroupWord& out);

 private:
  bool descend();

  const GeodesicAutomaton* automaton_;
  int radius_;
  std::size_t prefix_len_;
  std::vector<Letter> letters_;
  std::vector<StateId> states_;
  bool started_ = false;
  bool done_ = false;
};

std::vector<GroupWord> sphere(const GeodesicAutomaton& automaton, int radius);
std::vector<GroupWord> ball(const GeodesicAutomaton& automaton, int radius);

/// A geodesic ray from the identity, materialized to a finite prefix.
struct BoundaryRay {
  GroupWord prefix;
  std::uint64_t seed = 0;

  std::size_t depth() const { return prefix.size(); }
  /// Ray repeating a cyclically reduced word (its attracting fixed point).
  static BoundaryRay periodic(const GroupWord& period, std::size_t depth);
};

/// Extends `start` by a uniform random walk over live out-edges.
BoundaryRay random_ray(const GeodesicAutomaton& automaton, std::size_t depth, std::uint64_t seed,
                       const GroupWord& start = {});
/// Random ray readable from `state`: its endpoint lies in the cone type at
/// infinity of that state.
BoundaryRay random_ray_in_cone(const GeodesicAutomaton& automaton, StateId state, std::size_t depth,
                               std::uint64_t seed);
std::vector<BoundaryRay> sample_boundary_rays(const GeodesicAutomaton& automaton, std::size_t count,
                                              std::size_t depth, std::uint64_t seed);

/// Lexicographically first label of a path of length k from c1 to c2.
std::optional<GroupWord> nested_pair(const GeodesicAutomaton& automaton, StateId c1, StateId c2, int k);

}  // namespace anosov
