#include "anosov/group.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <sstream>

#include "anosov/error.hpp"

namespace anosov {

GroupWord reduce(const GeneratorAlphabet& alphabet, const std::vector<Letter>& raw) {
  GroupWord out;
  out.letters.reserve(raw.size());
  for (Letter l : raw) {
    if (!alphabet.contains(l)) fail(ErrorKind::UnknownLetter, "letter " + std::to_string(l) + " not in alphabet");
    if (!out.letters.empty() && out.letters.back() == inverse_letter(l)) {
      out.letters.pop_back();
    } else {
      out.letters.push_back(l);
    }
  }
  return out;
}

GroupWord inverse(const GroupWord& w) {
  GroupWord out;
  out.letters.reserve(w.size());
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) out.letters.push_back(inverse_letter(*it));
  return out;
}

GroupWord multiply(const GeneratorAlphabet& alphabet, const GroupWord& u, const GroupWord& v) {
  std::vector<Letter> raw = u.letters;
  raw.insert(raw.end(), v.letters.begin(), v.letters.end());
  return reduce(alphabet, raw);
}

std::string format_word(const GroupWord& w) {
  if (w.empty()) return "e";
  std::string s;
  s.reserve(w.size());
  for (Letter l : w.letters) {
    const char base = static_cast<char>('a' + l / 2);
    s.push_back(l % 2 == 0 ? base : static_cast<char>(base - 'a' + 'A'));
  }
  return s;
}

GroupWord parse_word(const GeneratorAlphabet& alphabet, std::string_view text) {
  if (text == "e") return {};
  std::vector<Letter> raw;
  for (char c : text) {
    Letter l = -1;
    if (c >= 'a' && c <= 'z') l = 2 * (c - 'a');
    if (c >= 'A' && c <= 'Z') l = 2 * (c - 'A') + 1;
    if (l < 0 || !alphabet.contains(l)) fail(ErrorKind::UnknownLetter, std::string("bad letter '") + c + "'");
    raw.push_back(l);
  }
  return reduce(alphabet, raw);
}

namespace {

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

}  // namespace

// ---------------------------------------------------------------------------

GeodesicAutomaton::GeodesicAutomaton(GeneratorAlphabet alphabet, std::vector<std::string> state_names,
                                     StateId initial)
    : alphabet_(alphabet), names_(std::move(state_names)), initial_(initial) {
  if (initial_ < 0 || initial_ >= state_count()) fail(ErrorKind::ValidationError, "initial state out of range");
  table_.assign(names_.size() * static_cast<std::size_t>(alphabet_.size()), kNoState);
}

void GeodesicAutomaton::add_edge(StateId from, Letter letter, StateId to) {
  if (from < 0 || from >= state_count() || to < 0 || to >= state_count()) {
    fail(ErrorKind::ValidationError, "edge references an unknown state");
  }
  if (!alphabet_.contains(letter)) {
    fail(ErrorKind::ValidationError, "edge letter " + std::to_string(letter + 1) + " outside the alphabet");
  }
  auto& slot = table_[static_cast<std::size_t>(from * alphabet_.size() + letter)];
  if (slot != kNoState) {
    fail(ErrorKind::ValidationError,
         "duplicate edge from state '" + state_name(from) + "' with letter " + std::to_string(letter + 1));
  }
  slot = to;
}

int GeodesicAutomaton::out_degree(StateId s) const {
  int n = 0;
  for (Letter l = 0; l < alphabet_.size(); ++l) n += next(s, l) != kNoState;
  return n;
}

StateId GeodesicAutomaton::run(StateId from, const GroupWord& w) const {
  StateId s = from;
  for (Letter l : w.letters) {
    if (!alphabet_.contains(l)) return kNoState;
    s = next(s, l);
    if (s == kNoState) return kNoState;
  }
  return s;
}

std::vector<StateId> GeodesicAutomaton::recurrent_states() const {
  const int n = state_count();
  std::vector<StateId> out;
  for (StateId s = 0; s < n; ++s) {
    // s is recurrent iff it is reachable from one of its successors.
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::queue<StateId> q;
    for (Letter l = 0; l < alphabet_.size(); ++l) {
      const StateId t = next(s, l);
      if (t != kNoState && !seen[static_cast<std::size_t>(t)]) {
        seen[static_cast<std::size_t>(t)] = true;
        q.push(t);
      }
    }
    while (!q.empty()) {
      const StateId u = q.front();
      q.pop();
      for (Letter l = 0; l < alphabet_.size(); ++l) {
        const StateId t = next(u, l);
        if (t != kNoState && !seen[static_cast<std::size_t>(t)]) {
          seen[static_cast<std::size_t>(t)] = true;
          q.push(t);
        }
      }
    }
    if (seen[static_cast<std::size_t>(s)]) out.push_back(s);
  }
  return out;
}

std::vector<bool> GeodesicAutomaton::live_states() const {
  const int n = state_count();
  std::vector<bool> live(static_cast<std::size_t>(n), false);
  for (StateId s : recurrent_states()) live[static_cast<std::size_t>(s)] = true;
  // Backward closure: a state is live if some edge leads to a live state.
  bool changed = true;
  while (changed) {
    changed = false;
    for (StateId s = 0; s < n; ++s) {
      if (live[static_cast<std::size_t>(s)]) continue;
      for (Letter l = 0; l < alphabet_.size(); ++l) {
        const StateId t = next(s, l);
        if (t != kNoState && live[static_cast<std::size_t>(t)]) {
          live[static_cast<std::size_t>(s)] = true;
          changed = true;
          break;
        }
      }
    }
  }
  return live;
}

std::vector<std::uint64_t> GeodesicAutomaton::sphere_sizes(int radius) const {
  std::vector<std::uint64_t> sizes;
  std::vector<std::uint64_t> count(static_cast<std::size_t>(state_count()), 0);
  count[static_cast<std::size_t>(initial_)] = 1;
  for (int k = 0; k <= radius; ++k) {
    std::uint64_t total = 0;
    for (auto c : count) total = saturating_add(total, c);
    sizes.push_back(total);
    std::vector<std::uint64_t> nxt(count.size(), 0);
    for (StateId s = 0; s < state_count(); ++s) {
      if (count[static_cast<std::size_t>(s)] == 0) continue;
      for (Letter l = 0; l < alphabet_.size(); ++l) {
        const StateId t = next(s, l);
        if (t != kNoState) {
          auto& slot = nxt[static_cast<std::size_t>(t)];
          slot = saturating_add(slot, count[static_cast<std::size_t>(s)]);
        }
      }
    }
    count = std::move(nxt);
  }
  return sizes;
}

bool GeodesicAutomaton::isomorphic(const GeodesicAutomaton& other) const {
  if (alphabet_.rank != other.alphabet_.rank) return false;
  std::vector<StateId> map_a(static_cast<std::size_t>(state_count()), kNoState);
  std::vector<StateId> map_b(static_cast<std::size_t>(other.state_count()), kNoState);
  std::queue<std::pair<StateId, StateId>> q;
  map_a[static_cast<std::size_t>(initial_)] = other.initial_;
  map_b[static_cast<std::size_t>(other.initial_)] = initial_;
  q.emplace(initial_, other.initial_);
  while (!q.empty()) {
    const auto [a, b] = q.front();
    q.pop();
    for (Letter l = 0; l < alphabet_.size(); ++l) {
      const StateId ta = next(a, l);
      const StateId tb = other.next(b, l);
      if ((ta == kNoState) != (tb == kNoState)) return false;
      if (ta == kNoState) continue;
      const StateId ma = map_a[static_cast<std::size_t>(ta)];
      const StateId mb = map_b[static_cast<std::size_t>(tb)];
      if (ma == kNoState && mb == kNoState) {
        map_a[static_cast<std::size_t>(ta)] = tb;
        map_b[static_cast<std::size_t>(tb)] = ta;
        q.emplace(ta, tb);
      } else if (ma != tb || mb != ta) {
        return false;
      }
    }
  }
  return true;
}

std::string GeodesicAutomaton::to_text() const {
  std::ostringstream os;
  os << "alphabet n=" << alphabet_.rank << "\n";
  for (const auto& name : names_) os << "state " << name << "\n";
  os << "initial " << names_[static_cast<std::size_t>(initial_)] << "\n";
  for (StateId s = 0; s < state_count(); ++s) {
    for (Letter l = 0; l < alphabet_.size(); ++l) {
      const StateId t = next(s, l);
      if (t != kNoState) os << "edge " << state_name(s) << " " << (l + 1) << " " << state_name(t) << "\n";
    }
  }
  return os.str();
}

GeodesicAutomaton free_group_automaton(int rank) {
  if (rank < 1 || rank > 26) fail(ErrorKind::InvalidArgument, "free group rank must be in [1, 26]");
  const GeneratorAlphabet alphabet{rank};
  std::vector<std::string> names{"e"};
  for (Letter l = 0; l < alphabet.size(); ++l) names.push_back(format_word(GroupWord{{l}}));
  GeodesicAutomaton a(alphabet, std::move(names), 0);
  for (Letter l = 0; l < alphabet.size(); ++l) a.add_edge(0, l, l + 1);
  for (Letter from = 0; from < alphabet.size(); ++from) {
    for (Letter l = 0; l < alphabet.size(); ++l) {
      if (l != inverse_letter(from)) a.add_edge(from + 1, l, l + 1);
    }
  }
  return a;
}

StateId cone_type(const GeodesicAutomaton& automaton, const GroupWord& w) {
  const StateId s = automaton.run(automaton.initial(), w);
  if (s == kNoState) fail(ErrorKind::InvalidArgument, "word " + format_word(w) + " is not geodesic");
  return s;
}

bool in_cone(const GeodesicAutomaton& automaton, StateId state, const GroupWord& eta) {
  return automaton.run(state, eta) != kNoState;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

int parse_int(const std::string& tok, int line_no) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected an integer, got '" + tok + "'");
  }
}

}  // namespace

GeodesicAutomaton parse_automaton(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  int line_no = 0;
  int rank = -1;
  std::vector<std::string> names;
  std::map<std::string, StateId> ids;
  std::string initial;
  struct PendingEdge {
    std::string from;
    int letter;
    std::string to;
    int line;
  };
  std::vector<PendingEdge> edges;

  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    const auto where = "line " + std::to_string(line_no) + ": ";
    if (tok[0] == "alphabet") {
      if (tok.size() != 2 || tok[1].rfind("n=", 0) != 0) fail(ErrorKind::ParseError, where + "expected 'alphabet n=<int>'");
      rank = parse_int(tok[1].substr(2), line_no);
    } else if (tok[0] == "state") {
      if (tok.size() != 2) fail(ErrorKind::ParseError, where + "expected 'state <id>'");
      if (ids.count(tok[1])) fail(ErrorKind::ValidationError, where + "state '" + tok[1] + "' declared twice");
      ids[tok[1]] = static_cast<StateId>(names.size());
      names.push_back(tok[1]);
    } else if (tok[0] == "initial") {
      if (tok.size() != 2) fail(ErrorKind::ParseError, where + "expected 'initial <id>'");
      initial = tok[1];
    } else if (tok[0] == "edge") {
      if (tok.size() != 4) fail(ErrorKind::ParseError, where + "expected 'edge <src> <letter> <dst>'");
      edges.push_back({tok[1], parse_int(tok[2], line_no), tok[3], line_no});
    } else {
      fail(ErrorKind::ParseError, where + "unknown directive '" + tok[0] + "'");
    }
  }
  if (rank < 1) fail(ErrorKind::ValidationError, "missing or invalid alphabet header");
  if (initial.empty()) fail(ErrorKind::ValidationError, "missing initial state");
  if (!ids.count(initial)) fail(ErrorKind::ValidationError, "initial state '" + initial + "' not declared");

  GeodesicAutomaton a(GeneratorAlphabet{rank}, names, ids.at(initial));
  for (const auto& e : edges) {
    const auto where = "line " + std::to_string(e.line) + ": ";
    if (!ids.count(e.from) || !ids.count(e.to)) {
      fail(ErrorKind::ValidationError, where + "edge references undeclared state");
    }
    if (e.letter < 1 || e.letter > 2 * rank) fail(ErrorKind::ValidationError, where + "letter index out of range");
    try {
      a.add_edge(ids.at(e.from), e.letter - 1, ids.at(e.to));
    } catch (const Error& err) {
      fail(ErrorKind::ValidationError, where + err.what());
    }
  }
  return a;
}

GeodesicAutomaton load_automaton(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open automaton file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_automaton(buf.str());
}

// ---------------------------------------------------------------------------

SphereEnumerator::SphereEnumerator(const GeodesicAutomaton& automaton, int radius, GroupWord prefix)
    : automaton_(&automaton), radius_(radius), prefix_len_(prefix.size()), letters_(std::move(prefix.letters)) {
  if (radius < 0) fail(ErrorKind::InvalidArgument, "negative radius");
  states_.push_back(automaton.initial());
  for (Letter l : letters_) {
    const StateId s = states_.back() == kNoState ? kNoState : automaton.next(states_.back(), l);
    states_.push_back(s);
  }
  if (states_.back() == kNoState || static_cast<int>(prefix_len_) > radius_) done_ = true;
}

// Extends the current partial word with the smallest letters possible until it
// reaches the radius; backtracks on dead ends.  Returns false when exhausted.
bool SphereEnumerator::descend() {
  const int n = automaton_->alphabet().size();
  Letter start = 0;
  while (true) {
    if (static_cast<int>(letters_.size()) == radius_) return true;
    bool advanced = false;
    for (Letter l = start; l < n; ++l) {
      const StateId t = automaton_->next(states_.back(), l);
      if (t != kNoState) {
        letters_.push_back(l);
        states_.push_back(t);
        advanced = true;
        break;
      }
    }
    if (advanced) {
      start = 0;
      continue;
    }
    if (letters_.size() <= prefix_len_) return false;
    start = letters_.back() + 1;
    letters_.pop_back();
    states_.pop_back();
  }
}

bool SphereEnumerator::next(GroupWord& out) {
  if (done_) return false;
  if (!started_) {
    started_ = true;
    if (!descend()) {
      done_ = true;
      return false;
    }
  } else {
    if (letters_.size() <= prefix_len_) {
      done_ = true;
      return false;
    }
    // Step to the lexicographic successor.
    const Letter last = letters_.back();
    letters_.pop_back();
    states_.pop_back();
    const int n = automaton_->alphabet().size();
    bool found = false;
    for (Letter l = last + 1; l < n && !found; ++l) {
      const StateId t = automaton_->next(states_.back(), l);
      if (t != kNoState) {
        letters_.push_back(l);
        states_.push_back(t);
        found = true;
      }
    }
    if (!found) {
      // Backtrack further.
      while (true) {
        if (letters_.size() <= prefix_len_) {
          done_ = true;
          return false;
        }
        const Letter prev = letters_.back();
        letters_.pop_back();
        states_.pop_back();
        for (Letter l = prev + 1; l < n && !found; ++l) {
          const StateId t = automaton_->next(states_.back(), l);
          if (t != kNoState) {
            letters_.push_back(l);
            states_.push_back(t);
            found = true;
          }
        }
        if (found) break;
      }
    }
    if (!descend()) {
      done_ = true;
      return false;
    }
  }
  out.letters = letters_;
  return true;
}

std::vector<GroupWord> sphere(const GeodesicAutomaton& automaton, int radius) {
  std::vector<GroupWord> out;
  SphereEnumerator it(automaton, radius);
  GroupWord w;
  while (it.next(w)) out.push_back(w);
  return out;
}

std::vector<GroupWord> ball(const GeodesicAutomaton& automaton, int radius) {
  std::vector<GroupWord> out;
  for (int k = 0; k <= radius; ++k) {
    auto s = sphere(automaton, k);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

// ---------------------------------------------------------------------------

BoundaryRay BoundaryRay::periodic(const GroupWord& period, std::size_t depth) {
  if (period.empty()) fail(ErrorKind::InvalidArgument, "empty period");
  if (period.size() > 1 && period.letters.front() == inverse_letter(period.letters.back())) {
    fail(ErrorKind::InvalidArgument, "period " + format_word(period) + " is not cyclically reduced");
  }
  BoundaryRay ray;
  ray.prefix.letters.reserve(depth);
  for (std::size_t i = 0; i < depth; ++i) ray.prefix.letters.push_back(period.letters[i % period.size()]);
  return ray;
}

namespace {

BoundaryRay walk(const GeodesicAutomaton& automaton, StateId s, std::size_t depth, std::uint64_t seed,
                 const GroupWord& start) {
  const auto live = automaton.live_states();
  BoundaryRay ray;
  ray.seed = seed;
  ray.prefix = start;
  std::mt19937_64 rng(seed);
  std::vector<Letter> options;
  while (ray.prefix.size() < depth) {
    options.clear();
    for (Letter l = 0; l < automaton.alphabet().size(); ++l) {
      const StateId t = automaton.next(s, l);
      if (t != kNoState && live[static_cast<std::size_t>(t)]) options.push_back(l);
    }
    if (options.empty()) fail(ErrorKind::InvalidArgument, "automaton has no infinite paths from this state");
    std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
    const Letter l = options[pick(rng)];
    ray.prefix.letters.push_back(l);
    s = automaton.next(s, l);
  }
  ray.prefix.letters.resize(std::max(depth, start.size()));
  return ray;
}

}  // namespace

BoundaryRay random_ray(const GeodesicAutomaton& automaton, std::size_t depth, std::uint64_t seed,
                       const GroupWord& start) {
  const StateId s = automaton.run(automaton.initial(), start);
  if (s == kNoState) fail(ErrorKind::InvalidArgument, "ray start " + format_word(start) + " is not geodesic");
  return walk(automaton, s, depth, seed, start);
}

BoundaryRay random_ray_in_cone(const GeodesicAutomaton& automaton, StateId state, std::size_t depth,
                               std::uint64_t seed) {
  if (state < 0 || state >= automaton.state_count()) fail(ErrorKind::InvalidArgument, "unknown state");
  return walk(automaton, state, depth, seed, {});
}

std::vector<BoundaryRay> sample_boundary_rays(const GeodesicAutomaton& automaton, std::size_t count,
                                              std::size_t depth, std::uint64_t seed) {
  if (depth < 1) fail(ErrorKind::InvalidArgument, "ray depth must be at least 1");
  std::mt19937_64 master(seed);
  std::vector<BoundaryRay> rays;
  rays.reserve(count);
  for (std::size_t i = 0; i < count; ++i) rays.push_back(random_ray(automaton, depth, master()));
  return rays;
}

std::optional<GroupWord> nested_pair(const GeodesicAutomaton& automaton, StateId c1, StateId c2, int k) {
  if (k < 1) fail(ErrorKind::InvalidArgument, "nesting length must be at least 1");
  const int n = automaton.state_count();
  // reach[j][s]: a path of length j leads from s to c2.
  std::vector<std::vector<bool>> reach(static_cast<std::size_t>(k + 1), std::vector<bool>(static_cast<std::size_t>(n)));
  reach[0][static_cast<std::size_t>(c2)] = true;
  for (int j = 1; j <= k; ++j) {
    for (StateId s = 0; s < n; ++s) {
      for (Letter l = 0; l < automaton.alphabet().size(); ++l) {
        const StateId t = automaton.next(s, l);
        if (t != kNoState && reach[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(t)]) {
          reach[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)] = true;
          break;
        }
      }
    }
  }
  if (!reach[static_cast<std::size_t>(k)][static_cast<std::size_t>(c1)]) return std::nullopt;
  GroupWord beta;
  StateId s = c1;
  for (int j = k; j >= 1; --j) {
    for (Letter l = 0; l < automaton.alphabet().size(); ++l) {
      const StateId t = automaton.next(s, l);
      if (t != kNoState && reach[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(t)]) {
        beta.letters.push_back(l);
        s = t;
        break;
      }
    }
  }
  return beta;
}

}  // namespace anosov
