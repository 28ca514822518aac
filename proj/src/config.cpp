#include "anosov/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "anosov/error.hpp"
#include "anosov/sl2.hpp"

namespace anosov {

namespace {

struct SyntaxError {
  std::size_t offset;
  std::string message;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

constexpr std::string_view kCompose = "\xE2\x88\x98";  // U+2218

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    Expr e = expr();
    skip();
    if (pos_ != text_.size()) throw SyntaxError{pos_, "unexpected trailing input"};
    return e;
  }

  double number_all() {
    const double v = sum();
    skip();
    if (pos_ != text_.size()) throw SyntaxError{pos_, "unexpected trailing input"};
    return v;
  }

 private:
  void skip() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  bool accept(std::string_view token) {
    skip();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view token) {
    if (!accept(token)) throw SyntaxError{pos_, "expected '" + std::string(token) + "'"};
  }

  std::string identifier() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  Expr expr() {
    skip();
    if (accept("(")) {
      Expr e = expr();
      expect(")");
      return e;
    }
    const std::size_t at = pos_;
    const std::string name = identifier();
    Expr e;
    if (name == "schottky") {
      e.kind = Expr::Kind::Schottky;
      expect("(");
      e.numbers.push_back(sum());
      expect(",");
      e.numbers.push_back(sum());
      expect(")");
    } else if (name == "irr") {
      e.kind = Expr::Kind::Irr;
      expect("(");
      e.numbers.push_back(integer());
      expect(")");
      if (!accept(kCompose) && !accept("*")) throw SyntaxError{pos_, "expected '∘' after irr(d)"};
      e.args.push_back(expr());
    } else if (name == "wedge" || name == "sym" || name == "restrict") {
      e.kind = name == "wedge" ? Expr::Kind::Wedge : name == "sym" ? Expr::Kind::Sym : Expr::Kind::Restrict;
      expect("(");
      e.numbers.push_back(integer());
      expect(",");
      e.args.push_back(expr());
      expect(")");
    } else if (name == "sum") {
      e.kind = Expr::Kind::Sum;
      expect("(");
      e.args.push_back(expr());
      expect(",");
      e.args.push_back(expr());
      expect(")");
    } else if (name == "perturb") {
      e.kind = Expr::Kind::Perturb;
      expect("(");
      e.numbers.push_back(sum());
      expect(",");
      e.numbers.push_back(integer());
      expect(",");
      e.args.push_back(expr());
      expect(")");
    } else if (name == "trivial") {
      e.kind = Expr::Kind::Trivial;
      expect("(");
      e.numbers.push_back(integer());
      expect(")");
    } else {
      throw SyntaxError{at, name.empty() ? "expected a construction" : "unknown construction '" + name + "'"};
    }
    return e;
  }

  double integer() {
    skip();
    const std::size_t at = pos_;
    const double v = sum();
    if (v != std::floor(v) || std::abs(v) > 9007199254740992.0) throw SyntaxError{at, "expected an integer"};
    return v;
  }

  double sum() {
    double v = product();
    for (;;) {
      if (accept("+"))
        v += product();
      else if (accept("-"))
        v -= product();
      else
        return v;
    }
  }

  double product() {
    double v = unary();
    for (;;) {
      if (accept("*"))
        v *= unary();
      else if (accept("/"))
        v /= unary();
      else
        return v;
    }
  }

  double unary() {
    if (accept("-")) return -unary();
    if (accept("+")) return unary();
    return primary();
  }

  double primary() {
    skip();
    if (accept("(")) {
      const double v = sum();
      expect(")");
      return v;
    }
    if (accept("pi")) return std::numbers::pi;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    double v = 0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr == first) throw SyntaxError{pos_, "expected a number"};
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

[[noreturn]] void parse_error(std::size_t line, std::size_t column, const std::string& msg) {
  fail(ErrorKind::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg);
}

[[noreturn]] void invalid(const std::string& field, const std::string& msg) {
  fail(ErrorKind::ValidationError, field + ": " + msg);
}

struct ParamSpec {
  std::string key;
  double fallback;
  bool integer;
  bool optional;
};

const std::map<std::string, std::vector<ParamSpec>>& command_schemas() {
  static const std::map<std::string, std::vector<ParamSpec>> schemas = {
      {"certify", {{"p", 1, true, false}, {"R", 10, true, false}, {"mu_min", kDefaultMuMin, false, false}}},
      {"exponent", {{"R", 10, true, false}}},
      {"dimension",
       {{"points", 10000, true, false},
        {"depth", 30, true, false},
        {"tol", 1e-7, false, false},
        {"scales", 40, true, false},
        {"R", 10, true, false}}},
      {"hyperconvex-scan",
       {{"p", 1, true, false},
        {"q", 1, true, false},
        {"r", 2, true, false},
        {"triples", 1000, true, false},
        {"depth", 30, true, false},
        {"separation", 0.05, false, false},
        {"tol", 1e-7, false, false},
        {"R", 10, true, false}}},
      {"convergence-profile",
       {{"p", 1, true, false},
        {"q", 1, true, false},
        {"r", 2, true, false},
        {"steps", 20, true, false},
        {"R", 10, true, false}}},
      {"shadow-check",
       {{"R", 10, true, false},
        {"max_eta", 3, true, false},
        {"L", 6, true, false},
        {"geodesics", 200, true, false},
        {"points", 2000, true, false},
        {"depth", 30, true, false},
        {"tol", 1e-7, false, false},
        {"s", 0, false, true}}},
      {"boundary-export",
       {{"p", 1, true, false},
        {"points", 1000, true, false},
        {"depth", 30, true, false},
        {"tol", 1e-7, false, false},
        {"R", 10, true, false}}},
  };
  return schemas;
}

const ParamSpec* find_param(const std::string& command, const std::string& key) {
  const auto& schema = command_schemas().at(command);
  for (const auto& spec : schema)
    if (spec.key == key) return &spec;
  return nullptr;
}

Eigen::MatrixXd parse_matrix(std::string_view text, std::size_t& bad_offset) {
  std::vector<std::vector<double>> rows;
  std::size_t offset = 0;
  while (true) {
    const std::size_t semi = text.find(';', offset);
    const std::string_view row = text.substr(offset, semi == std::string_view::npos ? std::string_view::npos : semi - offset);
    std::vector<double> entries;
    std::size_t i = 0;
    while (i < row.size()) {
      while (i < row.size() && is_space(row[i])) ++i;
      if (i == row.size()) break;
      std::size_t j = i;
      while (j < row.size() && !is_space(row[j])) ++j;
      try {
        entries.push_back(parse_number(row.substr(i, j - i)));
      } catch (const Error&) {
        bad_offset = offset + i;
        throw;
      }
      i = j;
    }
    rows.push_back(std::move(entries));
    if (semi == std::string_view::npos) break;
    offset = semi + 1;
  }
  const auto n = rows.size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    if (rows[r].size() != n) {
      bad_offset = 0;
      fail(ErrorKind::ParseError, "generator matrix must be square");
    }
    for (std::size_t c = 0; c < n; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  return m;
}

std::string format_matrix(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (r > 0) out += "; ";
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out += ' ';
      out += format_number(m(r, c));
    }
  }
  return out;
}

std::uint64_t parse_unsigned(std::string_view text, std::size_t line, std::size_t column) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) parse_error(line, column, "expected a non-negative integer");
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------

Expr parse_expr(std::string_view text) {
  try {
    return ExprParser(text).parse_all();
  } catch (const SyntaxError& e) {
    fail(ErrorKind::ParseError, "column " + std::to_string(e.offset + 1) + ": " + e.message);
  }
}

double parse_number(std::string_view text) {
  try {
    return ExprParser(text).number_all();
  } catch (const SyntaxError& e) {
    fail(ErrorKind::ParseError, "column " + std::to_string(e.offset + 1) + ": " + e.message);
  }
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string format_expr(const Expr& e) {
  auto num = [&](std::size_t i) { return format_number(e.numbers[i]); };
  switch (e.kind) {
    case Expr::Kind::Schottky:
      return "schottky(" + num(0) + ", " + num(1) + ")";
    case Expr::Kind::Irr:
      return "irr(" + num(0) + ") ∘ " + format_expr(e.args[0]);
    case Expr::Kind::Wedge:
      return "wedge(" + num(0) + ", " + format_expr(e.args[0]) + ")";
    case Expr::Kind::Sym:
      return "sym(" + num(0) + ", " + format_expr(e.args[0]) + ")";
    case Expr::Kind::Sum:
      return "sum(" + format_expr(e.args[0]) + ", " + format_expr(e.args[1]) + ")";
    case Expr::Kind::Perturb:
      return "perturb(" + num(0) + ", " + num(1) + ", " + format_expr(e.args[0]) + ")";
    case Expr::Kind::Trivial:
      return "trivial(" + num(0) + ")";
    case Expr::Kind::Restrict:
      return "restrict(" + num(0) + ", " + format_expr(e.args[0]) + ")";
  }
  return {};
}

Representation build_expr(const Expr& e, int rank) {
  auto n = [&](std::size_t i) { return static_cast<int>(e.numbers[i]); };
  switch (e.kind) {
    case Expr::Kind::Schottky:
      return schottky_fuchsian(e.numbers[0], e.numbers[1]);
    case Expr::Kind::Irr: {
      Representation inner = build_expr(e.args[0], rank);
      if (inner.dim() != 2) invalid("representation", "irr(d) needs a two-dimensional argument");
      if (n(0) < 2) invalid("representation", "irr(d) needs d >= 2");
      return irreducible(n(0), inner);
    }
    case Expr::Kind::Wedge: {
      Representation inner = build_expr(e.args[0], rank);
      if (n(0) < 1 || n(0) > inner.dim()) invalid("representation", "wedge degree outside [1, d]");
      return exterior_power(inner, n(0));
    }
    case Expr::Kind::Sym:
      if (n(0) < 1) invalid("representation", "sym degree must be positive");
      return symmetric_power(build_expr(e.args[0], rank), n(0));
    case Expr::Kind::Sum:
      return direct_sum(build_expr(e.args[0], rank), build_expr(e.args[1], rank));
    case Expr::Kind::Perturb:
      if (e.numbers[0] < 0 || e.numbers[1] < 0) invalid("representation", "perturb needs eps >= 0 and seed >= 0");
      return perturb(build_expr(e.args[0], rank), e.numbers[0], static_cast<std::uint64_t>(e.numbers[1]));
    case Expr::Kind::Trivial:
      if (n(0) < 1) invalid("representation", "trivial(d) needs d >= 1");
      return trivial_representation(rank, n(0));
    case Expr::Kind::Restrict: {
      Representation inner = build_expr(e.args[0], rank);
      if (n(0) < 1 || n(0) > inner.rank()) invalid("representation", "restrict(n, ...) needs 1 <= n <= rank");
      return restrict_generators(inner, n(0));
    }
  }
  invalid("representation", "unknown construction");
}

// ---------------------------------------------------------------------------

double PipelineStep::get(const std::string& key) const {
  auto it = params.find(key);
  if (it != params.end()) return it->second;
  const ParamSpec* spec = find_param(command, key);
  if (!spec || spec->optional) fail(ErrorKind::ValidationError, "pipeline." + std::to_string(index) + "." + key + ": not set");
  return spec->fallback;
}

int PipelineStep::get_int(const std::string& key) const { return static_cast<int>(get(key)); }

const std::vector<std::string>& pipeline_commands() {
  static const std::vector<std::string> order = {"certify",        "exponent",       "dimension",      "hyperconvex-scan",
                                                 "convergence-profile", "shadow-check", "boundary-export"};
  return order;
}

RunConfig parse_config(std::string_view text, const std::string& base_dir) {
  RunConfig cfg;
  cfg.base_dir = base_dir;
  std::string section;
  std::set<std::string> seen_sections;
  std::set<std::string> seen_keys;
  std::map<int, PipelineStep> steps;
  std::map<int, Eigen::MatrixXd> generators;
  std::map<int, std::map<std::string, std::pair<std::size_t, std::size_t>>> locations;
  bool have_free = false, have_automaton = false;

  std::size_t line_no = 0;
  std::size_t offset = 0;
  while (offset <= text.size()) {
    const std::size_t nl = text.find('\n', offset);
    std::string_view raw = text.substr(offset, nl == std::string_view::npos ? std::string_view::npos : nl - offset);
    offset = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const std::size_t indent = static_cast<std::size_t>(line.data() - raw.data());

    if (line.front() == '[') {
      if (line.back() != ']') parse_error(line_no, indent + line.size(), "expected ']'");
      const std::string name(trim(line.substr(1, line.size() - 2)));
      if (name == "group" || name == "representation" || name == "budgets") {
        section = name;
      } else if (name.rfind("pipeline.", 0) == 0) {
        int idx = 0;
        const std::string_view digits = std::string_view(name).substr(9);
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), idx);
        if (ec != std::errc() || ptr != digits.data() + digits.size() || idx < 1) {
          parse_error(line_no, indent + 2, "pipeline sections are [pipeline.N] with N >= 1");
        }
        section = name;
        steps[idx].index = idx;
      } else {
        parse_error(line_no, indent + 2, "unknown section '" + name + "'");
      }
      if (!seen_sections.insert(section).second) parse_error(line_no, indent + 1, "duplicate section [" + section + "]");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) parse_error(line_no, indent + 1, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value_raw = line.substr(eq + 1);
    const std::string_view value = trim(value_raw);
    const std::size_t key_col = indent + 1;
    const std::size_t value_col = indent + eq + 2 + static_cast<std::size_t>(value.data() - value_raw.data());
    if (key.empty()) parse_error(line_no, key_col, "missing key");
    if (value.empty()) parse_error(line_no, value_col, "missing value for '" + key + "'");
    if (!seen_keys.insert(section + "/" + key).second) parse_error(line_no, key_col, "duplicate key '" + key + "'");

    auto number = [&](std::string_view v) {
      try {
        return parse_number(v);
      } catch (const Error& e) {
        parse_error(line_no, value_col, e.what());
      }
    };
    auto unknown = [&] { parse_error(line_no, key_col, "unknown key '" + key + "'"); };

    if (section.empty()) {
      if (key != "seed") unknown();
      cfg.seed = parse_unsigned(value, line_no, value_col);
    } else if (section == "group") {
      if (key == "free") {
        const double r = number(value);
        if (r != std::floor(r) || r < 1) parse_error(line_no, value_col, "free rank must be a positive integer");
        cfg.group.free_rank = static_cast<int>(r);
        have_free = true;
      } else if (key == "automaton") {
        cfg.group.automaton_path = std::string(value);
        have_automaton = true;
      } else {
        unknown();
      }
    } else if (section == "representation") {
      if (key == "expr") {
        try {
          cfg.representation.expr = parse_expr(value);
        } catch (const Error& e) {
          // Messages from parse_expr carry a column relative to the value.
          const std::string msg = e.what();
          std::size_t col = 1;
          if (const auto at = msg.find("column "); at != std::string::npos) col = std::stoul(msg.substr(at + 7));
          const auto colon = msg.find(": ", msg.find("column "));
          parse_error(line_no, value_col + col - 1, colon == std::string::npos ? msg : msg.substr(colon + 2));
        }
      } else if (key.rfind("generator.", 0) == 0) {
        int idx = 0;
        const std::string_view digits = std::string_view(key).substr(10);
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), idx);
        if (ec != std::errc() || ptr != digits.data() + digits.size() || idx < 1) unknown();
        std::size_t bad = 0;
        try {
          generators[idx] = parse_matrix(value, bad);
        } catch (const Error& e) {
          parse_error(line_no, value_col + bad, e.what());
        }
      } else {
        unknown();
      }
    } else if (section == "budgets") {
      if (key == "max_ball") {
        cfg.budgets.max_ball = parse_unsigned(value, line_no, value_col);
      } else if (key == "max_triples") {
        cfg.budgets.max_triples = parse_unsigned(value, line_no, value_col);
      } else if (key == "wall_clock_hint") {
        cfg.budgets.wall_clock_hint = number(value);
      } else {
        unknown();
      }
    } else {
      const int idx = std::stoi(section.substr(9));
      PipelineStep& step = steps[idx];
      if (key == "command") {
        const std::string cmd(value);
        if (!command_schemas().count(cmd)) parse_error(line_no, value_col, "unknown command '" + cmd + "'");
        step.command = cmd;
      } else {
        // Parameters are checked against the schema once the command is known.
        step.params[key] = number(value);
        locations[idx][key] = {line_no, key_col};
      }
    }
  }

  // Unknown parameters are syntax errors and are reported before validation.
  for (const auto& [idx, step] : steps)
    for (const auto& [key, v] : step.params)
      if (!step.command.empty() && !find_param(step.command, key)) {
        const auto [line, col] = locations[idx].at(key);
        parse_error(line, col, "unknown key '" + key + "' for command " + step.command);
      }

  if (have_free == have_automaton) invalid("group", "set exactly one of 'free' and 'automaton'");
  if (!cfg.representation.expr && generators.empty()) invalid("representation", "missing 'expr' or 'generator.N'");
  if (cfg.representation.expr && !generators.empty()) invalid("representation", "'expr' and 'generator.N' are exclusive");
  int expected = 1;
  for (auto& [idx, m] : generators) {
    if (idx != expected++) invalid("representation.generator." + std::to_string(idx), "generators must be numbered 1..n");
    cfg.representation.generators.push_back(m);
  }

  for (auto& [idx, step] : steps) {
    const std::string field = "pipeline." + std::to_string(idx);
    if (step.command.empty()) invalid(field + ".command", "missing");
    std::map<std::string, double> params;
    for (const auto& [key, v] : step.params) {
      const ParamSpec* spec = find_param(step.command, key);
      if (spec->integer && (v != std::floor(v) || v < 0)) invalid(field + "." + key, "expected a non-negative integer");
      params[key] = v;
    }
    for (const auto& spec : command_schemas().at(step.command))
      if (!spec.optional && !params.count(spec.key)) params[spec.key] = spec.fallback;
    step.params = std::move(params);

    for (const char* k : {"p", "q", "r"})
      if (step.has(k) && step.get(k) < 1) invalid(field + "." + k, "must be at least 1");
    if (step.has("R") && step.get_int("R") < (step.command == "exponent" ? 2 : 4)) {
      invalid(field + ".R", step.command == "exponent" ? "must be at least 2" : "must be at least 4");
    }
    if (step.has("tol") && !(step.get("tol") > 0)) invalid(field + ".tol", "must be positive");
    if (step.has("separation") && !(step.get("separation") >= 0)) invalid(field + ".separation", "must be non-negative");
    if (step.command == "dimension" && step.get_int("points") < 100) invalid(field + ".points", "must be at least 100");
    if (step.command == "hyperconvex-scan") {
      if (step.get_int("p") + step.get_int("q") > step.get_int("r")) invalid(field, "needs p + q <= r");
      if (step.get("triples") > static_cast<double>(cfg.budgets.max_triples)) {
        invalid(field + ".triples", "exceeds budgets.max_triples");
      }
    }
    if (step.command == "convergence-profile" && step.get_int("p") + step.get_int("q") > step.get_int("r")) {
      invalid(field, "needs p + q <= r");
    }
    if (step.command == "shadow-check" && (step.get_int("max_eta") < 1 || step.get_int("L") < 1)) {
      invalid(field, "max_eta and L must be at least 1");
    }
    cfg.pipeline.push_back(std::move(step));
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(buf.str(), dir.empty() ? "." : dir.string());
}

std::string emit_config(const RunConfig& c) {
  std::ostringstream out;
  out << "seed = " << c.seed << "\n\n[group]\n";
  if (c.group.automaton_path.empty())
    out << "free = " << c.group.free_rank << "\n";
  else
    out << "automaton = " << c.group.automaton_path << "\n";
  out << "\n[representation]\n";
  if (c.representation.expr) {
    out << "expr = " << format_expr(*c.representation.expr) << "\n";
  } else {
    for (std::size_t i = 0; i < c.representation.generators.size(); ++i)
      out << "generator." << i + 1 << " = " << format_matrix(c.representation.generators[i]) << "\n";
  }
  out << "\n[budgets]\nmax_ball = " << c.budgets.max_ball << "\nmax_triples = " << c.budgets.max_triples
      << "\nwall_clock_hint = " << format_number(c.budgets.wall_clock_hint) << "\n";
  for (const auto& step : c.pipeline) {
    out << "\n[pipeline." << step.index << "]\ncommand = " << step.command << "\n";
    for (const auto& spec : command_schemas().at(step.command)) {
      if (!step.has(spec.key)) continue;
      out << spec.key << " = " << format_number(step.params.at(spec.key)) << "\n";
    }
  }
  return out.str();
}

std::string normalize_config(std::string_view text) { return emit_config(parse_config(text)); }

bool operator==(const Expr& a, const Expr& b) {
  return a.kind == b.kind && a.numbers == b.numbers && a.args == b.args;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  if (a.seed != b.seed || a.group.free_rank != b.group.free_rank ||
      a.group.automaton_path != b.group.automaton_path)
    return false;
  if (a.representation.expr != b.representation.expr) return false;
  if (a.representation.generators.size() != b.representation.generators.size()) return false;
  for (std::size_t i = 0; i < a.representation.generators.size(); ++i)
    if (a.representation.generators[i] != b.representation.generators[i]) return false;
  if (a.budgets.max_ball != b.budgets.max_ball || a.budgets.max_triples != b.budgets.max_triples ||
      a.budgets.wall_clock_hint != b.budgets.wall_clock_hint)
    return false;
  if (a.pipeline.size() != b.pipeline.size()) return false;
  for (std::size_t i = 0; i < a.pipeline.size(); ++i) {
    const auto& x = a.pipeline[i];
    const auto& y = b.pipeline[i];
    if (x.index != y.index || x.command != y.command || x.params != y.params) return false;
  }
  return true;
}

Representation build_representation(const RunConfig& config) {
  std::shared_ptr<const GeodesicAutomaton> automaton;
  if (!config.group.automaton_path.empty()) {
    auto path = std::filesystem::path(config.group.automaton_path);
    if (path.is_relative()) path = std::filesystem::path(config.base_dir) / path;
    if (!std::filesystem::exists(path)) invalid("group.automaton", "file not found: " + path.string());
    automaton = std::make_shared<const GeodesicAutomaton>(load_automaton(path.string()));
  } else {
    automaton = std::make_shared<const GeodesicAutomaton>(free_group_automaton(config.group.free_rank));
  }
  const int rank = automaton->alphabet().rank;

  if (config.representation.expr) {
    const Representation rep = build_expr(*config.representation.expr, rank);
    if (rep.rank() != rank) {
      invalid("representation.expr", "has " + std::to_string(rep.rank()) + " generators but the group has rank " +
                                         std::to_string(rank));
    }
    return Representation(rep.generators(), format_expr(*config.representation.expr), automaton);
  }
  const auto& gens = config.representation.generators;
  if (static_cast<int>(gens.size()) != rank) {
    invalid("representation", std::to_string(gens.size()) + " generators for a group of rank " + std::to_string(rank));
  }
  for (std::size_t i = 1; i < gens.size(); ++i)
    if (gens[i].rows() != gens[0].rows()) invalid("representation.generator." + std::to_string(i + 1), "dimension mismatch");
  return Representation(gens, "explicit", automaton);
}

void validate_config(const RunConfig& config) {
  const Representation rep = build_representation(config);
  const int d = rep.dim();
  for (const auto& step : config.pipeline) {
    const std::string field = "pipeline." + std::to_string(step.index);
    for (const char* k : {"p", "q"})
      if (step.has(k) && step.get_int(k) > d - 1) invalid(field + "." + k, "exceeds d - 1 = " + std::to_string(d - 1));
    if (step.has("r") && step.get_int("r") > d - 1) invalid(field + ".r", "exceeds d - 1 = " + std::to_string(d - 1));
  }
}

}  // namespace anosov
