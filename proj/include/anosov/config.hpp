#pragma once

// Run configuration: a line-oriented `key = value` format with sections
//
//   seed = 42
//   [group]            free = 2 | automaton = path
//   [representation]   expr = irr(3) ∘ schottky(3, pi/4) | generator.1 = 2 0; 0 0.5 ...
//   [budgets]          max_ball, max_triples, wall_clock_hint
//   [pipeline.N]       command = certify | exponent | ... plus its parameters
//
// `#` starts a comment.  Parsing fills defaults; emit_config prints the
// canonical form, so emit(parse(x)) is the normalization of x.

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "anosov/representation.hpp"

namespace anosov {

/// Construction expression:
///   schottky(t, theta) | irr(d) ∘ e | wedge(p, e) | sym(k, e) | sum(e, e)
///   | perturb(eps, seed, e) | trivial(d) | restrict(n, e)
/// Numeric arguments accept + - * / ( ) and `pi`.  `*` may stand for ∘.
struct Expr {
  enum class Kind { Schottky, Irr, Wedge, Sym, Sum, Perturb, Trivial, Restrict };
  Kind kind = Kind::Trivial;
  std::vector<double> numbers;
  std::vector<Expr> args;
};

Expr parse_expr(std::string_view text);
std::string format_expr(const Expr& e);
/// Builds the representation over a free group of the given rank (needed by trivial(d)).
Representation build_expr(const Expr& e, int rank);

/// Numeric literal arithmetic with `pi`.
double parse_number(std::string_view text);
/// Shortest decimal that reads back to the same double.
std::string format_number(double v);

struct GroupSpec {
  int free_rank = 0;           ///< 0 when an automaton file is used
  std::string automaton_path;  ///< as written in the file
};

struct RepresentationSpec {
  std::optional<Expr> expr;
  std::vector<Eigen::MatrixXd> generators;  ///< explicit matrices when expr is empty
};

struct Budgets {
  std::uint64_t max_ball = 2'000'000;
  std::uint64_t max_triples = 100'000;
  double wall_clock_hint = 0;  ///< seconds, advisory; 0 = none
};

struct PipelineStep {
  int index = 0;
  std::string command;
  std::map<std::string, double> params;

  double get(const std::string& key) const;
  int get_int(const std::string& key) const;
  bool has(const std::string& key) const { return params.count(key) > 0; }
};

/// Commands in the order the pipeline documents them.
const std::vector<std::string>& pipeline_commands();

struct RunConfig {
  std::uint64_t seed = 0;
  GroupSpec group;
  RepresentationSpec representation;
  Budgets budgets;
  std::vector<PipelineStep> pipeline;  ///< sorted by index
  std::string base_dir = ".";          ///< resolves relative automaton paths; not emitted
};

/// ParseError (with line and column) for malformed lines, unknown sections or
/// keys; ValidationError naming the field for missing or inconsistent values.
RunConfig parse_config(std::string_view text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);
std::string emit_config(const RunConfig& config);
std::string normalize_config(std::string_view text);

bool operator==(const Expr& a, const Expr& b);
bool operator==(const RunConfig& a, const RunConfig& b);

/// Resolves the group and builds the representation; ValidationError when a
/// referenced file is missing or a pipeline index does not fit the dimension.
Representation build_representation(const RunConfig& config);
void validate_config(const RunConfig& config);

}  // namespace anosov
