// anosov-lab: run or validate a pipeline configuration.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "anosov/config.hpp"
#include "anosov/pipeline.hpp"
#include "anosov/reports.hpp"

using namespace anosov;

namespace {

int report_error(const Error& e) {
  std::cerr << "anosov-lab: " << e.what() << "\n";
  return exit_code(e.kind());
}

void print_outcome(const CommandOutcome& o) {
  std::printf("[pipeline.%d] %-20s ", o.step.index, o.step.command.c_str());
  if (!o.ok()) {
    std::printf("error  %s\n", o.error.c_str());
    return;
  }
  if (const auto* c = std::get_if<AnosovCertificate>(&o.result)) {
    std::printf("verdict=%s mu=%.4f c=%.4g\n", c->verdict ? "pass" : "fail", c->fitted_mu, c->envelope_c());
  } else if (const auto* e = std::get_if<CriticalExponent>(&o.result)) {
    std::printf("h=%.4f +- %.4f (series %.4f)\n", e->h(), e->counting.confidence, e->series.h);
  } else if (const auto* d = std::get_if<DimensionResult>(&o.result)) {
    std::printf("box dimension=%.4f +- %.4f\n", d->estimate.slope, d->estimate.stderr_);
  } else if (const auto* s = std::get_if<TripleMarginReport>(&o.result)) {
    std::printf("worst margin=%.3g over %zu triples%s\n", s->worst_margin, s->triples_tested,
                s->numerically_zero() ? " (numerically zero)" : "");
  } else if (const auto* p = std::get_if<ConvergenceProfile>(&o.result)) {
    std::printf("rate=%.4f final residual=%.3g\n", p->fitted_rate, p->steps.empty() ? 1.0 : p->steps.back().residual);
  } else if (const auto* sh = std::get_if<ShadowResult>(&o.result)) {
    std::size_t bad = 0;
    for (const auto& c : sh->checks) bad += c.holds() ? 0 : 1;
    std::printf("s=%.4f delta=%.4f bracket violations=%zu/%zu\n", sh->s, sh->least_angle.delta, bad, sh->checks.size());
  } else if (const auto* b = std::get_if<BoundaryExport>(&o.result)) {
    std::printf("%zu points\n", b->points.size());
  } else {
    std::printf("ok\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anosov representations lab: certificates, limit sets, hyperconvexity and dimension estimates"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = 1;
  std::uint64_t seed = 0;
  auto* run_cmd = app.add_subcommand("run", "Run the configured pipeline and write reports");
  run_cmd->add_option("config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out_dir, "Output directory")->required();
  run_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Override the configured seed");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Parse and validate a configuration");
  validate_cmd->add_option("config", validate_path, "Configuration file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*validate_cmd) {
    try {
      const RunConfig cfg = load_config(validate_path);
      validate_config(cfg);
      std::printf("ok %s (%zu pipeline steps)\n", config_hash(cfg).c_str(), cfg.pipeline.size());
      return 0;
    } catch (const Error& e) {
      return report_error(e);
    }
  }

  RunConfig cfg;
  try {
    cfg = load_config(config_path);
    validate_config(cfg);
  } catch (const Error& e) {
    return report_error(e);
  }
  RunOptions options;
  options.threads = threads;
  if (*seed_opt) options.seed = seed;

  RunRecord record;
  try {
    record = run(cfg, options);
    for (const auto& o : record.outcomes) print_outcome(o);
    const auto manifest = emit_reports(record, out_dir);
    std::printf("wrote %zu files to %s\n", manifest.size(), out_dir.c_str());
  } catch (const Error& e) {
    return report_error(e);
  }
  if (cfg.budgets.wall_clock_hint > 0) {
    double total = 0;
    for (const auto& o : record.outcomes) total += o.seconds;
    if (total > cfg.budgets.wall_clock_hint)
      std::fprintf(stderr, "anosov-lab: run took %.1f s, above the %.1f s hint\n", total, cfg.budgets.wall_clock_hint);
  }
  return exit_code(record);
}
