#include "anosov/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <map>
#include <memory>

namespace anosov {

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class Runner {
 public:
  Runner(const Representation& rep, const RunConfig& config, const RunOptions& options, std::uint64_t seed)
      : rep_(rep), seed_(seed) {
    scan_.threads = options.threads;
    scan_.max_ball = config.budgets.max_ball;
  }

  CommandPayload execute(const PipelineStep& step) {
    const std::uint64_t seed = step_seed(seed_, step.index);
    const std::string& cmd = step.command;
    if (cmd == "certify") return certify_anosov(rep_, step.get_int("p"), step.get_int("R"), scan_, step.get("mu_min"));
    if (cmd == "exponent") return critical_exponent(rep_, step.get_int("R"), scan_);
    if (cmd == "dimension") {
      DimensionResult out;
      out.points = limit_set_sample(rep_, 1, static_cast<std::size_t>(step.get("points")),
                                    static_cast<std::size_t>(step.get("depth")), seed, step.get("tol"),
                                    bank(step.get_int("R")), scan_.threads);
      out.estimate = box_dimension(out.points, step.get_int("scales"));
      return out;
    }
    if (cmd == "hyperconvex-scan") {
      ScanSettings settings;
      settings.separation_floor = step.get("separation");
      settings.tol = step.get("tol");
      settings.threads = scan_.threads;
      return hyperconvexity_scan(rep_, indices(step), static_cast<std::size_t>(step.get("triples")),
                                 static_cast<std::size_t>(step.get("depth")), seed, bank(step.get_int("R")), settings);
    }
    if (cmd == "convergence-profile") {
      const int n = step.get_int("steps");
      std::vector<int> steps;
      for (int i = 1; i <= n; ++i) steps.push_back(i);
      const BoundaryRay x = random_ray(rep_.automaton(), static_cast<std::size_t>(n) + 1, splitmix64(seed));
      return convergence_profile(rep_, indices(step), x, steps, seed, bank(step.get_int("R")));
    }
    if (cmd == "shadow-check") {
      ShadowResult out;
      const int R = step.get_int("R");
      out.s = step.has("s") ? step.get("s") : critical_exponent(rep_, R, scan_).h();
      out.least_angle = least_angle_estimate(rep_, step.get_int("L"), static_cast<std::size_t>(step.get("geodesics")),
                                             splitmix64(seed));
      if (out.least_angle.no_gap) fail(ErrorKind::NoGap, "least angle undefined: a sampled geodesic has no gap");
      const PSMeasure measure = ps_measure(rep_, out.s, R, scan_);
      out.atoms = measure.atoms.size();
      const auto sample = limit_set_sample(rep_, 1, static_cast<std::size_t>(step.get("points")),
                                           static_cast<std::size_t>(step.get("depth")), seed, step.get("tol"), bank(R),
                                           scan_.threads);
      for (int len = 1; len <= step.get_int("max_eta"); ++len)
        for (const auto& eta : sphere(rep_.automaton(), len))
          out.checks.push_back(shadow_ratio(rep_, eta, measure, sample, out.least_angle.delta));
      return out;
    }
    if (cmd == "boundary-export") {
      BoundaryExport out;
      out.points = limit_set_sample(rep_, step.get_int("p"), static_cast<std::size_t>(step.get("points")),
                                    static_cast<std::size_t>(step.get("depth")), seed, step.get("tol"),
                                    bank(step.get_int("R")), scan_.threads);
      return out;
    }
    fail(ErrorKind::ValidationError, "pipeline." + std::to_string(step.index) + ".command: unknown");
  }

 private:
  static TripleIndices indices(const PipelineStep& step) {
    return {step.get_int("p"), step.get_int("q"), step.get_int("r")};
  }

  // One certificate bank per radius, shared by the commands of a run.
  const CertificateBank& bank(int radius) {
    auto& slot = banks_[radius];
    if (!slot) slot = std::make_unique<CertificateBank>(rep_, radius, scan_);
    return *slot;
  }

  const Representation& rep_;
  std::uint64_t seed_;
  ScanOptions scan_;
  std::map<int, std::unique_ptr<CertificateBank>> banks_;
};

}  // namespace

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : emit_config(config)) h = (h ^ c) * 1099511628211ull;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t step_seed(std::uint64_t seed, int index) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(index)));
}

RunRecord run(const RunConfig& config, const RunOptions& options) {
  RunRecord record;
  record.started = utc_now();
  record.config_hash = config_hash(config);
  record.config_text = emit_config(config);
  record.seed = options.seed.value_or(config.seed);
  record.threads = std::max(1, options.threads);

  const Representation rep = build_representation(config);
  record.representation = rep.label();
  record.dim = rep.dim();
  Runner runner(rep, config, options, record.seed);

  for (const auto& step : config.pipeline) {
    CommandOutcome outcome;
    outcome.step = step;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      outcome.result = runner.execute(step);
    } catch (const Error& e) {
      outcome.error_kind = e.kind();
      outcome.error = e.what();
    }
    outcome.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    record.outcomes.push_back(std::move(outcome));
  }
  record.finished = utc_now();
  return record;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::ValidationError:
    case ErrorKind::IoError:
      return 2;
    case ErrorKind::BallTooLarge:
      return 3;
    default:
      return 4;
  }
}

int exit_code(const RunRecord& record) {
  for (const auto& o : record.outcomes)
    if (o.error_kind) return exit_code(*o.error_kind);
  return 0;
}

}  // namespace anosov
