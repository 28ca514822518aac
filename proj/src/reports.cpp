#include "anosov/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace anosov {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(const char* f, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Minimal static plot: markers and polylines in a framed box with ticks.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string xlabel, std::string ylabel)
      : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

  void markers(std::vector<std::pair<double, double>> pts, std::string color = "#1f5fa8") {
    series_.push_back({std::move(pts), std::move(color), false});
  }
  void line(std::vector<std::pair<double, double>> pts, std::string color = "#c0392b") {
    series_.push_back({std::move(pts), std::move(color), true});
  }

  std::string render() const {
    constexpr double W = 640, H = 440, L = 70, R = 20, T = 40, B = 55;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series_)
      for (auto [x, y] : s.pts) {
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
    if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
    const double px = 0.04 * (x1 - x0), py = 0.04 * (y1 - y0);
    x0 -= px, x1 += px, y0 -= py, y1 += py;
    auto sx = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto sy = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

    std::ostringstream o;
    o << "<!-- anosov-lab " << kToolVersion << " -->\n";
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title_)
      << "</text>\n";
    o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double xv = x0 + (x1 - x0) * i / 4, yv = y0 + (y1 - y0) * i / 4;
      o << "<text x=\"" << fmt("%.1f", sx(xv)) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">"
        << fmt("%.3g", xv) << "</text>\n";
      o << "<text x=\"" << L - 6 << "\" y=\"" << fmt("%.1f", sy(yv) + 4) << "\" text-anchor=\"end\">"
        << fmt("%.3g", yv) << "</text>\n";
    }
    o << "<text x=\"" << (W + L - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << xml_escape(xlabel_)
      << "</text>\n";
    o << "<text x=\"16\" y=\"" << (H - B + T) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (H - B + T) / 2 << ")\">" << xml_escape(ylabel_) << "</text>\n";
    for (const auto& s : series_) {
      if (s.line) {
        o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (auto [x, y] : s.pts)
          if (std::isfinite(x) && std::isfinite(y)) o << fmt("%.2f", sx(x)) << ',' << fmt("%.2f", sy(y)) << ' ';
        o << "\"/>\n";
      } else {
        const double r = s.pts.size() > 2000 ? 0.8 : 2.5;
        for (auto [x, y] : s.pts) {
          if (!std::isfinite(x) || !std::isfinite(y)) continue;
          o << "<circle cx=\"" << fmt("%.2f", sx(x)) << "\" cy=\"" << fmt("%.2f", sy(y)) << "\" r=\"" << r
            << "\" fill=\"" << s.color << "\"/>\n";
        }
      }
    }
    o << "</svg>\n";
    return o.str();
  }

 private:
  struct Series {
    std::vector<std::pair<double, double>> pts;
    std::string color;
    bool line;
  };
  std::string title_, xlabel_, ylabel_;
  std::vector<Series> series_;
};

// Limit-set points in the affine chart x_j = 1, j chosen to keep the points
// farthest from the chart's hyperplane at infinity.
SvgPlot scatter_plot(const std::vector<BoundaryPoint>& points, const std::string& title) {
  const int d = points.empty() ? 2 : static_cast<int>(points.front().subspace.ambient_dim());
  int chart = 0;
  double best = -1;
  for (int j = 0; j < d; ++j) {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& bp : points) worst = std::min(worst, std::abs(bp.subspace.frame()(j, 0)));
    if (worst > best) best = worst, chart = j;
  }
  std::vector<int> axes;
  for (int j = 0; j < d && axes.size() < 2; ++j)
    if (j != chart) axes.push_back(j);
  std::vector<std::pair<double, double>> pts;
  for (const auto& bp : points) {
    const auto v = bp.subspace.frame().col(0);
    const double u = v(axes[0]) / v(chart);
    pts.push_back({u, axes.size() > 1 ? v(axes[1]) / v(chart) : 0.0});
  }
  const std::string xl = "x" + std::to_string(axes[0] + 1) + "/x" + std::to_string(chart + 1);
  const std::string yl = axes.size() > 1 ? "x" + std::to_string(axes[1] + 1) + "/x" + std::to_string(chart + 1) : "";
  SvgPlot plot(title, xl, yl);
  plot.markers(std::move(pts));
  return plot;
}

std::string ray_words(const std::vector<BoundaryRay>& rays) {
  std::string out;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    if (i) out += '|';
    out += format_word(rays[i].prefix);
  }
  return out;
}

class Writer {
 public:
  explicit Writer(fs::path root) : root_(std::move(root)) {}

  void write(const std::string& rel, const std::string& content) {
    const fs::path path = root_ / rel;
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorKind::IoError, "cannot create " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.flush();
    if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
    manifest_.push_back(rel);
  }

  std::vector<std::string>& manifest() { return manifest_; }

 private:
  fs::path root_;
  std::vector<std::string> manifest_;
};

struct Finding {
  std::string property;
  bool holds;
  double value;
  std::string witness;
};

}  // namespace

std::string CsvTable::to_string() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += csv_field(fields[i]);
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

std::vector<std::string> emit_reports(const RunRecord& record, const std::string& out_dir) {
  Writer w{fs::path(out_dir)};
  CsvTable findings{{"step", "command", "property", "holds", "value", "witness"}, {}};
  json commands = json::array();

  for (const auto& o : record.outcomes) {
    const std::string dir = "pipeline." + std::to_string(o.step.index) + "/";
    const std::size_t first_file = w.manifest().size();
    json summary = json::object();
    std::vector<Finding> found;

    if (const auto* c = std::get_if<AnosovCertificate>(&o.result)) {
      CsvTable t{{"radius", "worst_gap", "log_worst_gap"}, {}};
      std::vector<std::pair<double, double>> pts, fit;
      for (const auto& rg : c->per_radius) {
        t.rows.push_back({std::to_string(rg.radius), csv_number(rg.worst_gap()), csv_number(rg.log_worst_gap)});
        pts.push_back({double(rg.radius), -rg.log_worst_gap});
      }
      for (int k = c->radius / 2; k <= c->radius; ++k) fit.push_back({double(k), c->fitted_mu * k - std::log(c->fitted_c)});
      w.write(dir + "certificate.csv", t.to_string());
      SvgPlot plot("-log worst gap, index " + std::to_string(c->p), "radius", "-log sigma_{p+1}/sigma_p");
      plot.markers(pts);
      plot.line(fit);
      w.write(dir + "certificate.svg", plot.render());
      const auto& last = c->per_radius.back();
      summary = {{"p", c->p},           {"radius", c->radius},         {"fitted_mu", c->fitted_mu},
                 {"fitted_c", c->fitted_c}, {"envelope_c", c->envelope_c()}, {"r_squared", c->r_squared},
                 {"mu_min", c->mu_min}, {"verdict", c->verdict},       {"witness", format_word(last.witness)}};
      found.push_back({"anosov p=" + std::to_string(c->p), c->verdict, c->fitted_mu, format_word(last.witness)});
    } else if (const auto* e = std::get_if<CriticalExponent>(&o.result)) {
      CsvTable t{{"t_bin", "count", "log_count"}, {}};
      for (const auto& b : e->bins) {
        t.rows.push_back({csv_number(b.t), std::to_string(b.count),
                          csv_number(b.count ? std::log(static_cast<double>(b.count)) : -INFINITY)});
      }
      w.write(dir + "exponent.csv", t.to_string());
      summary = {{"h", e->h()},
                 {"method", to_string(e->counting.method)},
                 {"confidence", e->counting.confidence},
                 {"window", {e->counting.window_lo, e->counting.window_hi}},
                 {"series_h", e->series.h},
                 {"series_bracket", {e->series.window_lo, e->series.window_hi}},
                 {"discrepancy", std::abs(e->h() - e->series.h)},
                 {"radius", e->radius}};
    } else if (const auto* dres = std::get_if<DimensionResult>(&o.result)) {
      const auto& est = dres->estimate;
      CsvTable t{{"epsilon", "net_count"}, {}};
      std::vector<std::pair<double, double>> pts, fit;
      for (std::size_t j = 0; j < est.scales.size(); ++j) {
        t.rows.push_back({csv_number(est.scales[j]), std::to_string(est.counts[j])});
        pts.push_back({-std::log(est.scales[j]), std::log(static_cast<double>(est.counts[j]))});
      }
      w.write(dir + "dimension.csv", t.to_string());
      if (!est.scales.empty()) {
        double mx = 0, my = 0;
        for (std::size_t j = est.fit_first; j <= est.fit_last; ++j) mx += pts[j].first, my += pts[j].second;
        const double n = static_cast<double>(est.fit_last - est.fit_first + 1);
        mx /= n, my /= n;
        for (std::size_t j : {est.fit_first, est.fit_last})
          fit.push_back({pts[j].first, my + est.slope * (pts[j].first - mx)});
      }
      SvgPlot plot("net counts (box dimension " + fmt("%.4f", est.slope) + ")", "log 1/eps", "log N(eps)");
      plot.markers(pts);
      plot.line(fit);
      w.write(dir + "dimension.svg", plot.render());
      w.write(dir + "limit_set.svg", scatter_plot(dres->points, "limit set sample (xi^1)").render());
      summary = {{"box_dimension", est.slope},
                 {"stderr", est.stderr_},
                 {"fit_scales", {est.fit_first, est.fit_last}},
                 {"points", dres->points.size()},
                 {"depth", dres->points.empty() ? 0 : dres->points.front().ray.depth()},
                 {"max_error", est.max_error},
                 {"note", "box (net) dimension stands in for Hausdorff dimension"}};
    } else if (const auto* s = std::get_if<TripleMarginReport>(&o.result)) {
      CsvTable t{{"triple_id", "margin", "witness_words"}, {}};
      for (std::size_t i = 0; i < s->margins.size(); ++i)
        t.rows.push_back({std::to_string(i), csv_number(s->margins[i]), ray_words(s->triples[i])});
      w.write(dir + "scan.csv", t.to_string());
      const std::string idx = "(" + std::to_string(s->indices.p) + "," + std::to_string(s->indices.q) + "," +
                              std::to_string(s->indices.r) + ")";
      summary = {{"indices", {s->indices.p, s->indices.q, s->indices.r}},
                 {"triples", s->triples_tested},
                 {"worst_margin", s->worst_margin},
                 {"worst_index", s->worst_index},
                 {"numerically_zero", s->numerically_zero()},
                 {"separation_floor", s->separation_floor},
                 {"depth", s->depth},
                 {"witness", ray_words(s->witness)}};
      found.push_back({"hyperconvex " + idx, !s->numerically_zero(), s->worst_margin, ray_words(s->witness)});
    } else if (const auto* p = std::get_if<ConvergenceProfile>(&o.result)) {
      CsvTable t{{"step", "residual"}, {}};
      std::vector<std::pair<double, double>> pts, fit;
      for (const auto& st : p->steps) {
        t.rows.push_back({std::to_string(st.step), csv_number(st.residual)});
        pts.push_back({double(st.step), std::log10(st.residual)});
      }
      w.write(dir + "profile.csv", t.to_string());
      if (p->fitted_points > 0) {
        const std::size_t half = p->steps.size() / 2;
        for (std::size_t i : {half, p->steps.size() - 1}) {
          const double st = p->steps[i].step;
          fit.push_back({st, (std::log(p->fitted_const) - p->fitted_rate * st) / std::log(10.0)});
        }
      }
      SvgPlot plot("convergence profile", "step", "log10 residual");
      plot.markers(pts);
      plot.line(fit);
      w.write(dir + "profile.svg", plot.render());
      const double last = p->steps.empty() ? 1.0 : p->steps.back().residual;
      summary = {{"indices", {p->indices.p, p->indices.q, p->indices.r}},
                 {"fitted_rate", p->fitted_rate},
                 {"fitted_const", p->fitted_const},
                 {"fitted_points", p->fitted_points},
                 {"final_residual", last},
                 {"ray", format_word(p->ray.prefix)}};
      found.push_back({"convergence rate > 0", p->fitted_rate > 0, p->fitted_rate, format_word(p->ray.prefix)});
    } else if (const auto* sh = std::get_if<ShadowResult>(&o.result)) {
      CsvTable t{{"eta", "ratio", "lower", "upper"}, {}};
      std::size_t violations = 0;
      for (const auto& c : sh->checks) {
        t.rows.push_back({format_word(c.eta), csv_number(c.ratio), csv_number(c.lower), csv_number(c.upper)});
        if (!c.holds()) ++violations;
        found.push_back({"shadow bracket", c.holds(), c.ratio, format_word(c.eta)});
      }
      w.write(dir + "shadow.csv", t.to_string());
      summary = {{"s", sh->s},
                 {"least_angle", sh->least_angle.delta},
                 {"atoms", sh->atoms},
                 {"checks", sh->checks.size()},
                 {"violations", violations}};
    } else if (const auto* b = std::get_if<BoundaryExport>(&o.result)) {
      CsvTable t{{"point_id", "ray", "error_bound"}, {}};
      const Eigen::Index d = b->points.empty() ? 0 : b->points.front().subspace.ambient_dim();
      const Eigen::Index k = b->points.empty() ? 0 : b->points.front().subspace.rank();
      for (Eigen::Index c = 0; c < k; ++c)
        for (Eigen::Index i = 0; i < d; ++i)
          t.header.push_back("x" + std::to_string(i + 1) + (k > 1 ? "_" + std::to_string(c + 1) : ""));
      double max_err = 0;
      for (std::size_t i = 0; i < b->points.size(); ++i) {
        const auto& bp = b->points[i];
        std::vector<std::string> row{std::to_string(i), format_word(bp.ray.prefix), csv_number(bp.error_bound)};
        for (Eigen::Index c = 0; c < k; ++c)
          for (Eigen::Index r = 0; r < d; ++r) row.push_back(csv_number(bp.subspace.frame()(r, c)));
        t.rows.push_back(std::move(row));
        max_err = std::max(max_err, bp.error_bound);
      }
      w.write(dir + "boundary.csv", t.to_string());
      if (k == 1) w.write(dir + "limit_set.svg", scatter_plot(b->points, "limit set sample (xi^1)").render());
      summary = {{"points", b->points.size()}, {"p", o.step.get_int("p")}, {"max_error", max_err}};
    }

    for (const auto& f : found) {
      findings.rows.push_back({std::to_string(o.step.index), o.step.command, f.property, f.holds ? "true" : "false",
                               csv_number(f.value), f.witness});
    }
    json entry = {{"index", o.step.index}, {"command", o.step.command}, {"status", o.ok() ? "ok" : "error"},
                  {"seconds", o.seconds}};
    if (!o.ok()) {
      entry["error_kind"] = std::string(to_string(*o.error_kind));
      entry["error"] = o.error;
    }
    entry["summary"] = summary;
    entry["files"] = std::vector<std::string>(w.manifest().begin() + static_cast<std::ptrdiff_t>(first_file),
                                              w.manifest().end());
    commands.push_back(std::move(entry));
  }

  if (!record.outcomes.empty()) w.write("findings.csv", findings.to_string());

  json meta = {{"tool", "anosov-lab"},
               {"version", record.tool_version},
               {"config_hash", record.config_hash},
               {"representation", record.representation},
               {"dimension", record.dim},
               {"seed", record.seed},
               {"threads", record.threads},
               {"started", record.started},
               {"finished", record.finished},
               {"exit_code", exit_code(record)},
               {"config", record.config_text},
               {"commands", commands}};
  w.write("metadata.json", meta.dump(2) + "\n");
  return w.manifest();
}

}  // namespace anosov
