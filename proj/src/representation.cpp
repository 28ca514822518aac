#include "anosov/representation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "anosov/error.hpp"
#include "anosov/exterior.hpp"

namespace anosov {

namespace {

// Divides m by its largest absolute entry and returns the log of that entry.
double normalize_max_abs(Eigen::MatrixXd& m) {
  const double s = m.cwiseAbs().maxCoeff();
  if (!(s > 0) || !std::isfinite(s)) fail(ErrorKind::SingularInput, "product underflowed or overflowed");
  m /= s;
  return std::log(s);
}

}  // namespace

Representation::Representation(std::vector<Eigen::MatrixXd> generators, std::string label,
                               std::shared_ptr<const GeodesicAutomaton> automaton)
    : generators_(std::move(generators)), label_(std::move(label)), automaton_(std::move(automaton)) {
  if (generators_.empty()) fail(ErrorKind::InvalidArgument, "a representation needs at least one generator");
  dim_ = static_cast<int>(generators_.front().rows());
  if (!automaton_) automaton_ = std::make_shared<const GeodesicAutomaton>(free_group_automaton(rank()));
  if (automaton_->alphabet().rank != rank()) {
    fail(ErrorKind::DimensionMismatch, "automaton alphabet does not match the number of generators");
  }
  for (const auto& g : generators_) {
    if (g.rows() != dim_ || g.cols() != dim_) fail(ErrorKind::DimensionMismatch, "generator images differ in size");
    if (!g.allFinite()) fail(ErrorKind::InvalidArgument, "generator image has non-finite entries");
    const auto c = cartan(g);
    letter_condition_ = std::max(letter_condition_, c.sigma(0) / c.sigma(dim_ - 1));
    const Eigen::MatrixXd inv = g.fullPivLu().inverse();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim_, dim_);
    if ((g * inv - id).norm() > 1e-10 * std::max(1.0, c.sigma(0) / c.sigma(dim_ - 1))) {
      fail(ErrorKind::SingularInput, "generator image is too badly conditioned to invert");
    }
    images_.push_back(g);
    images_.push_back(inv);
  }
}

Representation Representation::relabeled(std::string label) const {
  Representation out = *this;
  out.label_ = std::move(label);
  return out;
}

ScaledMatrix product(const ScaledMatrix& a, const ScaledMatrix& b) {
  ScaledMatrix out{a.matrix * b.matrix, a.log_scale + b.log_scale};
  const double l = log_top_singular_value(out.matrix);
  out.matrix /= std::exp(l);
  out.log_scale += l;
  return out;
}

ScaledMatrix evaluate(const Representation& rep, const GroupWord& w) {
  ScaledMatrix out{Eigen::MatrixXd::Identity(rep.dim(), rep.dim()), 0.0};
  for (Letter l : w.letters) {
    if (!rep.automaton().alphabet().contains(l)) fail(ErrorKind::UnknownLetter, "letter outside the alphabet");
    out.matrix = out.matrix * rep.image(l);
    out.log_scale += normalize_max_abs(out.matrix);
  }
  const double l = log_top_singular_value(out.matrix);
  out.matrix /= std::exp(l);
  out.log_scale += l;
  return out;
}

double log_top_singular_value(const Eigen::MatrixXd& m) {
  if (m.size() == 1) return std::log(std::abs(m(0, 0)));
  const Eigen::MatrixXd gram = m.transpose() * m;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  return 0.5 * std::log(es.eigenvalues()(es.eigenvalues().size() - 1));
}

// ---------------------------------------------------------------------------

WedgeImages::WedgeImages(const Representation& rep, std::vector<int> degrees) : rep_(&rep), degrees_(std::move(degrees)) {
  std::sort(degrees_.begin(), degrees_.end());
  degrees_.erase(std::unique(degrees_.begin(), degrees_.end()), degrees_.end());
  const int letters = rep.automaton().alphabet().size();
  for (int k : degrees_) {
    if (k < 1 || k > rep.dim() - 1) fail(ErrorKind::IndexOutOfRange, "exterior degree outside [1, d-1]");
    std::vector<Eigen::MatrixXd> per_letter;
    for (Letter l = 0; l < letters; ++l) per_letter.push_back(exterior_power(rep.image(l), k));
    images_.push_back(std::move(per_letter));
  }
  for (Letter l = 0; l < letters; ++l) log_abs_det_.push_back(std::log(std::abs(rep.image(l).determinant())));
}

int WedgeImages::slot(int k) const {
  const auto it = std::find(degrees_.begin(), degrees_.end(), k);
  return it == degrees_.end() ? -1 : static_cast<int>(it - degrees_.begin());
}

WedgeProduct::WedgeProduct(const WedgeImages& images) : images_(&images) {
  const int d = images.rep().dim();
  for (int k : images.degrees()) {
    const auto n = static_cast<Eigen::Index>(SubsetIndex::binomial(d, k));
    products_.push_back(Eigen::MatrixXd::Identity(n, n));
    log_scales_.push_back(0);
    log_sigma1_.push_back(0);
  }
}

void WedgeProduct::refresh(std::size_t slot) {
  log_scales_[slot] += normalize_max_abs(products_[slot]);
  log_sigma1_[slot] = log_scales_[slot] + log_top_singular_value(products_[slot]);
}

void WedgeProduct::push_back(Letter l) {
  for (std::size_t s = 0; s < products_.size(); ++s) {
    products_[s] = products_[s] * images_->image(s, l);
    refresh(s);
  }
  log_det_ += images_->log_abs_det(l);
}

void WedgeProduct::extend_into(Letter l, WedgeProduct& out) const {
  for (std::size_t s = 0; s < products_.size(); ++s) {
    out.products_[s].noalias() = products_[s] * images_->image(s, l);
    out.log_scales_[s] = log_scales_[s];
    out.refresh(s);
  }
  out.log_det_ = log_det_ + images_->log_abs_det(l);
}

void WedgeProduct::push_front(Letter l) {
  for (std::size_t s = 0; s < products_.size(); ++s) {
    products_[s] = images_->image(s, l) * products_[s];
    refresh(s);
  }
  log_det_ += images_->log_abs_det(l);
}

double WedgeProduct::log_sigma1(int k) const {
  if (k == 0) return 0;
  if (k == images_->rep().dim()) return log_det_;
  const int s = images_->slot(k);
  if (s < 0) fail(ErrorKind::IndexOutOfRange, "exterior degree " + std::to_string(k) + " is not tracked");
  return log_sigma1_[static_cast<std::size_t>(s)];
}

double WedgeProduct::log_gap(int p) const {
  const double v = log_sigma1(p + 1) - 2 * log_sigma1(p) + log_sigma1(p - 1);
  return std::min(v, 0.0);
}

const Eigen::MatrixXd& WedgeProduct::matrix(int k) const {
  const int s = images_->slot(k);
  if (s < 0) fail(ErrorKind::IndexOutOfRange, "exterior degree " + std::to_string(k) + " is not tracked");
  return products_[static_cast<std::size_t>(s)];
}

Subspace WedgeProduct::attractor(int k) const {
  if (log_gap(k) >= std::log1p(-kGapTolerance)) fail(ErrorKind::NoGap, "no gap of index " + std::to_string(k));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(matrix(k), Eigen::ComputeThinU);
  return subspace_from_multivector(Eigen::VectorXd(svd.matrixU().col(0)), images_->rep().dim(), k);
}

std::vector<int> gap_degrees(int d, std::initializer_list<int> ps) {
  std::vector<int> out;
  for (int p : ps) {
    if (p < 1 || p > d - 1) fail(ErrorKind::IndexOutOfRange, "index " + std::to_string(p) + " outside [1, d-1]");
    for (int k = p - 1; k <= p + 1; ++k)
      if (k >= 1 && k <= d - 1) out.push_back(k);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------

std::uint64_t checked_ball_size(const GeodesicAutomaton& automaton, int radius, std::uint64_t budget) {
  std::uint64_t total = 0;
  for (auto s : automaton.sphere_sizes(radius)) {
    total = (s > budget || total > budget - s) ? budget + 1 : total + s;
  }
  if (total > budget) {
    fail(ErrorKind::BallTooLarge,
         "ball of radius " + std::to_string(radius) + " exceeds the budget of " + std::to_string(budget) + " words");
  }
  return total;
}

namespace {

int split_depth(int radius) { return std::min(radius, 2); }

}  // namespace

std::size_t ball_task_count(const GeodesicAutomaton& automaton, int radius) {
  return 1 + static_cast<std::size_t>(automaton.sphere_sizes(split_depth(radius)).back());
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  // Rethrow the error of the lowest index so failures are reproducible.
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void for_each_in_ball(const Representation& rep, int radius, const std::vector<int>& degrees,
                      const ScanOptions& options,
                      const std::function<void(std::size_t task, const BallNode&)>& visit) {
  if (radius < 0) fail(ErrorKind::InvalidArgument, "negative radius");
  const auto& automaton = rep.automaton();
  checked_ball_size(automaton, radius, options.max_ball);
  const WedgeImages images(rep, degrees);
  const int split = split_depth(radius);
  const std::vector<GroupWord> roots = sphere(automaton, split);
  const int letters = automaton.alphabet().size();

  parallel_for(1 + roots.size(), options.threads, [&](std::size_t task) {
    std::vector<WedgeProduct> stack(static_cast<std::size_t>(radius + 1), WedgeProduct(images));
    std::vector<Letter> word;
    if (task == 0) {
      // Words shorter than the split depth.
      std::function<void(int, StateId)> shallow = [&](int depth, StateId state) {
        visit(0, BallNode{word, &stack[static_cast<std::size_t>(depth)]});
        if (depth + 1 >= split) return;
        for (Letter l = 0; l < letters; ++l) {
          const StateId t = automaton.next(state, l);
          if (t == kNoState) continue;
          stack[static_cast<std::size_t>(depth)].extend_into(l, stack[static_cast<std::size_t>(depth + 1)]);
          word.push_back(l);
          shallow(depth + 1, t);
          word.pop_back();
        }
      };
      if (split > 0) shallow(0, automaton.initial());
      return;
    }
    const GroupWord& root = roots[task - 1];
    StateId state = automaton.initial();
    for (Letter l : root.letters) {
      stack[word.size()].extend_into(l, stack[word.size() + 1]);
      word.push_back(l);
      state = automaton.next(state, l);
    }
    std::function<void(int, StateId)> deep = [&](int depth, StateId s) {
      visit(task, BallNode{word, &stack[static_cast<std::size_t>(depth)]});
      if (depth == radius) return;
      for (Letter l = 0; l < letters; ++l) {
        const StateId t = automaton.next(s, l);
        if (t == kNoState) continue;
        stack[static_cast<std::size_t>(depth)].extend_into(l, stack[static_cast<std::size_t>(depth + 1)]);
        word.push_back(l);
        deep(depth + 1, t);
        word.pop_back();
      }
    };
    deep(split, state);
  });
}

// ---------------------------------------------------------------------------

double RadiusGap::worst_gap() const { return std::exp(log_worst_gap); }

double AnosovCertificate::envelope_c() const { return std::exp(intercept_slack); }

AnosovCertificate certify_anosov(const Representation& rep, int p, int radius, const ScanOptions& options,
                                 double mu_min) {
  if (p < 1 || p > rep.dim() - 1) fail(ErrorKind::IndexOutOfRange, "index " + std::to_string(p) + " outside [1, d-1]");
  if (radius < 4) fail(ErrorKind::InvalidArgument, "certification radius must be at least 4");

  using Acc = std::vector<RadiusGap>;
  Acc init(static_cast<std::size_t>(radius + 1));
  for (int k = 0; k <= radius; ++k) {
    init[static_cast<std::size_t>(k)].radius = k;
    init[static_cast<std::size_t>(k)].log_worst_gap = -std::numeric_limits<double>::infinity();
  }
  const Acc worst = fold_ball(
      rep, radius, gap_degrees(rep.dim(), {p}), options, init,
      [p](Acc& acc, const BallNode& node) {
        if (node.length() == 0) return;
        auto& slot = acc[static_cast<std::size_t>(node.length())];
        const double lg = node.product->log_gap(p);
        if (lg > slot.log_worst_gap) {
          slot.log_worst_gap = lg;
          slot.witness = node.group_word();
        }
      },
      [](Acc& out, const Acc& part) {
        for (std::size_t k = 0; k < out.size(); ++k)
          if (part[k].log_worst_gap > out[k].log_worst_gap) out[k] = part[k];
      });

  AnosovCertificate cert;
  cert.p = p;
  cert.radius = radius;
  cert.mu_min = mu_min;
  cert.per_radius.assign(worst.begin() + 1, worst.end());

  // Least squares of y = -log worst gap against k on [R/2, R].
  const int k0 = radius / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  for (int k = k0; k <= radius; ++k) {
    const double y = -cert.per_radius[static_cast<std::size_t>(k - 1)].log_worst_gap;
    sx += k;
    sy += y;
    sxx += double(k) * k;
    sxy += k * y;
    n += 1;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  for (int k = k0; k <= radius; ++k) {
    const double y = -cert.per_radius[static_cast<std::size_t>(k - 1)].log_worst_gap;
    ss_res += std::pow(y - (intercept + slope * k), 2);
    ss_tot += std::pow(y - sy / n, 2);
  }
  cert.fitted_mu = slope;
  cert.fitted_c = std::exp(-intercept);
  cert.r_squared = ss_tot > 0 ? 1 - ss_res / ss_tot : 1.0;
  double slack = -std::numeric_limits<double>::infinity();
  for (const auto& rg : cert.per_radius) slack = std::max(slack, slope * rg.radius + rg.log_worst_gap);
  cert.intercept_slack = slack;
  cert.verdict = slope > mu_min && cert.per_radius.back().log_worst_gap < std::log1p(-kGapTolerance);
  return cert;
}

CertificateBank::CertificateBank(const Representation& rep, int radius, ScanOptions options, double mu_min)
    : rep_(&rep), radius_(radius), options_(options), mu_min_(mu_min) {}

const AnosovCertificate& CertificateBank::get(int p) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto& slot = cache_[p];
  if (!slot) slot = std::make_unique<AnosovCertificate>(certify_anosov(*rep_, p, radius_, options_, mu_min_));
  return *slot;
}

// ---------------------------------------------------------------------------

GapConstants gap_constants(const AnosovCertificate& cert) {
  if (!cert.verdict) {
    fail(ErrorKind::NotCertified, "no passing Anosov certificate for index " + std::to_string(cert.p));
  }
  return {cert.envelope_c(), cert.fitted_mu};
}

double tail_bound(const GapConstants& gc, double kappa, std::size_t n) {
  if (!(gc.mu > 0)) return std::numeric_limits<double>::infinity();
  return kappa * gc.c * std::exp(-gc.mu * static_cast<double>(n)) / -std::expm1(-gc.mu);
}

std::size_t depth_for_tolerance(const GapConstants& gc, double kappa, double tol) {
  if (!(gc.mu > 0) || !(tol > 0)) fail(ErrorKind::InvalidArgument, "cannot reach the requested tolerance");
  const double need = std::log(kappa * gc.c / (-std::expm1(-gc.mu)) / tol) / gc.mu;
  auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(need)));
  while (tail_bound(gc, kappa, n) > tol) ++n;
  return n;
}

namespace {

std::vector<BoundaryPoint> flag_with_constants(const Representation& rep, const BoundaryRay& ray,
                                               const std::vector<int>& ps, double tol,
                                               const std::vector<GapConstants>& constants) {
  if (ray.depth() < 1) fail(ErrorKind::InvalidArgument, "empty ray prefix");
  std::vector<int> degrees;
  for (int p : ps) {
    const auto g = gap_degrees(rep.dim(), {p});
    degrees.insert(degrees.end(), g.begin(), g.end());
  }
  const WedgeImages images(rep, degrees);
  WedgeProduct prod(images);
  const double no_gap = std::log1p(-kGapTolerance);
  for (std::size_t i = 0; i < ray.prefix.size(); ++i) {
    prod.push_back(ray.prefix.letters[i]);
    for (int p : ps) {
      if (prod.log_gap(p) >= no_gap) {
        fail(ErrorKind::NoGapAlongRay, "prefix of length " + std::to_string(i + 1) + " of ray " +
                                           format_word(ray.prefix) + " has no gap of index " + std::to_string(p));
      }
    }
  }
  std::vector<BoundaryPoint> out;
  for (std::size_t j = 0; j < ps.size(); ++j) {
    BoundaryPoint bp;
    bp.ray = ray;
    bp.p = ps[j];
    bp.error_bound = tail_bound(constants[j], rep.letter_condition(), ray.depth());
    if (bp.error_bound > tol) {
      fail(ErrorKind::InsufficientDepth, "ray depth " + std::to_string(ray.depth()) + " gives error bound " +
                                             std::to_string(bp.error_bound) + " above tolerance");
    }
    bp.subspace = prod.attractor(ps[j]);
    out.push_back(std::move(bp));
  }
  return out;
}

std::vector<GapConstants> constants_for(const std::vector<int>& ps, const CertificateBank& bank) {
  std::vector<GapConstants> out;
  for (int p : ps) out.push_back(gap_constants(bank.get(p)));
  return out;
}

}  // namespace

BoundaryPoint boundary_point(const Representation& rep, const BoundaryRay& ray, int p, double tol,
                             const GapConstants& constants) {
  return flag_with_constants(rep, ray, {p}, tol, {constants}).front();
}

BoundaryPoint boundary_point(const Representation& rep, const BoundaryRay& ray, int p, double tol,
                             const CertificateBank& bank) {
  return flag_with_constants(rep, ray, {p}, tol, constants_for({p}, bank)).front();
}

std::vector<BoundaryPoint> boundary_flag(const Representation& rep, const BoundaryRay& ray, const std::vector<int>& ps,
                                         double tol, const CertificateBank& bank) {
  return flag_with_constants(rep, ray, ps, tol, constants_for(ps, bank));
}

std::size_t required_depth(const Representation& rep, const std::vector<int>& ps, double tol,
                           const CertificateBank& bank) {
  std::size_t depth = 1;
  for (int p : ps) depth = std::max(depth, depth_for_tolerance(gap_constants(bank.get(p)), rep.letter_condition(), tol));
  return depth;
}

std::vector<BoundaryPoint> limit_set_sample(const Representation& rep, int p, std::size_t count, std::size_t depth,
                                            std::uint64_t seed, double tol, const CertificateBank& bank,
                                            int threads) {
  if (count == 0) return {};
  const auto constants = constants_for({p}, bank);
  const std::size_t n = std::max(depth, required_depth(rep, {p}, tol, bank));
  const auto rays = sample_boundary_rays(rep.automaton(), count, n, seed);
  std::vector<BoundaryPoint> out(count);
  parallel_for(count, threads, [&](std::size_t i) { out[i] = flag_with_constants(rep, rays[i], {p}, tol, constants).front(); });
  return out;
}

Eigen::VectorXd stereographic_projection(const BoundaryPoint& z, const BoundaryPoint& x, double tol) {
  if (x.subspace.rank() != 1) fail(ErrorKind::InvalidArgument, "the projected point must be a line");
  const double margin = direct_sum_margin({x.subspace, z.subspace});
  if (margin <= tol) fail(ErrorKind::NotTransverse, "point is not transverse to the projection center");
  const Subspace complement = orthogonal_complement(z.subspace);
  Eigen::VectorXd v = complement.frame().transpose() * x.subspace.frame().col(0);
  v.normalize();
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0) v = -v;
  return v;
}

}  // namespace anosov
