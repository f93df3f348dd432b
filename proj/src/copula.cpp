#include "rankreg/copula.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>

#include "rankreg/comparison_sums.hpp"
#include "rankreg/errors.hpp"
#include "rankreg/normal.hpp"
#include "rankreg/parallel.hpp"

namespace rankreg {

using Eigen::Index;
using Eigen::VectorXd;

std::string_view to_string(Family f) {
  switch (f) {
    case Family::Gaussian: return "gaussian";
    case Family::StudentT1: return "t1";
    case Family::Quadratic: return "quadratic";
    case Family::Lemma2: return "lemma2";
    case Family::Independence: return "independence";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "gaussian") return Family::Gaussian;
  if (name == "t1" || name == "student-t1") return Family::StudentT1;
  if (name == "quadratic") return Family::Quadratic;
  if (name == "lemma2") return Family::Lemma2;
  if (name == "independence") return Family::Independence;
  throw InvalidInput("unknown copula family '" + std::string(name) + "'");
}

std::pair<double, double> family_range(Family f) {
  switch (f) {
    case Family::Gaussian:
    case Family::StudentT1: return {-1.0, 1.0};
    case Family::Quadratic:
    case Family::Lemma2: return {0.0, 1.0};
    case Family::Independence: return {0.0, 0.0};
  }
  return {0.0, 0.0};
}

void CopulaModel::validate() const {
  if (family == Family::Independence) return;
  const auto [lo, hi] = family_range(family);
  const bool ok = family == Family::Lemma2 ? (param > lo && param < hi)
                                           : (param >= lo && param <= hi);
  if (!ok) {
    throw InvalidInput("parameter " + std::to_string(param) + " is outside the range of the " +
                       std::string(to_string(family)) + " family");
  }
}

BaseDraws draw_base(Index n, Rng& rng) {
  if (n < 1) throw InvalidInput("sample size must be positive");
  BaseDraws b{VectorXd(n), VectorXd(n), VectorXd(n), VectorXd(n)};
  for (Index i = 0; i < n; ++i) {
    b.u(i) = rng.uniform_open();
    b.z1(i) = rng.normal();
    b.z2(i) = rng.normal();
    b.z3(i) = rng.normal();
  }
  return b;
}

CopulaSample transform_base(const CopulaModel& model, const BaseDraws& base) {
  model.validate();
  const double t = model.param;
  const Index n = base.u.size();
  CopulaSample s{VectorXd(n), VectorXd(n)};
  switch (model.family) {
    case Family::Gaussian:
    case Family::StudentT1: {
      const double c = std::sqrt(std::max(0.0, 1.0 - t * t));
      s.x = base.z1;
      s.y = t * base.z1 + c * base.z2;
      if (model.family == Family::StudentT1) {
        const VectorXd scale = base.z3.cwiseAbs();
        s.x = s.x.cwiseQuotient(scale);
        s.y = s.y.cwiseQuotient(scale);
      }
      break;
    }
    case Family::Quadratic:
      s.x = base.u.array() - 0.5;
      s.y = 0.5 + t * s.x.array() + (1.0 - t) * s.x.array().square() + 1e-3 * base.z2.array();
      break;
    case Family::Lemma2:
      s.x = base.u;
      for (Index i = 0; i < n; ++i) s.y(i) = s.x(i) <= t ? t - s.x(i) : s.x(i);
      break;
    case Family::Independence:
      s.x = base.u;
      s.y = base.z2;
      break;
  }
  return s;
}

CopulaSample sample_copula(const CopulaModel& model, Index n, std::uint64_t seed) {
  model.validate();
  Rng rng(seed);
  return transform_base(model, draw_base(n, rng));
}

VarianceTriple lemma2_closed_forms(double a) {
  if (!(a > 0.0 && a < 1.0)) throw InvalidInput("lemma2_closed_forms: a must lie in (0, 1)");
  const double a3 = a * a * a;
  const double a4 = a3 * a;
  const double a5 = a4 * a;
  const double a6 = a5 * a;
  const double a7 = a6 * a;
  const double a8 = a7 * a;
  VarianceTriple v;
  v.sigma2 = 36.0 * (a5 - a6);
  v.sigma2_hom = 4.0 * (a3 - a6);
  v.sigma2_ew =
      144.0 * (a3 / 12.0 - a4 / 6.0 + 2.0 * a5 / 15.0 - 9.0 * a6 / 20.0 + a7 - 3.0 * a8 / 5.0);
  v.rho = 1.0 - 2.0 * a3;
  return v;
}

VarianceTriple variance_triple_from_sample(std::span<const double> x,
                                           std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidInput("variance_triple_from_sample: need two samples of equal length >= 2");
  }
  const TieRule rule(1.0);
  const auto n = static_cast<Index>(x.size());
  const RankVector ru = rank_transform(x, rule);
  const RankVector rv = rank_transform(y, rule);
  const VectorXd u = Eigen::Map<const VectorXd>(ru.data(), n);
  const VectorXd v = Eigen::Map<const VectorXd>(rv.data(), n);

  // E[1{U <= u_i} V] and E[1{V <= v_i} U]: comparison sums on the negated
  // sample count the observations at or below each point.
  const VectorXd neg_x = -Eigen::Map<const VectorXd>(x.data(), n);
  const VectorXd neg_y = -Eigen::Map<const VectorXd>(y.data(), n);
  const double nd = static_cast<double>(n);
  const VectorXd below_u =
      ComparisonSums({neg_x.data(), x.size()}, rule)(v) / nd;
  const VectorXd below_v =
      ComparisonSums({neg_y.data(), y.size()}, rule)(u) / nd;
  const VectorXd h = u.cwiseProduct(v) - below_u - below_v;

  const VectorXd cu = u.array() - u.mean();
  const VectorXd cv = v.array() - v.mean();
  auto moment = [&](int k, int l) {
    return (cu.array().pow(k) * cv.array().pow(l)).mean();
  };
  VarianceTriple t;
  t.sigma2 = 144.0 * (h.array() - h.mean()).square().mean();
  t.rho = moment(1, 1) / std::sqrt(moment(2, 0) * moment(0, 2));
  t.sigma2_hom = 1.0 - t.rho * t.rho;
  t.sigma2_ew = 144.0 * (moment(2, 2) - 2.0 * t.rho * moment(3, 1) + t.rho * t.rho / 80.0);
  return t;
}

VarianceTriple variance_triple_mc(const CopulaModel& model, Index n_mc, std::uint64_t seed) {
  if (n_mc < 10000) throw InvalidInput("variance_triple_mc: n_mc must be at least 10^4");
  const CopulaSample s = sample_copula(model, n_mc, seed);
  return variance_triple_from_sample({s.x.data(), static_cast<std::size_t>(n_mc)},
                                     {s.y.data(), static_cast<std::size_t>(n_mc)});
}

std::vector<double> default_curve_grid(Family f) {
  const double lo = f == Family::Lemma2 ? 0.02 : 0.0;
  const double hi = f == Family::Lemma2 ? 0.98 : 1.0;
  std::vector<double> grid(41);
  for (int k = 0; k <= 40; ++k) grid[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / 40.0;
  return grid;
}

std::vector<CurvePoint> variance_curve(Family f, std::span<const double> grid, Index n_mc,
                                       std::uint64_t seed, unsigned threads) {
  if (grid.empty()) throw InvalidInput("variance_curve: grid is empty");
  for (double p : grid) CopulaModel{f, p}.validate();
  if (n_mc < 10000) throw InvalidInput("variance_curve: n_mc must be at least 10^4");
  Rng rng(seed);
  const BaseDraws base = draw_base(n_mc, rng);
  std::vector<CurvePoint> out(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t k) {
    const CopulaSample s = transform_base({f, grid[k]}, base);
    const auto m = static_cast<std::size_t>(n_mc);
    out[k] = {grid[k], variance_triple_from_sample({s.x.data(), m}, {s.y.data(), m})};
  });
  return out;
}

double mc_rank_correlation(const CopulaModel& model, const BaseDraws& base) {
  const CopulaSample s = transform_base(model, base);
  const auto m = static_cast<std::size_t>(s.x.size());
  return spearman({s.x.data(), m}, {s.y.data(), m}, TieRule(1.0));
}

double population_rank_correlation(const CopulaModel& model) {
  model.validate();
  switch (model.family) {
    case Family::Independence: return 0.0;
    case Family::Gaussian: return 6.0 / std::numbers::pi * std::asin(model.param / 2.0);
    case Family::Lemma2: return 1.0 - 2.0 * model.param * model.param * model.param;
    default: break;
  }
  static std::mutex mutex;
  static std::map<std::pair<int, double>, double> cache;
  const std::pair<int, double> key{static_cast<int>(model.family), model.param};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  constexpr Index kOracleDraws = 1000000;
  constexpr std::uint64_t kOracleSeed = 0x5eed0f0aac1eULL;
  Rng rng(kOracleSeed);
  const double value = mc_rank_correlation(model, draw_base(kOracleDraws, rng));
  std::lock_guard lock(mutex);
  cache.emplace(key, value);
  return value;
}

double calibrate_parameter(Family f, double target, const CalibrationOptions& opt) {
  if (f == Family::Independence) {
    throw CalibrationFailure("the independence family has no free parameter");
  }
  if (!(target >= -1.0 && target <= 1.0)) {
    throw InvalidInput("calibration target must lie in [-1, 1]");
  }
  if (!(opt.tolerance > 0.0)) throw InvalidInput("calibration tolerance must be positive");
  if (opt.n_mc < 1000) throw InvalidInput("calibration needs n_mc >= 1000");
  auto [lo, hi] = family_range(f);
  if (f == Family::Lemma2) {
    lo = 1e-6;
    hi = 1.0 - 1e-6;
  }
  Rng rng(opt.seed);
  const BaseDraws base = draw_base(opt.n_mc, rng);
  auto corr = [&](double p) { return mc_rank_correlation({f, p}, base); };

  double f_lo = corr(lo);
  const double f_hi = corr(hi);
  if (std::abs(f_lo - target) <= opt.tolerance) return lo;
  if (std::abs(f_hi - target) <= opt.tolerance) return hi;
  if ((f_lo - target) * (f_hi - target) > 0.0) {
    throw CalibrationFailure("target rank correlation " + std::to_string(target) +
                             " is not bracketed by the " + std::string(to_string(f)) +
                             " family (range " + std::to_string(std::min(f_lo, f_hi)) + " to " +
                             std::to_string(std::max(f_lo, f_hi)) + ")");
  }
  for (int it = 0; it < opt.max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = corr(mid);
    if (std::abs(f_mid - target) <= opt.tolerance || hi - lo < 1e-12) return mid;
    if ((f_mid - target) * (f_lo - target) > 0.0) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  throw CalibrationFailure("bisection did not reach the tolerance");
}

namespace {

struct RepOutcome {
  bool ok = false;
  bool covered = false;
  double width = 0.0;
  double se = 0.0;
};

}  // namespace

CoverageResult coverage_experiment(const CoverageConfig& c) {
  c.model.validate();
  if (c.n < 4) throw InvalidInput("coverage_experiment: n must be at least 4");
  if (c.reps < 1) throw InvalidInput("coverage_experiment: reps must be positive");
  if (c.methods.empty()) throw InvalidInput("coverage_experiment: no methods requested");
  two_sided_critical_value(c.alpha);

  CoverageResult result;
  result.truth = population_rank_correlation(c.model);
  const std::size_t m = c.methods.size();
  const auto reps = static_cast<std::size_t>(c.reps);
  std::vector<RepOutcome> outcomes(reps * m);

  parallel_for(reps, c.threads, [&](std::size_t r) {
    Rng rng = Rng::stream(c.seed, r);
    const CopulaSample s = transform_base(c.model, draw_base(c.n, rng));
    Dataset d;
    d.y = s.y;
    d.x = s.x;
    d.w = Eigen::MatrixXd::Ones(c.n, 1);
    d.w_names = {"intercept"};
    std::optional<FitResult> f;
    try {
      f = fit_rank_rank(d, c.rule);
    } catch (const Error&) {
      return;
    }
    for (std::size_t k = 0; k < m; ++k) {
      RepOutcome& o = outcomes[r * m + k];
      try {
        Interval ci{};
        double se = 0.0;
        switch (c.methods[k]) {
          case Method::Plugin: {
            const InferenceReport rep = plugin_variance_rho(*f, d, c.alpha).report;
            ci = rep.ci[0];
            se = rep.se(0);
            break;
          }
          case Method::Hom:
          case Method::EW: {
            const InferenceReport rep = c.methods[k] == Method::Hom
                                            ? naive_hom_variance(*f, d, c.alpha)
                                            : naive_ew_variance(*f, d, c.alpha);
            ci = rep.ci[0];
            se = rep.se(0);
            break;
          }
          case Method::Bootstrap: {
            BootstrapPlan plan;
            plan.reps = c.bootstrap_reps;
            plan.seed = Rng::stream(c.seed ^ 0xb007'5742'a9c1'0de5ULL, r)();
            plan.ci_kind = c.bootstrap_ci;
            plan.alpha = c.alpha;
            plan.threads = 1;
            const BootstrapDraws draws = bootstrap_distribution(d, Spec::RankRank, c.rule, plan);
            const InferenceReport rep = bootstrap_report(draws, f->coefficients(), d.n(), plan);
            ci = rep.ci[0];
            se = rep.se(0);
            break;
          }
        }
        o.ok = true;
        o.covered = ci.lower <= result.truth && result.truth <= ci.upper;
        o.width = ci.upper - ci.lower;
        o.se = se;
      } catch (const Error&) {
        o.ok = false;
      }
    }
  });

  for (std::size_t k = 0; k < m; ++k) {
    CoverageRow row{c.methods[k]};
    int ok = 0;
    int covered = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      const RepOutcome& o = outcomes[r * m + k];
      if (!o.ok) {
        ++row.failures;
        continue;
      }
      ++ok;
      covered += o.covered ? 1 : 0;
      row.mean_width += o.width;
      row.mean_se += o.se;
    }
    if (ok > 0) {
      row.coverage = static_cast<double>(covered) / ok;
      row.mean_width /= ok;
      row.mean_se /= ok;
      row.mc_se = std::sqrt(row.coverage * (1.0 - row.coverage) / ok);
    }
    result.rows.push_back(row);
  }
  return result;
}

}  // namespace rankreg
