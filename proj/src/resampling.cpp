#include "rankreg/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "rankreg/errors.hpp"
#include "rankreg/normal.hpp"
#include "rankreg/parallel.hpp"
#include "rankreg/rng.hpp"

namespace rankreg {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view to_string(CiKind k) {
  return k == CiKind::Percentile ? "percentile" : "normal";
}

CiKind parse_ci_kind(std::string_view name) {
  if (name == "percentile") return CiKind::Percentile;
  if (name == "normal") return CiKind::NormalWithBootstrapSE;
  throw InvalidInput("unknown bootstrap interval kind '" + std::string(name) + "'");
}

void BootstrapPlan::validate() const {
  if (reps < 1) throw InvalidInput("bootstrap reps must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
}

namespace {

std::vector<Index> draw_indices(Index n, Rng& rng) {
  std::vector<Index> rows(static_cast<std::size_t>(n));
  for (auto& r : rows) r = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
  return rows;
}

}  // namespace

std::vector<Index> bootstrap_indices(Index n, std::uint64_t seed, std::uint64_t replicate) {
  if (n < 1) throw InvalidInput("bootstrap_indices: n must be positive");
  Rng rng = Rng::stream(seed, replicate);
  return draw_indices(n, rng);
}

BootstrapDraws bootstrap_distribution(const Dataset& d, const ReplicateStatistic& stat,
                                      std::vector<std::string> names,
                                      const BootstrapPlan& plan) {
  plan.validate();
  const Index n = d.n();
  if (n < 2) throw InvalidInput("bootstrap needs at least two observations");
  const auto reps = static_cast<std::size_t>(plan.reps);
  const int budget = std::max(1, plan.reps / 10);

  std::vector<std::optional<VectorXd>> results(reps);
  std::vector<int> rejections(reps, 0);
  parallel_for(reps, plan.threads, [&](std::size_t b) {
    Rng rng = Rng::stream(plan.seed, b);
    // A single replicate may not spend more than the whole budget.
    for (int attempt = 0; attempt <= budget; ++attempt) {
      const std::vector<Index> rows = draw_indices(n, rng);
      try {
        results[b] = stat(d.subset(rows));
        return;
      } catch (const SingularDesign&) {
      } catch (const AssumptionViolation&) {
      } catch (const DegenerateInput&) {
      } catch (const InvalidInput&) {
        // e.g. a group that vanished from the resample
      }
      ++rejections[b];
    }
  });

  BootstrapDraws out;
  out.names = std::move(names);
  for (int r : rejections) out.rejected += r;
  if (out.rejected > plan.reps / 10 ||
      std::any_of(results.begin(), results.end(), [](const auto& r) { return !r; })) {
    throw ResamplingFailure("bootstrap rejected " + std::to_string(out.rejected) +
                            " degenerate resamples, more than 10% of " +
                            std::to_string(plan.reps));
  }
  const Index q = results.front()->size();
  out.replicates.resize(static_cast<Index>(reps), q);
  for (std::size_t b = 0; b < reps; ++b) {
    out.replicates.row(static_cast<Index>(b)) = results[b]->transpose();
  }
  return out;
}

BootstrapDraws bootstrap_distribution(const Dataset& d, Spec spec, TieRule rule,
                                      const BootstrapPlan& plan) {
  d.validate(spec);
  const FitResult base = fit(spec, d, rule);
  const Index q = base.coefficients().size();
  const ReplicateStatistic stat = [spec, rule, q](const Dataset& r) {
    VectorXd c = fit(spec, r, rule).coefficients();
    // A group lost from the resample changes the coefficient count.
    if (c.size() != q) throw InvalidInput("resample changed the coefficient layout");
    return c;
  };
  return bootstrap_distribution(d, stat, base.coefficient_names(d.w_names), plan);
}

double empirical_quantile(std::span<const double> values, double q) {
  if (values.empty()) throw InvalidInput("empirical_quantile: no values");
  if (!(q > 0.0 && q < 1.0)) throw InvalidInput("empirical_quantile: q must lie in (0, 1)");
  std::vector<double> v(values.begin(), values.end());
  const auto b = static_cast<double>(v.size());
  auto k = static_cast<std::size_t>(std::ceil(q * b));
  k = std::clamp<std::size_t>(k, 1, v.size());
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k - 1), v.end());
  return v[k - 1];
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) throw InvalidInput("sample_sd: need at least two values");
  // Shifting by the first value keeps constant input exactly at zero.
  const double shift = values[0];
  double mean = 0.0;
  for (double v : values) mean += v - shift;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - shift - mean) * (v - shift - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

Interval bootstrap_ci(std::span<const double> replicates, double point,
                      const BootstrapPlan& plan) {
  plan.validate();
  if (plan.ci_kind == CiKind::Percentile) {
    if (replicates.size() < 50) {
      throw InvalidInput("percentile interval needs at least 50 replicates");
    }
    return {empirical_quantile(replicates, plan.alpha / 2.0),
            empirical_quantile(replicates, 1.0 - plan.alpha / 2.0)};
  }
  if (replicates.size() < 2) throw InvalidInput("normal interval needs at least 2 replicates");
  const double half = two_sided_critical_value(plan.alpha) * sample_sd(replicates);
  return {point - half, point + half};
}

InferenceReport bootstrap_report(const BootstrapDraws& draws, const VectorXd& point,
                                 Index n, const BootstrapPlan& plan) {
  const MatrixXd& r = draws.replicates;
  if (r.cols() != point.size()) throw InvalidInput("bootstrap_report: shape mismatch");
  const MatrixXd centered = r.rowwise() - r.colwise().mean();
  const double denom = std::max<Index>(r.rows() - 1, 1);
  MatrixXd var = static_cast<double>(n) * centered.transpose() * centered / denom;
  InferenceReport rep = make_report(Method::Bootstrap, draws.names, point, std::move(var), n,
                                    plan.alpha);
  for (Index k = 0; k < point.size(); ++k) {
    std::vector<double> col(r.col(k).data(), r.col(k).data() + r.rows());
    rep.ci[static_cast<std::size_t>(k)] = bootstrap_ci(col, point(k), plan);
  }
  return rep;
}

}  // namespace rankreg
