#include "rankreg/inference.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <Eigen/Cholesky>

#include "rankreg/comparison_sums.hpp"
#include "rankreg/errors.hpp"
#include "rankreg/normal.hpp"

namespace rankreg {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Plugin: return "plugin";
    case Method::Hom: return "hom";
    case Method::EW: return "ew";
    case Method::Bootstrap: return "bootstrap";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "plugin") return Method::Plugin;
  if (name == "hom") return Method::Hom;
  if (name == "ew") return Method::EW;
  if (name == "bootstrap") return Method::Bootstrap;
  throw InvalidInput("unknown inference method '" + std::string(name) + "'");
}

Interval confidence_interval(double estimate, double se, Index n, double alpha) {
  if (n < 1) throw InvalidInput("confidence_interval: n must be positive");
  if (!(se >= 0.0)) throw InvalidInput("confidence_interval: se must be non-negative");
  const double z = two_sided_critical_value(alpha);
  const double half = z * se / std::sqrt(static_cast<double>(n));
  return {estimate - half, estimate + half};
}

InferenceReport make_report(Method method, std::vector<std::string> names,
                            VectorXd estimates, MatrixXd variance, Index n,
                            double alpha) {
  InferenceReport r;
  r.method = method;
  r.alpha = alpha;
  r.n = n;
  r.names = std::move(names);
  r.estimates = std::move(estimates);
  r.variance = 0.5 * (variance + variance.transpose());
  r.se = r.variance.diagonal().cwiseMax(0.0).cwiseSqrt();
  r.ci.reserve(static_cast<std::size_t>(r.estimates.size()));
  for (Index k = 0; k < r.estimates.size(); ++k) {
    r.ci.push_back(confidence_interval(r.estimates(k), r.se(k), n, alpha));
  }
  return r;
}

InferenceReport linear_combo_inference(const MatrixXd& sigma, const VectorXd& weights,
                                       const VectorXd& estimates, Index n, double alpha) {
  if (sigma.rows() != sigma.cols() || sigma.rows() != weights.size() ||
      weights.size() != estimates.size()) {
    throw InvalidInput("linear_combo_inference: shapes do not conform");
  }
  MatrixXd var(1, 1);
  var(0, 0) = std::max(0.0, weights.dot(sigma * weights));
  VectorXd est(1);
  est(0) = weights.dot(estimates);
  return make_report(Method::Plugin, {"combination"}, std::move(est), std::move(var), n,
                     alpha);
}

namespace {

VectorXd as_vector(const RankVector& r) {
  return Eigen::Map<const VectorXd>(r.data(), static_cast<Index>(r.size()));
}

std::span<const double> as_span(const VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

void check_fit_matches(const FitResult& fit, const Dataset& d) {
  d.validate(fit.spec);
  if (fit.residuals.size() != d.n() || fit.groups.empty() ||
      fit.groups.front().beta.size() != d.p()) {
    throw InvalidInput("fit does not belong to this dataset (shape mismatch)");
  }
  if (fit.has_ranked_regressor() &&
      rank_transform(as_span(d.x), fit.rule) != fit.ranks_x) {
    throw InvalidInput("fit does not belong to this dataset (ranks of x differ)");
  }
  if (fit.has_ranked_outcome() &&
      rank_transform(as_span(d.y), fit.rule) != fit.ranks_y) {
    throw InvalidInput("fit does not belong to this dataset (ranks of y differ)");
  }
}

MatrixXd drop_column(const MatrixXd& w, Index col) {
  MatrixXd out(w.rows(), w.cols() - 1);
  Index k = 0;
  for (Index c = 0; c < w.cols(); ++c) {
    if (c != col) out.col(k++) = w.col(c);
  }
  return out;
}

std::string out_name(const FitResult& fit, const Dataset& d, const GroupFit& g, Index l) {
  std::string base;
  if (fit.has_ranked_regressor() && l == 0) {
    base = "rho";
  } else {
    const Index c = fit.has_ranked_regressor() ? l - 1 : l;
    base = static_cast<std::size_t>(c) < d.w_names.size() ? d.w_names[static_cast<std::size_t>(c)]
                                                          : "w" + std::to_string(c + 1);
  }
  return g.label.empty() ? base : base + "|" + g.label;
}

// Residualised regressor of coefficient l in group g, evaluated on every row,
// and the coefficient multiplying R^X inside it.
struct Regressor {
  VectorXd xi;
  double rank_coef;
};

Regressor residualised_regressor(const FitResult& fit, const GroupFit& g, const Dataset& d,
                                 const VectorXd& rx, Index l) {
  if (fit.has_ranked_regressor()) {
    if (l == 0) return {rx - d.w * g.gamma, 1.0};
    const Index c = l - 1;
    const Projection& pr = g.aux[static_cast<std::size_t>(c)];
    VectorXd xi = d.w.col(c) - pr.tau * rx - drop_column(d.w, c) * pr.delta;
    return {std::move(xi), -pr.tau};
  }
  const Projection& pr = g.aux[static_cast<std::size_t>(l)];
  return {d.w.col(l) - drop_column(d.w, l) * pr.delta, 0.0};
}

InfluenceRows compute_influence(const FitResult& fit, const Dataset& d, bool first_only) {
  const Index n = d.n();
  const double nd = static_cast<double>(n);
  const Index per_group = fit.coefficients_per_group();
  const Index total = first_only ? 1 : per_group * static_cast<Index>(fit.groups.size());

  std::optional<ComparisonSums> sums_x;
  std::optional<ComparisonSums> sums_y;
  VectorXd rx;
  if (fit.has_ranked_regressor()) {
    sums_x.emplace(as_span(d.x), fit.rule);
    rx = as_vector(fit.ranks_x);
  }
  if (fit.has_ranked_outcome()) sums_y.emplace(as_span(d.y), fit.rule);

  InfluenceRows out;
  out.psi = MatrixXd::Zero(n, total);
  out.h1 = MatrixXd::Zero(n, total);
  out.h2 = MatrixXd::Zero(n, total);
  out.h3 = MatrixXd::Zero(n, total);
  out.scale = VectorXd::Zero(total);

  const VectorXd& e = fit.residuals;
  Index col = 0;
  for (const GroupFit& g : fit.groups) {
    VectorXd mask = VectorXd::Zero(n);
    for (Index i : g.rows) mask(i) = 1.0;
    const VectorXd masked_e = mask.cwiseProduct(e);
    const VectorXd w_beta = d.w * g.beta;
    std::optional<VectorXd> sx_e;
    if (fit.has_ranked_regressor()) sx_e = (*sums_x)(masked_e);

    for (Index l = 0; l < per_group && col < total; ++l, ++col) {
      const Regressor reg = residualised_regressor(fit, g, d, rx, l);
      const VectorXd c = mask.cwiseProduct(reg.xi);
      const double scale = c.dot(reg.xi) / nd;
      const double reference =
          (fit.has_ranked_regressor() && l == 0)
              ? mask.cwiseProduct(rx).squaredNorm() / nd
              : mask.cwiseProduct(d.w.col(fit.has_ranked_regressor() ? l - 1 : l))
                        .squaredNorm() / nd;
      if (!(scale > 1e-12 * std::max(reference, 1e-300))) {
        std::string where = "coefficient " + out_name(fit, d, g, l);
        throw AssumptionViolation(where +
                                  ": residualised regressor has zero variance");
      }
      out.scale(col) = scale;

      out.h1.col(col) = masked_e.cwiseProduct(reg.xi);

      VectorXd h2 = fit.has_ranked_outcome() ? (*sums_y)(c)
                                             : VectorXd::Constant(n, c.dot(d.y));
      if (fit.has_ranked_regressor()) h2 -= g.rho * (*sums_x)(c);
      h2.array() -= c.dot(w_beta);
      out.h2.col(col) = h2 / nd;

      if (fit.has_ranked_regressor()) {
        const double e_xi = masked_e.dot(reg.xi);
        const double e_rx = masked_e.dot(rx);
        VectorXd h3 = reg.rank_coef * (*sx_e);
        h3.array() += e_xi - reg.rank_coef * e_rx;
        out.h3.col(col) = h3 / nd;
      }
      out.psi.col(col) = (out.h1.col(col) + out.h2.col(col) + out.h3.col(col)) / scale;
    }
  }
  return out;
}

}  // namespace

namespace {

PluginResult plugin_from_rows(const FitResult& fit, const Dataset& d, InfluenceRows rows,
                              bool first_only, double alpha) {
  const double nd = static_cast<double>(d.n());
  MatrixXd sigma = rows.psi.transpose() * rows.psi / nd;
  VectorXd est = fit.coefficients();
  std::vector<std::string> names = fit.coefficient_names(d.w_names);
  if (first_only) {
    est.conservativeResize(1);
    names.resize(1);
  }
  PluginResult res{make_report(Method::Plugin, std::move(names), std::move(est),
                               std::move(sigma), d.n(), alpha),
                   std::move(rows)};
  return res;
}

void require_spec(const FitResult& fit, Spec spec, const char* what) {
  if (fit.spec != spec) {
    throw InvalidInput(std::string(what) + ": fit has spec " +
                       std::string(to_string(fit.spec)) + ", expected " +
                       std::string(to_string(spec)));
  }
}

}  // namespace

PluginResult plugin_variance_rho(const FitResult& fit, const Dataset& d, double alpha) {
  require_spec(fit, Spec::RankRank, "plugin_variance_rho");
  check_fit_matches(fit, d);
  return plugin_from_rows(fit, d, compute_influence(fit, d, true), true, alpha);
}

PluginResult plugin_sigma_joint(const FitResult& fit, const Dataset& d, double alpha) {
  require_spec(fit, Spec::RankRank, "plugin_sigma_joint");
  check_fit_matches(fit, d);
  return plugin_from_rows(fit, d, compute_influence(fit, d, false), false, alpha);
}

PluginResult plugin_sigma_joint_groups(const FitResult& fit, const Dataset& d, double alpha) {
  require_spec(fit, Spec::RankRankByGroup, "plugin_sigma_joint_groups");
  check_fit_matches(fit, d);
  return plugin_from_rows(fit, d, compute_influence(fit, d, false), false, alpha);
}

PluginResult plugin_variance_level_rank(const FitResult& fit, const Dataset& d, double alpha) {
  require_spec(fit, Spec::LevelRank, "plugin_variance_level_rank");
  check_fit_matches(fit, d);
  return plugin_from_rows(fit, d, compute_influence(fit, d, false), false, alpha);
}

PluginResult plugin_variance_rank_level(const FitResult& fit, const Dataset& d, double alpha) {
  require_spec(fit, Spec::RankLevel, "plugin_variance_rank_level");
  check_fit_matches(fit, d);
  return plugin_from_rows(fit, d, compute_influence(fit, d, false), false, alpha);
}

PluginResult plugin_inference(const FitResult& fit, const Dataset& d, double alpha) {
  switch (fit.spec) {
    case Spec::RankRank: return plugin_sigma_joint(fit, d, alpha);
    case Spec::RankRankByGroup: return plugin_sigma_joint_groups(fit, d, alpha);
    case Spec::LevelRank: return plugin_variance_level_rank(fit, d, alpha);
    case Spec::RankLevel: return plugin_variance_rank_level(fit, d, alpha);
  }
  throw InvalidInput("plugin_inference: unknown spec");
}

namespace {

InferenceReport naive_variance(const FitResult& fit, const Dataset& d, double alpha,
                               Method method) {
  check_fit_matches(fit, d);
  const Index n = d.n();
  const double nd = static_cast<double>(n);
  const Index per_group = fit.coefficients_per_group();
  const Index total = per_group * static_cast<Index>(fit.groups.size());
  MatrixXd var = MatrixXd::Zero(total, total);
  Index offset = 0;
  for (const GroupFit& g : fit.groups) {
    const Index m = static_cast<Index>(g.rows.size());
    MatrixXd z(m, per_group);
    VectorXd e(m);
    for (Index k = 0; k < m; ++k) {
      const Index i = g.rows[static_cast<std::size_t>(k)];
      if (fit.has_ranked_regressor()) {
        z(k, 0) = fit.ranks_x[static_cast<std::size_t>(i)];
        z.row(k).tail(d.p()) = d.w.row(i);
      } else {
        z.row(k) = d.w.row(i);
      }
      e(k) = fit.residuals(i);
    }
    const MatrixXd bread =
        (z.transpose() * z / nd).ldlt().solve(MatrixXd::Identity(per_group, per_group));
    MatrixXd block;
    if (method == Method::Hom) {
      block = (e.squaredNorm() / static_cast<double>(m)) * bread;
    } else {
      const MatrixXd ze = e.asDiagonal() * z;
      const MatrixXd meat = ze.transpose() * ze / nd;
      block = bread * meat * bread;
    }
    var.block(offset, offset, per_group, per_group) = block;
    offset += per_group;
  }
  return make_report(method, fit.coefficient_names(d.w_names), fit.coefficients(),
                     std::move(var), n, alpha);
}

}  // namespace

InferenceReport naive_hom_variance(const FitResult& fit, const Dataset& d, double alpha) {
  return naive_variance(fit, d, alpha, Method::Hom);
}

InferenceReport naive_ew_variance(const FitResult& fit, const Dataset& d, double alpha) {
  return naive_variance(fit, d, alpha, Method::EW);
}

SweepTable omega_sweep(const Dataset& d, Spec spec, std::span<const double> grid,
                       double alpha) {
  if (grid.empty()) throw InvalidInput("omega_sweep: grid is empty");
  SweepTable table;
  for (double omega : grid) {
    const FitResult f = fit(spec, d, TieRule(omega));
    const PluginResult pr = plugin_inference(f, d, alpha);
    if (table.names.empty()) table.names = pr.report.names;
    table.rows.push_back({omega, pr.report.estimates, pr.report.se});
  }
  table.grid_average = VectorXd::Zero(table.rows.front().estimates.size());
  for (const auto& row : table.rows) table.grid_average += row.estimates;
  table.grid_average /= static_cast<double>(table.rows.size());
  return table;
}

}  // namespace rankreg
