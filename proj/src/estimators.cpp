#include "rankreg/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include <Eigen/QR>

#include "rankreg/errors.hpp"

namespace rankreg {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view to_string(Spec spec) {
  switch (spec) {
    case Spec::RankRank: return "rank-rank";
    case Spec::RankRankByGroup: return "rank-rank-group";
    case Spec::LevelRank: return "level-rank";
    case Spec::RankLevel: return "rank-level";
  }
  return "unknown";
}

Spec parse_spec(std::string_view name) {
  if (name == "rank-rank") return Spec::RankRank;
  if (name == "rank-rank-group") return Spec::RankRankByGroup;
  if (name == "level-rank") return Spec::LevelRank;
  if (name == "rank-level") return Spec::RankLevel;
  throw InvalidInput("unknown regression spec '" + std::string(name) + "'");
}

GroupLabels GroupLabels::from_strings(const std::vector<std::string>& labels) {
  GroupLabels g;
  std::map<std::string, int> ids;
  for (const auto& s : labels) ids.emplace(s, 0);
  int next = 0;
  for (auto& [label, id] : ids) {
    id = next++;
    g.names.push_back(label);
  }
  g.index.reserve(labels.size());
  for (const auto& s : labels) g.index.push_back(ids.at(s));
  return g;
}

GroupLabels GroupLabels::from_integers(std::span<const long long> labels) {
  GroupLabels g;
  std::map<long long, int> ids;
  for (long long v : labels) ids.emplace(v, 0);
  int next = 0;
  for (auto& [label, id] : ids) {
    id = next++;
    g.names.push_back(std::to_string(label));
  }
  g.index.reserve(labels.size());
  for (long long v : labels) g.index.push_back(ids.at(v));
  return g;
}

namespace {

void require_finite(const Eigen::Ref<const MatrixXd>& m, const char* what) {
  if (!m.allFinite()) {
    throw InvalidInput(std::string(what) + " contains non-finite values");
  }
}

}  // namespace

void Dataset::validate(Spec spec) const {
  const Index n = y.size();
  require_finite(y, "y");
  if (spec != Spec::RankLevel) {
    if (x.size() != n) throw InvalidInput("x and y differ in length");
    require_finite(x, "x");
  }
  if (w.rows() != n) throw InvalidInput("W has the wrong number of rows");
  require_finite(w, "W");
  if (n < w.cols() + 2) {
    throw InvalidInput("need at least p + 2 = " + std::to_string(w.cols() + 2) +
                       " observations, got " + std::to_string(n));
  }
  if (spec == Spec::RankLevel && w.cols() == 0) {
    throw InvalidInput("rank-level regression needs at least one regressor in W");
  }
  if (spec == Spec::RankRankByGroup) {
    if (!groups) throw InvalidInput("rank-rank-group regression needs group labels");
    if (static_cast<Index>(groups->index.size()) != n) {
      throw InvalidInput("group labels have the wrong length");
    }
    std::vector<Index> counts(static_cast<std::size_t>(groups->count()), 0);
    for (int g : groups->index) {
      if (g < 0 || g >= groups->count()) throw InvalidInput("group id out of range");
      ++counts[static_cast<std::size_t>(g)];
    }
    for (std::size_t g = 0; g < counts.size(); ++g) {
      if (counts[g] < 2) {
        throw InvalidInput("group '" + groups->names[g] +
                           "' has fewer than two observations");
      }
    }
  }
}

Dataset Dataset::subset(std::span<const Index> rows) const {
  Dataset out;
  const Index m = static_cast<Index>(rows.size());
  out.y.resize(m);
  out.x.resize(x.size() == 0 ? 0 : m);
  out.w.resize(m, w.cols());
  out.w_names = w_names;
  for (Index k = 0; k < m; ++k) {
    const Index r = rows[static_cast<std::size_t>(k)];
    out.y(k) = y(r);
    if (x.size() != 0) out.x(k) = x(r);
    out.w.row(k) = w.row(r);
  }
  if (groups) {
    GroupLabels g;
    g.names = groups->names;
    g.index.reserve(rows.size());
    for (Index r : rows) g.index.push_back(groups->index[static_cast<std::size_t>(r)]);
    out.groups = std::move(g);
  }
  return out;
}

LeastSquares least_squares(const MatrixXd& z, const VectorXd& r) {
  if (z.rows() != r.size()) {
    throw InvalidInput("least_squares: design and response differ in length");
  }
  const Index q = z.cols();
  if (q == 0) return {VectorXd(0), 1.0};
  if (z.rows() < q) {
    throw SingularDesign("design has fewer rows than columns", q - 1);
  }
  // Equilibrate columns so the conditioning test is scale free.
  VectorXd scale(q);
  for (Index c = 0; c < q; ++c) {
    scale(c) = z.col(c).norm();
    if (scale(c) == 0.0) {
      throw SingularDesign("design column " + std::to_string(c) + " is identically zero", c);
    }
  }
  const MatrixXd zs = z * scale.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<MatrixXd> qr(zs);
  const auto& packed = qr.matrixQR();
  const auto& perm = qr.colsPermutation().indices();
  const double top = std::abs(packed(0, 0));
  double rcond = 1.0;
  for (Index k = 0; k < q; ++k) {
    const double ratio = std::abs(packed(k, k)) / top;
    rcond = ratio * ratio;
    if (!(rcond >= kSingularRcond)) {
      const Index col = perm(k);
      throw SingularDesign("design column " + std::to_string(col) +
                               " is (numerically) a linear combination of the others",
                           col);
    }
  }
  VectorXd coef = qr.solve(r);
  coef = coef.cwiseQuotient(scale);
  return {std::move(coef), rcond};
}

namespace {

MatrixXd drop_column(const MatrixXd& w, Index col) {
  MatrixXd out(w.rows(), w.cols() - 1);
  Index k = 0;
  for (Index c = 0; c < w.cols(); ++c) {
    if (c != col) out.col(k++) = w.col(c);
  }
  return out;
}

MatrixXd prepend_column(const VectorXd& first, const MatrixXd& rest) {
  MatrixXd out(first.size(), rest.cols() + 1);
  out.col(0) = first;
  out.rightCols(rest.cols()) = rest;
  return out;
}

// Regression with a ranked regressor on the given rows: outcome on (rx, W),
// the first stage rx on W and the projections of each W_l on (rx, W_{-l}).
void fit_ranked_regressor(const MatrixXd& w, const VectorXd& rx,
                          const VectorXd& outcome, GroupFit& out) {
  out.gamma = ols(w, rx);
  const VectorXd nu = rx - w * out.gamma;
  const double scale = std::max(rx.squaredNorm(), 1e-300);
  if (nu.squaredNorm() <= 1e-12 * scale) {
    throw AssumptionViolation(
        "the rank of x is a linear combination of the covariates (residual "
        "variance of the first stage is zero)");
  }
  const LeastSquares joint = least_squares(prepend_column(rx, w), outcome);
  out.rho = joint.coef(0);
  out.beta = joint.coef.tail(w.cols());
  out.rcond = joint.rcond;
  out.aux.clear();
  for (Index l = 0; l < w.cols(); ++l) {
    const VectorXd proj = ols(prepend_column(rx, drop_column(w, l)), w.col(l));
    out.aux.push_back({proj(0), proj.tail(w.cols() - 1)});
  }
}

void fit_levels_only(const MatrixXd& w, const VectorXd& outcome, GroupFit& out) {
  const LeastSquares ls = least_squares(w, outcome);
  out.beta = ls.coef;
  out.rcond = ls.rcond;
  out.aux.clear();
  for (Index l = 0; l < w.cols(); ++l) {
    out.aux.push_back({0.0, ols(drop_column(w, l), w.col(l))});
  }
}

template <class E>
[[noreturn]] void rethrow_in_group(const E& e, const std::string& label) {
  throw E("group '" + label + "': " + e.what());
}

VectorXd to_vector(const RankVector& r) {
  return Eigen::Map<const VectorXd>(r.data(), static_cast<Index>(r.size()));
}

}  // namespace

FitResult fit_with_ranks(Spec spec, const Dataset& d, TieRule rule,
                         RankVector ranks_x, RankVector ranks_y) {
  d.validate(spec);
  const Index n = d.n();
  FitResult res{spec, rule, {}, std::move(ranks_x), std::move(ranks_y), VectorXd::Zero(n)};
  if (res.has_ranked_regressor() && static_cast<Index>(res.ranks_x.size()) != n) {
    throw InvalidInput("ranks of x have the wrong length");
  }
  if (res.has_ranked_outcome() && static_cast<Index>(res.ranks_y.size()) != n) {
    throw InvalidInput("ranks of y have the wrong length");
  }

  const VectorXd outcome = res.has_ranked_outcome() ? to_vector(res.ranks_y) : d.y;
  const VectorXd rx = res.has_ranked_regressor() ? to_vector(res.ranks_x) : VectorXd();

  std::vector<std::pair<std::string, std::vector<Index>>> blocks;
  if (spec == Spec::RankRankByGroup) {
    blocks.resize(static_cast<std::size_t>(d.groups->count()));
    for (int g = 0; g < d.groups->count(); ++g) {
      blocks[static_cast<std::size_t>(g)].first = d.groups->names[static_cast<std::size_t>(g)];
    }
    for (Index i = 0; i < n; ++i) {
      blocks[static_cast<std::size_t>(d.groups->index[static_cast<std::size_t>(i)])]
          .second.push_back(i);
    }
  } else {
    std::vector<Index> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), Index{0});
    blocks.emplace_back("", std::move(all));
  }

  for (auto& [label, rows] : blocks) {
    const Index m = static_cast<Index>(rows.size());
    MatrixXd w(m, d.p());
    VectorXd out(m);
    VectorXd rxg(res.has_ranked_regressor() ? m : 0);
    for (Index k = 0; k < m; ++k) {
      const Index i = rows[static_cast<std::size_t>(k)];
      w.row(k) = d.w.row(i);
      out(k) = outcome(i);
      if (rxg.size() != 0) rxg(k) = rx(i);
    }
    GroupFit gf;
    gf.label = label;
    try {
      if (res.has_ranked_regressor()) {
        fit_ranked_regressor(w, rxg, out, gf);
      } else {
        fit_levels_only(w, out, gf);
      }
    } catch (const SingularDesign& e) {
      if (label.empty()) throw;
      throw SingularDesign("group '" + label + "': " + e.what(), e.column());
    } catch (const AssumptionViolation& e) {
      if (label.empty()) throw;
      rethrow_in_group(e, label);
    }
    const VectorXd fitted =
        res.has_ranked_regressor() ? VectorXd(gf.rho * rxg + w * gf.beta) : VectorXd(w * gf.beta);
    for (Index k = 0; k < m; ++k) {
      res.residuals(rows[static_cast<std::size_t>(k)]) = out(k) - fitted(k);
    }
    gf.rows = std::move(rows);
    res.groups.push_back(std::move(gf));
  }
  return res;
}

FitResult fit(Spec spec, const Dataset& d, TieRule rule) {
  d.validate(spec);
  RankVector rx, ry;
  if (spec != Spec::RankLevel) {
    rx = rank_transform(std::span<const double>(d.x.data(), static_cast<std::size_t>(d.n())), rule);
  }
  if (spec != Spec::LevelRank) {
    ry = rank_transform(std::span<const double>(d.y.data(), static_cast<std::size_t>(d.n())), rule);
  }
  return fit_with_ranks(spec, d, rule, std::move(rx), std::move(ry));
}

FitResult fit_rank_rank(const Dataset& d, TieRule rule) { return fit(Spec::RankRank, d, rule); }

FitResult fit_rank_rank_by_group(const Dataset& d, TieRule rule) {
  return fit(Spec::RankRankByGroup, d, rule);
}

FitResult fit_level_rank(const Dataset& d, TieRule rule) { return fit(Spec::LevelRank, d, rule); }

FitResult fit_rank_level(const Dataset& d, TieRule rule) { return fit(Spec::RankLevel, d, rule); }

Index FitResult::coefficients_per_group() const {
  const Index p = groups.empty() ? 0 : groups.front().beta.size();
  return p + (has_ranked_regressor() ? 1 : 0);
}

VectorXd FitResult::coefficients() const {
  const Index q = coefficients_per_group();
  VectorXd out(q * static_cast<Index>(groups.size()));
  Index k = 0;
  for (const auto& g : groups) {
    if (has_ranked_regressor()) out(k++) = g.rho;
    out.segment(k, g.beta.size()) = g.beta;
    k += g.beta.size();
  }
  return out;
}

std::vector<std::string> FitResult::coefficient_names(
    const std::vector<std::string>& w_names) const {
  std::vector<std::string> out;
  for (const auto& g : groups) {
    const std::string suffix = g.label.empty() ? "" : "|" + g.label;
    if (has_ranked_regressor()) out.push_back("rho" + suffix);
    for (Index l = 0; l < g.beta.size(); ++l) {
      const std::string base = static_cast<std::size_t>(l) < w_names.size()
                                   ? w_names[static_cast<std::size_t>(l)]
                                   : "w" + std::to_string(l + 1);
      out.push_back(base + suffix);
    }
  }
  return out;
}

double mobility_theta(double beta_intercept, double rho, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidInput("mobility_theta: p must lie in [0, 1]");
  }
  return beta_intercept + rho * p;
}

}  // namespace rankreg
