#pragma once

// Literal O(n^2) reference implementations used to check the library.
//
// Nothing here calls into the library's rank, least-squares or influence
// code: ranks come from averaging the comparison kernel, coefficients from
// the normal equations and every kernel sum is an explicit double loop.

#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline double kernel(double omega, double a, double b) {
  return omega * (a <= b ? 1.0 : 0.0) + (1.0 - omega) * (a < b ? 1.0 : 0.0);
}

/// R_i = n^-1 sum_j I(s_j, s_i) + (1 - omega) / n.
inline VectorXd ranks(const VectorXd& s, double omega) {
  const Index n = s.size();
  VectorXd r(n);
  for (Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Index j = 0; j < n; ++j) acc += kernel(omega, s(j), s(i));
    r(i) = acc / static_cast<double>(n) + (1.0 - omega) / static_cast<double>(n);
  }
  return r;
}

inline VectorXd normal_equations(const MatrixXd& z, const VectorXd& r) {
  if (z.cols() == 0) return VectorXd(0);
  return (z.transpose() * z).fullPivLu().solve(z.transpose() * r);
}

inline MatrixXd rows_of(const MatrixXd& m, const std::vector<Index>& rows) {
  MatrixXd out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Index>(k)) = m.row(rows[k]);
  return out;
}

inline MatrixXd without(const MatrixXd& w, Index col) {
  MatrixXd out(w.rows(), w.cols() - 1);
  for (Index c = 0, k = 0; c < w.cols(); ++c) {
    if (c != col) out.col(k++) = w.col(c);
  }
  return out;
}

enum class Kind { RankRank, LevelRank, RankLevel };

struct Result {
  VectorXd coef;   // group-major, (rho_g, beta_g) or beta_g
  MatrixXd sigma;  // n^-1 sum psi psi'
  MatrixXd psi;
};

/// Full plugin covariance by the literal formulas. group[i] in [0, G).
inline Result plugin(Kind kind, const VectorXd& y, const VectorXd& x, const MatrixXd& w,
                     const std::vector<int>& group, int n_groups, double omega) {
  const Index n = y.size();
  const double nd = static_cast<double>(n);
  const Index p = w.cols();
  const bool ranked_x = kind != Kind::RankLevel;
  const bool ranked_y = kind != Kind::LevelRank;
  const VectorXd rx = ranked_x ? ranks(x, omega) : VectorXd();
  const VectorXd outcome = ranked_y ? ranks(y, omega) : y;
  const Index per = p + (ranked_x ? 1 : 0);

  Result res;
  res.coef = VectorXd::Zero(per * n_groups);
  res.psi = MatrixXd::Zero(n, per * n_groups);

  for (int g = 0; g < n_groups; ++g) {
    std::vector<Index> rows;
    for (Index i = 0; i < n; ++i) {
      if (group[static_cast<std::size_t>(i)] == g) rows.push_back(i);
    }
    const MatrixXd wg = rows_of(w, rows);
    MatrixXd z(static_cast<Index>(rows.size()), per);
    if (ranked_x) {
      z.col(0) = rows_of(rx, rows);
      z.rightCols(p) = wg;
    } else {
      z = wg;
    }
    const VectorXd theta = normal_equations(z, rows_of(outcome, rows));
    res.coef.segment(g * per, per) = theta;
    const double rho = ranked_x ? theta(0) : 0.0;
    const VectorXd beta = theta.tail(p);

    VectorXd eps = VectorXd::Zero(n);  // zero outside the group
    for (Index i : rows) eps(i) = outcome(i) - rho * (ranked_x ? rx(i) : 0.0) - w.row(i).dot(beta);

    for (Index l = 0; l < per; ++l) {
      // xi(r, j): residualised regressor of coefficient l with the rank of
      // observation j replaced by r.
      VectorXd coef_w;     // coefficients on W (or W_{-c})
      double coef_r = 0.0; // coefficient on the rank
      Index c = -1;        // W column of the coefficient, -1 for rho
      if (ranked_x && l == 0) {
        coef_w = normal_equations(wg, rows_of(rx, rows));
        coef_r = 1.0;
      } else {
        c = ranked_x ? l - 1 : l;
        const MatrixXd others = without(wg, c);
        if (ranked_x) {
          MatrixXd zz(others.rows(), others.cols() + 1);
          zz.col(0) = rows_of(rx, rows);
          zz.rightCols(others.cols()) = others;
          const VectorXd pr = normal_equations(zz, wg.col(c));
          coef_r = -pr(0);
          coef_w = pr.tail(others.cols());
        } else {
          coef_w = normal_equations(others, wg.col(c));
        }
      }
      auto xi = [&](double r, Index j) {
        if (c < 0) return r - w.row(j).dot(coef_w);
        double v = w(j, c) + coef_r * r;
        Index k = 0;
        for (Index cc = 0; cc < p; ++cc) {
          if (cc != c) v -= w(j, cc) * coef_w(k++);
        }
        return v;
      };

      double scale = 0.0;
      for (Index j : rows) {
        const double v = xi(ranked_x ? rx(j) : 0.0, j);
        scale += v * v;
      }
      scale /= nd;

      const Index col = g * per + l;
      for (Index i = 0; i < n; ++i) {
        const double h1 = group[static_cast<std::size_t>(i)] == g
                              ? eps(i) * xi(ranked_x ? rx(i) : 0.0, i)
                              : 0.0;
        double h2 = 0.0;
        double h3 = 0.0;
        for (Index j : rows) {
          const double xij = xi(ranked_x ? rx(j) : 0.0, j);
          double a = ranked_y ? kernel(omega, y(i), y(j)) : y(j);
          if (ranked_x) a -= rho * kernel(omega, x(i), x(j));
          a -= w.row(j).dot(beta);
          h2 += a * xij;
          if (ranked_x) h3 += eps(j) * xi(kernel(omega, x(i), x(j)), j);
        }
        res.psi(i, col) = (h1 + h2 / nd + h3 / nd) / scale;
      }
    }
  }
  res.sigma = res.psi.transpose() * res.psi / nd;
  return res;
}

}  // namespace oracle
