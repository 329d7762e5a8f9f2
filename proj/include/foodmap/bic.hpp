#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "foodmap/count_table.hpp"
#include "foodmap/dag.hpp"
#include "foodmap/errors.hpp"

namespace foodmap {

// Floor for the MLE noise variance so the log stays finite when a family
// fits its child exactly (constant column, duplicated parent, tiny N).
inline constexpr double kVarianceFloor = 1e-9;

// Score of one node given its parent set under a linear Gaussian model:
//   child = intercept + sum_j coef_j * parent_j + noise.
struct FamilyScore {
  double score = 0.0;
  double log_likelihood = 0.0;
  double penalty = 0.0;
  int param_count = 0;
  bool singular = false;
};

// BIC contribution of a single family. Coefficients come from least
// squares; sigma^2 is RSS/N floored at kVarianceFloor. param_count covers
// the intercept, one coefficient per parent, and the variance, so the
// penalty is (|parents| + 2)/2 * log N. A rank-deficient design is scored
// through the pseudoinverse and flagged rather than rejected.
inline FamilyScore family_bic(const CountTable& table, int child,
                              std::uint32_t parent_mask) {
  const int n_cols = static_cast<int>(table.n_cols);
  if (child < 0 || child >= n_cols)
    throw Error("family_bic: child index out of range");
  if (parent_mask & (1u << child))
    throw Error("family_bic: child listed among its own parents");
  if (n_cols < 32 && (parent_mask >> n_cols) != 0)
    throw Error("family_bic: parent mask references unknown column");

  std::vector<int> parents;
  for (int j = 0; j < n_cols; ++j)
    if (parent_mask & (1u << j)) parents.push_back(j);

  const int n = static_cast<int>(table.n_rows);
  const int p = static_cast<int>(parents.size());
  if (n < p + 3)
    throw InsufficientRows("family_bic: " + std::to_string(n) +
                           " rows cannot support " + std::to_string(p) +
                           " parents (need " + std::to_string(p + 3) + ")");

  Eigen::MatrixXd x(n, p + 1);
  Eigen::VectorXd y(n);
  for (int r = 0; r < n; ++r) {
    x(r, 0) = 1.0;
    for (int j = 0; j < p; ++j)
      x(r, j + 1) = table.at(r, parents[static_cast<std::size_t>(j)]);
    y(r) = table.at(r, child);
  }

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(x);
  Eigen::VectorXd beta = cod.solve(y);

  FamilyScore out;
  out.singular = cod.rank() < x.cols();

  const double rss = (y - x * beta).squaredNorm();
  const double sigma2 = std::max(rss / static_cast<double>(n), kVarianceFloor);
  out.log_likelihood =
      -0.5 * n * std::log(2.0 * std::numbers::pi * sigma2) -
      rss / (2.0 * sigma2);
  out.param_count = p + 2;
  out.penalty = 0.5 * out.param_count * std::log(static_cast<double>(n));
  out.score = out.log_likelihood - out.penalty;
  return out;
}

// Network score: the sum of per-family scores, which is what makes edge
// moves cheap to evaluate (only touched families get re-scored).
struct ScoreReport {
  double total_bic = 0.0;
  double log_likelihood = 0.0;
  double penalty = 0.0;
  int param_count = 0;
  bool any_singular = false;
  std::vector<FamilyScore> family_scores;
};

inline ScoreReport bic_score(const CountTable& table, const Dag& dag) {
  if (dag.node_count() != table.n_cols)
    throw Error("bic_score: graph size does not match table width");
  ScoreReport report;
  report.family_scores.reserve(table.n_cols);
  for (int child = 0; child < static_cast<int>(table.n_cols); ++child) {
    FamilyScore fs = family_bic(table, child, dag.parent_mask(child));
    report.total_bic += fs.score;
    report.log_likelihood += fs.log_likelihood;
    report.penalty += fs.penalty;
    report.param_count += fs.param_count;
    report.any_singular = report.any_singular || fs.singular;
    report.family_scores.push_back(fs);
  }
  return report;
}

}  // namespace foodmap
