#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "splitreg/dataset.hpp"
#include "splitreg/elastic_net.hpp"
#include "splitreg/errors.hpp"
#include "splitreg/rng.hpp"
#include "splitreg/splitreg.hpp"

using namespace splitreg;

namespace {

Dataset correlated_dataset(int n, int d, double rho, RngStream& stream) {
  Eigen::MatrixXd raw(n, d);
  Eigen::VectorXd common = stream.normals(n);
  for (int j = 0; j < d; ++j)
    raw.col(j) = std::sqrt(rho) * common + std::sqrt(1.0 - rho) * stream.normals(n);
  Eigen::MatrixXd xs = standardize(raw, Eigen::VectorXd::Zero(n)).data.x;
  Eigen::VectorXd beta0 = Eigen::VectorXd::Zero(d);
  beta0[0] = 1.2;
  if (d > 1) beta0[1] = -0.8;
  Eigen::VectorXd y = xs * beta0 + 0.4 * stream.normals(n);
  return Dataset{xs, y, true};
}

// The leave-one-out prediction matrix used by stacking_weights, rebuilt here so
// tests can inspect it directly.
Eigen::MatrixXd loo_predictions(const Dataset& ds, const SplitRegConfig& cfg) {
  const int n = ds.n();
  Eigen::MatrixXd z(n, cfg.groups);
  Eigen::MatrixXd x_loo(n - 1, ds.d());
  Eigen::VectorXd y_loo(n - 1);
  for (int i = 0; i < n; ++i) {
    x_loo.topRows(i) = ds.x.topRows(i);
    x_loo.bottomRows(n - 1 - i) = ds.x.bottomRows(n - 1 - i);
    y_loo.head(i) = ds.y.head(i);
    y_loo.tail(n - 1 - i) = ds.y.tail(n - 1 - i);
    SplitRegFit fit = fit_splitreg(Dataset{x_loo, y_loo, ds.standardized}, cfg);
    for (int g = 0; g < cfg.groups; ++g) z(i, g) = ds.x.row(i).dot(fit.betas[g]);
  }
  return z;
}

}  // namespace

TEST(SplitregObjective, AllZeroModelsCostScaledResponseNorm) {
  RngStream stream(41);
  Dataset ds = correlated_dataset(15, 3, 0.5, stream);
  for (int groups : {1, 2, 3}) {
    std::vector<Eigen::VectorXd> zeros(groups, Eigen::VectorXd::Zero(3));
    SplitRegConfig cfg;
    cfg.groups = groups;
    cfg.lambda_s = 0.0;
    cfg.lambda_d = 0.7;
    EXPECT_DOUBLE_EQ(splitreg_objective(ds, zeros, cfg),
                     groups * ds.y.squaredNorm() / (2.0 * ds.n()));
  }
}

TEST(SplitregObjective, SharedCoordinateChargesTheDiversityPenalty) {
  RngStream stream(42);
  Dataset ds = correlated_dataset(15, 3, 0.5, stream);
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(3);
  e1[0] = 1.0;
  SplitRegConfig cfg;
  cfg.groups = 2;
  cfg.lambda_s = 0.0;
  cfg.lambda_d = 2.0;
  double rss_one = (ds.y - ds.x * e1).squaredNorm() / (2.0 * ds.n());
  EXPECT_DOUBLE_EQ(splitreg_objective(ds, {e1, e1}, cfg), 2.0 * rss_one + 2.0);
}

TEST(SplitregObjective, MatchesManualExpansionOnRandomModels) {
  RngStream stream(43);
  Dataset ds = correlated_dataset(20, 4, 0.6, stream);
  SplitRegConfig cfg;
  cfg.groups = 3;
  cfg.lambda_s = 0.15;
  cfg.alpha = 0.4;
  cfg.lambda_d = 0.9;
  std::vector<Eigen::VectorXd> betas;
  for (int g = 0; g < 3; ++g) betas.push_back(stream.normals(4));
  double expected = 0.0;
  for (const auto& beta : betas) {
    expected += (ds.y - ds.x * beta).squaredNorm() / (2.0 * ds.n());
    expected += cfg.lambda_s * ((1.0 - cfg.alpha) / 2.0 * beta.squaredNorm() +
                                cfg.alpha * beta.lpNorm<1>());
  }
  for (int g = 0; g < 3; ++g)
    for (int h = g + 1; h < 3; ++h)
      expected += cfg.lambda_d * betas[g].cwiseAbs().dot(betas[h].cwiseAbs());
  EXPECT_NEAR(splitreg_objective(ds, betas, cfg), expected,
              1e-12 * (1.0 + std::abs(expected)));
}

TEST(FitSplitreg, SingleGroupIsElasticNetStepForStep) {
  RngStream stream(44);
  Dataset ds = correlated_dataset(25, 5, 0.7, stream);
  SplitRegConfig cfg;
  cfg.groups = 1;
  cfg.lambda_s = 0.08;
  cfg.alpha = 0.6;
  cfg.lambda_d = 3.0;  // irrelevant with one group
  SplitRegFit fit = fit_splitreg(ds, cfg);
  FitResult en = fit_elastic_net(ds, EnetConfig{cfg.lambda_s, cfg.alpha});
  ASSERT_EQ(fit.groups(), 1);
  for (int j = 0; j < 5; ++j) EXPECT_EQ(fit.betas[0][j], en.coef[j]);
}

TEST(FitSplitreg, ZeroCouplingCollapsesGroupsOntoTheElasticNetPath) {
  RngStream stream(45);
  Dataset ds = correlated_dataset(25, 5, 0.7, stream);
  SplitRegConfig cfg;
  cfg.groups = 2;
  cfg.lambda_s = 0.05;
  cfg.alpha = 0.8;
  cfg.lambda_d = 0.0;
  SplitRegFit fit = fit_splitreg(ds, cfg);
  FitResult en = fit_elastic_net(ds, EnetConfig{cfg.lambda_s, cfg.alpha});
  for (int j = 0; j < 5; ++j) {
    EXPECT_EQ(fit.betas[0][j], en.coef[j]);
    EXPECT_EQ(fit.betas[1][j], en.coef[j]);
  }
}

TEST(FitSplitreg, ConvergedSolutionIsAFixedPoint) {
  RngStream stream(46);
  Dataset ds = correlated_dataset(25, 5, 0.7, stream);
  SplitRegConfig cfg;
  cfg.groups = 2;
  cfg.lambda_s = 0.05;
  cfg.lambda_d = 0.0;
  Eigen::VectorXd en = fit_elastic_net(ds, EnetConfig{cfg.lambda_s, cfg.alpha}).coef;
  std::vector<Eigen::VectorXd> init{en, en};
  SplitRegFit fit = fit_splitreg(ds, cfg, &init);
  for (int g = 0; g < 2; ++g)
    for (int j = 0; j < 5; ++j) EXPECT_NEAR(fit.betas[g][j], en[j], 10 * cfg.tolerance);
}

TEST(FitSplitreg, DecoupledSolverIsLabelEquivariant) {
  RngStream stream(47);
  Dataset ds = correlated_dataset(20, 4, 0.5, stream);
  SplitRegConfig cfg;
  cfg.groups = 2;
  cfg.lambda_s = 0.1;
  cfg.lambda_d = 0.0;
  std::vector<Eigen::VectorXd> a{Eigen::VectorXd::Zero(4), stream.normals(4)};
  std::vector<Eigen::VectorXd> b{a[1], a[0]};
  SplitRegFit fit_ab = fit_splitreg(ds, cfg, &a);
  SplitRegFit fit_ba = fit_splitreg(ds, cfg, &b);
  for (int j = 0; j < 4; ++j) {
    EXPECT_EQ(fit_ab.betas[0][j], fit_ba.betas[1][j]);
    EXPECT_EQ(fit_ab.betas[1][j], fit_ba.betas[0][j]);
  }
}

TEST(FitSplitreg, StrongCouplingDrivesSupportsApart) {
  RngStream stream(48);
  Dataset ds = correlated_dataset(30, 4, 0.8, stream);
  SplitRegConfig cfg;
  cfg.groups = 2;
  cfg.lambda_s = 0.05;
  cfg.lambda_d = 50.0;
  SplitRegFit fit = fit_splitreg(ds, cfg);
  double overlap = fit.betas[0].cwiseAbs().dot(fit.betas[1].cwiseAbs());
  EXPECT_LT(overlap, 1e-8);
  EXPECT_GT(fit.betas[0].cwiseAbs().sum(), 0.0);
}

TEST(FitSplitreg, ObjectiveIsMonotoneAcrossSweeps) {
  RngStream stream(49);
  Dataset ds = correlated_dataset(30, 6, 0.9, stream);
  SplitRegConfig cfg;
  cfg.groups = 2;
  cfg.lambda_s = 0.02;
  cfg.alpha = 0.7;
  cfg.lambda_d = 0.3;
  std::vector<Eigen::VectorXd> zeros(2, Eigen::VectorXd::Zero(6));
  double previous = splitreg_objective(ds, zeros, cfg);
  for (int sweeps = 1; sweeps <= 12; ++sweeps) {
    SplitRegConfig capped = cfg;
    capped.max_sweeps = sweeps;
    capped.tolerance = 1e-13;
    std::vector<Eigen::VectorXd> betas;
    try {
      betas = fit_splitreg(ds, capped).betas;
    } catch (const ConvergenceError& e) {
      betas = e.last_iterate;
    }
    ASSERT_EQ(betas.size(), 2u);
    double value = splitreg_objective(ds, betas, cfg);
    EXPECT_LE(value, previous + 1e-12) << "sweeps=" << sweeps;
    previous = value;
  }
}

TEST(Aggregate, UniformPoolingAveragesExactly) {
  SplitRegFit fit;
  Eigen::VectorXd b1(3), b2(3);
  b1 << 1.0, -2.0, 0.5;
  b2 << 3.0, 2.0, -0.5;
  fit.betas = {b1, b2};
  fit.aggregation = Aggregation::uniform;
  Eigen::VectorXd pooled = aggregate(fit);
  for (int j = 0; j < 3; ++j) EXPECT_EQ(pooled[j], (b1[j] + b2[j]) / 2.0);

  fit.betas = {b1, -b1};
  pooled = aggregate(fit);
  for (int j = 0; j < 3; ++j) EXPECT_EQ(pooled[j], 0.0);

  fit.betas = {b2};
  pooled = aggregate(fit);
  for (int j = 0; j < 3; ++j) EXPECT_EQ(pooled[j], b2[j]);
}

TEST(Aggregate, WeightedPoolingUsesDelta) {
  SplitRegFit fit;
  Eigen::VectorXd b1(2), b2(2);
  b1 << 2.0, 0.0;
  b2 << 0.0, -1.0;
  fit.betas = {b1, b2};
  fit.aggregation = Aggregation::weighted;
  fit.delta = Eigen::VectorXd(2);
  fit.delta << 0.3, 0.7;
  Eigen::VectorXd pooled = aggregate(fit);
  EXPECT_DOUBLE_EQ(pooled[0], 0.6);
  EXPECT_DOUBLE_EQ(pooled[1], -0.7);

  Eigen::VectorXd x0(2);
  x0 << 1.0, 2.0;
  EXPECT_DOUBLE_EQ(predict_splitreg(fit, x0), 0.6 - 1.4);

  fit.delta = Eigen::VectorXd::Ones(3);
  EXPECT_THROW(aggregate(fit), ParameterError);
}

TEST(StackingWeights, PerfectSingleModelGetsUnitWeight) {
  RngStream stream(51);
  Eigen::MatrixXd raw = stream.normal_matrix(9, 2);
  Eigen::MatrixXd xs = standardize(raw, Eigen::VectorXd::Zero(9)).data.x;
  Eigen::VectorXd beta0(2);
  beta0 << 1.0, -0.5;
  Dataset ds{xs, xs * beta0, true};  // noiseless
  SplitRegConfig cfg;
  cfg.groups = 1;
  cfg.lambda_s = 0.0;
  Eigen::VectorXd delta = stacking_weights(ds, cfg);
  ASSERT_EQ(delta.size(), 1);
  EXPECT_NEAR(delta[0], 1.0, 1e-5);
}

TEST(StackingWeights, DuplicatedModelsPreserveThePooledPrediction) {
  RngStream stream(52);
  Dataset ds = correlated_dataset(14, 3, 0.5, stream);
  SplitRegConfig one;
  one.groups = 1;
  one.lambda_s = 0.1;
  SplitRegConfig two = one;
  two.groups = 2;
  two.lambda_d = 0.0;  // both groups trace the same path, so z has equal columns
  Eigen::VectorXd delta_one = stacking_weights(ds, one);
  Eigen::VectorXd delta_two = stacking_weights(ds, two);
  ASSERT_EQ(delta_two.size(), 2);
  EXPECT_NEAR(delta_two.sum(), delta_one[0], 1e-8);
}

TEST(StackingWeights, BeatsAGridSearchOverTheWeightBox) {
  RngStream stream(53);
  Dataset ds = correlated_dataset(12, 3, 0.6, stream);
  SplitRegConfig cfg;
  cfg.groups = 2;
  cfg.lambda_s = 0.1;
  cfg.lambda_d = 0.5;
  Eigen::MatrixXd z = loo_predictions(ds, cfg);
  Eigen::VectorXd delta = stacking_weights(ds, cfg);
  ASSERT_EQ(delta.size(), 2);
  EXPECT_GE(delta.minCoeff(), 0.0);
  double nnls_value = (ds.y - z * delta).squaredNorm();

  double grid_value = std::numeric_limits<double>::infinity();
  const int steps = 200;
  Eigen::VectorXd w(2);
  for (int i = 0; i <= steps; ++i) {
    for (int j = 0; j <= steps; ++j) {
      w << 3.0 * i / steps, 3.0 * j / steps;
      grid_value = std::min(grid_value, (ds.y - z * w).squaredNorm());
    }
  }
  EXPECT_LE(nnls_value, grid_value + 1e-9);
  EXPECT_GE(nnls_value, grid_value - 0.05 * (1.0 + grid_value));
}

TEST(StackingWeights, RejectsTooFewObservations) {
  Eigen::MatrixXd x(2, 2);
  x << 1, -1, -1, 1;
  Eigen::VectorXd y(2);
  y << 1.0, -1.0;
  SplitRegConfig cfg;
  cfg.groups = 2;
  EXPECT_THROW(stacking_weights(Dataset{x, y, true}, cfg), ParameterError);
}

TEST(FitSplitreg, RejectsBadConfigsAndInits) {
  RngStream stream(54);
  Dataset ds = correlated_dataset(10, 2, 0.4, stream);
  SplitRegConfig bad;
  bad.groups = 0;
  EXPECT_THROW(fit_splitreg(ds, bad), ParameterError);
  bad.groups = 2;
  bad.lambda_d = -0.5;
  EXPECT_THROW(fit_splitreg(ds, bad), ParameterError);

  SplitRegConfig ok;
  ok.groups = 2;
  std::vector<Eigen::VectorXd> short_init{Eigen::VectorXd::Zero(2)};
  EXPECT_THROW(fit_splitreg(ds, ok, &short_init), ParameterError);
  std::vector<Eigen::VectorXd> wrong_len{Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3)};
  EXPECT_THROW(fit_splitreg(ds, ok, &wrong_len), ParameterError);
}
