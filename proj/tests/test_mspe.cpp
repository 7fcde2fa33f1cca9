#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "splitreg/dataset.hpp"
#include "splitreg/errors.hpp"
#include "splitreg/estimators.hpp"
#include "splitreg/format.hpp"
#include "splitreg/mspe.hpp"
#include "splitreg/mspe_closed.hpp"

using namespace splitreg;

namespace {

Scenario small_scenario() {
  Scenario sc;
  sc.n = 12;
  sc.d = 3;
  sc.beta1 = 1.0;
  sc.beta2 = 0.3;
  sc.k = 2;
  sc.snr = 2.0;
  sc.r = 0.5;
  sc.rho = 0.2;
  sc.num_train = 6;
  sc.num_test = 9;
  sc.seed = 99;
  return sc;
}

TuningGrid tiny_grid(int n) {
  TuningGrid g;
  g.lambda = log_spaced_grid(1e-3 * n, 1e2 * n, 8, true);
  g.alpha = {0.0, 0.5, 1.0};
  g.lambda_d = {0.0, 0.5, 5.0};
  return g;
}

}  // namespace

TEST(LogSpacedGrid, PinsEndpointsExactly) {
  std::vector<double> up = log_spaced_grid(1e-4, 1e3, 50, false);
  ASSERT_EQ(up.size(), 50u);
  EXPECT_EQ(up.front(), 1e-4);
  EXPECT_EQ(up.back(), 1e3);
  for (std::size_t i = 1; i < up.size(); ++i) EXPECT_LT(up[i - 1], up[i]);

  std::vector<double> down = log_spaced_grid(1e-4, 1e3, 50, true);
  EXPECT_EQ(down.front(), 1e3);
  EXPECT_EQ(down.back(), 1e-4);
  for (std::size_t i = 0; i < down.size(); ++i) EXPECT_EQ(down[i], up[up.size() - 1 - i]);

  std::vector<double> single = log_spaced_grid(2.5, 2.5, 1, false);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0], 2.5);
}

TEST(LogSpacedGrid, RejectsBadRanges) {
  EXPECT_THROW(log_spaced_grid(0.0, 1.0, 5, false), ParameterError);
  EXPECT_THROW(log_spaced_grid(2.0, 1.0, 5, false), ParameterError);
  EXPECT_THROW(log_spaced_grid(1.0, 2.0, 0, false), ParameterError);
  EXPECT_THROW(log_spaced_grid(1.0, 2.0, 1, false), ParameterError);
}

TEST(TuningGridDefaults, HavePinnedShapeAndPassValidation) {
  TuningGrid g = TuningGrid::defaults(10);
  ASSERT_EQ(g.lambda.size(), 50u);
  EXPECT_EQ(g.lambda.front(), 1e3 * 10);
  EXPECT_EQ(g.lambda.back(), 1e-4 * 10);
  ASSERT_EQ(g.alpha.size(), 5u);
  EXPECT_EQ(g.alpha[1], 0.25);
  ASSERT_EQ(g.lambda_d.size(), 21u);
  EXPECT_EQ(g.lambda_d[0], 0.0);
  EXPECT_EQ(g.lambda_d[1], 1e-3);
  EXPECT_EQ(g.lambda_d.back(), 1e2);
  EXPECT_NO_THROW(g.validate());
}

TEST(TuningGridValidate, RejectsBrokenGrids) {
  TuningGrid g = TuningGrid::defaults(10);
  g.lambda.clear();
  EXPECT_THROW(g.validate(), ParameterError);

  g = TuningGrid::defaults(10);
  std::reverse(g.lambda.begin(), g.lambda.end());  // ascending now
  EXPECT_THROW(g.validate(), ParameterError);

  g = TuningGrid::defaults(10);
  g.alpha.push_back(1.5);
  EXPECT_THROW(g.validate(), ParameterError);

  g = TuningGrid::defaults(10);
  g.lambda_d.erase(g.lambda_d.begin());  // drops the mandatory 0
  EXPECT_THROW(g.validate(), ParameterError);

  g = TuningGrid::defaults(10);
  g.lambda[3] = -1.0;
  EXPECT_THROW(g.validate(), ParameterError);
}

TEST(Scenario, BetaLayoutAndNoiseScale) {
  Scenario sc;
  sc.d = 2;
  sc.k = 1;
  sc.beta1 = 1.5;
  sc.beta2 = -0.5;
  sc.rho = 0.2;
  sc.snr = 3.0;
  Eigen::VectorXd beta = scenario_beta(sc);
  ASSERT_EQ(beta.size(), 2);
  EXPECT_EQ(beta[0], 1.5);
  EXPECT_EQ(beta[1], -0.5);
  double signal = 1.5 * 1.5 + 2.0 * 0.2 * 1.5 * (-0.5) + 0.25;
  EXPECT_DOUBLE_EQ(scenario_sigma2(sc), signal / 3.0);

  Scenario wide;
  wide.d = 6;
  wide.n = 20;
  wide.k = 2;
  wide.beta1 = 1.0;
  wide.beta2 = 0.25;
  Eigen::VectorXd beta6 = scenario_beta(wide);
  for (int j = 0; j < 6; ++j) EXPECT_EQ(beta6[j], j < 2 ? 1.0 : 0.25);
}

TEST(Scenario, ValidationRejectsImpossibleSettings) {
  Scenario sc = small_scenario();
  EXPECT_NO_THROW(validate_scenario(sc));
  Scenario bad = sc;
  bad.d = 1;
  EXPECT_THROW(validate_scenario(bad), ParameterError);
  bad = sc;
  bad.n = 3;  // not > d
  EXPECT_THROW(validate_scenario(bad), ParameterError);
  bad = sc;
  bad.k = 3;  // must stay below d
  EXPECT_THROW(validate_scenario(bad), ParameterError);
  bad = sc;
  bad.snr = 0.0;
  EXPECT_THROW(validate_scenario(bad), ParameterError);
  bad = sc;
  bad.num_test = 0;
  EXPECT_THROW(validate_scenario(bad), ParameterError);
  bad = sc;
  bad.beta1 = 0.0;
  bad.beta2 = 0.0;
  EXPECT_THROW(scenario_sigma2(bad), ParameterError);
}

TEST(MakeSamples, TrainingDesignsHitTheTargetCovarianceExactly) {
  Scenario sc = small_scenario();
  McSamples s = make_samples(sc);
  ASSERT_EQ(s.num_train(), 6);
  ASSERT_EQ(s.num_test(), 9);
  EXPECT_EQ(s.checksum, samples_checksum(s));
  EXPECT_DOUBLE_EQ(s.sigma2, scenario_sigma2(sc));
  Eigen::MatrixXd gamma_r = scenario_correlation(sc).gamma_r;
  for (const Dataset& ds : s.train) {
    ASSERT_EQ(ds.n(), 12);
    ASSERT_EQ(ds.d(), 3);
    EXPECT_TRUE(ds.standardized);
    Eigen::MatrixXd cov = (ds.x.transpose() * ds.x) / 12.0;
    EXPECT_LT((cov - gamma_r).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(MakeSamples, ParallelDrawIsBitIdenticalToSerial) {
  Scenario sc = small_scenario();
  McSamples serial = make_samples(sc, 1);
  McSamples parallel = make_samples(sc, 4);
  EXPECT_EQ(serial.checksum, parallel.checksum);
  for (int i = 0; i < serial.num_train(); ++i) {
    EXPECT_EQ(serial.train[i].x, parallel.train[i].x);
    EXPECT_EQ(serial.train[i].y, parallel.train[i].y);
  }
  EXPECT_EQ(serial.test_x, parallel.test_x);
  EXPECT_EQ(serial.test_y, parallel.test_y);

  Scenario other = sc;
  other.seed = 100;
  EXPECT_NE(make_samples(other).checksum, serial.checksum);
}

TEST(EstimateG, OracleAndZeroPredictorsMatchTheory) {
  Scenario sc;
  sc.n = 10;
  sc.d = 2;
  sc.beta1 = 1.0;
  sc.beta2 = 0.4;
  sc.k = 1;
  sc.snr = 1.0;
  sc.r = 0.6;
  sc.rho = 0.2;
  sc.num_train = 150;
  sc.num_test = 300;
  sc.seed = 7;
  McSamples s = make_samples(sc);

  GEstimate oracle = estimate_g(s, [&](const Dataset&) { return s.beta; });
  EXPECT_GT(oracle.se_total(), 0.0);
  EXPECT_LT(std::abs(oracle.value - s.sigma2), 2.0 * oracle.se_total());

  double null_risk = s.beta.dot(scenario_correlation(sc).gamma_rho * s.beta) + s.sigma2;
  GEstimate null_est =
      estimate_g(s, [&](const Dataset& ds) { return Eigen::VectorXd::Zero(ds.d()).eval(); });
  EXPECT_LT(std::abs(null_est.value - null_risk), 2.0 * null_est.se_total());
}

TEST(EstimateG, ReplicateOrderCannotChangeAnyOutputBit) {
  Scenario sc = small_scenario();
  sc.num_train = 11;
  McSamples s = make_samples(sc);
  GEstimate base = estimate_g(s, [](const Dataset& ds) { return fit_ls(ds).coef; });

  McSamples rotated = s;
  std::rotate(rotated.train.begin(), rotated.train.begin() + 4, rotated.train.end());
  GEstimate moved = estimate_g(rotated, [](const Dataset& ds) { return fit_ls(ds).coef; });
  EXPECT_EQ(base.value, moved.value);
  EXPECT_EQ(base.se_replicate, moved.se_replicate);
  EXPECT_EQ(base.se_test, moved.se_test);
}

TEST(EstimateG, WorkerCountCannotChangeAnyOutputBit) {
  Scenario sc = small_scenario();
  McSamples s = make_samples(sc);
  GEstimate one = estimate_g(s, [](const Dataset& ds) { return fit_ls(ds).coef; }, 1);
  GEstimate three = estimate_g(s, [](const Dataset& ds) { return fit_ls(ds).coef; }, 3);
  EXPECT_EQ(one.value, three.value);
  EXPECT_EQ(one.se_replicate, three.se_replicate);
  EXPECT_EQ(one.se_test, three.se_test);
}

TEST(MinG, RefusesTamperedOrMismatchedSamples) {
  Scenario sc = small_scenario();
  McSamples s = make_samples(sc);
  SweepOptions opt;
  opt.grid = tiny_grid(sc.n);

  McSamples tampered = s;
  tampered.train[0].y[0] += 1.0;
  EXPECT_THROW(min_g(Method::ls, sc, tampered, opt), Error);

  Scenario wrong = sc;
  wrong.num_train = sc.num_train + 1;
  EXPECT_THROW(min_g(Method::ls, wrong, s, opt), ParameterError);
}

TEST(MinG, LsRecordMatchesTheDirectEstimate) {
  Scenario sc = small_scenario();
  sc.num_train = 40;
  sc.num_test = 60;
  McSamples s = make_samples(sc);
  SweepOptions opt;
  opt.grid = tiny_grid(sc.n);
  MspeRecord rec = min_g(Method::ls, sc, s, opt);
  GEstimate direct = estimate_g(s, [](const Dataset& ds) { return fit_ls(ds).coef; });
  EXPECT_NEAR(rec.mspe, direct.value, 1e-9 * (1.0 + direct.value));
  EXPECT_NEAR(rec.se, direct.se_replicate, 1e-9 * (1.0 + direct.se_replicate));
  EXPECT_DOUBLE_EQ(rec.mspe_minus_sigma2, rec.mspe - s.sigma2);
  EXPECT_EQ(rec.argmin_tuning, "-");
  EXPECT_EQ(rec.method, "ls");
}

TEST(MinG, ContainmentOrderingsHoldExactly) {
  Scenario sc = small_scenario();
  sc.num_train = 25;
  sc.num_test = 40;
  McSamples s = make_samples(sc);
  SweepOptions opt;
  opt.grid = tiny_grid(sc.n);

  MspeRecord ls = min_g(Method::ls, sc, s, opt);
  MspeRecord garrote = min_g(Method::garrote, sc, s, opt);
  MspeRecord split = min_g(Method::split, sc, s, opt);
  MspeRecord lasso = min_g(Method::lasso, sc, s, opt);
  MspeRecord enet = min_g(Method::elastic_net, sc, s, opt);
  MspeRecord sreg = min_g(Method::splitreg, sc, s, opt);
  MspeRecord sreg_delta = min_g(Method::splitreg_delta, sc, s, opt);

  EXPECT_LE(garrote.mspe, ls.mspe);
  EXPECT_LE(split.mspe, garrote.mspe);
  EXPECT_LE(enet.mspe, lasso.mspe);
  EXPECT_LE(sreg.mspe, enet.mspe);
  EXPECT_LE(sreg_delta.mspe, sreg.mspe + 1e-10);

  EXPECT_TRUE(garrote.argmin_tuning.rfind("omega=[", 0) == 0);
  EXPECT_TRUE(split.argmin_tuning.rfind("partition={", 0) == 0);
  EXPECT_NE(split.argmin_tuning.find(";w=["), std::string::npos);
  EXPECT_TRUE(lasso.argmin_tuning.rfind("lambda=", 0) == 0);
  EXPECT_NE(enet.argmin_tuning.find(";alpha="), std::string::npos);
  EXPECT_TRUE(sreg.argmin_tuning.rfind("lambda_s=", 0) == 0);
  EXPECT_NE(sreg.argmin_tuning.find(";lambda_d="), std::string::npos);
  EXPECT_NE(sreg_delta.argmin_tuning.find(";delta=["), std::string::npos);
}

TEST(MinG, RidgeGridAgreesWithTheClosedFormAtItsArgmin) {
  Scenario sc;
  sc.n = 10;
  sc.d = 2;
  sc.beta1 = 1.0;
  sc.beta2 = 0.4;
  sc.k = 1;
  sc.snr = 1.0;
  sc.r = 0.7;
  sc.rho = 0.1;
  sc.num_train = 200;
  sc.num_test = 400;
  sc.seed = 17;
  McSamples s = make_samples(sc);
  SweepOptions opt;
  opt.grid = TuningGrid::defaults(sc.n);
  MspeRecord rec = min_g(Method::ridge, sc, s, opt);

  ASSERT_TRUE(rec.argmin_tuning.rfind("lambda=", 0) == 0);
  double lambda_hat = parse_double(rec.argmin_tuning.substr(7), "argmin lambda");
  EXPECT_GT(lambda_hat, 0.0);

  GEstimate at_argmin = estimate_g(s, [&](const Dataset& ds) {
    Eigen::MatrixXd a = ds.x.transpose() * ds.x;
    a.diagonal().array() += lambda_hat;
    return Eigen::VectorXd(a.ldlt().solve(ds.x.transpose() * ds.y));
  });
  Eigen::Vector2d beta(sc.beta1, sc.beta2);
  double closed = mspe_ridge_closed(lambda_hat, beta, s.sigma2, sc.n, sc.r, sc.rho) + s.sigma2;
  EXPECT_LT(std::abs(at_argmin.value - closed), 2.5 * at_argmin.se_total());
  EXPECT_LE(rec.mspe, at_argmin.value + 1e-9 * (1.0 + at_argmin.value));
}

TEST(MinimizeClosedRecord, MirrorsTheGScaleWithZeroSe) {
  Scenario sc;
  sc.n = 10;
  sc.d = 2;
  sc.beta1 = 1.0;
  sc.beta2 = 0.2;
  sc.k = 1;
  sc.snr = 1.0;
  sc.r = 0.7;
  sc.rho = 0.1;
  double sigma2 = scenario_sigma2(sc);

  MspeRecord ls = minimize_closed_record(Method::ls, sc);
  EXPECT_EQ(ls.se, 0.0);
  EXPECT_DOUBLE_EQ(ls.mspe_minus_sigma2, mspe_ls_closed(sigma2, sc.n, sc.r, sc.rho));
  EXPECT_DOUBLE_EQ(ls.mspe, ls.mspe_minus_sigma2 + sigma2);

  MspeRecord split = minimize_closed_record(Method::split, sc);
  EXPECT_TRUE(split.argmin_tuning.rfind("partition={", 0) == 0);

  Scenario wide = sc;
  wide.d = 3;
  wide.n = 12;
  EXPECT_THROW(minimize_closed_record(Method::ls, wide), ParameterError);
  EXPECT_THROW(minimize_closed_record(Method::lasso, sc), ParameterError);
}

TEST(SweepCurve, ClosedFormPathKeepsLsFlatAndOrderingsIntact) {
  Scenario base;
  base.n = 10;
  base.d = 2;
  base.beta1 = 1.0;
  base.k = 1;
  base.snr = 1.0;
  base.r = 0.7;
  base.rho = 0.1;
  std::vector<double> beta2_grid = {-1.0, -0.5, 0.0, 0.5, 1.0};
  std::vector<Method> methods = {Method::ls, Method::ridge, Method::garrote, Method::split};
  SweepOptions opt;
  opt.grid = TuningGrid::defaults(base.n);
  std::vector<MspeRecord> records = sweep_curve(base, beta2_grid, methods, opt);
  ASSERT_EQ(records.size(), beta2_grid.size() * methods.size());

  double ls_ratio = 0.0;
  for (std::size_t p = 0; p < beta2_grid.size(); ++p) {
    Scenario sc = base;
    sc.beta2 = beta2_grid[p];
    double sigma2 = scenario_sigma2(sc);
    const MspeRecord& ls = records[p * 4 + 0];
    const MspeRecord& ridge = records[p * 4 + 1];
    const MspeRecord& garrote = records[p * 4 + 2];
    const MspeRecord& split = records[p * 4 + 3];
    EXPECT_EQ(ls.method, "ls");
    EXPECT_EQ(ridge.method, "ridge");
    EXPECT_EQ(garrote.method, "garrote");
    EXPECT_EQ(split.method, "split");
    EXPECT_EQ(ls.beta2, beta2_grid[p]);
    EXPECT_EQ(ls.se, 0.0);

    double ratio = ls.mspe_minus_sigma2 / sigma2;
    if (p == 0) ls_ratio = ratio;
    EXPECT_NEAR(ratio, ls_ratio, 1e-12);

    EXPECT_LE(ridge.mspe, ls.mspe + 1e-12);
    EXPECT_LE(garrote.mspe, ls.mspe + 1e-12);
    EXPECT_LE(split.mspe, garrote.mspe + 1e-12);
  }
}

TEST(SweepCurve, MonteCarloPathProducesCompleteRecords) {
  Scenario base = small_scenario();
  base.num_train = 8;
  base.num_test = 10;
  SweepOptions opt;
  opt.grid = tiny_grid(base.n);
  std::vector<MspeRecord> records =
      sweep_curve(base, {0.0, 0.5}, {Method::ls, Method::lasso}, opt);
  ASSERT_EQ(records.size(), 4u);
  for (const MspeRecord& rec : records) {
    EXPECT_TRUE(std::isfinite(rec.mspe));
    EXPECT_GE(rec.se, 0.0);
    EXPECT_FALSE(rec.argmin_tuning.empty());
    EXPECT_DOUBLE_EQ(rec.snr, base.snr);
  }
  EXPECT_TRUE(records[1].argmin_tuning.rfind("lambda=", 0) == 0);

  EXPECT_THROW(sweep_curve(base, {}, {Method::ls}, opt), ParameterError);
  EXPECT_THROW(sweep_curve(base, {0.0}, {}, opt), ParameterError);
}
