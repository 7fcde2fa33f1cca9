// Command-line front end: partition counting, design generation with an exact
// empirical correlation target, MSPE curve sweeps driven by a config file, and
// direct multi-model penalized fits.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "splitreg/config.hpp"
#include "splitreg/csv.hpp"
#include "splitreg/mspe.hpp"
#include "splitreg/splitreg.hpp"
#include "splitreg/splits.hpp"
#include "splitreg/targetcov.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw splitreg::ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void run_count(int p, int groups, bool leftout) {
  splitreg::SplitCount count = leftout ? splitreg::count_splits_with_leftout(p, groups)
                                       : splitreg::count_splits(p, groups);
  std::cout << count.value.get_str() << '\n';
}

void run_gen(int n, int d, double r, double rho, std::uint64_t seed, const std::string& out) {
  splitreg::CorrelationSpec spec = splitreg::equicorrelation_spec(d, rho, r);
  splitreg::RngStream stream = splitreg::derive_stream(seed, 0, "gen");
  Eigen::MatrixXd x = splitreg::generate(splitreg::TargetCovRequest{n, spec, stream});
  std::vector<std::string> header;
  for (int j = 0; j < d; ++j) header.push_back("x" + std::to_string(j + 1));
  std::vector<std::vector<std::string>> rows(n);
  for (int i = 0; i < n; ++i) {
    rows[i].reserve(d);
    for (int j = 0; j < d; ++j) rows[i].push_back(splitreg::format_double(x(i, j)));
  }
  splitreg::write_csv_atomic(out, {}, header, rows);
}

void run_curves(const std::string& config_path, int jobs_override,
                std::int64_t seed_override, const std::string& out_override) {
  splitreg::RunConfig cfg = splitreg::parse_run_config(read_file(config_path));
  if (jobs_override > 0) cfg.options.jobs = jobs_override;
  if (seed_override >= 0) cfg.scenario.seed = static_cast<std::uint64_t>(seed_override);
  if (!out_override.empty()) cfg.output = out_override;
  if (cfg.scenario.r < cfg.scenario.rho)
    std::cerr << "warning: r < rho (empirical correlation target below the population value)\n";

  std::vector<splitreg::MspeRecord> records =
      splitreg::sweep_curve(cfg.scenario, cfg.beta2_grid, cfg.methods, cfg.options);

  std::vector<std::string> header = {"method", "beta2", "snr",  "r", "rho",
                                     "mspe",   "mspe_minus_sigma2", "se", "argmin_tuning"};
  std::vector<std::vector<std::string>> rows;
  rows.reserve(records.size());
  for (const auto& rec : records) {
    rows.push_back({rec.method, splitreg::format_double(rec.beta2),
                    splitreg::format_double(rec.snr), splitreg::format_double(rec.r),
                    splitreg::format_double(rec.rho), splitreg::format_double(rec.mspe),
                    splitreg::format_double(rec.mspe_minus_sigma2),
                    splitreg::format_double(rec.se), rec.argmin_tuning});
  }
  splitreg::write_csv_atomic(cfg.output, splitreg::echo_config(cfg), header, rows);
}

void run_splitreg_fit(const std::string& data_path, double lambda_s, double alpha,
                      double lambda_d, int groups, const std::string& out) {
  splitreg::CsvTable table = splitreg::read_numeric_csv(data_path);
  const int cols = static_cast<int>(table.header.size());
  if (cols < 2)
    throw splitreg::ConfigError("data file needs predictor columns x1..xd plus a final y column");
  const int d = cols - 1;
  for (int j = 0; j < d; ++j)
    if (table.header[j] != "x" + std::to_string(j + 1))
      throw splitreg::ConfigError("data file column " + std::to_string(j + 1) +
                                  " must be named x" + std::to_string(j + 1));
  if (table.header.back() != "y")
    throw splitreg::ConfigError("data file's last column must be named y");
  const int n = static_cast<int>(table.rows.size());
  if (n < 1) throw splitreg::ConfigError("data file has no rows");
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) x(i, j) = table.rows[i][j];
    y[i] = table.rows[i][d];
  }
  splitreg::SplitRegConfig cfg;
  cfg.groups = groups;
  cfg.lambda_s = lambda_s;
  cfg.alpha = alpha;
  cfg.lambda_d = lambda_d;
  splitreg::SplitRegFit fit = splitreg::fit_splitreg(splitreg::Dataset{x, y, false}, cfg);
  Eigen::VectorXd pooled = splitreg::aggregate(fit);

  std::vector<std::string> header = {"coefficient"};
  for (int g = 0; g < groups; ++g) header.push_back("model_" + std::to_string(g + 1));
  header.push_back("pooled");
  std::vector<std::vector<std::string>> rows(d);
  for (int j = 0; j < d; ++j) {
    rows[j].push_back("x" + std::to_string(j + 1));
    for (int g = 0; g < groups; ++g)
      rows[j].push_back(splitreg::format_double(fit.betas[g][j]));
    rows[j].push_back(splitreg::format_double(pooled[j]));
  }
  splitreg::write_csv_atomic(out, {}, header, rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"split regression estimators, exact-covariance designs and MSPE curves"};
  app.require_subcommand(1);

  auto* count = app.add_subcommand("count", "count splits of p predictors into G groups");
  int count_p = 0, count_groups = 0;
  bool count_leftout = false;
  count->add_option("p", count_p, "number of predictors")->required();
  count->add_option("G", count_groups, "number of groups")->required();
  count->add_flag("--leftout", count_leftout, "allow predictors to be left out");
  count->callback([&]() { run_count(count_p, count_groups, count_leftout); });

  auto* gen = app.add_subcommand("gen", "generate a design with exact empirical correlation r");
  int gen_n = 50, gen_d = 2;
  double gen_r = 0.0, gen_rho = 0.0;
  std::uint64_t gen_seed = 1;
  std::string gen_out = "design.csv";
  gen->add_option("--n", gen_n, "rows (must exceed d)");
  gen->add_option("--d", gen_d, "columns");
  gen->add_option("--r", gen_r, "equicorrelation hit exactly by the sample");
  gen->add_option("--rho", gen_rho, "population equicorrelation of the base draw");
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--out", gen_out, "output CSV path");
  gen->callback([&]() { run_gen(gen_n, gen_d, gen_r, gen_rho, gen_seed, gen_out); });

  auto* curves = app.add_subcommand("curves", "sweep minimum MSPE over a beta2 grid per method");
  std::string curves_config;
  int curves_jobs = 0;
  std::int64_t curves_seed = -1;
  std::string curves_out;
  curves->add_option("config", curves_config, "config file (key = value with [sections])")
      ->required();
  curves->add_option("--jobs", curves_jobs, "worker threads (overrides config)");
  curves->add_option("--seed", curves_seed, "seed override");
  curves->add_option("--out", curves_out, "output path override");
  curves->callback(
      [&]() { run_curves(curves_config, curves_jobs, curves_seed, curves_out); });

  auto* fit = app.add_subcommand("splitreg-fit", "fit G penalized models jointly to a data CSV");
  std::string fit_data;
  double fit_lambda_s = 0.0, fit_alpha = 1.0, fit_lambda_d = 0.0;
  int fit_groups = 2;
  std::string fit_out = "coefficients.csv";
  fit->add_option("data", fit_data, "CSV with columns x1..xd,y")->required();
  fit->add_option("--lambda-s", fit_lambda_s, "sparsity penalty");
  fit->add_option("--alpha", fit_alpha, "elastic-net mix in [0,1]");
  fit->add_option("--lambda-d", fit_lambda_d, "diversity penalty");
  fit->add_option("--groups", fit_groups, "number of models");
  fit->add_option("--out", fit_out, "output CSV path");
  fit->callback([&]() {
    run_splitreg_fit(fit_data, fit_lambda_s, fit_alpha, fit_lambda_d, fit_groups, fit_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const splitreg::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const splitreg::TooManySplitsError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const splitreg::ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const splitreg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
