// mesa: command-line front end for the maximum entropy spectral toolkit.
//
// Exit codes: 0 success, 2 usage / input / validation problems,
// 3 numerical failures (degenerate data, undefined losses, ...).

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mesa/io.hpp"
#include "mesa/mesa.hpp"

namespace {

using mesa::io::json;

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

// ---- shared option groups ----------------------------------------------------

struct InputOptions {
  std::string path;
  std::optional<double> dt;
  bool binary = false;
  bool demean = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--in", path, "Input series: CSV (1 column + --dt, or time,value) or raw float64")
        ->required();
    cmd->add_option("--dt", dt, "Sampling interval in seconds");
    cmd->add_flag("--binary", binary, "Input is raw little-endian float64 (needs --dt)");
    cmd->add_flag("--demean", demean, "Subtract the sample mean before fitting");
  }

  // Returns the series and the mean that was removed (0 without --demean).
  std::pair<mesa::TimeSeries, double> load() const {
    mesa::TimeSeries ts = [&] {
      if (binary) {
        if (!dt) throw mesa::io::IoError("--binary input needs --dt");
        return mesa::io::read_series_binary(path, *dt);
      }
      return mesa::io::read_series_csv(path, dt);
    }();
    if (!demean) return {ts, 0.0};
    double mean = 0.0;
    for (double v : ts.values()) mean += v;
    mean /= static_cast<double>(ts.size());
    std::vector<double> x = ts.values();
    for (double& v : x) v -= mean;
    return {mesa::TimeSeries(std::move(x), ts.dt()), mean};
  }
};

struct FitOptions {
  std::string criterion = "fpe";
  std::string method = "burg";
  std::optional<std::size_t> max_order;
  bool no_early_stop = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--criterion", criterion, "Order selection loss: fpe | cat | obd")
        ->capture_default_str();
    cmd->add_option("--method", method, "Estimator: burg | yule_walker")->capture_default_str();
    cmd->add_option("--max-order", max_order, "Largest order scanned (default 2N/ln 2N)");
    cmd->add_flag("--no-early-stop", no_early_stop, "Scan every order up to the bound");
  }

  mesa::Criterion parsed_criterion() const { return mesa::parse_criterion(criterion); }
  mesa::EstimatorMethod parsed_method() const { return mesa::parse_method(method); }

  std::optional<mesa::EarlyStopConfig> early_stop() const {
    if (no_early_stop) return mesa::EarlyStopConfig::disabled();
    return std::nullopt;
  }

  mesa::Estimate run(const mesa::TimeSeries& ts) const {
    return mesa::estimate(ts, parsed_criterion(), parsed_method(), max_order, early_stop());
  }
};

// Target spectrum given either as a Gaussian bump or as a one-sided table.
struct TargetOptions {
  std::vector<double> gaussian;
  std::string table;
  std::string interp = "linear";

  void attach(CLI::App* cmd, bool required) {
    auto* g = cmd->add_option("--psd-gaussian", gaussian, "Gaussian PSD target: MU SIGMA")
                  ->expected(2);
    auto* t = cmd->add_option("--psd", table, "Tabulated one-sided PSD CSV (frequency_hz,psd)");
    cmd->add_option("--interp", interp, "Table interpolation: linear | loglog")
        ->capture_default_str();
    g->excludes(t);
    if (required) {
      auto* group = cmd->add_option_group("target");
      group->add_option(g);
      group->add_option(t);
      group->require_option(1);
    }
  }

  bool given() const { return !gaussian.empty() || !table.empty(); }

  mesa::PsdFunction function(double dt) const {
    if (!gaussian.empty()) return mesa::GaussianPsd{gaussian[0], gaussian[1], 1.0};
    return mesa::io::read_tabulated_psd(table, mesa::parse_interpolation(interp)).as_function(dt);
  }
};

std::string with_suffix(const std::string& prefix, const std::string& suffix) {
  return prefix + suffix;
}

void write_json(const std::string& path, const json& j) {
  mesa::io::write_atomic(path, j.dump(2) + "\n");
}

json quantile_summary(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  json j;
  for (double q : {0.05, 0.25, 0.5, 0.75, 0.95})
    j[mesa::io::quantile_column_name(q)] = mesa::quantile_sorted(v, q);
  double mean = 0.0;
  for (double x : v) mean += x;
  j["mean"] = mean / static_cast<double>(v.size());
  return j;
}

// ---- subcommands -------------------------------------------------------------

struct EstimateCmd {
  InputOptions input;
  FitOptions fit;
  std::string prefix;
  std::optional<std::size_t> n_freqs;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("estimate", "Fit an AR model, select its order, write the PSD");
    input.attach(cmd);
    fit.attach(cmd);
    cmd->add_option("--out-prefix,--out", prefix, "Writes PREFIX_psd.csv, PREFIX_model.json, PREFIX_selection.json")
        ->required();
    cmd->add_option("--n-freqs", n_freqs, "One-sided PSD grid size (default 4 max(m, 256) + 1)");
    cmd->callback([this] { run(); });
  }

  void run() const {
    const auto [ts, mean] = input.load();
    const auto est = fit.run(ts);
    const auto sd = mesa::psd(est.model, mesa::Sided::one_sided, n_freqs);
    mesa::io::write_atomic(with_suffix(prefix, "_psd.csv"), mesa::io::psd_csv(sd));
    json model = est.model;
    model["mean_removed"] = mean;
    write_json(with_suffix(prefix, "_model.json"), model);
    json sel = est.selection;
    sel["max_order"] = est.max_order;
    sel["method"] = fit.method;
    write_json(with_suffix(prefix, "_selection.json"), sel);
    std::cout << "order " << est.selection.chosen_order() << " (" << fit.criterion
              << ", scanned to " << est.selection.losses().size() - 1 << " of "
              << est.max_order << ")\n";
  }
};

struct ForecastCmd {
  InputOptions input;
  FitOptions fit;
  std::string out;
  std::size_t horizon = 1;
  std::size_t realizations = 100;
  std::optional<std::uint64_t> seed;
  double noise_scale = 1.0;
  std::vector<double> quantiles{0.05, 0.95};

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("forecast", "Fit a model and draw forecast continuations");
    input.attach(cmd);
    fit.attach(cmd);
    cmd->add_option("--horizon", horizon, "Number of future samples")->required();
    cmd->add_option("--realizations", realizations, "Ensemble size")->capture_default_str();
    cmd->add_option("--seed", seed, "Random seed")->required();
    cmd->add_option("--noise-scale", noise_scale, "Multiplier on the innovation sigma")
        ->capture_default_str();
    cmd->add_option("--quantiles", quantiles, "Band levels in (0, 1)")->delimiter(',');
    cmd->add_option("--out", out, "Forecast CSV (step,median,q..)")->required();
    cmd->callback([this] { run(); });
  }

  void run() const {
    const auto [ts, mean] = input.load();
    const auto est = fit.run(ts);
    const auto ens =
        mesa::forecast(est.model, ts, {horizon, realizations, *seed, noise_scale});
    auto table = mesa::forecast_summary(ens, quantiles);
    for (auto& v : table.median) v += mean;
    for (auto& row : table.values)
      for (auto& v : row) v += mean;
    mesa::io::write_atomic(out, mesa::io::forecast_csv(table));
  }
};

struct GenerateCmd {
  TargetOptions target;
  std::string ar_model;
  std::size_t n = 0;
  std::optional<double> dt;
  std::optional<double> fs;
  std::optional<std::uint64_t> seed;
  std::uint64_t index = 0;
  std::optional<std::size_t> burn_in;
  std::string out;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("generate", "Draw a synthetic series from a PSD or AR model");
    target.attach(cmd, false);
    cmd->add_option("--ar-model", ar_model, "AR model JSON (as written by estimate)");
    cmd->add_option("--n", n, "Number of samples")->required();
    auto* dt_opt = cmd->add_option("--dt", dt, "Sampling interval (Gaussian target default 0.125)");
    cmd->add_option("--fs", fs, "Sampling rate in Hz")->excludes(dt_opt);
    cmd->add_option("--seed", seed, "Random seed")->required();
    cmd->add_option("--index", index, "Realization index within the seed's stream family")
        ->capture_default_str();
    cmd->add_option("--burn-in", burn_in, "Discarded warm-up samples for AR models (default 10 p)");
    cmd->add_option("--out", out, "Output CSV (time,value)")->required();
    cmd->callback([this] { run(); });
  }

  void run() const {
    const int sources = (target.given() ? 1 : 0) + (ar_model.empty() ? 0 : 1);
    if (sources != 1)
      throw CLI::ValidationError("generate", "give exactly one of --psd-gaussian, --psd, --ar-model");
    std::optional<double> step = dt;
    if (fs) step = 1.0 / *fs;
    mesa::TimeSeries ts = [&] {
      if (!ar_model.empty()) {
        auto model = json::parse(mesa::io::read_file(ar_model)).get<mesa::ArModel>();
        if (step) model = mesa::ArModel(model.a(), model.p_m(), *step);
        return mesa::generate_ar(model, n, burn_in.value_or(mesa::default_burn_in(model.order())),
                                 *seed, index);
      }
      if (!step) {
        if (!target.gaussian.empty())
          step = 0.125;
        else
          throw CLI::ValidationError("generate", "--psd needs --dt or --fs");
      }
      return mesa::generate_from_psd(target.function(*step), n, *step, *seed, index);
    }();
    mesa::io::write_atomic(out, mesa::io::series_csv(ts));
  }
};

struct WelchCmd {
  InputOptions input;
  std::size_t segment = 1024;
  std::optional<std::size_t> preset;
  double overlap = 0.5;
  double tukey = 0.4;
  bool detrend = false;
  std::string out;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("welch", "Welch PSD with a Tukey window");
    input.attach(cmd);
    auto* seg = cmd->add_option("--segment", segment, "Segment length")->capture_default_str();
    cmd->add_option("--preset", preset, "Segment length preset: 512 | 1024 | 2048 | 8192 | 32768")
        ->check(CLI::IsMember(std::vector<std::size_t>(std::begin(mesa::kWelchPresets),
                                                       std::end(mesa::kWelchPresets))))
        ->excludes(seg);
    cmd->add_option("--overlap", overlap, "Overlap fraction in [0, 1)")->capture_default_str();
    cmd->add_option("--tukey", tukey, "Tukey window alpha in [0, 1]")->capture_default_str();
    cmd->add_flag("--detrend", detrend, "Subtract each segment's mean");
    cmd->add_option("--out", out, "PSD CSV (frequency_hz,psd)")->required();
    cmd->callback([this] { run(); });
  }

  void run() const {
    const auto [ts, mean] = input.load();
    (void)mean;
    const mesa::WelchOptions opt{preset.value_or(segment), overlap, detrend};
    mesa::io::write_atomic(out, mesa::io::psd_csv(mesa::welch_psd(ts, opt, tukey)));
  }
};

struct CompareCmd {
  TargetOptions target;
  FitOptions fit;
  double duration = 5.0;
  double fs = 4096.0;
  std::size_t segment = 1024;
  double overlap = 0.5;
  double tukey = 0.4;
  std::optional<std::uint64_t> seed;
  std::uint64_t index = 0;
  std::string prefix;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("compare", "MESA vs Welch on one synthetic series");
    target.attach(cmd, true);
    fit.attach(cmd);
    cmd->add_option("--duration", duration, "Series length in seconds")->capture_default_str();
    cmd->add_option("--fs", fs, "Sampling rate in Hz")->capture_default_str();
    cmd->add_option("--segment", segment, "Welch segment length")->capture_default_str();
    cmd->add_option("--overlap", overlap, "Welch overlap fraction")->capture_default_str();
    cmd->add_option("--tukey", tukey, "Welch Tukey alpha")->capture_default_str();
    cmd->add_option("--seed", seed, "Random seed")->required();
    cmd->add_option("--index", index, "Realization index")->capture_default_str();
    cmd->add_option("--out-prefix,--out", prefix,
                    "Writes PREFIX_truth.csv, PREFIX_mesa.csv, PREFIX_welch.csv, PREFIX_errors.json")
        ->required();
    cmd->callback([this] { run(); });
  }

  void run() const {
    mesa::ComparisonConfig cfg;
    cfg.duration = duration;
    cfg.sample_rate = fs;
    cfg.welch = {segment, overlap, false};
    cfg.tukey_alpha = tukey;
    cfg.criterion = fit.parsed_criterion();
    cfg.method = fit.parsed_method();
    cfg.rng_seed = *seed;
    cfg.index = index;
    const auto res = mesa::compare_with_welch(target.function(1.0 / fs), cfg);
    mesa::io::write_atomic(with_suffix(prefix, "_truth.csv"), mesa::io::psd_csv(res.truth));
    mesa::io::write_atomic(with_suffix(prefix, "_mesa.csv"), mesa::io::psd_csv(res.mesa));
    mesa::io::write_atomic(with_suffix(prefix, "_welch.csv"), mesa::io::psd_csv(res.welch));
    write_json(with_suffix(prefix, "_errors.json"),
               {{"mesa_error", res.mesa_error},
                {"welch_error", res.welch_error},
                {"mesa_order", res.mesa_order},
                {"criterion", fit.criterion},
                {"segment", segment},
                {"duration", duration},
                {"fs", fs},
                {"seed", *seed}});
    std::cout << "estimator  rel_error\n"
              << "mesa       " << mesa::io::format_double(res.mesa_error) << "\n"
              << "welch      " << mesa::io::format_double(res.welch_error) << "\n";
  }
};

struct GaussianExperimentCmd {
  TargetOptions target;
  FitOptions fit;
  std::size_t realizations = 100;
  std::size_t n = 3000;
  double dt = 0.125;
  std::optional<std::uint64_t> seed;
  std::string prefix;

  void attach(CLI::App* parent) {
    auto* cmd = parent->add_subcommand("gaussian", "PSD recovery on an ensemble of synthetic series");
    target.attach(cmd, false);
    fit.attach(cmd);
    cmd->add_option("--realizations", realizations, "Ensemble size")->capture_default_str();
    cmd->add_option("--n", n, "Samples per series")->capture_default_str();
    cmd->add_option("--dt", dt, "Sampling interval")->capture_default_str();
    cmd->add_option("--seed", seed, "Random seed")->required();
    cmd->add_option("--out-prefix,--out", prefix,
                    "Writes PREFIX_records.jsonl, PREFIX_summary.json, PREFIX_mean_psd.csv, PREFIX_error_curve.csv")
        ->required();
    cmd->callback([this] { run(); });
  }

  void run() const {
    mesa::GaussianExperimentConfig cfg;
    cfg.n_realizations = realizations;
    cfg.n_samples = n;
    cfg.dt = dt;
    if (target.given()) cfg.target = target.function(dt);
    cfg.criterion = fit.parsed_criterion();
    cfg.method = fit.parsed_method();
    cfg.rng_seed = *seed;
    cfg.early_stop = fit.early_stop();
    const auto res = mesa::run_gaussian_experiment(cfg);
    mesa::io::write_atomic(with_suffix(prefix, "_records.jsonl"), mesa::io::json_lines(res.records));
    mesa::io::write_atomic(with_suffix(prefix, "_mean_psd.csv"),
                           mesa::io::psd_csv(res.mean_psd.to_one_sided()));
    mesa::io::write_atomic(with_suffix(prefix, "_error_curve.csv"),
                           mesa::io::psd_csv(res.error_curve));
    std::vector<double> orders, errors;
    for (const auto& r : res.records) {
      orders.push_back(static_cast<double>(r.order));
      errors.push_back(r.error);
    }
    write_json(with_suffix(prefix, "_summary.json"),
               {{"experiment", "gaussian"},
                {"criterion", fit.criterion},
                {"realizations", realizations},
                {"n", n},
                {"dt", dt},
                {"seed", *seed},
                {"order", quantile_summary(orders)},
                {"error", quantile_summary(errors)}});
  }
};

struct OrderRecoveryCmd {
  std::string method = "burg";
  std::size_t models = 50;
  std::size_t p_min = 2;
  std::size_t p_max = 500;
  std::size_t n = 30000;
  std::optional<std::uint64_t> seed;
  std::string prefix;

  void attach(CLI::App* parent) {
    auto* cmd = parent->add_subcommand("order-recovery", "Recover the order of random AR(p) processes");
    cmd->add_option("--method", method, "Estimator: burg | yule_walker")->capture_default_str();
    cmd->add_option("--models", models, "Number of random models")->capture_default_str();
    cmd->add_option("--p-min", p_min, "Smallest order")->capture_default_str();
    cmd->add_option("--p-max", p_max, "Largest order")->capture_default_str();
    cmd->add_option("--n", n, "Samples per series")->capture_default_str();
    cmd->add_option("--seed", seed, "Random seed")->required();
    cmd->add_option("--out-prefix,--out", prefix, "Writes PREFIX_records.jsonl, PREFIX_summary.json")
        ->required();
    cmd->callback([this] { run(); });
  }

  void run() const {
    mesa::OrderRecoveryConfig cfg{models, p_min, p_max, n, *seed, mesa::parse_method(method)};
    const auto recs = mesa::run_order_recovery(cfg);
    mesa::io::write_atomic(with_suffix(prefix, "_records.jsonl"), mesa::io::json_lines(recs));
    json per_criterion;
    for (mesa::Criterion c : mesa::kAllCriteria) {
      std::vector<double> p_hat, ratio;
      std::size_t within2 = 0;
      for (const auto& r : recs) {
        const auto est = r.estimate_for(c);
        p_hat.push_back(static_cast<double>(est));
        ratio.push_back(static_cast<double>(est) / static_cast<double>(r.p_true));
        within2 += est + 2 >= r.p_true && est <= r.p_true + 2;
      }
      json j{{"within_2", within2}};
      if (!recs.empty()) {
        j["p_hat"] = quantile_summary(p_hat);
        j["p_hat_over_p_true"] = quantile_summary(ratio);
      }
      per_criterion[std::string(mesa::to_string(c))] = j;
    }
    write_json(with_suffix(prefix, "_summary.json"),
               {{"experiment", "order-recovery"},
                {"models", models},
                {"p_min", p_min},
                {"p_max", p_max},
                {"n", n},
                {"m_max", mesa::max_order(n)},
                {"seed", *seed},
                {"criteria", per_criterion}});
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximum entropy spectral analysis: AR fitting, PSD, forecasting, baselines"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mesa 1.0.0");

  EstimateCmd estimate_cmd;
  ForecastCmd forecast_cmd;
  GenerateCmd generate_cmd;
  WelchCmd welch_cmd;
  CompareCmd compare_cmd;
  GaussianExperimentCmd gaussian_cmd;
  OrderRecoveryCmd recovery_cmd;
  estimate_cmd.attach(app);
  forecast_cmd.attach(app);
  generate_cmd.attach(app);
  welch_cmd.attach(app);
  compare_cmd.attach(app);
  auto* experiment = app.add_subcommand("experiment", "Validation experiments");
  experiment->require_subcommand(1);
  gaussian_cmd.attach(experiment);
  recovery_cmd.attach(experiment);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const mesa::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const mesa::io::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const mesa::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
