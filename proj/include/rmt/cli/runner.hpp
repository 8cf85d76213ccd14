#pragma once

#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include "rmt/cli/config.hpp"
#include "rmt/csv.hpp"
#include "rmt/moment_match.hpp"
#include "rmt/moments.hpp"
#include "rmt/sine_kernel.hpp"
#include "rmt/statistics.hpp"

namespace rmt::cli {

inline void write_meta(const std::string& path, const json& meta) {
  std::ofstream out(path);
  if (!out)
    throw ValidationError("cannot open output path for writing: " + path);
  out << meta.dump(2) << '\n';
  out.close();
  if (!out) throw ValidationError("failed to flush metadata sidecar");
}

// Metadata sidecar: the run is fully re-executable from this document alone.
inline json base_meta(const std::string& command, const json& file_config,
                      const json& overrides, const json& effective,
                      const CommonConfig& common) {
  json meta;
  meta["command"] = command;
  meta["config_file"] = file_config;
  meta["overrides"] = overrides;
  meta["effective"] = effective;
  meta["master_seed"] = common.seed.master;
  meta["stream"] = common.seed.stream;
  meta["workers"] = common.workers;
  return meta;
}

inline std::string statistic_z(double estimate, double reference,
                               double stderr_) {
  const double dev = estimate - reference;
  if (stderr_ > 0.0) return format_double(dev / stderr_);
  return format_double(dev == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
}

inline void run_predict(const json& config, const CommonConfig& common,
                        json& meta) {
  check_keys(config, "config",
             {"seed", "stream", "output", "workers", "observable",
              "quadrature_tol"});
  const Observable observable =
      observable_from_json(require_key(config, "config", "observable"),
                           "observable");
  const int k = observable.arity();
  const double tol =
      get_double_or(config, "config", "quadrature_tol", k == 3 ? 1e-6 : 1e-8);
  const PredictedStatistic p = predicted_statistic(observable, k, tol);
  const std::vector<std::string> columns = {"k", "observable_id",
                                            "quadrature_tol", "value",
                                            "error_estimate"};
  CsvWriter csv(common.output + ".csv", columns);
  csv.write_row({std::to_string(p.k), observable.id(), format_double(tol),
                 format_double(p.value), format_double(p.quadrature_error)});
  csv.close();
  meta["columns"] = columns;
  std::cout << "predict: k=" << p.k << " value=" << p.value
            << " quadrature_error=" << p.quadrature_error << '\n';
}

inline void run_correlate(const json& config, const CommonConfig& common,
                          json& meta) {
  check_keys(config, "config",
             {"seed", "stream", "output", "workers", "ensemble", "E",
              "observable", "samples", "energy_average_eps", "quadrature_tol"});
  const EnsembleSpec spec =
      ensemble_from_json(require_key(config, "config", "ensemble"), "ensemble");
  const Observable observable =
      observable_from_json(require_key(config, "config", "observable"),
                           "observable");
  const double energy = get_double(config, "config", "E");
  const long samples = get_long(config, "config", "samples");
  const int k = observable.arity();
  const double tol =
      get_double_or(config, "config", "quadrature_tol", k == 3 ? 1e-6 : 1e-8);
  EstimatorOptions opts;
  opts.workers = common.workers;
  if (config.contains("energy_average_eps"))
    opts.energy_average_eps = get_double(config, "config", "energy_average_eps");
  const PredictedStatistic prediction = predicted_statistic(observable, k, tol);
  const CorrelationStatistic stat =
      empirical_statistic(spec, energy, observable, samples, common.seed, opts);
  const std::vector<std::string> columns = {
      "ensemble_label", "N",      "E",          "k",       "observable_id",
      "M",              "estimate", "stderr",   "prediction", "z_score"};
  CsvWriter csv(common.output + ".csv", columns);
  csv.write_row({stat.label, std::to_string(stat.n), format_double(stat.energy),
                 std::to_string(stat.k), observable.id(),
                 std::to_string(stat.samples), format_double(stat.estimate),
                 format_double(stat.standard_error),
                 format_double(prediction.value),
                 statistic_z(stat.estimate, prediction.value,
                             stat.standard_error)});
  csv.close();
  meta["columns"] = columns;
  meta["effective"]["ensemble"] =
      ensemble_to_json(config.at("ensemble"), spec);
  std::cout << "correlate: " << stat.label << " estimate=" << stat.estimate
            << " stderr=" << stat.standard_error
            << " prediction=" << prediction.value << '\n';
}

inline void run_compare(const json& config, const CommonConfig& common,
                        json& meta) {
  check_keys(config, "config",
             {"seed", "stream", "output", "workers", "ensemble", "ensemble_b",
              "E", "observable", "samples"});
  const EnsembleSpec spec_a =
      ensemble_from_json(require_key(config, "config", "ensemble"), "ensemble");
  const EnsembleSpec spec_b = ensemble_from_json(
      require_key(config, "config", "ensemble_b"), "ensemble_b");
  const Observable observable =
      observable_from_json(require_key(config, "config", "observable"),
                           "observable");
  const double energy = get_double(config, "config", "E");
  const long samples = get_long(config, "config", "samples");
  EstimatorOptions opts;
  opts.workers = common.workers;
  const ComparisonResult r = compare_ensembles(spec_a, spec_b, energy,
                                               observable, samples, common.seed,
                                               opts);
  const std::vector<std::string> columns = {
      "label_a",    "label_b",  "N",          "E",
      "k",          "observable_id", "M",     "estimate_a",
      "stderr_a",   "estimate_b", "stderr_b", "difference",
      "combined_stderr", "z_score"};
  CsvWriter csv(common.output + ".csv", columns);
  csv.write_row({r.a.label, r.b.label, std::to_string(r.a.n),
                 format_double(energy), std::to_string(r.a.k), observable.id(),
                 std::to_string(r.a.samples), format_double(r.a.estimate),
                 format_double(r.a.standard_error), format_double(r.b.estimate),
                 format_double(r.b.standard_error), format_double(r.difference),
                 format_double(r.combined_stderr), format_double(r.z_score)});
  csv.close();
  meta["columns"] = columns;
  meta["effective"]["ensemble"] = ensemble_to_json(config.at("ensemble"), spec_a);
  meta["effective"]["ensemble_b"] =
      ensemble_to_json(config.at("ensemble_b"), spec_b);
  std::cout << "compare: difference=" << r.difference
            << " combined_stderr=" << r.combined_stderr << " z=" << r.z_score
            << '\n';
}

inline void run_sweep_n(const json& config, const CommonConfig& common,
                        json& meta) {
  check_keys(config, "config",
             {"seed", "stream", "output", "workers", "ensemble", "N_values",
              "E", "observable", "samples", "quadrature_tol"});
  const EnsembleFamily family =
      family_from_json(require_key(config, "config", "ensemble"), "ensemble");
  const Observable observable =
      observable_from_json(require_key(config, "config", "observable"),
                           "observable");
  const double energy = get_double(config, "config", "E");
  const long samples = get_long(config, "config", "samples");
  const json& nv = require_key(config, "config", "N_values");
  if (!nv.is_array() || nv.empty())
    throw ValidationError("config: 'N_values' must be a nonempty array");
  std::vector<Index> n_values;
  for (const auto& x : nv) n_values.push_back(as_long(x, "N_values[]"));
  const int k = observable.arity();
  const double tol =
      get_double_or(config, "config", "quadrature_tol", k == 3 ? 1e-6 : 1e-8);
  EstimatorOptions opts;
  opts.workers = common.workers;
  const PredictedStatistic prediction = predicted_statistic(observable, k, tol);
  const std::vector<SweepRow> rows = convergence_sweep(
      family, n_values, energy, observable, prediction.value, samples,
      common.seed, opts);
  const std::vector<std::string> columns = {
      "ensemble_label", "N",      "E",          "k",        "observable_id",
      "M",              "estimate", "stderr",   "prediction", "deviation",
      "z_score"};
  CsvWriter csv(common.output + ".csv", columns);
  for (const SweepRow& row : rows)
    csv.write_row({row.statistic.label, std::to_string(row.statistic.n),
                   format_double(row.statistic.energy),
                   std::to_string(row.statistic.k), observable.id(),
                   std::to_string(row.statistic.samples),
                   format_double(row.statistic.estimate),
                   format_double(row.statistic.standard_error),
                   format_double(row.prediction), format_double(row.deviation),
                   statistic_z(row.statistic.estimate, row.prediction,
                               row.statistic.standard_error)});
  csv.close();
  meta["columns"] = columns;
  std::cout << "sweep-n: " << rows.size() << " rows, prediction "
            << prediction.value << '\n';
}

inline void run_sweep_a(const json& config, const CommonConfig& common,
                        json& meta) {
  check_keys(config, "config",
             {"seed", "stream", "output", "workers", "ensemble", "a_values",
              "E", "observable", "samples"});
  const EnsembleSpec base =
      ensemble_from_json(require_key(config, "config", "ensemble"), "ensemble");
  const Observable observable =
      observable_from_json(require_key(config, "config", "observable"),
                           "observable");
  const double energy = get_double(config, "config", "E");
  const long samples = get_long(config, "config", "samples");
  const json& av = require_key(config, "config", "a_values");
  if (!av.is_array() || av.empty())
    throw ValidationError("config: 'a_values' must be a nonempty array");
  std::vector<double> a_values;
  for (const auto& x : av) a_values.push_back(as_double(x, "a_values[]"));
  EstimatorOptions opts;
  opts.workers = common.workers;
  const std::vector<CorrelationStatistic> stats = divisibility_sweep(
      base, a_values, energy, observable, samples, common.seed, opts);
  const std::vector<std::string> columns = {"ensemble_label", "a",
                                            "N",              "E",
                                            "k",              "observable_id",
                                            "M",              "estimate",
                                            "stderr"};
  CsvWriter csv(common.output + ".csv", columns);
  for (std::size_t i = 0; i < stats.size(); ++i)
    csv.write_row({stats[i].label, format_double(a_values[i]),
                   std::to_string(stats[i].n), format_double(stats[i].energy),
                   std::to_string(stats[i].k), observable.id(),
                   std::to_string(stats[i].samples),
                   format_double(stats[i].estimate),
                   format_double(stats[i].standard_error)});
  csv.close();
  meta["columns"] = columns;
  meta["effective"]["ensemble"] = ensemble_to_json(config.at("ensemble"), base);
  std::cout << "sweep-a: " << stats.size() << " rows\n";
}

inline void run_moments(const json& config, const CommonConfig& common,
                        json& meta) {
  check_keys(config, "config",
             {"seed", "stream", "output", "workers", "distribution",
              "distribution_b", "N", "delta", "mc_samples", "orders"});
  const EntryDistribution dist = entries_from_json(
      require_key(config, "config", "distribution"), "distribution");
  std::optional<long> mc_samples;
  if (config.contains("mc_samples"))
    mc_samples = get_long(config, "config", "mc_samples");

  if (config.contains("distribution_b")) {
    if (config.contains("orders"))
      throw ValidationError(
          "config: 'orders' applies to single-distribution runs only");
    const EntryDistribution dist_b =
        entries_from_json(config.at("distribution_b"), "distribution_b");
    const Index n = get_long(config, "config", "N");
    const double delta = get_double(config, "config", "delta");
    const ComponentMoments mv = compute_moments(dist, mc_samples, common.seed);
    const ComponentMoments mw =
        compute_moments(dist_b, mc_samples, substream(common.seed, 1));
    const MatchReport report = check_four_moment_condition(mv, mw, n, delta);
    const std::vector<std::string> columns = {
        "a", "b", "moment_v", "moment_w", "difference", "bound", "pass"};
    CsvWriter csv(common.output + ".csv", columns);
    for (const PairCheck& p : report.pairs)
      csv.write_row({std::to_string(p.a), std::to_string(p.b),
                     format_double(p.moment_v), format_double(p.moment_w),
                     format_double(p.difference), format_double(p.bound),
                     p.pass ? "1" : "0"});
    csv.close();
    meta["columns"] = columns;
    meta["overall_pass"] = report.overall_pass;
    std::cout << "moments: four-moment condition "
              << (report.overall_pass ? "PASS" : "FAIL")
              << " (max difference " << report.max_difference() << ")\n";
    return;
  }

  const ComponentMoments m = compute_moments(dist, mc_samples, common.seed);
  const std::vector<std::string> columns = {"a", "b", "value", "stderr",
                                            "provenance"};
  CsvWriter csv(common.output + ".csv", columns);
  for (const auto& [a, b] : ComponentMoments::pairs()) {
    const MomentValue& v = m.at(a, b);
    csv.write_row({std::to_string(a), std::to_string(b), format_double(v.value),
                   format_double(v.standard_error),
                   v.analytic ? "analytic" : "monte-carlo"});
  }
  csv.close();
  meta["columns"] = columns;
  if (config.contains("orders")) {
    const json& orders = config.at("orders");
    if (!orders.is_array() || orders.empty())
      throw ValidationError("config: 'orders' must be a nonempty array");
    const std::string path = common.output + ".entry_moments.csv";
    CsvWriter extra(path, {"p", "value", "stderr", "provenance"});
    for (const auto& x : orders) {
      const double p = as_double(x, "orders[]");
      const MomentEstimate e =
          entry_moment(dist, p, mc_samples, substream(common.seed, 2));
      extra.write_row({format_double(p), format_double(e.value),
                       format_double(e.standard_error),
                       e.analytic ? "analytic" : "monte-carlo"});
    }
    extra.close();
    meta["entry_moments_csv"] = path;
  }
  std::cout << "moments: wrote " << ComponentMoments::kPairCount
            << " pairs for " << dist.kind_name() << '\n';
}

inline void run_check_profile(const json& config, const CommonConfig& common,
                              json& meta) {
  check_keys(config, "config",
             {"seed", "stream", "output", "workers", "profile", "N"});
  const Index n = get_long(config, "config", "N");
  const json& pj = require_key(config, "config", "profile");
  const std::string kind =
      as_string(require_key(pj, "profile", "kind"), "profile.kind");

  RealMatrix variances;
  double delta = 0.0;
  std::string violation;
  bool pass = true;
  if (kind == "file") {
    // User-supplied profiles are validated, never repaired: invariant
    // violations are findings reported in the CSV, not config errors.
    variances = read_profile_csv(
        as_string(require_key(pj, "profile", "path"), "profile.path"));
    if (variances.rows() != n)
      throw ValidationError("config: profile file dimension differs from N");
    try {
      delta = pj.contains("delta") ? get_double(pj, "profile", "delta")
                                   : detail::delta_with_margin(variances);
      VarianceProfile checked(variances, delta);
      (void)checked;
    } catch (const ValidationError& e) {
      pass = false;
      violation = e.what();
    }
  } else {
    const VarianceProfile profile = profile_from_json(pj, "profile", n);
    variances = profile.variances();
    delta = profile.delta();
  }

  double max_rowsum_dev = 0.0;
  bool symmetric = true;
  for (Index i = 0; i < variances.rows(); ++i) {
    max_rowsum_dev =
        std::max(max_rowsum_dev, std::abs(variances.row(i).sum() - 1.0));
    for (Index j = 0; j < i; ++j)
      symmetric = symmetric && variances(i, j) == variances(j, i);
  }
  const double dn = static_cast<double>(variances.rows());
  const double min_scaled = dn * variances.minCoeff();
  const double max_scaled = dn * variances.maxCoeff();

  const std::vector<std::string> columns = {
      "N",          "kind",       "delta",        "min_N_sigma2",
      "max_N_sigma2", "max_rowsum_deviation", "symmetric", "pass",
      "violation"};
  CsvWriter csv(common.output + ".csv", columns);
  csv.write_row({std::to_string(n), kind, format_double(delta),
                 format_double(min_scaled), format_double(max_scaled),
                 format_double(max_rowsum_dev), symmetric ? "1" : "0",
                 pass ? "1" : "0", violation});
  csv.close();
  meta["columns"] = columns;
  std::cout << "check-profile: " << (pass ? "PASS" : "FAIL") << " (N sigma^2 in ["
            << min_scaled << ", " << max_scaled << "], delta " << delta << ")\n";
}

inline void run_semicircle(const json& config, const CommonConfig& common,
                           json& meta) {
  check_keys(config, "config",
             {"seed", "stream", "output", "workers", "ensemble", "E", "eta",
              "spectrum_output"});
  const EnsembleSpec spec =
      ensemble_from_json(require_key(config, "config", "ensemble"), "ensemble");
  const double energy = get_double(config, "config", "E");
  const double eta = get_double(config, "config", "eta");
  const SeedSpec sample_seed = substream(common.seed, 0, 0);
  const HermitianMatrix h = sample_matrix(spec, sample_seed);
  const Spectrum spectrum = eigenvalues(h);
  const double ks = ks_distance_to_semicircle(spectrum);
  const LocalDensityReport window = local_density_check(spectrum, energy, eta);
  if (config.contains("spectrum_output"))
    write_spectrum_csv(as_string(config.at("spectrum_output"),
                                 "config.spectrum_output"),
                       spectrum, sample_seed, spec.label);
  const std::vector<std::string> columns = {
      "ensemble_label", "N",  "E", "eta", "ks_distance", "window_count",
      "window_predicted", "relative_deviation"};
  CsvWriter csv(common.output + ".csv", columns);
  csv.write_row({spec.label, std::to_string(spec.n), format_double(energy),
                 format_double(eta), format_double(ks),
                 std::to_string(window.empirical),
                 format_double(window.predicted),
                 format_double(window.relative_deviation)});
  csv.close();
  meta["columns"] = columns;
  meta["effective"]["ensemble"] = ensemble_to_json(config.at("ensemble"), spec);
  std::cout << "semicircle: KS=" << ks << " window " << window.empirical
            << " vs " << window.predicted << '\n';
}

// Dispatch; throws ValidationError / NumericalError for the caller to map to
// exit codes.
inline void run(const std::string& command, const json& file_config,
                const json& overrides) {
  json effective = file_config;
  for (const auto& item : overrides.items()) {
    // --N targets the ensemble block(s) where the dimension lives there.
    if (item.key() == "N" &&
        !(command == "moments" || command == "check-profile")) {
      if (effective.contains("ensemble") && effective["ensemble"].is_object())
        effective["ensemble"]["N"] = item.value();
      if (effective.contains("ensemble_b") && effective["ensemble_b"].is_object())
        effective["ensemble_b"]["N"] = item.value();
      continue;
    }
    effective[item.key()] = item.value();
  }
  const CommonConfig common = common_from_json(effective);
  json meta = base_meta(command, file_config, overrides, effective, common);
  meta["csv"] = common.output + ".csv";

  if (command == "predict")
    run_predict(effective, common, meta);
  else if (command == "correlate")
    run_correlate(effective, common, meta);
  else if (command == "compare")
    run_compare(effective, common, meta);
  else if (command == "sweep-n")
    run_sweep_n(effective, common, meta);
  else if (command == "sweep-a")
    run_sweep_a(effective, common, meta);
  else if (command == "moments")
    run_moments(effective, common, meta);
  else if (command == "check-profile")
    run_check_profile(effective, common, meta);
  else if (command == "semicircle")
    run_semicircle(effective, common, meta);
  else
    throw ValidationError("unknown command: " + command);

  write_meta(common.output + ".meta.json", meta);
}

}  // namespace rmt::cli
