// Integration tests for the rmtlab binary: every check shells out to the real
// executable with a config written to a scratch directory and inspects exit
// codes, CSV bodies and metadata sidecars.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

#include "rmt/cli/config.hpp"

#ifndef RMTLAB_BIN
#error "RMTLAB_BIN must point at the rmtlab executable"
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() /
          ("rmtlab_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Scratch() { std::error_code ec; fs::remove_all(dir, ec); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RMTLAB_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string write_config(const Scratch& s, const std::string& name,
                         const json& j) {
  const std::string path = s.path(name);
  std::ofstream(path) << j.dump(2);
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

int column_of(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  FAIL("missing column ", name);
  return -1;
}

json gue_block(long n) {
  return {{"label", "gue"},
          {"N", n},
          {"entries", {{"kind", "complex-gaussian"}}},
          {"profile", {{"kind", "flat"}}}};
}

}  // namespace

TEST_CASE("--schema prints the config schema") {
  CHECK(run_cli("--schema") == 0);
}

TEST_CASE("predict with a zero-amplitude bump writes a zero row") {
  Scratch s;
  const json config = {
      {"observable", {{"k", 2}, {"center", 0.0}, {"half_width", 3.0}, {"amplitude", 0.0}}},
      {"output", s.path("zero")},
  };
  CHECK(run_cli("predict --config " + write_config(s, "c.json", config)) == 0);
  const auto rows = read_csv(s.path("zero.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][column_of(rows[0], "value")] == "0");
  CHECK(fs::exists(s.path("zero.meta.json")));
}

TEST_CASE("compare with identical specs and seed reports exactly zero") {
  Scratch s;
  const json config = {
      {"ensemble", gue_block(24)},
      {"ensemble_b", gue_block(24)},
      {"E", 0.0},
      {"observable", {{"k", 1}, {"half_width", 2.0}}},
      {"samples", 40},
      {"seed", 4242},
      {"output", s.path("cmp")},
  };
  CHECK(run_cli("compare --config " + write_config(s, "c.json", config)) == 0);
  const auto rows = read_csv(s.path("cmp.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][column_of(rows[0], "difference")] == "0");
  CHECK(rows[1][column_of(rows[0], "z_score")] == "0");
}

TEST_CASE("correlate agrees with predict across commands") {
  Scratch s;
  const json obs = {{"k", 1}, {"center", 0.0}, {"half_width", 3.0}};
  const json pconf = {{"observable", obs}, {"output", s.path("pred")}};
  REQUIRE(run_cli("predict --config " + write_config(s, "p.json", pconf)) == 0);
  const json cconf = {
      {"ensemble", gue_block(200)}, {"E", 0.0},       {"observable", obs},
      {"samples", 800},             {"seed", 20240},  {"workers", 2},
      {"output", s.path("corr")},
  };
  REQUIRE(run_cli("correlate --config " + write_config(s, "c.json", cconf)) == 0);
  const auto pred = read_csv(s.path("pred.csv"));
  const auto corr = read_csv(s.path("corr.csv"));
  const double prediction = std::stod(pred[1][column_of(pred[0], "value")]);
  const double estimate = std::stod(corr[1][column_of(corr[0], "estimate")]);
  const double stderr_ = std::stod(corr[1][column_of(corr[0], "stderr")]);
  CHECK(std::stod(corr[1][column_of(corr[0], "prediction")]) ==
        doctest::Approx(prediction).epsilon(1e-12));
  CHECK(std::abs(estimate - prediction) <= 3.0 * stderr_);
}

TEST_CASE("reruns of one config are byte-identical; workers only reassociate") {
  Scratch s;
  json config = {
      {"ensemble", gue_block(40)},
      {"E", 0.0},
      {"observable", {{"k", 1}, {"half_width", 2.0}}},
      {"samples", 60},
      {"seed", 777},
      {"workers", 1},
      {"output", s.path("a")},
  };
  const std::string path = write_config(s, "c.json", config);
  REQUIRE(run_cli("correlate --config " + path) == 0);
  REQUIRE(run_cli("correlate --config " + path + " --output " + s.path("b")) == 0);
  CHECK(slurp(s.path("a.csv")) == slurp(s.path("b.csv")));

  REQUIRE(run_cli("correlate --config " + path + " --output " + s.path("w2") +
                  " --workers 2") == 0);
  const auto one = read_csv(s.path("a.csv"));
  const auto two = read_csv(s.path("w2.csv"));
  const int est = column_of(one[0], "estimate");
  CHECK(std::stod(one[1][est]) ==
        doctest::Approx(std::stod(two[1][est])).epsilon(1e-10));
}

TEST_CASE("validation failures exit with code 2 and numerical ones with 3") {
  Scratch s;
  CHECK(run_cli("frobnicate --config nowhere.json") == 2);
  CHECK(run_cli("predict --config " + s.path("missing.json")) == 2);

  const json unknown_field = {
      {"observable", {{"k", 1}}}, {"output", s.path("x")}, {"typo_field", 1}};
  CHECK(run_cli("predict --config " + write_config(s, "u.json", unknown_field)) ==
        2);

  const json bad_block = {
      {"observable", {{"k", 1}, {"half_width", -1.0}}}, {"output", s.path("x")}};
  CHECK(run_cli("predict --config " + write_config(s, "b.json", bad_block)) == 2);

  const json unwritable = {
      {"observable", {{"k", 1}}}, {"output", "/nonexistent-dir/out"}};
  CHECK(run_cli("predict --config " + write_config(s, "w.json", unwritable)) == 2);

  // An unreachable quadrature tolerance is a numerical failure.
  const json hopeless = {{"observable", {{"k", 2}, {"half_width", 3.0}}},
                         {"quadrature_tol", 1e-30},
                         {"output", s.path("x")}};
  CHECK(run_cli("predict --config " + write_config(s, "h.json", hopeless)) == 3);
}

TEST_CASE("moments command: four-moment table and verdicts") {
  Scratch s;
  const json config = {
      {"distribution", {{"kind", "complex-gaussian"}}},
      {"distribution_b", {{"kind", "four-point-bernoulli"}}},
      {"N", 1000000},
      {"delta", 0.1},
      {"output", s.path("mm")},
  };
  CHECK(run_cli("moments --config " + write_config(s, "c.json", config)) == 0);
  const auto rows = read_csv(s.path("mm.csv"));
  REQUIRE(rows.size() == 15);  // header + 14 pairs
  const json meta = json::parse(slurp(s.path("mm.meta.json")));
  CHECK(meta.at("overall_pass") == false);

  const json single = {
      {"distribution", {{"kind", "heavy-tailed"}, {"gamma", 5.0}}},
      {"mc_samples", 20000},
      {"orders", {2.0, 3.0}},
      {"output", s.path("hm")},
  };
  CHECK(run_cli("moments --config " + write_config(s, "s.json", single)) == 0);
  CHECK(read_csv(s.path("hm.csv")).size() == 15);
  CHECK(read_csv(s.path("hm.entry_moments.csv")).size() == 3);
}

TEST_CASE("check-profile validates generators and user matrices") {
  Scratch s;
  const json good = {
      {"profile", {{"kind", "circulant-band"}, {"half_width", 4}, {"contrast", 0.5}}},
      {"N", 40},
      {"output", s.path("prof")},
  };
  CHECK(run_cli("check-profile --config " + write_config(s, "g.json", good)) == 0);
  auto rows = read_csv(s.path("prof.csv"));
  CHECK(rows[1][column_of(rows[0], "pass")] == "1");

  // A user matrix violating the row-sum invariant is reported, not repaired.
  std::ofstream bad(s.path("bad.csv"));
  bad << "0.5,0.2\n0.2,0.5\n";
  bad.close();
  const json user = {
      {"profile", {{"kind", "file"}, {"path", s.path("bad.csv")}}},
      {"N", 2},
      {"output", s.path("user")},
  };
  CHECK(run_cli("check-profile --config " + write_config(s, "u.json", user)) == 0);
  rows = read_csv(s.path("user.csv"));
  CHECK(rows[1][column_of(rows[0], "pass")] == "0");

  // Generator parameters that break the bounds are config errors.
  const json infeasible = {
      {"profile", {{"kind", "circulant-band"}, {"half_width", 19}, {"contrast", 0.9}}},
      {"N", 40},
      {"output", s.path("x")},
  };
  CHECK(run_cli("check-profile --config " + write_config(s, "i.json", infeasible)) ==
        2);
}

TEST_CASE("semicircle command writes diagnostics and the spectrum export") {
  Scratch s;
  const json config = {
      {"ensemble", gue_block(200)},
      {"E", 0.0},
      {"eta", 0.2},
      {"seed", 31415},
      {"spectrum_output", s.path("spec.csv")},
      {"output", s.path("semi")},
  };
  CHECK(run_cli("semicircle --config " + write_config(s, "c.json", config)) == 0);
  const auto rows = read_csv(s.path("semi.csv"));
  CHECK(std::stod(rows[1][column_of(rows[0], "ks_distance")]) < 0.1);
  const std::string spectrum = slurp(s.path("spec.csv"));
  CHECK(spectrum.find("# N=200") != std::string::npos);
  CHECK(spectrum.find("# ensemble=gue") != std::string::npos);
  CHECK(spectrum.find("eigenvalue") != std::string::npos);
}

TEST_CASE("sweep commands emit one row per grid point") {
  Scratch s;
  const json sweep_a = {
      {"ensemble",
       {{"label", "bern"},
        {"N", 32},
        {"entries", {{"kind", "four-point-bernoulli"}}}}},
      {"a_values", {0.0, 0.5, 1.0}},
      {"E", 0.0},
      {"observable", {{"k", 1}, {"half_width", 2.0}}},
      {"samples", 40},
      {"output", s.path("sa")},
  };
  CHECK(run_cli("sweep-a --config " + write_config(s, "a.json", sweep_a)) == 0);
  CHECK(read_csv(s.path("sa.csv")).size() == 4);

  const json sweep_n = {
      {"ensemble", {{"label", "gue"}, {"entries", {{"kind", "complex-gaussian"}}}}},
      {"N_values", {24, 48}},
      {"E", 0.0},
      {"observable", {{"k", 1}, {"half_width", 2.0}}},
      {"samples", 40},
      {"output", s.path("sn")},
  };
  CHECK(run_cli("sweep-n --config " + write_config(s, "n.json", sweep_n)) == 0);
  const auto rows = read_csv(s.path("sn.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][column_of(rows[0], "N")] == "24");
  CHECK(rows[2][column_of(rows[0], "N")] == "48");
}

TEST_CASE("ensemble blocks round-trip through the config schema") {
  rmt::RealVector atoms(3), probs(3);
  atoms << -std::sqrt(1.5), 0.0, std::sqrt(1.5);
  probs << 1.0 / 6, 2.0 / 3, 1.0 / 6;
  const rmt::EnsembleSpec spec(
      12,
      rmt::EntryDistribution::atomic(rmt::AtomicComponent(atoms, probs),
                                     rmt::AtomicComponent(atoms, probs)),
      rmt::flat_profile(12), "matched");
  const json block = rmt::cli::ensemble_to_json(json::object(), spec);
  const rmt::EnsembleSpec back = rmt::cli::ensemble_from_json(block, "ensemble");
  CHECK(back.n == spec.n);
  CHECK(back.label == spec.label);
  CHECK(back.entries.kind() == rmt::EntryKind::Atomic);
  CHECK(back.entries.real_component().atoms()[0] ==
        spec.entries.real_component().atoms()[0]);
  CHECK(back.profile.variances() == spec.profile.variances());
}
