#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "rmt/ensemble.hpp"
#include "rmt/entry_distribution.hpp"
#include "rmt/observable.hpp"
#include "rmt/statistics.hpp"
#include "rmt/types.hpp"
#include "rmt/variance_profile.hpp"

namespace rmt::cli {

using nlohmann::json;

inline const json& require_key(const json& j, const std::string& ctx,
                               const std::string& key) {
  if (!j.contains(key))
    throw ValidationError("config: missing required field '" + ctx + "." + key +
                          "'");
  return j.at(key);
}

inline void check_keys(const json& j, const std::string& ctx,
                       std::initializer_list<const char*> allowed) {
  if (!j.is_object())
    throw ValidationError("config: '" + ctx + "' must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw ValidationError("config: unknown field '" + ctx + "." + item.key() +
                            "'");
  }
}

inline double as_double(const json& j, const std::string& ctx) {
  if (!j.is_number())
    throw ValidationError("config: '" + ctx + "' must be a number");
  return j.get<double>();
}

inline long as_long(const json& j, const std::string& ctx) {
  if (!j.is_number_integer())
    throw ValidationError("config: '" + ctx + "' must be an integer");
  return j.get<long>();
}

inline std::string as_string(const json& j, const std::string& ctx) {
  if (!j.is_string())
    throw ValidationError("config: '" + ctx + "' must be a string");
  return j.get<std::string>();
}

inline RealVector as_vector(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty())
    throw ValidationError("config: '" + ctx + "' must be a nonempty array");
  RealVector v(j.size());
  Index i = 0;
  for (const auto& x : j) v[i++] = as_double(x, ctx + "[]");
  return v;
}

inline double get_double(const json& j, const std::string& ctx,
                         const std::string& key) {
  return as_double(require_key(j, ctx, key), ctx + "." + key);
}

inline long get_long(const json& j, const std::string& ctx,
                     const std::string& key) {
  return as_long(require_key(j, ctx, key), ctx + "." + key);
}

inline double get_double_or(const json& j, const std::string& ctx,
                            const std::string& key, double fallback) {
  return j.contains(key) ? as_double(j.at(key), ctx + "." + key) : fallback;
}

inline long get_long_or(const json& j, const std::string& ctx,
                        const std::string& key, long fallback) {
  return j.contains(key) ? as_long(j.at(key), ctx + "." + key) : fallback;
}

// ---- entry distributions ---------------------------------------------------

inline EntryDistribution entries_from_json(const json& j,
                                           const std::string& ctx) {
  check_keys(j, ctx,
             {"kind", "gamma", "re_atoms", "re_probs", "im_atoms", "im_probs"});
  const std::string kind = as_string(require_key(j, ctx, "kind"), ctx + ".kind");
  if (kind == "complex-gaussian") return EntryDistribution::complex_gaussian();
  if (kind == "four-point-bernoulli")
    return EntryDistribution::four_point_bernoulli();
  if (kind == "heavy-tailed")
    return EntryDistribution::heavy_tailed(get_double(j, ctx, "gamma"));
  if (kind == "atomic") {
    AtomicComponent re(as_vector(require_key(j, ctx, "re_atoms"), ctx),
                       as_vector(require_key(j, ctx, "re_probs"), ctx));
    AtomicComponent im(as_vector(require_key(j, ctx, "im_atoms"), ctx),
                       as_vector(require_key(j, ctx, "im_probs"), ctx));
    return EntryDistribution::atomic(std::move(re), std::move(im));
  }
  throw ValidationError("config: '" + ctx + ".kind' must be one of "
                        "complex-gaussian, four-point-bernoulli, atomic, "
                        "heavy-tailed");
}

inline json entries_to_json(const EntryDistribution& d) {
  json j;
  j["kind"] = d.kind_name();
  if (d.kind() == EntryKind::HeavyTailed) j["gamma"] = d.tail_index();
  if (d.kind() == EntryKind::Atomic) {
    auto dump = [](const RealVector& v) {
      return std::vector<double>(v.data(), v.data() + v.size());
    };
    j["re_atoms"] = dump(d.real_component().atoms());
    j["re_probs"] = dump(d.real_component().probs());
    j["im_atoms"] = dump(d.imag_component().atoms());
    j["im_probs"] = dump(d.imag_component().probs());
  }
  return j;
}

// ---- variance profiles -----------------------------------------------------

inline RealMatrix read_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot read profile file " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.empty())
    throw ValidationError("config: profile file " + path + " is empty");
  RealMatrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw ValidationError("config: ragged rows in profile file " + path);
    for (std::size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
  }
  return m;
}

// Band half-widths may be absolute ("half_width") or a fraction of N
// ("half_width_fraction"); user-supplied matrices are validated, not repaired.
inline VarianceProfile profile_from_json(const json& j, const std::string& ctx,
                                         Index n) {
  check_keys(j, ctx,
             {"kind", "half_width", "half_width_fraction", "contrast", "path",
              "delta"});
  const std::string kind = as_string(require_key(j, ctx, "kind"), ctx + ".kind");
  if (kind == "flat") return flat_profile(n);
  if (kind == "circulant-band") {
    Index w;
    if (j.contains("half_width_fraction")) {
      const double frac = get_double(j, ctx, "half_width_fraction");
      w = std::max<Index>(1, static_cast<Index>(std::llround(
                                 frac * static_cast<double>(n))));
    } else {
      w = get_long(j, ctx, "half_width");
    }
    return circulant_band_profile(n, w, get_double_or(j, ctx, "contrast", 0.0));
  }
  if (kind == "file") {
    RealMatrix v = read_profile_csv(
        as_string(require_key(j, ctx, "path"), ctx + ".path"));
    if (v.rows() != n)
      throw ValidationError("config: profile file dimension differs from N");
    const double delta = j.contains("delta")
                             ? get_double(j, ctx, "delta")
                             : detail::delta_with_margin(v);
    return VarianceProfile(std::move(v), delta);
  }
  throw ValidationError("config: '" + ctx +
                        ".kind' must be flat, circulant-band or file");
}

// ---- ensembles -------------------------------------------------------------

inline EnsembleSpec ensemble_from_json(const json& j, const std::string& ctx) {
  check_keys(j, ctx, {"label", "N", "entries", "profile"});
  const Index n = get_long(j, ctx, "N");
  EntryDistribution entries =
      j.contains("entries")
          ? entries_from_json(j.at("entries"), ctx + ".entries")
          : EntryDistribution::complex_gaussian();
  VarianceProfile profile =
      j.contains("profile")
          ? profile_from_json(j.at("profile"), ctx + ".profile", n)
          : flat_profile(n);
  const std::string label =
      j.contains("label") ? as_string(j.at("label"), ctx + ".label") : "ensemble";
  return EnsembleSpec(n, std::move(entries), std::move(profile), label);
}

// Ensemble block serialization for the metadata sidecar; generator-based
// profiles are echoed from the config, so the block is the config schema's
// ensemble document.
inline json ensemble_to_json(const json& configured, const EnsembleSpec& spec) {
  json j = configured;
  j["N"] = spec.n;
  j["label"] = spec.label;
  j["entries"] = entries_to_json(spec.entries);
  if (!j.contains("profile")) j["profile"] = {{"kind", "flat"}};
  return j;
}

// Family for N sweeps: same block, N ignored, band width via fraction.
inline EnsembleFamily family_from_json(const json& j, const std::string& ctx) {
  check_keys(j, ctx, {"label", "N", "entries", "profile"});
  EnsembleFamily family{
      j.contains("entries")
          ? entries_from_json(j.at("entries"), ctx + ".entries")
          : EntryDistribution::complex_gaussian(),
      ProfileKind::Flat,
      0,
      0.0,
      0.0,
      j.contains("label") ? as_string(j.at("label"), ctx + ".label")
                          : "ensemble"};
  if (j.contains("profile")) {
    const json& p = j.at("profile");
    check_keys(p, ctx + ".profile",
               {"kind", "half_width", "half_width_fraction", "contrast"});
    const std::string kind =
        as_string(require_key(p, ctx + ".profile", "kind"), ctx + ".profile.kind");
    if (kind == "circulant-band") {
      family.profile_kind = ProfileKind::CirculantBand;
      if (p.contains("half_width_fraction"))
        family.band_fraction = get_double(p, ctx + ".profile", "half_width_fraction");
      else
        family.band_half_width = get_long(p, ctx + ".profile", "half_width");
      family.contrast = get_double_or(p, ctx + ".profile", "contrast", 0.0);
    } else if (kind != "flat") {
      throw ValidationError("config: '" + ctx +
                            ".profile.kind' must be flat or circulant-band");
    }
  }
  return family;
}

// ---- observables -----------------------------------------------------------

inline Observable observable_from_json(const json& j, const std::string& ctx) {
  check_keys(j, ctx,
             {"k", "center", "centers", "half_width", "half_widths",
              "amplitude"});
  const long k = get_long(j, ctx, "k");
  if (k < 1 || k > 3)
    throw ValidationError("config: '" + ctx + ".k' must be 1, 2 or 3");
  RealVector centers, widths;
  if (j.contains("centers"))
    centers = as_vector(j.at("centers"), ctx + ".centers");
  else
    centers = RealVector::Constant(k, get_double_or(j, ctx, "center", 0.0));
  if (j.contains("half_widths"))
    widths = as_vector(j.at("half_widths"), ctx + ".half_widths");
  else
    widths = RealVector::Constant(k, get_double_or(j, ctx, "half_width", 3.0));
  if (centers.size() != k || widths.size() != k)
    throw ValidationError("config: '" + ctx + "' axis arrays must have k entries");
  return Observable(std::move(centers), std::move(widths),
                    get_double_or(j, ctx, "amplitude", 1.0));
}

// ---- top-level config ------------------------------------------------------

struct CommonConfig {
  SeedSpec seed;
  std::string output;
  int workers = 1;
};

inline CommonConfig common_from_json(const json& j) {
  CommonConfig c;
  c.seed.master = static_cast<std::uint64_t>(get_long_or(j, "config", "seed", 1));
  c.seed.stream = static_cast<std::uint64_t>(get_long_or(j, "config", "stream", 0));
  c.output = as_string(require_key(j, "config", "output"), "config.output");
  c.workers = static_cast<int>(get_long_or(j, "config", "workers", 1));
  if (c.workers < 1)
    throw ValidationError("config: 'workers' must be at least 1");
  return c;
}

inline json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config file is not valid JSON: ") +
                          e.what());
  }
  if (!j.is_object())
    throw ValidationError("config file must contain a JSON object");
  return j;
}

// Informative schema, printed by `rmtlab --schema`.
inline std::string schema_text() {
  json s;
  s["common"] = {{"seed", "uint64 master seed (default 1)"},
                 {"stream", "uint64 base stream (default 0)"},
                 {"output", "path prefix; writes <output>.csv and <output>.meta.json"},
                 {"workers", "worker threads (default 1)"}};
  s["blocks"]["ensemble"] = {
      {"label", "string"},
      {"N", "matrix dimension"},
      {"entries", "{kind: complex-gaussian|four-point-bernoulli|atomic|heavy-tailed,"
                  " gamma, re_atoms, re_probs, im_atoms, im_probs}"},
      {"profile", "{kind: flat|circulant-band|file, half_width,"
                  " half_width_fraction, contrast, path, delta}"}};
  s["blocks"]["observable"] = {
      {"k", "arity (1..3)"},
      {"center", "shared axis center (or centers: [..])"},
      {"half_width", "shared axis half-width (or half_widths: [..])"},
      {"amplitude", "scale factor, default 1"}};
  s["commands"]["predict"] = {{"observable", "required"},
                              {"quadrature_tol", "default 1e-8 (1e-6 for k=3)"}};
  s["commands"]["correlate"] = {{"ensemble", "required"},
                                {"E", "bulk energy, |E| < 2"},
                                {"observable", "required"},
                                {"samples", "Monte Carlo sample count M"},
                                {"energy_average_eps", "optional window exponent"},
                                {"quadrature_tol", "tolerance for the prediction column"}};
  s["commands"]["compare"] = {{"ensemble", "required"},
                              {"ensemble_b", "required, same N"},
                              {"E", "bulk energy"},
                              {"observable", "required"},
                              {"samples", "M per ensemble"}};
  s["commands"]["sweep-n"] = {{"ensemble", "family; N taken from N_values"},
                              {"N_values", "ascending dimensions"},
                              {"E", "bulk energy"},
                              {"observable", "required"},
                              {"samples", "M per dimension"},
                              {"quadrature_tol", "prediction tolerance"}};
  s["commands"]["sweep-a"] = {{"ensemble", "base ensemble"},
                              {"a_values", "interpolation parameters in [0,1]"},
                              {"E", "bulk energy"},
                              {"observable", "required"},
                              {"samples", "M per a"}};
  s["commands"]["moments"] = {{"distribution", "entry law"},
                              {"distribution_b", "optional second law"},
                              {"N", "dimension for the four-moment bound"},
                              {"delta", "matching exponent"},
                              {"mc_samples", "Monte Carlo draws for heavy tails"},
                              {"orders", "optional |v|^p orders"}};
  s["commands"]["check-profile"] = {{"profile", "required"}, {"N", "dimension"}};
  s["commands"]["semicircle"] = {{"ensemble", "required"},
                                 {"E", "window center"},
                                 {"eta", "window half-width"},
                                 {"spectrum_output", "optional eigenvalue CSV path"}};
  s["exit_codes"] = {{"0", "success"},
                     {"2", "validation error"},
                     {"3", "numerical failure"}};
  return s.dump(2);
}

}  // namespace rmt::cli
