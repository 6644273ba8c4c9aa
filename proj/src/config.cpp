#include "anisoflow/config.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "anisoflow/errors.hpp"

namespace anisoflow {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"", {"seed", "output"}},
      {"integrand", {"family", "dim", "matrix", "delta", "delta_range"}},
      {"grid", {"cells", "L"}},
      {"initial", {"kind", "amplitude", "beta", "modes", "wavenumber", "width"}},
      {"time", {"T", "cfl_safety", "sample_every"}},
      {"theorem", {"id", "M", "R"}},
      {"budget", {"direction_samples", "s_grid", "s_max", "refine_iters"}},
      {"constants", {"P", "eps"}},
      {"check", {"samples", "tol"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& where, const std::string& text, const char* expected) {
  throw ConfigError(where + ": expected " + expected + ", got '" + text + "'");
}

double to_double(const std::string& where, const std::string& raw) {
  const std::string text = trim(raw);
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) bad_value(where, text, "a finite number");
  return v;
}

long long to_int(const std::string& where, const std::string& raw) {
  const std::string text = trim(raw);
  long long v = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) bad_value(where, text, "an integer");
  return v;
}

std::vector<double> to_list(const std::string& where, const std::string& raw) {
  std::vector<double> out;
  std::string token;
  std::istringstream is(raw);
  while (std::getline(is, token, ',')) {
    std::istringstream ws(token);
    std::string piece;
    while (ws >> piece) out.push_back(to_double(where, piece));
  }
  return out;
}

int positive_int(const std::string& where, const std::string& raw) {
  const long long v = to_int(where, raw);
  if (v < 1 || v > 1'000'000'000) bad_value(where, raw, "a positive integer");
  return static_cast<int>(v);
}

std::string fmt_list(const std::vector<double>& v) { return fmt::format("{}", fmt::join(v, ", ")); }

}  // namespace

Integrand IntegrandConfig::build() const {
  if (dim < 1) throw ConfigError("integrand.dim: must be >= 1");
  try {
    if (family == "euclidean") return Integrand::euclidean(dim);
    if (family == "ellipsoid") {
      if (matrix.size() != (dim + 1) * (dim + 1))
        throw ConfigError(fmt::format("integrand.matrix: expected {} entries, got {}", (dim + 1) * (dim + 1),
                                      matrix.size()));
      return Integrand::ellipsoid(dim, matrix);
    }
    if (family == "perturbed") {
      if (delta_range != "standard" && delta_range != "extended")
        throw ConfigError("integrand.delta_range: expected standard or extended, got '" + delta_range + "'");
      return Integrand::perturbed(dim, delta, delta_range == "extended" ? DeltaRange::extended : DeltaRange::standard);
    }
    if (family == "odd_perturbed") return Integrand::odd_perturbed(dim, delta);
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("integrand: ") + e.what());
  } catch (const IntegrandInvalid& e) {
    throw ConfigError(std::string("integrand: ") + e.what());
  }
  throw ConfigError("integrand.family: unknown family '" + family + "'");
}

void Config::set_seed(std::uint64_t s) {
  seed = s;
  initial.seed = s;
  budget.seed = s;
}

Config parse_config(std::istream& in, const std::string& source) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("{}:{}: {}", source, e.line(), e.message()));
  }

  Config c;
  c.grid.L = 2.0 * std::numbers::pi;
  const auto& keys = known_keys();
  for (const auto& [name, node] : tree) {
    const bool is_section = !node.empty() || (node.data().empty() && known_keys().contains(name));
    const std::string section = is_section ? name : "";
    const auto sec_it = keys.find(section);
    if (sec_it == keys.end()) throw ConfigError(source + ": unknown section [" + section + "]");

    auto handle = [&](const std::string& key, const std::string& value) {
      const std::string where = source + ": " + (section.empty() ? key : section + "." + key);
      if (!sec_it->second.contains(key)) throw ConfigError(where + ": unknown key");
      const std::string v = trim(value);
      if (section.empty()) {
        if (key == "seed") {
          const long long s = to_int(where, v);
          if (s < 0) bad_value(where, v, "a non-negative integer");
          c.set_seed(static_cast<std::uint64_t>(s));
        } else if (key == "output") {
          if (v != "csv" && v != "binary" && v != "none") bad_value(where, v, "csv, binary or none");
          c.output = v;
        }
      } else if (section == "integrand") {
        if (key == "family") c.integrand.family = v;
        else if (key == "dim") c.integrand.dim = static_cast<std::size_t>(positive_int(where, v));
        else if (key == "matrix") c.integrand.matrix = to_list(where, v);
        else if (key == "delta") c.integrand.delta = to_double(where, v);
        else if (key == "delta_range") c.integrand.delta_range = v;
      } else if (section == "grid") {
        if (key == "cells") c.grid.cells = static_cast<std::size_t>(positive_int(where, v));
        else if (key == "L") c.grid.L = to_double(where, v);
      } else if (section == "initial") {
        if (key == "kind") {
          try {
            c.initial.kind = parse_initial_kind(v);
          } catch (const ConfigError&) {
            bad_value(where, v, "sawtooth, trig, bump, sine or constant");
          }
        } else if (key == "amplitude") c.initial.amplitude = to_double(where, v);
        else if (key == "beta") c.initial.beta = to_double(where, v);
        else if (key == "modes") c.initial.modes = positive_int(where, v);
        else if (key == "wavenumber") c.initial.wavenumber = positive_int(where, v);
        else if (key == "width") c.initial.width = to_double(where, v);
      } else if (section == "time") {
        if (key == "T") c.T = to_double(where, v);
        else if (key == "cfl_safety") c.cfl_safety = to_double(where, v);
        else if (key == "sample_every") c.sample_every = positive_int(where, v);
      } else if (section == "theorem") {
        if (key == "id") {
          const long long id = to_int(where, v);
          if (id < 1 || id > 3) bad_value(where, v, "1, 2 or 3");
          c.theorem = static_cast<int>(id);
        } else if (key == "M") c.M = to_double(where, v);
        else if (key == "R") c.R = to_double(where, v);
      } else if (section == "budget") {
        if (key == "direction_samples") c.budget.direction_samples = positive_int(where, v);
        else if (key == "s_grid") c.budget.s_grid = positive_int(where, v);
        else if (key == "s_max") c.budget.s_max = to_double(where, v);
        else if (key == "refine_iters") c.budget.refine_iters = static_cast<int>(to_int(where, v));
      } else if (section == "constants") {
        if (key == "P") c.P = to_list(where, v);
        else if (key == "eps") c.eps = to_list(where, v);
      } else if (section == "check") {
        if (key == "samples") c.check_samples = positive_int(where, v);
        else if (key == "tol") c.check_tol = to_double(where, v);
      }
    };

    if (is_section) {
      for (const auto& [key, leaf] : node) {
        if (!leaf.empty()) throw ConfigError(source + ": nested key " + section + "." + key);
        handle(key, leaf.data());
      }
    } else {
      handle(name, node.data());
    }
  }
  c.grid.n = c.integrand.dim;

  try {
    c.grid.validate();
    c.initial.validate();
    c.budget.validate();
    FlowConfig{c.grid, c.T.value_or(1.0), c.cfl_safety, c.sample_every}.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  if (c.M && !(*c.M > 0.0)) throw ConfigError(source + ": theorem.M must be positive");
  if (c.R && !(*c.R > 0.0)) throw ConfigError(source + ": theorem.R must be positive");
  if (!(c.check_tol > 0.0)) throw ConfigError(source + ": check.tol must be positive");
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  return parse_config(in, path);
}

std::string echo_config(const Config& c) {
  std::string s;
  s += fmt::format("seed = {}\noutput = {}\n", c.seed, c.output);
  s += fmt::format("\n[integrand]\nfamily = {}\ndim = {}\n", c.integrand.family, c.integrand.dim);
  if (!c.integrand.matrix.empty()) s += fmt::format("matrix = {}\n", fmt_list(c.integrand.matrix));
  s += fmt::format("delta = {}\ndelta_range = {}\n", c.integrand.delta, c.integrand.delta_range);
  s += fmt::format("\n[grid]\ncells = {}\nL = {}\n", c.grid.cells, c.grid.L);
  s += fmt::format("\n[initial]\nkind = {}\namplitude = {}\nbeta = {}\nmodes = {}\nwavenumber = {}\nwidth = {}\n",
                   to_string(c.initial.kind), c.initial.amplitude, c.initial.beta, c.initial.modes,
                   c.initial.wavenumber, c.initial.width);
  s += "\n[time]\n";
  if (c.T) s += fmt::format("T = {}\n", *c.T);
  s += fmt::format("cfl_safety = {}\nsample_every = {}\n", c.cfl_safety, c.sample_every);
  s += fmt::format("\n[theorem]\nid = {}\n", c.theorem);
  if (c.M) s += fmt::format("M = {}\n", *c.M);
  if (c.R) s += fmt::format("R = {}\n", *c.R);
  s += fmt::format("\n[budget]\ndirection_samples = {}\ns_grid = {}\ns_max = {}\nrefine_iters = {}\n",
                   c.budget.direction_samples, c.budget.s_grid, c.budget.s_max, c.budget.refine_iters);
  if (!c.P.empty() || !c.eps.empty()) {
    s += "\n[constants]\n";
    if (!c.P.empty()) s += fmt::format("P = {}\n", fmt_list(c.P));
    if (!c.eps.empty()) s += fmt::format("eps = {}\n", fmt_list(c.eps));
  }
  s += fmt::format("\n[check]\nsamples = {}\ntol = {}\n", c.check_samples, c.check_tol);
  return s;
}

}  // namespace anisoflow
