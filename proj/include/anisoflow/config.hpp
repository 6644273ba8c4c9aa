#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "anisoflow/constants.hpp"
#include "anisoflow/initial_data.hpp"
#include "anisoflow/integrand.hpp"
#include "anisoflow/solver.hpp"

namespace anisoflow {

struct IntegrandConfig {
  std::string family = "euclidean";
  std::size_t dim = 1;
  std::vector<double> matrix;  // ellipsoid, row-major (dim+1)^2
  double delta = 0.0;
  std::string delta_range = "standard";

  Integrand build() const;
};

// Parsed INI configuration. Sections: [integrand] [grid] [initial] [time]
// [theorem] [budget] [constants] [check]; top-level keys `seed`, `output`.
struct Config {
  std::uint64_t seed = 0;
  std::string output = "csv";  // snapshot format: csv | binary | none

  IntegrandConfig integrand;
  GridSpec grid;  // grid.n mirrors integrand.dim
  InitialSpec initial;

  std::optional<double> T;  // unset: run to T' of the configured theorem
  double cfl_safety = 0.9;
  int sample_every = 50;

  int theorem = 1;
  std::optional<double> M;  // unset: measured sup |u_0|
  std::optional<double> R;  // unset: L / 4

  SearchBudget budget;
  std::vector<double> P;    // A_P thresholds for `constants`; empty: 2 F(-phi^0)
  std::vector<double> eps;  // S_eps levels for `constants`; empty: sqrt(2 / n)

  int check_samples = 1000;
  double check_tol = 1e-8;

  // Applies a seed override to every consumer of randomness.
  void set_seed(std::uint64_t s);
  double radius() const { return R ? *R : grid.L / 4.0; }
};

// Throws ConfigError naming the offending line, section or key.
Config parse_config(std::istream& in, const std::string& source = "<config>");
Config load_config(const std::string& path);

// Canonical INI text of a configuration; parsing it yields the same Config.
std::string echo_config(const Config& c);

}  // namespace anisoflow
