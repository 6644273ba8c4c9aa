#pragma once

#include <cstdint>
#include <string>

#include "anisoflow/solver.hpp"

namespace anisoflow {

enum class InitialKind {
  sawtooth,  // smoothed sawtooth; steep flank, tests the gradient bound
  trig,      // random trigonometric polynomial rescaled to sup |u| = amplitude
  bump,      // Gaussian bump at the grid centre
  sine,      // amplitude * sin(2 pi k x / L) (times the same in y for n = 2)
  constant,  // u = amplitude
};

struct InitialSpec {
  InitialKind kind = InitialKind::sawtooth;
  double amplitude = 1.0;
  double beta = 0.9;      // sawtooth sharpness in (0, 1)
  int modes = 4;          // trig: highest wavenumber per axis
  int wavenumber = 1;     // sine
  double width = 0.0;     // bump standard deviation; 0 means L / 16
  std::uint64_t seed = 0; // trig coefficients

  void validate() const;
};

InitialKind parse_initial_kind(const std::string& name);
std::string to_string(InitialKind kind);

GraphState make_initial(const InitialSpec& spec, const GridSpec& grid);

}  // namespace anisoflow
