#pragma once

#include <cstdint>

#include "anisoflow/integrand.hpp"

namespace anisoflow {

// Sampled residuals of the structural identities an integrand must satisfy.
// Each `*_pass` flag is true iff the matching error is <= tol; convexity
// passes iff the minimum tangent eigenvalue exceeds tol.
struct StructureReport {
  // max over samples and lambda in {0.5, 2, 10} of the degree-(1, 0, -1, -2)
  // scaling residuals of F, DF, D^2F, D^3F
  double homogeneity_err = 0.0;
  double euler1_err = 0.0;  // |DF|_v(v) - F(v)|
  double euler2_err = 0.0;  // |D^2F|_v(v, .)|
  double euler3_err = 0.0;  // |D(F D^2F)|_v(v, ., .)|
  double min_tangent_eigenvalue = 0.0;
  double symmetry_err = 0.0;             // |F(p + phi^0) - F(p - phi^0)|
  double symmetry_identities_err = 0.0;  // odd-in-phi^0 derivatives at p
  bool homogeneity_pass = false;
  bool euler1_pass = false;
  bool euler2_pass = false;
  bool euler3_pass = false;
  bool convexity_pass = false;
  bool symmetry_pass = false;
  int samples = 0;
  std::uint64_t seed = 0;
  double tol = 0.0;

  // Structural hypotheses every theorem relies on (everything except symmetry).
  bool structural_pass() const {
    return homogeneity_pass && euler1_pass && euler2_pass && euler3_pass && convexity_pass;
  }
  bool all_pass() const { return structural_pass() && symmetry_pass; }
};

StructureReport check_structure(const Integrand& f, int samples, std::uint64_t seed, double tol);

// Symmetry check alone (F(p + phi^0) = F(p - phi^0) and its derivative
// consequences), used as a precondition gate.
bool satisfies_symmetry(const Integrand& f, int samples = 256, std::uint64_t seed = 0,
                        double tol = 1e-8);

}  // namespace anisoflow
