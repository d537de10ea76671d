#pragma once

#include <vector>

#include "cmpw/grid.hpp"

namespace cmpw {

enum class PotentialKind { Free, KronigPenney, ImpurityKronigPenney, Tabulated };

struct PotentialSpec {
  PotentialKind kind = PotentialKind::Free;
  double V0 = 1.0;
  double delta = 3.0;
  int Nel = 0;
  std::vector<double> centers;
  int impurity_site = 0;      // 1-based index into centers
  double impurity_factor = 2.0;
  std::vector<double> samples;  // Tabulated only

  /// Gaussian well lattice x_j = 10j, j = 1..Nel.
  static PotentialSpec kronig_penney(int Nel, double V0 = 1.0, double delta = 3.0);
  /// Same lattice with one well deepened; site <= 0 picks the center well.
  static PotentialSpec impurity_kronig_penney(int Nel, double factor = 2.0,
                                              int site = 0, double V0 = 1.0,
                                              double delta = 3.0);
  static PotentialSpec free();
  static PotentialSpec tabulated(std::vector<double> samples);
};

struct PotentialField {
  Field values;
};

PotentialField eval_potential(const PotentialSpec& spec, const PeriodicGrid& grid);

}  // namespace cmpw
