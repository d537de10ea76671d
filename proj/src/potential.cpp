#include "cmpw/potential.hpp"

#include <cmath>

#include "cmpw/errors.hpp"

namespace cmpw {

PotentialSpec PotentialSpec::kronig_penney(int Nel, double V0, double delta) {
  PotentialSpec s;
  s.kind = PotentialKind::KronigPenney;
  s.V0 = V0;
  s.delta = delta;
  s.Nel = Nel;
  for (int j = 1; j <= Nel; ++j) s.centers.push_back(10.0 * j);
  return s;
}

PotentialSpec PotentialSpec::impurity_kronig_penney(int Nel, double factor,
                                                    int site, double V0,
                                                    double delta) {
  PotentialSpec s = kronig_penney(Nel, V0, delta);
  s.kind = PotentialKind::ImpurityKronigPenney;
  s.impurity_factor = factor;
  s.impurity_site = site > 0 ? site : (Nel + 1) / 2;
  return s;
}

PotentialSpec PotentialSpec::free() { return PotentialSpec{}; }

PotentialSpec PotentialSpec::tabulated(std::vector<double> samples) {
  PotentialSpec s;
  s.kind = PotentialKind::Tabulated;
  s.samples = std::move(samples);
  return s;
}

PotentialField eval_potential(const PotentialSpec& spec, const PeriodicGrid& grid) {
  Field v = Field::Zero(grid.n);
  switch (spec.kind) {
    case PotentialKind::Free:
      break;
    case PotentialKind::KronigPenney:
    case PotentialKind::ImpurityKronigPenney: {
      const double twoDelta2 = 2.0 * spec.delta * spec.delta;
      for (int i = 0; i < grid.n; ++i) {
        double sum = 0.0;
        for (size_t j = 0; j < spec.centers.size(); ++j) {
          const double d = grid.wrap(grid.node(i) - spec.centers[j]);
          double term = std::exp(-d * d / twoDelta2);
          if (spec.kind == PotentialKind::ImpurityKronigPenney &&
              static_cast<int>(j) + 1 == spec.impurity_site)
            term *= spec.impurity_factor;
          sum += term;
        }
        v[i] = -spec.V0 * sum;
      }
      break;
    }
    case PotentialKind::Tabulated: {
      require(static_cast<int>(spec.samples.size()) == grid.n,
              Err::TabulatedLengthMismatch,
              "tabulated potential length != grid size");
      for (int i = 0; i < grid.n; ++i) v[i] = spec.samples[i];
      require(v.allFinite(), Err::ConfigInvalid,
              "tabulated potential has non-finite entries");
      break;
    }
  }
  return PotentialField{std::move(v)};
}

}  // namespace cmpw
