// Prints the momentum current at K = 5, hbar = 1 for a few gain strengths,
// next to the largest growth rate of the Floquet spectrum.
#include <cstdio>

#include "ptkr/ptkr.hpp"

int main() {
  const ptkr::SystemParams base(5.0, 0.0, 1.0, 512);
  ptkr::EvolveConfig ec;
  ec.n_kicks = 200;
  for (double lambda : {0.0, 0.06, 0.09, 0.2}) {
    const auto p = base.with_gain(lambda);
    const auto spec = ptkr::quasi_energies(ptkr::build_floquet_matrix(p));
    const auto series = ptkr::evolve(ptkr::make_ground_state(p), p, ec);
    std::printf("lambda=%.2f  max eps_i=%.3e  <p>(%ld)=%8.3f  log norm=%.4f\n", lambda,
                ptkr::max_eps_i(spec.levels), series.final_kick(), series.records.back().mean_p,
                series.records.back().log_norm);
  }
  return 0;
}
