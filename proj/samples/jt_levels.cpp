// Lowest E x e Jahn-Teller levels, direct and through one recurrence sector.
#include <iostream>

#include "spinboson/spinboson.hpp"

int main() {
  using namespace spinboson;
  JTParams p;
  p.kappa = 1.0;
  p.mu_level = 0.3;

  const auto levels = preset_lowest_levels(p, Cutoff::two_mode(32), 6);
  std::cout << "lowest levels (cutoff 32)\n";
  for (Index i = 0; i < levels.eigenvalues.size(); ++i)
    std::cout << "  " << json_number(levels.eigenvalues(i)) << "  residual " << json_number(levels.level_residuals(i)) << "\n";

  const auto run = run_recurrence(p, RecurrenceSector::su11(0.5), FockBasis(Cutoff::two_mode(32)));
  std::cout << "k=1/2 sector, accepted recurrence roots below 4\n";
  for (double e : run.with_status(RootStatus::accepted))
    if (e < 4.0) std::cout << "  " << json_number(e) << "\n";
}
