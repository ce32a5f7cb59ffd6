#pragma once

// Exhaustive simplex-grid oracles for the rate-distortion solvers. These
// enumerate every conditional kernel whose rows lie on the step-1/res
// simplex grid, so they share no code path with the Blahut-Arimoto solver
// they are used to check.

#include <vector>

#include "distgen/rate_distortion.hpp"

namespace oracle {

// A source distribution whose probabilities are multiples of 1/res (so that
// marginals land on an integer lattice), plus a distortion matrix.
struct GridInstance {
  std::vector<int> source_numer;  // p(s) = source_numer[s] / res
  int res = 50;                   // grid resolution (step = 1/res)
  Eigen::MatrixXd distortion;     // |S| x |What|
};

// Pareto frontier of (distortion, rate) over all grid kernels: entry b
// holds the smallest mutual information among kernels whose distortion is
// at most edge(b). Queries use the largest edge <= target, which keeps the
// reported kernel feasible.
struct Frontier {
  double d_lo = 0.0;
  double d_hi = 0.0;
  std::vector<double> min_rate;  // indexed by distortion bin edge

  double rate_at(double target) const;
  double min_distortion() const { return d_lo; }
};

// Sweeps all res-grid kernels for up to 3 source atoms and up to 3
// reconstruction atoms. threads > 1 splits the outer row loop.
Frontier sweep_frontier(const GridInstance& inst, int bins = 16384,
                        int threads = 2);

// Best grid-kernel rate at the distortion target (infinity if infeasible).
double grid_min_rate(const GridInstance& inst, double target, int threads = 2);

// Oracle for algorithm_rd: reduces exactly like the solver contract says
// (distortion -gen_hat at level eps - E_Q[gen]) but solves by enumeration.
double grid_algorithm_rd(const distgen::AlgorithmRdInstance& inst,
                         const std::vector<int>& source_numer, int res,
                         double epsilon, int threads = 2);

// Oracle for conditional_algorithm_rd: per-u frontiers combined over every
// feasible split of the averaged distortion budget.
double grid_conditional_rd(const distgen::ConditionalRdInstance& inst,
                           const std::vector<std::vector<int>>& joint_numer,
                           int res, double epsilon, int threads = 2);

}  // namespace oracle
