#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "crosslab/geometry.hpp"
#include "crosslab/util.hpp"

namespace crosslab {

// Grid function with values in [0,1].
//
//   domain    in-domain points; values are NaN elsewhere.
//   interior  domain minus the unit-value collar: in-domain points that are
//             either in the zero set or have all four neighbors in-domain.
//             The collar cells carry the Dirichlet value 1 and stand for the
//             discrete boundary, so consumers that need "strictly inside the
//             open domain" (envelope predicates, containment checks) gate on
//             `interior`.
//   zero_set  the A-mask the field was solved against; values there are 0.
struct ScalarField {
  Grid grid;
  Mask domain;
  Mask interior;
  Mask zero_set;
  std::vector<double> values;

  double at(int ix, int iy) const {
    return values[static_cast<size_t>(grid.index(ix, iy))];
  }
  // Bilinear interpolation; falls back to the nearest in-domain corner when
  // the cell straddles the mask edge, NaN when no corner is in-domain.
  double sample(cplx z) const;
  double max_value() const;
  double min_value() const;

  // Header "nx,ny,x0,y0,x1,y1", then ny rows of nx values, "nan" outside.
  void to_csv(std::ostream& os) const;
  static ScalarField from_csv(std::istream& is);
  // 8-bit grayscale, value*255, 0 outside the domain.
  void to_pgm(std::ostream& os) const;
};

struct SolveParams {
  double tol = 1e-7;       // sup-norm change per sweep that stops the iteration
  int max_iter = 0;        // 0 selects 200 * max(nx, ny)
  double relaxation = 1.5; // projected SOR factor in [1, 2)
};

// Near-optimal SOR factor for the grid's point count.
double optimal_relaxation(const Grid& grid);

struct SolveResult {
  ScalarField field;
  int iterations = 0;
  double residual = 0;
};

// Largest discretely subharmonic function below the obstacle (0 on the
// A-mask, 1 elsewhere) with value 1 pinned on in-domain cells touching the
// complement.  Projected Gauss-Seidel with over-relaxation on the 5-point
// stencil.
SolveResult solve_relative_extremal(const Mask& omega_mask, const Mask& a_mask,
                                    const SolveParams& params = {});

// 3x3 in-domain neighborhood max taken over points off the zero set, then
// re-clamped to 0 on it.  Removes single-cell dips left by the iteration.
ScalarField regularize_usc(const ScalarField& field);

struct OmegaLimitStep {
  int k = 0;
  double max_increase = 0;  // worst pointwise increase vs the previous iterate
  long increase_count = 0;
};

struct OmegaLimitResult {
  ScalarField field;  // the k_max iterate
  std::vector<OmegaLimitStep> monotonicity;
};

// Solves the condenser problem on the exhaustion sequence Omega_k and checks
// that the iterates decrease pointwise.  Sub-solves run at tol/1000 so that
// iteration slack stays below the 5*tol monotonicity budget.
OmegaLimitResult omega_limit(const DomainSpec& omega, const SetSpec& a,
                             const Grid& grid, int k_max,
                             const SolveParams& params = {});

struct McEstimate {
  double mean = 0;
  double std_error = 0;
  long n_samples = 0;
  uint64_t seed = 0;
};

// Walk-on-spheres estimate of the probability that Brownian motion from z
// reaches the domain boundary before the set A.  Deterministic for a fixed
// seed regardless of the worker count.
McEstimate mc_exit_probability(cplx z, const DomainSpec& omega, const SetSpec& a,
                               long n, uint64_t seed, int jobs = 1);

// Exact nodal restriction onto the coarse grid sharing every factor-th node.
ScalarField restrict_field(const ScalarField& fine, int factor);

// Rasterizes on a refine-times finer grid, solves, and restricts back.
// refine = 1 solves directly on `grid`.
SolveResult solve_condenser_field(const DomainSpec& omega, const SetSpec& a,
                                  const Grid& grid, const SolveParams& params,
                                  int refine = 1);

}  // namespace crosslab
