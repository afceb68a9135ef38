#pragma once

#include <vector>

#include "crosslab/cross.hpp"
#include "crosslab/polynomial.hpp"
#include "crosslab/util.hpp"

namespace crosslab {

// Algebraic singular set M: either the zero set of a bivariate polynomial
// P(z,w) or a finite union of polynomial graphs w = phi_j(z).
class SingularSet {
 public:
  static SingularSet polynomial(Poly2 p);
  static SingularSet graphs(std::vector<Poly1> phi);

  bool is_polynomial() const { return is_poly_; }
  const Poly2& poly() const;
  const std::vector<Poly1>& graph_list() const;

  // Product expansion prod_j (w - phi_j(z)); identity on polynomial form.
  Poly2 to_polynomial() const;

 private:
  bool is_poly_ = true;
  Poly2 poly_;
  std::vector<Poly1> graphs_;
};

struct FiberRoot {
  cplx value;
  int multiplicity = 1;
};

struct FiberResult {
  std::vector<FiberRoot> roots;  // ordered lexicographically by (re, im)
  bool degenerate = false;       // the whole slice lies in M
};

// Roots of w -> P(z, w); graph values for graph form.
FiberResult fiber_w(const SingularSet& m, cplx z);
// Roots of z -> P(z, w); per-graph solves of phi_j(z) = w.
FiberResult fiber_z(const SingularSet& m, cplx w);

struct BranchLocusResult {
  std::vector<cplx> points;  // deduplicated, ordered lexicographically
  bool used_square_free_part = false;
  // Fiber multiplicity pattern at a generic z when the square-free reduction
  // was taken (e.g. {2} for a squared factor).
  std::vector<int> generic_multiplicities;
};

// z-projection of {P = dP/dw = 0}: roots of the w-resultant of (P, dP/dw)
// plus the zeros of the leading w-coefficient.  Off this finite list every
// fiber root continues as a holomorphic graph.
BranchLocusResult branch_locus(const SingularSet& m);

// Product-grid cells whose cell box meets M (conservative Lipschitz test),
// intersected with `env`.
ProductMask envelope_trace(const SingularSet& m, const ProductMask& env,
                           int jobs = 1);

struct IsolationResult {
  bool isolated = false;
  // Set when no point of the probed set fell inside the bidisc at all.
  bool empty_intersection = false;
};

// Probes whether (a,b) is an isolated point of the probed set inside the
// bidisc of radii (delta, eps).  For polynomial form the probed set is M
// itself; for graph form with at least two graphs it is the pairwise
// coincidence locus of the branches, the place where genuinely isolated
// points can occur.
IsolationResult is_isolated_point(const SingularSet& m, cplx a, cplx b,
                                  double delta, double eps);

}  // namespace crosslab
