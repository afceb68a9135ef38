#pragma once

#include <functional>
#include <string>
#include <vector>

#include "crosslab/cross.hpp"
#include "crosslab/polynomial.hpp"
#include "crosslab/singularity.hpp"
#include "crosslab/util.hpp"

namespace crosslab {

// Closed-form target N0(z,w) / P(z,w)^m0; holomorphic off {P = 0}.
struct GroundTruth {
  Poly2 numerator;
  Poly2 denominator_base;  // P
  int pole_order = 0;      // m0 >= 0

  cplx eval(cplx z, cplx w) const;
};

enum class Branch : uint8_t { d_times_b = 0, a_times_g = 1 };

struct SampleSet {
  std::vector<cplx> z;
  std::vector<cplx> w;
  std::vector<cplx> value;
  std::vector<Branch> branch;

  size_t size() const { return z.size(); }
};

struct SampleStrategy {
  int count_ab = 400;        // samples on the A x G branch
  int count_db = 400;        // samples on the D x B branch
  double clearance = -1.0;   // |P| >= clearance * scale(P); < 0 selects default
  uint64_t seed = 1;
  // Test hook: when nonempty, z on the A-side is drawn from these atoms
  // instead of the fat set.
  std::vector<cplx> z_atoms;
};

// Default |P|-clearance factor: 0.05 times the product-space diameter.
double default_clearance(const Cross& cross);

// Low-discrepancy samples on (A x G) u (D x B), off the singular set by the
// clearance, skipping slices whose fiber degenerates.  Deterministic per seed.
SampleSet sample_cross(const GroundTruth& f, const Cross& cross,
                       const SingularSet& m, const SampleStrategy& strategy);

struct RationalApproximant {
  Poly2 numerator;
  Poly2 denominator_base;  // P
  int m = 0;
  double conditioning = 0;

  cplx eval(cplx z, cplx w) const;
};

// Weighted linear least squares for the numerator of N / P^m against the
// linearized residual N - v * P^m.  Throws fit.rank_deficient when the
// design's condition number passes 1e12.
RationalApproximant fit_rational(const SampleSet& samples, const SingularSet& p,
                                 int m, int deg_z, int deg_w);

struct ErrorReport {
  double max_rel_error = 0;
  double mean_rel_error = 0;
  long n_test_points = 0;
  std::string region;
};

// Relative error |approx - f| / (1 + |f|) over test points drawn from the
// envelope minus the singular trace, keeping |P| above the clearance.
ErrorReport verify_extension(const RationalApproximant& approx,
                             const GroundTruth& f, const ProductMask& env,
                             const ProductMask& trace, long n_test,
                             uint64_t seed, double clearance = -1.0);

// Fits zero data sampled on (A x B) off M and returns the largest numerator
// coefficient magnitude; +infinity when the design is rank deficient.
double uniqueness_residual(const Cross& cross, const SingularSet& m, int p_power,
                           int deg_z, int deg_w, const SampleStrategy& strategy);

// Iterated Cauchy integral over the product of circles centered at
// (center_z, center_w); trapezoidal nodes, compared against the doubled rule.
cplx cauchy_reconstruct(const std::function<cplx(cplx, cplx)>& f, cplx center_z,
                        cplx center_w, double delta, double eps, int n_quad);

// Worst relative discrepancy between two fits over the overlap mask.  Both
// fits must share the same denominator P^m.
double local_overlap_consistency(const RationalApproximant& fit1,
                                 const RationalApproximant& fit2,
                                 const ProductMask& overlap, long n_test,
                                 uint64_t seed, double clearance = -1.0);

}  // namespace crosslab
