#include <doctest.h>

#include <cmath>

#include "crosslab/extension.hpp"

using namespace crosslab;

namespace {

Poly2 poly_z_minus_w() {
  Poly2 p;
  p.coef = {{cplx{0.0}, cplx{-1.0}}, {cplx{1.0}, cplx{0.0}}};
  return p;
}

Cross symmetric_cross() {
  return Cross{DomainSpec::disc(0.0, 1.0), SetSpec::disc(0.0, 0.25),
               DomainSpec::disc(0.0, 1.0), SetSpec::disc(0.0, 0.25)};
}

SampleSet diag_samples(const GroundTruth& truth, int count, uint64_t seed) {
  SampleStrategy strat;
  strat.count_ab = count;
  strat.count_db = count;
  strat.seed = seed;
  return sample_cross(truth, symmetric_cross(),
                      SingularSet::polynomial(truth.denominator_base), strat);
}

double coef_distance(const Poly2& a, const Poly2& b) {
  double d = 0;
  const int dz = std::max(a.deg_z(), b.deg_z());
  const int dw = std::max(a.deg_w(), b.deg_w());
  for (int i = 0; i <= dz; ++i)
    for (int j = 0; j <= dw; ++j) {
      const cplx ca = (i <= a.deg_z() && j <= a.deg_w()) ? a.at(i, j) : cplx{0.0};
      const cplx cb = (i <= b.deg_z() && j <= b.deg_w()) ? b.at(i, j) : cplx{0.0};
      d = std::max(d, std::abs(ca - cb));
    }
  return d;
}

// Full product envelope over a box; extension tests do not need solver-grade
// envelopes.
ProductMask box_env(double half, int n) {
  const Grid g = make_grid(-half, -half, half, half, n, n);
  ProductMask env(g, g);
  for (int iw = 0; iw < env.nw(); ++iw)
    for (int iz = 0; iz < env.nz(); ++iz) env.set(iz, iw);
  return env;
}

}  // namespace

TEST_CASE("samples respect membership, clearance and determinism") {
  const SingularSet m = SingularSet::polynomial(poly_z_minus_w());
  const GroundTruth truth{Poly2::constant(1.0), m.to_polynomial(), 1};
  const Cross cross = symmetric_cross();
  SampleStrategy strat;
  strat.count_ab = 400;
  strat.count_db = 400;
  strat.seed = 5;
  const SampleSet s = sample_cross(truth, cross, m, strat);
  REQUIRE(s.size() == 800);
  const double clr = default_clearance(cross) * truth.denominator_base.scale();
  for (size_t i = 0; i < s.size(); ++i) {
    CHECK(cross_membership(cross, s.z[i], s.w[i]));
    CHECK(std::abs(s.z[i] - s.w[i]) >= clr);
    CHECK(std::isfinite(std::abs(s.value[i])));
    if (s.branch[i] == Branch::a_times_g) CHECK(std::abs(s.z[i]) <= 0.25);
    if (s.branch[i] == Branch::d_times_b) CHECK(std::abs(s.w[i]) <= 0.25);
  }
  const SampleSet again = sample_cross(truth, cross, m, strat);
  CHECK(again.z == s.z);
  CHECK(again.w == s.w);
}

TEST_CASE("an infeasible clearance is reported") {
  const SingularSet m = SingularSet::polynomial(poly_z_minus_w());
  const GroundTruth truth{Poly2::constant(1.0), m.to_polynomial(), 1};
  SampleStrategy strat;
  strat.count_ab = 50;
  strat.count_db = 50;
  strat.clearance = 10.0;  // larger than the product diameter
  CHECK_THROWS_AS(sample_cross(truth, symmetric_cross(), m, strat), Error);
}

TEST_CASE("degenerate slices are skipped while sampling") {
  // P = z (w - 0.5): the slice z = 0 lies entirely inside M.
  Poly2 p;
  p.coef = {{cplx{0.0}, cplx{0.0}}, {cplx{-0.5}, cplx{1.0}}};
  const SingularSet m = SingularSet::polynomial(p);
  const GroundTruth truth{Poly2::constant(1.0), p, 1};
  SampleStrategy strat;
  strat.count_ab = 200;
  strat.count_db = 200;
  strat.seed = 9;
  strat.clearance = 0.02;
  const SampleSet s = sample_cross(truth, symmetric_cross(), m, strat);
  for (size_t i = 0; i < s.size(); ++i)
    CHECK(!fiber_w(m, s.z[i]).degenerate);
}

TEST_CASE("exact rational recovery: 1/(z-w) with matching degrees") {
  const SingularSet m = SingularSet::polynomial(poly_z_minus_w());
  const GroundTruth truth{Poly2::constant(1.0), m.to_polynomial(), 1};
  const SampleSet s = diag_samples(truth, 200, 21);
  const RationalApproximant fit = fit_rational(s, m, 1, 0, 0);
  CHECK(std::abs(fit.numerator.at(0, 0) - cplx{1.0}) <= 1e-8);
}

TEST_CASE("exact rational recovery: (z+w)/(z-w)^2") {
  const SingularSet m = SingularSet::polynomial(poly_z_minus_w());
  Poly2 numerator;  // z + w
  numerator.coef = {{cplx{0.0}, cplx{1.0}}, {cplx{1.0}, cplx{0.0}}};
  const GroundTruth truth{numerator, m.to_polynomial(), 2};
  const SampleSet s = diag_samples(truth, 300, 22);
  const RationalApproximant fit = fit_rational(s, m, 2, 1, 1);
  CHECK(coef_distance(fit.numerator, numerator) <= 1e-8);
}

TEST_CASE("recovery against the expanded product for mismatched pole powers") {
  // Target N0 / P^{m0} fitted in the class N / P^m with m > m0 recovers
  // N0 * P^{m - m0}; the expected matrix comes from explicit expansion.
  const SingularSet m = SingularSet::polynomial(poly_z_minus_w());
  SplitMix64 rng(31);
  Poly2 n0;
  n0.coef.assign(2, std::vector<cplx>(2, 0.0));
  for (auto& row : n0.coef)
    for (cplx& c : row) c = cplx{rng.uniform() - 0.5, rng.uniform() - 0.5};
  const GroundTruth truth{n0, m.to_polynomial(), 1};
  const SampleSet s = diag_samples(truth, 400, 23);
  const RationalApproximant fit = fit_rational(s, m, 2, 2, 2);
  const Poly2 expected = n0.mul(m.to_polynomial());
  CHECK(coef_distance(fit.numerator, expected) <= 1e-7);
}

TEST_CASE("zero samples give zero coefficients") {
  const SingularSet m = SingularSet::polynomial(poly_z_minus_w());
  const GroundTruth truth{Poly2::constant(1.0), m.to_polynomial(), 1};
  SampleSet s = diag_samples(truth, 200, 24);
  for (cplx& v : s.value) v = 0.0;
  const RationalApproximant fit = fit_rational(s, m, 1, 2, 2);
  CHECK(fit.numerator.scale() <= 1e-10);
}

TEST_CASE("fitting is linear in the sample values") {
  const SingularSet m = SingularSet::polynomial(poly_z_minus_w());
  const GroundTruth truth{Poly2::constant(1.0), m.to_polynomial(), 1};
  Poly2 numerator;
  numerator.coef = {{cplx{0.0}, cplx{1.0}}, {cplx{1.0}, cplx{0.0}}};
  const GroundTruth truth2{numerator, m.to_polynomial(), 1};

  SampleSet s1 = diag_samples(truth, 300, 25);
  SampleSet s2 = s1;
  for (size_t i = 0; i < s2.size(); ++i)
    s2.value[i] = truth2.eval(s2.z[i], s2.w[i]);
  SampleSet mix = s1;
  const cplx alpha{0.7, -0.2}, beta{-1.3, 0.4};
  for (size_t i = 0; i < mix.size(); ++i)
    mix.value[i] = alpha * s1.value[i] + beta * s2.value[i];

  const Poly2 f1 = fit_rational(s1, m, 1, 1, 1).numerator;
  const Poly2 f2 = fit_rational(s2, m, 1, 1, 1).numerator;
  const Poly2 fm = fit_rational(mix, m, 1, 1, 1).numerator;
  double gap = 0;
  for (int i = 0; i <= 1; ++i)
    for (int j = 0; j <= 1; ++j)
      gap = std::max(gap,
                     std::abs(fm.at(i, j) - (alpha * f1.at(i, j) + beta * f2.at(i, j))));
  CHECK(gap <= 1e-10);
}

TEST_CASE("either branch alone carries the full rational information") {
  const SingularSet m = SingularSet::polynomial(poly_z_minus_w());
  const GroundTruth truth{Poly2::constant(1.0), m.to_polynomial(), 1};
  const SampleSet both = diag_samples(truth, 300, 26);
  SampleSet only_ag, only_db;
  for (size_t i = 0; i < both.size(); ++i) {
    SampleSet& dst = both.branch[i] == Branch::a_times_g ? only_ag : only_db;
    dst.z.push_back(both.z[i]);
    dst.w.push_back(both.w[i]);
    dst.value.push_back(both.value[i]);
    dst.branch.push_back(both.branch[i]);
  }
  const RationalApproximant f_both = fit_rational(both, m, 1, 1, 1);
  const RationalApproximant f_ag = fit_rational(only_ag, m, 1, 1, 1);
  const RationalApproximant f_db = fit_rational(only_db, m, 1, 1, 1);
  SplitMix64 rng(123);
  for (int k = 0; k < 50; ++k) {
    const cplx z{1.8 * rng.uniform() - 0.9, 1.8 * rng.uniform() - 0.9};
    const cplx w{1.8 * rng.uniform() - 0.9, 1.8 * rng.uniform() - 0.9};
    if (std::abs(z - w) < 0.2) continue;
    const cplx vb = f_both.eval(z, w);
    CHECK(std::abs(f_ag.eval(z, w) - vb) <= 1e-6);
    CHECK(std::abs(f_db.eval(z, w) - vb) <= 1e-6);
  }
}

TEST_CASE("verify_extension: exact recovery, entire targets, negative control") {
  const SingularSet m = SingularSet::polynomial(poly_z_minus_w());
  const GroundTruth truth{Poly2::constant(1.0), m.to_polynomial(), 1};
  const SampleSet s = diag_samples(truth, 300, 27);
  const RationalApproximant fit = fit_rational(s, m, 1, 2, 2);
  const ProductMask env = box_env(0.95, 24);
  const ProductMask trace = envelope_trace(m, env);

  const ErrorReport good = verify_extension(fit, truth, env, trace, 400, 5);
  CHECK(good.max_rel_error <= 1e-6);
  CHECK(good.max_rel_error <= fit.conditioning * 1e-12);
  CHECK(good.n_test_points >= 200);

  Poly2 zw;  // f = z w is entire; a polynomial class reproduces it
  zw.coef = {{cplx{0.0}, cplx{0.0}}, {cplx{0.0}, cplx{1.0}}};
  const GroundTruth entire{zw, m.to_polynomial(), 0};
  SampleSet se = diag_samples(entire, 300, 28);
  const RationalApproximant pf = fit_rational(se, m, 0, 1, 1);
  const ProductMask no_trace(env.grid_z(), env.grid_w());
  const ErrorReport entire_report =
      verify_extension(pf, entire, env, no_trace, 400, 6);
  CHECK(entire_report.max_rel_error <= 1e-9);

  // Deliberate mismatch: evaluate against 1/(z-w) + 1 = (1 + P)/P.
  const GroundTruth shifted{Poly2::constant(1.0).plus(m.to_polynomial()),
                            m.to_polynomial(), 1};
  const ErrorReport bad = verify_extension(fit, shifted, env, trace, 400, 7);
  CHECK(bad.max_rel_error >= 0.3);
}

TEST_CASE("uniqueness residual: fat sets resolve, two atoms cannot") {
  const SingularSet m = SingularSet::polynomial(poly_z_minus_w());
  const Cross cross = symmetric_cross();
  SampleStrategy strat;
  strat.count_ab = 300;
  strat.seed = 31;
  CHECK(uniqueness_residual(cross, m, 1, 2, 2, strat) <= 1e-10);
  CHECK(uniqueness_residual(cross, m, 1, 0, 0, strat) <= 1e-14);

  SampleStrategy atoms = strat;
  atoms.z_atoms = {cplx{0.1, 0.0}, cplx{-0.1, 0.05}};
  CHECK(std::isinf(uniqueness_residual(cross, m, 1, 2, 2, atoms)));
}

TEST_CASE("three distinct atoms still determine degree-2 z-dependence") {
  // A degree-2 polynomial in z is pinned by three distinct nodes, so the
  // design stays full rank; deficiency needs fewer atoms than coefficients.
  const SingularSet m = SingularSet::polynomial(poly_z_minus_w());
  SampleStrategy atoms;
  atoms.count_ab = 300;
  atoms.seed = 32;
  atoms.z_atoms = {cplx{0.1, 0.0}, cplx{-0.1, 0.05}, cplx{0.0, -0.12}};
  CHECK(uniqueness_residual(symmetric_cross(), m, 1, 2, 2, atoms) <= 1e-10);
}

TEST_CASE("cauchy reconstruction is exact where it should be") {
  Poly2 zw;
  zw.coef = {{cplx{0.0}, cplx{0.0}}, {cplx{0.0}, cplx{1.0}}};
  const GroundTruth f{zw, Poly2::constant(1.0), 0};
  const cplx v = cauchy_reconstruct(
      [&](cplx z, cplx w) { return f.eval(z, w); }, cplx{0.1, 0.0},
      cplx{0.2, 0.0}, 0.3, 0.3, 64);
  CHECK(std::abs(v - cplx{0.02, 0.0}) <= 1e-10);

  const cplx pole = cauchy_reconstruct(
      [](cplx z, cplx w) { return 1.0 / (z - w); }, cplx{0.0, 0.0},
      cplx{0.8, 0.0}, 0.2, 0.2, 64);
  CHECK(std::abs(pole - cplx{-1.25, 0.0}) <= 1e-8);

  const cplx trig = cauchy_reconstruct(
      [](cplx z, cplx w) { return std::sin(z) * std::exp(w); }, cplx{0.0, 0.0},
      cplx{0.0, 0.0}, 0.5, 0.5, 64);
  CHECK(std::abs(trig) <= 1e-9);
}

TEST_CASE("cauchy reconstruction is exact on low-degree polynomials") {
  SplitMix64 rng(55);
  const int n_quad = 32;
  Poly2 p;
  p.coef.assign(n_quad / 4 + 1, std::vector<cplx>(n_quad / 4 + 1, 0.0));
  for (auto& row : p.coef)
    for (cplx& c : row) c = cplx{rng.uniform() - 0.5, rng.uniform() - 0.5};
  const cplx center_z{0.05, -0.1}, center_w{-0.2, 0.15};
  const cplx v = cauchy_reconstruct(
      [&](cplx z, cplx w) { return p.eval(z, w); }, center_z, center_w, 0.4, 0.4,
      n_quad);
  CHECK(std::abs(v - p.eval(center_z, center_w)) <= 1e-9);
}

TEST_CASE("cauchy reconstruction reports non-convergence near a pole") {
  CHECK_THROWS_AS(cauchy_reconstruct(
                      [](cplx z, cplx w) { return 1.0 / (z - w); },
                      cplx{0.0, 0.0}, cplx{0.4001, 0.0}, 0.2, 0.2, 32),
                  Error);
}

TEST_CASE("local fits from disjoint base bidiscs agree on the overlap") {
  const SingularSet m = SingularSet::polynomial(poly_z_minus_w());
  const GroundTruth truth{Poly2::constant(1.0), m.to_polynomial(), 1};
  const DomainSpec dk = DomainSpec::disc(0.0, 0.95);

  auto local_fit = [&](cplx a, cplx b, uint64_t seed) {
    const Cross local{dk, SetSpec::disc(a, 0.15), dk, SetSpec::disc(b, 0.15)};
    SampleStrategy strat;
    strat.count_ab = 250;
    strat.count_db = 250;
    strat.seed = seed;
    return fit_rational(sample_cross(truth, local, m, strat), m, 1, 1, 1);
  };
  const RationalApproximant f1 = local_fit(cplx{-0.5, 0.0}, cplx{0.5, 0.0}, 41);
  const RationalApproximant f2 = local_fit(cplx{0.5, 0.0}, cplx{-0.5, 0.0}, 42);

  ProductMask overlap = box_env(0.9, 24);
  overlap = overlap.minus(envelope_trace(m, overlap));
  CHECK(local_overlap_consistency(f1, f2, overlap, 200, 3) <= 1e-6);
  CHECK(local_overlap_consistency(f1, f1, overlap, 200, 3) == 0.0);

  RationalApproximant shifted = f2;
  shifted.numerator = shifted.numerator.plus(m.to_polynomial());  // adds +1
  CHECK(local_overlap_consistency(f1, shifted, overlap, 200, 3) >= 0.3);
}

TEST_CASE("overlap consistency validates denominators and emptiness") {
  const SingularSet m = SingularSet::polynomial(poly_z_minus_w());
  const GroundTruth truth{Poly2::constant(1.0), m.to_polynomial(), 1};
  const SampleSet s = diag_samples(truth, 200, 61);
  const RationalApproximant f1 = fit_rational(s, m, 1, 1, 1);
  const RationalApproximant f0 = fit_rational(s, m, 0, 1, 1);
  ProductMask overlap = box_env(0.9, 16);
  CHECK_THROWS_AS(local_overlap_consistency(f1, f0, overlap, 100, 1), Error);
  const ProductMask empty(overlap.grid_z(), overlap.grid_w());
  CHECK_THROWS_AS(local_overlap_consistency(f1, f1, empty, 100, 1), Error);
}
