#include <doctest.h>

#include <cmath>
#include <sstream>

#include "crosslab/extremal.hpp"

using namespace crosslab;

namespace {

// Closed-form harmonic measure of the condenser (unit disc, closed disc of
// radius rho): log(|z|/rho) / log(1/rho) clamped to [0,1].
double condenser(double r, double rho = 0.25) {
  if (r <= rho) return 0.0;
  const double v = std::log(r / rho) / std::log(1.0 / rho);
  return v > 1.0 ? 1.0 : v;
}

Grid grid_n(int n) { return make_grid(-1.05, -1.05, 1.05, 1.05, n, n); }

SolveResult solve_unit_annulus(int n, double rho = 0.25,
                               double relax = 1.9) {
  SolveParams params;
  params.tol = 1e-9;
  params.relaxation = relax;
  return solve_condenser_field(DomainSpec::disc(0.0, 1.0),
                               SetSpec::disc(0.0, rho), grid_n(n), params, 1);
}

}  // namespace

TEST_CASE("condenser solve matches the closed form at |z| = 0.5") {
  const SolveResult sol = solve_unit_annulus(128);
  // Attenuated staircase bias keeps the midpoint within the 256^2 budget
  // already at this resolution.
  CHECK(sol.field.sample(cplx{0.5, 0.0}) == doctest::Approx(0.5).epsilon(0.04));
  CHECK(std::fabs(sol.field.sample(cplx{0.0, 0.5}) - 0.5) <= 0.02);
}

TEST_CASE("A equal to the domain forces the zero field") {
  const Grid g = grid_n(64);
  const Mask omega = rasterize(DomainSpec::disc(0.0, 1.0), g);
  const SolveResult sol = solve_relative_extremal(omega, omega, {});
  CHECK(sol.field.max_value() == 0.0);
  CHECK(sol.field.min_value() == 0.0);
}

TEST_CASE("interior values stay strictly below 1 for off-center A") {
  SolveParams params;
  params.relaxation = 1.9;
  const SolveResult sol = solve_condenser_field(
      DomainSpec::disc(0.0, 1.0), SetSpec::disc(cplx{0.5, 0.0}, 0.2), grid_n(96),
      params, 1);
  const ScalarField& f = sol.field;
  for (int i = 0; i < f.grid.count(); ++i)
    if (f.interior.test(i)) CHECK(f.values[i] < 1.0);
}

TEST_CASE("empty A is rejected") {
  const Grid g = grid_n(64);
  const Mask omega = rasterize(DomainSpec::disc(0.0, 1.0), g);
  Mask empty{g, std::vector<uint8_t>(static_cast<size_t>(g.count()), 0)};
  CHECK_THROWS_WITH_AS(solve_relative_extremal(omega, empty, {}), "A is empty",
                       Error);
}

TEST_CASE("non-convergence reports the residual") {
  const Grid g = grid_n(96);
  const Mask omega = rasterize(DomainSpec::disc(0.0, 1.0), g);
  const Mask a = rasterize(SetSpec::disc(0.0, 0.25), g);
  SolveParams params;
  params.max_iter = 3;
  CHECK_THROWS_AS(solve_relative_extremal(omega, a, params), Error);
}

TEST_CASE("field invariants: range, zero set, discrete subharmonicity") {
  const SolveResult sol = solve_unit_annulus(96);
  const ScalarField& f = sol.field;
  const Grid& g = f.grid;
  for (int i = 0; i < g.count(); ++i) {
    if (!f.domain.test(i)) continue;
    CHECK(f.values[i] >= 0.0);
    CHECK(f.values[i] <= 1.0);
    if (f.zero_set.test(i)) CHECK(f.values[i] == 0.0);
  }
  for (int iy = 1; iy < g.ny - 1; ++iy)
    for (int ix = 1; ix < g.nx - 1; ++ix) {
      const int i = g.index(ix, iy);
      if (!f.interior.test(i) || f.zero_set.test(i)) continue;
      const double mean = 0.25 * (f.values[i - 1] + f.values[i + 1] +
                                  f.values[i - g.nx] + f.values[i + g.nx]);
      CHECK(f.values[i] <= mean + 1e-5);
    }
}

TEST_CASE("larger A pulls the field down; larger domain pulls it down too") {
  const Grid g = grid_n(96);
  SolveParams params;
  params.tol = 1e-10;
  params.relaxation = 1.9;
  const DomainSpec omega = DomainSpec::disc(0.0, 1.0);

  const SolveResult small_a =
      solve_condenser_field(omega, SetSpec::disc(0.0, 0.2), g, params, 1);
  const SolveResult big_a =
      solve_condenser_field(omega, SetSpec::disc(0.0, 0.3), g, params, 1);
  for (int i = 0; i < g.count(); ++i)
    if (small_a.field.domain.test(i) && big_a.field.domain.test(i))
      CHECK(big_a.field.values[i] <= small_a.field.values[i] + 1e-5);

  const SolveResult small_omega = solve_condenser_field(
      DomainSpec::disc(0.0, 0.8), SetSpec::disc(0.0, 0.2), g, params, 1);
  for (int i = 0; i < g.count(); ++i)
    if (small_omega.field.domain.test(i) && small_a.field.domain.test(i))
      CHECK(small_a.field.values[i] <= small_omega.field.values[i] + 1e-5);
}

TEST_CASE("removing a few grid points from A barely moves the field") {
  const DomainSpec omega = DomainSpec::disc(0.0, 1.0);
  const SetSpec a = SetSpec::disc(0.0, 0.25);
  SolveParams params;
  params.tol = 1e-9;
  params.relaxation = 1.9;

  auto removal_shift = [&](int n) {
    const Grid g = grid_n(n);
    // Five nodes just inside the rim of A.
    std::vector<cplx> pts;
    for (int k = 0; k < 5 && static_cast<int>(pts.size()) < 5; ++k) {
      const double th = 2.0 * M_PI * k / 5.0;
      const cplx target{0.24 * std::cos(th), 0.24 * std::sin(th)};
      const int ix = static_cast<int>(std::lround((target.real() - g.x0) / g.sx()));
      const int iy = static_cast<int>(std::lround((target.imag() - g.y0) / g.sy()));
      pts.push_back(g.point(ix, iy));
    }
    const SolveResult base = solve_condenser_field(omega, a, g, params, 1);
    const SolveResult cut = solve_condenser_field(
        omega, SetSpec::minus_points(a, pts), g, params, 1);
    double shift = 0;
    for (int i = 0; i < g.count(); ++i)
      if (base.field.domain.test(i) && cut.field.domain.test(i))
        shift = std::max(shift,
                         std::fabs(base.field.values[i] - cut.field.values[i]));
    return std::pair<double, double>{shift, g.max_spacing()};
  };

  const auto [coarse_shift, coarse_h] = removal_shift(128);
  const auto [fine_shift, fine_h] = removal_shift(192);
  CHECK(coarse_shift <= 1.0 / std::log(1.0 / coarse_h));
  CHECK(fine_shift <= 1.0 / std::log(1.0 / fine_h));
  CHECK(fine_shift <= coarse_shift + 1e-6);
}

TEST_CASE("usc regularization leaves constants alone and removes dips") {
  const SolveResult sol = solve_unit_annulus(64);
  ScalarField constant = sol.field;
  for (size_t i = 0; i < constant.values.size(); ++i)
    if (constant.domain.flags[i] && !constant.zero_set.flags[i])
      constant.values[i] = 0.5;
  ScalarField reg = regularize_usc(constant);
  for (size_t i = 0; i < reg.values.size(); ++i)
    if (reg.domain.flags[i] && !reg.zero_set.flags[i])
      CHECK(reg.values[i] == 0.5);

  // Inject a dip at an interior non-A point.
  ScalarField dipped = sol.field;
  const Grid& g = dipped.grid;
  const int i = g.index(g.nx / 2 + 12, g.ny / 2);
  REQUIRE(dipped.interior.test(i));
  REQUIRE(!dipped.zero_set.test(i));
  dipped.values[i] = 0.0;
  const ScalarField fixed = regularize_usc(dipped);
  CHECK(fixed.values[i] > 0.0);
}

TEST_CASE("usc regularization obeys the one-cell gradient bound") {
  const SolveResult sol = solve_unit_annulus(96);
  const ScalarField& f = sol.field;
  const Grid& g = f.grid;
  double grad = 0;
  for (int iy = 1; iy < g.ny - 1; ++iy)
    for (int ix = 1; ix < g.nx - 1; ++ix) {
      const int i = g.index(ix, iy);
      if (!f.interior.test(i)) continue;
      if (!f.domain.test(i - 1) || !f.domain.test(i + 1) ||
          !f.domain.test(i - g.nx) || !f.domain.test(i + g.nx))
        continue;
      const double gx = (f.values[i + 1] - f.values[i - 1]) / (2 * g.sx());
      const double gy = (f.values[i + g.nx] - f.values[i - g.nx]) / (2 * g.sy());
      grad = std::max(grad, std::hypot(gx, gy));
    }
  const ScalarField reg = regularize_usc(f);
  double diff = 0;
  for (size_t i = 0; i < f.values.size(); ++i)
    if (f.domain.flags[i])
      diff = std::max(diff, std::fabs(reg.values[i] - f.values[i]));
  CHECK(diff <= 2.0 * g.max_spacing() * grad + 1e-12);
}

TEST_CASE("omega_limit reproduces the direct solve near A and stays monotone") {
  const DomainSpec omega = DomainSpec::disc(0.0, 1.0);
  const SetSpec a = SetSpec::disc(0.0, 0.25);
  const Grid g = grid_n(96);
  SolveParams params;
  params.tol = 1e-7;
  params.relaxation = 1.9;
  const OmegaLimitResult lim = omega_limit(omega, a, g, 3, params);
  for (const OmegaLimitStep& s : lim.monotonicity)
    CHECK(s.max_increase <= 5.0 * params.tol);

  SolveParams direct_params = params;
  direct_params.tol = 1e-9;
  const SolveResult direct = solve_condenser_field(omega, a, g, direct_params, 1);
  double gap = 0;
  for (int i = 0; i < g.count(); ++i) {
    if (std::abs(g.point(i % g.nx, i / g.nx)) > 0.28) continue;
    if (!lim.field.domain.test(i) || !direct.field.domain.test(i)) continue;
    gap = std::max(gap, std::fabs(lim.field.values[i] - direct.field.values[i]));
  }
  CHECK(gap <= 0.03);
}

TEST_CASE("omega_limit of A equal to the domain stays identically zero") {
  const DomainSpec omega = DomainSpec::disc(0.0, 1.0);
  const SetSpec a = SetSpec::disc(0.0, 1.0);
  const OmegaLimitResult lim = omega_limit(omega, a, grid_n(64), 3, {});
  CHECK(lim.field.max_value() == 0.0);
}

TEST_CASE("punctured annulus tracks the logarithmic closed form") {
  const double eps = 0.02;
  const Grid g = grid_n(421);
  SolveParams params;
  params.tol = 1e-7;
  params.relaxation = optimal_relaxation(g);
  const SolveResult sol = solve_condenser_field(
      DomainSpec::annulus(0.0, eps, 1.0), SetSpec::annulus(0.0, 0.3, 0.6), g,
      params, 1);
  const double v = sol.field.sample(cplx{0.1, 0.0});
  const double expect = std::log(3.0) / std::log(0.3 / eps);
  CHECK(std::fabs(v - expect) <= 0.03);
}

TEST_CASE("walk-on-spheres nails the annulus exit probability") {
  const DomainSpec omega = DomainSpec::disc(0.0, 1.0);
  const SetSpec a = SetSpec::disc(0.0, 0.25);
  for (int k = 0; k < 3; ++k) {
    const double r = 0.4 + 0.2 * k;
    const cplx z{r * std::cos(1.0 + k), r * std::sin(1.0 + k)};
    const McEstimate mc = mc_exit_probability(z, omega, a, 20000, 42 + k, 2);
    CHECK(std::fabs(mc.mean - condenser(std::abs(z))) <=
          3.0 * mc.std_error + 0.02);
    CHECK(mc.std_error <= 0.5 / std::sqrt(static_cast<double>(mc.n_samples)) + 1e-9);
  }
}

TEST_CASE("walks adjacent to an absorbing set resolve immediately") {
  const DomainSpec omega = DomainSpec::disc(0.0, 1.0);
  const SetSpec a = SetSpec::disc(0.0, 0.25);
  const McEstimate near_a =
      mc_exit_probability(cplx{0.2505, 0.0}, omega, a, 2000, 7);
  CHECK(near_a.mean <= 0.05);
  const McEstimate near_boundary =
      mc_exit_probability(cplx{0.9995, 0.0}, omega, a, 2000, 7);
  CHECK(near_boundary.mean >= 0.95);
}

TEST_CASE("walk-on-spheres rejects start points outside the domain") {
  const DomainSpec omega = DomainSpec::disc(0.0, 1.0);
  const SetSpec a = SetSpec::disc(0.0, 0.25);
  CHECK_THROWS_AS(mc_exit_probability(cplx{2.0, 0.0}, omega, a, 1000, 1), Error);
  CHECK_THROWS_AS(mc_exit_probability(cplx{0.1, 0.0}, omega, a, 1000, 1), Error);
}

TEST_CASE("walk-on-spheres is deterministic for a fixed seed across jobs") {
  const DomainSpec omega = DomainSpec::disc(0.0, 1.0);
  const SetSpec a = SetSpec::disc(0.0, 0.25);
  const McEstimate one = mc_exit_probability(cplx{0.5, 0.1}, omega, a, 5000, 99, 1);
  const McEstimate four = mc_exit_probability(cplx{0.5, 0.1}, omega, a, 5000, 99, 4);
  CHECK(one.mean == four.mean);
  CHECK(one.n_samples == four.n_samples);
}

TEST_CASE("solver and oracle agree on a probe set") {
  const SolveResult sol = solve_unit_annulus(128);
  const DomainSpec omega = DomainSpec::disc(0.0, 1.0);
  const SetSpec a = SetSpec::disc(0.0, 0.25);
  for (int k = 0; k < 5; ++k) {
    const double r = 0.35 + 0.12 * k;
    const cplx z{r * std::cos(0.7 * k), r * std::sin(0.7 * k)};
    const McEstimate mc = mc_exit_probability(z, omega, a, 20000, 1234 + k, 2);
    CHECK(std::fabs(sol.field.sample(z) - mc.mean) <= 3.0 * mc.std_error + 0.02);
  }
}

TEST_CASE("field CSV round-trips values and domain") {
  const SolveResult sol = solve_unit_annulus(64);
  std::ostringstream os;
  sol.field.to_csv(os);
  std::istringstream is(os.str());
  const ScalarField back = ScalarField::from_csv(is);
  CHECK(back.grid == sol.field.grid);
  CHECK(back.domain.flags == sol.field.domain.flags);
  for (size_t i = 0; i < back.values.size(); ++i)
    if (back.domain.flags[i])
      CHECK(back.values[i] == doctest::Approx(sol.field.values[i]).epsilon(1e-15));
}
