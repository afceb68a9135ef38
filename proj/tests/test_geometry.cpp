#include <doctest.h>

#include <cmath>
#include <sstream>

#include "crosslab/geometry.hpp"
#include "crosslab/io.hpp"

using namespace crosslab;

namespace {

Grid grid64() { return make_grid(-1.1, -1.1, 1.1, 1.1, 64, 64); }

// Random primitive specs for the boolean-consistency property.
DomainSpec random_primitive(SplitMix64& rng) {
  const cplx c{rng.uniform() - 0.5, rng.uniform() - 0.5};
  switch (rng.next() % 3) {
    case 0:
      return DomainSpec::disc(c, 0.2 + 0.6 * rng.uniform());
    case 1: {
      const double ri = 0.05 + 0.2 * rng.uniform();
      return DomainSpec::annulus(c, ri, ri + 0.3 + 0.4 * rng.uniform());
    }
    default: {
      const double w = 0.2 + 0.5 * rng.uniform();
      const double h = 0.2 + 0.5 * rng.uniform();
      return DomainSpec::rectangle(c - cplx{w, h}, c + cplx{w, h});
    }
  }
}

}  // namespace

TEST_CASE("rasterized open disc matches the membership predicate") {
  const Grid g = grid64();
  const Mask m = rasterize(DomainSpec::disc(0.0, 1.0), g);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix)
      CHECK(m.test(ix, iy) == (std::abs(g.point(ix, iy)) < 1.0));
}

TEST_CASE("closed disc raster cell count tracks its area") {
  const Grid g = grid64();
  const Mask m = rasterize(SetSpec::disc(0.0, 0.25), g);
  const double box_area = 2.2 * 2.2;
  const double expected = M_PI * 0.25 * 0.25 / box_area * g.count();
  CHECK(std::fabs(m.count() - expected) <= 0.10 * expected);
}

TEST_CASE("subtracting a superset empties the rasterization") {
  const Grid g = grid64();
  const DomainSpec d =
      DomainSpec::difference(DomainSpec::disc(0.0, 1.0), SetSpec::disc(0.0, 2.0));
  CHECK_THROWS_WITH_AS(rasterize(d, g), "set not resolved at this resolution",
                       Error);
}

TEST_CASE("boundary points of closed sets rasterize as members") {
  const Grid g = make_grid(0.0, 0.0, 1.0, 1.0, 11, 11);
  const Mask m = rasterize(SetSpec::rectangle({0.0, 0.0}, {0.5, 0.5}), g);
  CHECK(m.test(0, 0));
  CHECK(m.test(5, 5));   // corner exactly on the closed boundary
  CHECK(!m.test(6, 5));
}

TEST_CASE("boolean algebra is consistent with mask combination") {
  const Grid g = grid64();
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const DomainSpec s = random_primitive(rng);
    const DomainSpec t = random_primitive(rng);
    Mask ms, mt;
    bool ok = true;
    try {
      ms = rasterize(s, g);
      mt = rasterize(t, g);
    } catch (const Error&) {
      ok = false;  // primitive missed the grid window; skip the draw
    }
    if (!ok) continue;
    const Mask mu = rasterize(DomainSpec::union_of({s, t}), g);
    const Mask mi_expected = mask_and(ms, mt);
    const Mask mo_expected = mask_or(ms, mt);
    CHECK(mu.flags == mo_expected.flags);
    try {
      const Mask mi = rasterize(DomainSpec::intersection_of({s, t}), g);
      CHECK(mi.flags == mi_expected.flags);
    } catch (const Error&) {
      CHECK(mi_expected.count() == 0);
    }
  }
}

TEST_CASE("rasterization is idempotent") {
  const Grid g = grid64();
  const DomainSpec d = DomainSpec::annulus(0.1, 0.3, 0.9);
  CHECK(rasterize(d, g).flags == rasterize(d, g).flags);
}

TEST_CASE("disc exhaustion erodes by diam/(4k)") {
  const DomainSpec d = DomainSpec::disc(0.0, 1.0);
  const DomainSpec e1 = exhaustion(d, 1);
  CHECK(e1.shape().kind == Shape::Kind::disc);
  CHECK(e1.shape().r0 == doctest::Approx(0.5).epsilon(1e-12));
  const DomainSpec e100 = exhaustion(d, 100);
  CHECK(e100.shape().r0 == doctest::Approx(1.0 - 0.005).epsilon(1e-12));
}

TEST_CASE("annulus exhaustion erodes both sides") {
  const DomainSpec d = DomainSpec::annulus(0.0, 0.2, 1.0);
  const DomainSpec e2 = exhaustion(d, 2);
  CHECK(e2.shape().r0 == doctest::Approx(0.2 + 0.25));
  CHECK(e2.shape().r1 == doctest::Approx(1.0 - 0.25));
}

TEST_CASE("exhaustion of a thin annulus fails at small k") {
  // diam = 1.1, gap = 0.1: two-sided erosion by 1.1/(4k) empties the ring
  // until 2 * 1.1/(4k) < 0.1, i.e. k >= 6.
  const DomainSpec d = DomainSpec::annulus(0.0, 0.45, 0.55);
  CHECK_THROWS_WITH_AS(exhaustion(d, 1), "exhaustion index too small for domain",
                       Error);
  CHECK_THROWS_AS(exhaustion(d, 5), Error);
  CHECK_NOTHROW(exhaustion(d, 6));
}

TEST_CASE("exhaustions are nested under rasterization") {
  const Grid g = grid64();
  const DomainSpec d = DomainSpec::union_of(
      {DomainSpec::disc(cplx{-0.3, 0.0}, 0.6), DomainSpec::disc(cplx{0.4, 0.1}, 0.5)});
  const Mask full = rasterize(d, g);
  Mask prev = rasterize(exhaustion(d, 1), g);
  CHECK(prev.is_subset_of(full));
  for (int k = 2; k <= 5; ++k) {
    const Mask cur = rasterize(exhaustion(d, k), g);
    CHECK(prev.is_subset_of(cur));
    CHECK(cur.is_subset_of(full));
    prev = cur;
  }
}

TEST_CASE("minus_points removes exactly the listed grid nodes") {
  const Grid g = grid64();
  const SetSpec base = SetSpec::disc(0.0, 0.5);
  const cplx p = g.point(32, 32);
  const SetSpec cut = SetSpec::minus_points(base, {p});
  const Mask mb = rasterize(base, g);
  const Mask mc = rasterize(cut, g);
  CHECK(mb.count() - mc.count() == 1);
  CHECK(cut.distance(p) == 0.0);  // point removal does not move the distance
}

TEST_CASE("spec JSON round-trips preserve membership") {
  SplitMix64 rng(77);
  const DomainSpec d = DomainSpec::difference(
      DomainSpec::union_of({DomainSpec::disc(cplx{-0.2, 0.1}, 0.8),
                            DomainSpec::rectangle({-0.1, -0.9}, {0.9, 0.2})}),
      SetSpec::disc(cplx{0.2, -0.1}, 0.15));
  const DomainSpec back = domain_from_json(
      nlohmann::json::parse(json17_to_string(domain_to_json(d))));
  for (int k = 0; k < 500; ++k) {
    const cplx z{2.4 * rng.uniform() - 1.2, 2.4 * rng.uniform() - 1.2};
    CHECK(d.contains(z) == back.contains(z));
  }
}

TEST_CASE("unknown spec keys are rejected") {
  const auto j = nlohmann::json::parse(
      R"({"shape":"disc","center":[0,0],"radius":1.0,"extra":3})");
  CHECK_THROWS_AS(domain_from_json(j), Error);
}

TEST_CASE("grid construction validates its arguments") {
  CHECK_THROWS_AS(make_grid(0, 0, 1, 1, 7, 16), Error);
  CHECK_THROWS_AS(make_grid(0, 0, 1, 1, 16, 7), Error);
  CHECK_THROWS_AS(make_grid(1, 0, 0, 1, 16, 16), Error);
  const Grid g = make_grid(0, 0, 1, 2, 11, 21);
  CHECK(g.sx() == doctest::Approx(0.1));
  CHECK(g.sy() == doctest::Approx(0.1));
  CHECK(g.index(3, 2) == 2 * 11 + 3);
}

TEST_CASE("mask CSV and PGM exports carry the grid header") {
  const Grid g = make_grid(-1.0, -1.0, 1.0, 1.0, 8, 8);
  const Mask m = rasterize(SetSpec::disc(0.0, 0.9), g);
  std::ostringstream csv, pgm;
  m.to_csv(csv);
  m.to_pgm(pgm);
  CHECK(csv.str().rfind("8,8\n", 0) == 0);
  CHECK(pgm.str().rfind("P2\n8 8\n255\n", 0) == 0);
}
