#include "crosslab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace crosslab {

namespace {

constexpr double kPointTol = 1e-12;  // exact-removal match width for minus_points

}  // namespace

double BoundingBox::diagonal() const { return std::hypot(x1 - x0, y1 - y0); }

bool Shape::contains(cplx z) const {
  switch (kind) {
    case Kind::disc: {
      const double d = std::abs(z - center);
      return closed ? d <= r0 : d < r0;
    }
    case Kind::annulus: {
      const double d = std::abs(z - center);
      return closed ? (d >= r0 && d <= r1) : (d > r0 && d < r1);
    }
    case Kind::rectangle:
      return closed ? (z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 &&
                       z.imag() <= y1)
                    : (z.real() > x0 && z.real() < x1 && z.imag() > y0 &&
                       z.imag() < y1);
    case Kind::union_of:
      for (const Shape& c : children)
        if (c.contains(z)) return true;
      return false;
    case Kind::intersection_of:
      for (const Shape& c : children)
        if (!c.contains(z)) return false;
      return true;
    case Kind::difference:
      return children[0].contains(z) && !children[1].contains(z);
    case Kind::minus_points:
      if (!children[0].contains(z)) return false;
      for (cplx p : removed)
        if (std::abs(z - p) <= kPointTol) return false;
      return true;
    case Kind::eroded:
      return children[0].complement_clearance(z) > r0;
  }
  return false;
}

double Shape::set_distance(cplx z) const {
  switch (kind) {
    case Kind::disc:
      return std::max(0.0, std::abs(z - center) - r0);
    case Kind::annulus: {
      const double d = std::abs(z - center);
      if (d < r0) return r0 - d;
      if (d > r1) return d - r1;
      return 0.0;
    }
    case Kind::rectangle: {
      const double dx =
          std::max({x0 - z.real(), 0.0, z.real() - x1});
      const double dy =
          std::max({y0 - z.imag(), 0.0, z.imag() - y1});
      return std::hypot(dx, dy);
    }
    case Kind::union_of: {
      double d = std::numeric_limits<double>::infinity();
      for (const Shape& c : children) d = std::min(d, c.set_distance(z));
      return d;
    }
    case Kind::intersection_of: {
      // Lower bound only; membership stays exact through contains().
      double d = 0.0;
      for (const Shape& c : children) d = std::max(d, c.set_distance(z));
      return d;
    }
    case Kind::difference:
      return contains(z) ? 0.0 : children[0].set_distance(z);
    case Kind::minus_points:
      // Finitely many removed points do not move the distance to the set.
      return children[0].set_distance(z);
    case Kind::eroded:
      return contains(z) ? 0.0
                         : std::max(0.0, children[0].set_distance(z));
  }
  return 0.0;
}

double Shape::complement_clearance(cplx z) const {
  if (!contains(z)) return 0.0;
  switch (kind) {
    case Kind::disc:
      return r0 - std::abs(z - center);
    case Kind::annulus: {
      const double d = std::abs(z - center);
      return std::min(d - r0, r1 - d);
    }
    case Kind::rectangle:
      return std::min(std::min(z.real() - x0, x1 - z.real()),
                      std::min(z.imag() - y0, y1 - z.imag()));
    case Kind::union_of: {
      double d = 0.0;
      for (const Shape& c : children)
        d = std::max(d, c.complement_clearance(z));
      return d;
    }
    case Kind::intersection_of: {
      double d = std::numeric_limits<double>::infinity();
      for (const Shape& c : children)
        d = std::min(d, c.complement_clearance(z));
      return d;
    }
    case Kind::difference:
      return std::min(children[0].complement_clearance(z),
                      children[1].set_distance(z));
    case Kind::minus_points:
      return children[0].complement_clearance(z);
    case Kind::eroded:
      return children[0].complement_clearance(z) - r0;
  }
  return 0.0;
}

BoundingBox Shape::bounding_box() const {
  switch (kind) {
    case Kind::disc:
      return {center.real() - r0, center.imag() - r0, center.real() + r0,
              center.imag() + r0};
    case Kind::annulus:
      return {center.real() - r1, center.imag() - r1, center.real() + r1,
              center.imag() + r1};
    case Kind::rectangle:
      return {x0, y0, x1, y1};
    case Kind::union_of: {
      BoundingBox b = children[0].bounding_box();
      for (size_t i = 1; i < children.size(); ++i) {
        const BoundingBox c = children[i].bounding_box();
        b.x0 = std::min(b.x0, c.x0);
        b.y0 = std::min(b.y0, c.y0);
        b.x1 = std::max(b.x1, c.x1);
        b.y1 = std::max(b.y1, c.y1);
      }
      return b;
    }
    case Kind::intersection_of: {
      BoundingBox b = children[0].bounding_box();
      for (size_t i = 1; i < children.size(); ++i) {
        const BoundingBox c = children[i].bounding_box();
        b.x0 = std::max(b.x0, c.x0);
        b.y0 = std::max(b.y0, c.y0);
        b.x1 = std::min(b.x1, c.x1);
        b.y1 = std::min(b.y1, c.y1);
      }
      if (b.x1 < b.x0) b.x1 = b.x0;
      if (b.y1 < b.y0) b.y1 = b.y0;
      return b;
    }
    case Kind::difference:
    case Kind::minus_points:
    case Kind::eroded:
      return children[0].bounding_box();
  }
  return {};
}

double Shape::diameter() const {
  switch (kind) {
    case Kind::disc:
      return 2.0 * r0;
    case Kind::annulus:
      return 2.0 * r1;
    case Kind::rectangle:
      return std::hypot(x1 - x0, y1 - y0);
    case Kind::intersection_of: {
      double d = std::numeric_limits<double>::infinity();
      for (const Shape& c : children) d = std::min(d, c.diameter());
      return std::min(d, bounding_box().diagonal());
    }
    case Kind::union_of:
      return bounding_box().diagonal();
    case Kind::difference:
    case Kind::minus_points:
    case Kind::eroded:
      return children[0].diameter();
  }
  return 0.0;
}

// ---- DomainSpec / SetSpec factories -----------------------------------

DomainSpec DomainSpec::disc(cplx center, double radius) {
  if (!(radius > 0))
    throw Error("geometry.invalid", "disc radius must be positive");
  Shape s;
  s.kind = Shape::Kind::disc;
  s.center = center;
  s.r0 = radius;
  return from_shape(std::move(s));
}

DomainSpec DomainSpec::annulus(cplx center, double r_in, double r_out) {
  if (!(r_out > 0) || !(r_in >= 0) || !(r_in < r_out))
    throw Error("geometry.invalid", "annulus needs 0 <= r_in < r_out");
  Shape s;
  s.kind = Shape::Kind::annulus;
  s.center = center;
  s.r0 = r_in;
  s.r1 = r_out;
  return from_shape(std::move(s));
}

DomainSpec DomainSpec::rectangle(cplx lo, cplx hi) {
  if (!(hi.real() > lo.real()) || !(hi.imag() > lo.imag()))
    throw Error("geometry.invalid", "rectangle must have positive area");
  Shape s;
  s.kind = Shape::Kind::rectangle;
  s.x0 = lo.real();
  s.y0 = lo.imag();
  s.x1 = hi.real();
  s.y1 = hi.imag();
  return from_shape(std::move(s));
}

DomainSpec DomainSpec::union_of(std::vector<DomainSpec> parts) {
  if (parts.empty()) throw Error("geometry.invalid", "empty union");
  Shape s;
  s.kind = Shape::Kind::union_of;
  for (DomainSpec& p : parts) s.children.push_back(std::move(p.root_));
  return from_shape(std::move(s));
}

DomainSpec DomainSpec::intersection_of(std::vector<DomainSpec> parts) {
  if (parts.empty()) throw Error("geometry.invalid", "empty intersection");
  Shape s;
  s.kind = Shape::Kind::intersection_of;
  for (DomainSpec& p : parts) s.children.push_back(std::move(p.root_));
  return from_shape(std::move(s));
}

DomainSpec DomainSpec::difference(DomainSpec base, SetSpec hole) {
  Shape s;
  s.kind = Shape::Kind::difference;
  s.children.push_back(std::move(base.root_));
  s.children.push_back(hole.shape());
  return from_shape(std::move(s));
}

DomainSpec DomainSpec::from_shape(Shape s) {
  DomainSpec d;
  d.root_ = std::move(s);
  return d;
}

SetSpec SetSpec::disc(cplx center, double radius) {
  if (!(radius > 0))
    throw Error("geometry.invalid", "disc radius must be positive");
  Shape s;
  s.kind = Shape::Kind::disc;
  s.closed = true;
  s.center = center;
  s.r0 = radius;
  return from_shape(std::move(s));
}

SetSpec SetSpec::annulus(cplx center, double r_in, double r_out) {
  if (!(r_out > 0) || !(r_in >= 0) || !(r_in < r_out))
    throw Error("geometry.invalid", "annulus needs 0 <= r_in < r_out");
  Shape s;
  s.kind = Shape::Kind::annulus;
  s.closed = true;
  s.center = center;
  s.r0 = r_in;
  s.r1 = r_out;
  return from_shape(std::move(s));
}

SetSpec SetSpec::rectangle(cplx lo, cplx hi) {
  if (!(hi.real() > lo.real()) || !(hi.imag() > lo.imag()))
    throw Error("geometry.invalid", "rectangle must have positive area");
  Shape s;
  s.kind = Shape::Kind::rectangle;
  s.closed = true;
  s.x0 = lo.real();
  s.y0 = lo.imag();
  s.x1 = hi.real();
  s.y1 = hi.imag();
  return from_shape(std::move(s));
}

SetSpec SetSpec::union_of(std::vector<SetSpec> parts) {
  if (parts.empty()) throw Error("geometry.invalid", "empty union");
  Shape s;
  s.kind = Shape::Kind::union_of;
  s.closed = true;
  for (SetSpec& p : parts) s.children.push_back(std::move(p.root_));
  return from_shape(std::move(s));
}

SetSpec SetSpec::minus_points(SetSpec base, std::vector<cplx> points) {
  Shape s;
  s.kind = Shape::Kind::minus_points;
  s.closed = true;
  s.children.push_back(std::move(base.root_));
  s.removed = std::move(points);
  return from_shape(std::move(s));
}

SetSpec SetSpec::from_shape(Shape s) {
  SetSpec out;
  out.root_ = std::move(s);
  return out;
}

// ---- Grid and Mask ------------------------------------------------------

Grid make_grid(double x0, double y0, double x1, double y1, int nx, int ny) {
  if (nx < 8 || ny < 8)
    throw Error("geometry.invalid", "grid needs nx, ny >= 8");
  if (!(x1 > x0) || !(y1 > y0))
    throw Error("geometry.invalid", "grid rectangle must be nondegenerate");
  return Grid{x0, y0, x1, y1, nx, ny};
}

long Mask::count() const {
  long n = 0;
  for (uint8_t f : flags) n += f != 0;
  return n;
}

bool Mask::is_subset_of(const Mask& other) const {
  if (!(grid == other.grid))
    throw Error("geometry.grid_mismatch", "mask grids differ");
  for (size_t i = 0; i < flags.size(); ++i)
    if (flags[i] && !other.flags[i]) return false;
  return true;
}

void Mask::to_csv(std::ostream& os) const {
  os << grid.nx << "," << grid.ny << "\n";
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      if (ix) os << ",";
      os << (test(ix, iy) ? 1 : 0);
    }
    os << "\n";
  }
}

void Mask::to_pgm(std::ostream& os) const {
  os << "P2\n" << grid.nx << " " << grid.ny << "\n255\n";
  for (int iy = grid.ny - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      if (ix) os << " ";
      os << (test(ix, iy) ? 255 : 0);
    }
    os << "\n";
  }
}

namespace {

Mask combine(const Mask& a, const Mask& b, bool (*op)(bool, bool)) {
  if (!(a.grid == b.grid))
    throw Error("geometry.grid_mismatch", "mask grids differ");
  Mask out{a.grid, std::vector<uint8_t>(a.flags.size(), 0)};
  for (size_t i = 0; i < a.flags.size(); ++i)
    out.flags[i] = op(a.flags[i] != 0, b.flags[i] != 0) ? 1 : 0;
  return out;
}

Mask rasterize_shape(const Shape& s, const Grid& grid) {
  Mask m{grid, std::vector<uint8_t>(static_cast<size_t>(grid.count()), 0)};
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix)
      if (s.contains(grid.point(ix, iy)))
        m.flags[static_cast<size_t>(grid.index(ix, iy))] = 1;
  if (m.count() == 0)
    throw Error("geometry.empty_raster", "set not resolved at this resolution");
  return m;
}

}  // namespace

Mask mask_and(const Mask& a, const Mask& b) {
  return combine(a, b, [](bool x, bool y) { return x && y; });
}
Mask mask_or(const Mask& a, const Mask& b) {
  return combine(a, b, [](bool x, bool y) { return x || y; });
}
Mask mask_minus(const Mask& a, const Mask& b) {
  return combine(a, b, [](bool x, bool y) { return x && !y; });
}

Mask rasterize(const DomainSpec& spec, const Grid& grid) {
  return rasterize_shape(spec.shape(), grid);
}
Mask rasterize(const SetSpec& spec, const Grid& grid) {
  return rasterize_shape(spec.shape(), grid);
}

// ---- Exhaustion ----------------------------------------------------------

namespace {

// Coarse nonemptiness probe for eroded composites; primitives are checked
// analytically.
bool probe_nonempty(const Shape& s) {
  const BoundingBox b = s.bounding_box();
  if (!(b.x1 > b.x0) || !(b.y1 > b.y0)) return false;
  const int n = 160;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const cplx z{b.x0 + (b.x1 - b.x0) * (ix + 0.5) / n,
                   b.y0 + (b.y1 - b.y0) * (iy + 0.5) / n};
      if (s.contains(z)) return true;
    }
  return false;
}

}  // namespace

DomainSpec exhaustion(const DomainSpec& spec, int k) {
  if (k < 1) throw Error("geometry.invalid", "exhaustion index must be >= 1");
  const double eps = spec.diameter() / (4.0 * k);
  const Shape& s = spec.shape();
  const char* too_small = "exhaustion index too small for domain";
  switch (s.kind) {
    case Shape::Kind::disc: {
      if (s.r0 - eps <= 0) throw Error("geometry.exhaustion_empty", too_small);
      return DomainSpec::disc(s.center, s.r0 - eps);
    }
    case Shape::Kind::annulus: {
      if (s.r0 + eps >= s.r1 - eps)
        throw Error("geometry.exhaustion_empty", too_small);
      return DomainSpec::annulus(s.center, s.r0 + eps, s.r1 - eps);
    }
    case Shape::Kind::rectangle: {
      if (s.x0 + eps >= s.x1 - eps || s.y0 + eps >= s.y1 - eps)
        throw Error("geometry.exhaustion_empty", too_small);
      return DomainSpec::rectangle({s.x0 + eps, s.y0 + eps},
                                   {s.x1 - eps, s.y1 - eps});
    }
    default: {
      Shape e;
      e.kind = Shape::Kind::eroded;
      e.r0 = eps;
      e.children.push_back(s);
      if (!probe_nonempty(e)) throw Error("geometry.exhaustion_empty", too_small);
      return DomainSpec::from_shape(std::move(e));
    }
  }
}

}  // namespace crosslab
