#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "crosslab/util.hpp"

namespace crosslab {

struct BoundingBox {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  double diagonal() const;
};

// One node of a constructive-geometry tree.  Primitive shapes carry an
// open/closed flag (closed membership uses inclusive comparisons); boolean
// nodes combine children.  `eroded` realizes inward offsets of composite
// shapes through the analytic clearance bound.
struct Shape {
  enum class Kind {
    disc,
    annulus,
    rectangle,
    union_of,
    intersection_of,
    difference,    // children = {base, hole}; hole membership is excluded
    minus_points,  // children = {base}; finitely many points removed
    eroded,        // children = {base}; eps stored in r0
  };

  Kind kind = Kind::disc;
  bool closed = false;
  cplx center{0.0, 0.0};
  double r0 = 0.0;  // disc radius | annulus r_in | erosion eps
  double r1 = 0.0;  // annulus r_out
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // rectangle corners
  std::vector<Shape> children;
  std::vector<cplx> removed;

  bool contains(cplx z) const;
  // Distance from z to the realized (closed) set; 0 on the set.
  double set_distance(cplx z) const;
  // Lower bound on the distance from z to the complement; 0 outside.
  // Exact for primitives, intersections and differences.
  double complement_clearance(cplx z) const;
  BoundingBox bounding_box() const;
  double diameter() const;
};

// Open planar domain (the Omega / D / G role).
class DomainSpec {
 public:
  static DomainSpec disc(cplx center, double radius);
  static DomainSpec annulus(cplx center, double r_in, double r_out);
  static DomainSpec rectangle(cplx lo, cplx hi);
  static DomainSpec union_of(std::vector<DomainSpec> parts);
  static DomainSpec intersection_of(std::vector<DomainSpec> parts);
  static DomainSpec difference(DomainSpec base, class SetSpec hole);
  static DomainSpec from_shape(Shape s);

  bool contains(cplx z) const { return root_.contains(z); }
  // Distance lower bound from an interior point to the boundary.
  double boundary_clearance(cplx z) const { return root_.complement_clearance(z); }
  double diameter() const { return root_.diameter(); }
  BoundingBox bounding_box() const { return root_.bounding_box(); }
  const Shape& shape() const { return root_; }

 private:
  Shape root_;
};

// Closed "fat" set (the A / B role).  Thin sets enter only as point
// removals from a fat base.
class SetSpec {
 public:
  static SetSpec disc(cplx center, double radius);
  static SetSpec annulus(cplx center, double r_in, double r_out);
  static SetSpec rectangle(cplx lo, cplx hi);
  static SetSpec union_of(std::vector<SetSpec> parts);
  static SetSpec minus_points(SetSpec base, std::vector<cplx> points);
  static SetSpec from_shape(Shape s);

  bool contains(cplx z) const { return root_.contains(z); }
  double distance(cplx z) const { return root_.set_distance(z); }
  double diameter() const { return root_.diameter(); }
  BoundingBox bounding_box() const { return root_.bounding_box(); }
  const Shape& shape() const { return root_; }

 private:
  Shape root_;
};

struct Grid {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  int nx = 0, ny = 0;

  double sx() const { return (x1 - x0) / (nx - 1); }
  double sy() const { return (y1 - y0) / (ny - 1); }
  double max_spacing() const { return sx() > sy() ? sx() : sy(); }
  int count() const { return nx * ny; }
  int index(int ix, int iy) const { return iy * nx + ix; }
  cplx point(int ix, int iy) const {
    return {x0 + ix * sx(), y0 + iy * sy()};
  }
  bool operator==(const Grid&) const = default;
};

// nx, ny >= 8 and a nondegenerate rectangle.
Grid make_grid(double x0, double y0, double x1, double y1, int nx, int ny);

struct Mask {
  Grid grid;
  std::vector<uint8_t> flags;  // one per grid point, row-major

  bool test(int i) const { return flags[static_cast<size_t>(i)] != 0; }
  bool test(int ix, int iy) const { return test(grid.index(ix, iy)); }
  long count() const;
  bool is_subset_of(const Mask& other) const;

  void to_csv(std::ostream& os) const;
  void to_pgm(std::ostream& os) const;
};

Mask mask_and(const Mask& a, const Mask& b);
Mask mask_or(const Mask& a, const Mask& b);
Mask mask_minus(const Mask& a, const Mask& b);

Mask rasterize(const DomainSpec& spec, const Grid& grid);
Mask rasterize(const SetSpec& spec, const Grid& grid);

// Inward offset of the domain by eps_k = diam / (4k).  The returned domain
// is compactly contained in the input and grows back to it as k increases.
DomainSpec exhaustion(const DomainSpec& spec, int k);

}  // namespace crosslab
