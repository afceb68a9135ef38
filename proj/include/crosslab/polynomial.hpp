#pragma once

#include <vector>

#include "crosslab/util.hpp"

namespace crosslab {

// Univariate polynomial, coefficients ascending in the power.
struct Poly1 {
  std::vector<cplx> coef;

  int degree() const { return static_cast<int>(coef.size()) - 1; }
  cplx eval(cplx x) const;
  Poly1 derivative() const;
  double scale() const;  // max coefficient magnitude
  // Drops leading coefficients below rel_tol * scale.
  Poly1 trimmed(double rel_tol = 1e-12) const;
  bool is_zero() const { return scale() == 0.0; }
};

// All roots, companion-matrix eigenvalues polished by Newton steps, ordered
// lexicographically by (re, im).  Throws when a polished root fails the
// residual bound.
std::vector<cplx> poly_roots(const Poly1& p);

// Roots grouped into clusters of radius tol_abs * (1 + |root|).
struct RootCluster {
  cplx value;
  int multiplicity;
};
std::vector<RootCluster> cluster_roots(const std::vector<cplx>& roots,
                                       double tol_abs = 1e-9);

// Bivariate polynomial; coef[i][j] multiplies z^i w^j.
struct Poly2 {
  std::vector<std::vector<cplx>> coef;

  static Poly2 constant(cplx c) { return Poly2{{{c}}}; }
  int deg_z() const { return static_cast<int>(coef.size()) - 1; }
  int deg_w() const {
    return coef.empty() ? -1 : static_cast<int>(coef[0].size()) - 1;
  }
  cplx at(int i, int j) const { return coef[i][j]; }
  cplx eval(cplx z, cplx w) const;
  Poly2 d_dz() const;
  Poly2 d_dw() const;
  // Coefficients of w -> P(z, w) for fixed z (and symmetrically).
  Poly1 coeffs_in_w_at(cplx z) const;
  Poly1 coeffs_in_z_at(cplx w) const;
  Poly2 swapped() const;  // P(w, z)
  Poly2 mul(const Poly2& other) const;
  Poly2 plus(const Poly2& other) const;
  double scale() const;
  bool is_zero() const { return scale() == 0.0; }
  // Bound on |grad P| over the polydisc |z| <= rz, |w| <= rw.
  double gradient_bound(double rz, double rw) const;
};

// Determinant of the Sylvester matrix of two coefficient vectors taken at
// their formal degrees (leading zeros included).
cplx sylvester_determinant(const std::vector<cplx>& a, const std::vector<cplx>& b);

// Resultant of p and q with respect to w, as a polynomial in z.  Computed by
// evaluating the Sylvester determinant on a circle of nodes and inverting the
// DFT; formal w-degrees are kept so leading-coefficient zeros stay visible.
Poly1 resultant_w(const Poly2& p, const Poly2& q);

}  // namespace crosslab
