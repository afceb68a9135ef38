#include "crosslab/polynomial.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>

namespace crosslab {

cplx Poly1::eval(cplx x) const {
  cplx v = 0;
  for (size_t k = coef.size(); k-- > 0;) v = v * x + coef[k];
  return v;
}

Poly1 Poly1::derivative() const {
  Poly1 d;
  for (size_t k = 1; k < coef.size(); ++k)
    d.coef.push_back(coef[k] * static_cast<double>(k));
  if (d.coef.empty()) d.coef.push_back(0.0);
  return d;
}

double Poly1::scale() const {
  double s = 0;
  for (cplx c : coef) s = std::max(s, std::abs(c));
  return s;
}

Poly1 Poly1::trimmed(double rel_tol) const {
  const double cut = rel_tol * scale();
  Poly1 t = *this;
  while (t.coef.size() > 1 && std::abs(t.coef.back()) <= cut)
    t.coef.pop_back();
  return t;
}

std::vector<cplx> poly_roots(const Poly1& p_in) {
  const Poly1 p = p_in.trimmed();
  const int deg = p.degree();
  if (deg <= 0 || p.scale() == 0.0) return {};
  std::vector<cplx> roots;
  if (deg == 1) {
    roots.push_back(-p.coef[0] / p.coef[1]);
  } else {
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(deg, deg);
    const cplx lead = p.coef[deg];
    for (int i = 0; i < deg; ++i) {
      if (i + 1 < deg) companion(i + 1, i) = 1.0;
      companion(i, deg - 1) = -p.coef[i] / lead;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(companion, false);
    if (es.info() != Eigen::Success)
      throw Error("roots.no_converge", "companion eigensolve failed");
    for (int i = 0; i < deg; ++i) roots.push_back(es.eigenvalues()(i));
  }

  // Safeguarded Newton polish: near multiple roots the derivative sits at
  // rounding-noise level and a raw step can jump O(1), so a step is kept
  // only when it actually shrinks the residual.
  const Poly1 dp = p.derivative();
  for (cplx& r : roots) {
    double best = std::abs(p.eval(r));
    for (int it = 0; it < 3 && best > 0.0; ++it) {
      const cplx d = dp.eval(r);
      if (std::abs(d) < 1e-300) break;
      const cplx step = p.eval(r) / d;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      const cplx trial = r - step;
      const double trial_res = std::abs(p.eval(trial));
      if (trial_res >= best) break;
      r = trial;
      best = trial_res;
    }
  }

  const double s = p.scale();
  for (cplx r : roots) {
    const double residual_scale = s * std::pow(std::max(1.0, std::abs(r)), deg);
    if (std::abs(p.eval(r)) > 1e-8 * residual_scale)
      throw Error("roots.no_converge",
                  "root residual " + fmt17(std::abs(p.eval(r))) +
                      " exceeds bound at root " + fmt17(r.real()) + "+" +
                      fmt17(r.imag()) + "i");
  }

  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return roots;
}

std::vector<RootCluster> cluster_roots(const std::vector<cplx>& roots,
                                       double tol_abs) {
  const size_t n = roots.size();
  std::vector<int> parent(n);
  for (size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      const double tol = tol_abs * (1.0 + std::abs(roots[i]));
      if (std::abs(roots[i] - roots[j]) <= tol) parent[find(static_cast<int>(j))] = find(static_cast<int>(i));
    }
  std::vector<RootCluster> out;
  std::vector<int> rep_index(n, -1);
  for (size_t i = 0; i < n; ++i) {
    const int r = find(static_cast<int>(i));
    if (rep_index[r] < 0) {
      rep_index[r] = static_cast<int>(out.size());
      out.push_back({0.0, 0});
    }
    RootCluster& c = out[rep_index[r]];
    c.value += roots[i];
    c.multiplicity += 1;
  }
  for (RootCluster& c : out) c.value /= static_cast<double>(c.multiplicity);
  std::sort(out.begin(), out.end(), [](const RootCluster& a, const RootCluster& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });
  return out;
}

cplx Poly2::eval(cplx z, cplx w) const {
  cplx v = 0;
  for (size_t i = coef.size(); i-- > 0;) {
    cplx row = 0;
    for (size_t j = coef[i].size(); j-- > 0;) row = row * w + coef[i][j];
    v = v * z + row;
  }
  return v;
}

Poly2 Poly2::d_dz() const {
  if (deg_z() < 1) return Poly2::constant(0.0);
  Poly2 d;
  d.coef.resize(coef.size() - 1);
  for (size_t i = 1; i < coef.size(); ++i) {
    d.coef[i - 1] = coef[i];
    for (cplx& c : d.coef[i - 1]) c *= static_cast<double>(i);
  }
  return d;
}

Poly2 Poly2::d_dw() const {
  Poly2 d;
  d.coef.resize(coef.size());
  for (size_t i = 0; i < coef.size(); ++i) {
    if (coef[i].size() <= 1) {
      d.coef[i] = {0.0};
      continue;
    }
    d.coef[i].resize(coef[i].size() - 1);
    for (size_t j = 1; j < coef[i].size(); ++j)
      d.coef[i][j - 1] = coef[i][j] * static_cast<double>(j);
  }
  return d;
}

Poly1 Poly2::coeffs_in_w_at(cplx z) const {
  Poly1 out;
  out.coef.assign(static_cast<size_t>(deg_w()) + 1, 0.0);
  for (size_t j = 0; j < out.coef.size(); ++j) {
    cplx c = 0;
    for (size_t i = coef.size(); i-- > 0;)
      c = c * z + (j < coef[i].size() ? coef[i][j] : cplx{0.0});
    out.coef[j] = c;
  }
  return out;
}

Poly1 Poly2::coeffs_in_z_at(cplx w) const { return swapped().coeffs_in_w_at(w); }

Poly2 Poly2::swapped() const {
  Poly2 s;
  s.coef.assign(static_cast<size_t>(deg_w()) + 1,
                std::vector<cplx>(static_cast<size_t>(deg_z()) + 1, 0.0));
  for (size_t i = 0; i < coef.size(); ++i)
    for (size_t j = 0; j < coef[i].size(); ++j) s.coef[j][i] = coef[i][j];
  return s;
}

Poly2 Poly2::mul(const Poly2& other) const {
  Poly2 out;
  out.coef.assign(static_cast<size_t>(deg_z() + other.deg_z()) + 1,
                  std::vector<cplx>(static_cast<size_t>(deg_w() + other.deg_w()) + 1,
                                    0.0));
  for (size_t i = 0; i < coef.size(); ++i)
    for (size_t j = 0; j < coef[i].size(); ++j)
      for (size_t k = 0; k < other.coef.size(); ++k)
        for (size_t l = 0; l < other.coef[k].size(); ++l)
          out.coef[i + k][j + l] += coef[i][j] * other.coef[k][l];
  return out;
}

Poly2 Poly2::plus(const Poly2& other) const {
  Poly2 out;
  out.coef.assign(static_cast<size_t>(std::max(deg_z(), other.deg_z())) + 1,
                  std::vector<cplx>(static_cast<size_t>(std::max(deg_w(), other.deg_w())) + 1,
                                    0.0));
  for (size_t i = 0; i < coef.size(); ++i)
    for (size_t j = 0; j < coef[i].size(); ++j) out.coef[i][j] += coef[i][j];
  for (size_t i = 0; i < other.coef.size(); ++i)
    for (size_t j = 0; j < other.coef[i].size(); ++j)
      out.coef[i][j] += other.coef[i][j];
  return out;
}

double Poly2::scale() const {
  double s = 0;
  for (const auto& row : coef)
    for (cplx c : row) s = std::max(s, std::abs(c));
  return s;
}

double Poly2::gradient_bound(double rz, double rw) const {
  double bz = 0, bw = 0;
  for (size_t i = 0; i < coef.size(); ++i)
    for (size_t j = 0; j < coef[i].size(); ++j) {
      const double m = std::abs(coef[i][j]);
      if (m == 0) continue;
      const double pz = (i > 0) ? std::pow(rz, static_cast<double>(i - 1)) : 0.0;
      const double pw = (j > 0) ? std::pow(rw, static_cast<double>(j - 1)) : 0.0;
      if (i > 0) bz += m * i * pz * std::pow(rw, static_cast<double>(j));
      if (j > 0) bw += m * j * std::pow(rz, static_cast<double>(i)) * pw;
    }
  return std::hypot(bz, bw);
}

cplx sylvester_determinant(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  const int n = static_cast<int>(a.size()) - 1;  // formal degree of a
  const int m = static_cast<int>(b.size()) - 1;
  if (n < 1 || m < 0) throw Error("resultant.invalid", "degenerate Sylvester block");
  const int size = n + m;
  if (size == 0) return 1.0;
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(size, size);
  // m rows of a's coefficients (descending), then n rows of b's.
  for (int r = 0; r < m; ++r)
    for (int k = 0; k <= n; ++k) s(r, r + k) = a[static_cast<size_t>(n - k)];
  for (int r = 0; r < n; ++r)
    for (int k = 0; k <= m; ++k) s(m + r, r + k) = b[static_cast<size_t>(m - k)];
  return Eigen::PartialPivLU<Eigen::MatrixXcd>(s).determinant();
}

Poly1 resultant_w(const Poly2& p, const Poly2& q) {
  const int n = p.deg_w();
  const int m = q.deg_w();
  if (n < 1 || m < 0)
    throw Error("resultant.invalid", "resultant needs positive w-degree");
  const int dz = p.deg_z() * m + q.deg_z() * n;  // degree bound in z
  const int nodes = dz + 1;
  const double radius = 1.0;

  std::vector<cplx> dets(static_cast<size_t>(nodes));
  for (int k = 0; k < nodes; ++k) {
    const double th = 2.0 * M_PI * k / nodes;
    const cplx z = radius * cplx(std::cos(th), std::sin(th));
    dets[k] = sylvester_determinant(p.coeffs_in_w_at(z).coef,
                                    q.coeffs_in_w_at(z).coef);
  }

  Poly1 out;
  out.coef.assign(static_cast<size_t>(nodes), 0.0);
  for (int c = 0; c < nodes; ++c) {
    cplx acc = 0;
    for (int k = 0; k < nodes; ++k) {
      const double th = -2.0 * M_PI * k * c / nodes;
      acc += dets[k] * cplx(std::cos(th), std::sin(th));
    }
    out.coef[c] = acc / (static_cast<double>(nodes) * std::pow(radius, c));
  }
  // Interpolation noise sits many orders below the determinant magnitude.
  double dmax = 0;
  for (cplx d : dets) dmax = std::max(dmax, std::abs(d));
  const double cut = std::max(dmax * 1e-10, 1e-300);
  for (cplx& c : out.coef)
    if (std::abs(c) <= cut) c = 0.0;
  return out.trimmed(0.0);
}

}  // namespace crosslab
