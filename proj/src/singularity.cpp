#include "crosslab/singularity.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>

namespace crosslab {

namespace {

// Pads coefficient rows to a common length and drops all-zero trailing rows
// and columns, keeping at least a 1x1 matrix.
Poly2 normalized(Poly2 p) {
  size_t cols = 1;
  for (const auto& row : p.coef) cols = std::max(cols, row.size());
  if (p.coef.empty()) p.coef.push_back({});
  for (auto& row : p.coef) row.resize(cols, 0.0);
  auto row_zero = [&](size_t i) {
    for (const cplx& c : p.coef[i])
      if (c != cplx{0.0}) return false;
    return true;
  };
  while (p.coef.size() > 1 && row_zero(p.coef.size() - 1)) p.coef.pop_back();
  auto col_zero = [&](size_t j) {
    for (const auto& row : p.coef)
      if (row[j] != cplx{0.0}) return false;
    return true;
  };
  while (cols > 1 && col_zero(cols - 1)) {
    --cols;
    for (auto& row : p.coef) row.pop_back();
  }
  return p;
}

std::vector<FiberRoot> to_fiber_roots(const std::vector<cplx>& values) {
  std::vector<FiberRoot> out;
  for (const RootCluster& c : cluster_roots(values))
    out.push_back({c.value, c.multiplicity});
  return out;
}

}  // namespace

SingularSet SingularSet::polynomial(Poly2 p) {
  SingularSet s;
  s.is_poly_ = true;
  s.poly_ = normalized(std::move(p));
  if (s.poly_.is_zero())
    throw Error("singularity.invalid", "P must not vanish identically");
  return s;
}

SingularSet SingularSet::graphs(std::vector<Poly1> phi) {
  if (phi.empty()) throw Error("singularity.invalid", "graph list is empty");
  for (size_t i = 0; i < phi.size(); ++i) {
    for (size_t j = i + 1; j < phi.size(); ++j) {
      const size_t n = std::max(phi[i].coef.size(), phi[j].coef.size());
      double diff = 0;
      for (size_t k = 0; k < n; ++k) {
        const cplx a = k < phi[i].coef.size() ? phi[i].coef[k] : cplx{0.0};
        const cplx b = k < phi[j].coef.size() ? phi[j].coef[k] : cplx{0.0};
        diff = std::max(diff, std::abs(a - b));
      }
      if (diff <= 1e-12 * (1.0 + std::max(phi[i].scale(), phi[j].scale())))
        throw Error("singularity.invalid", "graphs must be pairwise distinct");
    }
  }
  SingularSet s;
  s.is_poly_ = false;
  s.graphs_ = std::move(phi);
  return s;
}

const Poly2& SingularSet::poly() const {
  if (!is_poly_)
    throw Error("singularity.form", "singular set is in graph form");
  return poly_;
}

const std::vector<Poly1>& SingularSet::graph_list() const {
  if (is_poly_)
    throw Error("singularity.form", "singular set is in polynomial form");
  return graphs_;
}

Poly2 SingularSet::to_polynomial() const {
  if (is_poly_) return poly_;
  Poly2 prod = Poly2::constant(1.0);
  for (const Poly1& phi : graphs_) {
    Poly2 factor;  // w - phi(z)
    factor.coef.assign(std::max<size_t>(phi.coef.size(), 1),
                       std::vector<cplx>(2, 0.0));
    for (size_t i = 0; i < phi.coef.size(); ++i) factor.coef[i][0] = -phi.coef[i];
    factor.coef[0][1] = 1.0;
    prod = prod.mul(factor);
  }
  return normalized(prod);
}

FiberResult fiber_w(const SingularSet& m, cplx z) {
  FiberResult out;
  if (m.is_polynomial()) {
    const Poly2& p = m.poly();
    const Poly1 slice = p.coeffs_in_w_at(z);
    const double local_scale =
        p.scale() * std::pow(std::max(1.0, std::abs(z)), p.deg_z());
    if (slice.scale() <= 1e-12 * local_scale) {
      out.degenerate = true;
      return out;
    }
    out.roots = to_fiber_roots(poly_roots(slice.trimmed(1e-12 * local_scale /
                                                        std::max(slice.scale(), 1e-300))));
    return out;
  }
  std::vector<cplx> values;
  for (const Poly1& phi : m.graph_list()) values.push_back(phi.eval(z));
  out.roots = to_fiber_roots(values);
  return out;
}

FiberResult fiber_z(const SingularSet& m, cplx w) {
  FiberResult out;
  if (m.is_polynomial()) {
    return fiber_w(SingularSet::polynomial(m.poly().swapped()), w);
  }
  std::vector<cplx> values;
  for (const Poly1& phi : m.graph_list()) {
    Poly1 shifted = phi;
    if (shifted.coef.empty()) shifted.coef.push_back(0.0);
    shifted.coef[0] -= w;
    if (shifted.scale() <= 1e-12 * (1.0 + std::abs(w))) {
      out.degenerate = true;  // constant graph equal to w
      return out;
    }
    for (cplx r : poly_roots(shifted.trimmed())) values.push_back(r);
  }
  out.roots = to_fiber_roots(values);
  return out;
}

namespace {

// Discriminant-style product over one fiber's distinct roots; vanishes iff
// the monic square-free slice has a repeated root.
cplx pairwise_product(const std::vector<cplx>& roots) {
  cplx v = 1.0;
  for (size_t i = 0; i < roots.size(); ++i)
    for (size_t j = i + 1; j < roots.size(); ++j) {
      const cplx d = roots[i] - roots[j];
      v *= d * d;
    }
  return v;
}

// Joint Newton refinement of a branch point: drives (P, dP/dw) to zero from
// the resultant root and the midpoint of the closest fiber root pair.  The
// resultant root alone carries O(1e-12) error, which a square-root branch
// magnifies to O(1e-6) fiber separation; the 2x2 Newton removes it.
cplx polish_branch_point(const Poly2& p, cplx z0) {
  std::vector<cplx> roots;
  try {
    roots = poly_roots(p.coeffs_in_w_at(z0).trimmed(1e-10));
  } catch (const Error&) {
    return z0;
  }
  if (roots.size() < 2) return z0;
  double best = std::numeric_limits<double>::infinity();
  cplx w = 0;
  for (size_t i = 0; i < roots.size(); ++i)
    for (size_t j = i + 1; j < roots.size(); ++j)
      if (std::abs(roots[i] - roots[j]) < best) {
        best = std::abs(roots[i] - roots[j]);
        w = 0.5 * (roots[i] + roots[j]);
      }

  const Poly2 pz = p.d_dz();
  const Poly2 pw = p.d_dw();
  const Poly2 pwz = pw.d_dz();
  const Poly2 pww = pw.d_dw();
  cplx z = z0;
  for (int it = 0; it < 8; ++it) {
    const cplx f0 = p.eval(z, w);
    const cplx f1 = pw.eval(z, w);
    const cplx a = pz.eval(z, w), b = pw.eval(z, w);
    const cplx c = pwz.eval(z, w), d = pww.eval(z, w);
    const cplx det = a * d - b * c;
    if (std::abs(det) < 1e-250) break;
    const cplx step_z = (f0 * d - f1 * b) / det;
    const cplx step_w = (a * f1 - c * f0) / det;
    if (!std::isfinite(step_z.real()) || !std::isfinite(step_z.imag()) ||
        !std::isfinite(step_w.real()) || !std::isfinite(step_w.imag()))
      break;
    z -= step_z;
    w -= step_w;
    if (std::abs(step_z) + std::abs(step_w) < 1e-15 * (1.0 + std::abs(z))) break;
  }
  if (std::abs(z - z0) > 1e-3 * (1.0 + std::abs(z0))) return z0;
  return z;
}

std::vector<cplx> locus_from_square_free(const Poly2& p,
                                         std::vector<int>* multiplicities) {
  const int dz = std::max(p.deg_z(), 1);
  const int dw = p.deg_w();
  const int bound = dz * (2 * dw - 1);
  const int nodes = bound + 1;

  struct NodeData {
    cplx z;
    std::vector<cplx> distinct;
    std::vector<int> pattern;
  };
  std::vector<NodeData> data;
  std::map<int, int> degree_votes;
  for (int k = 0; k < nodes; ++k) {
    const double th = 2.0 * M_PI * k / nodes;
    const cplx z{std::cos(th), std::sin(th)};
    const Poly1 slice = p.coeffs_in_w_at(z).trimmed(1e-10);
    NodeData nd;
    nd.z = z;
    std::vector<int> pat;
    for (const RootCluster& c : cluster_roots(poly_roots(slice), 1e-6)) {
      nd.distinct.push_back(c.value);
      pat.push_back(c.multiplicity);
    }
    std::sort(pat.rbegin(), pat.rend());
    nd.pattern = pat;
    degree_votes[static_cast<int>(nd.distinct.size())]++;
    data.push_back(std::move(nd));
  }
  int modal = 0, best = 0;
  for (auto [deg, votes] : degree_votes)
    if (votes > best) {
      best = votes;
      modal = deg;
    }
  if (modal < 1 || best < (dz * (2 * modal - 1) + 1))
    throw Error("singularity.resultant",
                "could not stabilize the square-free resultant");

  std::vector<cplx> zs, vals;
  for (const NodeData& nd : data) {
    if (static_cast<int>(nd.distinct.size()) != modal) continue;
    zs.push_back(nd.z);
    vals.push_back(pairwise_product(nd.distinct));
    if (multiplicities && multiplicities->empty()) *multiplicities = nd.pattern;
  }

  const int fit_deg = dz * (2 * modal - 1);
  const int cols = fit_deg + 1;
  Eigen::MatrixXcd vm(zs.size(), cols);
  Eigen::VectorXcd rhs(zs.size());
  for (size_t r = 0; r < zs.size(); ++r) {
    cplx pw = 1.0;
    for (int c = 0; c < cols; ++c) {
      vm(static_cast<Eigen::Index>(r), c) = pw;
      pw *= zs[r];
    }
    rhs(static_cast<Eigen::Index>(r)) = vals[r];
  }
  Eigen::VectorXcd sol = vm.colPivHouseholderQr().solve(rhs);
  double vmax = 0;
  for (const cplx& v : vals) vmax = std::max(vmax, std::abs(v));
  const double resid = (vm * sol - rhs).cwiseAbs().maxCoeff();
  if (resid > 1e-7 * std::max(vmax, 1.0))
    throw Error("singularity.resultant",
                "could not stabilize the square-free resultant");

  Poly1 disc;
  for (int c = 0; c < cols; ++c) disc.coef.push_back(sol(c));
  disc = disc.trimmed(1e-9);
  if (disc.degree() < 1) return {};
  return poly_roots(disc);
}

}  // namespace

BranchLocusResult branch_locus(const SingularSet& m) {
  if (!m.is_polynomial())
    throw Error("singularity.form",
                "branch locus needs polynomial form; expand graphs first");
  const Poly2& p = m.poly();
  const int dw = p.deg_w();
  if (dw < 1)
    throw Error("singularity.invalid", "branch locus needs w-degree >= 1");

  BranchLocusResult out;
  std::vector<cplx> candidates;

  const Poly2 pw = p.d_dw();
  if (dw == 1) {
    // dP/dw never vanishes jointly with P unless the leading coefficient does.
  } else {
    const Poly1 res = resultant_w(p, pw);
    const double scale_est = std::pow(std::max(1.0, p.scale()), pw.deg_w()) *
                             std::pow(std::max(1.0, pw.scale()), dw);
    if (res.scale() <= 1e-10 * scale_est) {
      out.used_square_free_part = true;
      candidates = locus_from_square_free(p, &out.generic_multiplicities);
    } else if (res.degree() >= 1) {
      for (cplx z : poly_roots(res)) candidates.push_back(polish_branch_point(p, z));
    }
  }

  // Fibers collapse where the leading w-coefficient vanishes.
  Poly1 lead;
  for (const auto& row : p.coef) lead.coef.push_back(row[static_cast<size_t>(dw)]);
  lead = lead.trimmed(1e-12);
  if (lead.degree() >= 1)
    for (cplx r : poly_roots(lead)) candidates.push_back(r);

  for (const RootCluster& c : cluster_roots(candidates, 1e-9))
    out.points.push_back(c.value);
  return out;
}

ProductMask envelope_trace(const SingularSet& m, const ProductMask& env,
                           int jobs) {
  if (env.count() == 0)
    throw Error("mask.empty", "envelope trace needs a nonempty envelope");
  const Grid& gz = env.grid_z();
  const Grid& gw = env.grid_w();
  const double half_z = 0.5 * std::hypot(gz.sx(), gz.sy());
  const double half_w = 0.5 * std::hypot(gw.sx(), gw.sy());
  const double rho = std::hypot(half_z, half_w);

  const double rz = std::hypot(std::max(std::fabs(gz.x0), std::fabs(gz.x1)),
                               std::max(std::fabs(gz.y0), std::fabs(gz.y1))) +
                    half_z;
  const double rw = std::hypot(std::max(std::fabs(gw.x0), std::fabs(gw.x1)),
                               std::max(std::fabs(gw.y0), std::fabs(gw.y1))) +
                    half_w;

  ProductMask out(gz, gw);
  const int nz = env.nz();
  const int nw = env.nw();

  if (m.is_polynomial()) {
    const Poly2& p = m.poly();
    const double lip = p.gradient_bound(rz, rw) + 1e-12;
    std::vector<Poly1> slices(static_cast<size_t>(nz));
    for (int iz = 0; iz < nz; ++iz)
      slices[iz] = p.coeffs_in_w_at(gz.point(iz % gz.nx, iz / gz.nx));
    parallel_chunks(nw, 16, jobs, [&](int64_t begin, int64_t end) {
      for (int64_t iw = begin; iw < end; ++iw) {
        const cplx w = gw.point(static_cast<int>(iw) % gw.nx,
                                static_cast<int>(iw) / gw.nx);
        for (int iz = 0; iz < nz; ++iz) {
          if (!env.test(iz, static_cast<int>(iw))) continue;
          if (std::abs(slices[iz].eval(w)) <= lip * rho)
            out.set(iz, static_cast<int>(iw));
        }
      }
    });
    return out;
  }

  const std::vector<Poly1>& graphs = m.graph_list();
  std::vector<double> lip(graphs.size());
  for (size_t j = 0; j < graphs.size(); ++j) {
    double b = 0;
    const Poly1 d = graphs[j].derivative();
    for (size_t k = 0; k < d.coef.size(); ++k)
      b += std::abs(d.coef[k]) * std::pow(rz, static_cast<double>(k));
    lip[j] = b;
  }
  std::vector<std::vector<cplx>> values(static_cast<size_t>(nz));
  for (int iz = 0; iz < nz; ++iz) {
    const cplx z = gz.point(iz % gz.nx, iz / gz.nx);
    for (const Poly1& phi : graphs) values[iz].push_back(phi.eval(z));
  }
  parallel_chunks(nw, 16, jobs, [&](int64_t begin, int64_t end) {
    for (int64_t iw = begin; iw < end; ++iw) {
      const cplx w = gw.point(static_cast<int>(iw) % gw.nx,
                              static_cast<int>(iw) / gw.nx);
      for (int iz = 0; iz < nz; ++iz) {
        if (!env.test(iz, static_cast<int>(iw))) continue;
        for (size_t j = 0; j < graphs.size(); ++j) {
          if (std::abs(w - values[iz][j]) <= (1.0 + lip[j]) * rho) {
            out.set(iz, static_cast<int>(iw));
            break;
          }
        }
      }
    }
  });
  return out;
}

namespace {

// Points of the probed set over a fixed z: polynomial fibers, or branch
// coincidences for multi-graph sets.  `hits_everything` marks degenerate
// slices.
struct ProbeFiber {
  std::vector<cplx> values;
  bool hits_everything = false;
};

ProbeFiber probe_fiber(const SingularSet& m, cplx z) {
  ProbeFiber out;
  if (m.is_polynomial() || m.graph_list().size() == 1) {
    const FiberResult f = fiber_w(m, z);
    out.hits_everything = f.degenerate;
    for (const FiberRoot& r : f.roots) out.values.push_back(r.value);
    return out;
  }
  const std::vector<Poly1>& graphs = m.graph_list();
  std::vector<cplx> vals;
  for (const Poly1& phi : graphs) vals.push_back(phi.eval(z));
  for (size_t i = 0; i < vals.size(); ++i)
    for (size_t j = i + 1; j < vals.size(); ++j)
      if (std::abs(vals[i] - vals[j]) <= 1e-8 * (1.0 + std::abs(vals[i])))
        out.values.push_back(vals[i]);
  return out;
}

}  // namespace

IsolationResult is_isolated_point(const SingularSet& m, cplx a, cplx b,
                                  double delta, double eps) {
  if (!(delta > 0) || !(eps > 0))
    throw Error("singularity.invalid", "bidisc radii must be positive");

  const ProbeFiber center = probe_fiber(m, a);
  bool center_hit = center.hits_everything;
  for (cplx v : center.values)
    if (std::abs(v - b) <= std::max(1e-6 * (1.0 + std::abs(b)), 1e-12))
      center_hit = true;

  bool probe_hit = false;
  const double radii[4] = {delta, delta * 0.5, delta * 0.25, delta * 0.125};
  for (double r : radii) {
    for (int k = 0; k < 16 && !probe_hit; ++k) {
      const double th = 2.0 * M_PI * (k + 0.5) / 16.0;
      const cplx z = a + cplx(r * std::cos(th), r * std::sin(th));
      const ProbeFiber f = probe_fiber(m, z);
      if (f.hits_everything) {
        probe_hit = true;
        break;
      }
      for (cplx v : f.values)
        if (std::abs(v - b) <= eps) {
          probe_hit = true;
          break;
        }
    }
    if (probe_hit) break;
  }

  if (probe_hit) return {false, false};
  if (center_hit) return {true, false};
  return {false, true};
}

}  // namespace crosslab
