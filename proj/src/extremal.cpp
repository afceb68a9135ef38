#include "crosslab/extremal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

namespace crosslab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum CellClass : uint8_t { kOut = 0, kInterior = 1, kZero = 2, kCollar = 3 };

SolveParams normalize(const SolveParams& p, const Grid& grid) {
  SolveParams q = p;
  if (!(q.tol > 0)) throw Error("solver.invalid", "tol must be positive");
  if (q.relaxation < 1.0 || q.relaxation >= 2.0)
    throw Error("solver.invalid", "relaxation must lie in [1,2)");
  if (q.max_iter <= 0) q.max_iter = 200 * std::max(grid.nx, grid.ny);
  return q;
}

std::vector<uint8_t> classify(const Mask& omega, const Mask& a) {
  const Grid& g = omega.grid;
  std::vector<uint8_t> cls(static_cast<size_t>(g.count()), kOut);
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const int i = g.index(ix, iy);
      if (!omega.test(i)) continue;
      if (a.test(i)) {
        cls[i] = kZero;
        continue;
      }
      const bool edge = ix == 0 || ix == g.nx - 1 || iy == 0 || iy == g.ny - 1 ||
                        !omega.test(ix - 1, iy) || !omega.test(ix + 1, iy) ||
                        !omega.test(ix, iy - 1) || !omega.test(ix, iy + 1);
      cls[i] = edge ? kCollar : kInterior;
    }
  }
  return cls;
}

ScalarField build_field(const Grid& grid, const Mask& omega, const Mask& a,
                        const std::vector<uint8_t>& cls,
                        std::vector<double> values) {
  Mask interior{grid, std::vector<uint8_t>(cls.size(), 0)};
  for (size_t i = 0; i < cls.size(); ++i) {
    if (cls[i] == kOut)
      values[i] = kNaN;
    else if (cls[i] != kCollar)
      interior.flags[i] = 1;
  }
  return ScalarField{grid, omega, std::move(interior), a, std::move(values)};
}

}  // namespace

double optimal_relaxation(const Grid& grid) {
  const int n = std::max(grid.nx, grid.ny);
  const double w = 2.0 / (1.0 + std::sin(M_PI / n));
  return std::clamp(w, 1.5, 1.995);
}

double ScalarField::sample(cplx z) const {
  const double fx = (z.real() - grid.x0) / grid.sx();
  const double fy = (z.imag() - grid.y0) / grid.sy();
  if (fx < 0 || fy < 0 || fx > grid.nx - 1 || fy > grid.ny - 1) return kNaN;
  const int ix = std::min(static_cast<int>(fx), grid.nx - 2);
  const int iy = std::min(static_cast<int>(fy), grid.ny - 2);
  const double tx = fx - ix, ty = fy - iy;
  const int corners[4] = {grid.index(ix, iy), grid.index(ix + 1, iy),
                          grid.index(ix, iy + 1), grid.index(ix + 1, iy + 1)};
  const double wts[4] = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty,
                         tx * ty};
  bool all = true;
  for (int c : corners) all = all && domain.test(c);
  if (all) {
    double v = 0;
    for (int k = 0; k < 4; ++k) v += wts[k] * values[corners[k]];
    return v;
  }
  double best = kNaN, best_w = -1;
  for (int k = 0; k < 4; ++k)
    if (domain.test(corners[k]) && wts[k] > best_w) {
      best_w = wts[k];
      best = values[corners[k]];
    }
  return best;
}

double ScalarField::max_value() const {
  double m = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < values.size(); ++i)
    if (domain.flags[i]) m = std::max(m, values[i]);
  return m;
}

double ScalarField::min_value() const {
  double m = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < values.size(); ++i)
    if (domain.flags[i]) m = std::min(m, values[i]);
  return m;
}

void ScalarField::to_csv(std::ostream& os) const {
  os << grid.nx << "," << grid.ny << "," << fmt17(grid.x0) << ","
     << fmt17(grid.y0) << "," << fmt17(grid.x1) << "," << fmt17(grid.y1)
     << "\n";
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      if (ix) os << ",";
      const double v = at(ix, iy);
      if (std::isnan(v))
        os << "nan";
      else
        os << fmt17(v);
    }
    os << "\n";
  }
}

ScalarField ScalarField::from_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw Error("io.csv", "empty field csv");
  std::replace(line.begin(), line.end(), ',', ' ');
  std::istringstream hdr(line);
  int nx = 0, ny = 0;
  double x0, y0, x1, y1;
  if (!(hdr >> nx >> ny >> x0 >> y0 >> x1 >> y1))
    throw Error("io.csv", "bad field csv header");
  Grid grid = make_grid(x0, y0, x1, y1, nx, ny);
  std::vector<double> values(static_cast<size_t>(grid.count()), kNaN);
  Mask domain{grid, std::vector<uint8_t>(values.size(), 0)};
  for (int iy = 0; iy < ny; ++iy) {
    if (!std::getline(is, line))
      throw Error("io.csv", "field csv truncated");
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    for (int ix = 0; ix < nx; ++ix) {
      std::string tok;
      if (!(row >> tok)) throw Error("io.csv", "field csv row too short");
      const int i = grid.index(ix, iy);
      if (tok == "nan" || tok == "NaN" || tok == "NAN") continue;
      const double v = std::stod(tok);
      if (v < 0.0 || v > 1.0)
        throw Error("io.csv", "field value outside [0,1]");
      values[i] = v;
      domain.flags[i] = 1;
    }
  }
  // Loaded fields carry no solver classification: every defined point is
  // treated as interior and the zero set is unknown.
  Mask zero{grid, std::vector<uint8_t>(values.size(), 0)};
  return ScalarField{grid, domain, domain, zero, std::move(values)};
}

void ScalarField::to_pgm(std::ostream& os) const {
  os << "P2\n" << grid.nx << " " << grid.ny << "\n255\n";
  for (int iy = grid.ny - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      if (ix) os << " ";
      const double v = at(ix, iy);
      os << (std::isnan(v) ? 0 : static_cast<int>(std::lround(v * 255.0)));
    }
    os << "\n";
  }
}

SolveResult solve_relative_extremal(const Mask& omega_mask, const Mask& a_mask,
                                    const SolveParams& params_in) {
  if (!(omega_mask.grid == a_mask.grid))
    throw Error("geometry.grid_mismatch", "domain and A masks use different grids");
  const Grid& grid = omega_mask.grid;
  const SolveParams params = normalize(params_in, grid);
  if (a_mask.count() == 0) throw Error("solver.empty_a", "A is empty");
  if (!a_mask.is_subset_of(omega_mask))
    throw Error("solver.a_outside", "A must be contained in the domain mask");

  const std::vector<uint8_t> cls = classify(omega_mask, a_mask);
  const int nx = grid.nx;
  std::vector<double> v(cls.size(), 0.0);
  for (size_t i = 0; i < cls.size(); ++i)
    if (cls[i] == kInterior || cls[i] == kCollar) v[i] = 1.0;

  const double w = params.relaxation;
  double change = std::numeric_limits<double>::infinity();
  int iter = 0;
  for (iter = 1; iter <= params.max_iter; ++iter) {
    change = 0.0;
    for (int iy = 1; iy < grid.ny - 1; ++iy) {
      const int row = iy * nx;
      for (int ix = 1; ix < nx - 1; ++ix) {
        const int i = row + ix;
        if (cls[i] != kInterior) continue;
        const double mean =
            0.25 * (v[i - 1] + v[i + 1] + v[i - nx] + v[i + nx]);
        double u = v[i] + w * (mean - v[i]);
        // Complementarity form: the obstacle caps at 1, the solution is
        // bounded below by 0.
        if (u > 1.0) u = 1.0;
        if (u < 0.0) u = 0.0;
        const double d = std::fabs(u - v[i]);
        if (d > change) change = d;
        v[i] = u;
      }
    }
    if (change < params.tol) break;
  }
  if (change >= params.tol)
    throw Error("solver.no_converge",
                "relaxation did not converge: residual " + fmt17(change) +
                    " after " + std::to_string(params.max_iter) + " sweeps");

  return SolveResult{build_field(grid, omega_mask, a_mask, cls, std::move(v)),
                     iter, change};
}

ScalarField regularize_usc(const ScalarField& field) {
  const Grid& g = field.grid;
  ScalarField out = field;
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const int i = g.index(ix, iy);
      if (!field.domain.test(i)) continue;
      if (field.zero_set.test(i)) {
        out.values[i] = 0.0;
        continue;
      }
      double m = field.values[i];
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int jx = ix + dx, jy = iy + dy;
          if (jx < 0 || jy < 0 || jx >= g.nx || jy >= g.ny) continue;
          const int j = g.index(jx, jy);
          if (!field.domain.test(j) || field.zero_set.test(j)) continue;
          m = std::max(m, field.values[j]);
        }
      }
      out.values[i] = m;
    }
  }
  return out;
}

OmegaLimitResult omega_limit(const DomainSpec& omega, const SetSpec& a,
                             const Grid& grid, int k_max,
                             const SolveParams& params) {
  if (k_max < 2) throw Error("solver.invalid", "k_max must be at least 2");
  const Mask a_full = rasterize(a, grid);
  SolveParams sub = params;
  if (!(sub.tol > 0)) throw Error("solver.invalid", "tol must be positive");
  sub.tol = params.tol * 1e-3;

  std::optional<ScalarField> prev;
  std::optional<ScalarField> last;
  std::vector<OmegaLimitStep> steps;
  for (int k = 1; k <= k_max; ++k) {
    const DomainSpec omega_k = exhaustion(omega, k);
    const Mask om = rasterize(omega_k, grid);
    const Mask ak = mask_and(a_full, om);
    if (ak.count() == 0)
      throw Error("solver.empty_a",
                  "A does not meet the exhaustion domain at k=" + std::to_string(k));
    SolveResult sol = solve_relative_extremal(om, ak, sub);
    if (prev) {
      double max_inc = 0;
      long cnt = 0;
      for (size_t i = 0; i < sol.field.values.size(); ++i) {
        if (!prev->domain.flags[i] || !sol.field.domain.flags[i]) continue;
        const double d = sol.field.values[i] - prev->values[i];
        if (d > 0) {
          ++cnt;
          if (d > max_inc) max_inc = d;
        }
      }
      if (max_inc > 5.0 * params.tol)
        throw Error("solver.exhaustion_inconsistent",
                    "exhaustion inconsistency: increase " + fmt17(max_inc) +
                        " at k=" + std::to_string(k));
      steps.push_back({k, max_inc, cnt});
    }
    prev = sol.field;
    last = std::move(sol.field);
  }
  return OmegaLimitResult{std::move(*last), std::move(steps)};
}

McEstimate mc_exit_probability(cplx z, const DomainSpec& omega, const SetSpec& a,
                               long n, uint64_t seed, int jobs) {
  if (n < 100) throw Error("mc.invalid", "need at least 100 walks");
  if (!omega.contains(z) || a.contains(z))
    throw Error("mc.outside", "start point must lie in the domain and off A");
  const double capture = 1e-3 * omega.diameter();
  const int max_steps = 200000;

  const int64_t chunk = 1024;
  const int64_t n_chunks = (n + chunk - 1) / chunk;
  std::vector<long> exits(static_cast<size_t>(n_chunks), 0);
  std::vector<long> censored(static_cast<size_t>(n_chunks), 0);

  parallel_chunks(n, chunk, jobs, [&](int64_t begin, int64_t end) {
    const int64_t slot = begin / chunk;
    long ex = 0, cen = 0;
    for (int64_t t = begin; t < end; ++t) {
      SplitMix64 rng(hash_combine(seed, static_cast<uint64_t>(t)));
      cplx x = z;
      bool done = false;
      for (int step = 0; step < max_steps; ++step) {
        const double d_bound = omega.boundary_clearance(x);
        const double d_a = a.distance(x);
        const double r = std::min(d_bound, d_a);
        if (r < capture) {
          ex += d_bound <= d_a ? 1 : 0;
          done = true;
          break;
        }
        const double ang = 2.0 * M_PI * rng.uniform();
        x += cplx(r * std::cos(ang), r * std::sin(ang));
      }
      if (!done) ++cen;
    }
    exits[slot] = ex;
    censored[slot] = cen;
  });

  long total_exits = 0, total_censored = 0;
  for (int64_t c = 0; c < n_chunks; ++c) {
    total_exits += exits[c];
    total_censored += censored[c];
  }
  if (total_censored * 100 > n)
    throw Error("mc.censored", "more than 1% of walks hit the step cap");
  const long completed = n - total_censored;
  const double mean = static_cast<double>(total_exits) / completed;
  const double se = std::sqrt(std::max(mean * (1.0 - mean), 0.0) / completed);
  return McEstimate{mean, se, completed, seed};
}

ScalarField restrict_field(const ScalarField& fine, int factor) {
  if (factor < 1) throw Error("solver.invalid", "restriction factor must be >= 1");
  if (factor == 1) return fine;
  const Grid& fg = fine.grid;
  if ((fg.nx - 1) % factor != 0 || (fg.ny - 1) % factor != 0)
    throw Error("solver.invalid", "fine grid does not refine a coarse grid");
  const Grid cg = make_grid(fg.x0, fg.y0, fg.x1, fg.y1,
                            (fg.nx - 1) / factor + 1, (fg.ny - 1) / factor + 1);
  ScalarField out;
  out.grid = cg;
  const size_t nc = static_cast<size_t>(cg.count());
  out.domain = Mask{cg, std::vector<uint8_t>(nc, 0)};
  out.interior = Mask{cg, std::vector<uint8_t>(nc, 0)};
  out.zero_set = Mask{cg, std::vector<uint8_t>(nc, 0)};
  out.values.assign(nc, kNaN);
  for (int iy = 0; iy < cg.ny; ++iy) {
    for (int ix = 0; ix < cg.nx; ++ix) {
      const int ci = cg.index(ix, iy);
      const int fi = fg.index(ix * factor, iy * factor);
      out.domain.flags[ci] = fine.domain.flags[fi];
      out.interior.flags[ci] = fine.interior.flags[fi];
      out.zero_set.flags[ci] = fine.zero_set.flags[fi];
      out.values[ci] = fine.values[fi];
    }
  }
  return out;
}

SolveResult solve_condenser_field(const DomainSpec& omega, const SetSpec& a,
                                  const Grid& grid, const SolveParams& params,
                                  int refine) {
  if (refine < 1) throw Error("solver.invalid", "refine must be >= 1");
  const Grid fine = refine == 1
                        ? grid
                        : make_grid(grid.x0, grid.y0, grid.x1, grid.y1,
                                    (grid.nx - 1) * refine + 1,
                                    (grid.ny - 1) * refine + 1);
  const Mask om = rasterize(omega, fine);
  // Closed A may poke past the open domain by a boundary cell; clip.
  const Mask ak = mask_and(rasterize(a, fine), om);
  if (ak.count() == 0) throw Error("solver.empty_a", "A is empty on this grid");
  SolveResult sol = solve_relative_extremal(om, ak, params);
  if (refine > 1) sol.field = restrict_field(sol.field, refine);
  return sol;
}

}  // namespace crosslab
