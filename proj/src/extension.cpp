#include "crosslab/extension.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace crosslab {

namespace {

cplx pow_int(cplx base, int n) {
  cplx v = 1.0;
  for (int k = 0; k < n; ++k) v *= base;
  return v;
}

constexpr double kWeightFloor = 1e-6;
constexpr double kConditionLimit = 1e12;

// Low-discrepancy point stream over a planar set: Halton pairs mapped to the
// bounding box with rejection.
class SetSampler {
 public:
  SetSampler(BoundingBox box, std::function<bool(cplx)> member, uint64_t seed,
             uint32_t base_x, uint32_t base_y)
      : box_(box), member_(std::move(member)),
        index_(1 + (seed % 100003) * 8191) {
    base_x_ = base_x;
    base_y_ = base_y;
  }

  // Throws after `budget` rejected candidates in a row.
  cplx next(long budget) {
    for (long attempt = 0; attempt < budget; ++attempt) {
      const double u = halton(index_, base_x_);
      const double v = halton(index_, base_y_);
      ++index_;
      const cplx z{box_.x0 + (box_.x1 - box_.x0) * u,
                   box_.y0 + (box_.y1 - box_.y0) * v};
      if (member_(z)) return z;
    }
    throw Error("sample.infeasible", "could not draw a point from the set");
  }

 private:
  BoundingBox box_;
  std::function<bool(cplx)> member_;
  uint64_t index_;
  uint32_t base_x_, base_y_;
};

double resolve_clearance_abs(double clearance, double fallback_factor,
                             const Poly2& p) {
  const double factor = clearance >= 0 ? clearance : fallback_factor;
  return factor * std::max(p.scale(), 1e-300);
}

}  // namespace

cplx GroundTruth::eval(cplx z, cplx w) const {
  const cplx n = numerator.eval(z, w);
  if (pole_order == 0) return n;
  return n / pow_int(denominator_base.eval(z, w), pole_order);
}

cplx RationalApproximant::eval(cplx z, cplx w) const {
  const cplx n = numerator.eval(z, w);
  if (m == 0) return n;
  return n / pow_int(denominator_base.eval(z, w), m);
}

double default_clearance(const Cross& cross) {
  return 0.05 * std::hypot(cross.d.diameter(), cross.g.diameter());
}

SampleSet sample_cross(const GroundTruth& f, const Cross& cross,
                       const SingularSet& m, const SampleStrategy& strategy) {
  const Poly2 p = m.to_polynomial();
  const double clr = resolve_clearance_abs(strategy.clearance,
                                           default_clearance(cross), p);
  SampleSet out;
  const long budget = 4000 + 2000L * (strategy.count_ab + strategy.count_db);
  long attempts = 0;
  auto spend = [&](long n) {
    attempts += n;
    if (attempts > budget)
      throw Error("sample.infeasible",
                  "sampling budget exhausted; sets too thin or clearance too large");
  };

  // A x G branch: z from A (or the atom hook), w from G.
  SetSampler sample_a(cross.a.bounding_box(),
                      [&](cplx z) { return cross.a.contains(z); },
                      hash_combine(strategy.seed, 11), 2, 3);
  SetSampler sample_g(cross.g.bounding_box(),
                      [&](cplx z) { return cross.g.contains(z); },
                      hash_combine(strategy.seed, 13), 5, 7);
  size_t atom_cursor = 0;
  while (static_cast<int>(out.size()) <
         strategy.count_ab) {
    spend(1);
    cplx z;
    if (!strategy.z_atoms.empty()) {
      z = strategy.z_atoms[atom_cursor++ % strategy.z_atoms.size()];
    } else {
      z = sample_a.next(budget);
    }
    if (fiber_w(m, z).degenerate) continue;  // the whole slice lies in M
    const cplx w = sample_g.next(budget);
    if (std::abs(p.eval(z, w)) < clr) continue;
    out.z.push_back(z);
    out.w.push_back(w);
    out.value.push_back(f.eval(z, w));
    out.branch.push_back(Branch::a_times_g);
  }

  // D x B branch: z from D, w from B.
  SetSampler sample_d(cross.d.bounding_box(),
                      [&](cplx z) { return cross.d.contains(z); },
                      hash_combine(strategy.seed, 17), 2, 3);
  SetSampler sample_b(cross.b.bounding_box(),
                      [&](cplx z) { return cross.b.contains(z); },
                      hash_combine(strategy.seed, 19), 5, 7);
  const size_t target = out.size() + static_cast<size_t>(strategy.count_db);
  while (out.size() < target) {
    spend(1);
    const cplx w = sample_b.next(budget);
    if (fiber_z(m, w).degenerate) continue;
    const cplx z = sample_d.next(budget);
    if (std::abs(p.eval(z, w)) < clr) continue;
    out.z.push_back(z);
    out.w.push_back(w);
    out.value.push_back(f.eval(z, w));
    out.branch.push_back(Branch::d_times_b);
  }
  return out;
}

RationalApproximant fit_rational(const SampleSet& samples, const SingularSet& p_in,
                                 int m, int deg_z, int deg_w) {
  if (m < 0 || deg_z < 0 || deg_w < 0)
    throw Error("fit.invalid", "degrees and the pole power must be nonnegative");
  const Poly2 p = p_in.to_polynomial();
  const long n = static_cast<long>(samples.size());
  const int cols = (deg_z + 1) * (deg_w + 1);
  if (n < 2L * cols)
    throw Error("fit.too_few_samples",
                "need at least twice as many samples as coefficients");

  Eigen::MatrixXcd design(n, cols);
  Eigen::VectorXcd rhs(n);
  for (long i = 0; i < n; ++i) {
    const cplx z = samples.z[static_cast<size_t>(i)];
    const cplx w = samples.w[static_cast<size_t>(i)];
    const cplx pm = pow_int(p.eval(z, w), m);
    const double wgt = 1.0 / std::max(std::abs(pm), kWeightFloor);
    cplx zp = 1.0;
    for (int a = 0; a <= deg_z; ++a) {
      cplx wp = 1.0;
      for (int b = 0; b <= deg_w; ++b) {
        design(i, a * (deg_w + 1) + b) = zp * wp * wgt;
        wp *= w;
      }
      zp *= z;
    }
    rhs(i) = samples.value[static_cast<size_t>(i)] * pm * wgt;
  }

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(design,
                                         Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  const double cond = smin > 0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!std::isfinite(cond) || cond > kConditionLimit)
    throw Error("fit.rank_deficient", "sampling insufficient for degrees");
  const Eigen::VectorXcd coef = svd.solve(rhs);

  RationalApproximant out;
  out.numerator.coef.assign(static_cast<size_t>(deg_z) + 1,
                            std::vector<cplx>(static_cast<size_t>(deg_w) + 1, 0.0));
  for (int a = 0; a <= deg_z; ++a)
    for (int b = 0; b <= deg_w; ++b)
      out.numerator.coef[a][b] = coef(a * (deg_w + 1) + b);
  out.denominator_base = p;
  out.m = m;
  out.conditioning = cond;
  return out;
}

namespace {

struct DrawnPoint {
  cplx z, w;
};

// Uniform draws over the flagged cells of `usable` with |P| above the cut.
std::vector<DrawnPoint> draw_test_points(const ProductMask& usable,
                                         const Poly2& p, double clearance_abs,
                                         long n_test, uint64_t seed,
                                         const char* empty_code) {
  const uint64_t pairs = usable.pairs();
  if (usable.count() == 0) throw Error(empty_code, "no usable cells");
  const Grid& gz = usable.grid_z();
  const Grid& gw = usable.grid_w();
  const int nz = usable.nz();

  SplitMix64 rng(hash_combine(seed, 0xabcdefull));
  std::vector<DrawnPoint> pts;
  const long max_attempts = 400 * std::max(n_test, 1L);
  for (long attempt = 0; attempt < max_attempts &&
                         static_cast<long>(pts.size()) < n_test;
       ++attempt) {
    const uint64_t pair = rng.next() % pairs;
    const int iz = static_cast<int>(pair % static_cast<uint64_t>(nz));
    const int iw = static_cast<int>(pair / static_cast<uint64_t>(nz));
    if (!usable.test(iz, iw)) continue;
    const cplx z = gz.point(iz % gz.nx, iz / gz.nx);
    const cplx w = gw.point(iw % gw.nx, iw / gw.nx);
    if (std::abs(p.eval(z, w)) < clearance_abs) continue;
    pts.push_back({z, w});
  }
  return pts;
}

}  // namespace

ErrorReport verify_extension(const RationalApproximant& approx,
                             const GroundTruth& f, const ProductMask& env,
                             const ProductMask& trace, long n_test,
                             uint64_t seed, double clearance) {
  if (n_test < 100) throw Error("verify.invalid", "need at least 100 test points");
  if (env.count() == 0) throw Error("mask.empty", "empty envelope");
  const ProductMask usable = env.minus(trace);
  const double diag = std::hypot(env.grid_z().x1 - env.grid_z().x0,
                                 env.grid_w().x1 - env.grid_w().x0);
  const double clr =
      resolve_clearance_abs(clearance, 0.05 * diag, approx.denominator_base);
  const std::vector<DrawnPoint> pts = draw_test_points(
      usable, approx.denominator_base, clr, n_test, seed, "verify.too_few_points");
  if (static_cast<long>(pts.size()) < n_test / 2)
    throw Error("verify.too_few_points",
                "fewer than half of the requested test points were usable");

  ErrorReport report;
  report.n_test_points = static_cast<long>(pts.size());
  report.region = "envelope minus singular trace";
  double sum = 0;
  for (const DrawnPoint& pt : pts) {
    const cplx truth = f.eval(pt.z, pt.w);
    const double rel =
        std::abs(approx.eval(pt.z, pt.w) - truth) / (1.0 + std::abs(truth));
    report.max_rel_error = std::max(report.max_rel_error, rel);
    sum += rel;
  }
  report.mean_rel_error = sum / static_cast<double>(pts.size());
  return report;
}

double uniqueness_residual(const Cross& cross, const SingularSet& m, int p_power,
                           int deg_z, int deg_w, const SampleStrategy& strategy) {
  const Poly2 p = m.to_polynomial();
  const double clr =
      resolve_clearance_abs(strategy.clearance, default_clearance(cross), p);

  SampleSet samples;
  SetSampler sample_a(cross.a.bounding_box(),
                      [&](cplx z) { return cross.a.contains(z); },
                      hash_combine(strategy.seed, 23), 2, 3);
  SetSampler sample_b(cross.b.bounding_box(),
                      [&](cplx z) { return cross.b.contains(z); },
                      hash_combine(strategy.seed, 29), 5, 7);
  const long budget = 4000 + 2000L * strategy.count_ab;
  long attempts = 0;
  size_t atom_cursor = 0;
  while (static_cast<int>(samples.size()) < strategy.count_ab) {
    if (++attempts > budget)
      throw Error("sample.infeasible", "could not sample A x B off M");
    cplx z;
    if (!strategy.z_atoms.empty())
      z = strategy.z_atoms[atom_cursor++ % strategy.z_atoms.size()];
    else
      z = sample_a.next(budget);
    const cplx w = sample_b.next(budget);
    if (std::abs(p.eval(z, w)) < clr) continue;
    samples.z.push_back(z);
    samples.w.push_back(w);
    samples.value.push_back(0.0);
    samples.branch.push_back(Branch::a_times_g);
  }

  try {
    const RationalApproximant fit = fit_rational(samples, m, p_power, deg_z, deg_w);
    return fit.numerator.scale();
  } catch (const Error& e) {
    if (e.code() == "fit.rank_deficient")
      return std::numeric_limits<double>::infinity();
    throw;
  }
}

cplx cauchy_reconstruct(const std::function<cplx(cplx, cplx)>& f, cplx center_z,
                        cplx center_w, double delta, double eps, int n_quad) {
  if (n_quad < 32) throw Error("cauchy.invalid", "need n_quad >= 32");
  if (!(delta > 0) || !(eps > 0))
    throw Error("cauchy.invalid", "radii must be positive");
  // The iterated Cauchy integral over the torus reduces to the plain node
  // average once the kernel is absorbed by the parametrization.
  auto average = [&](int n) {
    cplx sum = 0;
    for (int j = 0; j < n; ++j) {
      const double a = 2.0 * M_PI * j / n;
      const cplx z = center_z + cplx(delta * std::cos(a), delta * std::sin(a));
      for (int k = 0; k < n; ++k) {
        const double b = 2.0 * M_PI * k / n;
        const cplx w = center_w + cplx(eps * std::cos(b), eps * std::sin(b));
        sum += f(z, w);
      }
    }
    return sum / static_cast<double>(static_cast<int64_t>(n) * n);
  };
  const cplx coarse = average(n_quad);
  const cplx fine = average(2 * n_quad);
  if (std::abs(fine - coarse) > 1e-6)
    throw Error("cauchy.no_converge",
                "doubling the quadrature changed the value by " +
                    fmt17(std::abs(fine - coarse)));
  return fine;
}

double local_overlap_consistency(const RationalApproximant& fit1,
                                 const RationalApproximant& fit2,
                                 const ProductMask& overlap, long n_test,
                                 uint64_t seed, double clearance) {
  if (fit1.m != fit2.m)
    throw Error("overlap.denominator_mismatch", "fits use different pole powers");
  const Poly2& p1 = fit1.denominator_base;
  const Poly2& p2 = fit2.denominator_base;
  if (p1.deg_z() != p2.deg_z() || p1.deg_w() != p2.deg_w())
    throw Error("overlap.denominator_mismatch", "fits use different denominators");
  for (size_t i = 0; i < p1.coef.size(); ++i)
    for (size_t j = 0; j < p1.coef[i].size(); ++j)
      if (p1.coef[i][j] != p2.coef[i][j])
        throw Error("overlap.denominator_mismatch",
                    "fits use different denominators");

  const double diag = std::hypot(overlap.grid_z().x1 - overlap.grid_z().x0,
                                 overlap.grid_w().x1 - overlap.grid_w().x0);
  const double clr = resolve_clearance_abs(clearance, 0.05 * diag, p1);
  const std::vector<DrawnPoint> pts =
      draw_test_points(overlap, p1, clr, n_test, seed, "overlap.empty");
  if (pts.empty()) throw Error("overlap.empty", "no usable overlap points");

  double worst = 0;
  for (const DrawnPoint& pt : pts) {
    const cplx v1 = fit1.eval(pt.z, pt.w);
    const cplx v2 = fit2.eval(pt.z, pt.w);
    worst = std::max(worst, std::abs(v1 - v2) / (1.0 + std::abs(v1)));
  }
  return worst;
}

}  // namespace crosslab
