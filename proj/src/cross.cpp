#include "crosslab/cross.hpp"

#include <bit>
#include <ostream>

namespace crosslab {

bool cross_membership(const Cross& cross, cplx z, cplx w) {
  return (cross.d.contains(z) && cross.b.contains(w)) ||
         (cross.a.contains(z) && cross.g.contains(w));
}

ProductMask::ProductMask(const Grid& grid_z, const Grid& grid_w)
    : gz_(grid_z), gw_(grid_w), nz_(grid_z.count()), nw_(grid_w.count()) {
  wpr_ = (static_cast<size_t>(nz_) + 63) / 64;
  const uint64_t words = wpr_ * static_cast<uint64_t>(nw_);
  if (words > (uint64_t{1} << 27))
    throw Error("mask.too_large", "product mask exceeds the memory ceiling");
  bits_.assign(words, 0);
}

uint64_t ProductMask::count() const {
  uint64_t n = 0;
  for (uint64_t w : bits_) n += std::popcount(w);
  return n;
}

ProductMask ProductMask::intersect(const ProductMask& other) const {
  if (!(gz_ == other.gz_) || !(gw_ == other.gw_))
    throw Error("geometry.grid_mismatch", "product masks use different grids");
  ProductMask out = *this;
  for (size_t i = 0; i < bits_.size(); ++i) out.bits_[i] &= other.bits_[i];
  return out;
}

ProductMask ProductMask::minus(const ProductMask& other) const {
  if (!(gz_ == other.gz_) || !(gw_ == other.gw_))
    throw Error("geometry.grid_mismatch", "product masks use different grids");
  ProductMask out = *this;
  for (size_t i = 0; i < bits_.size(); ++i) out.bits_[i] &= ~other.bits_[i];
  return out;
}

void ProductMask::to_rle_csv(std::ostream& os) const {
  os << nz_ << "," << nw_ << "\n";
  for (int iw = 0; iw < nw_; ++iw) {
    os << iw;
    int run = 0;
    bool cur = false;  // runs start counting zeros
    for (int iz = 0; iz < nz_; ++iz) {
      const bool bit = test(iz, iw);
      if (bit == cur) {
        ++run;
      } else {
        os << "," << run;
        cur = bit;
        run = 1;
      }
    }
    os << "," << run << "\n";
  }
}

ProductMask envelope_mask(const ScalarField& omega_a, const ScalarField& omega_b,
                          int jobs) {
  ProductMask out(omega_a.grid, omega_b.grid);
  const int nz = out.nz();
  const int nw = out.nw();
  parallel_chunks(nw, 16, jobs, [&](int64_t begin, int64_t end) {
    for (int64_t iw = begin; iw < end; ++iw) {
      if (!omega_b.interior.test(static_cast<int>(iw))) continue;
      const double vb = omega_b.values[static_cast<size_t>(iw)];
      uint64_t* row = out.row_data(static_cast<int>(iw));
      for (int iz = 0; iz < nz; ++iz) {
        if (!omega_a.interior.test(iz)) continue;
        if (omega_a.values[static_cast<size_t>(iz)] + vb < 1.0)
          row[iz >> 6] |= uint64_t{1} << (iz & 63);
      }
    }
  });
  return out;
}

namespace {

struct PairGraph {
  int nxz, nyz, nxw, nyw;
  int nz;
  // Pair index = iw * nz + iz.
  void neighbors(uint64_t p, uint64_t out[8], int& n) const {
    const int iz = static_cast<int>(p % nz);
    const int iw = static_cast<int>(p / nz);
    const int izx = iz % nxz, izy = iz / nxz;
    const int iwx = iw % nxw, iwy = iw / nxw;
    n = 0;
    if (izx > 0) out[n++] = p - 1;
    if (izx < nxz - 1) out[n++] = p + 1;
    if (izy > 0) out[n++] = p - nxz;
    if (izy < nyz - 1) out[n++] = p + nxz;
    if (iwx > 0) out[n++] = p - static_cast<uint64_t>(nz);
    if (iwx < nxw - 1) out[n++] = p + static_cast<uint64_t>(nz);
    if (iwy > 0) out[n++] = p - static_cast<uint64_t>(nz) * nxw;
    if (iwy < nyw - 1) out[n++] = p + static_cast<uint64_t>(nz) * nxw;
  }
};

}  // namespace

ComponentReport connected_components(const ProductMask& mask) {
  if (mask.count() == 0) throw Error("mask.empty", "empty mask");
  const int nz = mask.nz();
  const int nw = mask.nw();
  const PairGraph graph{mask.grid_z().nx, mask.grid_z().ny, mask.grid_w().nx,
                        mask.grid_w().ny, nz};

  ProductMask todo = mask;  // bits cleared once visited
  ComponentReport report;
  const uint64_t pairs = mask.pairs();
  report.labels_materialized = pairs <= (uint64_t{1} << 26);
  if (report.labels_materialized) report.labels.assign(pairs, -1);

  std::vector<uint64_t> stack;
  for (int iw = 0; iw < nw; ++iw) {
    for (int iz = 0; iz < nz; ++iz) {
      if (!todo.test(iz, iw)) continue;
      const int label = report.count++;
      todo.reset(iz, iw);
      stack.push_back(static_cast<uint64_t>(iw) * nz + iz);
      while (!stack.empty()) {
        const uint64_t p = stack.back();
        stack.pop_back();
        if (report.labels_materialized) report.labels[p] = label;
        uint64_t nb[8];
        int n = 0;
        graph.neighbors(p, nb, n);
        for (int k = 0; k < n; ++k) {
          const int qz = static_cast<int>(nb[k] % nz);
          const int qw = static_cast<int>(nb[k] / nz);
          if (todo.test(qz, qw)) {
            todo.reset(qz, qw);
            stack.push_back(nb[k]);
          }
        }
      }
    }
  }
  return report;
}

SublevelReport sublevel_components(const ScalarField& field, double alpha,
                                   const Mask& a_mask) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw Error("solver.invalid", "alpha must lie in (0,1)");
  if (!(field.grid == a_mask.grid))
    throw Error("geometry.grid_mismatch", "field and A mask use different grids");
  const Grid& g = field.grid;
  std::vector<int32_t> label(static_cast<size_t>(g.count()), -1);
  auto in_sublevel = [&](int i) {
    return field.domain.test(i) && field.values[static_cast<size_t>(i)] < alpha;
  };

  SublevelReport report;
  std::vector<int> stack;
  for (int start = 0; start < g.count(); ++start) {
    if (label[start] >= 0 || !in_sublevel(start)) continue;
    SublevelComponent comp;
    comp.label = static_cast<int>(report.components.size());
    label[start] = comp.label;
    stack.push_back(start);
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      ++comp.size;
      if (a_mask.test(i)) comp.touches_zero_set = true;
      const int ix = i % g.nx, iy = i / g.nx;
      const int nb[4] = {ix > 0 ? i - 1 : -1, ix < g.nx - 1 ? i + 1 : -1,
                         iy > 0 ? i - g.nx : -1, iy < g.ny - 1 ? i + g.nx : -1};
      for (int j : nb) {
        if (j >= 0 && label[j] < 0 && in_sublevel(j)) {
          label[j] = comp.label;
          stack.push_back(j);
        }
      }
    }
    report.all_touch = report.all_touch && comp.touches_zero_set;
    report.components.push_back(comp);
  }
  return report;
}

EnvelopeResult compute_envelope(const EnvelopeInputs& in, int jobs) {
  SolveResult fa = solve_condenser_field(in.d, in.a, in.grid_z, in.params, in.refine);
  SolveResult fb = solve_condenser_field(in.g, in.b, in.grid_w, in.params, in.refine);
  ProductMask env = envelope_mask(fa.field, fb.field, jobs);
  const double denom = static_cast<double>(fa.field.domain.count()) *
                       static_cast<double>(fb.field.domain.count());
  EnvelopeResult out{std::move(fa.field), std::move(fb.field), std::move(env),
                     0.0, 0};
  out.volume_fraction = denom > 0 ? static_cast<double>(out.env.count()) / denom : 0.0;
  out.component_count = connected_components(out.env).count;
  return out;
}

}  // namespace crosslab
