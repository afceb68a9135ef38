#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "crosslab/extremal.hpp"
#include "crosslab/geometry.hpp"

namespace crosslab {

// X = (D x B) u (A x G).
struct Cross {
  DomainSpec d;
  SetSpec a;
  DomainSpec g;
  SetSpec b;
};

bool cross_membership(const Cross& cross, cplx z, cplx w);

// Subset of the product of two factor grids, packed one bit per (z,w) pair.
// Rows (fixed w index) are word-aligned so they can be filled in parallel.
class ProductMask {
 public:
  ProductMask(const Grid& grid_z, const Grid& grid_w);

  const Grid& grid_z() const { return gz_; }
  const Grid& grid_w() const { return gw_; }
  int nz() const { return nz_; }
  int nw() const { return nw_; }
  uint64_t pairs() const { return static_cast<uint64_t>(nz_) * nw_; }

  bool test(int iz, int iw) const {
    const size_t b = static_cast<size_t>(iw) * wpr_ * 64 + iz;
    return (bits_[b >> 6] >> (b & 63)) & 1u;
  }
  void set(int iz, int iw) {
    const size_t b = static_cast<size_t>(iw) * wpr_ * 64 + iz;
    bits_[b >> 6] |= uint64_t{1} << (b & 63);
  }
  void reset(int iz, int iw) {
    const size_t b = static_cast<size_t>(iw) * wpr_ * 64 + iz;
    bits_[b >> 6] &= ~(uint64_t{1} << (b & 63));
  }

  uint64_t count() const;
  ProductMask intersect(const ProductMask& other) const;
  ProductMask minus(const ProductMask& other) const;

  // Header "nz,nw"; then one line per w index with alternating run lengths
  // over the flattened z index, starting with the zero run.
  void to_rle_csv(std::ostream& os) const;

  size_t words_per_row() const { return wpr_; }
  uint64_t* row_data(int iw) { return bits_.data() + static_cast<size_t>(iw) * wpr_; }

 private:
  Grid gz_, gw_;
  int nz_ = 0, nw_ = 0;
  size_t wpr_ = 0;
  std::vector<uint64_t> bits_;
};

// Pairs where both factors are interior and the field values sum below 1.
ProductMask envelope_mask(const ScalarField& omega_a, const ScalarField& omega_b,
                          int jobs = 1);

struct ComponentReport {
  int count = 0;
  // Per-pair labels, materialized only for masks of at most 2^26 pairs.
  std::vector<int32_t> labels;
  bool labels_materialized = false;
};

// Components under product adjacency: one 4-neighbor step in exactly one
// factor grid.
ComponentReport connected_components(const ProductMask& mask);

struct SublevelComponent {
  int label = 0;
  long size = 0;
  bool touches_zero_set = false;
};

struct SublevelReport {
  std::vector<SublevelComponent> components;
  bool all_touch = true;
};

// Labels the 4-connected components of {value < alpha} on the field's domain
// and reports which of them meet the given A-mask.
SublevelReport sublevel_components(const ScalarField& field, double alpha,
                                   const Mask& a_mask);

struct EnvelopeInputs {
  DomainSpec d;
  SetSpec a;
  DomainSpec g;
  SetSpec b;
  Grid grid_z;
  Grid grid_w;
  SolveParams params{1e-9, 0, 1.9};
  int refine = 4;  // factor fields are solved this much finer, then restricted
};

struct EnvelopeResult {
  ScalarField omega_a;
  ScalarField omega_b;
  ProductMask env;
  double volume_fraction = 0;  // flagged pairs over domain-mask pairs
  int component_count = 0;
};

EnvelopeResult compute_envelope(const EnvelopeInputs& in, int jobs = 1);

}  // namespace crosslab
