#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace crosslab {

using cplx = std::complex<double>;

// Failure carrying a stable machine-readable code; the CLI maps these to
// JSON error records.  Codes are listed in the README.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// SplitMix64 generator.  Used wherever results must be reproducible across
// runs and worker counts; the standard distributions are avoided because
// their output is implementation-defined.
struct SplitMix64 {
  uint64_t state;
  explicit SplitMix64(uint64_t s) : state(s) {}
  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // Uniform in [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

inline uint64_t hash_combine(uint64_t a, uint64_t b) {
  SplitMix64 s(a ^ (b * 0x9e3779b97f4a7c15ull + 0x100000001b3ull));
  return s.next();
}

// Radical-inverse (van der Corput) value of `index` in the given base.
double halton(uint64_t index, uint32_t base);

// Runs fn(begin, end) over [0,n) split into chunks of the given size.
// Chunk boundaries do not depend on the worker count, so per-chunk results
// combined in chunk order are identical for every `jobs` value.
void parallel_chunks(int64_t n, int64_t chunk_size, int jobs,
                     const std::function<void(int64_t, int64_t)>& fn);

// Shortest-of-17-significant-digits formatting used by every text artifact.
std::string fmt17(double v);

}  // namespace crosslab
