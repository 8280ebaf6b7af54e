#pragma once

#include <cstdint>
#include <vector>

#include "gmmkit/sparse.hpp"

namespace gmmkit {

// Parameters of one consistent-weighted-sampling run: the hashing gamma,
// the number of independent samples k, the master seed, and the transformed
// dimension (2D) the random stream is keyed over.
struct HashConfig {
  double gamma = 1.0;
  std::uint32_t k = 0;
  std::uint64_t seed = 0;
  index_t dim = 0;

  void validate() const;
  // Identifier tying signatures to the exact (gamma, k, seed, dim) used.
  std::uint64_t digest() const;
};

struct HashSample {
  index_t istar = 0;
  std::int64_t tstar = 0;
  friend bool operator==(const HashSample&, const HashSample&) = default;
};

struct HashSignature {
  std::uint64_t config_digest = 0;
  std::vector<HashSample> samples;
  friend bool operator==(const HashSignature&, const HashSignature&) = default;
};

struct CwsRandoms {
  double r;     // Gamma(2,1)
  double c;     // Gamma(2,1)
  double beta;  // Uniform[0,1)
};

// The consistent per-coordinate randomness: a pure function of
// (seed, sample index, coordinate), so every vector hashed under the same
// config sees identical draws at each (sample, coordinate).
CwsRandoms draw_randoms(std::uint64_t seed, std::uint32_t sample, index_t coord);

// One weighted sample: over the stored coordinates of v, computes
//   t_i = floor(gamma * log(v_i) / r_i + beta_i)
//   a_i = log(c_i) - r_i * (t_i + 1 - beta_i)
// and returns (argmin_i a_i, t at the argmin). Ties go to the smallest
// coordinate index.
HashSample hash_one(const TransformedVector& v, const HashConfig& config,
                    std::uint32_t sample);

// All k samples for one vector; sample j uses stream j.
HashSignature signature(const TransformedVector& v, const HashConfig& config);

// Signatures for every row of a dataset (rows are transformed internally).
// Output is independent of the thread count.
std::vector<HashSignature> signatures(const Dataset& data, const HashConfig& config,
                                      unsigned threads = 0);

enum class CollisionMode { full, index_only };

// Fraction of samples that agree: full mode matches (istar, tstar) pairs,
// index_only matches istar alone.
double estimate_collision(const HashSignature& a, const HashSignature& b,
                          CollisionMode mode);

}  // namespace gmmkit
