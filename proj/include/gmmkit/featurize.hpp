#pragma once

#include <cstdint>
#include <vector>

#include "gmmkit/gcws.hpp"
#include "gmmkit/sparse.hpp"

namespace gmmkit {

// b-bit one-hot expansion parameters; output dimensionality is k * 2^b.
struct FeatureConfig {
  std::uint32_t b = 0;
  std::uint32_t k = 0;

  void validate() const;
  index_t dim() const { return static_cast<index_t>(k) << b; }
};

// Sparse binary vector with exactly k ones, the j-th inside block
// [j*2^b, (j+1)*2^b).
struct BinaryFeatureVector {
  index_t dim = 0;
  std::vector<index_t> ones;
  friend bool operator==(const BinaryFeatureVector&, const BinaryFeatureVector&) = default;
};

// Sample j with index istar_j sets position j*2^b + (istar_j mod 2^b);
// tstar is ignored.
BinaryFeatureVector encode(const HashSignature& sig, const FeatureConfig& fc);

// Number of matching one-positions (at most one per block).
std::size_t inner_product(const BinaryFeatureVector& a, const BinaryFeatureVector& b);

// Same positions as sparse entries with value 1, ready for a linear learner.
SparseVector to_sparse(const BinaryFeatureVector& v);

// Encode a whole signature set into a labeled dataset of binary features.
Dataset encode_dataset(const std::vector<HashSignature>& sigs,
                       const std::vector<int>& labels, const FeatureConfig& fc,
                       unsigned threads = 0);

// Smallest b (>= 1) such that 2^b covers [0, dim); at this b truncation is
// lossless.
std::uint32_t bits_for_dim(index_t dim);

}  // namespace gmmkit
