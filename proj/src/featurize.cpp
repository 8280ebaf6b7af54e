#include "gmmkit/featurize.hpp"

#include <bit>
#include <limits>
#include <stdexcept>
#include <string>

#include "gmmkit/parallel.hpp"

namespace gmmkit {

void FeatureConfig::validate() const {
  if (b == 0 || b > 26)
    throw std::invalid_argument("FeatureConfig: b must be in [1, 26], got " +
                                std::to_string(b));
  if (k == 0) throw std::invalid_argument("FeatureConfig: k must be at least 1");
  if ((static_cast<std::uint64_t>(k) << b) > std::numeric_limits<index_t>::max())
    throw std::invalid_argument("FeatureConfig: k * 2^b overflows the index type");
}

BinaryFeatureVector encode(const HashSignature& sig, const FeatureConfig& fc) {
  fc.validate();
  if (sig.samples.size() != fc.k)
    throw std::invalid_argument("encode: signature has " +
                                std::to_string(sig.samples.size()) + " samples, config k is " +
                                std::to_string(fc.k));

  BinaryFeatureVector out;
  out.dim = fc.dim();
  out.ones.reserve(fc.k);
  index_t mask = (index_t{1} << fc.b) - 1;
  for (std::uint32_t j = 0; j < fc.k; ++j)
    out.ones.push_back((static_cast<index_t>(j) << fc.b) + (sig.samples[j].istar & mask));
  return out;
}

std::size_t inner_product(const BinaryFeatureVector& a, const BinaryFeatureVector& b) {
  if (a.dim != b.dim || a.ones.size() != b.ones.size())
    throw std::invalid_argument("inner_product: feature vectors have different shapes");
  std::size_t hits = 0;
  for (std::size_t j = 0; j < a.ones.size(); ++j)
    if (a.ones[j] == b.ones[j]) ++hits;
  return hits;
}

SparseVector to_sparse(const BinaryFeatureVector& v) {
  std::vector<Entry> entries;
  entries.reserve(v.ones.size());
  for (index_t pos : v.ones) entries.push_back({pos, 1.0});
  return SparseVector(v.dim, std::move(entries));
}

Dataset encode_dataset(const std::vector<HashSignature>& sigs, const std::vector<int>& labels,
                       const FeatureConfig& fc, unsigned threads) {
  fc.validate();
  if (sigs.size() != labels.size())
    throw std::invalid_argument("encode_dataset: " + std::to_string(sigs.size()) +
                                " signatures but " + std::to_string(labels.size()) +
                                " labels");
  Dataset data;
  data.dim = fc.dim();
  data.labels = labels;
  data.rows.resize(sigs.size());
  parallel_for(sigs.size(), threads,
               [&](std::size_t i) { data.rows[i] = to_sparse(encode(sigs[i], fc)); });
  return data;
}

std::uint32_t bits_for_dim(index_t dim) {
  if (dim <= 2) return 1;
  return static_cast<std::uint32_t>(std::bit_width(dim - 1));
}

}  // namespace gmmkit
