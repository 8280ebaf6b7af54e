#pragma once

#include <cstdint>
#include <vector>

namespace gmmkit {

using index_t = std::uint32_t;

struct Entry {
  index_t index = 0;
  double value = 0.0;
  friend bool operator==(const Entry&, const Entry&) = default;
};

// Signed sparse vector over coordinates [0, dim). Entries are kept in
// strictly increasing index order; zeros are never stored.
class SparseVector {
 public:
  SparseVector() = default;
  SparseVector(index_t dim, std::vector<Entry> entries);

  static SparseVector from_dense(const std::vector<double>& values);

  index_t dim() const { return dim_; }
  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t nnz() const { return entries_.size(); }
  std::vector<double> to_dense() const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  index_t dim_ = 0;
  std::vector<Entry> entries_;
};

// Nonnegative split form of a signed vector: original coordinate i occupies
// slot 2i when positive and slot 2i+1 when negative. Dimension is doubled,
// every stored value is strictly positive, and at most one slot of each
// (2i, 2i+1) pair is occupied.
class TransformedVector {
 public:
  TransformedVector() = default;
  TransformedVector(index_t dim, std::vector<Entry> entries);

  index_t dim() const { return dim_; }
  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t nnz() const { return entries_.size(); }
  std::vector<double> to_dense() const;

  friend bool operator==(const TransformedVector&, const TransformedVector&) = default;

  // Skips invariant checks; for internal producers whose output is valid by
  // construction.
  static TransformedVector unchecked(index_t dim, std::vector<Entry> entries);

 private:
  index_t dim_ = 0;
  std::vector<Entry> entries_;
};

// Positive/negative split: (i, x) maps to (2i, x) for x > 0 and to
// (2i+1, -x) for x < 0; zeros stay implicit.
TransformedVector transform(const SparseVector& u);

// Inverse of transform(); recovers the signed vector exactly.
SparseVector untransform(const TransformedVector& v);

// Sum of |value| over stored entries.
double l1_mass(const SparseVector& u);

// Labeled rows sharing one dimensionality.
struct Dataset {
  std::vector<SparseVector> rows;
  std::vector<int> labels;
  index_t dim = 0;

  std::size_t size() const { return rows.size(); }
  void validate() const;
  std::vector<int> class_labels() const;  // sorted, unique
};

}  // namespace gmmkit
