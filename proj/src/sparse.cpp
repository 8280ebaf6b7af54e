#include "gmmkit/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gmmkit {

namespace {

void check_entries(index_t dim, const std::vector<Entry>& entries, bool require_positive,
                   const char* what) {
  index_t prev = 0;
  bool first = true;
  for (const Entry& e : entries) {
    if (!std::isfinite(e.value))
      throw std::invalid_argument(std::string(what) + ": non-finite value at index " +
                                  std::to_string(e.index));
    if (e.value == 0.0)
      throw std::invalid_argument(std::string(what) + ": stored zero at index " +
                                  std::to_string(e.index));
    if (require_positive && e.value < 0.0)
      throw std::invalid_argument(std::string(what) + ": negative value at index " +
                                  std::to_string(e.index));
    if (e.index >= dim)
      throw std::invalid_argument(std::string(what) + ": index " + std::to_string(e.index) +
                                  " out of range for dim " + std::to_string(dim));
    if (!first && e.index <= prev)
      throw std::invalid_argument(std::string(what) +
                                  ": indices not strictly increasing at index " +
                                  std::to_string(e.index));
    prev = e.index;
    first = false;
  }
}

}  // namespace

SparseVector::SparseVector(index_t dim, std::vector<Entry> entries)
    : dim_(dim), entries_(std::move(entries)) {
  check_entries(dim_, entries_, false, "SparseVector");
}

SparseVector SparseVector::from_dense(const std::vector<double>& values) {
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] != 0.0) entries.push_back({static_cast<index_t>(i), values[i]});
  return SparseVector(static_cast<index_t>(values.size()), std::move(entries));
}

std::vector<double> SparseVector::to_dense() const {
  std::vector<double> out(dim_, 0.0);
  for (const Entry& e : entries_) out[e.index] = e.value;
  return out;
}

TransformedVector::TransformedVector(index_t dim, std::vector<Entry> entries)
    : dim_(dim), entries_(std::move(entries)) {
  if (dim_ % 2 != 0)
    throw std::invalid_argument("TransformedVector: dim must be even, got " +
                                std::to_string(dim_));
  check_entries(dim_, entries_, true, "TransformedVector");
  for (std::size_t i = 1; i < entries_.size(); ++i)
    if (entries_[i - 1].index / 2 == entries_[i].index / 2)
      throw std::invalid_argument("TransformedVector: both slots of coordinate " +
                                  std::to_string(entries_[i].index / 2) + " occupied");
}

TransformedVector TransformedVector::unchecked(index_t dim, std::vector<Entry> entries) {
  TransformedVector v;
  v.dim_ = dim;
  v.entries_ = std::move(entries);
  return v;
}

std::vector<double> TransformedVector::to_dense() const {
  std::vector<double> out(dim_, 0.0);
  for (const Entry& e : entries_) out[e.index] = e.value;
  return out;
}

TransformedVector transform(const SparseVector& u) {
  std::vector<Entry> out;
  out.reserve(u.nnz());
  for (const Entry& e : u.entries()) {
    if (e.value > 0.0)
      out.push_back({e.index * 2, e.value});
    else
      out.push_back({e.index * 2 + 1, -e.value});
  }
  return TransformedVector::unchecked(u.dim() * 2, std::move(out));
}

SparseVector untransform(const TransformedVector& v) {
  std::vector<Entry> out;
  out.reserve(v.nnz());
  for (const Entry& e : v.entries()) {
    if (e.index % 2 == 0)
      out.push_back({e.index / 2, e.value});
    else
      out.push_back({e.index / 2, -e.value});
  }
  return SparseVector(v.dim() / 2, std::move(out));
}

double l1_mass(const SparseVector& u) {
  double s = 0.0;
  for (const Entry& e : u.entries()) s += std::fabs(e.value);
  return s;
}

void Dataset::validate() const {
  if (rows.size() != labels.size())
    throw std::invalid_argument("Dataset: " + std::to_string(rows.size()) + " rows but " +
                                std::to_string(labels.size()) + " labels");
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].dim() != dim)
      throw std::invalid_argument("Dataset: row " + std::to_string(i) + " has dim " +
                                  std::to_string(rows[i].dim()) + ", expected " +
                                  std::to_string(dim));
}

std::vector<int> Dataset::class_labels() const {
  std::vector<int> out(labels);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace gmmkit
