#pragma once

#include <string>
#include <vector>

#include "gmmkit/gcws.hpp"
#include "gmmkit/kernels.hpp"
#include "gmmkit/learn.hpp"
#include "gmmkit/sparse.hpp"

namespace gmmkit {

// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);
// 17 significant digits; used for kernel values on disk.
std::string format_double17(double v);

// Dictionary for datasets whose labels are not integers. Ids are assigned
// in first-seen order and persisted as one name per line.
struct LabelMap {
  std::vector<std::string> names;

  int intern(const std::string& name);
  void save(const std::string& path) const;
  static LabelMap load(const std::string& path);
};

// LIBSVM sparse format: `label idx:val ...`, 1-based strictly increasing
// indices on disk, 0-based in memory. min_dim forces at least that
// dimensionality (train/test files must agree).
Dataset read_libsvm(const std::string& path, index_t min_dim = 0);
// Same, but non-integer labels are interned through the map instead of
// rejected.
Dataset read_libsvm(const std::string& path, LabelMap& labels, index_t min_dim = 0);
void write_libsvm(const Dataset& data, const std::string& path);

// LIBSVM precomputed-kernel format: line i is
//   label_i 0:<1-based serial> 1:K(i,1) ... n:K(i,n)
void write_precomputed(const GramMatrix& gram, const std::vector<int>& labels,
                       const std::string& path);
void write_precomputed(const KernelBlock& block, const std::vector<int>& labels,
                       const std::string& path);

// Signature file: a `# gcws ...` header carrying the config, then one row per
// vector: `row_id k b_available istar:tstar ...`.
struct SignatureFile {
  HashConfig config;
  std::vector<int> row_ids;
  std::vector<HashSignature> rows;
};

void write_signatures(const std::string& path, const HashConfig& config,
                      const std::vector<HashSignature>& rows);
SignatureFile read_signatures(const std::string& path);

void save_model(const LinearModel& model, const std::string& path);
LinearModel load_model(const std::string& path);

}  // namespace gmmkit
