#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gmmkit/sparse.hpp"

namespace gmmkit {

enum class KernelKind { linear, rbf, gmm, egmm, pgmm, epgmm };

// Kernel selector plus its tuning parameters: gamma1 is the RBF/eGMM gamma
// or the pGMM power; epGMM uses gamma1 as the power and gamma2 as the outer
// exponent.
struct KernelSpec {
  KernelKind kind = KernelKind::gmm;
  double gamma1 = 0.0;
  double gamma2 = 0.0;

  void validate() const;
  bool needs_gamma1() const;
  bool needs_gamma2() const;
  // True for the min-max family, which evaluates on transformed vectors.
  bool is_minmax() const;
  std::string name() const;

  static KernelSpec parse(const std::string& kind_name, double gamma1, double gamma2);
};

// x^gamma for x > 0, computed as exp(gamma * log x). gamma == 1 is the
// identity, so the powered kernels reduce to their unpowered forms
// bit-for-bit.
inline double pow_pos(double x, double gamma) {
  return gamma == 1.0 ? x : std::exp(gamma * std::log(x));
}

// Elementwise x^gamma on the stored (strictly positive) values.
TransformedVector power(const TransformedVector& v, double gamma);

double gmm(const TransformedVector& a, const TransformedVector& b);
double pgmm(const TransformedVector& a, const TransformedVector& b, double gamma);
double egmm(const TransformedVector& a, const TransformedVector& b, double gamma);
double epgmm(const TransformedVector& a, const TransformedVector& b, double gamma1,
             double gamma2);

// Cosine-normalized kernels on the original signed space.
double rbf(const SparseVector& u, const SparseVector& v, double gamma);
double linear(const SparseVector& u, const SparseVector& v);

// Pairwise value under a spec; transforms internally for the min-max family.
double eval_kernel(const KernelSpec& spec, const SparseVector& u, const SparseVector& v);

// Symmetric kernel matrix over one dataset.
struct GramMatrix {
  std::size_t n = 0;
  std::vector<double> values;  // row-major n*n
  std::vector<int> row_ids;    // 1-based serials
  KernelSpec spec;

  double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

// Rectangular block K(rows_i, basis_j); the precomputed-kernel test files
// need test-versus-train values.
struct KernelBlock {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> values;  // row-major
  std::vector<int> row_ids;
  KernelSpec spec;

  double at(std::size_t i, std::size_t j) const { return values[i * n_cols + j]; }
};

GramMatrix gram(const Dataset& data, const KernelSpec& spec, unsigned threads = 0);
KernelBlock cross_gram(const Dataset& rows, const Dataset& basis, const KernelSpec& spec,
                       unsigned threads = 0);

}  // namespace gmmkit
