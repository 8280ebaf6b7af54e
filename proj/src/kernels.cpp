#include "gmmkit/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "gmmkit/parallel.hpp"

namespace gmmkit {

void KernelSpec::validate() const {
  if (needs_gamma1() && !(gamma1 > 0.0 && std::isfinite(gamma1)))
    throw std::invalid_argument(name() + " kernel needs gamma1 > 0, got " +
                                std::to_string(gamma1));
  if (needs_gamma2() && !(gamma2 > 0.0 && std::isfinite(gamma2)))
    throw std::invalid_argument(name() + " kernel needs gamma2 > 0, got " +
                                std::to_string(gamma2));
}

bool KernelSpec::needs_gamma1() const {
  return kind == KernelKind::rbf || kind == KernelKind::egmm || kind == KernelKind::pgmm ||
         kind == KernelKind::epgmm;
}

bool KernelSpec::needs_gamma2() const { return kind == KernelKind::epgmm; }

bool KernelSpec::is_minmax() const {
  return kind == KernelKind::gmm || kind == KernelKind::egmm || kind == KernelKind::pgmm ||
         kind == KernelKind::epgmm;
}

std::string KernelSpec::name() const {
  switch (kind) {
    case KernelKind::linear: return "linear";
    case KernelKind::rbf: return "rbf";
    case KernelKind::gmm: return "gmm";
    case KernelKind::egmm: return "egmm";
    case KernelKind::pgmm: return "pgmm";
    case KernelKind::epgmm: return "epgmm";
  }
  return "?";
}

KernelSpec KernelSpec::parse(const std::string& kind_name, double gamma1, double gamma2) {
  KernelSpec spec;
  if (kind_name == "linear")
    spec.kind = KernelKind::linear;
  else if (kind_name == "rbf")
    spec.kind = KernelKind::rbf;
  else if (kind_name == "gmm")
    spec.kind = KernelKind::gmm;
  else if (kind_name == "egmm")
    spec.kind = KernelKind::egmm;
  else if (kind_name == "pgmm")
    spec.kind = KernelKind::pgmm;
  else if (kind_name == "epgmm")
    spec.kind = KernelKind::epgmm;
  else
    throw std::invalid_argument("unknown kernel '" + kind_name + "'");
  spec.gamma1 = gamma1;
  spec.gamma2 = gamma2;
  spec.validate();
  return spec;
}

TransformedVector power(const TransformedVector& v, double gamma) {
  std::vector<Entry> out;
  out.reserve(v.nnz());
  for (const Entry& e : v.entries()) out.push_back({e.index, pow_pos(e.value, gamma)});
  return TransformedVector::unchecked(v.dim(), std::move(out));
}

namespace {

// Shared ratio core for the min-max family: sum of pow_pos(min, gamma) over
// sum of pow_pos(max, gamma), via a two-pointer merge of the sparse supports.
// A coordinate present in only one vector adds nothing to the min sum and its
// powered value to the max sum.
double minmax_ratio(const TransformedVector& a, const TransformedVector& b, double gamma) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("min-max kernel: dim mismatch (" + std::to_string(a.dim()) +
                                " vs " + std::to_string(b.dim()) + ")");
  if (a.empty() && b.empty())
    throw std::invalid_argument("min-max kernel: both vectors are zero (0/0)");

  const auto& ea = a.entries();
  const auto& eb = b.entries();
  double num = 0.0, den = 0.0;
  std::size_t i = 0, j = 0;
  while (i < ea.size() && j < eb.size()) {
    if (ea[i].index < eb[j].index) {
      den += pow_pos(ea[i].value, gamma);
      ++i;
    } else if (eb[j].index < ea[i].index) {
      den += pow_pos(eb[j].value, gamma);
      ++j;
    } else {
      double lo = ea[i].value < eb[j].value ? ea[i].value : eb[j].value;
      double hi = ea[i].value < eb[j].value ? eb[j].value : ea[i].value;
      num += pow_pos(lo, gamma);
      den += pow_pos(hi, gamma);
      ++i;
      ++j;
    }
  }
  for (; i < ea.size(); ++i) den += pow_pos(ea[i].value, gamma);
  for (; j < eb.size(); ++j) den += pow_pos(eb[j].value, gamma);
  return num / den;
}

// Cosine similarity clamped to [-1, 1]; equal vectors short-circuit to 1 so
// Gram diagonals are exact.
double cosine(const SparseVector& u, const SparseVector& v) {
  if (u.dim() != v.dim())
    throw std::invalid_argument("cosine: dim mismatch (" + std::to_string(u.dim()) + " vs " +
                                std::to_string(v.dim()) + ")");
  if (u.empty() || v.empty())
    throw std::invalid_argument("cosine: undefined for a zero vector");
  if (u == v) return 1.0;

  const auto& eu = u.entries();
  const auto& ev = v.entries();
  double dot = 0.0, nu = 0.0, nv = 0.0;
  std::size_t i = 0, j = 0;
  while (i < eu.size() && j < ev.size()) {
    if (eu[i].index < ev[j].index) {
      nu += eu[i].value * eu[i].value;
      ++i;
    } else if (ev[j].index < eu[i].index) {
      nv += ev[j].value * ev[j].value;
      ++j;
    } else {
      dot += eu[i].value * ev[j].value;
      nu += eu[i].value * eu[i].value;
      nv += ev[j].value * ev[j].value;
      ++i;
      ++j;
    }
  }
  for (; i < eu.size(); ++i) nu += eu[i].value * eu[i].value;
  for (; j < ev.size(); ++j) nv += ev[j].value * ev[j].value;
  double c = dot / (std::sqrt(nu) * std::sqrt(nv));
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return c;
}

}  // namespace

double gmm(const TransformedVector& a, const TransformedVector& b) {
  return minmax_ratio(a, b, 1.0);
}

double pgmm(const TransformedVector& a, const TransformedVector& b, double gamma) {
  return minmax_ratio(a, b, gamma);
}

double egmm(const TransformedVector& a, const TransformedVector& b, double gamma) {
  return std::exp(-gamma * (1.0 - minmax_ratio(a, b, 1.0)));
}

double epgmm(const TransformedVector& a, const TransformedVector& b, double gamma1,
             double gamma2) {
  return std::exp(-gamma2 * (1.0 - minmax_ratio(a, b, gamma1)));
}

double rbf(const SparseVector& u, const SparseVector& v, double gamma) {
  return std::exp(-gamma * (1.0 - cosine(u, v)));
}

double linear(const SparseVector& u, const SparseVector& v) { return cosine(u, v); }

double eval_kernel(const KernelSpec& spec, const SparseVector& u, const SparseVector& v) {
  spec.validate();
  switch (spec.kind) {
    case KernelKind::linear: return linear(u, v);
    case KernelKind::rbf: return rbf(u, v, spec.gamma1);
    case KernelKind::gmm: return gmm(transform(u), transform(v));
    case KernelKind::egmm: return egmm(transform(u), transform(v), spec.gamma1);
    case KernelKind::pgmm: return pgmm(transform(u), transform(v), spec.gamma1);
    case KernelKind::epgmm:
      return epgmm(transform(u), transform(v), spec.gamma1, spec.gamma2);
  }
  throw std::logic_error("unreachable kernel kind");
}

namespace {

double eval_pretransformed(const KernelSpec& spec, const Dataset& data,
                           const std::vector<TransformedVector>& transformed, std::size_t i,
                           std::size_t j) {
  switch (spec.kind) {
    case KernelKind::linear: return linear(data.rows[i], data.rows[j]);
    case KernelKind::rbf: return rbf(data.rows[i], data.rows[j], spec.gamma1);
    case KernelKind::gmm: return gmm(transformed[i], transformed[j]);
    case KernelKind::egmm: return egmm(transformed[i], transformed[j], spec.gamma1);
    case KernelKind::pgmm: return pgmm(transformed[i], transformed[j], spec.gamma1);
    case KernelKind::epgmm:
      return epgmm(transformed[i], transformed[j], spec.gamma1, spec.gamma2);
  }
  throw std::logic_error("unreachable kernel kind");
}

std::vector<TransformedVector> transform_rows(const Dataset& data, bool wanted) {
  std::vector<TransformedVector> out;
  if (!wanted) return out;
  out.reserve(data.rows.size());
  for (const auto& r : data.rows) out.push_back(transform(r));
  return out;
}

[[noreturn]] void rethrow_with_rows(const std::exception& e, std::size_t i, std::size_t j) {
  throw std::runtime_error("kernel failed at rows (" + std::to_string(i) + ", " +
                           std::to_string(j) + "): " + e.what());
}

}  // namespace

GramMatrix gram(const Dataset& data, const KernelSpec& spec, unsigned threads) {
  spec.validate();
  data.validate();
  std::size_t n = data.size();
  if (n == 0) throw std::invalid_argument("gram: empty dataset");

  auto transformed = transform_rows(data, spec.is_minmax());

  GramMatrix g;
  g.n = n;
  g.spec = spec;
  g.values.assign(n * n, 0.0);
  g.row_ids.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.row_ids[i] = static_cast<int>(i) + 1;

  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = i; j < n; ++j) {
      double v;
      try {
        v = eval_pretransformed(spec, data, transformed, i, j);
      } catch (const std::exception& e) {
        rethrow_with_rows(e, i, j);
      }
      g.values[i * n + j] = v;
      g.values[j * n + i] = v;
    }
  });

  for (std::size_t i = 0; i < n; ++i) {
    bool zero_row = data.rows[i].empty();
    if (!zero_row && g.at(i, i) != 1.0)
      throw std::runtime_error("gram: diagonal entry " + std::to_string(i) +
                               " is not 1 for a nonzero row");
  }
  return g;
}

KernelBlock cross_gram(const Dataset& rows, const Dataset& basis, const KernelSpec& spec,
                       unsigned threads) {
  spec.validate();
  rows.validate();
  basis.validate();
  if (rows.dim != basis.dim)
    throw std::invalid_argument("cross_gram: dim mismatch (" + std::to_string(rows.dim) +
                                " vs " + std::to_string(basis.dim) + ")");
  std::size_t nr = rows.size(), nc = basis.size();
  if (nr == 0 || nc == 0) throw std::invalid_argument("cross_gram: empty dataset");

  bool minmax = spec.is_minmax();
  auto trows = transform_rows(rows, minmax);
  auto tbasis = transform_rows(basis, minmax);

  KernelBlock blk;
  blk.n_rows = nr;
  blk.n_cols = nc;
  blk.spec = spec;
  blk.values.assign(nr * nc, 0.0);
  blk.row_ids.resize(nr);
  for (std::size_t i = 0; i < nr; ++i) blk.row_ids[i] = static_cast<int>(i) + 1;

  parallel_for(nr, threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < nc; ++j) {
      try {
        double v;
        switch (spec.kind) {
          case KernelKind::linear: v = linear(rows.rows[i], basis.rows[j]); break;
          case KernelKind::rbf: v = rbf(rows.rows[i], basis.rows[j], spec.gamma1); break;
          case KernelKind::gmm: v = gmm(trows[i], tbasis[j]); break;
          case KernelKind::egmm: v = egmm(trows[i], tbasis[j], spec.gamma1); break;
          case KernelKind::pgmm: v = pgmm(trows[i], tbasis[j], spec.gamma1); break;
          case KernelKind::epgmm:
            v = epgmm(trows[i], tbasis[j], spec.gamma1, spec.gamma2);
            break;
          default: throw std::logic_error("unreachable kernel kind");
        }
        blk.values[i * nc + j] = v;
      } catch (const std::exception& e) {
        rethrow_with_rows(e, i, j);
      }
    }
  });
  return blk;
}

}  // namespace gmmkit
