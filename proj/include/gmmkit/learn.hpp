#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gmmkit/sparse.hpp"

namespace gmmkit {

struct TrainConfig {
  double C = 1.0;
  std::uint32_t max_iters = 1000;  // outer epochs
  double tol = 1e-4;               // stop when max |projected gradient| < tol
  std::uint64_t seed = 1;          // permutation seed
  bool bias = true;                // augmented constant feature

  void validate() const;
};

// One-vs-rest linear classifier. weights[c] has dim entries plus a trailing
// bias weight when bias is set. objective_trace[c] logs the (minimized)
// dual objective once per epoch.
struct LinearModel {
  std::vector<int> labels;  // ascending
  index_t dim = 0;
  bool bias = true;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> objective_trace;
};

// Dual coordinate descent for the L2-regularized squared-hinge SVM, one
// binary problem per class. The per-sample penalty is C / n_rows, so the
// optimum is invariant under row duplication.
LinearModel train_linear(const Dataset& data, const TrainConfig& cfg);

// Argmax of per-class scores; ties go to the lowest class label.
int predict_one(const LinearModel& model, const SparseVector& x);

// Fraction of correctly predicted labels.
double evaluate(const LinearModel& model, const Dataset& data);

struct SweepGrid {
  std::vector<double> gammas;
  std::vector<double> Cs;
  void validate() const;
};

struct SweepCell {
  std::string kernel;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double C = 0.0;
  double accuracy = 0.0;  // percent, reported at 2 decimals
  double seconds = 0.0;
  bool ok = false;
  std::string error;
};

struct SweepOptions {
  std::string kernel_name = "pgmm";
  double gamma2 = 0.0;
  TrainConfig train;
  std::string csv_path;  // empty: in-memory only
  unsigned threads = 0;
};

// Builds the (train, test) feature datasets for one gamma.
using FeatureFactory = std::function<std::pair<Dataset, Dataset>(double gamma)>;

// Evaluates every (gamma, C) cell. Finished cells found in csv_path are not
// recomputed; each newly finished cell is appended to the CSV immediately and
// the file is rewritten in canonical grid order at the end. Per-cell failures
// are recorded, not fatal.
std::vector<SweepCell> sweep(const FeatureFactory& make_features, const SweepGrid& grid,
                             const SweepOptions& opts);

// Per-C best accuracy over gamma, in grid C order.
std::vector<std::pair<double, double>> best_over_gamma(const std::vector<SweepCell>& cells);

// Sweep CSV: header `kernel,gamma1,gamma2,C,accuracy,seconds`.
std::vector<SweepCell> read_sweep_csv(const std::string& path);
void write_sweep_csv(const std::string& path, const std::vector<SweepCell>& cells);

}  // namespace gmmkit
