#include "gmmkit/learn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "gmmkit/io.hpp"
#include "gmmkit/parallel.hpp"
#include "gmmkit/rng.hpp"

namespace gmmkit {

void TrainConfig::validate() const {
  if (!(C > 0.0 && std::isfinite(C)))
    throw std::invalid_argument("TrainConfig: C must be positive, got " + std::to_string(C));
  if (max_iters == 0) throw std::invalid_argument("TrainConfig: max_iters must be at least 1");
  if (!(tol > 0.0 && std::isfinite(tol)))
    throw std::invalid_argument("TrainConfig: tol must be positive");
}

namespace {

// Dual coordinate descent for one binary problem:
//   min_w  0.5 w.w + (C/n) sum_i max(0, 1 - y_i w.x_i)^2
// The per-sample penalty C/n makes the optimum invariant under row
// duplication. Bias is an augmented constant feature (regularized like the
// rest). Appends the dual objective to objective_out once per epoch.
std::vector<double> solve_binary(const Dataset& data, const std::vector<signed char>& y,
                                 const TrainConfig& cfg, std::uint64_t perm_seed,
                                 std::vector<double>& objective_out) {
  std::size_t n = data.size();
  std::size_t d = static_cast<std::size_t>(data.dim) + (cfg.bias ? 1 : 0);
  double Cs = cfg.C / static_cast<double>(n);
  double Dii = 1.0 / (2.0 * Cs);

  std::vector<double> w(d, 0.0), alpha(n, 0.0), qbar(n);
  for (std::size_t i = 0; i < n; ++i) {
    double q = cfg.bias ? 1.0 : 0.0;
    for (const Entry& e : data.rows[i].entries()) q += e.value * e.value;
    qbar[i] = q + Dii;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(perm_seed);

  for (std::uint32_t epoch = 0; epoch < cfg.max_iters; ++epoch) {
    for (std::size_t i = n - 1; i > 0; --i)
      std::swap(order[i], order[rng.below(i + 1)]);

    double max_pg = 0.0;
    for (std::size_t idx : order) {
      const auto& entries = data.rows[idx].entries();
      double margin = 0.0;
      for (const Entry& e : entries) margin += w[e.index] * e.value;
      if (cfg.bias) margin += w[d - 1];

      double G = y[idx] * margin - 1.0 + Dii * alpha[idx];
      double PG = alpha[idx] == 0.0 ? std::min(G, 0.0) : G;
      if (std::fabs(PG) > max_pg) max_pg = std::fabs(PG);
      if (PG == 0.0) continue;

      double anew = std::max(alpha[idx] - G / qbar[idx], 0.0);
      double delta = (anew - alpha[idx]) * y[idx];
      if (delta != 0.0) {
        for (const Entry& e : entries) w[e.index] += delta * e.value;
        if (cfg.bias) w[d - 1] += delta;
      }
      alpha[idx] = anew;
    }

    double obj = 0.0;
    for (double x : w) obj += x * x;
    obj *= 0.5;
    for (double a : alpha) obj += 0.5 * Dii * a * a - a;
    objective_out.push_back(obj);

    if (max_pg < cfg.tol) break;
  }
  return w;
}

}  // namespace

LinearModel train_linear(const Dataset& data, const TrainConfig& cfg) {
  cfg.validate();
  data.validate();
  if (data.size() == 0) throw std::invalid_argument("train_linear: empty dataset");
  auto classes = data.class_labels();
  if (classes.size() < 2)
    throw std::invalid_argument("train_linear: needs at least 2 classes, got " +
                                std::to_string(classes.size()));

  LinearModel model;
  model.labels = classes;
  model.dim = data.dim;
  model.bias = cfg.bias;
  model.weights.resize(classes.size());
  model.objective_trace.resize(classes.size());

  for (std::size_t c = 0; c < classes.size(); ++c) {
    std::vector<signed char> y(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
      y[i] = data.labels[i] == classes[c] ? 1 : -1;
    std::uint64_t perm_seed = mix64(cfg.seed ^ mix64(c + 1));
    model.weights[c] = solve_binary(data, y, cfg, perm_seed, model.objective_trace[c]);
  }
  return model;
}

int predict_one(const LinearModel& model, const SparseVector& x) {
  if (x.dim() != model.dim)
    throw std::invalid_argument("predict_one: vector dim " + std::to_string(x.dim()) +
                                " does not match model dim " + std::to_string(model.dim));
  double best = -std::numeric_limits<double>::infinity();
  int best_label = model.labels.empty() ? 0 : model.labels.front();
  for (std::size_t c = 0; c < model.labels.size(); ++c) {
    const auto& w = model.weights[c];
    double s = 0.0;
    for (const Entry& e : x.entries()) s += w[e.index] * e.value;
    if (model.bias) s += w[model.dim];
    // Strict > keeps the earliest class; labels are ascending, so ties go to
    // the lowest label.
    if (s > best) {
      best = s;
      best_label = model.labels[c];
    }
  }
  return best_label;
}

double evaluate(const LinearModel& model, const Dataset& data) {
  data.validate();
  if (data.size() == 0) throw std::invalid_argument("evaluate: empty dataset");
  if (data.dim != model.dim)
    throw std::invalid_argument("evaluate: dataset dim " + std::to_string(data.dim) +
                                " does not match model dim " + std::to_string(model.dim));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (predict_one(model, data.rows[i]) == data.labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

void SweepGrid::validate() const {
  if (gammas.empty() || Cs.empty()) throw std::invalid_argument("SweepGrid: empty grid");
  for (double g : gammas)
    if (!(g > 0.0 && std::isfinite(g)))
      throw std::invalid_argument("SweepGrid: gamma must be positive");
  for (double c : Cs)
    if (!(c > 0.0 && std::isfinite(c)))
      throw std::invalid_argument("SweepGrid: C must be positive");
}

namespace {

std::string cell_key(const std::string& kernel, double g1, double g2, double C) {
  return kernel + "," + format_double(g1) + "," + format_double(g2) + "," + format_double(C);
}

const char* kSweepHeader = "kernel,gamma1,gamma2,C,accuracy,seconds";

std::string cell_line(const SweepCell& c) {
  return c.kernel + "," + format_double(c.gamma1) + "," + format_double(c.gamma2) + "," +
         format_double(c.C) + "," + format_double(c.accuracy) + "," +
         format_double(c.seconds);
}

}  // namespace

std::vector<SweepCell> read_sweep_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path + " for reading");
  std::string line;
  if (!std::getline(in, line) || line != kSweepHeader)
    throw std::runtime_error(path + ": missing sweep CSV header");

  std::vector<SweepCell> cells;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 6)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 6 fields");
    SweepCell c;
    c.kernel = fields[0];
    try {
      c.gamma1 = std::stod(fields[1]);
      c.gamma2 = std::stod(fields[2]);
      c.C = std::stod(fields[3]);
      c.accuracy = std::stod(fields[4]);
      c.seconds = std::stod(fields[5]);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad numeric field");
    }
    c.ok = true;
    cells.push_back(std::move(c));
  }
  return cells;
}

void write_sweep_csv(const std::string& path, const std::vector<SweepCell>& cells) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << kSweepHeader << '\n';
  for (const auto& c : cells) out << cell_line(c) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

std::vector<SweepCell> sweep(const FeatureFactory& make_features, const SweepGrid& grid,
                             const SweepOptions& opts) {
  grid.validate();
  opts.train.validate();

  std::map<std::string, SweepCell> done;
  if (!opts.csv_path.empty() && std::filesystem::exists(opts.csv_path) &&
      std::filesystem::file_size(opts.csv_path) > 0) {
    for (auto& cell : read_sweep_csv(opts.csv_path))
      done[cell_key(cell.kernel, cell.gamma1, cell.gamma2, cell.C)] = cell;
  }

  std::size_t ng = grid.gammas.size(), nc = grid.Cs.size();
  std::vector<SweepCell> cells(ng * nc);

  std::mutex io_mutex;
  std::ofstream append;
  if (!opts.csv_path.empty()) {
    bool fresh =
        !std::filesystem::exists(opts.csv_path) || std::filesystem::file_size(opts.csv_path) == 0;
    append.open(opts.csv_path, std::ios::app);
    if (!append) throw std::runtime_error("cannot open " + opts.csv_path + " for appending");
    if (fresh) append << kSweepHeader << '\n';
  }

  parallel_for(ng, opts.threads, [&](std::size_t gi) {
    double gamma = grid.gammas[gi];
    bool all_done = true;
    for (double C : grid.Cs)
      if (!done.count(cell_key(opts.kernel_name, gamma, opts.gamma2, C))) all_done = false;

    std::pair<Dataset, Dataset> feats;
    std::string feature_error;
    bool have_features = false;
    if (!all_done) {
      try {
        feats = make_features(gamma);
        have_features = true;
      } catch (const std::exception& e) {
        feature_error = e.what();
      }
    }

    for (std::size_t ci = 0; ci < nc; ++ci) {
      SweepCell& cell = cells[gi * nc + ci];
      cell.kernel = opts.kernel_name;
      cell.gamma1 = gamma;
      cell.gamma2 = opts.gamma2;
      cell.C = grid.Cs[ci];

      auto it = done.find(cell_key(cell.kernel, cell.gamma1, cell.gamma2, cell.C));
      if (it != done.end()) {
        cell = it->second;
        continue;
      }
      if (!have_features) {
        cell.error = feature_error.empty() ? "feature construction failed" : feature_error;
        continue;
      }

      auto t0 = std::chrono::steady_clock::now();
      try {
        TrainConfig tc = opts.train;
        tc.C = cell.C;
        LinearModel model = train_linear(feats.first, tc);
        double acc = evaluate(model, feats.second);
        cell.accuracy = std::round(acc * 10000.0) / 100.0;
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      cell.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

      if (cell.ok && append.is_open()) {
        std::lock_guard<std::mutex> lock(io_mutex);
        append << cell_line(cell) << '\n';
        append.flush();
      }
    }
  });

  if (!opts.csv_path.empty()) {
    append.close();
    // Canonical rewrite: rows loaded from the file that belong to other grids
    // stay (in file order), then this grid's finished cells in grid order.
    std::vector<SweepCell> keep;
    std::map<std::string, bool> in_grid;
    for (const auto& cell : cells)
      in_grid[cell_key(cell.kernel, cell.gamma1, cell.gamma2, cell.C)] = true;
    if (std::filesystem::exists(opts.csv_path) &&
        std::filesystem::file_size(opts.csv_path) > 0) {
      for (auto& cell : read_sweep_csv(opts.csv_path)) {
        auto key = cell_key(cell.kernel, cell.gamma1, cell.gamma2, cell.C);
        if (!in_grid.count(key)) keep.push_back(cell);
      }
    }
    for (const auto& cell : cells)
      if (cell.ok) keep.push_back(cell);
    write_sweep_csv(opts.csv_path, keep);
  }
  return cells;
}

std::vector<std::pair<double, double>> best_over_gamma(const std::vector<SweepCell>& cells) {
  std::vector<std::pair<double, double>> out;
  for (const auto& cell : cells) {
    if (!cell.ok) continue;
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const auto& p) { return p.first == cell.C; });
    if (it == out.end())
      out.emplace_back(cell.C, cell.accuracy);
    else if (cell.accuracy > it->second)
      it->second = cell.accuracy;
  }
  return out;
}

}  // namespace gmmkit
