#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "gmmkit/featurize.hpp"
#include "gmmkit/gcws.hpp"
#include "gmmkit/io.hpp"
#include "gmmkit/kernels.hpp"
#include "gmmkit/learn.hpp"
#include "gmmkit/rng.hpp"
#include "gmmkit/sparse.hpp"

namespace fs = std::filesystem;
using namespace gmmkit;

namespace {

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::istringstream in(csv);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw std::runtime_error("bad number '" + tok + "' in list '" + csv + "'");
    }
  }
  if (out.empty()) throw std::runtime_error("empty list '" + csv + "'");
  return out;
}

std::string join_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += format_double(xs[i]);
  }
  return out;
}

// The 58-value RBF/eGMM gamma grid.
std::vector<double> preset_rbf58() {
  std::vector<double> g = {0.001, 0.01};
  for (int i = 1; i <= 20; ++i) g.push_back(i * 0.1);
  g.push_back(2.5);
  for (int i = 3; i <= 20; ++i) g.push_back(i);
  for (int i = 25; i <= 50; i += 5) g.push_back(i);
  for (int i = 60; i <= 100; i += 10) g.push_back(i);
  g.insert(g.end(), {120, 150, 200, 300, 500, 1000});
  return g;
}

// The coarser pGMM gamma grid (kernel matrices are materialized per gamma,
// so the search range is deliberately smaller).
std::vector<double> preset_pgmm24() {
  std::vector<double> g = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.75,
                           1,    1.25, 1.5, 2,   5,    10,  15,  20,  25};
  for (int i = 30; i <= 100; i += 10) g.push_back(i);
  return g;
}

std::vector<double> resolve_gammas(const std::string& gammas, const std::string& preset) {
  if (!preset.empty() && !gammas.empty())
    throw std::runtime_error("--gammas and --preset are mutually exclusive");
  if (preset == "rbf58") return preset_rbf58();
  if (preset == "pgmm24") return preset_pgmm24();
  if (!preset.empty()) throw std::runtime_error("unknown preset '" + preset + "'");
  if (gammas.empty()) throw std::runtime_error("need --gammas or --preset");
  return parse_list(gammas);
}

// Writes the artifact through a temp file so the destination only ever holds
// a complete result.
template <typename Fn>
void write_artifact(const std::string& out_path, Fn&& writer) {
  std::string tmp = out_path + ".tmp";
  writer(tmp);
  fs::rename(tmp, out_path);
}

void echo_config(const std::string& line) { std::cerr << "config: " << line << "\n"; }

Dataset pad_dataset(Dataset ds, index_t dim) {
  if (ds.dim >= dim) return ds;
  Dataset out;
  out.dim = dim;
  out.labels = std::move(ds.labels);
  out.rows.reserve(ds.rows.size());
  for (const auto& r : ds.rows) out.rows.emplace_back(dim, r.entries());
  return out;
}

void align_dims(Dataset& a, Dataset& b) {
  index_t dim = std::max(a.dim, b.dim);
  a = pad_dataset(std::move(a), dim);
  b = pad_dataset(std::move(b), dim);
}

std::uint64_t file_fingerprint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path + " for reading");
  std::uint64_t h = 0x9ae16a3b2f90404fULL;
  char buf[65536];
  std::uint64_t total = 0;
  while (in) {
    in.read(buf, sizeof buf);
    std::streamsize got = in.gcount();
    total += static_cast<std::uint64_t>(got);
    std::streamsize i = 0;
    for (; i + 8 <= got; i += 8) {
      std::uint64_t w;
      std::memcpy(&w, buf + i, 8);
      h = mix64(h ^ w);
    }
    std::uint64_t tail = 0;
    for (int b = 0; i < got; ++i, b += 8)
      tail |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << b;
    if (got % 8) h = mix64(h ^ tail);
  }
  return mix64(h ^ total);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct TransformOpts {
  std::string in, out;
};

void run_transform(const TransformOpts& o) {
  Dataset ds = read_libsvm(o.in);
  Dataset out;
  out.dim = ds.dim * 2;
  out.labels = ds.labels;
  out.rows.reserve(ds.rows.size());
  for (const auto& r : ds.rows) {
    TransformedVector t = transform(r);
    out.rows.emplace_back(t.dim(), t.entries());
  }
  echo_config("transform --in " + o.in + " --out " + o.out +
              " (dim " + std::to_string(ds.dim) + " -> " + std::to_string(out.dim) + ")");
  write_artifact(o.out, [&](const std::string& p) { write_libsvm(out, p); });
}

struct GramOpts {
  std::string kernel, in, basis, out;
  double gamma1 = 0.0, gamma2 = 0.0;
  unsigned threads = 0;
};

void run_gram(const GramOpts& o) {
  KernelSpec spec = KernelSpec::parse(o.kernel, o.gamma1, o.gamma2);
  Dataset rows = read_libsvm(o.in);
  echo_config("gram --kernel " + o.kernel + " --gamma1 " + format_double(o.gamma1) +
              " --gamma2 " + format_double(o.gamma2) + " --in " + o.in +
              (o.basis.empty() ? "" : " --basis " + o.basis) + " --out " + o.out +
              " --threads " + std::to_string(o.threads));
  if (o.basis.empty()) {
    GramMatrix g = gram(rows, spec, o.threads);
    write_artifact(o.out, [&](const std::string& p) { write_precomputed(g, rows.labels, p); });
  } else {
    Dataset basis = read_libsvm(o.basis);
    align_dims(rows, basis);
    KernelBlock blk = cross_gram(rows, basis, spec, o.threads);
    write_artifact(o.out,
                   [&](const std::string& p) { write_precomputed(blk, rows.labels, p); });
  }
}

struct HashOpts {
  std::string in, out;
  double gamma = 1.0;
  std::uint32_t k = 0;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

void run_hash(const HashOpts& o) {
  Dataset ds = read_libsvm(o.in);
  HashConfig config{o.gamma, o.k, o.seed, ds.dim * 2};
  config.validate();

  const char* cache_dir = std::getenv("GMMKIT_CACHE_DIR");
  std::string cache_path;
  if (cache_dir && *cache_dir) {
    std::uint64_t key = mix64(file_fingerprint(o.in) ^ config.digest());
    cache_path = (fs::path(cache_dir) / ("sig-" + hex64(key) + ".txt")).string();
  }

  std::string cache_state = cache_path.empty() ? "off" : "miss";
  if (!cache_path.empty() && fs::exists(cache_path)) cache_state = "hit";
  echo_config("hash --gamma " + format_double(o.gamma) + " --k " + std::to_string(o.k) +
              " --seed " + std::to_string(o.seed) + " --in " + o.in + " --out " + o.out +
              " --threads " + std::to_string(o.threads) + " (dim " +
              std::to_string(config.dim) + ", cache " + cache_state + ")");

  if (cache_state == "hit") {
    write_artifact(o.out, [&](const std::string& p) { fs::copy_file(cache_path, p); });
    return;
  }
  auto sigs = signatures(ds, config, o.threads);
  write_artifact(o.out, [&](const std::string& p) { write_signatures(p, config, sigs); });
  if (!cache_path.empty()) {
    fs::create_directories(fs::path(cache_path).parent_path());
    write_artifact(cache_path, [&](const std::string& p) { fs::copy_file(o.out, p); });
  }
}

struct FeaturizeOpts {
  std::string in, labels_from, out;
  std::uint32_t b = 0;
  unsigned threads = 0;
};

void run_featurize(const FeaturizeOpts& o) {
  SignatureFile sf = read_signatures(o.in);
  Dataset labeled = read_libsvm(o.labels_from);
  if (labeled.size() != sf.rows.size())
    throw std::runtime_error("--labels-from has " + std::to_string(labeled.size()) +
                             " rows, signature file has " + std::to_string(sf.rows.size()));
  FeatureConfig fc{o.b, sf.config.k};
  echo_config("featurize --b " + std::to_string(o.b) + " --in " + o.in + " --labels-from " +
              o.labels_from + " --out " + o.out + " (k " + std::to_string(fc.k) +
              ", feature dim " + std::to_string(fc.dim()) + ")");
  Dataset feats = encode_dataset(sf.rows, labeled.labels, fc, o.threads);
  write_artifact(o.out, [&](const std::string& p) { write_libsvm(feats, p); });
}

struct TrainOpts {
  std::string in, out;
  TrainConfig cfg;
};

void run_train(const TrainOpts& o) {
  Dataset ds = read_libsvm(o.in);
  echo_config("train --C " + format_double(o.cfg.C) + " --max-iters " +
              std::to_string(o.cfg.max_iters) + " --tol " + format_double(o.cfg.tol) +
              " --seed " + std::to_string(o.cfg.seed) +
              (o.cfg.bias ? "" : " --no-bias") + " --in " + o.in + " --out " + o.out);
  LinearModel model = train_linear(ds, o.cfg);
  double acc = evaluate(model, ds);
  std::cerr << "train accuracy " << format_double(std::round(acc * 10000.0) / 100.0)
            << "% on " << ds.size() << " rows\n";
  write_artifact(o.out, [&](const std::string& p) { save_model(model, p); });
}

struct PredictOpts {
  std::string model, in, out;
};

void run_predict(const PredictOpts& o) {
  LinearModel model = load_model(o.model);
  Dataset ds = read_libsvm(o.in, model.dim);
  if (ds.dim > model.dim)
    throw std::runtime_error("input dim " + std::to_string(ds.dim) +
                             " exceeds model dim " + std::to_string(model.dim));
  echo_config("predict --model " + o.model + " --in " + o.in + " --out " + o.out);
  std::size_t correct = 0;
  std::vector<int> preds(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    preds[i] = predict_one(model, ds.rows[i]);
    if (preds[i] == ds.labels[i]) ++correct;
  }
  write_artifact(o.out, [&](const std::string& p) {
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot open " + p + " for writing");
    for (int v : preds) f << v << '\n';
    f.flush();
    if (!f) throw std::runtime_error("write to " + p + " failed");
  });
  double acc = std::round(10000.0 * static_cast<double>(correct) /
                          static_cast<double>(ds.size())) / 100.0;
  std::cerr << "accuracy " << format_double(acc) << "% (" << correct << "/" << ds.size()
            << ")\n";
}

struct SweepOpts {
  std::string kernel, mode, gammas, preset, Cs, in, test, out;
  double gamma2 = 0.0;
  std::uint32_t k = 256, b = 8;
  std::uint64_t seed = 1;
  double C_unused = 0.0;
  unsigned threads = 0;
  TrainConfig train;
};

void run_sweep(const SweepOpts& o) {
  SweepGrid grid;
  grid.gammas = resolve_gammas(o.gammas, o.preset);
  grid.Cs = parse_list(o.Cs);
  grid.validate();

  std::string mode = o.mode;
  if (mode.empty()) mode = o.kernel == "pgmm" ? "hash" : "gram";
  if (mode != "hash" && mode != "gram")
    throw std::runtime_error("--mode must be hash or gram, got '" + mode + "'");
  if (mode == "hash" && o.kernel != "pgmm")
    throw std::runtime_error(
        "hash mode approximates the pgmm kernel; use --kernel pgmm (gamma 1 for plain gmm)");

  Dataset train_ds = read_libsvm(o.in);
  Dataset test_ds = read_libsvm(o.test);
  align_dims(train_ds, test_ds);

  echo_config("sweep --kernel " + o.kernel + " --mode " + mode + " --gammas " +
              join_list(grid.gammas) + " --Cs " + join_list(grid.Cs) + " --gamma2 " +
              format_double(o.gamma2) + " --k " + std::to_string(o.k) + " --b " +
              std::to_string(o.b) + " --seed " + std::to_string(o.seed) + " --threads " +
              std::to_string(o.threads) + " --in " + o.in + " --test " + o.test + " --out " +
              o.out);

  FeatureFactory factory;
  if (mode == "hash") {
    factory = [&](double gamma) {
      HashConfig hc{gamma, o.k, o.seed, train_ds.dim * 2};
      FeatureConfig fc{o.b, o.k};
      auto strain = signatures(train_ds, hc, 1);
      auto stest = signatures(test_ds, hc, 1);
      return std::make_pair(encode_dataset(strain, train_ds.labels, fc, 1),
                            encode_dataset(stest, test_ds.labels, fc, 1));
    };
  } else {
    factory = [&](double gamma) {
      KernelSpec spec = KernelSpec::parse(o.kernel, gamma, o.gamma2);
      GramMatrix g = gram(train_ds, spec, 1);
      KernelBlock blk = cross_gram(test_ds, train_ds, spec, 1);
      // Gram rows double as linear features, so the exact kernel runs through
      // the same trainer as the hashed pipeline.
      Dataset ftrain, ftest;
      ftrain.dim = static_cast<index_t>(g.n);
      ftrain.labels = train_ds.labels;
      for (std::size_t i = 0; i < g.n; ++i)
        ftrain.rows.push_back(SparseVector::from_dense(
            std::vector<double>(g.values.begin() + i * g.n, g.values.begin() + (i + 1) * g.n)));
      ftest.dim = static_cast<index_t>(blk.n_cols);
      ftest.labels = test_ds.labels;
      for (std::size_t i = 0; i < blk.n_rows; ++i)
        ftest.rows.push_back(SparseVector::from_dense(std::vector<double>(
            blk.values.begin() + i * blk.n_cols, blk.values.begin() + (i + 1) * blk.n_cols)));
      return std::make_pair(std::move(ftrain), std::move(ftest));
    };
  }

  SweepOptions opts;
  opts.kernel_name = o.kernel;
  opts.gamma2 = o.gamma2;
  opts.train = o.train;
  opts.train.seed = o.seed;
  opts.csv_path = o.out;
  opts.threads = o.threads;

  auto cells = sweep(factory, grid, opts);

  std::size_t failed = 0;
  std::cout << "kernel gamma1 gamma2 C accuracy\n";
  for (const auto& c : cells) {
    if (!c.ok) {
      ++failed;
      std::cerr << "cell gamma=" << format_double(c.gamma1) << " C=" << format_double(c.C)
                << " failed: " << c.error << '\n';
      continue;
    }
    std::cout << c.kernel << ' ' << format_double(c.gamma1) << ' ' << format_double(c.gamma2)
              << ' ' << format_double(c.C) << ' ' << format_double(c.accuracy) << '\n';
  }
  std::cout << "best over gamma:\n";
  for (auto [C, acc] : best_over_gamma(cells))
    std::cout << "C=" << format_double(C) << " accuracy=" << format_double(acc) << '\n';
  if (failed)
    throw std::runtime_error(std::to_string(failed) + " sweep cells failed; see stderr");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"min-max kernel toolkit: exact kernels, consistent weighted sampling, "
               "b-bit feature encoding, and a linear SVM"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  TransformOpts t;
  auto* tcmd = app.add_subcommand(
      "transform", "Split signed vectors into nonnegative positive/negative slots");
  tcmd->add_option("--in", t.in, "input dataset (LIBSVM format)")
      ->required()
      ->check(CLI::ExistingFile);
  tcmd->add_option("--out", t.out, "output dataset (LIBSVM format)")->required();

  GramOpts g;
  auto* gcmd =
      app.add_subcommand("gram", "Export a kernel matrix in LIBSVM precomputed format");
  gcmd->add_option("--kernel", g.kernel, "kernel name")
      ->required()
      ->check(CLI::IsMember({"linear", "rbf", "gmm", "egmm", "pgmm", "epgmm"}));
  gcmd->add_option("--gamma1", g.gamma1, "kernel gamma (power for pgmm/epgmm)");
  gcmd->add_option("--gamma2", g.gamma2, "outer exponent for epgmm");
  gcmd->add_option("--in", g.in, "rows of the output matrix (LIBSVM format)")
      ->required()
      ->check(CLI::ExistingFile);
  gcmd->add_option("--basis", g.basis,
                   "columns of the output matrix; omit for a square gram of --in")
      ->check(CLI::ExistingFile);
  gcmd->add_option("--out", g.out, "output kernel file")->required();
  gcmd->add_option("--threads", g.threads, "worker threads (0 = all cores)");

  HashOpts h;
  auto* hcmd = app.add_subcommand("hash", "Consistent weighted sampling signatures");
  hcmd->add_option("--gamma", h.gamma, "hashing gamma (pgmm power)")->required();
  hcmd->add_option("--k", h.k, "samples per vector")->required();
  hcmd->add_option("--seed", h.seed, "master seed");
  hcmd->add_option("--in", h.in, "input dataset (LIBSVM format)")
      ->required()
      ->check(CLI::ExistingFile);
  hcmd->add_option("--out", h.out, "output signature file")->required();
  hcmd->add_option("--threads", h.threads, "worker threads (0 = all cores)");

  FeaturizeOpts f;
  auto* fcmd = app.add_subcommand(
      "featurize", "Expand signatures into b-bit one-hot binary features");
  fcmd->add_option("--b", f.b, "bits kept from each sampled index")->required();
  fcmd->add_option("--in", f.in, "signature file")->required()->check(CLI::ExistingFile);
  fcmd->add_option("--labels-from", f.labels_from, "dataset supplying row labels")
      ->required()
      ->check(CLI::ExistingFile);
  fcmd->add_option("--out", f.out, "output dataset (LIBSVM format)")->required();
  fcmd->add_option("--threads", f.threads, "worker threads (0 = all cores)");

  TrainOpts tr;
  auto* trcmd = app.add_subcommand("train", "Train the linear SVM (one-vs-rest)");
  trcmd->add_option("--C", tr.cfg.C, "regularization parameter");
  trcmd->add_option("--max-iters", tr.cfg.max_iters, "epoch cap");
  trcmd->add_option("--tol", tr.cfg.tol, "projected-gradient stopping tolerance");
  trcmd->add_option("--seed", tr.cfg.seed, "permutation seed");
  trcmd->add_flag("--no-bias", [&tr](std::int64_t) { tr.cfg.bias = false; },
                  "drop the bias feature");
  trcmd->add_option("--in", tr.in, "training dataset (LIBSVM format)")
      ->required()
      ->check(CLI::ExistingFile);
  trcmd->add_option("--out", tr.out, "output model file")->required();

  PredictOpts p;
  auto* pcmd = app.add_subcommand("predict", "Predict labels with a trained model");
  pcmd->add_option("--model", p.model, "model file")->required()->check(CLI::ExistingFile);
  pcmd->add_option("--in", p.in, "dataset to predict (LIBSVM format)")
      ->required()
      ->check(CLI::ExistingFile);
  pcmd->add_option("--out", p.out, "output predictions, one label per line")->required();

  SweepOpts s;
  auto* scmd = app.add_subcommand("sweep", "Grid-evaluate (gamma, C) cells");
  scmd->add_option("--kernel", s.kernel, "kernel name")
      ->required()
      ->check(CLI::IsMember({"linear", "rbf", "gmm", "egmm", "pgmm", "epgmm"}));
  scmd->add_option("--mode", s.mode,
                   "hash: sample-and-encode pipeline; gram: exact kernel rows as features "
                   "(default: hash for pgmm, gram otherwise)");
  scmd->add_option("--gammas", s.gammas, "comma-separated gamma list");
  scmd->add_option("--preset", s.preset, "named gamma grid: rbf58 or pgmm24");
  scmd->add_option("--Cs", s.Cs, "comma-separated C list")->required();
  scmd->add_option("--gamma2", s.gamma2, "outer exponent for epgmm");
  scmd->add_option("--k", s.k, "hash samples per vector (hash mode)");
  scmd->add_option("--b", s.b, "bits per sampled index (hash mode)");
  scmd->add_option("--seed", s.seed, "master seed (hashing and training)");
  scmd->add_option("--max-iters", s.train.max_iters, "training epoch cap");
  scmd->add_option("--tol", s.train.tol, "training stopping tolerance");
  scmd->add_option("--in", s.in, "training dataset (LIBSVM format)")
      ->required()
      ->check(CLI::ExistingFile);
  scmd->add_option("--test", s.test, "test dataset (LIBSVM format)")
      ->required()
      ->check(CLI::ExistingFile);
  scmd->add_option("--out", s.out, "results CSV (appended per cell; resumable)")->required();
  scmd->add_option("--threads", s.threads, "worker threads (0 = all cores)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (tcmd->parsed())
      run_transform(t);
    else if (gcmd->parsed())
      run_gram(g);
    else if (hcmd->parsed())
      run_hash(h);
    else if (fcmd->parsed())
      run_featurize(f);
    else if (trcmd->parsed())
      run_train(tr);
    else if (pcmd->parsed())
      run_predict(p);
    else if (scmd->parsed())
      run_sweep(s);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
