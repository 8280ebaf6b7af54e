// Acceptance harness: one criterion per invocation, one PASS/FAIL/SKIP line
// on stdout. Exit 0 on pass, 1 on fail, 77 when the criterion needs external
// pieces that are not present.
//
// Usage: acceptance <criterion 1..8> [path-to-cli]

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gmmkit/featurize.hpp"
#include "gmmkit/gcws.hpp"
#include "gmmkit/io.hpp"
#include "gmmkit/kernels.hpp"
#include "gmmkit/learn.hpp"
#include "gmmkit/rng.hpp"
#include "gmmkit/sparse.hpp"
#include "support/synth.hpp"

using namespace gmmkit;
namespace fs = std::filesystem;

namespace {

constexpr int kPass = 0, kFail = 1, kSkip = 77;

int report(int crit, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s (%s)\n", crit, ok ? "PASS" : "FAIL", detail.c_str());
  return ok ? kPass : kFail;
}

int skip(int crit, const std::string& why) {
  std::printf("criterion %d: SKIP (%s)\n", crit, why.c_str());
  return kSkip;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

bool run_cmd(const std::string& cmd) { return std::system(cmd.c_str()) == 0; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// --- criterion 1: full-mode collision frequency matches the exact kernel ---

int criterion_1() {
  SplitMix64 rng(101);
  const std::size_t k = 10000;
  const double gammas[] = {0.25, 1.0, 5.0};

  std::vector<std::pair<SparseVector, SparseVector>> pairs;
  for (int i = 0; i < 50; ++i)
    pairs.emplace_back(synth::nonzero_sparse_signed(rng, 100, 0.2),
                       synth::nonzero_sparse_signed(rng, 100, 0.2));

  std::string counts;
  for (double gamma : gammas) {
    int within = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      auto ta = transform(pairs[i].first);
      auto tb = transform(pairs[i].second);
      double p = pgmm(ta, tb, gamma);
      HashConfig cfg{gamma, k, 7000 + static_cast<std::uint64_t>(i), 200};
      double est = estimate_collision(signature(ta, cfg), signature(tb, cfg),
                                      CollisionMode::full);
      double band = 4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(k));
      if (std::fabs(est - p) <= band) ++within;
    }
    counts += (counts.empty() ? "" : ", ") + std::to_string(within) + "/50 at gamma " + fmt(gamma);
    if (within < 48) return report(1, false, "only " + counts);
  }
  return report(1, true, counts + ", each within 4*sqrt(p(1-p)/k)");
}

// --- criterion 2: hashing with gamma equals hashing the powered vector ---

int criterion_2() {
  SplitMix64 rng(102);
  int exact = 0;
  for (int t = 0; t < 100; ++t) {
    auto v = transform(synth::nonzero_sparse_signed(rng, 30, 0.4));
    double gamma = 0.1 + 5.0 * rng.uniform();
    std::size_t j = rng.below(64);
    HashConfig tuned{gamma, 64, 11, 60};
    HashConfig plain{1.0, 64, 11, 60};
    HashSample a = hash_one(v, tuned, j);
    HashSample b = hash_one(power(v, gamma), plain, j);
    if (a.istar == b.istar && a.tstar == b.tstar) ++exact;
  }
  return report(2, exact == 100,
                std::to_string(exact) + "/100 (istar, tstar) pairs identical");
}

// --- criterion 3: pgmm/epgmm collapse onto gmm/egmm at gamma 1 ---

int criterion_3() {
  SplitMix64 rng(103);
  int exact_gmm = 0, exact_egmm = 0;
  double worst_rel = 0.0;
  for (int t = 0; t < 1000; ++t) {
    auto [a, b] = synth::overlapping_pair(rng, 50, 0.3);
    auto ta = transform(a), tb = transform(b);
    if (pgmm(ta, tb, 1.0) == gmm(ta, tb)) ++exact_gmm;
    double g2 = 0.1 + 10.0 * rng.uniform();
    if (epgmm(ta, tb, 1.0, g2) == egmm(ta, tb, g2)) ++exact_egmm;
    double g = 0.1 + 5.0 * rng.uniform();
    double lhs = pgmm(ta, tb, g);
    double rhs = gmm(power(ta, g), power(tb, g));
    worst_rel = std::max(worst_rel, std::fabs(lhs - rhs) / std::max(1e-300, std::fabs(rhs)));
  }
  bool ok = exact_gmm == 1000 && exact_egmm == 1000 && worst_rel <= 1e-10;
  return report(3, ok,
                "gamma-1 exact " + std::to_string(exact_gmm) + "/1000 gmm, " +
                    std::to_string(exact_egmm) + "/1000 egmm; powered-vector worst rel " +
                    fmt(worst_rel));
}

// --- criterion 4: joint scaling leaves gmm and pgmm unchanged ---

int criterion_4() {
  SplitMix64 rng(104);
  const double scales[] = {1e-3, 1.0, 1e3};
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    auto [a, b] = synth::overlapping_pair(rng, 50, 0.3);
    double gamma = 0.1 + 5.0 * rng.uniform();
    double base_g = gmm(transform(a), transform(b));
    double base_p = pgmm(transform(a), transform(b), gamma);
    for (double c : scales) {
      auto sa = transform(synth::scale_vector(a, c));
      auto sb = transform(synth::scale_vector(b, c));
      worst = std::max(worst, std::fabs(gmm(sa, sb) - base_g) / std::max(1e-300, base_g));
      worst = std::max(worst,
                       std::fabs(pgmm(sa, sb, gamma) - base_p) / std::max(1e-300, base_p));
    }
  }
  return report(4, worst <= 1e-12, "worst relative drift " + fmt(worst) + " over 1000 pairs");
}

// --- criterion 5: one-hot shape and the index-only equivalence ---

int criterion_5() {
  SplitMix64 rng(105);
  const index_t D = 37;  // transformed width 74, needs 7 bits
  const std::size_t k = 64;
  HashConfig hc{0.5, k, 21, 2 * D};
  FeatureConfig fine{bits_for_dim(2 * D), k};
  if (fine.b != 7) return report(5, false, "unexpected bit width for dim 74");

  int shape_ok = 0, equal = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    auto a = transform(synth::nonzero_sparse_signed(rng, D, 0.4));
    auto b = transform(synth::nonzero_sparse_signed(rng, D, 0.4));
    auto sa = signature(a, hc), sb = signature(b, hc);
    auto fa = encode(sa, fine), fb = encode(sb, fine);

    bool shaped = fa.ones.size() == k;
    for (std::size_t j = 0; j < fa.ones.size() && shaped; ++j)
      shaped = fa.ones[j] >= (j << fine.b) && fa.ones[j] < ((j + 1) << fine.b);
    if (shaped) ++shape_ok;

    double normalized =
        static_cast<double>(inner_product(fa, fb)) / static_cast<double>(k);
    if (normalized == estimate_collision(sa, sb, CollisionMode::index_only)) ++equal;
  }
  bool ok = shape_ok == trials && equal == trials;
  return report(5, ok,
                "k-ones block shape " + std::to_string(shape_ok) + "/" +
                    std::to_string(trials) + ", normalized inner product exact " +
                    std::to_string(equal) + "/" + std::to_string(trials));
}

// --- criterion 6: byte-level determinism across reruns and thread counts ---

std::vector<std::string> csv_cells_without_seconds(const std::string& path) {
  std::vector<std::string> rows;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    auto cut = line.rfind(',');
    rows.push_back(cut == std::string::npos ? line : line.substr(0, cut));
  }
  return rows;
}

int criterion_6(const std::string& cli) {
  if (cli.empty()) return skip(6, "cli binary path not supplied");
  fs::path dir = fresh_dir("gmmkit_accept6");

  SplitMix64 rng(106);
  Dataset train, test;
  train.dim = test.dim = 40;
  for (int i = 0; i < 60; ++i) {
    train.rows.push_back(synth::nonzero_sparse_signed(rng, 40, 0.3));
    train.labels.push_back(1 + i % 3);
    test.rows.push_back(synth::nonzero_sparse_signed(rng, 40, 0.3));
    test.labels.push_back(1 + i % 3);
  }
  std::string train_path = (dir / "train.libsvm").string();
  std::string test_path = (dir / "test.libsvm").string();
  write_libsvm(train, train_path);
  write_libsvm(test, test_path);

  std::string log = " > " + (dir / "log.txt").string() + " 2>&1";
  auto sig = [&](const std::string& name, int threads) {
    std::string out = (dir / name).string();
    if (!run_cmd(cli + " hash --gamma 0.8 --k 64 --seed 3 --in " + train_path + " --out " +
                 out + " --threads " + std::to_string(threads) + log))
      return std::string();
    return out;
  };
  std::string s1 = sig("a.sigs", 1), s2 = sig("b.sigs", 4), s3 = sig("c.sigs", 1);
  if (s1.empty() || s2.empty() || s3.empty()) return report(6, false, "hash command failed");
  if (slurp(s1) != slurp(s2) || slurp(s1) != slurp(s3))
    return report(6, false, "signature files differ across threads or reruns");

  auto sweep_cells = [&](const std::string& name, int threads) {
    std::string out = (dir / name).string();
    if (!run_cmd(cli + " sweep --kernel pgmm --mode hash --gammas 0.5,1 --Cs 0.1,1" +
                 " --k 32 --b 6 --in " + train_path + " --test " + test_path + " --out " +
                 out + " --threads " + std::to_string(threads) + log))
      return std::vector<std::string>();
    return csv_cells_without_seconds(out);
  };
  auto c1 = sweep_cells("sweep1.csv", 1);
  auto c2 = sweep_cells("sweep2.csv", 4);
  auto c3 = sweep_cells("sweep3.csv", 1);
  if (c1.empty() || c2.empty() || c3.empty()) return report(6, false, "sweep command failed");
  if (c1 != c2 || c1 != c3)
    return report(6, false, "sweep cells differ across threads or reruns");

  fs::remove_all(dir);
  return report(6, true,
                "signatures and sweep cells identical for reruns and --threads {1, 4}");
}

// --- criterion 7: Car dataset through an external solver ---

double external_svm_accuracy(const fs::path& dir, const std::string& train_kernel,
                             const std::string& test_kernel, double C) {
  std::string model = (dir / "car.model").string();
  std::string pred = (dir / "car.pred").string();
  std::string acc = (dir / "car.acc").string();
  char copt[32];
  std::snprintf(copt, sizeof copt, "%g", C);
  if (!run_cmd("svm-train -q -t 4 -c " + std::string(copt) + " " + train_kernel + " " +
               model + " > /dev/null 2>&1"))
    return -1.0;
  if (!run_cmd("svm-predict " + test_kernel + " " + model + " " + pred + " > " + acc +
               " 2>&1"))
    return -1.0;
  std::string text = slurp(acc);
  auto pos = text.find("Accuracy = ");
  if (pos == std::string::npos) return -1.0;
  return std::strtod(text.c_str() + pos + 11, nullptr);
}

int criterion_7() {
  const char* car_dir = std::getenv("GMMKIT_CAR_DIR");
  if (!car_dir || !*car_dir)
    return skip(7, "set GMMKIT_CAR_DIR to a directory holding car_train.libsvm and "
                   "car_test.libsvm; see scripts/fetch_car.py");
  if (!run_cmd("command -v svm-train > /dev/null 2>&1") ||
      !run_cmd("command -v svm-predict > /dev/null 2>&1"))
    return skip(7, "svm-train/svm-predict not on PATH");

  std::string train_path = (fs::path(car_dir) / "car_train.libsvm").string();
  std::string test_path = (fs::path(car_dir) / "car_test.libsvm").string();
  if (!fs::exists(train_path) || !fs::exists(test_path))
    return skip(7, "car_train.libsvm / car_test.libsvm missing under GMMKIT_CAR_DIR");

  Dataset train = read_libsvm(train_path);
  Dataset test = read_libsvm(test_path, train.dim);
  if (train.size() != 864 || test.size() != 864 || train.class_labels().size() != 4)
    return report(7, false, "expected the 864/864 four-class Car split");

  fs::path dir = fresh_dir("gmmkit_accept7");
  std::string train_kernel = (dir / "train.kernel").string();
  std::string test_kernel = (dir / "test.kernel").string();
  const double Cs[] = {0.01, 0.1, 1.0, 10.0, 100.0};

  auto best_over_C = [&](const KernelSpec& spec) {
    write_precomputed(gram(train, spec), train.labels, train_kernel);
    write_precomputed(cross_gram(test, train, spec), test.labels, test_kernel);
    double best = -1.0;
    for (double C : Cs)
      best = std::max(best, external_svm_accuracy(dir, train_kernel, test_kernel, C));
    return best;
  };

  double gmm_best = best_over_C(KernelSpec::parse("gmm", 0, 0));
  if (gmm_best < 0.0) return report(7, false, "external solver run failed");

  const double pgmm_gammas[] = {0.05, 0.1,  0.15, 0.2, 0.25, 0.3, 0.4,  0.5,  0.6,
                                0.75, 1.0,  1.25, 1.5, 2.0,  5.0, 10.0, 15.0, 20.0,
                                25.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0};
  double pgmm_best = -1.0;
  for (double g : pgmm_gammas)
    pgmm_best = std::max(pgmm_best, best_over_C(KernelSpec::parse("pgmm", g, 0)));

  bool ok = std::fabs(gmm_best - 98.96) <= 0.6 && pgmm_best >= 99.0;
  fs::remove_all(dir);
  return report(7, ok,
                "gmm best-over-C " + fmt(gmm_best) + "% (target 98.96 +/- 0.6), pgmm best " +
                    fmt(pgmm_best) + "% (target >= 99.0)");
}

// --- criterion 8: hashed pgmm features beat the raw linear baseline ---

// Reference accuracies measured once on this generator before the thresholds
// below were frozen.
constexpr double kPinnedRaw = 81.1;
constexpr double kPinnedHashed = 94.7;

int criterion_8() {
  SplitMix64 rng(108);
  const index_t D = 24;
  auto anchor = transform(synth::nonzero_sparse_signed(rng, D, 0.6));

  std::vector<SparseVector> points;
  std::vector<double> sims;
  for (int i = 0; i < 4000; ++i) {
    auto v = synth::nonzero_sparse_signed(rng, D, 0.5);
    sims.push_back(gmm(transform(v), anchor));
    points.push_back(std::move(v));
  }
  std::vector<double> sorted = sims;
  std::nth_element(sorted.begin(), sorted.begin() + 2000, sorted.end());
  double threshold = sorted[2000];

  Dataset train, test;
  train.dim = test.dim = D;
  for (std::size_t i = 0; i < points.size(); ++i) {
    Dataset& side = (i % 2 == 0) ? train : test;
    side.rows.push_back(points[i]);
    side.labels.push_back(sims[i] > threshold ? 2 : 1);
  }

  TrainConfig raw_cfg;
  double raw_best = 0.0;
  for (double C : {0.1, 1.0, 10.0}) {
    raw_cfg.C = C;
    raw_best = std::max(raw_best, 100.0 * evaluate(train_linear(train, raw_cfg), test));
  }

  FeatureConfig fc{8, 1024};
  TrainConfig hash_cfg;
  hash_cfg.max_iters = 300;
  hash_cfg.tol = 1e-3;
  double hashed_best = 0.0;
  for (double gamma : {0.25, 1.0, 5.0}) {
    HashConfig hc{gamma, 1024, 31, 2 * D};
    auto ftrain = encode_dataset(signatures(train, hc), train.labels, fc);
    auto ftest = encode_dataset(signatures(test, hc), test.labels, fc);
    hashed_best =
        std::max(hashed_best, 100.0 * evaluate(train_linear(ftrain, hash_cfg), ftest));
  }

  bool gap_ok = hashed_best >= raw_best + 5.0;
  bool pinned_ok = std::fabs(raw_best - kPinnedRaw) <= 1.0 &&
                   std::fabs(hashed_best - kPinnedHashed) <= 1.0;
  return report(8, gap_ok && pinned_ok,
                "raw linear " + fmt(raw_best) + "%, hashed pgmm " + fmt(hashed_best) +
                    "%, gap " + fmt(hashed_best - raw_best) + " points (need >= 5)");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <criterion 1..8> [cli-binary]\n");
    return 2;
  }
  int crit = std::atoi(argv[1]);
  std::string cli = argc > 2 ? argv[2] : "";
  try {
    switch (crit) {
      case 1: return criterion_1();
      case 2: return criterion_2();
      case 3: return criterion_3();
      case 4: return criterion_4();
      case 5: return criterion_5();
      case 6: return criterion_6(cli);
      case 7: return criterion_7();
      case 8: return criterion_8();
    }
  } catch (const std::exception& e) {
    std::printf("criterion %d: FAIL (unexpected error: %s)\n", crit, e.what());
    return kFail;
  }
  std::fprintf(stderr, "usage: acceptance <criterion 1..8> [cli-binary]\n");
  return 2;
}
