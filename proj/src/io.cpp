#include "gmmkit/io.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmmkit/featurize.hpp"

namespace gmmkit {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_double17(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

[[noreturn]] void fail_line(const std::string& path, std::size_t lineno,
                            const std::string& msg) {
  throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + msg);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path + " for reading");
  return in;
}

void finish_out(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

// from_chars rejects a leading '+', which LIBSVM labels and values often
// carry; skip it here.
const char* skip_plus(const std::string& tok) {
  return (tok.size() > 1 && tok[0] == '+') ? tok.data() + 1 : tok.data();
}

bool parse_int(const std::string& tok, long long& out) {
  const char* first = skip_plus(tok);
  auto res = std::from_chars(first, tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

bool parse_real(const std::string& tok, double& out) {
  const char* first = skip_plus(tok);
  auto res = std::from_chars(first, tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

struct RawRow {
  int label = 0;
  std::vector<Entry> entries;
};

// Shared line-level parser; label interpretation is the caller's.
Dataset read_libsvm_impl(const std::string& path, LabelMap* labels, index_t min_dim) {
  std::ifstream in = open_in(path);

  std::vector<RawRow> raw;
  index_t dim = min_dim;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream fields(line);
    std::string tok;
    if (!(fields >> tok)) {
      std::cerr << path << ":" << lineno << ": warning: skipping empty line\n";
      continue;
    }

    RawRow row;
    if (labels) {
      row.label = labels->intern(tok);
    } else {
      long long lab;
      if (!parse_int(tok, lab))
        fail_line(path, lineno,
                  "label '" + tok + "' is not an integer (use the label-map reader)");
      row.label = static_cast<int>(lab);
    }

    long long prev_idx = 0;
    while (fields >> tok) {
      auto colon = tok.find(':');
      if (colon == std::string::npos)
        fail_line(path, lineno, "expected idx:val, got '" + tok + "'");
      long long idx;
      double val;
      if (!parse_int(tok.substr(0, colon), idx) || idx < 1)
        fail_line(path, lineno, "bad feature index in '" + tok + "'");
      if (!parse_real(tok.substr(colon + 1), val))
        fail_line(path, lineno, "bad feature value in '" + tok + "'");
      if (idx <= prev_idx)
        fail_line(path, lineno, "feature indices not increasing at '" + tok + "'");
      prev_idx = idx;
      if (static_cast<index_t>(idx) > dim) dim = static_cast<index_t>(idx);
      if (val != 0.0) row.entries.push_back({static_cast<index_t>(idx) - 1, val});
    }
    raw.push_back(std::move(row));
  }

  Dataset data;
  data.dim = dim;
  data.rows.reserve(raw.size());
  data.labels.reserve(raw.size());
  for (auto& row : raw) {
    data.rows.emplace_back(dim, std::move(row.entries));
    data.labels.push_back(row.label);
  }
  return data;
}

}  // namespace

int LabelMap::intern(const std::string& name) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  names.push_back(name);
  return static_cast<int>(names.size()) - 1;
}

void LabelMap::save(const std::string& path) const {
  std::ofstream out = open_out(path);
  for (const auto& n : names) out << n << '\n';
  finish_out(out, path);
}

LabelMap LabelMap::load(const std::string& path) {
  std::ifstream in = open_in(path);
  LabelMap map;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) map.names.push_back(line);
  return map;
}

Dataset read_libsvm(const std::string& path, index_t min_dim) {
  return read_libsvm_impl(path, nullptr, min_dim);
}

Dataset read_libsvm(const std::string& path, LabelMap& labels, index_t min_dim) {
  return read_libsvm_impl(path, &labels, min_dim);
}

void write_libsvm(const Dataset& data, const std::string& path) {
  data.validate();
  std::ofstream out = open_out(path);
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    out << data.labels[i];
    for (const Entry& e : data.rows[i].entries())
      out << ' ' << e.index + 1 << ':' << format_double(e.value);
    out << '\n';
  }
  finish_out(out, path);
}

namespace {

void write_precomputed_rows(std::ofstream& out, const std::vector<int>& labels,
                            const std::vector<int>& row_ids, const double* values,
                            std::size_t n_rows, std::size_t n_cols) {
  for (std::size_t i = 0; i < n_rows; ++i) {
    out << labels[i] << " 0:" << row_ids[i];
    for (std::size_t j = 0; j < n_cols; ++j)
      out << ' ' << j + 1 << ':' << format_double17(values[i * n_cols + j]);
    out << '\n';
  }
}

}  // namespace

void write_precomputed(const GramMatrix& gram, const std::vector<int>& labels,
                       const std::string& path) {
  if (labels.size() != gram.n)
    throw std::invalid_argument("write_precomputed: " + std::to_string(labels.size()) +
                                " labels for " + std::to_string(gram.n) + " rows");
  std::ofstream out = open_out(path);
  write_precomputed_rows(out, labels, gram.row_ids, gram.values.data(), gram.n, gram.n);
  finish_out(out, path);
}

void write_precomputed(const KernelBlock& block, const std::vector<int>& labels,
                       const std::string& path) {
  if (labels.size() != block.n_rows)
    throw std::invalid_argument("write_precomputed: " + std::to_string(labels.size()) +
                                " labels for " + std::to_string(block.n_rows) + " rows");
  std::ofstream out = open_out(path);
  write_precomputed_rows(out, labels, block.row_ids, block.values.data(), block.n_rows,
                         block.n_cols);
  finish_out(out, path);
}

void write_signatures(const std::string& path, const HashConfig& config,
                      const std::vector<HashSignature>& rows) {
  config.validate();
  std::uint64_t digest = config.digest();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].config_digest != digest)
      throw std::invalid_argument("write_signatures: row " + std::to_string(i) +
                                  " was hashed under a different config");
    if (rows[i].samples.size() != config.k)
      throw std::invalid_argument("write_signatures: row " + std::to_string(i) +
                                  " has wrong sample count");
  }

  std::ofstream out = open_out(path);
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(digest));
  out << "# gcws dim=" << config.dim << " gamma=" << format_double(config.gamma)
      << " k=" << config.k << " seed=" << config.seed << " digest=" << hex << '\n';
  std::uint32_t b_avail = bits_for_dim(config.dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << i + 1 << ' ' << config.k << ' ' << b_avail;
    for (const HashSample& s : rows[i].samples) out << ' ' << s.istar << ':' << s.tstar;
    out << '\n';
  }
  finish_out(out, path);
}

SignatureFile read_signatures(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty signature file");

  SignatureFile file;
  std::uint64_t digest = 0;
  {
    std::istringstream header(line);
    std::string hash_mark, tag, tok;
    header >> hash_mark >> tag;
    if (hash_mark != "#" || tag != "gcws")
      fail_line(path, 1, "not a signature file (bad header)");
    bool have_dim = false, have_gamma = false, have_k = false, have_seed = false,
         have_digest = false;
    while (header >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos) fail_line(path, 1, "bad header field '" + tok + "'");
      std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      if (key == "dim") {
        long long v;
        if (!parse_int(val, v) || v <= 0) fail_line(path, 1, "bad dim");
        file.config.dim = static_cast<index_t>(v);
        have_dim = true;
      } else if (key == "gamma") {
        if (!parse_real(val, file.config.gamma)) fail_line(path, 1, "bad gamma");
        have_gamma = true;
      } else if (key == "k") {
        long long v;
        if (!parse_int(val, v) || v <= 0) fail_line(path, 1, "bad k");
        file.config.k = static_cast<std::uint32_t>(v);
        have_k = true;
      } else if (key == "seed") {
        auto res = std::from_chars(val.data(), val.data() + val.size(), file.config.seed);
        if (res.ec != std::errc() || res.ptr != val.data() + val.size())
          fail_line(path, 1, "bad seed");
        have_seed = true;
      } else if (key == "digest") {
        auto res =
            std::from_chars(val.data(), val.data() + val.size(), digest, 16);
        if (res.ec != std::errc() || res.ptr != val.data() + val.size())
          fail_line(path, 1, "bad digest");
        have_digest = true;
      } else {
        fail_line(path, 1, "unknown header field '" + key + "'");
      }
    }
    if (!(have_dim && have_gamma && have_k && have_seed && have_digest))
      fail_line(path, 1, "incomplete header");
  }
  file.config.validate();
  if (file.config.digest() != digest)
    fail_line(path, 1, "digest does not match the header parameters");

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    long long row_id, k_row, b_avail;
    if (!(fields >> row_id >> k_row >> b_avail))
      fail_line(path, lineno, "bad signature row prefix");
    if (k_row != static_cast<long long>(file.config.k))
      fail_line(path, lineno, "row k does not match the header");

    HashSignature sig;
    sig.config_digest = digest;
    sig.samples.reserve(file.config.k);
    std::string tok;
    while (fields >> tok) {
      auto colon = tok.find(':');
      if (colon == std::string::npos)
        fail_line(path, lineno, "expected istar:tstar, got '" + tok + "'");
      long long istar, tstar;
      if (!parse_int(tok.substr(0, colon), istar) || istar < 0 ||
          static_cast<index_t>(istar) >= file.config.dim)
        fail_line(path, lineno, "bad istar in '" + tok + "'");
      if (!parse_int(tok.substr(colon + 1), tstar))
        fail_line(path, lineno, "bad tstar in '" + tok + "'");
      sig.samples.push_back({static_cast<index_t>(istar), tstar});
    }
    if (sig.samples.size() != file.config.k)
      fail_line(path, lineno, "row has " + std::to_string(sig.samples.size()) +
                                  " samples, header says " + std::to_string(file.config.k));
    file.row_ids.push_back(static_cast<int>(row_id));
    file.rows.push_back(std::move(sig));
  }
  return file;
}

void save_model(const LinearModel& model, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "gmmkit-linear-model 1\n";
  out << "classes " << model.labels.size() << '\n';
  out << "labels";
  for (int l : model.labels) out << ' ' << l;
  out << '\n';
  out << "dim " << model.dim << '\n';
  out << "bias " << (model.bias ? 1 : 0) << '\n';
  for (const auto& w : model.weights) {
    out << "w";
    for (double x : w) out << ' ' << format_double(x);
    out << '\n';
  }
  finish_out(out, path);
}

LinearModel load_model(const std::string& path) {
  std::ifstream in = open_in(path);
  LinearModel model;
  std::string line, tok;
  std::size_t lineno = 0;

  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) throw std::runtime_error(path + ": truncated before " + what);
    ++lineno;
    return std::istringstream(line);
  };

  {
    auto hdr = next_line("magic");
    int version = 0;
    hdr >> tok >> version;
    if (tok != "gmmkit-linear-model" || version != 1)
      fail_line(path, lineno, "not a gmmkit linear model");
  }
  std::size_t n_classes = 0;
  {
    auto s = next_line("classes");
    s >> tok >> n_classes;
    if (tok != "classes" || n_classes < 1) fail_line(path, lineno, "bad classes line");
  }
  {
    auto s = next_line("labels");
    s >> tok;
    if (tok != "labels") fail_line(path, lineno, "bad labels line");
    int l;
    while (s >> l) model.labels.push_back(l);
    if (model.labels.size() != n_classes) fail_line(path, lineno, "label count mismatch");
  }
  {
    auto s = next_line("dim");
    s >> tok >> model.dim;
    if (tok != "dim") fail_line(path, lineno, "bad dim line");
  }
  {
    auto s = next_line("bias");
    int b = 0;
    s >> tok >> b;
    if (tok != "bias") fail_line(path, lineno, "bad bias line");
    model.bias = b != 0;
  }
  std::size_t expect = static_cast<std::size_t>(model.dim) + (model.bias ? 1 : 0);
  for (std::size_t c = 0; c < n_classes; ++c) {
    auto s = next_line("weights");
    s >> tok;
    if (tok != "w") fail_line(path, lineno, "bad weight line");
    std::vector<double> w;
    w.reserve(expect);
    while (s >> tok) {
      double x;
      if (!parse_real(tok, x)) fail_line(path, lineno, "bad weight '" + tok + "'");
      w.push_back(x);
    }
    if (w.size() != expect)
      fail_line(path, lineno, "expected " + std::to_string(expect) + " weights, got " +
                                  std::to_string(w.size()));
    model.weights.push_back(std::move(w));
  }
  return model;
}

}  // namespace gmmkit
