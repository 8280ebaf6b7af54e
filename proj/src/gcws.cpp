#include "gmmkit/gcws.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "gmmkit/parallel.hpp"
#include "gmmkit/rng.hpp"

namespace gmmkit {

void HashConfig::validate() const {
  if (!(gamma > 0.0 && std::isfinite(gamma)))
    throw std::invalid_argument("HashConfig: gamma must be positive, got " +
                                std::to_string(gamma));
  if (k == 0) throw std::invalid_argument("HashConfig: k must be at least 1");
  if (dim == 0 || dim % 2 != 0)
    throw std::invalid_argument("HashConfig: dim must be a positive even number, got " +
                                std::to_string(dim));
}

std::uint64_t HashConfig::digest() const {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  h = mix64(h ^ std::bit_cast<std::uint64_t>(gamma));
  h = mix64(h ^ k);
  h = mix64(h ^ seed);
  h = mix64(h ^ dim);
  return h;
}

CwsRandoms draw_randoms(std::uint64_t seed, std::uint32_t sample, index_t coord) {
  // One cell per (seed, sample, coordinate); five uniform slots per cell feed
  // the two Gamma(2,1) variates (as sums of two unit exponentials) and beta.
  std::uint64_t cell = mix64(mix64(seed ^ 0x8f1bbcdcbfa53e0bULL) ^
                             ((static_cast<std::uint64_t>(sample) << 32) | coord));
  auto u = [cell](std::uint64_t slot) {
    return unit_open(mix64(cell + slot * 0x9e3779b97f4a7c15ULL));
  };
  CwsRandoms out;
  out.r = -std::log(u(0)) - std::log(u(1));
  out.c = -std::log(u(2)) - std::log(u(3));
  out.beta = u(4);
  return out;
}

HashSample hash_one(const TransformedVector& v, const HashConfig& config,
                    std::uint32_t sample) {
  if (v.empty()) throw std::invalid_argument("hash_one: cannot hash an all-zero vector");
  if (v.dim() != config.dim)
    throw std::invalid_argument("hash_one: vector dim " + std::to_string(v.dim()) +
                                " does not match config dim " + std::to_string(config.dim));

  double best_a = std::numeric_limits<double>::infinity();
  index_t best_i = 0;
  double best_t = 0.0;
  for (const Entry& e : v.entries()) {
    CwsRandoms rnd = draw_randoms(config.seed, sample, e.index);
    double t = std::floor(config.gamma * std::log(e.value) / rnd.r + rnd.beta);
    double a = std::log(rnd.c) - rnd.r * (t + 1.0 - rnd.beta);
    if (a < best_a) {
      best_a = a;
      best_i = e.index;
      best_t = t;
    }
  }
  return {best_i, static_cast<std::int64_t>(best_t)};
}

HashSignature signature(const TransformedVector& v, const HashConfig& config) {
  config.validate();
  HashSignature sig;
  sig.config_digest = config.digest();
  sig.samples.reserve(config.k);
  for (std::uint32_t j = 0; j < config.k; ++j) sig.samples.push_back(hash_one(v, config, j));
  return sig;
}

std::vector<HashSignature> signatures(const Dataset& data, const HashConfig& config,
                                      unsigned threads) {
  config.validate();
  data.validate();
  if (2 * data.dim != config.dim)
    throw std::invalid_argument("signatures: config dim " + std::to_string(config.dim) +
                                " is not twice the dataset dim " + std::to_string(data.dim));

  std::vector<HashSignature> out(data.size());
  parallel_for(data.size(), threads, [&](std::size_t i) {
    try {
      out[i] = signature(transform(data.rows[i]), config);
    } catch (const std::exception& e) {
      throw std::runtime_error("signatures: row " + std::to_string(i) + ": " + e.what());
    }
  });
  return out;
}

double estimate_collision(const HashSignature& a, const HashSignature& b,
                          CollisionMode mode) {
  if (a.config_digest != b.config_digest)
    throw std::invalid_argument("estimate_collision: signatures come from different configs");
  if (a.samples.size() != b.samples.size() || a.samples.empty())
    throw std::invalid_argument("estimate_collision: sample counts differ or are zero");

  std::size_t hits = 0;
  for (std::size_t j = 0; j < a.samples.size(); ++j) {
    if (mode == CollisionMode::full) {
      if (a.samples[j] == b.samples[j]) ++hits;
    } else {
      if (a.samples[j].istar == b.samples[j].istar) ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(a.samples.size());
}

}  // namespace gmmkit
