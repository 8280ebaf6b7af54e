#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "gmmkit/rng.hpp"
#include "gmmkit/sparse.hpp"
#include "support/oracle.hpp"
#include "support/synth.hpp"

using namespace gmmkit;

TEST_CASE("split transform maps signs to slot pairs") {
  auto t = transform(SparseVector::from_dense({-4, 6}));
  CHECK(t.dim() == 4);
  CHECK(t.to_dense() == std::vector<double>{0, 4, 6, 0});

  auto t2 = transform(SparseVector::from_dense({1, -2}));
  CHECK(t2.to_dense() == std::vector<double>{1, 0, 0, 2});
}

TEST_CASE("transform of an all-zero vector has no entries") {
  SparseVector u(3, {});
  auto t = transform(u);
  CHECK(t.dim() == 6);
  CHECK(t.empty());
}

TEST_CASE("transform agrees with the dense reference") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    auto u = synth::sparse_signed(rng, 40, 0.3);
    CHECK(transform(u).to_dense() == oracle::dense_split(u.to_dense()));
  }
}

TEST_CASE("l1 mass") {
  CHECK(l1_mass(SparseVector::from_dense({-4, 6})) == 10.0);
  CHECK(l1_mass(SparseVector(5, {})) == 0.0);
  CHECK(l1_mass(SparseVector::from_dense({1, -2})) == 3.0);
}

TEST_CASE("transform preserves total mass exactly") {
  SplitMix64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    auto u = synth::sparse_signed(rng, 64, 0.4, 100.0);
    auto tu = transform(u);
    double sum = 0.0;
    for (const auto& e : tu.entries()) sum += e.value;
    CHECK(sum == l1_mass(u));
  }
}

TEST_CASE("negation flips each slot pair") {
  SplitMix64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    auto u = synth::nonzero_sparse_signed(rng, 32, 0.4);
    auto neg = synth::scale_vector(u, -1.0);
    auto tu = transform(u).to_dense();
    auto tn = transform(neg).to_dense();
    for (index_t i = 0; i < u.dim(); ++i) {
      CHECK(tu[2 * i] == tn[2 * i + 1]);
      CHECK(tu[2 * i + 1] == tn[2 * i]);
      CHECK((tu[2 * i] == 0.0 || tu[2 * i + 1] == 0.0));
    }
  }
}

TEST_CASE("untransform inverts transform exactly") {
  SplitMix64 rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    auto u = synth::sparse_signed(rng, 50, 0.35, 7.5);
    CHECK(untransform(transform(u)) == u);
  }
}

TEST_CASE("sparse vector invariants are enforced") {
  CHECK_THROWS_AS(SparseVector(4, {{0, 1.0}, {0, 2.0}}), std::invalid_argument);
  CHECK_THROWS_AS(SparseVector(4, {{2, 1.0}, {1, 2.0}}), std::invalid_argument);
  CHECK_THROWS_AS(SparseVector(4, {{4, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(SparseVector(4, {{1, 0.0}}), std::invalid_argument);
  double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(SparseVector(4, {{1, inf}}), std::invalid_argument);
  CHECK_THROWS_AS(SparseVector(4, {{1, inf - inf}}), std::invalid_argument);
}

TEST_CASE("transformed vector invariants are enforced") {
  CHECK_THROWS_AS(TransformedVector(4, {{0, -1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(TransformedVector(4, {{0, 1.0}, {1, 2.0}}), std::invalid_argument);
  CHECK_THROWS_AS(TransformedVector(5, {}), std::invalid_argument);
  CHECK_NOTHROW(TransformedVector(4, {{0, 1.0}, {2, 2.0}}));
  CHECK_NOTHROW(TransformedVector(4, {{0, 1.0}, {3, 2.0}}));
}

TEST_CASE("dataset validation") {
  Dataset d;
  d.dim = 4;
  d.rows.push_back(SparseVector::from_dense({1, 0, 0, 2}));
  d.labels = {1, 2};
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  d.labels = {1};
  CHECK_NOTHROW(d.validate());
  d.rows.push_back(SparseVector::from_dense({1, 2}));
  d.labels = {1, 3};
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
}

TEST_CASE("class labels are sorted and unique") {
  Dataset d;
  d.dim = 2;
  for (int lab : {3, 1, 3, 2, 1}) {
    d.rows.push_back(SparseVector::from_dense({1, 1}));
    d.labels.push_back(lab);
  }
  CHECK(d.class_labels() == std::vector<int>{1, 2, 3});
}
