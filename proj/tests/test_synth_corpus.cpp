// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>

#include "trajprior/synth_corpus.hpp"

using namespace trajprior;

TEST_SUITE("synth_corpus") {
  TEST_CASE("small spec is reproducible under a fixed seed") {
    LatentSpec spec;
    spec.num_appearance_classes = 2;
    spec.num_motion_classes = 2;
    spec.seed = 7;
    const Corpus a = generate_corpus(spec, 8);
    const Corpus b = generate_corpus(spec, 8);
    REQUIRE(a.size() == 8);
    CHECK(a.appearance_labels() == b.appearance_labels());
    CHECK(a.motion_labels() == b.motion_labels());
    CHECK(serialize_corpus(a) == serialize_corpus(b));
    for (std::size_t v = 0; v < a.size(); ++v) {
      CHECK(a.bags[v].video_id == v);
      CHECK(a.bags[v].appearance_label < 2);
      CHECK(a.bags[v].motion_label < 2);
      CHECK(a.bags[v].descriptors.rows() >= spec.min_trajectories);
      CHECK(a.bags[v].descriptors.rows() <= spec.max_trajectories);
      CHECK(a.bags[v].descriptors.cols() == spec.descriptor_dim());
    }
    spec.seed = 8;
    CHECK(serialize_corpus(generate_corpus(spec, 8)) != serialize_corpus(a));
  }

  TEST_CASE("vanishing noise makes every trajectory of a video identical") {
    LatentSpec spec;
    spec.num_appearance_classes = 2;
    spec.num_motion_classes = 2;
    spec.noise_sigma = 1e-12;
    const Corpus c = generate_corpus(spec, 4);
    for (const auto& bag : c.bags) {
      const Matrix centered = bag.descriptors.rowwise() - bag.descriptors.colwise().mean();
      CHECK(centered.squaredNorm() < 1e-20);
    }
  }

  TEST_CASE("motion block: within-class mean distance below between-class distance") {
    LatentSpec spec;
    spec.seed = 11;
    const Corpus c = generate_corpus(spec, 512);
    Matrix means(static_cast<Eigen::Index>(c.size()), spec.motion_dim);
    for (std::size_t v = 0; v < c.size(); ++v) {
      means.row(static_cast<Eigen::Index>(v)) = c.bags[v].descriptors.rightCols(spec.motion_dim).colwise().mean();
    }
    double within = 0.0, between = 0.0;
    std::size_t nw = 0, nb = 0;
    for (Eigen::Index i = 0; i < means.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < means.rows(); ++j) {
        const double d = (means.row(i) - means.row(j)).norm();
        if (c.bags[i].motion_label == c.bags[j].motion_label) {
          within += d;
          ++nw;
        } else {
          between += d;
          ++nb;
        }
      }
    }
    CHECK(within / nw < between / nb);
  }

  TEST_CASE("motion class centers are pairwise distinct") {
    LatentSpec spec;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      spec.seed = seed;
      const auto centers = make_class_centers(spec);
      double min_dist = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < centers.motion.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < centers.motion.rows(); ++j) {
          min_dist = std::min(min_dist, (centers.motion.row(i) - centers.motion.row(j)).norm());
        }
      }
      CHECK(min_dist > 0.0);
    }
  }

  TEST_CASE("raw motion energy is attenuated relative to descriptor motion energy") {
    LatentSpec spec;
    spec.seed = 3;
    const Corpus c = generate_corpus(spec, 200);
    std::vector<double> diff;
    for (std::size_t v = 0; v < c.size(); ++v) {
      const double raw = c.raw[v].feature.tail(spec.motion_dim).squaredNorm();
      const double desc = c.bags[v].descriptors.rightCols(spec.motion_dim).rowwise().squaredNorm().mean();
      diff.push_back(raw - spec.motion_attenuation * desc);
    }
    double mean = 0.0;
    for (double d : diff) mean += d;
    mean /= static_cast<double>(diff.size());
    double var = 0.0;
    for (double d : diff) var += (d - mean) * (d - mean);
    const double se = std::sqrt(var / static_cast<double>(diff.size() - 1) / static_cast<double>(diff.size()));
    CHECK(mean <= 3.0 * se);
  }

  TEST_CASE("TJC1 round trip is bit-exact") {
    LatentSpec spec;
    spec.seed = 5;
    const Corpus c = generate_corpus(spec, 70);
    const std::string bytes = serialize_corpus(c);
    CHECK(bytes.substr(0, 4) == "TJC1");
    const Corpus d = deserialize_corpus(bytes);
    REQUIRE(d.size() == c.size());
    for (std::size_t v = 0; v < c.size(); ++v) {
      CHECK(d.bags[v].descriptors == c.bags[v].descriptors);
      CHECK(d.raw[v].feature == c.raw[v].feature);
      CHECK(d.bags[v].appearance_label == c.bags[v].appearance_label);
      CHECK(d.bags[v].motion_label == c.bags[v].motion_label);
    }
    CHECK(serialize_corpus(d) == bytes);

    const auto path = std::filesystem::temp_directory_path() / "trajprior_test_corpus.tjc";
    save_corpus(path, c);
    CHECK(serialize_corpus(load_corpus(path)) == bytes);
    std::filesystem::remove(path);
  }

  TEST_CASE("malformed corpus bytes are rejected") {
    LatentSpec spec;
    const std::string bytes = serialize_corpus(generate_corpus(spec, 64));
    CHECK_THROWS_AS(deserialize_corpus("TJF1" + bytes.substr(4)), FormatError);
    CHECK_THROWS_AS(deserialize_corpus(bytes.substr(0, bytes.size() / 2)), FormatError);
    CHECK_THROWS_AS(deserialize_corpus(bytes + "x"), FormatError);
  }

  TEST_CASE("invalid specs are configuration errors") {
    LatentSpec spec;
    CHECK_THROWS_AS(generate_corpus(spec, 63), ConfigError);
    LatentSpec bad = spec;
    bad.num_motion_classes = 1;
    CHECK_THROWS_AS(generate_corpus(bad, 64), ConfigError);
    bad = spec;
    bad.appearance_scale = 0.0;
    CHECK_THROWS_AS(generate_corpus(bad, 64), ConfigError);
    bad = spec;
    bad.noise_sigma = -1.0;
    CHECK_THROWS_AS(generate_corpus(bad, 64), ConfigError);
    bad = spec;
    bad.min_trajectories = 10;
    bad.max_trajectories = 5;
    CHECK_THROWS_AS(generate_corpus(bad, 64), ConfigError);
  }
}
