// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TRAJPRIOR_SYNTH_CORPUS_HPP_
#define TRAJPRIOR_SYNTH_CORPUS_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "trajprior/common.hpp"

namespace trajprior {

// Latent factor model for synthetic trajectory descriptors. Each descriptor
// is [appearance block ; motion block]; the two blocks are driven by
// independent class labels.
struct LatentSpec {
  std::uint32_t num_appearance_classes = 8;
  std::uint32_t num_motion_classes = 8;
  std::uint32_t appearance_dim = 16;
  std::uint32_t motion_dim = 16;
  double appearance_scale = 1.0;
  double motion_scale = 2.0;
  double noise_sigma = 1.0;
  std::uint32_t min_trajectories = 32;
  std::uint32_t max_trajectories = 96;
  // Multiplies the motion block of the encoder-facing raw feature.
  double motion_attenuation = 0.1;
  // Fresh noise added to the pooled raw feature before attenuation.
  double raw_noise_sigma = 0.5;
  std::uint64_t seed = 0;

  std::uint32_t descriptor_dim() const { return appearance_dim + motion_dim; }
  void validate() const;
};

struct DescriptorBag {
  std::uint32_t video_id = 0;
  Matrix descriptors;  // one trajectory per row
  std::uint32_t appearance_label = 0;
  std::uint32_t motion_label = 0;
};

struct RawVideoFeature {
  std::uint32_t video_id = 0;
  Vector feature;
};

struct Corpus {
  std::vector<DescriptorBag> bags;
  std::vector<RawVideoFeature> raw;

  std::size_t size() const { return bags.size(); }
  std::uint32_t descriptor_dim() const;
  std::uint32_t raw_dim() const;

  // N x raw_dim matrix of encoder inputs, in bag order.
  Matrix raw_matrix() const;
  Labels appearance_labels() const;
  Labels motion_labels() const;
};

// Frozen per-seed class centers, already multiplied by the block scales.
struct ClassCenters {
  Matrix appearance;  // num_appearance_classes x appearance_dim
  Matrix motion;      // num_motion_classes x motion_dim
};

ClassCenters make_class_centers(const LatentSpec& spec);

// Generates `num_videos` bags. Video v uses a generator seeded with
// (seed XOR v), so videos are independent of each other and of the count.
// All generated values are rounded to float precision so that the corpus
// survives the f32 on-disk format unchanged.
Corpus generate_corpus(const LatentSpec& spec, std::size_t num_videos);

// "TJC1" binary corpus format.
std::string serialize_corpus(const Corpus& corpus);
Corpus deserialize_corpus(std::string_view bytes);
void save_corpus(const std::filesystem::path& path, const Corpus& corpus);
Corpus load_corpus(const std::filesystem::path& path);

}  // namespace trajprior

#endif  // TRAJPRIOR_SYNTH_CORPUS_HPP_
