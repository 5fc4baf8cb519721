// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TRAJPRIOR_CONFIG_HPP_
#define TRAJPRIOR_CONFIG_HPP_

#include <json.hpp>

#include "trajprior/fv_pipeline.hpp"
#include "trajprior/synth_corpus.hpp"
#include "trajprior/trainer.hpp"

namespace trajprior {

// Missing keys keep their defaults; unknown keys are a ConfigError.
void to_json(nlohmann::json& j, const LatentSpec& s);
void from_json(const nlohmann::json& j, LatentSpec& s);
void to_json(nlohmann::json& j, const CodebookConfig& c);
void from_json(const nlohmann::json& j, CodebookConfig& c);
void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

// Top-level run configuration. Sub-seeds are derived from `seed` unless a
// section sets its own explicitly.
struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t num_videos = 512;
  LatentSpec corpus;
  CodebookConfig codebook;
  TrainConfig train;
  // Paths used by `train`; relative paths resolve against the config file.
  std::string corpus_path;
  std::string encoded_path;
  std::vector<std::uint32_t> eval_shots = {1, 5, 10};
  std::uint32_t eval_episodes = 20;
};

// Parses a configuration document, applying seed derivation.
RunConfig parse_run_config(const nlohmann::json& j);
nlohmann::json run_config_to_json(const RunConfig& c);

// Applies "a.b.c=value" overrides; the value is parsed as JSON when possible
// and taken as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

}  // namespace trajprior

#endif  // TRAJPRIOR_CONFIG_HPP_
