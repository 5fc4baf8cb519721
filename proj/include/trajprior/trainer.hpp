// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TRAJPRIOR_TRAINER_HPP_
#define TRAJPRIOR_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "trajprior/clustering.hpp"
#include "trajprior/common.hpp"
#include "trajprior/encoder.hpp"
#include "trajprior/eval.hpp"
#include "trajprior/io.hpp"
#include "trajprior/memory_bank.hpp"
#include "trajprior/rng.hpp"

namespace trajprior {

enum class Schedule { kIr, kLa, kLaIdt };

std::string schedule_name(Schedule s);
Schedule parse_schedule(const std::string& name);

// Desk-scale defaults: the reference schedule of 200 epochs with 40 epochs
// of instance-recognition pretraining and rate drops at 160 and 190,
// scaled linearly to 30 epochs.
struct TrainConfig {
  Schedule schedule = Schedule::kIr;
  int epochs = 30;
  int ir_pretrain_epochs = 6;
  int joint_finetune_epochs = 6;
  double learning_rate = 0.03;
  double momentum = 0.9;
  std::vector<int> lr_drop_epochs = {24, 28};
  double lr_drop_factor = 0.1;
  std::uint32_t batch_size = 64;
  // Gaussian jitter added to the encoder input each time a video is drawn
  // for training, in units of the per-dimension corpus std (a cheap
  // stand-in for sampling a new clip).
  double augment_sigma = 0.5;
  double tau = 0.07;
  std::uint32_t num_negatives = 128;
  bool exact_denominator = false;
  std::uint32_t clusters = 16;       // K
  std::uint32_t clusterings = 3;     // m
  std::uint32_t background_k = 0;    // 0 selects min(N / 8, 512)
  double bank_lambda = 0.5;
  int recluster_every = 1;           // epochs between k-means refreshes
  double convergence_tol = 1e-4;     // relative loss improvement
  int convergence_window = 3;        // epochs
  std::vector<std::uint32_t> hidden = {64};
  std::uint32_t embedding_dim = 32;
  int kmeans_max_iters = 50;
  std::uint64_t seed = 0;

  void validate() const;
  std::uint32_t resolved_background_k(std::size_t n) const;
  // Canonical JSON text; the config hash is computed over it.
  std::string canonical() const;
  std::string hash() const;
};

struct TrainingData {
  Matrix features;             // N x raw dim (encoder input)
  Labels appearance;           // ground truth, only used for metrics
  Labels motion;
  std::optional<Matrix> prior; // N x S descriptor-space vectors p(psi)
  std::vector<std::uint32_t> video_ids;

  std::size_t size() const { return static_cast<std::size_t>(features.rows()); }
};

struct EpochRecord {
  int epoch = 0;
  std::string stage;  // "ir", "la", "la_idt", "joint"
  double loss = 0.0;
  double nmi_motion = 0.0;
  double nmi_appearance = 0.0;
  double lr = 0.0;
  double bank_drift = 0.0;  // mean row displacement of the bank over the epoch

  bool operator==(const EpochRecord&) const = default;
};

// One JSON object per line.
std::string format_metrics(const std::vector<EpochRecord>& log);

// Everything needed to continue a run bit-identically from an epoch boundary.
struct TrainerState {
  EncoderParams params;
  OptimizerState optimizer;
  EmbeddingBank bank;
  Rng shuffle_rng;
  int next_epoch = 0;
  std::vector<EpochRecord> log;
  // Cluster assignments currently defining C_i (empty when not in use).
  std::optional<ClusterModel> close_model;
  std::string config_hash;
};

ArrayStore state_to_store(const TrainerState& state, const TrainConfig& config);
TrainerState state_from_store(const ArrayStore& store);

struct RunArtifacts {
  TrainerState state;
  ClusterModel final_clusters;  // k-means over the final bank
  std::string cluster_export;
  // Agreement of the descriptor-space clusters with the latent labels (LA_IDT).
  std::optional<ClusteringScores> prior_motion;
  std::optional<ClusteringScores> prior_appearance;

  const std::vector<EpochRecord>& log() const { return state.log; }
};

struct TrainHooks {
  // Called after every completed epoch with the state to checkpoint and a
  // flag set when the epoch closed a stage.
  std::function<void(const TrainerState&, bool stage_boundary)> on_epoch_end;
  // Stop after this many total completed epochs (for interruption tests).
  std::optional<int> stop_after;
};

TrainerState initial_state(const TrainingData& data, const TrainConfig& config);

RunArtifacts train(const TrainingData& data, const TrainConfig& config, std::optional<TrainerState> resume = {},
                   const TrainHooks& hooks = {});

// Schedule-specific entry points.
RunArtifacts train_ir(const TrainingData& data, TrainConfig config);
RunArtifacts train_la(const TrainingData& data, TrainConfig config, const std::optional<Matrix>& prior_points);

}  // namespace trajprior

#endif  // TRAJPRIOR_TRAINER_HPP_
