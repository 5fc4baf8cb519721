// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#include "trajprior/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "trajprior/config.hpp"
#include "trajprior/objectives.hpp"

namespace trajprior {

namespace {

constexpr const char* kStageIr = "ir";
constexpr const char* kStageLa = "la";
constexpr const char* kStageLaIdt = "la_idt";
constexpr const char* kStageJoint = "joint";

std::uint64_t epoch_seed(std::uint64_t seed, std::string_view tag, int epoch) {
  return derive_seed(derive_seed(seed, tag), static_cast<std::uint64_t>(epoch));
}

std::vector<double> stage_losses(const std::vector<EpochRecord>& log, const std::string& stage) {
  std::vector<double> out;
  for (const auto& r : log) {
    if (r.stage == stage) out.push_back(r.loss);
  }
  return out;
}

bool stage_converged(const TrainConfig& c, const std::vector<EpochRecord>& log) {
  const auto losses = stage_losses(log, kStageLaIdt);
  const auto w = static_cast<std::size_t>(c.convergence_window);
  if (losses.size() <= w) return false;
  const double before = losses[losses.size() - 1 - w];
  const double now = losses.back();
  const double scale = std::max(std::abs(before), 1e-300);
  return (before - now) / scale < c.convergence_tol;
}

// Stage of `epoch` given the records so far; empty when the run is complete.
std::optional<std::string> stage_for_epoch(const TrainConfig& c, const std::vector<EpochRecord>& log, int epoch) {
  switch (c.schedule) {
    case Schedule::kIr:
      if (epoch < c.epochs) return kStageIr;
      return std::nullopt;
    case Schedule::kLa:
      if (epoch >= c.epochs) return std::nullopt;
      return epoch < c.ir_pretrain_epochs ? kStageIr : kStageLa;
    case Schedule::kLaIdt: {
      if (epoch < c.ir_pretrain_epochs) return kStageIr;
      const auto joint_done = static_cast<int>(stage_losses(log, kStageJoint).size());
      if (joint_done > 0) {
        if (joint_done < c.joint_finetune_epochs) return kStageJoint;
        return std::nullopt;
      }
      const int stage2_end = c.epochs - c.joint_finetune_epochs;
      if (epoch < stage2_end && !stage_converged(c, log)) return kStageLaIdt;
      if (c.joint_finetune_epochs > 0) return kStageJoint;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

// Concatenation of unit-norm embedding and unit-norm descriptor halves.
Matrix joint_space(const Matrix& bank, const Matrix& prior) {
  Matrix out(bank.rows(), bank.cols() + prior.cols());
  out.leftCols(bank.cols()) = bank;
  for (Eigen::Index i = 0; i < prior.rows(); ++i) {
    const double norm = prior.row(i).norm();
    out.row(i).tail(prior.cols()) = norm > 0.0 ? Eigen::RowVectorXd(prior.row(i) / norm) : Eigen::RowVectorXd(prior.row(i));
  }
  return out;
}

void check_data(const TrainingData& data, const TrainConfig& c) {
  require_input(data.size() >= 1, "train: empty corpus");
  require_input(data.appearance.empty() || data.appearance.size() == data.size(), "train: appearance label count");
  require_input(data.motion.empty() || data.motion.size() == data.size(), "train: motion label count");
  if (c.schedule == Schedule::kLaIdt) {
    require_config(data.prior.has_value(), "train: schedule LA_IDT requires descriptor-space vectors p(psi)");
    require_input(static_cast<std::size_t>(data.prior->rows()) == data.size(),
                  "train: descriptor-space vectors do not cover the corpus");
  }
  if (c.schedule != Schedule::kIr) {
    require_config(c.clusters <= data.size(), "train: K exceeds the number of videos");
  }
}

}  // namespace

std::string schedule_name(Schedule s) {
  switch (s) {
    case Schedule::kIr:
      return "IR";
    case Schedule::kLa:
      return "LA";
    case Schedule::kLaIdt:
      return "LA_IDT";
  }
  return "?";
}

Schedule parse_schedule(const std::string& name) {
  if (name == "IR") return Schedule::kIr;
  if (name == "LA") return Schedule::kLa;
  if (name == "LA_IDT") return Schedule::kLaIdt;
  throw ConfigError("unknown schedule '" + name + "' (expected IR, LA or LA_IDT)");
}

void TrainConfig::validate() const {
  require_config(epochs >= 1, "train: epochs must be positive");
  require_config(ir_pretrain_epochs >= 0 && joint_finetune_epochs >= 0, "train: stage lengths must be non-negative");
  require_config(batch_size >= 1, "train: batch_size must be positive");
  require_config(augment_sigma >= 0.0, "train: augment_sigma must be non-negative");
  require_config(tau > 0.0, "train: tau must be positive");
  require_config(num_negatives >= 1, "train: negatives must be positive");
  require_config(clusters >= 1 && clusterings >= 1, "train: K and m must be positive");
  require_config(bank_lambda >= 0.0 && bank_lambda <= 1.0, "train: lambda must lie in [0, 1]");
  require_config(recluster_every >= 1, "train: recluster_every must be positive");
  require_config(convergence_window >= 1, "train: convergence_window must be positive");
  require_config(lr_drop_factor > 0.0 && lr_drop_factor <= 1.0, "train: lr_drop_factor must lie in (0, 1]");
  require_config(embedding_dim >= 1, "train: embedding_dim must be positive");
  for (int e : lr_drop_epochs) require_config(e >= 0 && e < epochs, "train: drop epochs must be < epochs");
  if (schedule != Schedule::kIr) {
    require_config(ir_pretrain_epochs < epochs, "train: IR pretraining must leave room for LA epochs");
  }
  if (schedule == Schedule::kLaIdt) {
    require_config(ir_pretrain_epochs + joint_finetune_epochs < epochs,
                   "train: LA_IDT needs at least one fixed-prior epoch");
  }
}

std::uint32_t TrainConfig::resolved_background_k(std::size_t n) const {
  if (n <= 1) return 0;
  std::size_t k = background_k != 0 ? background_k : std::min<std::size_t>(n / 8, 512);
  k = std::clamp<std::size_t>(k, 1, n - 1);
  return static_cast<std::uint32_t>(k);
}

std::string TrainConfig::canonical() const { return nlohmann::json(*this).dump(); }

std::string TrainConfig::hash() const { return content_hash(canonical()); }

std::string format_metrics(const std::vector<EpochRecord>& log) {
  std::string out;
  for (const auto& r : log) {
    nlohmann::ordered_json j{{"epoch", r.epoch},           {"stage", r.stage},
                             {"loss", r.loss},             {"nmi_motion", r.nmi_motion},
                             {"nmi_appearance", r.nmi_appearance}, {"lr", r.lr},
                             {"bank_drift", r.bank_drift}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

ArrayStore state_to_store(const TrainerState& s, const TrainConfig& config) {
  ArrayStore store;
  params_to_store(s.params, "encoder", store);
  params_to_store(s.optimizer.velocity, "optimizer.velocity", store);
  store.put_scalar("optimizer.learning_rate", s.optimizer.learning_rate);
  store.put_scalar("optimizer.momentum", s.optimizer.momentum);
  std::vector<double> at, mult;
  for (const auto& [e, m] : s.optimizer.schedule) {
    at.push_back(e);
    mult.push_back(m);
  }
  store.put("optimizer.schedule_epochs", at);
  store.put("optimizer.schedule_multipliers", mult);
  s.bank.to_store(store);
  store.put_text("trainer.shuffle_rng", s.shuffle_rng.state());
  store.put_u64_scalar("trainer.next_epoch", static_cast<std::uint64_t>(s.next_epoch));
  store.put_text("trainer.config_hash", s.config_hash);
  store.put_text("trainer.config", config.canonical());

  std::vector<double> epoch, loss, nmi_m, nmi_a, lr, drift;
  std::string stages;
  for (const auto& r : s.log) {
    epoch.push_back(r.epoch);
    loss.push_back(r.loss);
    nmi_m.push_back(r.nmi_motion);
    nmi_a.push_back(r.nmi_appearance);
    lr.push_back(r.lr);
    drift.push_back(r.bank_drift);
    stages += r.stage + "\n";
  }
  store.put("log.epoch", epoch);
  store.put("log.loss", loss);
  store.put("log.nmi_motion", nmi_m);
  store.put("log.nmi_appearance", nmi_a);
  store.put("log.lr", lr);
  store.put("log.bank_drift", drift);
  store.put_text("log.stage", stages);

  if (s.close_model) {
    store.put_u64_scalar("trainer.close_model.k", s.close_model->k);
    store.put_u64_scalar("trainer.close_model.runs", s.close_model->runs.size());
    for (std::size_t r = 0; r < s.close_model->runs.size(); ++r) {
      const auto& a = s.close_model->runs[r].assignment;
      std::vector<std::uint64_t> wide(a.begin(), a.end());
      store.put_u64("trainer.close_model.run" + std::to_string(r), wide);
    }
  }
  return store;
}

TrainerState state_from_store(const ArrayStore& store) {
  TrainerState s;
  s.params = params_from_store(store, "encoder");
  s.optimizer.velocity = params_from_store(store, "optimizer.velocity");
  s.optimizer.learning_rate = store.scalar("optimizer.learning_rate");
  s.optimizer.momentum = store.scalar("optimizer.momentum");
  const Vector at = store.vector("optimizer.schedule_epochs");
  const Vector mult = store.vector("optimizer.schedule_multipliers");
  for (Eigen::Index i = 0; i < at.size(); ++i) s.optimizer.schedule.emplace_back(static_cast<int>(at(i)), mult(i));
  s.bank = EmbeddingBank::from_store(store);
  s.shuffle_rng.set_state(store.text("trainer.shuffle_rng"));
  s.next_epoch = static_cast<int>(store.u64_scalar("trainer.next_epoch"));
  s.config_hash = store.text("trainer.config_hash");

  const Vector epoch = store.vector("log.epoch");
  const Vector loss = store.vector("log.loss");
  const Vector nmi_m = store.vector("log.nmi_motion");
  const Vector nmi_a = store.vector("log.nmi_appearance");
  const Vector lr = store.vector("log.lr");
  const Vector drift = store.vector("log.bank_drift");
  std::istringstream stages(store.text("log.stage"));
  for (Eigen::Index i = 0; i < epoch.size(); ++i) {
    EpochRecord r;
    r.epoch = static_cast<int>(epoch(i));
    std::getline(stages, r.stage);
    r.loss = loss(i);
    r.nmi_motion = nmi_m(i);
    r.nmi_appearance = nmi_a(i);
    r.lr = lr(i);
    r.bank_drift = drift(i);
    s.log.push_back(std::move(r));
  }

  if (store.has("trainer.close_model.k")) {
    ClusterModel model;
    model.k = static_cast<std::uint32_t>(store.u64_scalar("trainer.close_model.k"));
    const auto runs = store.u64_scalar("trainer.close_model.runs");
    for (std::uint64_t r = 0; r < runs; ++r) {
      KMeansResult run;
      for (auto v : store.u64s("trainer.close_model.run" + std::to_string(r))) run.assignment.push_back(static_cast<Index>(v));
      model.runs.push_back(std::move(run));
    }
    s.close_model = std::move(model);
  }
  if (s.params.embedding_dim() != s.bank.dim()) throw FormatError("checkpoint: encoder and bank dimensions differ");
  return s;
}

TrainerState initial_state(const TrainingData& data, const TrainConfig& config) {
  config.validate();
  EncoderArchitecture arch;
  arch.input_dim = static_cast<std::uint32_t>(data.features.cols());
  arch.hidden = config.hidden;
  arch.embedding_dim = config.embedding_dim;
  TrainerState s;
  s.params = init_encoder(arch, derive_seed(config.seed, "encoder"));
  std::vector<std::pair<int, double>> drops;
  for (int e : config.lr_drop_epochs) drops.emplace_back(e, config.lr_drop_factor);
  s.optimizer = make_optimizer(s.params, config.learning_rate, config.momentum, std::move(drops));
  s.bank = EmbeddingBank::random(data.size(), config.embedding_dim, config.bank_lambda, derive_seed(config.seed, "bank"));
  s.shuffle_rng = Rng(derive_seed(config.seed, "shuffle"));
  s.config_hash = config.hash();
  return s;
}

RunArtifacts train(const TrainingData& data, const TrainConfig& config, std::optional<TrainerState> resume,
                   const TrainHooks& hooks) {
  config.validate();
  check_data(data, config);
  const std::size_t n = data.size();
  RunArtifacts art;
  if (resume) {
    if (resume->config_hash != config.hash()) {
      throw ConfigError("resume: checkpoint was produced by a different configuration");
    }
    if (static_cast<std::size_t>(resume->bank.size()) != n ||
        resume->params.input_dim() != static_cast<std::uint32_t>(data.features.cols())) {
      throw CompatibilityError("resume: checkpoint does not match the corpus dimensions");
    }
    art.state = std::move(*resume);
  } else {
    art.state = initial_state(data, config);
  }
  TrainerState& st = art.state;

  const std::uint32_t background_k = config.resolved_background_k(n);
  IrConfig ir_cfg;
  ir_cfg.tau = config.tau;
  ir_cfg.num_negatives = config.num_negatives;
  ir_cfg.exact_denominator = config.exact_denominator;

  std::optional<ClusterModel> prior_model;
  std::vector<std::vector<Index>> prior_close;
  if (config.schedule == Schedule::kLaIdt) {
    prior_model = build_cluster_model(*data.prior, config.clusters, config.clusterings,
                                      derive_seed(config.seed, "prior-clusters"), config.kmeans_max_iters);
    prior_close = close_neighbors(*prior_model);
    if (!data.motion.empty()) art.prior_motion = clustering_metrics(prior_model->runs.front().assignment, data.motion);
    if (!data.appearance.empty()) {
      art.prior_appearance = clustering_metrics(prior_model->runs.front().assignment, data.appearance);
    }
  }

  // Jitter is scaled per input dimension by the corpus spread.
  const Vector feature_std =
      ((data.features.rowwise() - data.features.colwise().mean()).colwise().squaredNorm() / static_cast<double>(n))
          .cwiseSqrt()
          .transpose();

  std::vector<Index> order(n);
  while (auto stage = stage_for_epoch(config, st.log, st.next_epoch)) {
    if (hooks.stop_after && st.next_epoch >= *hooks.stop_after) break;
    const int epoch = st.next_epoch;
    const Matrix bank_start = st.bank.entries();

    NeighborSets sets;
    if (*stage == kStageLa || *stage == kStageJoint) {
      const bool stage_changed = st.log.empty() || st.log.back().stage != *stage;
      int stage_start = epoch;
      for (auto it = st.log.rbegin(); it != st.log.rend() && it->stage == *stage; ++it) stage_start = it->epoch;
      if (!st.close_model || stage_changed || (epoch - stage_start) % config.recluster_every == 0) {
        const Matrix points = *stage == kStageLa ? st.bank.entries() : joint_space(st.bank.entries(), *data.prior);
        st.close_model = build_cluster_model(points, config.clusters, config.clusterings,
                                             epoch_seed(config.seed, "clusters", epoch), config.kmeans_max_iters);
      }
      sets.close = close_neighbors(*st.close_model);
      sets.background = background_neighbors(st.bank.entries(), background_k);
    } else if (*stage == kStageLaIdt) {
      st.close_model.reset();
      sets.close = prior_close;
      sets.background = background_neighbors(st.bank.entries(), background_k);
    } else {
      st.close_model.reset();
    }

    std::iota(order.begin(), order.end(), Index{0});
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[st.shuffle_rng.index(i)]);

    double loss_sum = 0.0;
    std::vector<Query> queries;
    std::vector<ForwardCache> caches;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t end = std::min(n, start + config.batch_size);
      queries.clear();
      caches.clear();
      for (std::size_t t = start; t < end; ++t) {
        const Index idx = order[t];
        Vector input = data.features.row(idx).transpose();
        if (config.augment_sigma > 0.0) {
          Rng jitter(derive_seed(epoch_seed(config.seed, "augment", epoch), idx));
          for (Eigen::Index j = 0; j < input.size(); ++j) input(j) += config.augment_sigma * feature_std(j) * jitter.normal();
        }
        caches.push_back(forward_cached(st.params, input));
        queries.push_back({idx, caches.back().embedding});
      }
      const LossAndGrads lg = *stage == kStageIr ? ir_loss_and_grad(queries, st.bank, ir_cfg)
                                                 : la_loss_and_grad(queries, sets, st.bank, config.tau);
      EncoderGrads grads = st.params.zeros_like();
      for (std::size_t t = 0; t < queries.size(); ++t) accumulate(grads, backward(st.params, caches[t], lg.grads[t]));
      sgd_step(st.params, grads, st.optimizer, epoch);
      if (!st.params.all_finite()) throw NumericError("train: parameters became non-finite in epoch " + std::to_string(epoch));
      commit_to_bank(queries, st.bank);
      loss_sum += lg.loss * static_cast<double>(queries.size());
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.stage = *stage;
    rec.loss = loss_sum / static_cast<double>(n);
    if (!std::isfinite(rec.loss)) throw NumericError("train: non-finite loss in epoch " + std::to_string(epoch));
    rec.lr = st.optimizer.rate_at(epoch);
    rec.bank_drift = (st.bank.entries() - bank_start).rowwise().norm().mean();
    if (config.clusters <= n && (!data.motion.empty() || !data.appearance.empty())) {
      const auto km = kmeans(st.bank.entries(), config.clusters, derive_seed(config.seed, "metrics"),
                             config.kmeans_max_iters);
      if (!data.motion.empty()) rec.nmi_motion = clustering_metrics(km.assignment, data.motion).nmi;
      if (!data.appearance.empty()) rec.nmi_appearance = clustering_metrics(km.assignment, data.appearance).nmi;
    }
    st.log.push_back(rec);
    st.next_epoch = epoch + 1;

    if (hooks.on_epoch_end) {
      const auto next = stage_for_epoch(config, st.log, st.next_epoch);
      hooks.on_epoch_end(st, !next || *next != *stage);
    }
  }

  if (config.clusters <= n) {
    art.final_clusters = build_cluster_model(st.bank.entries(), config.clusters, config.clusterings,
                                             derive_seed(config.seed, "final-clusters"), config.kmeans_max_iters);
    std::vector<std::uint32_t> ids = data.video_ids;
    if (ids.empty()) {
      ids.resize(n);
      std::iota(ids.begin(), ids.end(), 0u);
    }
    art.cluster_export = export_assignments(art.final_clusters, ids);
  }
  return art;
}

RunArtifacts train_ir(const TrainingData& data, TrainConfig config) {
  config.schedule = Schedule::kIr;
  return train(data, config);
}

RunArtifacts train_la(const TrainingData& data, TrainConfig config, const std::optional<Matrix>& prior_points) {
  require_config(config.schedule != Schedule::kIr, "train_la: schedule must be LA or LA_IDT");
  if (config.schedule == Schedule::kLaIdt) {
    require_config(prior_points.has_value(), "train_la: LA_IDT requires descriptor-space vectors");
    TrainingData with_prior = data;
    with_prior.prior = prior_points;
    return train(with_prior, config);
  }
  return train(data, config);
}

}  // namespace trajprior
