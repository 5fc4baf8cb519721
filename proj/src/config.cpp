// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#include "trajprior/config.hpp"

#include <set>

namespace trajprior {

using nlohmann::json;

namespace {

// Reads known keys from an object and rejects the rest.
class Reader {
 public:
  Reader(const json& j, std::string section) : j_(j), section_(std::move(section)) {
    if (!j_.is_object()) throw ConfigError(section_ + ": expected an object");
  }

  template <typename T>
  Reader& get(const char* key, T& out) {
    seen_.insert(key);
    if (auto it = j_.find(key); it != j_.end()) {
      try {
        out = it->template get<T>();
      } catch (const json::exception& e) {
        throw ConfigError(section_ + "." + key + ": " + e.what());
      }
    }
    return *this;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(section_ + ": unknown key '" + it.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string section_;
  std::set<std::string> seen_;
};

}  // namespace

void to_json(json& j, const LatentSpec& s) {
  j = json{{"num_appearance_classes", s.num_appearance_classes},
           {"num_motion_classes", s.num_motion_classes},
           {"appearance_dim", s.appearance_dim},
           {"motion_dim", s.motion_dim},
           {"appearance_scale", s.appearance_scale},
           {"motion_scale", s.motion_scale},
           {"noise_sigma", s.noise_sigma},
           {"min_trajectories", s.min_trajectories},
           {"max_trajectories", s.max_trajectories},
           {"motion_attenuation", s.motion_attenuation},
           {"raw_noise_sigma", s.raw_noise_sigma},
           {"seed", s.seed}};
}

void from_json(const json& j, LatentSpec& s) {
  Reader r(j, "corpus");
  r.get("num_appearance_classes", s.num_appearance_classes)
      .get("num_motion_classes", s.num_motion_classes)
      .get("appearance_dim", s.appearance_dim)
      .get("motion_dim", s.motion_dim)
      .get("appearance_scale", s.appearance_scale)
      .get("motion_scale", s.motion_scale)
      .get("noise_sigma", s.noise_sigma)
      .get("min_trajectories", s.min_trajectories)
      .get("max_trajectories", s.max_trajectories)
      .get("motion_attenuation", s.motion_attenuation)
      .get("raw_noise_sigma", s.raw_noise_sigma)
      .get("seed", s.seed)
      .finish();
}

void to_json(json& j, const CodebookConfig& c) {
  j = json{{"variance_fraction", c.variance_fraction}, {"gmm_components", c.gmm_components},
           {"gmm_max_iters", c.gmm_max_iters},         {"gmm_tol", c.gmm_tol},
           {"power_alpha", c.power_alpha},             {"sketch_dim", c.sketch_dim},
           {"fit_videos", c.fit_videos},               {"fit_descriptors", c.fit_descriptors},
           {"seed", c.seed}};
}

void from_json(const json& j, CodebookConfig& c) {
  Reader r(j, "codebook");
  r.get("variance_fraction", c.variance_fraction)
      .get("gmm_components", c.gmm_components)
      .get("gmm_max_iters", c.gmm_max_iters)
      .get("gmm_tol", c.gmm_tol)
      .get("power_alpha", c.power_alpha)
      .get("sketch_dim", c.sketch_dim)
      .get("fit_videos", c.fit_videos)
      .get("fit_descriptors", c.fit_descriptors)
      .get("seed", c.seed)
      .finish();
}

void to_json(json& j, const TrainConfig& c) {
  j = json{{"schedule", schedule_name(c.schedule)},
           {"epochs", c.epochs},
           {"ir_pretrain_epochs", c.ir_pretrain_epochs},
           {"joint_finetune_epochs", c.joint_finetune_epochs},
           {"learning_rate", c.learning_rate},
           {"momentum", c.momentum},
           {"lr_drop_epochs", c.lr_drop_epochs},
           {"lr_drop_factor", c.lr_drop_factor},
           {"batch_size", c.batch_size},
           {"augment_sigma", c.augment_sigma},
           {"tau", c.tau},
           {"negatives", c.num_negatives},
           {"exact_denominator", c.exact_denominator},
           {"K", c.clusters},
           {"m", c.clusterings},
           {"background_k", c.background_k},
           {"lambda", c.bank_lambda},
           {"recluster_every", c.recluster_every},
           {"convergence_tol", c.convergence_tol},
           {"convergence_window", c.convergence_window},
           {"hidden", c.hidden},
           {"embedding_dim", c.embedding_dim},
           {"kmeans_max_iters", c.kmeans_max_iters},
           {"seed", c.seed}};
}

void from_json(const json& j, TrainConfig& c) {
  Reader r(j, "train");
  std::string schedule = schedule_name(c.schedule);
  r.get("schedule", schedule)
      .get("epochs", c.epochs)
      .get("ir_pretrain_epochs", c.ir_pretrain_epochs)
      .get("joint_finetune_epochs", c.joint_finetune_epochs)
      .get("learning_rate", c.learning_rate)
      .get("momentum", c.momentum)
      .get("lr_drop_epochs", c.lr_drop_epochs)
      .get("lr_drop_factor", c.lr_drop_factor)
      .get("batch_size", c.batch_size)
      .get("augment_sigma", c.augment_sigma)
      .get("tau", c.tau)
      .get("negatives", c.num_negatives)
      .get("exact_denominator", c.exact_denominator)
      .get("K", c.clusters)
      .get("m", c.clusterings)
      .get("background_k", c.background_k)
      .get("lambda", c.bank_lambda)
      .get("recluster_every", c.recluster_every)
      .get("convergence_tol", c.convergence_tol)
      .get("convergence_window", c.convergence_window)
      .get("hidden", c.hidden)
      .get("embedding_dim", c.embedding_dim)
      .get("kmeans_max_iters", c.kmeans_max_iters)
      .get("seed", c.seed)
      .finish();
  c.schedule = parse_schedule(schedule);
}

RunConfig parse_run_config(const json& j) {
  RunConfig c;
  Reader r(j, "config");
  json corpus = json::object(), codebook = json::object(), train = json::object(), eval = json::object();
  r.get("seed", c.seed)
      .get("num_videos", c.num_videos)
      .get("corpus", corpus)
      .get("codebook", codebook)
      .get("train", train)
      .get("eval", eval)
      .get("corpus_path", c.corpus_path)
      .get("encoded_path", c.encoded_path)
      .finish();
  c.corpus.seed = derive_seed(c.seed, "corpus");
  c.codebook.seed = derive_seed(c.seed, "codebook");
  c.train.seed = derive_seed(c.seed, "train");
  corpus.get_to(c.corpus);
  codebook.get_to(c.codebook);
  train.get_to(c.train);
  Reader(eval, "eval").get("shots", c.eval_shots).get("episodes", c.eval_episodes).finish();
  return c;
}

json run_config_to_json(const RunConfig& c) {
  return json{{"seed", c.seed},
              {"num_videos", c.num_videos},
              {"corpus", c.corpus},
              {"codebook", c.codebook},
              {"train", c.train},
              {"eval", {{"shots", c.eval_shots}, {"episodes", c.eval_episodes}}},
              {"corpus_path", c.corpus_path},
              {"encoded_path", c.encoded_path}};
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }
  std::string pointer = "/";
  for (char ch : key) pointer += ch == '.' ? '/' : ch;
  doc[json::json_pointer(pointer)] = value;
}

}  // namespace trajprior
