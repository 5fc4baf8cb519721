// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

// trajprior: corpus generation, descriptor encoding, training, evaluation
// and hyper-parameter sweeps.
//
// Exit codes: 0 success, 1 sweep finished with failed sub-runs, 2 usage or
// configuration error, 3 bad input file or incompatible artifacts, 4 numeric
// or training failure, 5 any other error.
//
// Log level comes from TRAJPRIOR_LOG_LEVEL (trace, debug, info, warn, error, off).

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "trajprior/clustering.hpp"
#include "trajprior/config.hpp"
#include "trajprior/encoder.hpp"
#include "trajprior/eval.hpp"
#include "trajprior/fv_pipeline.hpp"
#include "trajprior/io.hpp"
#include "trajprior/synth_corpus.hpp"
#include "trajprior/trainer.hpp"

#ifndef TRAJPRIOR_VERSION
#define TRAJPRIOR_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace trajprior;

namespace {

constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInput = 3;
constexpr int kExitNumeric = 4;
constexpr int kExitOther = 5;

// Run record written next to every command's outputs.
class Manifest {
 public:
  Manifest(std::string command, fs::path out) : out_(std::move(out)), start_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["version"] = TRAJPRIOR_VERSION;
    doc_["inputs"] = json::array();
    doc_["outputs"] = json::array();
    doc_["config_path"] = nullptr;
    doc_["config_hash"] = nullptr;
  }

  void config(const fs::path& path, const std::string& hash) {
    doc_["config_path"] = path.string();
    doc_["config_hash"] = hash;
  }
  void input(const fs::path& p) { doc_["inputs"].push_back(p.string()); }
  void output(const fs::path& p) { doc_["outputs"].push_back(p.string()); }
  json& extra() { return doc_; }

  void write() {
    doc_["duration_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_file_atomic(out_ / "manifest.json", doc_.dump(2) + "\n");
  }

 private:
  fs::path out_;
  std::chrono::steady_clock::time_point start_;
  json doc_;
};

void write_output(Manifest& m, const fs::path& path, const std::string& bytes) {
  write_file_atomic(path, bytes);
  m.output(path);
}

void require_out_dir(const fs::path& out) {
  if (!fs::is_directory(out)) throw InputError("output directory does not exist: " + out.string());
}

struct LoadedConfig {
  RunConfig run;
  json doc;           // after overrides
  std::string hash;   // of the file bytes consumed
  fs::path base_dir;  // relative paths in the config resolve here
};

LoadedConfig load_config(const fs::path& path, const std::vector<std::string>& overrides) {
  const std::string text = read_file(path);
  LoadedConfig c;
  try {
    c.doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  for (const auto& o : overrides) apply_override(c.doc, o);
  c.run = parse_run_config(c.doc);
  c.hash = content_hash(text);
  c.base_dir = path.parent_path();
  return c;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

json summary_counts(const Corpus& corpus) {
  std::size_t trajectories = 0;
  std::map<std::uint32_t, std::size_t> app, mot;
  for (const auto& b : corpus.bags) {
    trajectories += static_cast<std::size_t>(b.descriptors.rows());
    ++app[b.appearance_label];
    ++mot[b.motion_label];
  }
  json j{{"videos", corpus.size()},
         {"trajectories", trajectories},
         {"descriptor_dim", corpus.descriptor_dim()},
         {"raw_dim", corpus.raw_dim()}};
  for (auto& [k, v] : app) j["appearance_counts"].push_back(v);
  for (auto& [k, v] : mot) j["motion_counts"].push_back(v);
  return j;
}

// ---------------------------------------------------------------------------
// Evaluation shared by `eval` and `sweep`.

struct EvalOptions {
  std::vector<std::uint32_t> shots;
  std::uint32_t episodes = 20;
  std::uint64_t seed = 0;
};

std::uint32_t num_classes(const Labels& l) {
  return l.empty() ? 0 : static_cast<std::uint32_t>(*std::max_element(l.begin(), l.end()) + 1);
}

// One JSON record per line plus a shots x label-set accuracy table.
struct EvalReport {
  std::vector<json> records;
  std::string table;
  std::map<std::string, double> headline;  // keyed "probe_<labels>_<shots>", "nmi_<labels>", ...
};

EvalReport evaluate(const Matrix& embeddings, const Corpus& corpus, const EvalOptions& opt) {
  const std::vector<std::pair<std::string, Labels>> label_sets = {{"motion", corpus.motion_labels()},
                                                                   {"appearance", corpus.appearance_labels()}};
  EvalReport r;
  std::map<std::string, std::map<std::uint32_t, double>> acc;
  for (const auto& [name, labels] : label_sets) {
    const std::uint32_t k = num_classes(labels);
    for (auto s : opt.shots) {
      const auto p = linear_probe(embeddings, labels, s, opt.episodes, derive_seed(opt.seed, "probe"));
      double var = 0.0;
      for (double a : p.episode_accuracies) var += (a - p.accuracy) * (a - p.accuracy);
      const double sd = p.episode_accuracies.size() > 1 ? std::sqrt(var / (p.episode_accuracies.size() - 1)) : 0.0;
      r.records.push_back({{"kind", "probe"},
                           {"labels", name},
                           {"shots", s},
                           {"episodes", p.episodes},
                           {"accuracy", p.accuracy},
                           {"std", sd},
                           {"chance", 1.0 / k}});
      acc[name][s] = p.accuracy;
      r.headline["probe_" + name + "_" + std::to_string(s)] = p.accuracy;
    }
    const auto km = kmeans(embeddings, k, derive_seed(opt.seed, "eval-kmeans"));
    const auto cs = clustering_metrics(km.assignment, labels);
    r.records.push_back({{"kind", "clustering"}, {"labels", name}, {"k", k}, {"nmi", cs.nmi}, {"purity", cs.purity}});
    r.headline["nmi_" + name] = cs.nmi;
    const double ret = retrieval_accuracy(embeddings, labels);
    r.records.push_back({{"kind", "retrieval"}, {"labels", name}, {"recall_at_1", ret}});
    r.headline["retrieval_" + name] = ret;
  }
  std::ostringstream t;
  t << "shots\tmotion\tappearance\n";
  for (auto s : opt.shots) t << s << '\t' << acc["motion"][s] << '\t' << acc["appearance"][s] << '\n';
  r.table = t.str();
  return r;
}

std::string records_text(const std::vector<json>& records) {
  std::string out;
  for (const auto& r : records) out += r.dump() + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Training shared by `train` and `sweep`.

TrainingData training_data(const Corpus& corpus) {
  TrainingData d{corpus.raw_matrix(), corpus.appearance_labels(), corpus.motion_labels(), std::nullopt, {}};
  for (const auto& b : corpus.bags) d.video_ids.push_back(b.video_id);
  return d;
}

Matrix prior_for(const EncodedCorpus& enc, const TrainingData& data) {
  if (enc.video_ids != data.video_ids) {
    throw CompatibilityError("encoded descriptors do not match the corpus videos (" +
                             std::to_string(enc.video_ids.size()) + " vs " + std::to_string(data.video_ids.size()) +
                             " videos)");
  }
  return enc.vectors;
}

ArrayStore checkpoint_store(const TrainerState& state, const RunConfig& rc) {
  ArrayStore s = state_to_store(state, rc.train);
  s.put_text("run.config", run_config_to_json(rc).dump());
  return s;
}

RunArtifacts run_training(const TrainingData& data, const RunConfig& rc, const fs::path& out, Manifest& m,
                          std::optional<TrainerState> resume) {
  const fs::path ckpt = out / "checkpoint.tja", metrics = out / "metrics.jsonl";
  if (!resume) {
    // Untrained state, usable as the random-init evaluation baseline.
    write_output(m, out / "init.tja", checkpoint_store(initial_state(data, rc.train), rc).serialize());
  }
  TrainHooks hooks;
  hooks.on_epoch_end = [&](const TrainerState& s, bool boundary) {
    const auto& r = s.log.back();
    spdlog::info("epoch {:3d} {:7s} loss {:.5f} nmi(motion) {:.3f} nmi(appearance) {:.3f} lr {:.4g}", r.epoch,
                 r.stage, r.loss, r.nmi_motion, r.nmi_appearance, r.lr);
    const std::string bytes = checkpoint_store(s, rc).serialize();
    write_file_atomic(ckpt, bytes);
    write_file_atomic(metrics, format_metrics(s.log));
    if (boundary) write_file_atomic(out / ("checkpoint_" + r.stage + ".tja"), bytes);
  };
  RunArtifacts art = train(data, rc.train, std::move(resume), hooks);
  m.output(ckpt);
  m.output(metrics);
  write_output(m, out / "clusters.tsv", art.cluster_export);
  json summary{{"schedule", schedule_name(rc.train.schedule)}, {"epochs_run", art.log().size()}};
  if (!art.log().empty()) {
    const auto& last = art.log().back();
    summary["final"] = {{"loss", last.loss}, {"nmi_motion", last.nmi_motion}, {"nmi_appearance", last.nmi_appearance}};
  }
  if (art.prior_motion) {
    summary["prior_clusters"] = {{"nmi_motion", art.prior_motion->nmi},
                                 {"nmi_appearance", art.prior_appearance->nmi}};
  }
  write_output(m, out / "summary.json", summary.dump(2) + "\n");
  return art;
}

Corpus corpus_for(const LoadedConfig& cfg, Manifest& m, const std::string& flag) {
  const std::string p = flag.empty() ? cfg.run.corpus_path : flag;
  if (p.empty()) {
    spdlog::info("no corpus file given; generating {} videos from the config", cfg.run.num_videos);
    return generate_corpus(cfg.run.corpus, cfg.run.num_videos);
  }
  const fs::path path = flag.empty() ? resolve(cfg.base_dir, p) : fs::path(p);
  m.input(path);
  return load_corpus(path);
}

// ---------------------------------------------------------------------------
// Subcommands.

struct CommonArgs {
  std::string config;
  std::string out;
  std::vector<std::string> overrides;
};

void cmd_gen(const CommonArgs& a) {
  const fs::path out(a.out);
  require_out_dir(out);
  Manifest m("gen", out);
  const LoadedConfig cfg = load_config(a.config, a.overrides);
  m.config(a.config, cfg.hash);
  const Corpus corpus = generate_corpus(cfg.run.corpus, cfg.run.num_videos);
  write_output(m, out / "corpus.tjc", serialize_corpus(corpus));
  const json counts = summary_counts(corpus);
  m.extra()["summary"] = counts;
  std::cout << counts.dump() << "\n";
  m.write();
}

void cmd_encode(const CommonArgs& a, const std::string& corpus_path) {
  const fs::path out(a.out);
  require_out_dir(out);
  Manifest m("encode", out);
  const LoadedConfig cfg = load_config(a.config, a.overrides);
  m.config(a.config, cfg.hash);
  m.input(corpus_path);
  const Corpus corpus = load_corpus(corpus_path);
  const FisherCodebook cb = fit_codebook(corpus.bags, cfg.run.codebook);
  EncodedCorpus enc;
  for (const auto& b : corpus.bags) enc.video_ids.push_back(b.video_id);
  enc.vectors = encode_bags(corpus.bags, cb);
  write_output(m, out / "codebook.tja", codebook_to_store(cb).serialize());
  write_output(m, out / "encoded.tjf", serialize_encoded(enc));
  const json info{{"videos", corpus.size()},
                  {"pca_dim", cb.pca.output_dim()},
                  {"gmm_components", cb.gmm.num_components()},
                  {"sketch_dim", enc.vectors.cols()}};
  m.extra()["summary"] = info;
  std::cout << info.dump() << "\n";
  m.write();
}

void cmd_train(const CommonArgs& a, const std::string& corpus_flag, const std::string& encoded_flag,
               const std::string& resume_path) {
  const fs::path out(a.out);
  require_out_dir(out);
  Manifest m("train", out);
  const LoadedConfig cfg = load_config(a.config, a.overrides);
  m.config(a.config, cfg.hash);
  m.extra()["train_config_hash"] = cfg.run.train.hash();
  const Corpus corpus = corpus_for(cfg, m, corpus_flag);
  TrainingData data = training_data(corpus);
  if (cfg.run.train.schedule == Schedule::kLaIdt) {
    const std::string p = encoded_flag.empty() ? cfg.run.encoded_path : encoded_flag;
    if (p.empty()) {
      throw ConfigError("schedule LA_IDT needs encoded descriptors: set encoded_path in the config or pass --encoded");
    }
    const fs::path path = encoded_flag.empty() ? resolve(cfg.base_dir, p) : fs::path(p);
    m.input(path);
    data.prior = prior_for(load_encoded(path), data);
  }
  std::optional<TrainerState> resume;
  if (!resume_path.empty()) {
    m.input(resume_path);
    resume = state_from_store(ArrayStore::deserialize(read_file(resume_path)));
    spdlog::info("resuming from {} at epoch {}", resume_path, resume->next_epoch);
  }
  run_training(data, cfg.run, out, m, std::move(resume));
  m.write();
}

void cmd_eval(const std::string& ckpt_path, const std::string& corpus_path, const std::vector<std::uint32_t>& shots,
              std::uint32_t episodes, std::uint64_t seed, const std::string& out_dir) {
  const fs::path out(out_dir);
  require_out_dir(out);
  Manifest m("eval", out);
  m.input(ckpt_path);
  m.input(corpus_path);
  const ArrayStore store = ArrayStore::deserialize(read_file(ckpt_path));
  const EncoderParams params = params_from_store(store, "encoder");
  if (store.has("trainer.config_hash")) m.extra()["train_config_hash"] = store.text("trainer.config_hash");
  const Corpus corpus = load_corpus(corpus_path);
  if (corpus.raw_dim() != params.input_dim()) {
    throw CompatibilityError("checkpoint expects " + std::to_string(params.input_dim()) +
                             "-dim inputs but the corpus has " + std::to_string(corpus.raw_dim()));
  }
  const EvalReport r = evaluate(embed_all(params, corpus.raw_matrix()), corpus, {shots, episodes, seed});
  write_output(m, out / "report.jsonl", records_text(r.records));
  write_output(m, out / "probe_table.tsv", r.table);
  std::cout << r.table;
  m.write();
}

// Grid file:
//   {"config": "run.json", "K": [8, 16, 32], "m": [1, 3], "seeds": [0],
//    "shots": [1, 5], "episodes": 20, "set": ["train.schedule=LA"]}
// "config" resolves against the grid file; "seeds", "shots", "episodes" and
// "set" are optional.
int cmd_sweep(const std::string& grid_path, const std::string& out_dir, const std::vector<std::string>& overrides) {
  const fs::path out(out_dir);
  require_out_dir(out);
  Manifest m("sweep", out);
  const std::string grid_text = read_file(grid_path);
  json grid;
  try {
    grid = json::parse(grid_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(grid_path + ": " + e.what());
  }
  m.config(grid_path, content_hash(grid_text));
  for (const char* key : {"config", "K", "m"}) {
    if (!grid.contains(key)) throw ConfigError(std::string("sweep grid: missing \"") + key + "\"");
  }
  const fs::path config_path = resolve(fs::path(grid_path).parent_path(), grid.at("config").get<std::string>());
  m.input(config_path);
  const auto ks = grid.at("K").get<std::vector<std::uint32_t>>();
  const auto ms = grid.at("m").get<std::vector<std::uint32_t>>();
  const auto seeds = grid.value("seeds", std::vector<std::uint64_t>{});
  const EvalOptions base_eval{grid.value("shots", std::vector<std::uint32_t>{1, 5, 10}),
                              grid.value("episodes", 20u), 0};
  std::vector<std::string> sets = grid.value("set", std::vector<std::string>{});
  sets.insert(sets.end(), overrides.begin(), overrides.end());

  std::vector<json> rows;
  int failures = 0;
  auto run_one = [&](std::uint32_t k, std::uint32_t mm, std::optional<std::uint64_t> seed) {
    std::string name = "K" + std::to_string(k) + "_m" + std::to_string(mm);
    if (seed) name += "_s" + std::to_string(*seed);
    json row{{"run", name}, {"K", k}, {"m", mm}};
    try {
      std::vector<std::string> o = sets;
      o.push_back("train.K=" + std::to_string(k));
      o.push_back("train.m=" + std::to_string(mm));
      if (seed) o.push_back("seed=" + std::to_string(*seed));
      const LoadedConfig cfg = load_config(config_path, o);
      row["seed"] = cfg.run.seed;
      const fs::path dir = out / name;
      fs::create_directories(dir);
      Manifest sub("sweep/" + name, dir);
      sub.config(config_path, cfg.hash);
      const Corpus corpus = corpus_for(cfg, sub, "");
      TrainingData data = training_data(corpus);
      if (cfg.run.train.schedule == Schedule::kLaIdt) {
        if (!cfg.run.encoded_path.empty()) {
          data.prior = prior_for(load_encoded(resolve(cfg.base_dir, cfg.run.encoded_path)), data);
        } else {
          data.prior = encode_bags(corpus.bags, fit_codebook(corpus.bags, cfg.run.codebook));
        }
      }
      spdlog::info("sweep run {}", name);
      const RunArtifacts art = run_training(data, cfg.run, dir, sub, std::nullopt);
      EvalOptions eo = base_eval;
      eo.seed = cfg.run.seed;
      const EvalReport r = evaluate(embed_all(art.state.params, data.features), corpus, eo);
      write_output(sub, dir / "report.jsonl", records_text(r.records));
      write_output(sub, dir / "probe_table.tsv", r.table);
      sub.write();
      row["status"] = "ok";
      row["final_loss"] = art.log().empty() ? 0.0 : art.log().back().loss;
      for (const auto& [key, v] : r.headline) row[key] = v;
    } catch (const std::exception& e) {
      ++failures;
      row["status"] = "failed";
      row["error"] = e.what();
      spdlog::error("sweep run {} failed: {}", name, e.what());
    }
    rows.push_back(row);
  };
  for (auto k : ks) {
    for (auto mm : ms) {
      if (seeds.empty()) {
        run_one(k, mm, std::nullopt);
      } else {
        for (auto s : seeds) run_one(k, mm, s);
      }
    }
  }

  // Union of columns, fixed leading order.
  std::vector<std::string> cols = {"run", "K", "m", "seed", "status", "final_loss"};
  for (const auto& r : rows) {
    for (auto it = r.begin(); it != r.end(); ++it) {
      if (std::find(cols.begin(), cols.end(), it.key()) == cols.end() && it.key() != "error") cols.push_back(it.key());
    }
  }
  cols.push_back("error");
  std::ostringstream t;
  for (std::size_t c = 0; c < cols.size(); ++c) t << (c ? "\t" : "") << cols[c];
  t << "\n";
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      t << (c ? "\t" : "");
      if (!r.contains(cols[c])) continue;
      const auto& v = r.at(cols[c]);
      t << (v.is_string() ? v.get<std::string>() : v.dump());
    }
    t << "\n";
  }
  write_output(m, out / "sweep.tsv", t.str());
  write_output(m, out / "sweep.jsonl", records_text(rows));
  m.extra()["failed_runs"] = failures;
  m.write();
  std::cout << t.str();
  return failures == 0 ? 0 : kExitPartial;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("trajprior");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S] [%^%l%$] %v");
  if (const char* level = std::getenv("TRAJPRIOR_LOG_LEVEL")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Trajectory-prior video representation learning at desk scale"};
  app.set_version_flag("--version", TRAJPRIOR_VERSION);
  app.require_subcommand(1);

  CommonArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic corpus");
  gen->add_option("--config", gen_args.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", gen_args.out, "Output directory")->required();
  gen->add_option("--set", gen_args.overrides, "Override a config value, e.g. corpus.num_motion_classes=4");

  CommonArgs enc_args;
  std::string enc_corpus;
  auto* enc = app.add_subcommand("encode", "Fit the descriptor codebook and encode every video");
  enc->add_option("--corpus", enc_corpus, "Corpus file (TJC1)")->required()->check(CLI::ExistingFile);
  enc->add_option("--config", enc_args.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  enc->add_option("--out", enc_args.out, "Output directory")->required();
  enc->add_option("--set", enc_args.overrides, "Override a config value");

  CommonArgs train_args;
  std::string train_corpus, train_encoded, resume;
  auto* tr = app.add_subcommand("train", "Train an encoder");
  tr->add_option("--config", train_args.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  tr->add_option("--out", train_args.out, "Output directory")->required();
  tr->add_option("--resume", resume, "Checkpoint to continue from")->check(CLI::ExistingFile);
  tr->add_option("--corpus", train_corpus, "Corpus file; overrides corpus_path")->check(CLI::ExistingFile);
  tr->add_option("--encoded", train_encoded, "Encoded descriptors; overrides encoded_path")->check(CLI::ExistingFile);
  tr->add_option("--set", train_args.overrides, "Override a config value, e.g. train.K=32");

  std::string ev_ckpt, ev_corpus, ev_out;
  std::vector<std::uint32_t> ev_shots = {1, 5, 10};
  std::uint32_t ev_episodes = 20;
  std::uint64_t ev_seed = 0;
  auto* ev = app.add_subcommand("eval", "Few-shot probe, clustering and retrieval reports");
  ev->add_option("--ckpt", ev_ckpt, "Checkpoint (TJA1)")->required()->check(CLI::ExistingFile);
  ev->add_option("--corpus", ev_corpus, "Corpus file (TJC1)")->required()->check(CLI::ExistingFile);
  ev->add_option("--shots", ev_shots, "Comma-separated shot counts")->delimiter(',')->capture_default_str();
  ev->add_option("--episodes", ev_episodes, "Probe episodes per shot count")->capture_default_str();
  ev->add_option("--seed", ev_seed, "Evaluation seed")->capture_default_str();
  ev->add_option("--out", ev_out, "Output directory")->required();

  std::string grid, sweep_out;
  std::vector<std::string> sweep_sets;
  auto* sw = app.add_subcommand("sweep", "Train and evaluate over a (K, m) grid");
  sw->add_option("--grid", grid, "Grid file (JSON)")->required()->check(CLI::ExistingFile);
  sw->add_option("--out", sweep_out, "Output directory")->required();
  sw->add_option("--set", sweep_sets, "Override a value in every sub-run's config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) cmd_gen(gen_args);
    if (enc->parsed()) cmd_encode(enc_args, enc_corpus);
    if (tr->parsed()) cmd_train(train_args, train_corpus, train_encoded, resume);
    if (ev->parsed()) cmd_eval(ev_ckpt, ev_corpus, ev_shots, ev_episodes, ev_seed, ev_out);
    if (sw->parsed()) return cmd_sweep(grid, sweep_out, sweep_sets);
  } catch (const ConfigError& e) {
    spdlog::error("configuration error: {}", e.what());
    return kExitConfig;
  } catch (const InputError& e) {
    spdlog::error("input error: {}", e.what());
    return kExitInput;
  } catch (const FormatError& e) {
    spdlog::error("format error: {}", e.what());
    return kExitInput;
  } catch (const CompatibilityError& e) {
    spdlog::error("incompatible inputs: {}", e.what());
    return kExitInput;
  } catch (const NumericError& e) {
    spdlog::error("numeric failure: {}", e.what());
    return kExitNumeric;
  } catch (const TrainingError& e) {
    spdlog::error("training failure: {}", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitOther;
  }
  return 0;
}
