// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#include "trajprior/synth_corpus.hpp"

#include <cmath>

#include "trajprior/io.hpp"
#include "trajprior/rng.hpp"

namespace trajprior {

namespace {

constexpr std::string_view kCorpusMagic = "TJC1";

double to_f32(double v) { return static_cast<double>(static_cast<float>(v)); }

}  // namespace

void LatentSpec::validate() const {
  require_config(num_appearance_classes >= 2, "num_appearance_classes must be >= 2");
  require_config(num_motion_classes >= 2, "num_motion_classes must be >= 2");
  require_config(appearance_dim >= 1 && motion_dim >= 1, "block dimensions must be positive");
  require_config(appearance_scale > 0.0 && std::isfinite(appearance_scale), "appearance_scale must be positive");
  require_config(motion_scale > 0.0 && std::isfinite(motion_scale), "motion_scale must be positive");
  require_config(noise_sigma > 0.0 && std::isfinite(noise_sigma), "noise_sigma must be positive");
  require_config(raw_noise_sigma > 0.0 && std::isfinite(raw_noise_sigma), "raw_noise_sigma must be positive");
  require_config(motion_attenuation > 0.0 && motion_attenuation <= 1.0, "motion_attenuation must lie in (0, 1]");
  require_config(min_trajectories >= 1 && min_trajectories <= max_trajectories,
                 "trajectory range must satisfy 1 <= min <= max");
}

std::uint32_t Corpus::descriptor_dim() const {
  return bags.empty() ? 0 : static_cast<std::uint32_t>(bags.front().descriptors.cols());
}

std::uint32_t Corpus::raw_dim() const {
  return raw.empty() ? 0 : static_cast<std::uint32_t>(raw.front().feature.size());
}

Matrix Corpus::raw_matrix() const {
  Matrix m(static_cast<Eigen::Index>(raw.size()), raw_dim());
  for (std::size_t i = 0; i < raw.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = raw[i].feature.transpose();
  return m;
}

Labels Corpus::appearance_labels() const {
  Labels out;
  out.reserve(bags.size());
  for (const auto& b : bags) out.push_back(b.appearance_label);
  return out;
}

Labels Corpus::motion_labels() const {
  Labels out;
  out.reserve(bags.size());
  for (const auto& b : bags) out.push_back(b.motion_label);
  return out;
}

ClassCenters make_class_centers(const LatentSpec& spec) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, "class-centers"));
  ClassCenters c;
  c.appearance.resize(spec.num_appearance_classes, spec.appearance_dim);
  c.motion.resize(spec.num_motion_classes, spec.motion_dim);
  for (Eigen::Index i = 0; i < c.appearance.size(); ++i) c.appearance.data()[i] = spec.appearance_scale * rng.normal();
  for (Eigen::Index i = 0; i < c.motion.size(); ++i) c.motion.data()[i] = spec.motion_scale * rng.normal();
  return c;
}

Corpus generate_corpus(const LatentSpec& spec, std::size_t num_videos) {
  spec.validate();
  require_config(num_videos >= static_cast<std::size_t>(spec.num_appearance_classes) * spec.num_motion_classes,
                 "num_videos must be at least num_appearance_classes * num_motion_classes");

  const ClassCenters centers = make_class_centers(spec);
  const Eigen::Index a_dim = spec.appearance_dim;
  const Eigen::Index m_dim = spec.motion_dim;
  const Eigen::Index dim = a_dim + m_dim;

  Corpus corpus;
  corpus.bags.resize(num_videos);
  corpus.raw.resize(num_videos);
  for (std::size_t v = 0; v < num_videos; ++v) {
    Rng rng(spec.seed ^ static_cast<std::uint64_t>(v));
    auto& bag = corpus.bags[v];
    bag.video_id = static_cast<std::uint32_t>(v);
    bag.appearance_label = static_cast<std::uint32_t>(rng.index(spec.num_appearance_classes));
    bag.motion_label = static_cast<std::uint32_t>(rng.index(spec.num_motion_classes));
    const auto span = spec.max_trajectories - spec.min_trajectories + 1;
    const auto count = spec.min_trajectories + static_cast<std::uint32_t>(rng.index(span));

    const auto a_center = centers.appearance.row(bag.appearance_label);
    const auto m_center = centers.motion.row(bag.motion_label);
    bag.descriptors.resize(count, dim);
    for (std::uint32_t t = 0; t < count; ++t) {
      for (Eigen::Index j = 0; j < a_dim; ++j) {
        bag.descriptors(t, j) = to_f32(a_center(j) + spec.noise_sigma * rng.normal());
      }
      for (Eigen::Index j = 0; j < m_dim; ++j) {
        bag.descriptors(t, a_dim + j) = to_f32(m_center(j) + spec.noise_sigma * rng.normal());
      }
    }

    Vector pooled = bag.descriptors.colwise().mean().transpose();
    auto& raw = corpus.raw[v];
    raw.video_id = bag.video_id;
    raw.feature.resize(dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double value = pooled(j) + spec.raw_noise_sigma * rng.normal();
      raw.feature(j) = to_f32(j < a_dim ? value : spec.motion_attenuation * value);
    }
  }
  return corpus;
}

std::string serialize_corpus(const Corpus& corpus) {
  require_input(corpus.bags.size() == corpus.raw.size(), "corpus: bag and raw feature counts differ");
  const auto dim = corpus.descriptor_dim();
  const auto raw_dim = corpus.raw_dim();
  ByteWriter w;
  w.bytes(kCorpusMagic);
  w.u32(static_cast<std::uint32_t>(corpus.size()));
  w.u32(dim);
  w.u32(raw_dim);
  for (std::size_t v = 0; v < corpus.size(); ++v) {
    const auto& bag = corpus.bags[v];
    const auto& raw = corpus.raw[v];
    require_input(bag.descriptors.cols() == dim, "corpus: descriptor dimensionality varies");
    require_input(raw.feature.size() == raw_dim, "corpus: raw feature dimensionality varies");
    w.u32(bag.video_id);
    w.u32(static_cast<std::uint32_t>(bag.descriptors.rows()));
    w.u32(bag.appearance_label);
    w.u32(bag.motion_label);
    for (Eigen::Index j = 0; j < raw.feature.size(); ++j) w.f32(static_cast<float>(raw.feature(j)));
    for (Eigen::Index i = 0; i < bag.descriptors.size(); ++i) w.f32(static_cast<float>(bag.descriptors.data()[i]));
  }
  return w.release();
}

Corpus deserialize_corpus(std::string_view bytes) {
  ByteReader r(bytes, "corpus file");
  if (r.bytes(4) != kCorpusMagic) throw FormatError("corpus file: bad magic (expected TJC1)");
  const auto n = r.u32();
  const auto dim = r.u32();
  const auto raw_dim = r.u32();
  Corpus corpus;
  corpus.bags.resize(n);
  corpus.raw.resize(n);
  for (std::uint32_t v = 0; v < n; ++v) {
    auto& bag = corpus.bags[v];
    auto& raw = corpus.raw[v];
    bag.video_id = r.u32();
    const auto count = r.u32();
    bag.appearance_label = r.u32();
    bag.motion_label = r.u32();
    raw.video_id = bag.video_id;
    raw.feature.resize(raw_dim);
    for (std::uint32_t j = 0; j < raw_dim; ++j) raw.feature(j) = r.f32();
    if (static_cast<std::uint64_t>(count) * dim > r.remaining() / 4) throw FormatError("corpus file: truncated");
    bag.descriptors.resize(count, dim);
    for (Eigen::Index i = 0; i < bag.descriptors.size(); ++i) bag.descriptors.data()[i] = r.f32();
  }
  if (!r.at_end()) throw FormatError("corpus file: trailing bytes");
  return corpus;
}

void save_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  write_file_atomic(path, serialize_corpus(corpus));
}

Corpus load_corpus(const std::filesystem::path& path) { return deserialize_corpus(read_file(path)); }

}  // namespace trajprior
