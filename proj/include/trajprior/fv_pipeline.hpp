// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TRAJPRIOR_FV_PIPELINE_HPP_
#define TRAJPRIOR_FV_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "trajprior/common.hpp"
#include "trajprior/io.hpp"
#include "trajprior/synth_corpus.hpp"

namespace trajprior {

struct PcaModel {
  Vector mean;                             // raw dim
  Matrix basis;                            // D x raw dim, orthonormal rows
  Vector eigenvalues;                      // retained, decreasing
  double retained_variance_fraction = 1.0;

  Eigen::Index input_dim() const { return basis.cols(); }
  Eigen::Index output_dim() const { return basis.rows(); }
  Vector project(const Vector& x) const;
  Matrix project_rows(const Matrix& rows) const;
};

// Keeps the fewest leading principal components whose cumulative explained
// variance reaches `variance_fraction`. No whitening.
PcaModel fit_pca(const Matrix& sample, double variance_fraction);

struct GmmModel {
  Vector weights;  // K, sums to one
  Matrix means;    // K x D
  Matrix stds;     // K x D, diagonal standard deviations

  Eigen::Index num_components() const { return weights.size(); }
  Eigen::Index dim() const { return means.cols(); }

  // Log of the weighted component densities log(w_k N(x; mu_k, sigma_k)).
  Vector log_joint(const Vector& x) const;
  // Posteriors p(k | x); sum to one.
  Vector responsibilities(const Vector& x) const;
  double log_likelihood(const Vector& x) const;
  // Mean per-sample log-likelihood.
  double mean_log_likelihood(const Matrix& sample) const;
};

struct GmmFitResult {
  GmmModel model;
  // Mean per-sample log-likelihood of every parameter iterate, starting
  // with the initialization.
  std::vector<double> log_likelihood_trace;
  // Trace positions immediately after which a collapsed component was re-seeded.
  std::vector<std::size_t> reseed_points;
  int iterations = 0;
  double variance_floor_scale = 1e-4;
};

// Diagonal-covariance EM initialized from k-means++ seeding plus Lloyd
// refinement. Variances are floored at 1e-4 x the global per-dimension
// variance of the sample.
GmmFitResult fit_gmm(const Matrix& sample, std::uint32_t k, int max_iters, double tol, std::uint64_t seed);

// phi*_k = gamma_k / sqrt(w_k) * [ (x - mu_k)/sigma_k , ((x - mu_k)/sigma_k)^2 - 1) / sqrt(2) ]
// stacked over k; length 2 K D.
Vector encode_trajectory(const Vector& x, const GmmModel& gmm);

// Count sketch: out[bucket[j]] += sign[j] * z[j].
struct SketchProjection {
  std::uint32_t input_dim = 0;
  std::uint32_t output_dim = 0;
  std::vector<std::uint32_t> bucket;
  std::vector<std::int8_t> sign;
  std::uint64_t seed = 0;

  static SketchProjection random(std::uint32_t input_dim, std::uint32_t output_dim, std::uint64_t seed);
  void validate() const;
};

Vector sketch_apply(const Vector& z, const SketchProjection& sketch);

struct FisherCodebook {
  PcaModel pca;
  GmmModel gmm;
  double power_alpha = 0.5;
  SketchProjection sketch;

  std::uint32_t fisher_dim() const { return static_cast<std::uint32_t>(2 * gmm.num_components() * gmm.dim()); }
  std::uint32_t output_dim() const { return sketch.output_dim; }
  void validate() const;
};

struct CodebookConfig {
  double variance_fraction = 0.9;
  std::uint32_t gmm_components = 16;
  int gmm_max_iters = 100;
  double gmm_tol = 1e-6;
  double power_alpha = 0.5;
  std::uint32_t sketch_dim = 256;
  std::uint32_t fit_videos = 64;
  std::uint32_t fit_descriptors = 64;
  std::uint64_t seed = 0;

  void validate() const;
};

// Samples fit_videos bags uniformly without replacement, then
// fit_descriptors rows per bag uniformly with replacement.
Matrix sample_fitting_descriptors(const std::vector<DescriptorBag>& bags, const CodebookConfig& config);

FisherCodebook fit_codebook(const std::vector<DescriptorBag>& bags, const CodebookConfig& config);

// Averaged Fisher vector of a bag before any normalization.
Vector average_fisher_vector(const DescriptorBag& bag, const FisherCodebook& codebook);

// sign(z)|z|^alpha followed by l2 normalization. Throws NormalizationError
// naming `what` if the vector is zero.
Vector power_l2_normalize(const Vector& z, double alpha, const std::string& what);

// PCA -> per-trajectory Fisher vector -> average -> power + l2 -> sketch -> l2.
Vector encode_bag(const DescriptorBag& bag, const FisherCodebook& codebook);

// Encodes every bag; row v is p(psi) of bags[v].
Matrix encode_bags(const std::vector<DescriptorBag>& bags, const FisherCodebook& codebook);

ArrayStore codebook_to_store(const FisherCodebook& codebook);
FisherCodebook codebook_from_store(const ArrayStore& store);

// "TJF1" encoded corpus: ids plus f32 rows.
struct EncodedCorpus {
  std::vector<std::uint32_t> video_ids;
  Matrix vectors;  // N x S
};

std::string serialize_encoded(const EncodedCorpus& encoded);
EncodedCorpus deserialize_encoded(std::string_view bytes);
void save_encoded(const std::filesystem::path& path, const EncodedCorpus& encoded);
EncodedCorpus load_encoded(const std::filesystem::path& path);

}  // namespace trajprior

#endif  // TRAJPRIOR_FV_PIPELINE_HPP_
