// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#include "trajprior/fv_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "trajprior/clustering.hpp"
#include "trajprior/rng.hpp"

namespace trajprior {

namespace {

constexpr std::string_view kEncodedMagic = "TJF1";
constexpr double kCollapseMass = 1e-8;
constexpr int kMaxReseeds = 5;

double log_sum_exp(const Vector& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

}  // namespace

// ---------------------------------------------------------------- PCA

Vector PcaModel::project(const Vector& x) const {
  require_input(x.size() == input_dim(), "pca: input dimensionality mismatch");
  return basis * (x - mean);
}

Matrix PcaModel::project_rows(const Matrix& rows) const {
  require_input(rows.cols() == input_dim(), "pca: input dimensionality mismatch");
  return (rows.rowwise() - mean.transpose()) * basis.transpose();
}

PcaModel fit_pca(const Matrix& sample, double variance_fraction) {
  require_config(variance_fraction > 0.0 && variance_fraction <= 1.0, "pca: variance fraction must lie in (0, 1]");
  require_input(sample.rows() > sample.cols(), "pca: sample size must exceed the dimensionality");
  PcaModel model;
  model.mean = sample.colwise().mean().transpose();
  const Matrix centered = sample.rowwise() - model.mean.transpose();
  const Matrix cov = (centered.transpose() * centered) / static_cast<double>(sample.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericError("pca: eigendecomposition failed");

  // Eigen returns ascending eigenvalues; walk from the top.
  const Eigen::Index dim = cov.rows();
  Vector values = eig.eigenvalues().reverse().cwiseMax(0.0);
  const double total = values.sum();
  if (!(total > 0.0)) throw DegenerateDataError("pca: sample has no variance");

  Eigen::Index keep = dim;
  double cumulative = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    cumulative += values(i);
    if (cumulative >= variance_fraction * total * (1.0 - 1e-12)) {
      keep = i + 1;
      break;
    }
  }
  model.eigenvalues = values.head(keep);
  model.retained_variance_fraction = std::min(1.0, model.eigenvalues.sum() / total);
  model.basis.resize(keep, dim);
  for (Eigen::Index i = 0; i < keep; ++i) {
    Vector v = eig.eigenvectors().col(dim - 1 - i);
    // Fix the sign so the largest-magnitude coordinate is positive.
    Eigen::Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    model.basis.row(i) = v.transpose();
  }
  return model;
}

// ---------------------------------------------------------------- GMM

Vector GmmModel::log_joint(const Vector& x) const {
  require_input(x.size() == dim(), "gmm: input dimensionality mismatch");
  const auto k = num_components();
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  Vector out(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const auto z = ((x.transpose() - means.row(c)).array() / stds.row(c).array());
    out(c) = std::log(weights(c)) - 0.5 * z.square().sum() - stds.row(c).array().log().sum() -
             0.5 * static_cast<double>(dim()) * log_2pi;
  }
  return out;
}

Vector GmmModel::responsibilities(const Vector& x) const {
  const Vector lj = log_joint(x);
  const double lse = log_sum_exp(lj);
  Vector r = (lj.array() - lse).exp();
  return r / r.sum();
}

double GmmModel::log_likelihood(const Vector& x) const { return log_sum_exp(log_joint(x)); }

double GmmModel::mean_log_likelihood(const Matrix& sample) const {
  double total = 0.0;
  for (Eigen::Index i = 0; i < sample.rows(); ++i) total += log_likelihood(sample.row(i).transpose());
  return total / static_cast<double>(sample.rows());
}

GmmFitResult fit_gmm(const Matrix& sample, std::uint32_t k, int max_iters, double tol, std::uint64_t seed) {
  require_config(k >= 1, "gmm: number of components must be positive");
  require_config(max_iters >= 1, "gmm: max_iters must be positive");
  require_input(sample.rows() >= 10 * static_cast<Eigen::Index>(k),
                "gmm: sample size must be at least 10 x the number of components");
  const Eigen::Index n = sample.rows();
  const Eigen::Index dim = sample.cols();
  const double inv_n = 1.0 / static_cast<double>(n);

  GmmFitResult result;
  const Vector global_mean = sample.colwise().mean().transpose();
  const Vector global_var = ((sample.rowwise() - global_mean.transpose()).array().square().colwise().sum() * inv_n)
                                .transpose();
  const Vector floor = (result.variance_floor_scale * global_var).cwiseMax(std::numeric_limits<double>::min());

  // Initialization: k-means++ seeding refined by a few Lloyd steps.
  const auto init = kmeans(sample, k, seed, 10);
  GmmModel& g = result.model;
  g.weights.resize(k);
  g.means = init.centroids;
  g.stds.resize(k, dim);
  {
    Matrix sq = Matrix::Zero(k, dim);
    std::vector<double> counts(k, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto c = init.assignment[static_cast<std::size_t>(i)];
      sq.row(c) += (sample.row(i) - g.means.row(c)).array().square().matrix();
      counts[c] += 1.0;
    }
    for (std::uint32_t c = 0; c < k; ++c) {
      g.weights(c) = counts[c] * inv_n;
      for (Eigen::Index d = 0; d < dim; ++d) {
        const double var = counts[c] > 1.0 ? sq(c, d) / counts[c] : global_var(d);
        g.stds(c, d) = std::sqrt(std::max(var, floor(d)));
      }
    }
    g.weights /= g.weights.sum();
  }

  Matrix resp(n, k);
  Vector point_ll(n);
  int reseeds = 0;
  for (int it = 0;; ++it) {
    // E-step on the current iterate.
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vector lj = g.log_joint(sample.row(i).transpose());
      const double lse = log_sum_exp(lj);
      point_ll(i) = lse;
      total += lse;
      resp.row(i) = (lj.array() - lse).exp().transpose();
      resp.row(i) /= resp.row(i).sum();
    }
    const double ll = total * inv_n;
    if (!std::isfinite(ll)) throw NumericError("gmm: log-likelihood is not finite");
    result.log_likelihood_trace.push_back(ll);
    const auto t = result.log_likelihood_trace.size();
    const bool just_reseeded = !result.reseed_points.empty() && result.reseed_points.back() + 1 == t;
    if (t >= 2 && !just_reseeded && ll - result.log_likelihood_trace[t - 2] < tol) break;
    if (it == max_iters) break;

    // M-step.
    const Vector mass = resp.colwise().sum().transpose();
    bool reseeded = false;
    for (std::uint32_t c = 0; c < k; ++c) {
      if (mass(c) < kCollapseMass) {
        if (++reseeds > kMaxReseeds) {
          throw FittingError("gmm: components keep collapsing (" + std::to_string(reseeds) + " re-seeds)");
        }
        Eigen::Index worst;
        point_ll.minCoeff(&worst);
        g.means.row(c) = sample.row(worst);
        g.stds.row(c) = global_var.cwiseMax(floor).cwiseSqrt().transpose();
        g.weights(c) = 1.0 / static_cast<double>(k);
        point_ll(worst) = std::numeric_limits<double>::infinity();
        reseeded = true;
        continue;
      }
      const Vector mu = (resp.col(c).transpose() * sample).transpose() / mass(c);
      g.means.row(c) = mu.transpose();
      const Vector var =
          (resp.col(c).transpose() * (sample.rowwise() - mu.transpose()).array().square().matrix()).transpose() /
          mass(c);
      g.stds.row(c) = var.cwiseMax(floor).cwiseSqrt().transpose();
      g.weights(c) = mass(c) * inv_n;
    }
    g.weights /= g.weights.sum();
    if (reseeded) result.reseed_points.push_back(t);
    result.iterations = it + 1;
  }
  return result;
}

// ---------------------------------------------------------------- Fisher vector

Vector encode_trajectory(const Vector& x, const GmmModel& gmm) {
  require_input(x.size() == gmm.dim(), "encode_trajectory: dimensionality mismatch");
  const auto k = gmm.num_components();
  const auto dim = gmm.dim();
  const Vector gamma = gmm.responsibilities(x);
  Vector out(2 * k * dim);
  for (Eigen::Index c = 0; c < k; ++c) {
    const double scale = gamma(c) / std::sqrt(gmm.weights(c));
    const Eigen::Index base = 2 * c * dim;
    for (Eigen::Index d = 0; d < dim; ++d) {
      const double phi = (x(d) - gmm.means(c, d)) / gmm.stds(c, d);
      out(base + d) = scale * phi;
      out(base + dim + d) = scale * (phi * phi - 1.0) / std::numbers::sqrt2;
    }
  }
  return out;
}

// ---------------------------------------------------------------- count sketch

SketchProjection SketchProjection::random(std::uint32_t input_dim, std::uint32_t output_dim, std::uint64_t seed) {
  require_config(input_dim >= 1 && output_dim >= 1, "sketch: dimensions must be positive");
  SketchProjection s;
  s.input_dim = input_dim;
  s.output_dim = output_dim;
  s.seed = seed;
  s.bucket.resize(input_dim);
  s.sign.resize(input_dim);
  Rng rng(seed);
  for (std::uint32_t j = 0; j < input_dim; ++j) {
    s.bucket[j] = static_cast<std::uint32_t>(rng.index(output_dim));
    s.sign[j] = rng.index(2) == 0 ? std::int8_t{1} : std::int8_t{-1};
  }
  return s;
}

void SketchProjection::validate() const {
  require_config(bucket.size() == input_dim && sign.size() == input_dim, "sketch: maps must cover every input index");
  for (std::uint32_t j = 0; j < input_dim; ++j) {
    require_config(bucket[j] < output_dim, "sketch: bucket out of range");
    require_config(sign[j] == 1 || sign[j] == -1, "sketch: sign must be +1 or -1");
  }
}

Vector sketch_apply(const Vector& z, const SketchProjection& sketch) {
  require_input(z.size() == static_cast<Eigen::Index>(sketch.input_dim), "sketch_apply: dimensionality mismatch");
  Vector out = Vector::Zero(sketch.output_dim);
  for (std::uint32_t j = 0; j < sketch.input_dim; ++j) out(sketch.bucket[j]) += sketch.sign[j] * z(j);
  return out;
}

// ---------------------------------------------------------------- codebook

void FisherCodebook::validate() const {
  require_config(pca.output_dim() == gmm.dim(), "codebook: PCA output and GMM dimensionality differ");
  require_config(sketch.input_dim == fisher_dim(), "codebook: sketch input must equal 2 K D");
  require_config(power_alpha > 0.0 && power_alpha <= 1.0, "codebook: power_alpha must lie in (0, 1]");
  sketch.validate();
}

void CodebookConfig::validate() const {
  require_config(variance_fraction > 0.0 && variance_fraction <= 1.0, "codebook: variance_fraction must lie in (0, 1]");
  require_config(gmm_components >= 1, "codebook: gmm_components must be positive");
  require_config(power_alpha > 0.0 && power_alpha <= 1.0, "codebook: power_alpha must lie in (0, 1]");
  require_config(sketch_dim >= 1, "codebook: sketch_dim must be positive");
  require_config(fit_videos >= 1 && fit_descriptors >= 1, "codebook: fitting sample sizes must be positive");
}

Matrix sample_fitting_descriptors(const std::vector<DescriptorBag>& bags, const CodebookConfig& config) {
  require_input(!bags.empty(), "codebook: empty corpus");
  Rng rng(derive_seed(config.seed, "fit-sample"));
  std::vector<std::size_t> order(bags.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t videos = std::min<std::size_t>(config.fit_videos, bags.size());
  for (std::size_t i = 0; i < videos; ++i) std::swap(order[i], order[i + rng.index(bags.size() - i)]);
  const auto dim = bags.front().descriptors.cols();
  Matrix sample(static_cast<Eigen::Index>(videos * config.fit_descriptors), dim);
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < videos; ++i) {
    const auto& d = bags[order[i]].descriptors;
    require_input(d.rows() > 0, "codebook: empty bag in fitting sample");
    for (std::uint32_t t = 0; t < config.fit_descriptors; ++t) {
      sample.row(row++) = d.row(static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(d.rows()))));
    }
  }
  return sample;
}

FisherCodebook fit_codebook(const std::vector<DescriptorBag>& bags, const CodebookConfig& config) {
  config.validate();
  const Matrix sample = sample_fitting_descriptors(bags, config);
  FisherCodebook cb;
  cb.pca = fit_pca(sample, config.variance_fraction);
  const Matrix projected = cb.pca.project_rows(sample);
  cb.gmm = fit_gmm(projected, config.gmm_components, config.gmm_max_iters, config.gmm_tol,
                   derive_seed(config.seed, "gmm"))
               .model;
  cb.power_alpha = config.power_alpha;
  cb.sketch = SketchProjection::random(cb.fisher_dim(), config.sketch_dim, derive_seed(config.seed, "sketch"));
  cb.validate();
  return cb;
}

Vector average_fisher_vector(const DescriptorBag& bag, const FisherCodebook& codebook) {
  require_input(bag.descriptors.rows() > 0, "encode_bag: video " + std::to_string(bag.video_id) + " has no descriptors");
  require_input(bag.descriptors.cols() == codebook.pca.input_dim(),
                "encode_bag: descriptor dimensionality does not match the codebook");
  const Matrix projected = codebook.pca.project_rows(bag.descriptors);
  // Sum in a canonical (lexicographic) row order so the result does not
  // depend on the order trajectories were listed in.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(bag.descriptors.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto& d = bag.descriptors;
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      if (d(a, j) != d(b, j)) return d(a, j) < d(b, j);
    }
    return false;
  });
  Vector sum = Vector::Zero(codebook.fisher_dim());
  for (auto i : order) sum += encode_trajectory(projected.row(i).transpose(), codebook.gmm);
  return sum / static_cast<double>(order.size());
}

Vector power_l2_normalize(const Vector& z, double alpha, const std::string& what) {
  Vector out = z.unaryExpr([alpha](double v) { return std::copysign(std::pow(std::abs(v), alpha), v); });
  const double norm = out.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw NormalizationError("cannot l2-normalize a zero vector (" + what + ")");
  return out / norm;
}

Vector encode_bag(const DescriptorBag& bag, const FisherCodebook& codebook) {
  const std::string what = "video " + std::to_string(bag.video_id);
  const Vector psi = power_l2_normalize(average_fisher_vector(bag, codebook), codebook.power_alpha, what);
  Vector sketched = sketch_apply(psi, codebook.sketch);
  const double norm = sketched.norm();
  if (!(norm > 0.0)) throw NormalizationError("sketched vector is zero (" + what + ")");
  return sketched / norm;
}

Matrix encode_bags(const std::vector<DescriptorBag>& bags, const FisherCodebook& codebook) {
  Matrix out(static_cast<Eigen::Index>(bags.size()), codebook.output_dim());
  for (std::size_t v = 0; v < bags.size(); ++v) out.row(static_cast<Eigen::Index>(v)) = encode_bag(bags[v], codebook).transpose();
  return out;
}

ArrayStore codebook_to_store(const FisherCodebook& cb) {
  ArrayStore s;
  s.put("pca.mean", cb.pca.mean);
  s.put("pca.basis", cb.pca.basis);
  s.put("pca.eigenvalues", cb.pca.eigenvalues);
  s.put_scalar("pca.retained_variance_fraction", cb.pca.retained_variance_fraction);
  s.put("gmm.w", cb.gmm.weights);
  s.put("gmm.mu", cb.gmm.means);
  s.put("gmm.sigma", cb.gmm.stds);
  std::vector<double> bucket(cb.sketch.bucket.begin(), cb.sketch.bucket.end());
  std::vector<double> sign(cb.sketch.sign.begin(), cb.sketch.sign.end());
  s.put("sketch.bucket", bucket);
  s.put("sketch.sign", sign);
  s.put_scalar("alpha", cb.power_alpha);
  s.put_u64_scalar("seed", cb.sketch.seed);
  const std::vector<double> dims = {static_cast<double>(cb.pca.input_dim()), static_cast<double>(cb.gmm.dim()),
                                    static_cast<double>(cb.gmm.num_components()), static_cast<double>(cb.fisher_dim()),
                                    static_cast<double>(cb.sketch.output_dim)};
  s.put("dims", dims);
  return s;
}

FisherCodebook codebook_from_store(const ArrayStore& s) {
  FisherCodebook cb;
  cb.pca.mean = s.vector("pca.mean");
  cb.pca.basis = s.matrix("pca.basis");
  cb.pca.eigenvalues = s.vector("pca.eigenvalues");
  cb.pca.retained_variance_fraction = s.scalar("pca.retained_variance_fraction");
  cb.gmm.weights = s.vector("gmm.w");
  cb.gmm.means = s.matrix("gmm.mu");
  cb.gmm.stds = s.matrix("gmm.sigma");
  cb.power_alpha = s.scalar("alpha");
  const Vector dims = s.vector("dims");
  if (dims.size() != 5) throw FormatError("codebook: dims entry must have 5 values");
  const Vector bucket = s.vector("sketch.bucket");
  const Vector sign = s.vector("sketch.sign");
  cb.sketch.input_dim = static_cast<std::uint32_t>(dims(3));
  cb.sketch.output_dim = static_cast<std::uint32_t>(dims(4));
  cb.sketch.seed = s.u64_scalar("seed");
  cb.sketch.bucket.assign(bucket.begin(), bucket.end());
  cb.sketch.sign.resize(static_cast<std::size_t>(sign.size()));
  for (Eigen::Index j = 0; j < sign.size(); ++j) cb.sketch.sign[static_cast<std::size_t>(j)] = static_cast<std::int8_t>(sign(j));
  try {
    cb.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("codebook: inconsistent container: ") + e.what());
  }
  return cb;
}

std::string serialize_encoded(const EncodedCorpus& e) {
  require_input(e.video_ids.size() == static_cast<std::size_t>(e.vectors.rows()), "encoded corpus: id count mismatch");
  ByteWriter w;
  w.bytes(kEncodedMagic);
  w.u32(static_cast<std::uint32_t>(e.vectors.rows()));
  w.u32(static_cast<std::uint32_t>(e.vectors.cols()));
  for (Eigen::Index v = 0; v < e.vectors.rows(); ++v) {
    w.u32(e.video_ids[static_cast<std::size_t>(v)]);
    for (Eigen::Index j = 0; j < e.vectors.cols(); ++j) w.f32(static_cast<float>(e.vectors(v, j)));
  }
  return w.release();
}

EncodedCorpus deserialize_encoded(std::string_view bytes) {
  ByteReader r(bytes, "encoded corpus");
  if (r.bytes(4) != kEncodedMagic) throw FormatError("encoded corpus: bad magic (expected TJF1)");
  const auto n = r.u32();
  const auto s = r.u32();
  if (static_cast<std::uint64_t>(n) * (4 + 4ULL * s) != r.remaining()) throw FormatError("encoded corpus: size mismatch");
  EncodedCorpus e;
  e.video_ids.resize(n);
  e.vectors.resize(n, s);
  for (std::uint32_t v = 0; v < n; ++v) {
    e.video_ids[v] = r.u32();
    for (std::uint32_t j = 0; j < s; ++j) e.vectors(v, j) = r.f32();
  }
  return e;
}

void save_encoded(const std::filesystem::path& path, const EncodedCorpus& encoded) {
  write_file_atomic(path, serialize_encoded(encoded));
}

EncodedCorpus load_encoded(const std::filesystem::path& path) { return deserialize_encoded(read_file(path)); }

}  // namespace trajprior
