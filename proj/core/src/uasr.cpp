// Copyright 2026 The unitforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "unitforge/uasr.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "unitforge/error.hpp"
#include "unitforge/formats.hpp"
#include "unitforge/numkit/ops.hpp"

namespace unitforge::uasr {
namespace {

nk::Tensor random_kernel(Rng& rng, std::size_t k, std::size_t din, std::size_t dout) {
  nk::Tensor w(nk::Shape{k, din, dout});
  const double s = 1.0 / std::sqrt(static_cast<double>(k * din));
  for (double& v : w.data()) v = rng.normal(0.0, s);
  return w;
}

nk::Tensor zeros(std::size_t n) { return nk::Tensor(nk::Shape{n}, 0.0); }

std::string layer_name(std::size_t i) { return "conv" + std::to_string(i); }

// Leaky-ReLU derivative pattern of a pre-activation, as a constant.
nk::Var leaky_mask(const nk::Tensor& pre, double slope) {
  nk::Tensor m = nk::Tensor::zeros_like(pre);
  for (std::size_t i = 0; i < pre.size(); ++i) m[i] = pre[i] > 0.0 ? 1.0 : slope;
  return nk::constant(std::move(m));
}

nk::Tensor crop_rows(const nk::Tensor& t, std::size_t rows) {
  std::vector<double> data(t.data().begin(), t.data().begin() + static_cast<std::ptrdiff_t>(rows * t.cols()));
  return nk::Tensor(nk::Shape{rows, t.cols()}, std::move(data));
}

}  // namespace

void GeneratorConfig::validate() const {
  if (input_dim == 0 || hidden_dim == 0 || kernel == 0 || train_stride == 0 || num_classes == 0) {
    throw Error("generator dimensions, kernel and stride must be positive");
  }
  if (!(leaky_slope >= 0.0 && leaky_slope < 1.0)) throw Error("leaky_slope must be in [0, 1)");
}

Generator::Generator(GeneratorConfig cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(seed);
  params_.add("conv1.weight", random_kernel(rng, cfg_.kernel, cfg_.input_dim, cfg_.hidden_dim));
  params_.add("conv1.bias", zeros(cfg_.hidden_dim));
  params_.add("conv2.weight", random_kernel(rng, 1, cfg_.hidden_dim, cfg_.num_classes));
  params_.add("conv2.bias", zeros(cfg_.num_classes));
  if (cfg_.aux_classes > 0) {
    nk::Tensor w = nk::Tensor::matrix(cfg_.hidden_dim, cfg_.aux_classes);
    const double s = 1.0 / std::sqrt(static_cast<double>(cfg_.hidden_dim));
    for (double& v : w.data()) v = rng.normal(0.0, s);
    params_.add("aux.weight", std::move(w));
    params_.add("aux.bias", zeros(cfg_.aux_classes));
  }
}

GeneratorOutput Generator::forward(const nk::Var& feats, std::size_t stride) const {
  if (stride == 0) throw Error("generator stride must be positive");
  if (feats.value().rank() != 2 || feats.value().cols() != cfg_.input_dim) {
    throw Error("generator expects " + std::to_string(cfg_.input_dim) + "-dim frames, got " +
                feats.value().shape_str());
  }
  if (feats.value().rows() < cfg_.kernel) {
    throw Error("generator input of " + std::to_string(feats.value().rows()) + " frames is shorter than kernel " +
                std::to_string(cfg_.kernel));
  }
  GeneratorOutput out;
  out.stride = stride;
  out.hidden = nk::leaky_relu(
      nk::add_bias(nk::conv1d(feats, params_.get("conv1.weight"), stride), params_.get("conv1.bias")),
      cfg_.leaky_slope);
  out.logits = nk::add_bias(nk::conv1d(out.hidden, params_.get("conv2.weight"), 1), params_.get("conv2.bias"));
  if (cfg_.aux_classes > 0) {
    out.aux_logits = nk::add_bias(nk::matmul(out.hidden, params_.get("aux.weight")), params_.get("aux.bias"));
  }
  return out;
}

void Generator::save(const std::filesystem::path& dir) const {
  nk::save_tensors(dir, params_.snapshot());
  nlohmann::json j = {{"input_dim", cfg_.input_dim},     {"hidden_dim", cfg_.hidden_dim},
                      {"kernel", cfg_.kernel},           {"train_stride", cfg_.train_stride},
                      {"num_classes", cfg_.num_classes}, {"aux_classes", cfg_.aux_classes},
                      {"leaky_slope", cfg_.leaky_slope}};
  write_text_file(dir / "generator.json", j.dump(2) + "\n");
}

Generator Generator::load(const std::filesystem::path& dir) {
  GeneratorConfig cfg;
  try {
    const auto j = nlohmann::json::parse(read_text_file(dir / "generator.json"));
    cfg.input_dim = j.at("input_dim").get<std::size_t>();
    cfg.hidden_dim = j.at("hidden_dim").get<std::size_t>();
    cfg.kernel = j.at("kernel").get<std::size_t>();
    cfg.train_stride = j.at("train_stride").get<std::size_t>();
    cfg.num_classes = j.at("num_classes").get<std::size_t>();
    cfg.aux_classes = j.at("aux_classes").get<std::size_t>();
    cfg.leaky_slope = j.at("leaky_slope").get<double>();
  } catch (const nlohmann::json::exception& ex) {
    throw IoError(std::string("malformed generator.json: ") + ex.what());
  }
  Generator g(cfg, 0);
  g.params_.load(nk::load_tensors(dir));
  return g;
}

nk::Tensor generator_forward(const FeatureSeq& feats, const Generator& g, std::optional<std::size_t> stride_override) {
  const std::size_t stride = stride_override.value_or(g.config().train_stride);
  return g.forward(nk::constant(feats.frames), stride).logits.value();
}

void DiscriminatorConfig::validate() const {
  if (num_classes == 0 || hidden_dim == 0 || num_layers == 0) {
    throw Error("discriminator dimensions must be positive");
  }
  if (kernel == 0 || kernel % 2 == 0) throw Error("discriminator kernel must be odd");
  if (!(leaky_slope >= 0.0 && leaky_slope < 1.0)) throw Error("leaky_slope must be in [0, 1)");
}

Discriminator::Discriminator(DiscriminatorConfig cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(seed);
  std::size_t din = cfg_.num_classes;
  for (std::size_t i = 0; i < cfg_.num_layers; ++i) {
    const std::size_t dout = i + 1 == cfg_.num_layers ? 1 : cfg_.hidden_dim;
    params_.add(layer_name(i) + ".weight", random_kernel(rng, cfg_.kernel, din, dout));
    params_.add(layer_name(i) + ".bias", zeros(dout));
    din = dout;
  }
}

nk::Var Discriminator::score(const nk::Var& x) const {
  if (x.value().rank() != 2 || x.value().cols() != cfg_.num_classes || x.value().rows() == 0) {
    throw Error("discriminator expects a T x " + std::to_string(cfg_.num_classes) + " sequence, got " +
                x.value().shape_str());
  }
  const std::size_t pad = cfg_.kernel / 2;
  nk::Var h = x;
  for (std::size_t i = 0; i < cfg_.num_layers; ++i) {
    h = nk::add_bias(nk::conv1d(nk::pad_rows(h, pad, pad), params_.get(layer_name(i) + ".weight"), 1),
                     params_.get(layer_name(i) + ".bias"));
    if (i + 1 < cfg_.num_layers) h = nk::leaky_relu(h, cfg_.leaky_slope);
  }
  return nk::mean(h);
}

nk::Var Discriminator::input_gradient(const nk::Var& x) const {
  if (x.value().rank() != 2 || x.value().cols() != cfg_.num_classes || x.value().rows() == 0) {
    throw Error("discriminator expects a T x " + std::to_string(cfg_.num_classes) + " sequence, got " +
                x.value().shape_str());
  }
  const std::size_t frames = x.value().rows();
  const std::size_t pad = cfg_.kernel / 2;
  // Forward pass for the activation patterns only.
  std::vector<nk::Var> masks;
  nk::Tensor h = x.value();
  for (std::size_t i = 0; i + 1 < cfg_.num_layers; ++i) {
    nk::Var pre = nk::add_bias(
        nk::conv1d(nk::pad_rows(nk::constant(h), pad, pad), params_.get(layer_name(i) + ".weight"), 1),
        params_.get(layer_name(i) + ".bias"));
    masks.push_back(leaky_mask(pre.value(), cfg_.leaky_slope));
    h = nk::leaky_relu(nk::constant(pre.value()), cfg_.leaky_slope).value();
  }
  nk::Var grad = nk::constant(nk::Tensor::matrix(frames, 1, 1.0 / static_cast<double>(frames)));
  for (std::size_t i = cfg_.num_layers; i-- > 0;) {
    const nk::Var padded =
        nk::conv1d_input_grad(grad, params_.get(layer_name(i) + ".weight"), 1, frames + 2 * pad);
    grad = nk::slice_rows(padded, pad, pad + frames);
    if (i > 0) grad = nk::mul(grad, masks[i - 1]);
  }
  return grad;
}

void UasrWeights::validate() const {
  if (gradient_penalty < 0.0 || smoothness < 0.0 || diversity < 0.0 || aux < 0.0) {
    throw Error("uasr loss weights must be nonnegative");
  }
}

std::vector<int> insert_silence(std::span<const int> seq, double p_sil, int silence_id, Rng& rng) {
  if (!(p_sil >= 0.0 && p_sil <= 1.0)) throw Error("silence probability must be in [0, 1]");
  std::vector<int> out;
  out.reserve(seq.size() * 2 + 1);
  for (std::size_t i = 0; i <= seq.size(); ++i) {
    if (rng.bernoulli(p_sil)) out.push_back(silence_id);
    if (i < seq.size()) out.push_back(seq[i]);
  }
  return out;
}

nk::Tensor one_hot(std::span<const int> ids, std::size_t num_classes) {
  nk::Tensor t = nk::Tensor::matrix(ids.size(), num_classes);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= num_classes) {
      throw Error("one_hot: id " + std::to_string(ids[i]) + " out of range");
    }
    t.at(i, static_cast<std::size_t>(ids[i])) = 1.0;
  }
  return t;
}

nk::Var gradient_penalty(const Discriminator& d, std::span<const nk::Tensor> real, std::span<const nk::Var> fake,
                         Rng& rng) {
  if (real.size() != fake.size() || real.empty()) {
    throw Error("gradient_penalty: " + std::to_string(real.size()) + " real vs " + std::to_string(fake.size()) +
                " fake sequences");
  }
  std::vector<nk::Var> terms;
  terms.reserve(real.size());
  for (std::size_t i = 0; i < real.size(); ++i) {
    const nk::Tensor& r = real[i];
    const nk::Tensor& f = fake[i].value();
    if (r.rank() != 2 || f.rank() != 2 || r.cols() != f.cols()) {
      throw Error("gradient_penalty: shape mismatch " + r.shape_str() + " vs " + f.shape_str());
    }
    const std::size_t rows = std::min(r.rows(), f.rows());
    const double a = rng.uniform();
    nk::Tensor mix = crop_rows(r, rows);
    const nk::Tensor fc = crop_rows(f, rows);
    for (std::size_t j = 0; j < mix.size(); ++j) mix[j] = a * mix[j] + (1.0 - a) * fc[j];
    const nk::Var g = d.input_gradient(nk::constant(std::move(mix)));
    terms.push_back(nk::square(nk::add_scalar(nk::l2_norm(g), -1.0)));
  }
  nk::Var total = terms[0];
  for (std::size_t i = 1; i < terms.size(); ++i) total = nk::add(total, terms[i]);
  return nk::scale(total, 1.0 / static_cast<double>(terms.size()));
}

nk::Var segment_smoothness(const nk::Var& probs) {
  if (probs.value().rank() != 2 || probs.value().rows() < 2) {
    throw Error("segment_smoothness needs at least two frames");
  }
  const std::size_t n = probs.value().rows();
  return nk::sum(nk::square(nk::sub(nk::slice_rows(probs, 0, n - 1), nk::slice_rows(probs, 1, n))));
}

nk::Var phoneme_diversity(std::span<const nk::Var> probs) {
  if (probs.empty()) throw Error("phoneme_diversity: empty batch");
  return nk::sum_xlogx(nk::mean_rows(nk::concat_rows(probs)));
}

nk::Var aux_ssl_loss(const nk::Var& aux_logits, std::span<const int> cluster_ids) {
  if (!aux_logits.valid() || aux_logits.value().rank() != 2) throw Error("aux_ssl_loss: generator has no aux head");
  const std::size_t rows = aux_logits.value().rows();
  const std::size_t classes = aux_logits.value().cols();
  if (cluster_ids.size() != rows) {
    throw Error("aux_ssl_loss: " + std::to_string(cluster_ids.size()) + " targets for " + std::to_string(rows) +
                " outputs");
  }
  std::vector<std::pair<std::size_t, std::size_t>> picks;
  picks.reserve(rows);
  for (std::size_t t = 0; t < rows; ++t) {
    if (cluster_ids[t] < 0 || static_cast<std::size_t>(cluster_ids[t]) >= classes) {
      throw Error("aux_ssl_loss: cluster id " + std::to_string(cluster_ids[t]) + " outside " +
                  std::to_string(classes) + " aux classes");
    }
    picks.emplace_back(t, static_cast<std::size_t>(cluster_ids[t]));
  }
  return nk::scale(nk::sum(nk::pick(nk::log_softmax_rows(aux_logits), picks)), -1.0 / static_cast<double>(rows));
}

std::vector<int> aux_targets(const FeatureSeq& feats, const units::KMeansModel& clusters, std::size_t kernel,
                             std::size_t stride) {
  if (feats.dim() != clusters.dim()) {
    throw Error("aux_targets: features have dimension " + std::to_string(feats.dim()) + ", clusters " +
                std::to_string(clusters.dim()));
  }
  const std::size_t n = nk::conv1d_output_length(feats.num_frames(), kernel, stride);
  std::vector<int> ids(n);
  for (std::size_t t = 0; t < n; ++t) ids[t] = clusters.assign(feats.frames.row(t * stride + kernel / 2));
  return ids;
}

nk::Var pool_runs(const nk::Var& probs) {
  const nk::Tensor& p = probs.value();
  if (p.rank() != 2 || p.rows() == 0) throw Error("pool_runs: expects a non-empty T x C matrix");
  std::vector<int> best(p.rows());
  for (std::size_t t = 0; t < p.rows(); ++t) {
    auto row = p.row(t);
    best[t] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  std::vector<nk::Var> pooled;
  std::size_t start = 0;
  for (std::size_t t = 1; t <= p.rows(); ++t) {
    if (t < p.rows() && best[t] == best[start]) continue;
    pooled.push_back(nk::mean_rows(nk::slice_rows(probs, start, t)));
    start = t;
  }
  return nk::concat_rows(pooled);
}

UasrModels::UasrModels(const GeneratorConfig& g, const DiscriminatorConfig& d, const nk::AdamConfig& adam,
                       std::uint64_t seed)
    : generator(g, mix_seed(seed, 11)),
      discriminator(d, mix_seed(seed, 12)),
      g_state(adam, std::span<const nk::Var>(generator.params().vars())),
      d_state(adam, std::span<const nk::Var>(discriminator.params().vars())) {
  if (g.num_classes != d.num_classes) throw Error("generator and discriminator class counts differ");
}

LossBreakdown adversarial_step(std::span<const AudioItem> audio, std::span<const std::vector<int>> text,
                               UasrModels& models, const UasrWeights& w, const UasrOptions& opts, Rng& rng) {
  w.validate();
  if (audio.empty() || text.empty()) throw Error("adversarial_step: empty batch");
  Generator& gen = models.generator;
  Discriminator& disc = models.discriminator;
  const std::size_t classes = gen.config().num_classes;
  const std::size_t stride = gen.config().train_stride;
  const double inv_a = 1.0 / static_cast<double>(audio.size());
  const double inv_t = 1.0 / static_cast<double>(text.size());
  LossBreakdown out;

  // Discriminator update on detached generator output.
  std::vector<nk::Tensor> real;
  real.reserve(text.size());
  for (const auto& seq : text) {
    if (seq.empty()) throw Error("adversarial_step: empty text sequence");
    real.push_back(one_hot(seq, classes));
  }
  std::vector<nk::Var> fake_const;
  fake_const.reserve(audio.size());
  for (const auto& item : audio) {
    const nk::Tensor logits = gen.forward(nk::constant(item.feats->frames), stride).logits.value();
    nk::Var p = nk::constant(nk::softmax(logits));
    fake_const.push_back(opts.pool_runs ? nk::constant(pool_runs(p).value()) : p);
  }
  disc.params().zero_grad();
  std::size_t correct = 0;
  nk::Var d_real = nk::constant(nk::Tensor::scalar(0.0));
  for (const auto& r : real) {
    const nk::Var s = disc.score(nk::constant(r));
    if (s.value().item() > 0.0) ++correct;
    d_real = nk::add(d_real, nk::softplus(nk::scale(s, -1.0)));
  }
  d_real = nk::scale(d_real, inv_t);
  nk::Var d_fake = nk::constant(nk::Tensor::scalar(0.0));
  for (const auto& f : fake_const) {
    const nk::Var s = disc.score(f);
    if (s.value().item() < 0.0) ++correct;
    d_fake = nk::add(d_fake, nk::softplus(s));
  }
  d_fake = nk::scale(d_fake, inv_a);
  const std::size_t pairs = std::min(real.size(), fake_const.size());
  nk::Var penalty = w.gradient_penalty > 0.0
                        ? gradient_penalty(disc, std::span(real).first(pairs), std::span(fake_const).first(pairs), rng)
                        : nk::constant(nk::Tensor::scalar(0.0));
  nk::Var d_total = nk::add(nk::add(d_real, d_fake), nk::scale(penalty, w.gradient_penalty));
  out.d_real = d_real.value().item();
  out.d_fake = d_fake.value().item();
  out.d_penalty = penalty.value().item();
  out.d_total = d_total.value().item();
  out.d_accuracy = static_cast<double>(correct) / static_cast<double>(real.size() + fake_const.size());
  if (!std::isfinite(out.d_total)) throw DivergenceError("uasr: non-finite discriminator loss");
  nk::backward(d_total);
  nk::adam_step(std::span<nk::Var>(disc.params().vars()), models.d_state, opts.d_lr);

  // Generator update.
  gen.params().zero_grad();
  nk::Var adv = nk::constant(nk::Tensor::scalar(0.0));
  nk::Var smooth = nk::constant(nk::Tensor::scalar(0.0));
  nk::Var aux = nk::constant(nk::Tensor::scalar(0.0));
  std::vector<nk::Var> probs;
  probs.reserve(audio.size());
  for (const auto& item : audio) {
    const GeneratorOutput g = gen.forward(nk::constant(item.feats->frames), stride);
    const nk::Var p = nk::softmax_rows(g.logits);
    probs.push_back(p);
    adv = nk::add(adv, nk::softplus(nk::scale(disc.score(opts.pool_runs ? pool_runs(p) : p), -1.0)));
    const std::size_t n = p.value().rows();
    if (n >= 2) smooth = nk::add(smooth, nk::scale(segment_smoothness(p), 1.0 / static_cast<double>(n - 1)));
    if (w.aux > 0.0 && !item.aux_ids.empty()) aux = nk::add(aux, aux_ssl_loss(g.aux_logits, item.aux_ids));
  }
  adv = nk::scale(adv, inv_a);
  smooth = nk::scale(smooth, inv_a);
  aux = nk::scale(aux, inv_a);
  const nk::Var diversity = phoneme_diversity(probs);
  nk::Var g_total = nk::add(adv, nk::scale(smooth, w.smoothness));
  g_total = nk::add(g_total, nk::scale(diversity, w.diversity));
  g_total = nk::add(g_total, nk::scale(aux, w.aux));
  out.g_adv = adv.value().item();
  out.g_smooth = smooth.value().item();
  out.g_diversity = diversity.value().item();
  out.g_aux = aux.value().item();
  out.g_total = g_total.value().item();
  if (!std::isfinite(out.g_total)) throw DivergenceError("uasr: non-finite generator loss");
  nk::backward(g_total);
  nk::adam_step(std::span<nk::Var>(gen.params().vars()), models.g_state, opts.g_lr);
  disc.params().zero_grad();
  return out;
}

void UasrConfig::validate() const {
  generator.validate();
  discriminator.validate();
  weights.validate();
  if (generator.num_classes != discriminator.num_classes) {
    throw Error("generator and discriminator class counts differ");
  }
  if (!(silence_prob >= 0.0 && silence_prob <= 1.0)) throw Error("silence_prob must be in [0, 1]");
  if (silence_id < 0 || static_cast<std::size_t>(silence_id) >= generator.num_classes) {
    throw Error("silence_id out of range");
  }
  if (options.batch_size == 0) throw Error("uasr batch_size must be positive");
  if (weights.aux > 0.0 && generator.aux_classes == 0) throw Error("aux weight set but generator has no aux head");
}

UasrResult train_uasr(const std::vector<FeatureSeq>& corpus, const std::vector<std::vector<int>>& text,
                      const UasrConfig& cfg, const GeneratorHook& hook) {
  cfg.validate();
  if (corpus.empty()) throw Error("train_uasr: empty audio corpus");
  if (text.empty()) throw Error("train_uasr: empty text corpus");
  for (const auto& seq : text) {
    if (seq.empty()) throw Error("train_uasr: empty text sequence");
  }
  for (const auto& f : corpus) {
    if (f.dim() != cfg.generator.input_dim) {
      throw Error("train_uasr: features have dimension " + std::to_string(f.dim()) + ", generator expects " +
                  std::to_string(cfg.generator.input_dim));
    }
    if (f.num_frames() < cfg.generator.kernel) throw Error("train_uasr: utterance shorter than generator kernel");
  }
  Rng rng(cfg.seed);
  std::vector<std::vector<int>> aux_ids(corpus.size());
  if (cfg.weights.aux > 0.0) {
    units::KMeansOptions km;
    km.k = cfg.generator.aux_classes;
    km.seed = mix_seed(cfg.seed, 13);
    km.max_iters = 20;
    const units::KMeansModel clusters = units::kmeans_fit(units::stack_frames(corpus), km).model;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      aux_ids[i] = aux_targets(corpus[i], clusters, cfg.generator.kernel, cfg.generator.train_stride);
    }
  }
  UasrModels models(cfg.generator, cfg.discriminator, cfg.options.adam, cfg.seed);
  Rng batch_rng = rng.fork(1);
  Rng step_rng = rng.fork(2);
  UasrResult result{models.generator, {}};
  result.log.reserve(cfg.steps);
  std::vector<AudioItem> audio(cfg.options.batch_size);
  std::vector<std::vector<int>> batch_text(cfg.options.batch_size);
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    for (std::size_t b = 0; b < cfg.options.batch_size; ++b) {
      const std::size_t i = batch_rng.uniform_int(corpus.size());
      audio[b] = AudioItem{&corpus[i], aux_ids[i]};
      const auto& seq = text[batch_rng.uniform_int(text.size())];
      batch_text[b] = insert_silence(seq, cfg.silence_prob, cfg.silence_id, batch_rng);
    }
    LossBreakdown lb;
    try {
      lb = adversarial_step(audio, batch_text, models, cfg.weights, cfg.options, step_rng);
    } catch (const DivergenceError& e) {
      throw DivergenceError(std::string(e.what()) + " at step " + std::to_string(step + 1));
    }
    result.log.push_back(lb);
    if (hook.every > 0 && hook.save && ((step + 1) % hook.every == 0 || step + 1 == cfg.steps)) {
      hook.save(models.generator, step + 1);
    }
  }
  result.generator = models.generator;
  return result;
}

FrameLabels frame_phoneme_labels(const Generator& g, const FeatureSeq& feats, std::string utt_id) {
  const nk::Tensor logits = generator_forward(feats, g, 1);
  const std::size_t frames = feats.num_frames();
  const std::size_t n = logits.rows();
  const std::size_t left = (frames - n) / 2;
  std::vector<int> core(n);
  for (std::size_t t = 0; t < n; ++t) {
    auto row = logits.row(t);
    core[t] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  FrameLabels out;
  out.utt_id = std::move(utt_id);
  out.vocab_size = static_cast<int>(g.config().num_classes);
  out.ids.reserve(frames);
  out.ids.insert(out.ids.end(), left, core.front());
  out.ids.insert(out.ids.end(), core.begin(), core.end());
  out.ids.insert(out.ids.end(), frames - n - left, core.back());
  return out;
}

}  // namespace unitforge::uasr
