// src/model.cpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "samom/model.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace samom {

using nn::Mat;
using nn::Vec;

// ---------------------------------------------------------------------------
// Config

ExtractorConfig ExtractorConfig::full_size() {
  ExtractorConfig c;
  c.n_filters = 512;
  c.kernel_len = 16;
  c.bottleneck_ch = 128;
  c.conv_ch = 512;
  c.n_repeats = 3;
  c.blocks_per_repeat = 8;
  c.embed_dim = 256;
  c.fusion_block_index = 6;  // the 7th block of the flattened stack
  c.n_outputs = 1;
  return c;
}

ExtractorConfig ExtractorConfig::toy() { return ExtractorConfig{}; }

void ExtractorConfig::validate() const {
  if (n_filters <= 0 || kernel_len <= 0 || bottleneck_ch <= 0 ||
      conv_ch <= 0 || n_repeats <= 0 || blocks_per_repeat <= 0 ||
      embed_dim <= 0 || n_outputs <= 0) {
    throw std::invalid_argument("ExtractorConfig: all dims must be positive");
  }
  if (kernel_len % 2 != 0) {
    throw std::invalid_argument("ExtractorConfig: kernel_len must be even");
  }
  if (fusion_block_index < 0 || fusion_block_index >= n_blocks()) {
    throw std::invalid_argument(
        "ExtractorConfig: fusion_block_index " +
        std::to_string(fusion_block_index) + " out of range [0, " +
        std::to_string(n_blocks()) + ")");
  }
}

// ---------------------------------------------------------------------------
// ConvBlock

void ConvBlock::init(int bottleneck_ch, int conv_ch, int dilation, Rng& rng) {
  conv_in.init(conv_ch, bottleneck_ch, /*bias=*/true, rng);
  norm_in.init(conv_ch);
  dconv.init(conv_ch, dilation, rng);
  norm_hidden.init(conv_ch);
  conv_out.init(bottleneck_ch, conv_ch, /*bias=*/true, rng);
}

Mat ConvBlock::forward(const Mat& x, Cache& cache) const {
  cache.x_in = x;
  cache.h1 = conv_in.forward(x);
  const Mat a1 = prelu_in.forward(cache.h1);
  cache.n1 = norm_in.forward(a1, cache.n1c);
  cache.h2 = dconv.forward(cache.n1);
  const Mat a2 = prelu_hidden.forward(cache.h2);
  cache.n2 = norm_hidden.forward(a2, cache.n2c);
  return x + conv_out.forward(cache.n2);
}

Mat ConvBlock::backward(const Cache& cache, const Mat& gy) {
  const Mat gn2 = conv_out.backward(cache.n2, gy);
  const Mat ga2 = norm_hidden.backward(cache.n2c, gn2);
  const Mat gh2 = prelu_hidden.backward(cache.h2, ga2);
  const Mat gn1 = dconv.backward(cache.n1, gh2);
  const Mat ga1 = norm_in.backward(cache.n1c, gn1);
  const Mat gh1 = prelu_in.backward(cache.h1, ga1);
  return conv_in.backward(cache.x_in, gh1) + gy;  // residual path
}

void ConvBlock::collect(const std::string& prefix,
                        std::vector<nn::ParamRef>& out) {
  conv_in.collect(prefix + ".conv_in", out);
  prelu_in.collect(prefix + ".prelu_in", out);
  norm_in.collect(prefix + ".norm_in", out);
  dconv.collect(prefix + ".dconv", out);
  prelu_hidden.collect(prefix + ".prelu_hidden", out);
  norm_hidden.collect(prefix + ".norm_hidden", out);
  conv_out.collect(prefix + ".conv_out", out);
}

// ---------------------------------------------------------------------------
// Extractor

Extractor Extractor::init(const ExtractorConfig& config, Rng& rng) {
  config.validate();
  Extractor m;
  m.cfg_ = config;

  m.encoder_.init(config.n_filters, config.kernel_len, /*bias=*/false, rng);
  m.input_norm_.init(config.n_filters);
  m.bottleneck_.init(config.bottleneck_ch, config.n_filters, true, rng);
  m.blocks_.resize(config.n_blocks());
  for (int b = 0; b < config.n_blocks(); ++b) {
    const int dilation = 1 << (b % config.blocks_per_repeat);
    m.blocks_[b].init(config.bottleneck_ch, config.conv_ch, dilation, rng);
  }
  if (config.n_outputs == 1) {
    m.fusion_proj_.init(config.bottleneck_ch, config.embed_dim, true, rng);
  }
  m.mask_conv_.init(config.n_filters * config.n_outputs, config.bottleneck_ch,
                    true, rng);
  m.decoder_.init(config.kernel_len, config.n_filters, /*bias=*/false, rng);

  if (config.n_outputs == 1) {
    m.aux_encoder_.init(config.n_filters, config.kernel_len, false, rng);
    m.aux_input_norm_.init(config.n_filters);
    m.aux_bottleneck_.init(config.bottleneck_ch, config.n_filters, true, rng);
    m.aux_block_.init(config.bottleneck_ch, config.conv_ch, 1, rng);
    m.aux_embed_.init(config.embed_dim, config.bottleneck_ch, true, rng);
  }
  return m;
}

namespace {

void check_min_length(const Waveform& w, int kernel_len, const char* what) {
  if (w.length() < static_cast<std::size_t>(kernel_len)) {
    throw std::invalid_argument(std::string(what) + " length " +
                                std::to_string(w.length()) +
                                " shorter than kernel_len " +
                                std::to_string(kernel_len));
  }
}

}  // namespace

void Extractor::run_aux(const Waveform& enrollment, AuxTrace& aux) const {
  check_min_length(enrollment, cfg_.kernel_len, "enrollment");
  validate_waveform(enrollment, "enrollment");
  const int hop = cfg_.hop();
  aux.frames = nn::frame_count(enrollment.length(), cfg_.kernel_len, hop);
  aux.windows =
      nn::make_windows(enrollment.samples, cfg_.kernel_len, hop, aux.frames);
  aux.pre_act = aux_encoder_.forward(aux.windows);
  aux.act = aux.pre_act.cwiseMax(0.0);  // non-negative filterbank activation
  aux.normed = aux_input_norm_.forward(aux.act, aux.norm_c);
  aux.bneck_out = aux_bottleneck_.forward(aux.normed);
  aux.block_out = aux_block_.forward(aux.bneck_out, aux.block_c);
  aux.pooled = aux.block_out.rowwise().mean();
  aux.embedding = aux_embed_.forward(aux.pooled);
}

nn::Vec Extractor::speaker_embed(const Waveform& enrollment) const {
  if (cfg_.n_outputs != 1) {
    throw std::logic_error("speaker_embed: BSS configs have no aux network");
  }
  Trace scratch;
  run_aux(enrollment, scratch.aux);
  return scratch.aux.embedding;
}

std::vector<Waveform> Extractor::forward(const Waveform& mixture,
                                         const Waveform* enrollment,
                                         Trace& trace) const {
  check_min_length(mixture, cfg_.kernel_len, "mixture");
  validate_waveform(mixture, "mixture");

  const int hop = cfg_.hop();
  trace.input_len = mixture.length();
  trace.frames = nn::frame_count(mixture.length(), cfg_.kernel_len, hop);
  trace.padded_len =
      static_cast<std::size_t>(trace.frames - 1) * hop + cfg_.kernel_len;

  // Speaker embedding first, so the fusion gate is ready.
  if (enrollment != nullptr) {
    run_aux(*enrollment, trace.aux);
  }

  trace.windows = nn::make_windows(mixture.samples, cfg_.kernel_len, hop,
                                   trace.frames);
  trace.encoder_frames = encoder_.forward(trace.windows);
  trace.input_normed =
      input_norm_.forward(trace.encoder_frames, trace.input_norm_c);
  trace.bneck_out = bottleneck_.forward(trace.input_normed);

  Mat stream = trace.bneck_out;
  trace.blocks.resize(blocks_.size());
  trace.has_fusion = enrollment != nullptr;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    if (trace.has_fusion &&
        static_cast<int>(b) == cfg_.fusion_block_index) {
      // Multiplicative adaptation: gate the residual stream per channel by
      // the projected speaker embedding, broadcast over time.
      trace.fusion_pre = stream;
      trace.fusion_scale = fusion_proj_.forward(trace.aux.embedding);
      stream = trace.fusion_scale.asDiagonal() * stream;
    }
    stream = blocks_[b].forward(stream, trace.blocks[b]);
  }
  trace.mask_in = stream;
  trace.mask_pre = mask_prelu_.forward(trace.mask_in);
  Mat logits = mask_conv_.forward(trace.mask_pre);
  trace.mask =
      logits.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });

  const int M = cfg_.n_outputs;
  const int N = cfg_.n_filters;
  trace.masked.resize(trace.mask.rows(), trace.mask.cols());
  std::vector<Waveform> outputs;
  outputs.reserve(M);
  for (int m = 0; m < M; ++m) {
    trace.masked.middleRows(m * N, N) =
        trace.mask.middleRows(m * N, N).cwiseProduct(trace.encoder_frames);
    const Mat decoded = decoder_.forward(trace.masked.middleRows(m * N, N));
    std::vector<double> padded = nn::overlap_add(decoded, hop, trace.padded_len);
    Waveform out;
    out.sample_rate_hz = mixture.sample_rate_hz;
    out.samples.assign(padded.begin(), padded.begin() + trace.input_len);
    outputs.push_back(std::move(out));
  }
  return outputs;
}

Waveform Extractor::extract(const Waveform& mixture,
                            const Waveform& enrollment) const {
  Trace scratch;
  return extract_traced(mixture, enrollment, scratch);
}

Waveform Extractor::extract_traced(const Waveform& mixture,
                                   const Waveform& enrollment,
                                   Trace& trace) const {
  if (cfg_.n_outputs != 1) {
    throw std::logic_error(
        "extract: config has n_outputs > 1; use separate_bss");
  }
  return forward(mixture, &enrollment, trace)[0];
}

std::vector<Waveform> Extractor::separate_bss(const Waveform& mixture) const {
  Trace scratch;
  return separate_traced(mixture, scratch);
}

std::vector<Waveform> Extractor::separate_traced(const Waveform& mixture,
                                                 Trace& trace) const {
  if (cfg_.n_outputs < 2) {
    throw std::logic_error("separate_bss: config has n_outputs == 1");
  }
  return forward(mixture, nullptr, trace);
}

void Extractor::backward(const Trace& trace,
                         const std::vector<std::vector<double>>& output_grads) {
  const int M = cfg_.n_outputs;
  const int N = cfg_.n_filters;
  const int hop = cfg_.hop();
  if (static_cast<int>(output_grads.size()) != M) {
    throw std::invalid_argument("backward: expected " + std::to_string(M) +
                                " output gradients, got " +
                                std::to_string(output_grads.size()));
  }

  Mat g_frames = Mat::Zero(N, trace.frames);         // d/d encoder frames
  Mat g_mask = Mat::Zero(trace.mask.rows(), trace.mask.cols());
  for (int m = 0; m < M; ++m) {
    if (output_grads[m].size() != trace.input_len) {
      throw std::invalid_argument("backward: output gradient length mismatch");
    }
    // Through trim + overlap-add: the window gradient is the framed output
    // gradient (zero beyond the un-padded length).
    const Mat g_windows = nn::make_windows(output_grads[m], cfg_.kernel_len,
                                           hop, trace.frames);
    const auto z = trace.masked.middleRows(m * N, N);
    decoder_.backward_params(z, g_windows);
    const Mat gz = decoder_.w.transpose() * g_windows;
    g_mask.middleRows(m * N, N) = gz.cwiseProduct(trace.encoder_frames);
    g_frames.noalias() +=
        gz.cwiseProduct(trace.mask.middleRows(m * N, N));
  }

  // Sigmoid backward.
  const Mat g_logits = g_mask.cwiseProduct(
      trace.mask.cwiseProduct((1.0 - trace.mask.array()).matrix()));
  const Mat g_mask_pre = mask_conv_.backward(trace.mask_pre, g_logits);
  Mat g_stream = mask_prelu_.backward(trace.mask_in, g_mask_pre);

  for (int b = static_cast<int>(blocks_.size()) - 1; b >= 0; --b) {
    g_stream = blocks_[b].backward(trace.blocks[b], g_stream);
    if (trace.has_fusion && b == cfg_.fusion_block_index) {
      // g_stream is the gradient at the gated stream.
      const Vec g_scale =
          g_stream.cwiseProduct(trace.fusion_pre).rowwise().sum();
      g_stream = trace.fusion_scale.asDiagonal() * g_stream;
      fusion_proj_.backward_params(trace.aux.embedding, g_scale);
      const Vec g_embed = fusion_proj_.w.transpose() * g_scale;

      // Auxiliary network backward.
      const AuxTrace& aux = trace.aux;
      aux_embed_.backward_params(aux.pooled, g_embed);
      const Vec g_pooled = aux_embed_.w.transpose() * g_embed;
      const Mat g_block_out =
          g_pooled.replicate(1, aux.frames) / static_cast<double>(aux.frames);
      const Mat g_bneck = aux_block_.backward(aux.block_c, g_block_out);
      const Mat g_normed = aux_bottleneck_.backward(aux.normed, g_bneck);
      const Mat g_act = aux_input_norm_.backward(aux.norm_c, g_normed);
      const Mat g_pre = (aux.pre_act.array() > 0.0)
                            .select(g_act, Mat::Zero(g_act.rows(), g_act.cols()));
      aux_encoder_.backward_params(aux.windows, g_pre);
    }
  }

  const Mat g_in_normed = bottleneck_.backward(trace.input_normed, g_stream);
  g_frames.noalias() +=
      input_norm_.backward(trace.input_norm_c, g_in_normed);
  encoder_.backward_params(trace.windows, g_frames);
}

void Extractor::zero_grads() {
  for (nn::ParamRef& p : params()) {
    std::fill(p.grad, p.grad + p.size(), 0.0);
  }
}

std::vector<nn::ParamRef> Extractor::params() {
  std::vector<nn::ParamRef> out;
  encoder_.collect("encoder", out);
  input_norm_.collect("trunk.input_norm", out);
  bottleneck_.collect("trunk.bottleneck", out);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    char prefix[32];
    std::snprintf(prefix, sizeof(prefix), "trunk.block%02zu", b);
    blocks_[b].collect(prefix, out);
  }
  if (cfg_.n_outputs == 1) {
    fusion_proj_.collect("trunk.fusion", out);
  }
  mask_prelu_.collect("trunk.mask.prelu", out);
  mask_conv_.collect("trunk.mask", out);
  decoder_.collect("decoder", out);
  if (cfg_.n_outputs == 1) {
    aux_encoder_.collect("aux.encoder", out);
    aux_input_norm_.collect("aux.input_norm", out);
    aux_bottleneck_.collect("aux.bottleneck", out);
    aux_block_.collect("aux.block", out);
    aux_embed_.collect("aux.embed", out);
  }
  return out;
}

std::size_t Extractor::parameter_count() const {
  std::size_t n = 0;
  for (const nn::ParamRef& p : const_cast<Extractor*>(this)->params()) {
    n += static_cast<std::size_t>(p.size());
  }
  return n;
}

}  // namespace samom
