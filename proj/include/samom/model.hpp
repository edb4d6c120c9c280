// include/samom/model.hpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef SAMOM_MODEL_HPP
#define SAMOM_MODEL_HPP

#include <string>
#include <vector>

#include "samom/nn.hpp"
#include "samom/rng.hpp"
#include "samom/waveform.hpp"

namespace samom {

// Time-domain masking extractor built from a learned filterbank encoder, a
// stack of dilated depthwise-separable conv blocks with residual
// connections, and an overlap-add decoder. With n_outputs == 1 an auxiliary
// enrollment encoder produces a speaker embedding that gates the residual
// stream multiplicatively at one block; with n_outputs == M >= 2 the same
// trunk acts as an unconditioned M-output separator.
struct ExtractorConfig {
  int n_filters = 64;          // encoder basis size
  int kernel_len = 16;         // encoder/decoder kernel, samples; even
  int bottleneck_ch = 32;      // residual stream width
  int conv_ch = 64;            // block hidden width
  int n_repeats = 2;           // dilation cycles
  int blocks_per_repeat = 4;   // blocks per cycle; dilation 2^(b mod this)
  int embed_dim = 32;          // speaker embedding size
  int fusion_block_index = 3;  // 0-based position in the flattened stack
  int n_outputs = 1;           // 1 = extractor, M >= 2 = BSS separator

  int n_blocks() const { return n_repeats * blocks_per_repeat; }
  int hop() const { return kernel_len / 2; }

  // Full-size configuration used by the reference experiments ("the 7th
  // layer" hosts fusion, i.e. flattened index 6).
  static ExtractorConfig full_size();
  // Small configuration for desk-scale training and tests.
  static ExtractorConfig toy();

  // Throws std::invalid_argument on violated invariants.
  void validate() const;
};

// One dilated depthwise-separable conv block with residual connection:
// 1x1 conv (B->H), PReLU, gLN, depthwise conv, PReLU, gLN, 1x1 conv (H->B).
struct ConvBlock {
  nn::Linear conv_in;
  nn::PRelu prelu_in;
  nn::GlobalLayerNorm norm_in;
  nn::DepthwiseConv dconv;
  nn::PRelu prelu_hidden;
  nn::GlobalLayerNorm norm_hidden;
  nn::Linear conv_out;

  struct Cache {
    nn::Mat x_in;  // block input (post-fusion at the fusion block)
    nn::Mat h1;
    nn::GlobalLayerNorm::Cache n1c;
    nn::Mat n1;
    nn::Mat h2;
    nn::GlobalLayerNorm::Cache n2c;
    nn::Mat n2;
  };

  void init(int bottleneck_ch, int conv_ch, int dilation, Rng& rng);
  nn::Mat forward(const nn::Mat& x, Cache& cache) const;
  nn::Mat backward(const Cache& cache, const nn::Mat& gy);
  void collect(const std::string& prefix, std::vector<nn::ParamRef>& out);
};

// Auxiliary-network activations cached by one enrollment forward pass.
struct AuxTrace {
  int frames = 0;
  nn::Mat windows;
  nn::Mat pre_act;
  nn::Mat act;
  nn::GlobalLayerNorm::Cache norm_c;
  nn::Mat normed;
  nn::Mat bneck_out;
  ConvBlock::Cache block_c;
  nn::Mat block_out;
  nn::Vec pooled;
  nn::Vec embedding;
};

class Extractor {
 public:
  // Deterministic under the generator state; weights from fan-in-scaled
  // uniform ranges, norm gains at 1, biases at 0.
  static Extractor init(const ExtractorConfig& config, Rng& rng);

  const ExtractorConfig& config() const { return cfg_; }

  // Enrollment -> embed_dim speaker embedding (aux encoder frames, one conv
  // block, time-average pooling, linear head). Enrollment must be at least
  // kernel_len samples. Extractor configs only (n_outputs == 1).
  nn::Vec speaker_embed(const Waveform& enrollment) const;

  // Enrollment-conditioned extraction. Output length equals mixture length.
  Waveform extract(const Waveform& mixture, const Waveform& enrollment) const;

  // Unconditioned separation into n_outputs sources (n_outputs >= 2).
  std::vector<Waveform> separate_bss(const Waveform& mixture) const;

  // -- training interface -------------------------------------------------

  struct Trace;  // forward activations kept for backward

  Waveform extract_traced(const Waveform& mixture, const Waveform& enrollment,
                          Trace& trace) const;
  std::vector<Waveform> separate_traced(const Waveform& mixture,
                                        Trace& trace) const;

  // Accumulates parameter gradients for d(loss)/d(output m) given per-output
  // waveform gradients (each of the traced input length).
  void backward(const Trace& trace,
                const std::vector<std::vector<double>>& output_grads);

  void zero_grads();
  // Stable, construction-ordered parameter views (values + grads).
  std::vector<nn::ParamRef> params();
  std::size_t parameter_count() const;

 private:
  Extractor() = default;

  std::vector<Waveform> forward(const Waveform& mixture,
                                const Waveform* enrollment,
                                Trace& trace) const;
  void run_aux(const Waveform& enrollment, AuxTrace& aux) const;

  ExtractorConfig cfg_;

  nn::Linear encoder_;  // no bias; linear filterbank
  nn::GlobalLayerNorm input_norm_;
  nn::Linear bottleneck_;
  std::vector<ConvBlock> blocks_;
  nn::Linear fusion_proj_;  // embed -> bottleneck gate (extractor only)
  nn::PRelu mask_prelu_;
  nn::Linear mask_conv_;  // bottleneck -> n_filters * n_outputs
  nn::Linear decoder_;    // no bias

  // auxiliary enrollment network (extractor only)
  nn::Linear aux_encoder_;  // no bias
  nn::GlobalLayerNorm aux_input_norm_;
  nn::Linear aux_bottleneck_;
  ConvBlock aux_block_;
  nn::Linear aux_embed_;
};

// Activations cached by one traced forward pass.
struct Extractor::Trace {
  std::size_t input_len = 0;
  std::size_t padded_len = 0;
  int frames = 0;

  nn::Mat windows;
  nn::Mat encoder_frames;
  nn::GlobalLayerNorm::Cache input_norm_c;
  nn::Mat input_normed;
  nn::Mat bneck_out;
  std::vector<ConvBlock::Cache> blocks;

  bool has_fusion = false;
  nn::Mat fusion_pre;    // residual stream before the multiplicative gate
  nn::Vec fusion_scale;  // projected embedding

  AuxTrace aux;

  nn::Mat mask_in;   // residual stream after the last block
  nn::Mat mask_pre;  // PReLU(mask_in)
  nn::Mat mask;      // (n_filters * n_outputs) x frames, in (0, 1)
  nn::Mat masked;    // mask applied to tiled encoder frames
};

}  // namespace samom

#endif  // SAMOM_MODEL_HPP
