// include/samom/nn.hpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef SAMOM_NN_HPP
#define SAMOM_NN_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "samom/rng.hpp"

namespace samom::nn {

using Mat = Eigen::MatrixXd;  // rows = channels, cols = time frames
using Vec = Eigen::VectorXd;

// Mutable view onto one named parameter tensor and its gradient buffer.
// Storage is Eigen-default column-major; serialization converts to
// row-major at the file boundary.
struct ParamRef {
  std::string name;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  double* value = nullptr;
  double* grad = nullptr;

  Eigen::Index size() const { return rows * cols; }
};

// Uniform init in +-sqrt(1 / fan_in).
void fan_in_uniform(Mat& m, int fan_in, Rng& rng);

// ---------------------------------------------------------------------------
// 1x1 convolution over channels == per-frame linear map.
struct Linear {
  Mat w;   // out x in
  Vec b;   // out (unused when has_bias == false)
  Mat gw;
  Vec gb;
  bool has_bias = true;

  void init(int out_ch, int in_ch, bool bias, Rng& rng);
  Mat forward(const Mat& x) const;
  // Accumulates gw/gb and returns the input gradient.
  Mat backward(const Mat& x, const Mat& gy);
  // Parameter gradients only (used where the input is data, not activations).
  void backward_params(const Mat& x, const Mat& gy);
  void collect(const std::string& prefix, std::vector<ParamRef>& out);
};

// ---------------------------------------------------------------------------
// Per-channel (depthwise) conv, kernel 3, configurable dilation,
// zero same-padding.
struct DepthwiseConv {
  static constexpr int kKernel = 3;
  Mat w;  // channels x kKernel
  Vec b;  // channels
  Mat gw;
  Vec gb;
  int dilation = 1;

  void init(int channels, int dilation_factor, Rng& rng);
  Mat forward(const Mat& x) const;
  Mat backward(const Mat& x, const Mat& gy);
  void collect(const std::string& prefix, std::vector<ParamRef>& out);
};

// ---------------------------------------------------------------------------
// Global layer normalization: statistics over all channels and frames,
// per-channel affine. Robust to crop length.
struct GlobalLayerNorm {
  static constexpr double kEps = 1e-8;
  Vec gain;  // channels
  Vec bias;
  Vec ggain;
  Vec gbias;

  struct Cache {
    Mat xhat;
    double inv_std = 0.0;
  };

  void init(int channels);
  Mat forward(const Mat& x, Cache& cache) const;
  Mat backward(const Cache& cache, const Mat& gy);
  void collect(const std::string& prefix, std::vector<ParamRef>& out);
};

// ---------------------------------------------------------------------------
// Parametric ReLU with a single learned slope.
struct PRelu {
  double slope = 0.25;
  double gslope = 0.0;

  Mat forward(const Mat& x) const;
  Mat backward(const Mat& x, const Mat& gy);
  void collect(const std::string& prefix, std::vector<ParamRef>& out);
};

// ---------------------------------------------------------------------------
// Framing / overlap-add. hop = window / 2 everywhere in this project.

// Frame count covering n_samples with full windows after right-padding.
int frame_count(std::size_t n_samples, int window, int hop);

// window x frames matrix; samples beyond x.size() read as zero.
Mat make_windows(const std::vector<double>& x, int window, int hop,
                 int frames);

// Overlap-adds a window x frames matrix into a signal of out_len samples.
std::vector<double> overlap_add(const Mat& windows, int hop,
                                std::size_t out_len);

}  // namespace samom::nn

#endif  // SAMOM_NN_HPP
