// src/nn.cpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "samom/nn.hpp"

#include <cmath>

namespace samom::nn {

void fan_in_uniform(Mat& m, int fan_in, Rng& rng) {
  const double bound = std::sqrt(1.0 / fan_in);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      m(r, c) = rng.uniform(-bound, bound);
    }
  }
}

// ---------------------------------------------------------------------------
// Linear

void Linear::init(int out_ch, int in_ch, bool bias, Rng& rng) {
  has_bias = bias;
  w.resize(out_ch, in_ch);
  fan_in_uniform(w, in_ch, rng);
  gw = Mat::Zero(out_ch, in_ch);
  if (has_bias) {
    b = Vec::Zero(out_ch);
    gb = Vec::Zero(out_ch);
  }
}

Mat Linear::forward(const Mat& x) const {
  Mat y = w * x;
  if (has_bias) y.colwise() += b;
  return y;
}

Mat Linear::backward(const Mat& x, const Mat& gy) {
  backward_params(x, gy);
  return w.transpose() * gy;
}

void Linear::backward_params(const Mat& x, const Mat& gy) {
  gw.noalias() += gy * x.transpose();
  if (has_bias) gb.noalias() += gy.rowwise().sum();
}

void Linear::collect(const std::string& prefix, std::vector<ParamRef>& out) {
  out.push_back({prefix + ".weight", w.rows(), w.cols(), w.data(), gw.data()});
  if (has_bias) {
    out.push_back({prefix + ".bias", b.size(), 1, b.data(), gb.data()});
  }
}

// ---------------------------------------------------------------------------
// DepthwiseConv

void DepthwiseConv::init(int channels, int dilation_factor, Rng& rng) {
  dilation = dilation_factor;
  w.resize(channels, kKernel);
  fan_in_uniform(w, kKernel, rng);
  b = Vec::Zero(channels);
  gw = Mat::Zero(channels, kKernel);
  gb = Vec::Zero(channels);
}

Mat DepthwiseConv::forward(const Mat& x) const {
  const Eigen::Index C = x.rows(), K = x.cols();
  Mat y = b.replicate(1, K);
  for (int p = 0; p < kKernel; ++p) {
    const Eigen::Index shift = static_cast<Eigen::Index>(dilation) * (p - 1);
    const Eigen::Index k_lo = std::max<Eigen::Index>(0, -shift);
    const Eigen::Index k_hi = std::min<Eigen::Index>(K, K - shift);
    if (k_lo >= k_hi) continue;
    y.middleCols(k_lo, k_hi - k_lo).noalias() +=
        w.col(p).asDiagonal() * x.middleCols(k_lo + shift, k_hi - k_lo);
  }
  return y;
}

Mat DepthwiseConv::backward(const Mat& x, const Mat& gy) {
  const Eigen::Index C = x.rows(), K = x.cols();
  gb.noalias() += gy.rowwise().sum();
  Mat gx = Mat::Zero(C, K);
  for (int p = 0; p < kKernel; ++p) {
    const Eigen::Index shift = static_cast<Eigen::Index>(dilation) * (p - 1);
    const Eigen::Index k_lo = std::max<Eigen::Index>(0, -shift);
    const Eigen::Index k_hi = std::min<Eigen::Index>(K, K - shift);
    if (k_lo >= k_hi) continue;
    const auto gy_part = gy.middleCols(k_lo, k_hi - k_lo);
    const auto x_part = x.middleCols(k_lo + shift, k_hi - k_lo);
    gw.col(p).noalias() += gy_part.cwiseProduct(x_part).rowwise().sum();
    gx.middleCols(k_lo + shift, k_hi - k_lo).noalias() +=
        w.col(p).asDiagonal() * gy_part;
  }
  return gx;
}

void DepthwiseConv::collect(const std::string& prefix,
                            std::vector<ParamRef>& out) {
  out.push_back({prefix + ".weight", w.rows(), w.cols(), w.data(), gw.data()});
  out.push_back({prefix + ".bias", b.size(), 1, b.data(), gb.data()});
}

// ---------------------------------------------------------------------------
// GlobalLayerNorm

void GlobalLayerNorm::init(int channels) {
  gain = Vec::Ones(channels);
  bias = Vec::Zero(channels);
  ggain = Vec::Zero(channels);
  gbias = Vec::Zero(channels);
}

Mat GlobalLayerNorm::forward(const Mat& x, Cache& cache) const {
  const double n = static_cast<double>(x.size());
  const double mean = x.sum() / n;
  const double var = (x.array() - mean).square().sum() / n;
  cache.inv_std = 1.0 / std::sqrt(var + kEps);
  cache.xhat = (x.array() - mean).matrix() * cache.inv_std;
  Mat y = gain.asDiagonal() * cache.xhat;
  y.colwise() += bias;
  return y;
}

Mat GlobalLayerNorm::backward(const Cache& cache, const Mat& gy) {
  gbias.noalias() += gy.rowwise().sum();
  ggain.noalias() += gy.cwiseProduct(cache.xhat).rowwise().sum();
  const Mat g = gain.asDiagonal() * gy;  // dL/dxhat
  const double n = static_cast<double>(g.size());
  const double mean_g = g.sum() / n;
  const double mean_gx = g.cwiseProduct(cache.xhat).sum() / n;
  return cache.inv_std *
         (g.array() - mean_g - cache.xhat.array() * mean_gx).matrix();
}

void GlobalLayerNorm::collect(const std::string& prefix,
                              std::vector<ParamRef>& out) {
  out.push_back({prefix + ".gain", gain.size(), 1, gain.data(), ggain.data()});
  out.push_back({prefix + ".bias", bias.size(), 1, bias.data(), gbias.data()});
}

// ---------------------------------------------------------------------------
// PRelu

Mat PRelu::forward(const Mat& x) const {
  return x.unaryExpr([s = slope](double v) { return v > 0.0 ? v : s * v; });
}

Mat PRelu::backward(const Mat& x, const Mat& gy) {
  double gs = 0.0;
  Mat gx(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      const double xv = x(r, c);
      if (xv > 0.0) {
        gx(r, c) = gy(r, c);
      } else {
        gx(r, c) = slope * gy(r, c);
        gs += gy(r, c) * xv;
      }
    }
  }
  gslope += gs;
  return gx;
}

void PRelu::collect(const std::string& prefix, std::vector<ParamRef>& out) {
  out.push_back({prefix + ".slope", 1, 1, &slope, &gslope});
}

// ---------------------------------------------------------------------------
// Framing

int frame_count(std::size_t n_samples, int window, int hop) {
  if (n_samples <= static_cast<std::size_t>(window)) return 1;
  const std::size_t tail = n_samples - window;
  return static_cast<int>((tail + hop - 1) / hop) + 1;
}

Mat make_windows(const std::vector<double>& x, int window, int hop,
                 int frames) {
  Mat out = Mat::Zero(window, frames);
  for (int k = 0; k < frames; ++k) {
    const std::size_t base = static_cast<std::size_t>(k) * hop;
    for (int l = 0; l < window; ++l) {
      const std::size_t t = base + l;
      if (t < x.size()) out(l, k) = x[t];
    }
  }
  return out;
}

std::vector<double> overlap_add(const Mat& windows, int hop,
                                std::size_t out_len) {
  std::vector<double> out(out_len, 0.0);
  for (Eigen::Index k = 0; k < windows.cols(); ++k) {
    const std::size_t base = static_cast<std::size_t>(k) * hop;
    for (Eigen::Index l = 0; l < windows.rows(); ++l) {
      const std::size_t t = base + l;
      if (t < out_len) out[t] += windows(l, k);
    }
  }
  return out;
}

}  // namespace samom::nn
