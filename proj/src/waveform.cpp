// src/waveform.cpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "samom/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace samom {

void validate_waveform(const Waveform& w, const char* context) {
  if (w.samples.empty()) {
    throw std::invalid_argument(std::string(context) + ": empty waveform");
  }
  if (w.sample_rate_hz <= 0) {
    throw std::invalid_argument(std::string(context) +
                                ": non-positive sample rate");
  }
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    if (!std::isfinite(w.samples[i])) {
      throw std::invalid_argument(std::string(context) +
                                  ": non-finite sample at index " +
                                  std::to_string(i));
    }
  }
}

Waveform mix(const std::vector<Waveform>& waveforms, MixMode mode) {
  (void)mode;  // only kMinimum exists
  if (waveforms.empty()) {
    throw std::invalid_argument("mix: empty input list");
  }
  const int rate = waveforms.front().sample_rate_hz;
  std::size_t min_len = waveforms.front().length();
  for (const Waveform& w : waveforms) {
    if (w.sample_rate_hz != rate) {
      throw std::invalid_argument(
          "mix: mismatched sample rates (" + std::to_string(rate) + " vs " +
          std::to_string(w.sample_rate_hz) + ")");
    }
    if (w.samples.empty()) {
      throw std::invalid_argument("mix: empty constituent waveform");
    }
    min_len = std::min(min_len, w.length());
  }
  Waveform out;
  out.sample_rate_hz = rate;
  out.samples.assign(waveforms.front().samples.begin(),
                     waveforms.front().samples.begin() + min_len);
  for (std::size_t i = 1; i < waveforms.size(); ++i) {
    const auto& s = waveforms[i].samples;
    for (std::size_t t = 0; t < min_len; ++t) {
      out.samples[t] += s[t];
    }
  }
  return out;
}

Waveform slice(const Waveform& w, std::size_t start, std::size_t count) {
  if (count == 0 || start + count > w.length()) {
    throw std::out_of_range("slice: [" + std::to_string(start) + ", " +
                            std::to_string(start + count) +
                            ") out of range for length " +
                            std::to_string(w.length()));
  }
  Waveform out;
  out.sample_rate_hz = w.sample_rate_hz;
  out.samples.assign(w.samples.begin() + start,
                     w.samples.begin() + start + count);
  return out;
}

Waveform tile_to(const Waveform& w, std::size_t count) {
  if (w.samples.empty() || count == 0) {
    throw std::invalid_argument("tile_to: empty input or zero target length");
  }
  Waveform out;
  out.sample_rate_hz = w.sample_rate_hz;
  out.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.samples[i] = w.samples[i % w.length()];
  }
  return out;
}

Waveform crop_random_segment(const Waveform& w, double seconds, Rng& rng) {
  if (!(seconds > 0.0)) {
    throw std::invalid_argument("crop_random_segment: non-positive duration");
  }
  validate_waveform(w, "crop_random_segment");
  const std::size_t n =
      static_cast<std::size_t>(std::llround(seconds * w.sample_rate_hz));
  if (n == 0) {
    throw std::invalid_argument("crop_random_segment: zero-length segment");
  }
  if (w.length() < n) {
    return tile_to(w, n);  // short utterance: wrap-pad, single valid start
  }
  const std::size_t start = rng.uniform_int(w.length() - n + 1);
  return slice(w, start, n);
}

Waveform negate(const Waveform& w) { return scale(w, -1.0); }

Waveform scale(const Waveform& w, double factor) {
  Waveform out = w;
  for (double& s : out.samples) s *= factor;
  return out;
}

double rms(const Waveform& w) {
  double acc = 0.0;
  for (double s : w.samples) acc += s * s;
  return std::sqrt(acc / w.length());
}

double peak_abs(const Waveform& w) {
  double p = 0.0;
  for (double s : w.samples) p = std::max(p, std::abs(s));
  return p;
}

}  // namespace samom
