// include/samom/waveform.hpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef SAMOM_WAVEFORM_HPP
#define SAMOM_WAVEFORM_HPP

#include <cstddef>
#include <vector>

#include "samom/rng.hpp"

namespace samom {

// Single-channel sampled audio. Amplitudes are dimensionless with nominal
// range [-1, 1]; every sample must be finite and length must be >= 1.
struct Waveform {
  std::vector<double> samples;
  int sample_rate_hz = 0;

  std::size_t length() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

enum class MixMode { kMinimum };

// Throws std::invalid_argument when the waveform violates its invariants
// (empty, non-positive rate, or non-finite samples).
void validate_waveform(const Waveform& w, const char* context = "waveform");

// Elementwise sum of the inputs, truncated to the shortest ("minimum" mode).
// No rescaling is applied. All inputs must share a sample rate.
Waveform mix(const std::vector<Waveform>& waveforms,
             MixMode mode = MixMode::kMinimum);

// Contiguous slice [start, start + count). Bounds-checked.
Waveform slice(const Waveform& w, std::size_t start, std::size_t count);

// Wrap-pads w to exactly count samples by repeating it from the start.
// Identity when w is already at least count samples (then truncates).
Waveform tile_to(const Waveform& w, std::size_t count);

// Contiguous random segment of round(seconds * sample_rate_hz) samples with
// a uniformly drawn start. Inputs shorter than the segment are wrap-padded
// first (single valid start). seconds must be positive.
Waveform crop_random_segment(const Waveform& w, double seconds, Rng& rng);

Waveform negate(const Waveform& w);
Waveform scale(const Waveform& w, double factor);

double rms(const Waveform& w);
double peak_abs(const Waveform& w);

}  // namespace samom

#endif  // SAMOM_WAVEFORM_HPP
