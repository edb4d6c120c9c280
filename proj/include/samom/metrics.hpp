// include/samom/metrics.hpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef SAMOM_METRICS_HPP
#define SAMOM_METRICS_HPP

#include <string>
#include <vector>

#include "samom/waveform.hpp"

namespace samom {

// All scores are clamped to [floor_db, -floor_db]. The clamp replaces the
// usual epsilon-inside-the-log trick: the score stays exact wherever the
// clamp is inactive, and gradients vanish where it saturates.
inline constexpr double kDefaultFloorDb = -60.0;

enum class Metric { kSiSdr, kSdr };

// Scale-invariant signal-to-distortion ratio in dB:
//   10 log10(||a x||^2 / ||a x - x_hat||^2),  a = <x, x_hat> / ||x||^2.
// No mean-centering is applied. Orthogonal (a == 0) or zero estimates score
// floor_db; exact rescalings of the reference score -floor_db.
// Throws on mismatched lengths or an identically-zero reference.
double si_sdr(const Waveform& reference, const Waveform& estimate,
              double floor_db = kDefaultFloorDb);

// Plain (scale-sensitive) energy-ratio SDR in dB:
//   10 log10(||x||^2 / ||x - x_hat||^2), clamped like si_sdr.
double sdr(const Waveform& reference, const Waveform& estimate,
           double floor_db = kDefaultFloorDb);

// Negative SI-SDR, the training loss form. Differentiable wherever the
// clamp is inactive.
double neg_si_sdr_loss(const Waveform& reference, const Waveform& estimate,
                       double floor_db = kDefaultFloorDb);

// d neg_si_sdr_loss / d estimate. Zero where the clamp saturates.
std::vector<double> neg_si_sdr_loss_grad(const Waveform& reference,
                                         const Waveform& estimate,
                                         double floor_db = kDefaultFloorDb);

// metric(reference, estimate) - metric(reference, input_mixture); the
// "improvement" suffix of reporting conventions.
double improvement(const Waveform& reference, const Waveform& estimate,
                   const Waveform& input_mixture, Metric metric,
                   double floor_db = kDefaultFloorDb);

// Per-utterance improvements plus their arithmetic means.
struct MetricReport {
  struct Row {
    std::string utterance_id;
    double si_sdri_db = 0.0;
    double sdri_db = 0.0;
  };
  double si_sdri_db = 0.0;  // mean of per_utterance si_sdri_db
  double sdri_db = 0.0;     // mean of per_utterance sdri_db
  std::vector<Row> per_utterance;
};

// Computes the aggregate means from the rows.
MetricReport make_report(std::vector<MetricReport::Row> rows);

// Line-oriented plain-text table (one row per utterance plus the mean).
std::string report_table(const MetricReport& report);

// Machine-readable key=value lines, one metric per line.
std::string report_keyvalues(const MetricReport& report);

}  // namespace samom

#endif  // SAMOM_METRICS_HPP
