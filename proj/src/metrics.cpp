// src/metrics.cpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "samom/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace samom {

namespace {

void check_pair(const Waveform& reference, const Waveform& estimate,
                double floor_db) {
  if (reference.length() != estimate.length()) {
    throw std::invalid_argument(
        "metric: length mismatch (" + std::to_string(reference.length()) +
        " vs " + std::to_string(estimate.length()) + ")");
  }
  if (!(floor_db < 0.0)) {
    throw std::invalid_argument("metric: floor_db must be negative");
  }
}

double ref_energy_or_throw(const Waveform& reference) {
  double e = 0.0;
  for (double s : reference.samples) e += s * s;
  if (e == 0.0) {
    throw std::invalid_argument("metric: reference is identically zero");
  }
  return e;
}

double clamp_db(double v, double floor_db) {
  if (v < floor_db) return floor_db;
  if (v > -floor_db) return -floor_db;
  return v;
}

}  // namespace

double si_sdr(const Waveform& reference, const Waveform& estimate,
              double floor_db) {
  check_pair(reference, estimate, floor_db);
  const double ref_e = ref_energy_or_throw(reference);

  double dot = 0.0;
  for (std::size_t t = 0; t < reference.length(); ++t) {
    dot += reference.samples[t] * estimate.samples[t];
  }
  const double alpha = dot / ref_e;
  const double target_e = alpha * alpha * ref_e;  // ||a x||^2
  double err_e = 0.0;
  for (std::size_t t = 0; t < reference.length(); ++t) {
    const double e = alpha * reference.samples[t] - estimate.samples[t];
    err_e += e * e;
  }

  if (target_e == 0.0) return floor_db;   // orthogonal or zero estimate
  if (err_e == 0.0) return -floor_db;     // exact rescaling
  return clamp_db(10.0 * std::log10(target_e / err_e), floor_db);
}

double sdr(const Waveform& reference, const Waveform& estimate,
           double floor_db) {
  check_pair(reference, estimate, floor_db);
  const double ref_e = ref_energy_or_throw(reference);
  double err_e = 0.0;
  for (std::size_t t = 0; t < reference.length(); ++t) {
    const double e = reference.samples[t] - estimate.samples[t];
    err_e += e * e;
  }
  if (err_e == 0.0) return -floor_db;
  return clamp_db(10.0 * std::log10(ref_e / err_e), floor_db);
}

double neg_si_sdr_loss(const Waveform& reference, const Waveform& estimate,
                       double floor_db) {
  return -si_sdr(reference, estimate, floor_db);
}

std::vector<double> neg_si_sdr_loss_grad(const Waveform& reference,
                                         const Waveform& estimate,
                                         double floor_db) {
  check_pair(reference, estimate, floor_db);
  const double ref_e = ref_energy_or_throw(reference);
  const std::size_t n = reference.length();

  double dot = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    dot += reference.samples[t] * estimate.samples[t];
  }
  const double alpha = dot / ref_e;
  const double target_e = alpha * alpha * ref_e;
  double err_e = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double e = alpha * reference.samples[t] - estimate.samples[t];
    err_e += e * e;
  }

  std::vector<double> grad(n, 0.0);
  if (target_e == 0.0 || err_e == 0.0) return grad;  // clamp endpoints
  const double ratio_db = 10.0 * std::log10(target_e / err_e);
  if (ratio_db <= floor_db || ratio_db >= -floor_db) return grad;

  // With e = a x - x_hat orthogonal to x, d||a x||^2/dx_hat = 2 a x and
  // d||e||^2/dx_hat = -2 e, giving
  //   d loss / d x_hat = -(20/ln 10) (a x / ||a x||^2 + e / ||e||^2).
  const double c = 20.0 / std::log(10.0);
  for (std::size_t t = 0; t < n; ++t) {
    const double ax = alpha * reference.samples[t];
    const double e = ax - estimate.samples[t];
    grad[t] = -c * (ax / target_e + e / err_e);
  }
  return grad;
}

double improvement(const Waveform& reference, const Waveform& estimate,
                   const Waveform& input_mixture, Metric metric,
                   double floor_db) {
  if (reference.length() != input_mixture.length()) {
    throw std::invalid_argument("improvement: mixture length mismatch");
  }
  switch (metric) {
    case Metric::kSiSdr:
      return si_sdr(reference, estimate, floor_db) -
             si_sdr(reference, input_mixture, floor_db);
    case Metric::kSdr:
      return sdr(reference, estimate, floor_db) -
             sdr(reference, input_mixture, floor_db);
  }
  throw std::invalid_argument("improvement: unknown metric");
}

MetricReport make_report(std::vector<MetricReport::Row> rows) {
  MetricReport report;
  report.per_utterance = std::move(rows);
  if (report.per_utterance.empty()) return report;
  double si = 0.0, sd = 0.0;
  for (const auto& r : report.per_utterance) {
    si += r.si_sdri_db;
    sd += r.sdri_db;
  }
  report.si_sdri_db = si / report.per_utterance.size();
  report.sdri_db = sd / report.per_utterance.size();
  return report;
}

std::string report_table(const MetricReport& report) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-40s %12s %12s\n", "utterance_id",
                "SI-SDRi(dB)", "SDRi(dB)");
  out += line;
  for (const auto& r : report.per_utterance) {
    std::snprintf(line, sizeof(line), "%-40s %12.4f %12.4f\n",
                  r.utterance_id.c_str(), r.si_sdri_db, r.sdri_db);
    out += line;
  }
  std::snprintf(line, sizeof(line), "%-40s %12.4f %12.4f\n", "mean",
                report.si_sdri_db, report.sdri_db);
  out += line;
  return out;
}

std::string report_keyvalues(const MetricReport& report) {
  char line[128];
  std::string out;
  std::snprintf(line, sizeof(line), "si_sdri_db=%.9f\n", report.si_sdri_db);
  out += line;
  std::snprintf(line, sizeof(line), "sdri_db=%.9f\n", report.sdri_db);
  out += line;
  std::snprintf(line, sizeof(line), "n_utterances=%zu\n",
                report.per_utterance.size());
  out += line;
  return out;
}

}  // namespace samom
