// src/objectives.cpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "samom/objectives.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace samom {

LossValue supervised_loss(const Waveform& target, const Waveform& estimate,
                          double floor_db) {
  LossValue loss;
  loss.total = neg_si_sdr_loss(target, estimate, floor_db);
  loss.per_term["target"] = loss.total;
  return loss;
}

// ---------------------------------------------------------------------------
// PIT

PitResult pit_loss(const std::vector<Waveform>& references,
                   const std::vector<Waveform>& estimates, double floor_db) {
  const std::size_t k = references.size();
  if (k == 0 || estimates.size() != k) {
    throw std::invalid_argument("pit_loss: need equal non-zero counts");
  }
  if (k > 6) {
    throw std::invalid_argument("pit_loss: K > 6 (factorial guard)");
  }

  // Pairwise losses once, then search permutations.
  std::vector<std::vector<double>> pair(k, std::vector<double>(k));
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t e = 0; e < k; ++e) {
      pair[r][e] = neg_si_sdr_loss(references[r], estimates[e], floor_db);
    }
  }

  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best_perm = perm;
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t r = 0; r < k; ++r) total += pair[r][perm[r]];
    total /= static_cast<double>(k);
    if (total < best) {  // strict: ties keep the earlier permutation
      best = total;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  PitResult result;
  result.loss.total = best;
  for (std::size_t r = 0; r < k; ++r) {
    result.loss.per_term["pair" + std::to_string(r)] = pair[r][best_perm[r]];
  }
  result.permutation = best_perm;
  return result;
}

// ---------------------------------------------------------------------------
// MixIT

std::vector<Waveform> mixit_remix(const std::vector<Waveform>& mixtures,
                                  const std::vector<Waveform>& estimates,
                                  const std::vector<int>& assignment) {
  std::vector<Waveform> sums(mixtures.size());
  for (std::size_t i = 0; i < mixtures.size(); ++i) {
    sums[i].sample_rate_hz = mixtures[i].sample_rate_hz;
    sums[i].samples.assign(mixtures[i].length(), 0.0);
  }
  for (std::size_t m = 0; m < estimates.size(); ++m) {
    const int i = assignment[m];
    auto& acc = sums[i].samples;
    const auto& est = estimates[m].samples;
    if (est.size() != acc.size()) {
      throw std::invalid_argument("mixit_remix: estimate length mismatch");
    }
    for (std::size_t t = 0; t < acc.size(); ++t) acc[t] += est[t];
  }
  return sums;
}

MixitResult mixit_loss(const std::vector<Waveform>& mixtures,
                       const std::vector<Waveform>& estimates,
                       double floor_db) {
  const std::size_t n = mixtures.size();
  const std::size_t m_count = estimates.size();
  if (n == 0) {
    throw std::invalid_argument("mixit_loss: no mixtures");
  }
  if (m_count < n) {
    throw std::invalid_argument("mixit_loss: need M >= N (got M=" +
                                std::to_string(m_count) +
                                ", N=" + std::to_string(n) + ")");
  }
  if (m_count > 8) {
    throw std::invalid_argument("mixit_loss: M > 8 (enumeration guard)");
  }

  // Lexicographic enumeration over assignment vectors (one mixture index
  // per estimate); ties keep the first one seen.
  std::vector<int> assign(m_count, 0);
  std::vector<int> best_assign;
  std::vector<double> best_terms;
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    const auto sums = mixit_remix(mixtures, estimates, assign);
    double total = 0.0;
    std::vector<double> terms(n);
    for (std::size_t i = 0; i < n; ++i) {
      terms[i] = neg_si_sdr_loss(mixtures[i], sums[i], floor_db);
      total += terms[i];
    }
    total /= static_cast<double>(n);
    if (total < best) {
      best = total;
      best_assign = assign;
      best_terms = terms;
    }
    // Odometer increment, rightmost digit fastest == lexicographic order.
    int pos = static_cast<int>(m_count) - 1;
    while (pos >= 0 && assign[pos] == static_cast<int>(n) - 1) {
      assign[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++assign[pos];
  }

  MixitResult result;
  result.loss.total = best;
  for (std::size_t i = 0; i < n; ++i) {
    result.loss.per_term["mixture" + std::to_string(i)] = best_terms[i];
  }
  result.assignment = best_assign;
  return result;
}

// ---------------------------------------------------------------------------
// SAM remix

LossValue samom_loss_from_estimates(
    const MoMSample& sample,
    const std::vector<std::vector<Waveform>>& estimates, double floor_db) {
  const std::size_t n = sample.sams.size();
  if (estimates.size() != n) {
    throw std::invalid_argument("samom_loss: estimate group count mismatch");
  }
  LossValue loss;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& sam = sample.sams[i];
    if (estimates[i].size() != sam.constituents.size()) {
      throw std::invalid_argument("samom_loss: estimate count mismatch");
    }
    Waveform remix;
    remix.sample_rate_hz = sam.mixture.sample_rate_hz;
    remix.samples.assign(sam.mixture.length(), 0.0);
    for (const Waveform& est : estimates[i]) {
      if (est.length() != sam.mixture.length()) {
        throw std::invalid_argument(
            "samom_loss: extractor output length mismatch");
      }
      for (std::size_t t = 0; t < remix.samples.size(); ++t) {
        remix.samples[t] += est.samples[t];
      }
    }
    const double term = neg_si_sdr_loss(sam.mixture, remix, floor_db);
    loss.per_term["sam" + std::to_string(i)] = term;
    total += term;
  }
  loss.total = total / static_cast<double>(n);
  return loss;
}

SamomResult samom_loss(const MoMSample& sample, const ExtractFn& extractor,
                       double floor_db) {
  SamomResult result;
  result.estimates.resize(sample.sams.size());
  // Extractions are conditionally independent given the input; any order
  // (or a parallel batch) yields identical results.
  for (std::size_t i = 0; i < sample.sams.size(); ++i) {
    for (const SamConstituent& c : sample.sams[i].constituents) {
      result.estimates[i].push_back(extractor(sample.input, c.enrollment));
    }
  }
  result.loss = samom_loss_from_estimates(sample, result.estimates, floor_db);
  return result;
}

std::vector<std::vector<double>> samom_estimate_grads(
    const MoMSample& sample,
    const std::vector<std::vector<Waveform>>& estimates, double floor_db) {
  const std::size_t n = sample.sams.size();
  std::vector<std::vector<double>> grads(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& sam = sample.sams[i];
    Waveform remix;
    remix.sample_rate_hz = sam.mixture.sample_rate_hz;
    remix.samples.assign(sam.mixture.length(), 0.0);
    for (const Waveform& est : estimates[i]) {
      for (std::size_t t = 0; t < remix.samples.size(); ++t) {
        remix.samples[t] += est.samples[t];
      }
    }
    grads[i] = neg_si_sdr_loss_grad(sam.mixture, remix, floor_db);
    // Chain through the mean over SAMs; the sum over constituents passes
    // the remix gradient to each estimate unchanged.
    for (double& g : grads[i]) g /= static_cast<double>(n);
  }
  return grads;
}

// ---------------------------------------------------------------------------
// Noisy extension

LossValue noisy_semisup_loss_from_estimate(const NoisySemiSample& sample,
                                           const Waveform& estimate,
                                           double floor_db) {
  if (estimate.length() != sample.input.length()) {
    throw std::invalid_argument(
        "noisy_semisup_loss: extractor output length mismatch");
  }
  Waveform residual;
  residual.sample_rate_hz = sample.input.sample_rate_hz;
  residual.samples.resize(sample.input.length());
  for (std::size_t t = 0; t < residual.samples.size(); ++t) {
    residual.samples[t] = sample.input.samples[t] - estimate.samples[t];
  }

  LossValue loss;
  const double target =
      neg_si_sdr_loss(sample.clean_source.waveform, estimate, floor_db);
  const double resid =
      neg_si_sdr_loss(sample.noisy_sam.mixture, residual, floor_db);
  loss.per_term["target"] = target;
  loss.per_term["residual"] = resid;
  loss.total = 0.5 * (target + resid);
  return loss;
}

NoisyResult noisy_semisup_loss(const NoisySemiSample& sample,
                               const ExtractFn& extractor, double floor_db) {
  NoisyResult result;
  result.estimate = extractor(sample.input, sample.target_enrollment);
  result.loss =
      noisy_semisup_loss_from_estimate(sample, result.estimate, floor_db);
  return result;
}

std::vector<double> noisy_estimate_grad(const NoisySemiSample& sample,
                                        const Waveform& estimate,
                                        double floor_db) {
  Waveform residual;
  residual.sample_rate_hz = sample.input.sample_rate_hz;
  residual.samples.resize(sample.input.length());
  for (std::size_t t = 0; t < residual.samples.size(); ++t) {
    residual.samples[t] = sample.input.samples[t] - estimate.samples[t];
  }
  const std::vector<double> g_target = neg_si_sdr_loss_grad(
      sample.clean_source.waveform, estimate, floor_db);
  const std::vector<double> g_resid =
      neg_si_sdr_loss_grad(sample.noisy_sam.mixture, residual, floor_db);
  // d/d estimate of the residual term flips sign (residual = input - est).
  std::vector<double> grad(estimate.length());
  for (std::size_t t = 0; t < grad.size(); ++t) {
    grad[t] = 0.5 * (g_target[t] - g_resid[t]);
  }
  return grad;
}

}  // namespace samom
