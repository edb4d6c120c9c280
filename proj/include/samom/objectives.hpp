// include/samom/objectives.hpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef SAMOM_OBJECTIVES_HPP
#define SAMOM_OBJECTIVES_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "samom/corpus.hpp"
#include "samom/metrics.hpp"
#include "samom/waveform.hpp"

namespace samom {

// Total plus named sub-losses. The total always equals the documented
// combination of the per-term values (a mean, or a mean of means).
struct LossValue {
  double total = 0.0;
  std::map<std::string, double> per_term;
};

using ExtractFn =
    std::function<Waveform(const Waveform& mixture, const Waveform& enrollment)>;

// ---------------------------------------------------------------------------
// Supervised extraction: negative SI-SDR against the clean target.
LossValue supervised_loss(const Waveform& target, const Waveform& estimate,
                          double floor_db = kDefaultFloorDb);

// ---------------------------------------------------------------------------
// Permutation-invariant training for BSS heads. K <= 6 (factorial guard).
struct PitResult {
  LossValue loss;
  std::vector<int> permutation;  // permutation[k] = estimate index for ref k
};
PitResult pit_loss(const std::vector<Waveform>& references,
                   const std::vector<Waveform>& estimates,
                   double floor_db = kDefaultFloorDb);

// ---------------------------------------------------------------------------
// Mixture-invariant training: estimates are assigned (each to exactly one
// input mixture), sums are scored against the mixtures. M >= N, M <= 8.
// Ties break to the first assignment in lexicographic enumeration order.
struct MixitResult {
  LossValue loss;
  std::vector<int> assignment;  // assignment[m] = mixture index for estimate m
};
MixitResult mixit_loss(const std::vector<Waveform>& mixtures,
                       const std::vector<Waveform>& estimates,
                       double floor_db = kDefaultFloorDb);

// Remixed sums under a fixed assignment (helper shared with training).
std::vector<Waveform> mixit_remix(const std::vector<Waveform>& mixtures,
                                  const std::vector<Waveform>& estimates,
                                  const std::vector<int>& assignment);

// ---------------------------------------------------------------------------
// Remix objective over a mixture of SAMs: every constituent of every SAM is
// extracted from the MoM input conditioned on its enrollment; per-SAM
// estimates are remixed and scored against the original SAM; the total is
// the mean over SAMs. per_term holds one entry per SAM ("sam0", "sam1", ...).
struct SamomResult {
  LossValue loss;
  // estimates[i][j]: constituent j of SAM i.
  std::vector<std::vector<Waveform>> estimates;
};
SamomResult samom_loss(const MoMSample& sample, const ExtractFn& extractor,
                       double floor_db = kDefaultFloorDb);

// Loss recomputed from already-extracted estimates (shared by training,
// validation and the oracle tests).
LossValue samom_loss_from_estimates(
    const MoMSample& sample,
    const std::vector<std::vector<Waveform>>& estimates,
    double floor_db = kDefaultFloorDb);

// d(total)/d(estimate) per SAM: the same gradient applies to every
// constituent of a SAM because only their sum enters the loss.
std::vector<std::vector<double>> samom_estimate_grads(
    const MoMSample& sample,
    const std::vector<std::vector<Waveform>>& estimates,
    double floor_db = kDefaultFloorDb);

// ---------------------------------------------------------------------------
// Semi-supervised noisy extension: mean of a target term (clean source vs
// estimate) and a residual term (noisy SAM vs input minus estimate).
// per_term holds "target" and "residual".
struct NoisyResult {
  LossValue loss;
  Waveform estimate;
};
NoisyResult noisy_semisup_loss(const NoisySemiSample& sample,
                               const ExtractFn& extractor,
                               double floor_db = kDefaultFloorDb);

LossValue noisy_semisup_loss_from_estimate(const NoisySemiSample& sample,
                                           const Waveform& estimate,
                                           double floor_db = kDefaultFloorDb);

std::vector<double> noisy_estimate_grad(const NoisySemiSample& sample,
                                        const Waveform& estimate,
                                        double floor_db = kDefaultFloorDb);

}  // namespace samom

#endif  // SAMOM_OBJECTIVES_HPP
