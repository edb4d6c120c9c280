// include/samom/corpus.hpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef SAMOM_CORPUS_HPP
#define SAMOM_CORPUS_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "samom/rng.hpp"
#include "samom/waveform.hpp"

namespace samom {

// A waveform bound to weak labels: speaker identity and utterance identity.
struct Utterance {
  std::string utterance_id;
  std::string speaker_id;
  Waveform waveform;
};

// Immutable after loading; safe to share across readers.
class Corpus {
 public:
  void add(Utterance utt);

  const std::vector<std::string>& speakers() const { return speakers_; }
  const std::vector<const Utterance*>& utterances_of(
      const std::string& speaker_id) const;
  const Utterance* find(const std::string& utterance_id) const;
  const Utterance& at(const std::string& utterance_id) const;
  const std::vector<Utterance>& utterances() const { return utterances_; }
  std::size_t size() const { return utterances_.size(); }
  int sample_rate_hz() const;

 private:
  std::vector<Utterance> utterances_;
  std::vector<std::string> speakers_;  // insertion order
  std::map<std::string, std::vector<std::size_t>> by_speaker_;
  std::map<std::string, std::size_t> by_id_;
  mutable std::vector<const Utterance*> lookup_scratch_;
};

// Manifest format: UTF-8 CSV with header
//   utterance_id,speaker_id,path,duration_s
// Paths are relative to the manifest's directory. Every WAV is loaded and
// validated against the expected sample rate; errors name the offending row.
Corpus load_manifest(const std::filesystem::path& manifest_path,
                     int expected_sample_rate_hz);

// Writes the corpus as WAVs plus a manifest under out_dir.
std::filesystem::path write_corpus(const Corpus& corpus,
                                   const std::filesystem::path& out_dir);

// ---------------------------------------------------------------------------
// Synthetic corpus generation

// Per-speaker timbre: a fundamental plus a fixed set of harmonic partials.
struct SpeakerSignature {
  double fundamental_hz = 0.0;
  std::vector<int> partials;         // harmonic multiples, always includes 1
  std::vector<double> amplitudes;    // one per partial
};

struct SynthOptions {
  double min_f0_hz = 90.0;
  double max_f0_hz = 300.0;
  double min_f0_spacing_hz = 12.0;
  double peak = 0.5;              // peak normalization target
  double noise_rel_rms = 0.05;    // band-limited noise, relative to harmonic RMS
  double tilt_pole = 0.0;         // one-pole de-emphasis; 0 disables (domain shift knob)
};

struct SyntheticCorpus {
  Corpus corpus;
  std::map<std::string, SpeakerSignature> signatures;
};

// Each synthetic speaker is a fixed random set of 3-5 harmonic partials with
// a speaker-specific fundamental (minimum spacing enforced) plus band-limited
// noise. Utterances of one speaker share the signature but differ in phase
// and amplitude envelope. Signals are peak-normalized. Deterministic under
// the generator state.
SyntheticCorpus generate_synthetic_corpus(int n_speakers, int utts_per_speaker,
                                          double duration_s,
                                          int sample_rate_hz, Rng& rng,
                                          const SynthOptions& options = {});

// Gaussian noise through a one-pole lowpass (pole in [0,1)), RMS-normalized
// to 1. Used for the noisy-extension interferer background.
Waveform colored_noise(std::size_t n_samples, int sample_rate_hz, double pole,
                       Rng& rng);

// ---------------------------------------------------------------------------
// Speaker-aware mixtures

struct SamConstituent {
  std::string speaker_id;
  Waveform enrollment;               // never the same recording as the source
  std::optional<Waveform> source;    // retained only when requested (eval)
  std::string source_utterance_id;   // weak metadata, always kept
};

// A mixture with its constituent speaker identities and enrollments known.
struct SpeakerAwareMixture {
  std::string id;
  Waveform mixture;
  std::vector<SamConstituent> constituents;
  bool contains_noise = false;
};

// Input formed as a sum of SAMs, retaining each SAM for remix targets.
struct MoMSample {
  Waveform input;
  std::vector<SpeakerAwareMixture> sams;  // length >= 2
};

// Semi-supervised noisy pair: one clean source plus one noisy SAM.
struct NoisySemiSample {
  Utterance clean_source;
  SpeakerAwareMixture noisy_sam;  // contains_noise = true
  Waveform input;                 // clean + noisy mixture
  Waveform target_enrollment;
};

// Uniformly random utterance of the speaker with utterance_id !=
// exclude_utterance_id, cropped to segment_samples when given (wrap-padded
// if short). Throws when the speaker has fewer than two utterances.
Waveform select_enrollment(const Corpus& corpus, const std::string& speaker_id,
                           const std::string& exclude_utterance_id, Rng& rng,
                           std::optional<std::size_t> segment_samples = {});

// Builds a SAM from utterances with pairwise-distinct speakers. The mixture
// is the minimum-mode sum of the sources; one enrollment per constituent is
// drawn via select_enrollment. Sources are retained iff keep_sources.
SpeakerAwareMixture build_sam(const std::vector<Utterance>& utterances,
                              const Corpus& corpus, Rng& rng,
                              bool keep_sources,
                              std::optional<std::size_t> enroll_segment = {});

// Sums the SAM mixtures (minimum mode). Speaker sets must be disjoint
// across SAMs, and at least two SAMs are required.
MoMSample build_mom(std::vector<SpeakerAwareMixture> sams);

// Clean target plus a noisy SAM (interferers + noise). The clean speaker
// must be absent from the interferers.
NoisySemiSample build_noisy_pair(const Utterance& clean,
                                 const std::vector<Utterance>& interferers,
                                 const Waveform& noise, const Corpus& corpus,
                                 Rng& rng,
                                 std::optional<std::size_t> enroll_segment = {});

// ---------------------------------------------------------------------------
// Training streams

struct SamplePolicy {
  enum class Kind { kMom, kNoisy };
  Kind kind = Kind::kMom;
  int n_sams = 2;            // N (MoM); fixed at 2 for the noisy layout
  int speakers_per_sam = 2;  // J (MoM) or interferer count (noisy)
  double noise_snr_db = 5.0; // interferer-speech-to-noise ratio (noisy)
  double noise_pole = 0.9;   // lowpass pole of the synthetic noise
  bool keep_sources = false;
  // Optional per-source uniform gain jitter in dB, e.g. {-3, 3}.
  std::optional<std::pair<double, double>> gain_jitter_db;
};

using TrainingSample = std::variant<MoMSample, NoisySemiSample>;

// Deterministic stream of training samples. Sample order is defined by
// (seed, worker_id, index); workers with distinct ids own disjoint streams,
// so multi-worker runs are replayable. Pairings are drawn fresh per sample.
class EpochStream {
 public:
  EpochStream(const Corpus& corpus, SamplePolicy policy, double segment_s,
              std::uint64_t seed, int worker_id = 0);
  TrainingSample next();

 private:
  const Corpus& corpus_;
  SamplePolicy policy_;
  std::size_t segment_samples_;
  Rng rng_;
};

// Builds a fixed set of SAMs (e.g. evaluation mixtures or an adaptation
// corpus). Constituent speakers are distinct within each SAM; ids are
// "<prefix>NNNN". Full-length sources, no cropping.
std::vector<SpeakerAwareMixture> build_sam_set(
    const Corpus& corpus, int count, int speakers_per_sam, bool keep_sources,
    Rng& rng, const std::string& id_prefix = "sam-");

// Adaptation stream: MoM samples assembled from an existing SAM corpus by
// pairing SAMs with disjoint speaker sets. Sources are stripped — this path
// carries weak labels only.
class SamPairStream {
 public:
  SamPairStream(std::vector<SpeakerAwareMixture> sams, int n_sams,
                double segment_s, std::uint64_t seed);
  MoMSample next();

 private:
  std::vector<SpeakerAwareMixture> sams_;
  int n_sams_;
  std::size_t segment_samples_ = 0;
  int sample_rate_hz_ = 0;
  Rng rng_;
};

// ---------------------------------------------------------------------------
// Evaluation enrollment manifest: CSV
//   mixture_id,target_speaker_id,enrollment_utterance_id

struct EnrollmentRow {
  std::string mixture_id;
  std::string target_speaker_id;
  std::string enrollment_utterance_id;
};

std::vector<EnrollmentRow> load_enrollment_manifest(
    const std::filesystem::path& path);
void write_enrollment_manifest(const std::filesystem::path& path,
                               const std::vector<EnrollmentRow>& rows);

// Draws one enrollment row per (mixture, constituent), never reusing the
// source recording itself.
std::vector<EnrollmentRow> draw_enrollment_rows(
    const std::vector<SpeakerAwareMixture>& sams, const Corpus& corpus,
    Rng& rng);

}  // namespace samom

#endif  // SAMOM_CORPUS_HPP
