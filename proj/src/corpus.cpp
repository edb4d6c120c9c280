// src/corpus.cpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "samom/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "samom/log.hpp"
#include "samom/wav_io.hpp"

namespace samom {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Corpus

void Corpus::add(Utterance utt) {
  if (utt.speaker_id.empty()) {
    throw std::invalid_argument("corpus: empty speaker_id for utterance '" +
                                utt.utterance_id + "'");
  }
  if (by_id_.count(utt.utterance_id)) {
    throw std::invalid_argument("corpus: duplicate utterance_id '" +
                                utt.utterance_id + "'");
  }
  validate_waveform(utt.waveform, utt.utterance_id.c_str());
  if (!utterances_.empty() &&
      utt.waveform.sample_rate_hz != utterances_.front().waveform.sample_rate_hz) {
    throw std::invalid_argument("corpus: mixed sample rates ('" +
                                utt.utterance_id + "')");
  }
  const std::size_t idx = utterances_.size();
  by_id_[utt.utterance_id] = idx;
  auto [it, inserted] = by_speaker_.try_emplace(utt.speaker_id);
  if (inserted) {
    speakers_.push_back(utt.speaker_id);
  }
  it->second.push_back(idx);
  utterances_.push_back(std::move(utt));
}

const std::vector<const Utterance*>& Corpus::utterances_of(
    const std::string& speaker_id) const {
  auto it = by_speaker_.find(speaker_id);
  if (it == by_speaker_.end()) {
    throw std::out_of_range("corpus: unknown speaker '" + speaker_id + "'");
  }
  lookup_scratch_.clear();
  for (std::size_t i : it->second) lookup_scratch_.push_back(&utterances_[i]);
  return lookup_scratch_;
}

const Utterance* Corpus::find(const std::string& utterance_id) const {
  auto it = by_id_.find(utterance_id);
  return it == by_id_.end() ? nullptr : &utterances_[it->second];
}

const Utterance& Corpus::at(const std::string& utterance_id) const {
  const Utterance* u = find(utterance_id);
  if (!u) {
    throw std::out_of_range("corpus: unknown utterance '" + utterance_id +
                            "'");
  }
  return *u;
}

int Corpus::sample_rate_hz() const {
  if (utterances_.empty()) {
    throw std::logic_error("corpus: empty, no sample rate");
  }
  return utterances_.front().waveform.sample_rate_hz;
}

// ---------------------------------------------------------------------------
// Manifests

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

Corpus load_manifest(const fs::path& manifest_path,
                     int expected_sample_rate_hz) {
  std::ifstream in(manifest_path);
  if (!in) {
    throw std::runtime_error("load_manifest: cannot open " +
                             manifest_path.string());
  }
  const fs::path base = manifest_path.parent_path();

  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("load_manifest: empty manifest " +
                             manifest_path.string());
  }
  if (split_csv_row(line) !=
      std::vector<std::string>{"utterance_id", "speaker_id", "path",
                               "duration_s"}) {
    throw std::runtime_error(
        "load_manifest: bad header, expected "
        "'utterance_id,speaker_id,path,duration_s' in " +
        manifest_path.string());
  }

  Corpus corpus;
  int row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_row(line);
    const std::string where =
        manifest_path.string() + ":" + std::to_string(row_no);
    if (fields.size() != 4 || fields[0].empty() || fields[1].empty() ||
        fields[2].empty()) {
      throw std::runtime_error("load_manifest: malformed row at " + where);
    }
    double declared_s = 0.0;
    try {
      declared_s = std::stod(fields[3]);
    } catch (const std::exception&) {
      throw std::runtime_error("load_manifest: bad duration_s at " + where);
    }

    Utterance utt;
    utt.utterance_id = fields[0];
    utt.speaker_id = fields[1];
    const fs::path wav_path = base / fields[2];
    try {
      utt.waveform = read_wav(wav_path);
    } catch (const std::exception& e) {
      throw std::runtime_error("load_manifest: row at " + where + ": " +
                               e.what());
    }
    if (utt.waveform.sample_rate_hz != expected_sample_rate_hz) {
      throw std::runtime_error(
          "load_manifest: row at " + where + ": sample rate " +
          std::to_string(utt.waveform.sample_rate_hz) + " != configured " +
          std::to_string(expected_sample_rate_hz) +
          " (inputs must be resampled in advance)");
    }
    const double actual_s = utt.waveform.duration_s();
    if (std::abs(actual_s - declared_s) > 0.05) {
      throw std::runtime_error("load_manifest: row at " + where +
                               ": declared duration " + fields[3] +
                               "s does not match file (" +
                               std::to_string(actual_s) + "s)");
    }
    try {
      corpus.add(std::move(utt));
    } catch (const std::exception& e) {
      throw std::runtime_error("load_manifest: row at " + where + ": " +
                               e.what());
    }
  }
  return corpus;
}

fs::path write_corpus(const Corpus& corpus, const fs::path& out_dir) {
  fs::create_directories(out_dir / "wav");
  const fs::path manifest_path = out_dir / "manifest.csv";
  std::ofstream out(manifest_path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("write_corpus: cannot open " +
                             manifest_path.string());
  }
  out << "utterance_id,speaker_id,path,duration_s\n";
  for (const Utterance& utt : corpus.utterances()) {
    const std::string rel = "wav/" + utt.utterance_id + ".wav";
    write_wav(out_dir / rel, utt.waveform);
    char dur[32];
    std::snprintf(dur, sizeof(dur), "%.6f", utt.waveform.duration_s());
    out << utt.utterance_id << ',' << utt.speaker_id << ',' << rel << ','
        << dur << '\n';
  }
  return manifest_path;
}

// ---------------------------------------------------------------------------
// Synthetic generation

Waveform colored_noise(std::size_t n_samples, int sample_rate_hz, double pole,
                       Rng& rng) {
  if (n_samples == 0 || sample_rate_hz <= 0 || pole < 0.0 || pole >= 1.0) {
    throw std::invalid_argument("colored_noise: bad parameters");
  }
  Waveform w;
  w.sample_rate_hz = sample_rate_hz;
  w.samples.resize(n_samples);
  double y = 0.0;
  for (std::size_t t = 0; t < n_samples; ++t) {
    y = (1.0 - pole) * rng.normal() + pole * y;
    w.samples[t] = y;
  }
  const double r = rms(w);
  if (r > 0.0) {
    for (double& s : w.samples) s /= r;
  }
  return w;
}

SyntheticCorpus generate_synthetic_corpus(int n_speakers, int utts_per_speaker,
                                          double duration_s,
                                          int sample_rate_hz, Rng& rng,
                                          const SynthOptions& options) {
  if (n_speakers < 2 || utts_per_speaker < 1 || duration_s <= 0.0 ||
      sample_rate_hz <= 0) {
    throw std::invalid_argument(
        "generate_synthetic_corpus: need >= 2 speakers, >= 1 utterance, "
        "positive duration and rate");
  }
  const double span = options.max_f0_hz - options.min_f0_hz;
  if (span < options.min_f0_spacing_hz * (n_speakers - 1)) {
    throw std::invalid_argument(
        "generate_synthetic_corpus: f0 range too narrow for requested "
        "speaker count at the configured spacing");
  }

  // Fundamentals on an evenly spaced grid with jitter below half the grid
  // step, shuffled so speaker index does not order pitch.
  const double step = span / n_speakers;
  std::vector<double> f0s(n_speakers);
  for (int i = 0; i < n_speakers; ++i) {
    f0s[i] = options.min_f0_hz + step * (i + 0.5) +
             rng.uniform(-0.25, 0.25) * std::max(0.0, step - options.min_f0_spacing_hz);
  }
  rng.shuffle(f0s);

  SyntheticCorpus result;
  const std::size_t n_samples =
      static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
  const double nyquist = sample_rate_hz / 2.0;

  for (int s = 0; s < n_speakers; ++s) {
    char spk_id[32];
    std::snprintf(spk_id, sizeof(spk_id), "spk%03d", s);

    SpeakerSignature sig;
    sig.fundamental_hz = f0s[s];
    const int n_partials = 3 + static_cast<int>(rng.uniform_int(3));  // 3..5
    sig.partials.push_back(1);
    std::vector<int> candidates;
    for (int m = 2; m <= 8; ++m) {
      if (m * sig.fundamental_hz < 0.9 * nyquist) candidates.push_back(m);
    }
    rng.shuffle(candidates);
    for (int i = 0; i < n_partials - 1 && i < static_cast<int>(candidates.size());
         ++i) {
      sig.partials.push_back(candidates[i]);
    }
    std::sort(sig.partials.begin(), sig.partials.end());
    for (int m : sig.partials) {
      sig.amplitudes.push_back(rng.uniform(0.3, 1.0) / m);
    }

    for (int u = 0; u < utts_per_speaker; ++u) {
      char utt_id[48];
      std::snprintf(utt_id, sizeof(utt_id), "%s_utt%03d", spk_id, u);

      // Per-utterance variation: partial phases and a slow amplitude envelope.
      std::vector<double> phases(sig.partials.size());
      for (double& p : phases) p = rng.uniform(0.0, 2.0 * M_PI);
      const double env_hz = rng.uniform(0.5, 2.0);
      const double env_phase = rng.uniform(0.0, 2.0 * M_PI);

      Waveform w;
      w.sample_rate_hz = sample_rate_hz;
      w.samples.resize(n_samples, 0.0);
      for (std::size_t t = 0; t < n_samples; ++t) {
        const double time = static_cast<double>(t) / sample_rate_hz;
        double v = 0.0;
        for (std::size_t p = 0; p < sig.partials.size(); ++p) {
          v += sig.amplitudes[p] *
               std::sin(2.0 * M_PI * sig.partials[p] * sig.fundamental_hz *
                            time +
                        phases[p]);
        }
        const double env =
            0.6 + 0.4 * std::sin(2.0 * M_PI * env_hz * time + env_phase);
        w.samples[t] = env * v;
      }

      if (options.noise_rel_rms > 0.0) {
        const double harmonic_rms = rms(w);
        Waveform noise = colored_noise(n_samples, sample_rate_hz, 0.85, rng);
        for (std::size_t t = 0; t < n_samples; ++t) {
          w.samples[t] += options.noise_rel_rms * harmonic_rms * noise.samples[t];
        }
      }

      if (options.tilt_pole > 0.0) {
        // One-pole de-emphasis shifts energy toward low frequencies; the
        // channel-shift knob for cross-domain experiments.
        double y = 0.0;
        for (double& x : w.samples) {
          y = (1.0 - options.tilt_pole) * x + options.tilt_pole * y;
          x = y;
        }
      }

      const double p = peak_abs(w);
      if (p > 0.0) {
        for (double& x : w.samples) x *= options.peak / p;
      }

      result.corpus.add(Utterance{utt_id, spk_id, std::move(w)});
    }
    result.signatures[spk_id] = std::move(sig);
  }
  return result;
}

// ---------------------------------------------------------------------------
// SAM / MoM assembly

Waveform select_enrollment(const Corpus& corpus, const std::string& speaker_id,
                           const std::string& exclude_utterance_id, Rng& rng,
                           std::optional<std::size_t> segment_samples) {
  const auto& utts = corpus.utterances_of(speaker_id);
  std::vector<const Utterance*> pool;
  for (const Utterance* u : utts) {
    if (u->utterance_id != exclude_utterance_id) pool.push_back(u);
  }
  if (pool.empty()) {
    throw std::invalid_argument(
        "select_enrollment: speaker '" + speaker_id +
        "' has no eligible enrollment (needs >= 2 utterances; add more "
        "recordings of this speaker to the manifest)");
  }
  const Utterance* pick = pool[rng.uniform_int(pool.size())];
  if (!segment_samples) return pick->waveform;
  const Waveform padded = pick->waveform.length() >= *segment_samples
                              ? pick->waveform
                              : tile_to(pick->waveform, *segment_samples);
  const std::size_t start =
      rng.uniform_int(padded.length() - *segment_samples + 1);
  return slice(padded, start, *segment_samples);
}

SpeakerAwareMixture build_sam(const std::vector<Utterance>& utterances,
                              const Corpus& corpus, Rng& rng,
                              bool keep_sources,
                              std::optional<std::size_t> enroll_segment) {
  if (utterances.empty()) {
    throw std::invalid_argument("build_sam: no utterances");
  }
  std::set<std::string> seen;
  for (const Utterance& u : utterances) {
    if (!seen.insert(u.speaker_id).second) {
      throw std::invalid_argument("build_sam: duplicate speaker '" +
                                  u.speaker_id + "'");
    }
  }
  SpeakerAwareMixture sam;
  std::vector<Waveform> sources;
  sources.reserve(utterances.size());
  for (const Utterance& u : utterances) sources.push_back(u.waveform);
  sam.mixture = mix(sources, MixMode::kMinimum);
  for (const Utterance& u : utterances) {
    SamConstituent c;
    c.speaker_id = u.speaker_id;
    c.source_utterance_id = u.utterance_id;
    c.enrollment = select_enrollment(corpus, u.speaker_id, u.utterance_id, rng,
                                     enroll_segment);
    if (keep_sources) {
      // Truncate to the mixture length so sources remix to it exactly.
      c.source = slice(u.waveform, 0, sam.mixture.length());
    }
    sam.constituents.push_back(std::move(c));
  }
  return sam;
}

MoMSample build_mom(std::vector<SpeakerAwareMixture> sams) {
  if (sams.size() < 2) {
    throw std::invalid_argument("build_mom: need at least 2 SAMs");
  }
  std::set<std::string> seen;
  for (const auto& sam : sams) {
    for (const auto& c : sam.constituents) {
      if (!seen.insert(c.speaker_id).second) {
        throw std::invalid_argument(
            "build_mom: speaker '" + c.speaker_id +
            "' appears in more than one SAM (speaker sets must be disjoint)");
      }
    }
  }
  MoMSample mom;
  std::vector<Waveform> mixtures;
  mixtures.reserve(sams.size());
  for (const auto& sam : sams) mixtures.push_back(sam.mixture);
  mom.input = mix(mixtures, MixMode::kMinimum);
  mom.sams = std::move(sams);
  return mom;
}

NoisySemiSample build_noisy_pair(const Utterance& clean,
                                 const std::vector<Utterance>& interferers,
                                 const Waveform& noise, const Corpus& corpus,
                                 Rng& rng,
                                 std::optional<std::size_t> enroll_segment) {
  for (const Utterance& u : interferers) {
    if (u.speaker_id == clean.speaker_id) {
      throw std::invalid_argument(
          "build_noisy_pair: clean speaker '" + clean.speaker_id +
          "' also appears among the interferers");
    }
  }
  if (interferers.empty()) {
    throw std::invalid_argument("build_noisy_pair: no interferers");
  }

  NoisySemiSample sample;
  SpeakerAwareMixture noisy =
      build_sam(interferers, corpus, rng, /*keep_sources=*/false,
                enroll_segment);
  noisy.mixture = mix({noisy.mixture, noise}, MixMode::kMinimum);
  noisy.contains_noise = true;
  sample.noisy_sam = std::move(noisy);

  sample.input = mix({clean.waveform, sample.noisy_sam.mixture},
                     MixMode::kMinimum);
  sample.clean_source = clean;
  sample.clean_source.waveform =
      slice(clean.waveform, 0, sample.input.length());
  sample.target_enrollment = select_enrollment(
      corpus, clean.speaker_id, clean.utterance_id, rng, enroll_segment);
  return sample;
}

// ---------------------------------------------------------------------------
// Streams

namespace {

// Draws k distinct speakers.
std::vector<std::string> draw_speakers(const Corpus& corpus, int k, Rng& rng) {
  if (static_cast<int>(corpus.speakers().size()) < k) {
    throw std::invalid_argument(
        "epoch stream: corpus has " +
        std::to_string(corpus.speakers().size()) + " speakers but the policy needs " +
        std::to_string(k));
  }
  std::vector<std::string> speakers = corpus.speakers();
  // Partial Fisher-Yates: only the prefix we need.
  for (int i = 0; i < k; ++i) {
    const std::size_t j = i + rng.uniform_int(speakers.size() - i);
    std::swap(speakers[i], speakers[j]);
  }
  speakers.resize(k);
  return speakers;
}

// Random crop of a random utterance of the speaker, wrap-padded if short.
Utterance draw_segment(const Corpus& corpus, const std::string& speaker,
                       std::size_t segment_samples, Rng& rng) {
  const auto& utts = corpus.utterances_of(speaker);
  const Utterance* pick = utts[rng.uniform_int(utts.size())];
  const Waveform padded = pick->waveform.length() >= segment_samples
                              ? pick->waveform
                              : tile_to(pick->waveform, segment_samples);
  const std::size_t start =
      rng.uniform_int(padded.length() - segment_samples + 1);
  Utterance seg;
  seg.utterance_id = pick->utterance_id;
  seg.speaker_id = speaker;
  seg.waveform = slice(padded, start, segment_samples);
  return seg;
}

double db_to_gain(double db) { return std::pow(10.0, db / 20.0); }

}  // namespace

EpochStream::EpochStream(const Corpus& corpus, SamplePolicy policy,
                         double segment_s, std::uint64_t seed, int worker_id)
    : corpus_(corpus),
      policy_(policy),
      rng_(Rng(seed).fork("epoch-worker-" + std::to_string(worker_id))) {
  if (segment_s <= 0.0) {
    throw std::invalid_argument("epoch stream: non-positive segment length");
  }
  if (policy.kind == SamplePolicy::Kind::kMom && policy.n_sams < 2) {
    throw std::invalid_argument("epoch stream: MoM policy needs n_sams >= 2");
  }
  if (policy.speakers_per_sam < 1) {
    throw std::invalid_argument("epoch stream: speakers_per_sam must be >= 1");
  }
  segment_samples_ = static_cast<std::size_t>(
      std::llround(segment_s * corpus.sample_rate_hz()));
}

TrainingSample EpochStream::next() {
  if (policy_.kind == SamplePolicy::Kind::kMom) {
    const int total = policy_.n_sams * policy_.speakers_per_sam;
    const auto speakers = draw_speakers(corpus_, total, rng_);
    std::vector<SpeakerAwareMixture> sams;
    sams.reserve(policy_.n_sams);
    for (int i = 0; i < policy_.n_sams; ++i) {
      std::vector<Utterance> segs;
      for (int j = 0; j < policy_.speakers_per_sam; ++j) {
        Utterance seg = draw_segment(
            corpus_, speakers[i * policy_.speakers_per_sam + j],
            segment_samples_, rng_);
        if (policy_.gain_jitter_db) {
          const double db = rng_.uniform(policy_.gain_jitter_db->first,
                                         policy_.gain_jitter_db->second);
          seg.waveform = scale(seg.waveform, db_to_gain(db));
        }
        segs.push_back(std::move(seg));
      }
      sams.push_back(build_sam(segs, corpus_, rng_, policy_.keep_sources,
                               segment_samples_));
    }
    return build_mom(std::move(sams));
  }

  // Noisy policy: one clean speaker plus speakers_per_sam interferers.
  const auto speakers = draw_speakers(corpus_, 1 + policy_.speakers_per_sam,
                                      rng_);
  Utterance clean = draw_segment(corpus_, speakers[0], segment_samples_, rng_);
  std::vector<Utterance> interferers;
  for (int j = 0; j < policy_.speakers_per_sam; ++j) {
    interferers.push_back(
        draw_segment(corpus_, speakers[1 + j], segment_samples_, rng_));
  }
  std::vector<Waveform> interferer_waves;
  for (const auto& u : interferers) interferer_waves.push_back(u.waveform);
  const Waveform speech = mix(interferer_waves, MixMode::kMinimum);
  Waveform noise = colored_noise(segment_samples_, corpus_.sample_rate_hz(),
                                 policy_.noise_pole, rng_);
  // Scale noise for the configured speech-to-noise ratio.
  const double target_rms =
      rms(speech) / db_to_gain(policy_.noise_snr_db);
  noise = scale(noise, target_rms);
  return build_noisy_pair(clean, interferers, noise, corpus_, rng_,
                          segment_samples_);
}

std::vector<SpeakerAwareMixture> build_sam_set(const Corpus& corpus, int count,
                                               int speakers_per_sam,
                                               bool keep_sources, Rng& rng,
                                               const std::string& id_prefix) {
  if (count < 1 || speakers_per_sam < 1) {
    throw std::invalid_argument("build_sam_set: bad parameters");
  }
  std::vector<SpeakerAwareMixture> sams;
  sams.reserve(count);
  for (int i = 0; i < count; ++i) {
    const auto speakers = draw_speakers(corpus, speakers_per_sam, rng);
    std::vector<Utterance> utts;
    for (const auto& spk : speakers) {
      const auto& pool = corpus.utterances_of(spk);
      utts.push_back(*pool[rng.uniform_int(pool.size())]);
    }
    SpeakerAwareMixture sam = build_sam(utts, corpus, rng, keep_sources);
    char id[64];
    std::snprintf(id, sizeof(id), "%s%04d", id_prefix.c_str(), i);
    sam.id = id;
    sams.push_back(std::move(sam));
  }
  return sams;
}

SamPairStream::SamPairStream(std::vector<SpeakerAwareMixture> sams, int n_sams,
                             double segment_s, std::uint64_t seed)
    : sams_(std::move(sams)),
      n_sams_(n_sams),
      rng_(Rng(seed).fork("sam-pair-stream")) {
  if (n_sams_ < 2) {
    throw std::invalid_argument("SamPairStream: n_sams must be >= 2");
  }
  if (static_cast<int>(sams_.size()) < n_sams_) {
    throw std::invalid_argument("SamPairStream: not enough SAMs");
  }
  sample_rate_hz_ = sams_.front().mixture.sample_rate_hz;
  segment_samples_ = static_cast<std::size_t>(
      std::llround(segment_s * sample_rate_hz_));
  if (segment_samples_ == 0) {
    throw std::invalid_argument("SamPairStream: non-positive segment");
  }
  // Weak-supervision hygiene: this path must never carry clean sources.
  for (auto& sam : sams_) {
    for (auto& c : sam.constituents) c.source.reset();
  }
}

MoMSample SamPairStream::next() {
  // Rejection-sample a speaker-disjoint group of SAMs.
  for (int attempt = 0; attempt < 256; ++attempt) {
    std::vector<std::size_t> idx;
    std::set<std::string> speakers;
    bool ok = true;
    for (int i = 0; i < n_sams_ && ok; ++i) {
      const std::size_t pick = rng_.uniform_int(sams_.size());
      if (std::find(idx.begin(), idx.end(), pick) != idx.end()) {
        ok = false;
        break;
      }
      for (const auto& c : sams_[pick].constituents) {
        if (!speakers.insert(c.speaker_id).second) {
          ok = false;
          break;
        }
      }
      idx.push_back(pick);
    }
    if (!ok) continue;

    std::vector<SpeakerAwareMixture> group;
    for (std::size_t i : idx) {
      const SpeakerAwareMixture& src = sams_[i];
      SpeakerAwareMixture cropped;
      cropped.id = src.id;
      cropped.contains_noise = src.contains_noise;
      const Waveform padded = src.mixture.length() >= segment_samples_
                                  ? src.mixture
                                  : tile_to(src.mixture, segment_samples_);
      const std::size_t start =
          rng_.uniform_int(padded.length() - segment_samples_ + 1);
      cropped.mixture = slice(padded, start, segment_samples_);
      for (const auto& c : src.constituents) {
        SamConstituent cc;
        cc.speaker_id = c.speaker_id;
        cc.source_utterance_id = c.source_utterance_id;
        const Waveform epadded = c.enrollment.length() >= segment_samples_
                                     ? c.enrollment
                                     : tile_to(c.enrollment, segment_samples_);
        const std::size_t estart =
            rng_.uniform_int(epadded.length() - segment_samples_ + 1);
        cc.enrollment = slice(epadded, estart, segment_samples_);
        cropped.constituents.push_back(std::move(cc));
      }
      group.push_back(std::move(cropped));
    }
    return build_mom(std::move(group));
  }
  throw std::runtime_error(
      "SamPairStream: could not draw speaker-disjoint SAMs (corpus too "
      "small or speaker overlap too dense)");
}

// ---------------------------------------------------------------------------
// Enrollment manifests

std::vector<EnrollmentRow> load_enrollment_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_enrollment_manifest: cannot open " +
                             path.string());
  }
  std::string line;
  if (!std::getline(in, line) ||
      split_csv_row(line) !=
          std::vector<std::string>{"mixture_id", "target_speaker_id",
                                   "enrollment_utterance_id"}) {
    throw std::runtime_error(
        "load_enrollment_manifest: bad header in " + path.string() +
        " (expected 'mixture_id,target_speaker_id,enrollment_utterance_id')");
  }
  std::vector<EnrollmentRow> rows;
  int row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_row(line);
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() ||
        fields[2].empty()) {
      throw std::runtime_error("load_enrollment_manifest: malformed row at " +
                               path.string() + ":" + std::to_string(row_no));
    }
    rows.push_back({fields[0], fields[1], fields[2]});
  }
  return rows;
}

void write_enrollment_manifest(const fs::path& path,
                               const std::vector<EnrollmentRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("write_enrollment_manifest: cannot open " +
                             path.string());
  }
  out << "mixture_id,target_speaker_id,enrollment_utterance_id\n";
  for (const auto& r : rows) {
    out << r.mixture_id << ',' << r.target_speaker_id << ','
        << r.enrollment_utterance_id << '\n';
  }
}

std::vector<EnrollmentRow> draw_enrollment_rows(
    const std::vector<SpeakerAwareMixture>& sams, const Corpus& corpus,
    Rng& rng) {
  std::vector<EnrollmentRow> rows;
  for (const auto& sam : sams) {
    for (const auto& c : sam.constituents) {
      const auto& utts = corpus.utterances_of(c.speaker_id);
      std::vector<const Utterance*> pool;
      for (const Utterance* u : utts) {
        if (u->utterance_id != c.source_utterance_id) pool.push_back(u);
      }
      if (pool.empty()) {
        throw std::invalid_argument(
            "draw_enrollment_rows: speaker '" + c.speaker_id +
            "' has no enrollment candidate distinct from the source");
      }
      rows.push_back({sam.id, c.speaker_id,
                      pool[rng.uniform_int(pool.size())]->utterance_id});
    }
  }
  return rows;
}

}  // namespace samom
