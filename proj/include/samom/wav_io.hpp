// include/samom/wav_io.hpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef SAMOM_WAV_IO_HPP
#define SAMOM_WAV_IO_HPP

#include <filesystem>

#include "samom/waveform.hpp"

namespace samom {

// Reads a mono 16-bit PCM little-endian WAV file. Amplitudes map to
// [-1, 1) (sample / 32768). Throws std::runtime_error on malformed files
// and on any format other than mono PCM16.
Waveform read_wav(const std::filesystem::path& path);

// Writes mono 16-bit PCM. Samples outside [-1, 32767/32768] are clipped
// and a warning naming the file and clip count is logged.
void write_wav(const std::filesystem::path& path, const Waveform& w);

}  // namespace samom

#endif  // SAMOM_WAV_IO_HPP
