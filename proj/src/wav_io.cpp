// src/wav_io.cpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "samom/wav_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "samom/log.hpp"

namespace samom {

namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0]) |
         static_cast<std::uint16_t>(p[1] << 8);
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
  out.push_back((v >> 16) & 0xff);
  out.push_back((v >> 24) & 0xff);
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
}

}  // namespace

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("read_wav: cannot open " + path.string());
  }
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw std::runtime_error("read_wav: not a RIFF/WAVE file: " +
                             path.string());
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  const unsigned char* data = nullptr;
  std::uint32_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    const std::uint32_t chunk_len = read_u32(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + chunk_len > bytes.size()) {
      throw std::runtime_error("read_wav: truncated chunk in " +
                               path.string());
    }
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (chunk_len < 16) {
        throw std::runtime_error("read_wav: short fmt chunk in " +
                                 path.string());
      }
      format = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      sample_rate = read_u32(bytes.data() + body + 4);
      bits = read_u16(bytes.data() + body + 14);
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = bytes.data() + body;
      data_len = chunk_len;
    }
    pos = body + chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }

  if (data == nullptr) {
    throw std::runtime_error("read_wav: no data chunk in " + path.string());
  }
  if (format != 1 || channels != 1 || bits != 16) {
    throw std::runtime_error(
        "read_wav: expected mono 16-bit PCM, got format=" +
        std::to_string(format) + " channels=" + std::to_string(channels) +
        " bits=" + std::to_string(bits) + " in " + path.string());
  }

  Waveform w;
  w.sample_rate_hz = static_cast<int>(sample_rate);
  const std::size_t n = data_len / 2;
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::int16_t v = static_cast<std::int16_t>(
        static_cast<std::uint16_t>(data[2 * i]) |
        static_cast<std::uint16_t>(data[2 * i + 1] << 8));
    w.samples[i] = static_cast<double>(v) / 32768.0;
  }
  validate_waveform(w, path.string().c_str());
  return w;
}

void write_wav(const std::filesystem::path& path, const Waveform& w) {
  validate_waveform(w, "write_wav");
  const std::uint32_t n = static_cast<std::uint32_t>(w.length());
  const std::uint32_t data_len = n * 2;

  std::vector<unsigned char> out;
  out.reserve(44 + data_len);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_len);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate_hz));
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate_hz) * 2);
  put_u16(out, 2);   // block align
  put_u16(out, 16);  // bits
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_len);

  std::size_t clipped = 0;
  for (double s : w.samples) {
    long v = std::lround(s * 32768.0);
    if (v > 32767) {
      v = 32767;
      ++clipped;
    } else if (v < -32768) {
      v = -32768;
      ++clipped;
    }
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }
  if (clipped > 0) {
    log_warn("write_wav: clipped " + std::to_string(clipped) + " of " +
             std::to_string(n) + " samples in " + path.string());
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw std::runtime_error("write_wav: cannot open " + path.string());
  }
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (!f) {
    throw std::runtime_error("write_wav: write failed for " + path.string());
  }
}

}  // namespace samom
