// include/samom/checkpoint.hpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef SAMOM_CHECKPOINT_HPP
#define SAMOM_CHECKPOINT_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "samom/model.hpp"

namespace samom {

// Self-describing container: magic + JSON header (config, step counter,
// tensor index) + concatenated row-major little-endian float32 payloads.
// Extra tensors (e.g. optimizer moments under "adam.") ride along and are
// ignored by loaders that do not ask for them.

struct Checkpoint {
  ExtractorConfig config;
  std::uint64_t step = 0;
  Extractor model;
  std::map<std::string, std::vector<double>> extra;  // flat row-major values
};

void save_checkpoint(const std::filesystem::path& path, Extractor& model,
                     std::uint64_t step,
                     const std::map<std::string, std::vector<double>>& extra = {});

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace samom

#endif  // SAMOM_CHECKPOINT_HPP
