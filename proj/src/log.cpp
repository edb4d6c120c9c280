// src/log.cpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "samom/log.hpp"

#include <iostream>
#include <stdexcept>

namespace samom {

namespace {
LogLevel g_level = LogLevel::kInfo;

void emit(LogLevel level, const char* tag, const std::string& msg) {
  if (static_cast<int>(level) <= static_cast<int>(g_level)) {
    std::cerr << tag << msg << std::endl;
  }
}
}  // namespace

void set_log_level(LogLevel level) { g_level = level; }
LogLevel log_level() { return g_level; }

LogLevel parse_log_level(const std::string& name) {
  if (name == "error") return LogLevel::kError;
  if (name == "warn") return LogLevel::kWarn;
  if (name == "info") return LogLevel::kInfo;
  if (name == "debug") return LogLevel::kDebug;
  throw std::invalid_argument("unknown log level: " + name);
}

void log_error(const std::string& msg) { emit(LogLevel::kError, "ERROR: ", msg); }
void log_warn(const std::string& msg) { emit(LogLevel::kWarn, "WARNING: ", msg); }
void log_info(const std::string& msg) { emit(LogLevel::kInfo, "INFO: ", msg); }
void log_debug(const std::string& msg) { emit(LogLevel::kDebug, "DEBUG: ", msg); }

}  // namespace samom
