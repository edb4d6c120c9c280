// include/samom/log.hpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef SAMOM_LOG_HPP
#define SAMOM_LOG_HPP

#include <string>

namespace samom {

enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

void set_log_level(LogLevel level);
LogLevel log_level();
// Parses "error" | "warn" | "info" | "debug"; throws on anything else.
LogLevel parse_log_level(const std::string& name);

void log_error(const std::string& msg);
void log_warn(const std::string& msg);
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace samom

#endif  // SAMOM_LOG_HPP
