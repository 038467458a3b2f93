#pragma once

#include <string>

#include "ssrn/training/config.hpp"

namespace ssrn::io {

/// Applies one "key=value" assignment. Throws ValidationError for an unknown
/// key or an unparsable value.
void apply_setting(train::TrainConfig& config, const std::string& key, const std::string& value);

/// Flat "key = value" text; '#' starts a comment. Errors cite the line number.
void apply_config_text(train::TrainConfig& config, const std::string& text, const std::string& origin = "config");
train::TrainConfig load_config(const std::string& path);

/// Every field, one per line, in a form `apply_config_text` reads back.
std::string to_kv(const train::TrainConfig& config);

}  // namespace ssrn::io
