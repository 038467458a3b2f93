#include "ssrn/io/config_file.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ssrn/errors.hpp"

namespace ssrn::io {

namespace {

using train::TrainConfig;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ValidationError(key + ": expected a non-negative integer, got '" + v + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  double out = 0.0;
  in >> out;
  if (v.empty() || in.fail() || !in.eof()) throw ValidationError(key + ": expected a number, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ValidationError(key + ": expected true or false, got '" + v + "'");
}

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Field {
  std::function<void(TrainConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const TrainConfig&)> get;
};

template <typename T>
Field uint_field(T TrainConfig::*m) {
  return {[m](TrainConfig& c, const std::string& k, const std::string& v) { c.*m = static_cast<T>(parse_uint(k, v)); },
          [m](const TrainConfig& c) { return std::to_string(c.*m); }};
}
template <typename T>
Field model_uint(T train::ModelConfig::*m) {
  return {[m](TrainConfig& c, const std::string& k, const std::string& v) {
            c.model.*m = static_cast<T>(parse_uint(k, v));
          },
          [m](const TrainConfig& c) { return std::to_string(c.model.*m); }};
}
Field double_field(double TrainConfig::*m) {
  return {[m](TrainConfig& c, const std::string& k, const std::string& v) { c.*m = parse_double(k, v); },
          [m](const TrainConfig& c) { return fmt_double(c.*m); }};
}
Field string_field(std::string TrainConfig::*m) {
  return {[m](TrainConfig& c, const std::string&, const std::string& v) { c.*m = v; },
          [m](const TrainConfig& c) { return c.*m; }};
}

template <typename Enum>
Field enum_field(Enum train::ModelConfig::*m, std::vector<std::pair<std::string, Enum>> names) {
  return {[m, names](TrainConfig& c, const std::string& k, const std::string& v) {
            for (const auto& [n, e] : names)
              if (n == v) {
                c.model.*m = e;
                return;
              }
            std::string allowed;
            for (const auto& [n, e] : names) allowed += (allowed.empty() ? "" : ", ") + n;
            throw ValidationError(k + ": expected one of " + allowed + ", got '" + v + "'");
          },
          [m, names](const TrainConfig& c) {
            for (const auto& [n, e] : names)
              if (e == c.model.*m) return n;
            return std::string("?");
          }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> f;
    f["video_dim"] = model_uint(&train::ModelConfig::video_dim);
    f["query_dim"] = model_uint(&train::ModelConfig::query_dim);
    f["dim"] = model_uint(&train::ModelConfig::dim);
    f["sampled"] = model_uint(&train::ModelConfig::sampled);
    f["siamese"] = model_uint(&train::ModelConfig::siamese);
    f["rnn_layers"] = model_uint(&train::ModelConfig::rnn_layers);
    f["alpha"] = {[](TrainConfig& c, const std::string& k, const std::string& v) { c.model.alpha = parse_double(k, v); },
                  [](const TrainConfig& c) { return fmt_double(c.model.alpha); }};
    f["use_siamese"] = {
        [](TrainConfig& c, const std::string& k, const std::string& v) { c.model.use_siamese = parse_bool(k, v); },
        [](const TrainConfig& c) { return std::string(c.model.use_siamese ? "true" : "false"); }};
    f["aggregation"] = enum_field<siamese::AggregationMode>(
        &train::ModelConfig::aggregation,
        {{"cosine", siamese::AggregationMode::cosine}, {"average", siamese::AggregationMode::average}});
    f["reasoning"] = enum_field<siamese::ReasoningMode>(
        &train::ModelConfig::reasoning,
        {{"residual", siamese::ReasoningMode::residual}, {"concat", siamese::ReasoningMode::concat}});
    f["offset_mode"] = enum_field<sampling::OffsetMode>(
        &train::ModelConfig::offset_mode,
        {{"adjacent", sampling::OffsetMode::adjacent}, {"spread", sampling::OffsetMode::spread}});
    f["lambda"] = double_field(&TrainConfig::lambda);
    f["learning_rate"] = double_field(&TrainConfig::learning_rate);
    f["batch_size"] = uint_field(&TrainConfig::batch_size);
    f["max_steps"] = uint_field(&TrainConfig::max_steps);
    f["seed"] = uint_field(&TrainConfig::seed);
    f["soft_label"] = {
        [](TrainConfig& c, const std::string& k, const std::string& v) { c.soft_label = parse_bool(k, v); },
        [](const TrainConfig& c) { return std::string(c.soft_label ? "true" : "false"); }};
    f["threads"] = uint_field(&TrainConfig::threads);
    f["eval_every"] = uint_field(&TrainConfig::eval_every);
    f["train_annotations"] = string_field(&TrainConfig::train_annotations);
    f["test_annotations"] = string_field(&TrainConfig::test_annotations);
    f["features_dir"] = string_field(&TrainConfig::features_dir);
    f["embeddings"] = string_field(&TrainConfig::embeddings);
    f["synthetic_preset"] = string_field(&TrainConfig::synthetic_preset);
    f["synthetic_count"] = uint_field(&TrainConfig::synthetic_count);
    f["synthetic_seed"] = uint_field(&TrainConfig::synthetic_seed);
    f["fps"] = double_field(&TrainConfig::fps);
    f["checkpoint"] = string_field(&TrainConfig::checkpoint);
    f["loss_log"] = string_field(&TrainConfig::loss_log);
    return f;
  }();
  return table;
}

}  // namespace

void apply_setting(TrainConfig& config, const std::string& key, const std::string& value) {
  const auto it = fields().find(key);
  if (it == fields().end()) throw ValidationError("unknown config key '" + key + "'");
  it->second.set(config, key, value);
}

void apply_config_text(TrainConfig& config, const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string raw;
  for (std::size_t line = 1; std::getline(in, raw); ++line) {
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ValidationError(origin + ":" + std::to_string(line) + ": expected key=value, got '" + body + "'");
    try {
      apply_setting(config, trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    } catch (const ValidationError& e) {
      throw ValidationError(origin + ":" + std::to_string(line) + ": " + e.what());
    }
  }
}

TrainConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::stringstream buf;
  buf << in.rdbuf();
  TrainConfig c;
  apply_config_text(c, buf.str(), path);
  return c;
}

std::string to_kv(const TrainConfig& config) {
  std::string out;
  for (const auto& [key, field] : fields()) out += key + " = " + field.get(config) + "\n";
  return out;
}

}  // namespace ssrn::io
