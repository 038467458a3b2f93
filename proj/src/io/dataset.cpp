#include "ssrn/io/dataset.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ssrn/errors.hpp"
#include "ssrn/io/feature_file.hpp"

namespace ssrn::io {

namespace {

using nlohmann::json;

double number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ValidationError(where + ": missing \"" + key + "\"");
  if (!j[key].is_number()) throw ValidationError(where + ": \"" + key + "\" is not a number");
  return j[key].get<double>();
}

}  // namespace

AnnotationRecord parse_annotation(const std::string& json_line, std::size_t line, double default_fps) {
  const std::string at = "line " + std::to_string(line);
  json j;
  try {
    j = json::parse(json_line);
  } catch (const json::parse_error& e) {
    throw FormatError(at + ": malformed JSON (" + e.what() + ")");
  }
  if (!j.is_object()) throw FormatError(at + ": expected a JSON object");
  if (!j.contains("id") || !j["id"].is_string()) throw ValidationError(at + ": missing string \"id\"");

  AnnotationRecord r;
  r.id = j["id"].get<std::string>();
  const std::string where = at + " (record \"" + r.id + "\")";
  r.video = j.contains("video") && j["video"].is_string() ? j["video"].get<std::string>() : r.id;

  if (j.contains("duration_seconds")) {
    const double duration = number(j, "duration_seconds", where);
    const double fps = j.contains("fps") ? number(j, "fps", where) : default_fps;
    if (!(fps > 0.0)) throw ValidationError(where + ": second-based record needs a positive fps");
    if (!(duration > 0.0)) throw ValidationError(where + ": duration_seconds must be positive");
    r.num_frames = static_cast<std::size_t>(std::llround(duration * fps));
    r.start = number(j, "start", where) * fps;
    r.end = number(j, "end", where) * fps;
  } else {
    const double frames = number(j, "num_frames", where);
    if (!(frames >= 1.0) || frames != std::floor(frames))
      throw ValidationError(where + ": num_frames must be a positive integer");
    r.num_frames = static_cast<std::size_t>(frames);
    r.start = number(j, "start", where);
    r.end = number(j, "end", where);
  }
  if (!(r.start >= 0.0 && r.start <= r.end && r.end <= static_cast<double>(r.num_frames)))
    throw ValidationError(where + ": need 0 <= start <= end <= num_frames, got start=" + std::to_string(r.start) +
                          " end=" + std::to_string(r.end) + " num_frames=" + std::to_string(r.num_frames));

  if (!j.contains("query")) throw ValidationError(where + ": missing \"query\"");
  const json& q = j["query"];
  if (q.is_string()) {
    std::istringstream words(q.get<std::string>());
    for (std::string w; words >> w;) r.tokens.push_back(w);
  } else if (q.is_array()) {
    for (const auto& t : q) {
      if (!t.is_string()) throw ValidationError(where + ": query tokens must be strings");
      r.tokens.push_back(t.get<std::string>());
    }
  } else {
    throw ValidationError(where + ": \"query\" must be a string or token list");
  }
  if (r.tokens.empty()) throw ValidationError(where + ": empty query");
  return r;
}

std::vector<AnnotationRecord> load_annotations(const std::string& path, double default_fps) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<AnnotationRecord> out;
  std::string text;
  for (std::size_t line = 1; std::getline(in, text); ++line) {
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_annotation(text, line, default_fps));
    } catch (const Error& e) {
      throw Error(e.kind(), path + ": " + e.what());
    }
  }
  return out;
}

void save_annotations(const std::vector<AnnotationRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& r : records) {
    json j{{"id", r.id}, {"num_frames", r.num_frames}, {"start", r.start}, {"end", r.end}, {"query", r.tokens}};
    if (r.video != r.id) j["video"] = r.video;
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("short write to '" + path + "'");
}

EmbeddingTable EmbeddingTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  EmbeddingTable t;
  std::string text;
  for (std::size_t line = 1; std::getline(in, text); ++line) {
    std::istringstream fields(text);
    std::string token;
    if (!(fields >> token)) continue;
    std::vector<double> v;
    for (double x; fields >> x;) v.push_back(x);
    if (!fields.eof()) throw FormatError(path + ": line " + std::to_string(line) + ": non-numeric component");
    if (t.dim_ == 0) t.dim_ = v.size();
    if (v.empty() || v.size() != t.dim_)
      throw FormatError(path + ": line " + std::to_string(line) + ": expected " + std::to_string(t.dim_) +
                        " components, found " + std::to_string(v.size()));
    t.table_[token] = std::move(v);
  }
  return t;
}

std::vector<double> EmbeddingTable::lookup(const std::string& token, std::size_t dim) const {
  if (auto it = table_.find(token); it != table_.end()) {
    if (it->second.size() != dim)
      throw ShapeError("embedding for '" + token + "' has " + std::to_string(it->second.size()) +
                       " components, model expects " + std::to_string(dim));
    return it->second;
  }
  return train::hash_embedding(token, dim);
}

num::Matrix embed_tokens(const std::vector<std::string>& tokens, std::size_t dim, const EmbeddingTable* table) {
  num::Matrix m(tokens.size(), dim);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto v = table ? table->lookup(tokens[i], dim) : train::hash_embedding(tokens[i], dim);
    std::copy(v.begin(), v.end(), m.row(i).begin());
  }
  return m;
}

std::vector<train::RawSample> load_dataset(const std::string& annotations, const std::string& features_dir,
                                           std::size_t query_dim, const std::string& embeddings,
                                           double default_fps) {
  const auto records = load_annotations(annotations, default_fps);
  EmbeddingTable table;
  const bool have_table = !embeddings.empty();
  if (have_table) table = EmbeddingTable::load(embeddings);
  std::vector<train::RawSample> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    train::RawSample s;
    s.id = r.id;
    try {
      s.frames = load_features((std::filesystem::path(features_dir) / (r.video + ".feat")).string());
      if (s.frames.rows() != r.num_frames)
        throw ValidationError("feature file has " + std::to_string(s.frames.rows()) + " frames, annotation says " +
                              std::to_string(r.num_frames));
      s.query = embed_tokens(r.tokens, query_dim, have_table ? &table : nullptr);
    } catch (const Error& e) {
      throw Error(e.kind(), "sample '" + r.id + "': " + e.what());
    }
    s.tokens = r.tokens;
    s.annotation = {r.start, r.end};
    out.push_back(std::move(s));
  }
  return out;
}

void write_dataset(const std::vector<train::RawSample>& samples, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::vector<AnnotationRecord> records;
  for (const auto& s : samples) {
    save_features(s.frames, (std::filesystem::path(dir) / (s.id + ".feat")).string());
    records.push_back({s.id, s.id, s.dense_frames(), s.annotation.start, s.annotation.end, s.tokens});
  }
  save_annotations(records, (std::filesystem::path(dir) / "annotations.jsonl").string());
}

train::SyntheticSpec synthetic_spec(const train::TrainConfig& config, Split split) {
  auto spec = train::synthetic_preset(config.synthetic_preset);
  if (config.synthetic_count) spec.count = config.synthetic_count;
  spec.video_dim = config.model.video_dim;
  spec.query_dim = config.model.query_dim;
  spec.seed = config.synthetic_seed ? config.synthetic_seed : config.seed;
  if (split == Split::test) spec.seed += 7919;
  return spec;
}

std::vector<train::RawSample> load_split(const train::TrainConfig& config, Split split) {
  const std::string& annotations = split == Split::train ? config.train_annotations : config.test_annotations;
  if (!annotations.empty()) {
    if (config.features_dir.empty()) throw ValidationError("features_dir is required with annotation files");
    return load_dataset(annotations, config.features_dir, config.model.query_dim, config.embeddings, config.fps);
  }
  if (config.synthetic_preset.empty())
    throw ValidationError(std::string("no data: set ") + (split == Split::train ? "train" : "test") +
                          "_annotations or synthetic_preset");
  return train::synth_dataset(synthetic_spec(config, split));
}

}  // namespace ssrn::io
