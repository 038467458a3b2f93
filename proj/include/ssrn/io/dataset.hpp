#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "ssrn/training/config.hpp"
#include "ssrn/training/data.hpp"

namespace ssrn::io {

struct AnnotationRecord {
  std::string id;
  std::string video;  // feature file stem; defaults to id
  std::size_t num_frames = 0;
  double start = 0.0;  // dense-frame units
  double end = 0.0;
  std::vector<std::string> tokens;
};

/// Parses one JSON object. Either "num_frames" with frame-unit start/end, or
/// "duration_seconds" with second-unit start/end converted by "fps" (from the
/// record, else `default_fps`). `line` only feeds error messages.
AnnotationRecord parse_annotation(const std::string& json_line, std::size_t line, double default_fps = 0.0);

/// JSON-lines reader; blank lines are skipped. Errors carry the line number and,
/// once known, the record id.
std::vector<AnnotationRecord> load_annotations(const std::string& path, double default_fps = 0.0);

void save_annotations(const std::vector<AnnotationRecord>& records, const std::string& path);

/// GloVe-style text table: "<token> v1 v2 ... vd" per line.
class EmbeddingTable {
 public:
  static EmbeddingTable load(const std::string& path);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return table_.size(); }
  /// Table entry, or the deterministic hash embedding when missing.
  std::vector<double> lookup(const std::string& token, std::size_t dim) const;

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> table_;
};

num::Matrix embed_tokens(const std::vector<std::string>& tokens, std::size_t dim,
                         const EmbeddingTable* table = nullptr);

/// Loads annotation records and their "<video>.feat" files from `features_dir`.
std::vector<train::RawSample> load_dataset(const std::string& annotations, const std::string& features_dir,
                                           std::size_t query_dim, const std::string& embeddings = {},
                                           double default_fps = 0.0);

/// Writes "<id>.feat" files plus "annotations.jsonl" into `dir` (created if needed).
void write_dataset(const std::vector<train::RawSample>& samples, const std::string& dir);

enum class Split { train, test };

/// Raw samples for a split: annotation files plus features when configured,
/// otherwise the synthetic preset (the test split uses a different seed).
std::vector<train::RawSample> load_split(const train::TrainConfig& config, Split split);

/// The synthetic spec a config resolves to, with widths taken from the model.
train::SyntheticSpec synthetic_spec(const train::TrainConfig& config, Split split);

}  // namespace ssrn::io
