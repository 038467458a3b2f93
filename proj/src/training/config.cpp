#include "ssrn/training/config.hpp"

#include "ssrn/errors.hpp"

namespace ssrn::train {

void ModelConfig::validate() const {
  if (dim == 0 || dim % 2 != 0) throw ValidationError("config: dim must be a positive even number, got " + std::to_string(dim));
  if (sampled < 2) throw ValidationError("config: sampled (M) must be >= 2, got " + std::to_string(sampled));
  if (video_dim == 0 || query_dim == 0) throw ValidationError("config: feature dimensions must be positive");
  if (rnn_layers == 0) throw ValidationError("config: rnn_layers must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("config: alpha must lie in [0, 1], got " + std::to_string(alpha));
  if (use_siamese && siamese == 0) throw ValidationError("config: siamese enabled with K=0");
}

void TrainConfig::validate() const {
  model.validate();
  if (batch_size == 0) throw ValidationError("config: batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ValidationError("config: learning_rate must be > 0");
  if (!(lambda >= 0.0)) throw ValidationError("config: lambda must be >= 0");
  if (threads == 0) throw ValidationError("config: threads must be >= 1");
}

TrainConfig dataset_defaults(const std::string& dataset) {
  TrainConfig c;
  c.model.dim = 512;
  c.model.siamese = 4;
  c.model.query_dim = 300;
  c.model.video_dim = 4096;
  c.batch_size = 64;
  if (dataset == "activitynet") {
    c.model.sampled = 200;
    c.learning_rate = 8e-4;
  } else if (dataset == "tacos") {
    c.model.sampled = 200;
    c.learning_rate = 3e-4;
  } else if (dataset == "charades") {
    c.model.sampled = 64;
    c.learning_rate = 4e-4;
  } else {
    throw ValidationError("dataset_defaults: unknown dataset '" + dataset + "'");
  }
  return c;
}

TrainConfig desk_defaults() {
  TrainConfig c;
  c.synthetic_preset = "overfit";
  return c;
}

}  // namespace ssrn::train
