#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ssrn/errors.hpp"
#include "ssrn/io/checkpoint.hpp"
#include "ssrn/io/config_file.hpp"
#include "ssrn/io/dataset.hpp"
#include "ssrn/io/report.hpp"
#include "ssrn/training/pipeline_check.hpp"
#include "ssrn/training/trainer.hpp"

namespace {

using nlohmann::json;
using namespace ssrn;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void fail_line(const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << std::endl;
}

/// Config file, then named flags, then --set assignments.
struct ConfigSource {
  std::string file;
  std::map<std::string, std::string> flags;
  std::vector<std::string> sets;

  void bind(CLI::App* cmd, const std::vector<std::pair<std::string, std::string>>& names) {
    cmd->add_option("--config", file, "key=value config file");
    for (const auto& [flag, key] : names) cmd->add_option(flag, flags[key], "sets config key '" + key + "'");
    cmd->add_option("--set", sets, "extra key=value override (repeatable)");
  }

  void apply(train::TrainConfig& config) const {
    if (!file.empty()) io::apply_config_text(config, read(file), file);
    try {
      for (const auto& [key, value] : flags)
        if (!value.empty()) io::apply_setting(config, key, value);
      for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + s + "'");
        io::apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
      }
    } catch (const ValidationError& e) {
      throw UsageError(e.what());
    }
  }

  static std::string read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }
};

const std::vector<std::pair<std::string, std::string>> kModelFlags = {
    {"--m", "sampled"},          {"--k", "siamese"},        {"--dim", "dim"},
    {"--video-dim", "video_dim"}, {"--query-dim", "query_dim"}, {"--rnn-layers", "rnn_layers"},
    {"--alpha", "alpha"},         {"--use-siamese", "use_siamese"}, {"--aggregation", "aggregation"},
    {"--reasoning", "reasoning"}, {"--offset-mode", "offset_mode"}};

const std::vector<std::pair<std::string, std::string>> kDataFlags = {
    {"--annotations", "test_annotations"}, {"--features", "features_dir"}, {"--embeddings", "embeddings"},
    {"--preset", "synthetic_preset"},      {"--count", "synthetic_count"}, {"--data-seed", "synthetic_seed"},
    {"--fps", "fps"}};

std::vector<std::pair<std::string, std::string>> concat(std::vector<std::pair<std::string, std::string>> a,
                                                        const std::vector<std::pair<std::string, std::string>>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<train::GroundingSample> samples_for(const train::TrainConfig& c, io::Split split) {
  return train::make_samples(io::load_split(c, split), c.model.sampled, c.model.active_siamese(),
                             c.model.offset_mode);
}

bool has_test_data(const train::TrainConfig& c) {
  return !c.test_annotations.empty() || !c.synthetic_preset.empty();
}

int run_train(const ConfigSource& src) {
  train::TrainConfig config;
  src.apply(config);
  config.validate();
  if (config.checkpoint.empty()) config.checkpoint = "ssrn.ckpt";
  const auto train_set = samples_for(config, io::Split::train);
  std::vector<train::GroundingSample> test_set;
  if (has_test_data(config)) test_set = samples_for(config, io::Split::test);

  std::ofstream loss_log;
  if (!config.loss_log.empty()) {
    loss_log.open(config.loss_log, std::ios::trunc);
    if (!loss_log) throw IoError("cannot open '" + config.loss_log + "' for writing");
    loss_log << "step,total,l1,l2\n";
  }
  auto outcome = train::train(config, train_set, test_set, [&](const train::StepLog& s) {
    if (loss_log) loss_log << s.step << ',' << s.total << ',' << s.l1 << ',' << s.l2 << '\n';
  });
  io::save_checkpoint(io::make_checkpoint(config, outcome.model, &outcome.adam), config.checkpoint);

  const double lambda = config.soft_label ? config.lambda : 0.0;
  const auto loss = train::mean_loss(outcome.model, train_set, lambda);
  json out{{"checkpoint", config.checkpoint},
           {"steps", config.max_steps},
           {"train_loss", {{"total", loss.total}, {"l1", loss.l1}, {"l2", loss.l2}}},
           {"train_metrics", io::metrics_json(train::evaluate(outcome.model, train_set, config.soft_label))}};
  if (!test_set.empty())
    out["test_metrics"] = io::metrics_json(train::evaluate(outcome.model, test_set, config.soft_label));
  json evals = json::array();
  for (const auto& [step, report] : outcome.evaluations) evals.push_back({{"step", step}, {"metrics", io::metrics_json(report)}});
  if (!evals.empty()) out["evaluations"] = evals;
  std::cout << out.dump(2) << std::endl;
  return 0;
}

struct Restored {
  train::TrainConfig config;
  train::SsrnModel model;
};

Restored restore(const std::string& checkpoint, const ConfigSource& src) {
  const auto ckpt = io::load_checkpoint(checkpoint);
  train::TrainConfig config = ckpt.config;
  src.apply(config);
  io::check_compatible(ckpt.config.model, config.model);
  return {config, io::restore_model(ckpt)};
}

int run_evaluate(const std::string& checkpoint, const ConfigSource& src, bool hard) {
  auto [config, model] = restore(checkpoint, src);
  const auto samples = samples_for(config, io::Split::test);
  std::cout << io::metrics_json(train::evaluate(model, samples, !hard)).dump(2) << std::endl;
  return 0;
}

int run_predict(const std::string& checkpoint, const ConfigSource& src, std::size_t top, const std::string& out_path) {
  auto [config, model] = restore(checkpoint, src);
  const auto samples = samples_for(config, io::Split::test);
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path, std::ios::trunc);
    if (!file) throw IoError("cannot open '" + out_path + "' for writing");
  }
  std::ostream& out = out_path.empty() ? std::cout : file;
  for (const auto& s : samples) {
    const auto preds = train::predict(model, s, top);
    for (std::size_t r = 0; r < preds.size(); ++r) {
      auto line = io::prediction_json(s.id, preds[r]);
      line["rank"] = r + 1;
      out << line.dump() << '\n';
    }
  }
  out.flush();
  return 0;
}

int run_grad_check(std::uint64_t seed, double eps, double tolerance, bool as_json) {
  const auto report = train::pipeline_grad_check(seed, {}, {eps, tolerance});
  if (as_json) {
    std::cout << io::grad_json(report).dump(2) << std::endl;
  } else {
    std::printf("%-40s %14s  %s\n", "parameter", "max rel error", "status");
    for (const auto& p : report.params)
      std::printf("%-40s %14.3e  %s\n", p.name.c_str(), p.max_rel_error, p.max_rel_error <= tolerance ? "ok" : "FAIL");
    std::printf("%s max_rel_error=%.3e tolerance=%.1e\n", report.passed ? "PASS" : "FAIL", report.max_rel_error(),
                tolerance);
  }
  if (!report.passed) {
    fail_line("gradient", report.failure.empty()
                              ? "max relative error " + std::to_string(report.max_rel_error()) + " in " +
                                    report.worst_param()
                              : report.failure);
    return 1;
  }
  return 0;
}

int run_bias_report(const std::string& annotations, std::size_t m, std::size_t k, double fps) {
  const auto records = io::load_annotations(annotations, fps);
  if (records.empty()) throw ValidationError(annotations + ": no annotations");
  std::vector<sampling::PlannedAnnotation> planned;
  for (const auto& r : records) {
    try {
      planned.push_back({{r.start, r.end}, sampling::SamplingPlan::make(r.num_frames, m, k)});
    } catch (const Error& e) {
      throw Error(e.kind(), "record '" + r.id + "': " + e.what());
    }
  }
  auto out = io::bias_json(sampling::bias_report(planned));
  out["sampled"] = m;
  std::cout << out.dump(2) << std::endl;
  return 0;
}

int run_synth(const ConfigSource& src, const std::string& dir) {
  train::TrainConfig config;
  src.apply(config);
  if (config.synthetic_preset.empty()) throw UsageError("synth needs --preset");
  config.model.validate();
  const auto spec = io::synthetic_spec(config, io::Split::train);
  const auto raw = train::synth_dataset(spec);
  io::write_dataset(raw, dir);

  const auto root = std::filesystem::absolute(dir);
  train::TrainConfig suggested = config;
  suggested.synthetic_preset.clear();
  suggested.train_annotations = (root / "annotations.jsonl").string();
  suggested.features_dir = root.string();
  suggested.checkpoint = (root / "ssrn.ckpt").string();
  std::ofstream cfg(root / "train.cfg", std::ios::trunc);
  if (!cfg) throw IoError("cannot write " + (root / "train.cfg").string());
  cfg << io::to_kv(suggested);

  std::cout << json{{"samples", raw.size()},
                    {"annotations", suggested.train_annotations},
                    {"features_dir", suggested.features_dir},
                    {"config", (root / "train.cfg").string()},
                    {"seed", spec.seed}}
                   .dump(2)
            << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Siamese sampling and reasoning network for temporal sentence grounding"};
  app.require_subcommand(1);

  ConfigSource train_src;
  auto* train_cmd = app.add_subcommand("train", "train a model and write a checkpoint");
  train_src.bind(train_cmd, concat(concat(kModelFlags, kDataFlags),
                                   {{"--steps", "max_steps"},
                                    {"--lr", "learning_rate"},
                                    {"--batch", "batch_size"},
                                    {"--lambda", "lambda"},
                                    {"--seed", "seed"},
                                    {"--soft-label", "soft_label"},
                                    {"--threads", "threads"},
                                    {"--eval-every", "eval_every"},
                                    {"--train-annotations", "train_annotations"},
                                    {"--checkpoint", "checkpoint"},
                                    {"--loss-log", "loss_log"}}));

  ConfigSource eval_src;
  std::string eval_ckpt;
  bool eval_hard = false;
  auto* eval_cmd = app.add_subcommand("evaluate", "score a checkpoint on the test split");
  eval_cmd->add_option("--checkpoint", eval_ckpt, "checkpoint file")->required();
  eval_cmd->add_flag("--hard", eval_hard, "headline table uses the unrefined decode");
  eval_src.bind(eval_cmd, concat(kModelFlags, kDataFlags));

  ConfigSource pred_src;
  std::string pred_ckpt, pred_out;
  std::size_t pred_top = 1;
  auto* pred_cmd = app.add_subcommand("predict", "write top-n segments as JSON lines");
  pred_cmd->add_option("--checkpoint", pred_ckpt, "checkpoint file")->required();
  pred_cmd->add_option("--top", pred_top, "segments per query")->check(CLI::PositiveNumber);
  pred_cmd->add_option("--out", pred_out, "output file (default stdout)");
  pred_src.bind(pred_cmd, concat(kModelFlags, kDataFlags));

  std::uint64_t gc_seed = 7;
  double gc_eps = 1e-5, gc_tol = 1e-3;
  bool gc_json = false;
  auto* gc_cmd = app.add_subcommand("grad-check", "finite-difference check of the full network (M=6, N=4, D=8, K=2)");
  gc_cmd->add_option("--seed", gc_seed, "random seed");
  gc_cmd->add_option("--eps", gc_eps, "central difference step");
  gc_cmd->add_option("--tolerance", gc_tol, "max relative error");
  gc_cmd->add_flag("--json", gc_json, "emit JSON instead of a table");

  std::string bias_annotations;
  std::size_t bias_m = 0, bias_k = 0;
  double bias_fps = 0.0;
  auto* bias_cmd = app.add_subcommand("bias-report", "IoU lost by snapping annotations to the sampled grid");
  bias_cmd->add_option("--annotations", bias_annotations, "JSON-lines annotation file")->required();
  bias_cmd->add_option("--m", bias_m, "sampled length M")->required();
  bias_cmd->add_option("--k", bias_k, "siamese streams K");
  bias_cmd->add_option("--fps", bias_fps, "fps for second-based records");

  ConfigSource synth_src;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic dataset to disk");
  synth_cmd->add_option("--out", synth_out, "output directory")->required();
  synth_src.bind(synth_cmd, concat({{"--video-dim", "video_dim"}, {"--query-dim", "query_dim"}, {"--seed", "seed"}},
                                   {{"--preset", "synthetic_preset"}, {"--count", "synthetic_count"}}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    fail_line("usage", e.what());
    return 2;
  }

  try {
    if (*train_cmd) return run_train(train_src);
    if (*eval_cmd) return run_evaluate(eval_ckpt, eval_src, eval_hard);
    if (*pred_cmd) return run_predict(pred_ckpt, pred_src, pred_top, pred_out);
    if (*gc_cmd) return run_grad_check(gc_seed, gc_eps, gc_tol, gc_json);
    if (*bias_cmd) return run_bias_report(bias_annotations, bias_m, bias_k, bias_fps);
    if (*synth_cmd) return run_synth(synth_src, synth_out);
  } catch (const UsageError& e) {
    fail_line("usage", e.what());
    return 2;
  } catch (const Error& e) {
    fail_line(e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    fail_line("internal", e.what());
    return 1;
  }
  return 2;
}
