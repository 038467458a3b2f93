#include "ssrn/io/checkpoint.hpp"

#include "ssrn/errors.hpp"
#include "ssrn/io/binary.hpp"
#include "ssrn/io/config_file.hpp"
#include "ssrn/numcore/random.hpp"

namespace ssrn::io {

namespace {

void put_matrix_values(std::string& out, const num::Matrix& m) {
  for (double x : m.data()) bin::put_f64(out, x);
}

num::Matrix read_matrix_values(bin::Reader& r, std::size_t rows, std::size_t cols) {
  num::Matrix m(rows, cols);
  for (double& x : m.data()) x = r.f64();
  return m;
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& ckpt) {
  std::string out(kCheckpointMagic, sizeof(kCheckpointMagic));
  bin::put_uint(out, kCheckpointVersion);
  const std::string cfg = to_kv(ckpt.config);
  bin::put_uint<std::uint64_t>(out, cfg.size());
  out += cfg;
  bin::put_uint<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.params.size()));
  for (std::size_t i = 0; i < ckpt.params.size(); ++i) {
    const auto& name = ckpt.params.name(i);
    const auto& m = ckpt.params.value(i);
    bin::put_uint<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    bin::put_uint<std::uint32_t>(out, static_cast<std::uint32_t>(m.rows()));
    bin::put_uint<std::uint32_t>(out, static_cast<std::uint32_t>(m.cols()));
    put_matrix_values(out, m);
  }
  out.push_back(ckpt.adam ? 1 : 0);
  if (ckpt.adam) {
    const auto& a = *ckpt.adam;
    if (a.first.size() != ckpt.params.size() || a.second.size() != ckpt.params.size())
      throw ShapeError("encode_checkpoint: optimizer state has " + std::to_string(a.first.size()) +
                       " slots for " + std::to_string(ckpt.params.size()) + " parameters");
    bin::put_uint<std::uint64_t>(out, a.step);
    bin::put_f64(out, a.beta1);
    bin::put_f64(out, a.beta2);
    bin::put_f64(out, a.eps);
    for (std::size_t i = 0; i < ckpt.params.size(); ++i) {
      if (!a.first[i].same_shape(ckpt.params.value(i)) || !a.second[i].same_shape(ckpt.params.value(i)))
        throw ShapeError("encode_checkpoint: optimizer slot for " + ckpt.params.name(i) + " has the wrong shape");
      put_matrix_values(out, a.first[i]);
      put_matrix_values(out, a.second[i]);
    }
  }
  bin::put_uint(out, num::fnv1a(out));
  return out;
}

Checkpoint decode_checkpoint(const std::string& bytes, const std::string& what) {
  constexpr std::size_t kMagic = sizeof(kCheckpointMagic);
  if (bytes.size() < kMagic || std::string_view(bytes).substr(0, kMagic) != std::string_view(kCheckpointMagic, kMagic))
    throw FormatError(what + ": not a checkpoint, expected magic \"SSRNCKPT\"");
  if (bytes.size() < kMagic + 4 + 8)
    throw IntegrityError(what + ": file is truncated (" + std::to_string(bytes.size()) + " bytes)");
  const std::string_view body = std::string_view(bytes).substr(0, bytes.size() - 8);
  bin::Reader tail(std::string_view(bytes).substr(bytes.size() - 8), what);
  const std::uint64_t stored = tail.uint<std::uint64_t>();
  const std::uint64_t actual = num::fnv1a(body);
  if (stored != actual)
    throw IntegrityError(what + ": checksum mismatch, file is corrupted or truncated");

  bin::Reader r(body, what);
  r.bytes(kMagic);
  const auto version = r.uint<std::uint32_t>();
  if (version != kCheckpointVersion)
    throw VersionError(what + ": checkpoint format version " + std::to_string(version) +
                       " is not supported by this build (reads version " + std::to_string(kCheckpointVersion) +
                       "); re-save it with a matching build");

  Checkpoint ck;
  const auto cfg_len = r.uint<std::uint64_t>();
  apply_config_text(ck.config, std::string(r.bytes(cfg_len)), what + " config");
  const auto count = r.uint<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = r.uint<std::uint32_t>();
    std::string name(r.bytes(name_len));
    const auto rows = r.uint<std::uint32_t>();
    const auto cols = r.uint<std::uint32_t>();
    ck.params.add(std::move(name), read_matrix_values(r, rows, cols));
  }
  const auto has_adam = r.uint<std::uint8_t>();
  if (has_adam > 1) throw FormatError(what + ": bad optimizer flag");
  if (has_adam) {
    train::AdamState a;
    a.step = r.uint<std::uint64_t>();
    a.beta1 = r.f64();
    a.beta2 = r.f64();
    a.eps = r.f64();
    for (std::size_t i = 0; i < ck.params.size(); ++i) {
      const auto& p = ck.params.value(i);
      a.first.push_back(read_matrix_values(r, p.rows(), p.cols()));
      a.second.push_back(read_matrix_values(r, p.rows(), p.cols()));
    }
    ck.adam = std::move(a);
  }
  if (r.remaining() != 0)
    throw FormatError(what + ": " + std::to_string(r.remaining()) + " unexpected trailing bytes");
  return ck;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) { bin::write_file(path, encode_checkpoint(ckpt)); }

Checkpoint load_checkpoint(const std::string& path) { return decode_checkpoint(bin::read_file(path), path); }

Checkpoint make_checkpoint(const train::TrainConfig& config, const train::SsrnModel& model,
                           const train::AdamState* adam) {
  Checkpoint ck{config, model.params(), std::nullopt};
  ck.config.model = model.config();
  if (adam) ck.adam = *adam;
  return ck;
}

void check_compatible(const train::ModelConfig& stored, const train::ModelConfig& wanted) {
  std::string diff;
  auto cmp = [&](const char* name, auto a, auto b) {
    if (a != b) diff += std::string(diff.empty() ? "" : ", ") + name + " " + std::to_string(a) + " vs " + std::to_string(b);
  };
  cmp("sampled (M)", stored.sampled, wanted.sampled);
  cmp("siamese (K)", stored.active_siamese(), wanted.active_siamese());
  cmp("dim (D)", stored.dim, wanted.dim);
  cmp("video_dim", stored.video_dim, wanted.video_dim);
  cmp("query_dim", stored.query_dim, wanted.query_dim);
  cmp("rnn_layers", stored.rnn_layers, wanted.rnn_layers);
  cmp("reasoning", static_cast<int>(stored.reasoning), static_cast<int>(wanted.reasoning));
  if (!diff.empty()) throw ShapeError("checkpoint does not match the requested model: " + diff + " (stored vs requested)");
}

train::SsrnModel restore_model(const Checkpoint& ckpt) {
  auto model = train::SsrnModel::create(ckpt.config.model, ckpt.config.seed);
  auto& params = model.params();
  if (params.size() != ckpt.params.size())
    throw ShapeError("restore_model: checkpoint has " + std::to_string(ckpt.params.size()) +
                     " parameters, network expects " + std::to_string(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params.name(i) != ckpt.params.name(i))
      throw ShapeError("restore_model: parameter " + std::to_string(i) + " is '" + ckpt.params.name(i) +
                       "', network expects '" + params.name(i) + "'");
    if (!params.value(i).same_shape(ckpt.params.value(i)))
      throw ShapeError("restore_model: " + params.name(i) + " is " + ckpt.params.value(i).shape_string() +
                       ", network expects " + params.value(i).shape_string());
    params.value(i) = ckpt.params.value(i);
  }
  return model;
}

}  // namespace ssrn::io
