#include "ssrn/io/feature_file.hpp"

#include <fstream>
#include <iterator>
#include <limits>

#include "ssrn/io/binary.hpp"

namespace ssrn::io {

namespace bin {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to '" + path + "'");
}

}  // namespace bin

num::Matrix load_features(const std::string& path) {
  const std::string data = bin::read_file(path);
  bin::Reader r(data, path);
  if (data.size() < sizeof(kFeatureMagic))
    throw FormatError(path + ": file too short for magic");
  const auto magic = r.bytes(sizeof(kFeatureMagic));
  if (magic != std::string_view(kFeatureMagic, sizeof(kFeatureMagic)))
    throw FormatError(path + ": bad magic, expected \"SSRNFEAT\", found \"" + std::string(magic) + "\"");
  const auto version = r.uint<std::uint32_t>();
  if (version != kFeatureVersion)
    throw FormatError(path + ": unsupported feature version " + std::to_string(version) + ", expected " +
                      std::to_string(kFeatureVersion));
  const auto rows = r.uint<std::uint32_t>();
  const auto cols = r.uint<std::uint32_t>();
  const std::uint64_t payload = 4ULL * rows * cols;
  if (r.remaining() != payload)
    throw LengthError(path + ": payload is " + std::to_string(r.remaining()) + " bytes, header declares " +
                      std::to_string(rows) + "x" + std::to_string(cols) + " = " + std::to_string(payload));
  num::Matrix m(rows, cols);
  for (double& x : m.data()) x = static_cast<double>(r.f32());
  return m;
}

void save_features(const num::Matrix& m, const std::string& path) {
  if (m.rows() > std::numeric_limits<std::uint32_t>::max() || m.cols() > std::numeric_limits<std::uint32_t>::max())
    throw ShapeError("save_features: shape " + m.shape_string() + " exceeds u32");
  std::string out(kFeatureMagic, sizeof(kFeatureMagic));
  bin::put_uint(out, kFeatureVersion);
  bin::put_uint(out, static_cast<std::uint32_t>(m.rows()));
  bin::put_uint(out, static_cast<std::uint32_t>(m.cols()));
  out.reserve(out.size() + 4 * m.size());
  for (double x : m.data()) bin::put_f32(out, static_cast<float>(x));
  bin::write_file(path, out);
}

}  // namespace ssrn::io
