#include "gsimg/cloud_io.hpp"

#include <bit>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace gsimg {

namespace {

constexpr std::uint8_t kMagic[4] = {'G', 'S', 'C', 'L'};
constexpr std::uint8_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 24;
constexpr std::size_t kDoublesPerPrimitive = 9;

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[at + i]) << (8 * i);
  return v;
}

}  // namespace

std::vector<std::uint8_t> serialize_cloud(const GaussianCloud& cloud) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.push_back(kVersion);
  out.push_back(static_cast<std::uint8_t>(cloud.variant()));
  out.push_back(0);
  out.push_back(0);
  put_u64(out, cloud.max_budget());
  put_u64(out, cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Primitive p = cloud.primitive(i);
    const double values[kDoublesPerPrimitive] = {
        p.position.x, p.position.y, p.covariance[0], p.covariance[1], p.covariance[2],
        p.color[0],   p.color[1],   p.color[2],      p.filter_variance};
    for (double v : values) put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

GaussianCloud deserialize_cloud(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw std::runtime_error("not a native cloud dump");
  }
  if (bytes[4] != kVersion) throw std::runtime_error("unsupported cloud dump version");
  if (bytes[5] > static_cast<std::uint8_t>(CovarianceVariant::RotScale)) {
    throw std::runtime_error("unknown covariance variant in cloud dump");
  }
  const auto variant = static_cast<CovarianceVariant>(bytes[5]);
  const std::uint64_t budget = get_u64(bytes, 8);
  const std::uint64_t count = get_u64(bytes, 16);
  if (count > budget || (bytes.size() - kHeaderBytes) / (8 * kDoublesPerPrimitive) < count ||
      bytes.size() != kHeaderBytes + count * 8 * kDoublesPerPrimitive) {
    throw std::runtime_error("cloud dump size does not match its header");
  }
  GaussianCloud cloud(variant, budget);
  std::size_t at = kHeaderBytes;
  auto next = [&] {
    const double v = std::bit_cast<double>(get_u64(bytes, at));
    at += 8;
    return v;
  };
  for (std::uint64_t i = 0; i < count; ++i) {
    Primitive p;
    p.position.x = next();
    p.position.y = next();
    for (double& c : p.covariance) c = next();
    for (double& c : p.color) c = next();
    p.filter_variance = next();
    cloud.append(p);
  }
  return cloud;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileIoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileIoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FileIoError("write failed: " + path.string());
}

void save_cloud(const std::filesystem::path& path, const GaussianCloud& cloud) {
  write_file(path, serialize_cloud(cloud));
}

GaussianCloud load_cloud(const std::filesystem::path& path) {
  return deserialize_cloud(read_file(path));
}

}  // namespace gsimg
