#include "cspipe/nn/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cspipe/error.hpp"

namespace cspipe::nn {

namespace {

constexpr char kMagic[8] = {'C', 'S', 'P', 'I', 'P', 'E', 'M', '1'};

static_assert(std::endian::native == std::endian::little, "container I/O assumes a little-endian host");

void put_u64(std::string& out, std::uint64_t v) {
  char buf[8];
  std::memcpy(buf, &v, 8);
  out.append(buf, 8);
}

std::uint64_t get_u64(const std::string& in, std::size_t off) {
  std::uint64_t v;
  std::memcpy(&v, in.data() + off, 8);
  return v;
}

}  // namespace

std::string encode_container(const nlohmann::json& meta, const std::vector<NamedSet>& sets) {
  nlohmann::json header;
  header["format_version"] = kContainerFormatVersion;
  header["meta"] = meta;
  nlohmann::json tensors = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& set : sets) {
    for (const auto& p : *set.params) {
      tensors.push_back(
          {{"name", set.prefix + p->name}, {"rows", p->value.rows()}, {"cols", p->value.cols()}, {"offset", offset}});
      offset += static_cast<std::uint64_t>(p->value.size()) * 8;
    }
  }
  header["tensors"] = tensors;
  header["payload_bytes"] = offset;
  std::string h = header.dump();

  std::string out(kMagic, 8);
  put_u64(out, h.size());
  out += h;
  out.reserve(out.size() + offset);
  for (const auto& set : sets) {
    for (const auto& p : *set.params) {
      out.append(reinterpret_cast<const char*>(p->value.data()), static_cast<std::size_t>(p->value.size()) * 8);
    }
  }
  return out;
}

std::string encode_container(const nlohmann::json& meta, const ParameterSet& params) {
  return encode_container(meta, std::vector<NamedSet>{{"", &params}});
}

void write_container(const std::string& path, const nlohmann::json& meta, const std::vector<NamedSet>& sets) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << encode_container(meta, sets);
}

void write_container(const std::string& path, const nlohmann::json& meta, const ParameterSet& params) {
  write_container(path, meta, std::vector<NamedSet>{{"", &params}});
}

Container decode_container(const std::string& bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 8) != 0) throw DataError("not a model container");
  std::uint64_t hlen = get_u64(bytes, 8);
  if (16 + hlen > bytes.size()) throw DataError("truncated container header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(16, hlen));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad container header: ") + e.what());
  }
  if (header.value("format_version", 0) != kContainerFormatVersion) {
    throw DataError("unsupported container version " + header.value("format_version", nlohmann::json()).dump());
  }
  const std::size_t base = 16 + hlen;
  Container c;
  c.meta = header["meta"];
  for (const auto& t : header["tensors"]) {
    auto rows = t["rows"].get<Eigen::Index>();
    auto cols = t["cols"].get<Eigen::Index>();
    auto off = t["offset"].get<std::uint64_t>();
    std::size_t n = static_cast<std::size_t>(rows * cols) * 8;
    if (base + off + n > bytes.size()) throw DataError("truncated container payload");
    Mat m(rows, cols);
    std::memcpy(m.data(), bytes.data() + base + off, n);
    c.tensors.emplace(t["name"].get<std::string>(), std::move(m));
  }
  return c;
}

Container read_container(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return decode_container(ss.str());
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void assign(ParameterSet& params, const Container& c, const std::string& prefix) {
  std::size_t stored = 0;
  for (const auto& [name, m] : c.tensors) stored += name.compare(0, prefix.size(), prefix) == 0;
  if (stored != params.size()) {
    throw DataError("container holds " + std::to_string(stored) + " tensors" +
                    (prefix.empty() ? "" : " under '" + prefix + "'") + ", model expects " +
                    std::to_string(params.size()));
  }
  for (auto& p : params) {
    auto it = c.tensors.find(prefix + p->name);
    if (it == c.tensors.end()) throw DataError("container lacks tensor '" + prefix + p->name + "'");
    if (it->second.rows() != p->value.rows() || it->second.cols() != p->value.cols()) {
      throw DataError("shape mismatch for tensor '" + prefix + p->name + "'");
    }
    p->value = it->second;
  }
}

void assign(ParameterSet& params, const Container& c) { assign(params, c, ""); }

}  // namespace cspipe::nn
