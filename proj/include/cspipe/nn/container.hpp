#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cspipe/nn/parameter.hpp"

namespace cspipe::nn {

// Versioned model file:
//   8 bytes   magic "CSPIPEM1"
//   8 bytes   header length, little-endian uint64
//   N bytes   JSON header {"format_version", "meta", "tensors": [{name, rows, cols, offset}]}
//   payload   float64 little-endian, each tensor column-major at its byte offset
struct Container {
  nlohmann::json meta;
  std::map<std::string, Mat> tensors;
};

inline constexpr int kContainerFormatVersion = 1;

// A parameter set stored under a name prefix, so one file can hold several
// models (tensor "prefix" + name).
struct NamedSet {
  std::string prefix;
  const ParameterSet* params;
};

void write_container(const std::string& path, const nlohmann::json& meta, const ParameterSet& params);
void write_container(const std::string& path, const nlohmann::json& meta, const std::vector<NamedSet>& sets);
std::string encode_container(const nlohmann::json& meta, const ParameterSet& params);
std::string encode_container(const nlohmann::json& meta, const std::vector<NamedSet>& sets);

// Throws DataError for a missing file, bad magic, unknown version, or a
// truncated payload.
Container read_container(const std::string& path);
Container decode_container(const std::string& bytes);

// Copies every stored tensor into the same-named parameter; throws DataError
// on a missing or extra tensor or a shape mismatch.
void assign(ParameterSet& params, const Container& c);
// Same, restricted to the tensors whose names start with `prefix`.
void assign(ParameterSet& params, const Container& c, const std::string& prefix);

}  // namespace cspipe::nn
