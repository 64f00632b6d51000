#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace cspipe::pipeline {

enum class DecodeMode { first_best, fragment, three_step };
enum class ParseMode { stackprop, pipeline };

std::string_view to_string(DecodeMode m);
std::string_view to_string(ParseMode m);
// Throw ArgumentError listing the accepted spellings.
DecodeMode parse_decode_mode(std::string_view s);
ParseMode parse_parse_mode(std::string_view s);

// File locations; an empty path means "not configured".
struct Paths {
  std::string emb_en;
  std::string emb_hi;
  std::string projection;  // hi -> en; learned from the lexicon when empty
  std::string lexicon;
  std::string dictionary;
  std::string lm_en;
  std::string lm_hi;
  std::string langid;
  std::string norm_en;
  std::string norm_hi;
  std::string parser;
};

struct PipelineConfig {
  static constexpr int kSchemaVersion = 1;

  Paths paths;
  int beam = 5;
  bool crosslingual = true;
  // Language identification reads projected Hindi vectors instead of raw ones.
  bool langid_crosslingual = false;
  DecodeMode decode_mode = DecodeMode::three_step;
  ParseMode parse_mode = ParseMode::stackprop;
  bool stacking = false;
  int workers = 1;
  std::uint64_t seed = 1;

  // Relative paths resolve against `base_dir`. Unknown keys and a missing or
  // different schema_version throw DataError.
  static PipelineConfig from_json(const nlohmann::json& j, const std::string& base_dir = "");
  // Paths relative to the file's directory.
  static PipelineConfig load(const std::string& path);
  nlohmann::json to_json() const;
  void save(const std::string& path) const;

  // CSPIPE_<KEY> overrides, e.g. CSPIPE_BEAM=3, CSPIPE_DECODE_MODE=fragment,
  // CSPIPE_PARSER=/models/p.bin. Path values are taken as given.
  void apply_env(const std::function<const char*(const char*)>& getenv);

  // Throws ArgumentError for b < 1 or workers < 1.
  void validate() const;
};

}  // namespace cspipe::pipeline
