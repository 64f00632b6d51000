#include "cspipe/pipeline/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <filesystem>
#include <utility>

#include "cspipe/error.hpp"
#include "cspipe/util/io.hpp"
#include "cspipe/util/text.hpp"

namespace cspipe::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<std::pair<const char*, std::string Paths::*>, 11> kPathFields = {{
    {"emb_en", &Paths::emb_en},
    {"emb_hi", &Paths::emb_hi},
    {"projection", &Paths::projection},
    {"lexicon", &Paths::lexicon},
    {"dictionary", &Paths::dictionary},
    {"lm_en", &Paths::lm_en},
    {"lm_hi", &Paths::lm_hi},
    {"langid", &Paths::langid},
    {"norm_en", &Paths::norm_en},
    {"norm_hi", &Paths::norm_hi},
    {"parser", &Paths::parser},
}};

bool parse_bool(std::string_view key, std::string_view v) {
  std::string s = text::lower(v);
  if (s == "1" || s == "true" || s == "on" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "off" || s == "no") return false;
  throw ArgumentError(std::string(key) + ": expected on/off, got '" + std::string(v) + "'");
}

int parse_int(std::string_view key, std::string_view v) {
  try {
    std::size_t used = 0;
    int x = std::stoi(std::string(v), &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw ArgumentError(std::string(key) + ": expected an integer, got '" + std::string(v) + "'");
}

}  // namespace

std::string_view to_string(DecodeMode m) {
  switch (m) {
    case DecodeMode::first_best:
      return "first-best";
    case DecodeMode::fragment:
      return "fragment";
    case DecodeMode::three_step:
      return "3-step";
  }
  return "?";
}

std::string_view to_string(ParseMode m) { return m == ParseMode::stackprop ? "stackprop" : "pipeline"; }

DecodeMode parse_decode_mode(std::string_view s) {
  for (DecodeMode m : {DecodeMode::first_best, DecodeMode::fragment, DecodeMode::three_step}) {
    if (s == to_string(m)) return m;
  }
  throw ArgumentError("decode mode must be first-best, fragment or 3-step, got '" + std::string(s) + "'");
}

ParseMode parse_parse_mode(std::string_view s) {
  for (ParseMode m : {ParseMode::stackprop, ParseMode::pipeline}) {
    if (s == to_string(m)) return m;
  }
  throw ArgumentError("parse mode must be stackprop or pipeline, got '" + std::string(s) + "'");
}

PipelineConfig PipelineConfig::from_json(const json& j, const std::string& base_dir) {
  if (!j.is_object()) throw DataError("config must be a JSON object");
  if (!j.contains("schema_version") || j.at("schema_version") != kSchemaVersion) {
    throw DataError("config schema_version must be " + std::to_string(kSchemaVersion));
  }
  PipelineConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "schema_version") continue;
      if (key == "paths") {
        for (const auto& [name, p] : value.items()) {
          auto it = std::find_if(kPathFields.begin(), kPathFields.end(),
                                 [&](const auto& f) { return name == f.first; });
          if (it == kPathFields.end()) throw DataError("unknown path key '" + name + "'");
          std::string path = p.get<std::string>();
          if (!path.empty() && fs::path(path).is_relative() && !base_dir.empty()) {
            path = (fs::path(base_dir) / path).lexically_normal().string();
          }
          c.paths.*(it->second) = path;
        }
      } else if (key == "beam") {
        c.beam = value.get<int>();
      } else if (key == "crosslingual") {
        c.crosslingual = value.get<bool>();
      } else if (key == "langid_crosslingual") {
        c.langid_crosslingual = value.get<bool>();
      } else if (key == "decode_mode") {
        c.decode_mode = parse_decode_mode(value.get<std::string>());
      } else if (key == "parse_mode") {
        c.parse_mode = parse_parse_mode(value.get<std::string>());
      } else if (key == "stacking") {
        c.stacking = value.get<bool>();
      } else if (key == "workers") {
        c.workers = value.get<int>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else {
        throw DataError("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("bad config value: ") + e.what());
  } catch (const ArgumentError& e) {
    throw DataError(e.what());
  }
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  json j;
  try {
    j = json::parse(io::read_text(path));
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  try {
    return from_json(j, fs::path(path).parent_path().string());
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

json PipelineConfig::to_json() const {
  json p = json::object();
  for (const auto& [name, field] : kPathFields) {
    if (!(paths.*field).empty()) p[name] = paths.*field;
  }
  return {{"schema_version", kSchemaVersion},
          {"paths", p},
          {"beam", beam},
          {"crosslingual", crosslingual},
          {"langid_crosslingual", langid_crosslingual},
          {"decode_mode", std::string(to_string(decode_mode))},
          {"parse_mode", std::string(to_string(parse_mode))},
          {"stacking", stacking},
          {"workers", workers},
          {"seed", seed}};
}

void PipelineConfig::save(const std::string& path) const { io::write_text(path, to_json().dump(2) + "\n"); }

void PipelineConfig::apply_env(const std::function<const char*(const char*)>& getenv) {
  auto get = [&](const std::string& key) -> const char* { return getenv(("CSPIPE_" + key).c_str()); };
  for (const auto& [name, field] : kPathFields) {
    std::string key = name;
    for (auto& ch : key) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (const char* v = get(key)) paths.*field = v;
  }
  if (const char* v = get("BEAM")) beam = parse_int("CSPIPE_BEAM", v);
  if (const char* v = get("CROSSLINGUAL")) crosslingual = parse_bool("CSPIPE_CROSSLINGUAL", v);
  if (const char* v = get("LANGID_CROSSLINGUAL")) {
    langid_crosslingual = parse_bool("CSPIPE_LANGID_CROSSLINGUAL", v);
  }
  if (const char* v = get("DECODE_MODE")) decode_mode = parse_decode_mode(v);
  if (const char* v = get("PARSE_MODE")) parse_mode = parse_parse_mode(v);
  if (const char* v = get("STACKING")) stacking = parse_bool("CSPIPE_STACKING", v);
  if (const char* v = get("WORKERS")) workers = parse_int("CSPIPE_WORKERS", v);
  if (const char* v = get("SEED")) seed = static_cast<std::uint64_t>(parse_int("CSPIPE_SEED", v));
}

void PipelineConfig::validate() const {
  if (beam < 1) throw ArgumentError("beam width must be at least 1, got " + std::to_string(beam));
  if (workers < 1) throw ArgumentError("workers must be at least 1, got " + std::to_string(workers));
}

}  // namespace cspipe::pipeline
