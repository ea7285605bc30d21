#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bna/engine.hpp"

namespace bna::config {

// Flat dotted-key -> value map, e.g. {"motility.D", "14"}. Later assignments
// win, so file values are applied first and overrides after.
using KvMap = std::map<std::string, std::string>;

// Parses `key = value` lines. Blank lines and lines starting with '#' are
// skipped; inline `  # comment` tails are stripped. Throws
// engine::ConfigInvalid on malformed lines.
KvMap parse_stream(std::istream& is, std::string_view origin = "<stream>");
KvMap parse_file(const std::string& path);

// Parses one `key=value` override (CLI form) into `kv`.
void apply_override(KvMap& kv, std::string_view assignment);

// All recognised keys with a one-line description, for --help and docs.
std::vector<std::pair<std::string, std::string>> known_keys();

// Applies every entry of `kv` onto `cfg`. Unknown keys and unparseable
// values throw engine::ConfigInvalid naming the offending key.
void apply(engine::SimConfig& cfg, const KvMap& kv);

// Convenience: defaults + optional file + overrides, validated.
engine::SimConfig build_sim_config(const std::string& file_path,
                                   const std::vector<std::string>& overrides);

}  // namespace bna::config
