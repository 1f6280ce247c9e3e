#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace YAML {
class Node;
}

namespace qdt {

using json = nlohmann::json;

/// Converts a parsed YAML tree into JSON. Scalars become numbers or booleans
/// when they parse as such, strings otherwise.
json yaml_to_json(const YAML::Node& node);

/// Emits JSON as block-style YAML.
std::string json_to_yaml(const json& value);

json load_yaml_file(const std::filesystem::path& path);
json load_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// 64-bit FNV-1a; used for stable content hashes written to disk.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

/// SplitMix64 finalizer; derives independent child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace qdt
