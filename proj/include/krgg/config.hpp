#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "krgg/experiments.hpp"

namespace krgg {

/// Malformed configuration; key() names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Sets one entry from its textual value. Lists are comma-separated.
void apply_setting(CampaignConfig& cfg, std::string_view key, std::string_view value);

/// Flat "key = value" lines ('#' starts a comment), or a flat JSON object.
CampaignConfig parse_config_text(std::string_view text);
CampaignConfig load_config_file(const std::filesystem::path& path);

/// Flat JSON object holding every resolved setting; read back by
/// config_from_json / parse_config_text.
nlohmann::ordered_json config_to_json(const CampaignConfig& cfg);
CampaignConfig config_from_json(const nlohmann::json& j);

}  // namespace krgg
