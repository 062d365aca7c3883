#pragma once

// Human-readable key = value files (INI syntax, no sections needed).

#include <filesystem>
#include <string>

#include <boost/property_tree/ptree.hpp>

#include "arm/geometry/pose.hpp"

namespace arm::util {

using Config = boost::property_tree::ptree;

Config load_config(const std::filesystem::path& path);
Config parse_config(const std::string& text);
std::string format_config(const Config& cfg);
void save_config(const std::filesystem::path& path, const Config& cfg);

/// "x y z" triples.
geometry::Vec3 parse_vec3(const std::string& text);
std::string format_vec3(const geometry::Vec3& v);

/// Accepts on/off, true/false, 1/0, yes/no.
bool parse_bool(const std::string& text);

}  // namespace arm::util
