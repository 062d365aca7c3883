#include "arm/util/config.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

#include "arm/errors.hpp"

namespace arm::util {

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Config parse_config(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, cfg);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  return cfg;
}

std::string format_config(const Config& cfg) {
  std::ostringstream out;
  boost::property_tree::ini_parser::write_ini(out, cfg);
  return out.str();
}

void save_config(const std::filesystem::path& path, const Config& cfg) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write config " + path.string());
  out << format_config(cfg);
}

geometry::Vec3 parse_vec3(const std::string& text) {
  std::istringstream in(text);
  geometry::Vec3 v;
  if (!(in >> v.x() >> v.y() >> v.z())) throw FormatError("expected three numbers, got '" + text + "'");
  return v;
}

std::string format_vec3(const geometry::Vec3& v) {
  std::ostringstream out;
  out << std::setprecision(17) << v.x() << ' ' << v.y() << ' ' << v.z();
  return out.str();
}

bool parse_bool(const std::string& text) {
  if (text == "on" || text == "true" || text == "1" || text == "yes") return true;
  if (text == "off" || text == "false" || text == "0" || text == "no") return false;
  throw FormatError("expected on/off, got '" + text + "'");
}

}  // namespace arm::util
