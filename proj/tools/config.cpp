#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "semrad/error.hpp"
#include "semrad/numfmt.hpp"

namespace semrad::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void check_key(const std::string& key, const std::string& where) {
  const auto dot = key.find('.');
  const bool ok = dot != std::string::npos && dot > 0 && dot + 1 < key.size() &&
                  key.find('.', dot + 1) == std::string::npos &&
                  std::all_of(key.begin(), key.end(), [](char c) {
                    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
                  });
  if (!ok) throw ConfigError(where + "malformed key '" + key + "', expected section.key");
}

bool parse_double(const std::string& s, double& v) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  return res.ec == std::errc() && res.ptr == t.data() + t.size() && std::isfinite(v);
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::string scalar_text(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_double(v.get<double>());
  throw ConfigError(key + ": expected a scalar value");
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(origin + ": " + e.what());
    }
    for (const auto& [section, body] : j.items()) {
      if (!body.is_object()) throw ConfigError(section + ": expected an object of keys");
      for (const auto& [name, v] : body.items()) {
        const std::string key = section + "." + name;
        check_key(key, origin + ": ");
        std::string value;
        if (v.is_array()) {
          for (std::size_t i = 0; i < v.size(); ++i)
            value += (i ? "," : "") + scalar_text(v[i], key);
        } else {
          value = scalar_text(v, key);
        }
        c.values_[key] = value;
      }
    }
    return c;
  }

  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string where = origin + ":" + std::to_string(number) + ": ";
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected section.key = value");
    const std::string key = trim(line.substr(0, eq));
    check_key(key, where);
    if (c.values_.count(key)) throw ConfigError(where + "duplicate key '" + key + "'");
    c.values_[key] = trim(line.substr(eq + 1));
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void Config::set_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + assignment + "': expected section.key=value");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::set(const std::string& key, const std::string& value) {
  check_key(key, "override: ");
  values_[key] = value;
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::optional<std::string> Config::raw(const std::string& key) {
  used_.insert(key);
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

void Config::record(const std::string& key, const std::string& value) { resolved_[key] = value; }

std::string Config::text(const std::string& key, const std::string& fallback) {
  const std::string v = raw(key).value_or(fallback);
  record(key, v);
  return v;
}

std::string Config::text(const std::string& key) {
  const auto v = raw(key);
  if (!v) throw ConfigError("missing required key '" + key + "'");
  record(key, *v);
  return *v;
}

std::string Config::choice(const std::string& key, const std::vector<std::string>& allowed,
                           const std::string& fallback) {
  const std::string v = fallback.empty() ? text(key) : text(key, fallback);
  if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    throw ConfigError(key + ": '" + v + "' is not one of " + list);
  }
  return v;
}

std::optional<double> Config::maybe_number(const std::string& key) {
  const auto v = raw(key);
  if (!v) return std::nullopt;
  double d = 0.0;
  if (!parse_double(*v, d)) throw ConfigError(key + ": expected a number, got '" + *v + "'");
  record(key, format_double(d));
  return d;
}

double Config::number(const std::string& key, double fallback) {
  const auto v = maybe_number(key);
  if (!v) record(key, format_double(fallback));
  return v.value_or(fallback);
}

double Config::number(const std::string& key) {
  const auto v = maybe_number(key);
  if (!v) throw ConfigError("missing required key '" + key + "'");
  return *v;
}

double Config::positive(const std::string& key, double fallback) {
  const double v = number(key, fallback);
  if (!(v > 0.0)) throw ConfigError(key + ": must be positive, got " + format_double(v));
  return v;
}

double Config::positive(const std::string& key) {
  const double v = number(key);
  if (!(v > 0.0)) throw ConfigError(key + ": must be positive, got " + format_double(v));
  return v;
}

int Config::integer(const std::string& key, int fallback) {
  const auto v = raw(key);
  if (!v) {
    record(key, std::to_string(fallback));
    return fallback;
  }
  const std::string t = trim(*v);
  int i = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), i);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ConfigError(key + ": expected an integer, got '" + *v + "'");
  record(key, std::to_string(i));
  return i;
}

bool Config::flag(const std::string& key, bool fallback) {
  const auto v = raw(key);
  bool b = fallback;
  if (v) {
    const std::string t = trim(*v);
    if (t == "true" || t == "on" || t == "yes" || t == "1")
      b = true;
    else if (t == "false" || t == "off" || t == "no" || t == "0")
      b = false;
    else
      throw ConfigError(key + ": expected true or false, got '" + *v + "'");
  }
  record(key, b ? "true" : "false");
  return b;
}

std::vector<double> Config::numbers(const std::string& key, const std::vector<double>& fallback) {
  const auto v = raw(key);
  std::vector<double> out = fallback;
  if (v) {
    out.clear();
    for (const auto& item : split(*v)) {
      double d = 0.0;
      if (!parse_double(item, d))
        throw ConfigError(key + ": expected a comma-separated list of numbers, got '" + *v + "'");
      out.push_back(d);
    }
    if (out.empty()) throw ConfigError(key + ": empty list");
  }
  std::string rec;
  for (std::size_t i = 0; i < out.size(); ++i) rec += (i ? "," : "") + format_double(out[i]);
  record(key, rec);
  return out;
}

std::vector<int> Config::integers(const std::string& key, const std::vector<int>& fallback) {
  const auto v = raw(key);
  std::vector<int> out = fallback;
  if (v) {
    out.clear();
    const auto bad = [&] {
      return ConfigError(key + ": expected integers or ranges like 1-8, got '" + *v + "'");
    };
    const auto to_int = [&](const std::string& s) {
      int i = 0;
      const auto res = std::from_chars(s.data(), s.data() + s.size(), i);
      if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) throw bad();
      return i;
    };
    for (const auto& item : split(*v)) {
      const auto dash = item.find('-', 1);
      if (dash == std::string::npos) {
        out.push_back(to_int(item));
        continue;
      }
      const int a = to_int(trim(item.substr(0, dash))), b = to_int(trim(item.substr(dash + 1)));
      if (b < a) throw bad();
      for (int i = a; i <= b; ++i) out.push_back(i);
    }
    if (out.empty()) throw bad();
  }
  std::string rec;
  for (std::size_t i = 0; i < out.size(); ++i) rec += (i ? "," : "") + std::to_string(out[i]);
  record(key, rec);
  return out;
}

void Config::finish(const std::string& command) const {
  for (const auto& [key, value] : values_)
    if (!used_.count(key))
      throw ConfigError("unknown key '" + key + "' for command " + command);
}

}  // namespace semrad::cli
