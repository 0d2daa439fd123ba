#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "instance.hpp"
#include "rational.hpp"

namespace liekit {

/// FNV-1a over the raw input bytes; reports carry it so identical inputs are
/// recognizably identical without shipping the input back.
inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static const char* hex = "0123456789abcdef";
  std::string out = "fnv1a:";
  for (int i = 60; i >= 0; i -= 4) out.push_back(hex[(h >> i) & 0xf]);
  return out;
}

inline Json rats_json(const std::vector<Rat>& v) {
  Json a = Json::array();
  for (const Rat& x : v) a.push_back(rat_str(x));
  return a;
}

inline Json report_head(const std::string& command, const std::string& instance_name,
                        const std::string& input_bytes) {
  Json r = Json::object();
  r["format"] = "liekit-report";
  r["version"] = 1;
  r["rationals-as-strings"] = true;
  r["command"] = command;
  r["instance"] = instance_name;
  r["input-digest"] = fnv1a_hex(input_bytes);
  return r;
}

/// Failure payload for nonzero exits; the same object goes to the report
/// stream so scripted callers never have to scrape prose.
inline Json error_json(const std::string& command, const std::string& kind,
                       const std::string& what) {
  Json r = Json::object();
  r["format"] = "liekit-report";
  r["version"] = 1;
  r["rationals-as-strings"] = true;
  r["command"] = command;
  r["error"] = Json::object();
  r["error"]["kind"] = kind;
  r["error"]["what"] = what;
  return r;
}

/// Line-oriented text rendering with two-space indent per depth level.
struct TextDoc {
  std::string s;

  void line(int depth, const std::string& text) {
    s.append(size_t(depth) * 2, ' ');
    s += text;
    s += '\n';
  }

  void kv(int depth, const std::string& key, const std::string& value) {
    line(depth, key + ": " + value);
  }
};

inline std::string rats_text(const std::vector<Rat>& v) {
  std::string out = "[";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += rat_str(v[i]);
  }
  out += "]";
  return out;
}

/// Render a coordinate vector against labels, keeping only nonzero terms.
inline std::string combo_text(const std::vector<Rat>& v, const std::vector<std::string>& labels) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    if (!out.empty()) out += " + ";
    std::string name = i < labels.size() ? labels[i] : "e" + std::to_string(i);
    if (v[i] == 1)
      out += name;
    else
      out += rat_str(v[i]) + "*" + name;
  }
  return out.empty() ? "0" : out;
}

}  // namespace liekit
