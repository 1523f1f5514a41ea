#pragma once

// Pass/fail thresholds and schedule defaults, read from a JSON profile.

#include <fstream>
#include <string>

#include "iml/serialize.hpp"

#ifndef IML_DEFAULT_TOLERANCES
#define IML_DEFAULT_TOLERANCES "config/tolerances.json"
#endif

namespace iml {

class Tolerances {
 public:
  Tolerances() = default;
  explicit Tolerances(json doc) : doc_(std::move(doc)) {}

  static Tolerances load(const std::string& path = IML_DEFAULT_TOLERANCES) {
    std::ifstream in(path);
    if (!in) throw SerializationError("tolerances: cannot open '" + path + "'");
    try {
      return Tolerances(json::parse(in));
    } catch (const json::parse_error& e) {
      throw SerializationError("tolerances: malformed JSON in '" + path + "': " + e.what());
    }
  }

  /// Dotted lookup, e.g. get("prop1.closed_form").
  double get(const std::string& key) const { return node(key).get<double>(); }
  int get_int(const std::string& key) const { return node(key).get<int>(); }
  std::vector<double> get_list(const std::string& key) const { return node(key).get<std::vector<double>>(); }

  std::string profile() const { return doc_.value("profile", std::string("unnamed")); }
  const json& raw() const { return doc_; }

 private:
  const json& node(const std::string& key) const {
    const json* cur = &doc_;
    std::size_t pos = 0;
    while (true) {
      const auto dot = key.find('.', pos);
      const std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
      if (!cur->is_object() || !cur->contains(part))
        throw SerializationError("tolerances: missing key '" + key + "'");
      cur = &(*cur)[part];
      if (dot == std::string::npos) break;
      pos = dot + 1;
    }
    if (!cur->is_number() && !cur->is_array()) throw SerializationError("tolerances: key '" + key + "' is not numeric");
    return *cur;
  }

  json doc_;
};

}  // namespace iml
