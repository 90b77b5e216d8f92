#pragma once

#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "linflow/error.hpp"
#include "linflow/jordan.hpp"

namespace linflow {

using json = nlohmann::json;

namespace detail {

// nlohmann keeps the last of duplicated keys silently; reject them instead.
inline json parse_strict(const std::string& text) {
  std::vector<std::set<std::string>> keys;
  std::vector<bool> is_object;
  std::string dup;
  auto cb = [&](int, json::parse_event_t ev, json& parsed) {
    switch (ev) {
      case json::parse_event_t::object_start:
        is_object.push_back(true);
        keys.emplace_back();
        break;
      case json::parse_event_t::array_start:
        is_object.push_back(false);
        keys.emplace_back();
        break;
      case json::parse_event_t::object_end:
      case json::parse_event_t::array_end:
        is_object.pop_back();
        keys.pop_back();
        break;
      case json::parse_event_t::key: {
        auto k = parsed.get<std::string>();
        if (!keys.back().insert(k).second && dup.empty()) dup = k;
        break;
      }
      default:
        break;
    }
    return true;
  };
  json j;
  try {
    j = json::parse(text, cb);
  } catch (const json::parse_error& e) {
    // e.what() already carries "at line L, column C".
    throw ParseError("", std::string("syntax error: ") + e.what());
  }
  if (!dup.empty()) throw ParseError(dup, "duplicate field");
  return j;
}

inline Rational rational_field(const json& v, const std::string& where) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_string()) {
    try {
      return Rational::parse(v.get<std::string>());
    } catch (const std::exception& e) {
      throw ParseError(where, e.what());
    }
  }
  throw ParseError(where, "malformed rational (expected \"p/q\" string or integer)");
}

inline void only_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ParseError(where + it.key(), "unknown field");
  }
}

inline std::vector<ComplexBlock> raw_blocks(const json& j) {
  if (!j.is_object()) throw ParseError("", "spec document must be a JSON object");
  only_keys(j, {"blocks"}, "");
  if (!j.contains("blocks") || !j["blocks"].is_array()) throw ParseError("blocks", "missing or not an array");
  std::vector<ComplexBlock> out;
  const auto& arr = j["blocks"];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    std::string w = "blocks[" + std::to_string(i) + "]";
    const auto& b = arr[i];
    if (!b.is_object()) throw ParseError(w, "block must be an object");
    only_keys(b, {"m", "re", "im"}, w + ".");
    if (!b.contains("m")) throw ParseError(w + ".m", "missing");
    if (!b["m"].is_number_integer()) throw ParseError(w + ".m", "block size must be an integer");
    long long m = b["m"].get<long long>();
    if (m < 0) throw ParseError(w + ".m", "negative block size");
    if (m == 0) throw ParseError(w + ".m", "block size must be positive");
    if (m > 4096) throw ParseError(w + ".m", "block size too large");
    if (!b.contains("re")) throw ParseError(w + ".re", "missing");
    ComplexBlock cb{static_cast<int>(m), rational_field(b["re"], w + ".re"),
                    b.contains("im") ? rational_field(b["im"], w + ".im") : Rational(0)};
    out.push_back(cb);
  }
  if (out.empty()) throw ParseError("blocks", "spec must contain at least one block");
  return out;
}

}  // namespace detail

inline GeneratorSpec spec_from_json(const json& j) {
  std::vector<JordanBlock> blocks;
  for (const auto& c : detail::raw_blocks(j)) blocks.emplace_back(c.m, c.re, c.im);
  return GeneratorSpec(std::move(blocks));
}

inline GeneratorSpec parse_spec(const std::string& text) { return spec_from_json(detail::parse_strict(text)); }

// Same document format, but read as complex Jordan blocks (sign of im kept).
inline std::vector<ComplexBlock> parse_complex_spec(const std::string& text) {
  return detail::raw_blocks(detail::parse_strict(text));
}

inline json spec_to_json(const GeneratorSpec& s) {
  json arr = json::array();
  for (const auto& b : s.blocks()) arr.push_back({{"m", b.m}, {"re", b.re.str()}, {"im", b.im.str()}});
  return json{{"blocks", arr}};
}

inline std::string serialize_spec(const GeneratorSpec& s) { return spec_to_json(s).dump(); }

inline std::ostream& operator<<(std::ostream& os, const GeneratorSpec& s) { return os << serialize_spec(s); }

inline RationalMatrix matrix_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("", "matrix document must be a JSON object");
  detail::only_keys(j, {"dim", "rows"}, "");
  if (!j.contains("dim") || !j["dim"].is_number_integer()) throw ParseError("dim", "missing or not an integer");
  long long d = j["dim"].get<long long>();
  if (d < 1 || d > 512) throw ParseError("dim", "dimension out of range");
  if (!j.contains("rows") || !j["rows"].is_array()) throw ParseError("rows", "missing or not an array");
  const auto& rows = j["rows"];
  if (static_cast<long long>(rows.size()) != d) throw ParseError("rows", "expected " + std::to_string(d) + " rows");
  RationalMatrix M(static_cast<int>(d));
  for (int i = 0; i < d; ++i) {
    std::string w = "rows[" + std::to_string(i) + "]";
    if (!rows[i].is_array() || static_cast<long long>(rows[i].size()) != d)
      throw ParseError(w, "expected " + std::to_string(d) + " entries");
    for (int k = 0; k < d; ++k) M(i, k) = detail::rational_field(rows[i][k], w + "[" + std::to_string(k) + "]");
  }
  return M;
}

inline RationalMatrix parse_matrix(const std::string& text) { return matrix_from_json(detail::parse_strict(text)); }

inline json matrix_to_json(const RationalMatrix& M) {
  json rows = json::array();
  for (int i = 0; i < M.dim(); ++i) {
    json r = json::array();
    for (int k = 0; k < M.dim(); ++k) r.push_back(M(i, k).str());
    rows.push_back(r);
  }
  return json{{"dim", M.dim()}, {"rows", rows}};
}

}  // namespace linflow
