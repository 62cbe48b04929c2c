#include "report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>
#include <system_error>

#include "ginibre/version.hpp"
#include "spec.hpp"

namespace ginibre::cli {

namespace {

std::string cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    return quoted + "\"";
  }
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_structured()) return cell(Json(v.dump()));
  return v.dump();
}

void flatten(const std::string& key, const Json& v, std::ostream& out) {
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) flatten(key + "[" + std::to_string(i) + "]", v[i], out);
  } else if (v.is_object()) {
    for (const auto& [k, x] : v.items()) flatten(key + "." + k, x, out);
  } else {
    out << cell(Json(key)) << ',' << cell(v) << '\n';
  }
}

}  // namespace

Json Report::to_json() const {
  Json j;
  j["command"] = command;
  j["version"] = kVersion;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  if (!rows.empty()) j["rows"] = rows;
  if (seconds) j["timing"] = {{"seconds", *seconds}};
  return j;
}

std::string Report::to_csv() const {
  std::ostringstream out;
  if (!rows.empty()) {
    std::vector<std::string> keys;
    for (const auto& row : rows) {
      for (const auto& [k, v] : row.items()) {
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
      }
    }
    for (std::size_t i = 0; i < keys.size(); ++i) out << (i ? "," : "") << cell(Json(keys[i]));
    out << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < keys.size(); ++i) {
        out << (i ? "," : "");
        if (row.contains(keys[i])) out << cell(row[keys[i]]);
      }
      out << '\n';
    }
    return out.str();
  }
  out << "field,value\n";
  for (const auto& [k, v] : outputs.items()) flatten(k, v, out);
  return out.str();
}

void emit(const Report& report, Format format, const std::optional<std::filesystem::path>& path,
          std::ostream& out) {
  const std::string text = format == Format::json ? report.to_json().dump(2) + "\n" : report.to_csv();
  if (!path) {
    out << text;
    return;
  }
  std::random_device rd;
  auto tmp = *path;
  tmp += ".tmp" + std::to_string(rd());
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) throw UsageError("cannot open output file " + tmp.string());
    file << text;
    file.flush();
    if (!file) throw UsageError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, *path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw UsageError("cannot move output into place: " + ec.message());
  }
}

}  // namespace ginibre::cli
