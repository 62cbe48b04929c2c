#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace ginibre::cli {

using Json = nlohmann::ordered_json;

enum class Format { json, csv };

struct Report {
  std::vector<std::string> command;
  Json inputs = Json::object();
  Json outputs = Json::object();
  Json rows = Json::array();
  std::optional<double> seconds;

  Json to_json() const;
  /// Table reports give one CSV row per entry of `rows`; otherwise one
  /// "field,value" row per output, with arrays flattened as field[i].
  std::string to_csv() const;
};

/// Writes to `path` through a temporary file and rename, or to `out` when
/// no path is given.
void emit(const Report& report, Format format, const std::optional<std::filesystem::path>& path,
          std::ostream& out);

}  // namespace ginibre::cli
