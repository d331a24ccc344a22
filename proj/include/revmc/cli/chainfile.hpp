#pragma once

// Chain files: a JSON document
//
//   { "states":  ["a", "b", ...],          optional
//     "pi":      [p0, p1, ...],            or "weights" (normalized on load)
//     "P":       [[...], [...], ...],      optional for target-only files
//     "product": [s1, s2, ...] }           optional
//
// Every number may be a JSON number or a string holding a decimal or an
// exact ratio of integers such as "1/6", so matrices can be transcribed
// verbatim from rational displays.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "revmc/chain.hpp"

namespace revmc::cli {

/// Malformed input: unreadable file, invalid JSON, wrong shape or a bad
/// number. Maps to exit status 2.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses "3", "-0.25", "1e-3" or "4/6". The ratio form requires integer
/// numerator and denominator and rounds once.
double parse_number(std::string_view text);
double parse_number(const nlohmann::json& value, const std::string& where);
Vector parse_vector(const nlohmann::json& value, const std::string& where);
Matrix parse_matrix(const nlohmann::json& value, const std::string& where);

struct ChainFile {
  std::vector<std::string> states;
  Vector pi;
  bool pi_is_weights = false;
  std::optional<Matrix> p;
  std::optional<std::vector<std::size_t>> product;
  std::string source;
};

ChainFile parse_chain_file(const nlohmann::json& doc, const std::string& source);
ChainFile load_chain_file(const std::filesystem::path& path);
nlohmann::json load_json(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const ChainFile& file);
nlohmann::ordered_json to_json(const Matrix& m);

/// Validated views. These throw revmc::Error (exit status 3).
TargetDistribution target_of(const ChainFile& file);
TransitionMatrix chain_of(const ChainFile& file);

/// `--f` argument: "1,0,0", "[1, 0, 0]" or "@path" naming a JSON array or
/// whitespace/comma separated file.
Vector parse_functional_arg(const std::string& arg);

}  // namespace revmc::cli
