#include "revmc/cli/chainfile.hpp"

#include <fstream>
#include <sstream>

#include "revmc/error.hpp"

namespace revmc::cli {

using nlohmann::json;

double parse_number(const json& value, const std::string& where) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    try {
      return parse_number(value.get<std::string>());
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  throw ParseError(where + ": expected a number or a numeric string");
}

Vector parse_vector(const json& value, const std::string& where) {
  if (!value.is_array()) throw ParseError(where + ": expected an array");
  Vector out;
  out.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i)
    out.push_back(parse_number(value[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Matrix parse_matrix(const json& value, const std::string& where) {
  if (!value.is_array() || value.empty()) throw ParseError(where + ": expected a non-empty array of rows");
  const std::size_t rows = value.size();
  Matrix m;
  for (std::size_t i = 0; i < rows; ++i) {
    const Vector r = parse_vector(value[i], where + "[" + std::to_string(i) + "]");
    if (i == 0) m = Matrix(rows, r.size());
    if (r.size() != m.cols())
      throw ParseError(where + "[" + std::to_string(i) + "]: row has " + std::to_string(r.size()) +
                       " entries, expected " + std::to_string(m.cols()));
    std::copy(r.begin(), r.end(), m.row(i).begin());
  }
  return m;
}

ChainFile parse_chain_file(const json& doc, const std::string& source) {
  if (!doc.is_object()) throw ParseError(source + ": top level must be an object");
  ChainFile f;
  f.source = source;
  if (doc.contains("states")) {
    if (!doc["states"].is_array()) throw ParseError(source + ": states must be an array of strings");
    for (const auto& s : doc["states"]) {
      if (!s.is_string()) throw ParseError(source + ": states must be an array of strings");
      f.states.push_back(s.get<std::string>());
    }
  }
  if (doc.contains("pi") == doc.contains("weights"))
    throw ParseError(source + ": exactly one of 'pi' or 'weights' is required");
  f.pi_is_weights = doc.contains("weights");
  f.pi = parse_vector(f.pi_is_weights ? doc["weights"] : doc["pi"], source + ": " + (f.pi_is_weights ? "weights" : "pi"));
  if (doc.contains("P")) f.p = parse_matrix(doc["P"], source + ": P");
  if (doc.contains("product")) {
    const auto& pr = doc["product"];
    if (!pr.is_array()) throw ParseError(source + ": product must be an array of sizes");
    std::vector<std::size_t> sizes;
    for (const auto& s : pr) {
      if (!s.is_number_unsigned() || s.get<std::size_t>() == 0)
        throw ParseError(source + ": product sizes must be positive integers");
      sizes.push_back(s.get<std::size_t>());
    }
    f.product = std::move(sizes);
  }
  return f;
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

ChainFile load_chain_file(const std::filesystem::path& path) {
  return parse_chain_file(load_json(path), path.string());
}

nlohmann::ordered_json to_json(const Matrix& m) {
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < m.rows(); ++i)
    rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
  return rows;
}

nlohmann::ordered_json to_json(const ChainFile& file) {
  auto doc = nlohmann::ordered_json::object();
  if (!file.states.empty()) doc["states"] = file.states;
  doc[file.pi_is_weights ? "weights" : "pi"] = file.pi;
  if (file.p) doc["P"] = to_json(*file.p);
  if (file.product) doc["product"] = *file.product;
  return doc;
}

TargetDistribution target_of(const ChainFile& file) {
  return TargetDistribution(file.pi, file.pi_is_weights, file.states);
}

TransitionMatrix chain_of(const ChainFile& file) {
  if (!file.p) throw ParseError(file.source + ": missing transition matrix 'P'");
  if (file.p->rows() != file.pi.size())
    throw Error(ErrorCode::DimensionMismatch, file.source + ": P is " + std::to_string(file.p->rows()) +
                                                  "x" + std::to_string(file.p->cols()) + " but pi has " +
                                                  std::to_string(file.pi.size()) + " entries");
  try {
    return TransitionMatrix(*file.p);
  } catch (const Error& e) {
    throw Error(e.code(), file.source + ": P " + e.detail());
  }
}

Vector parse_functional_arg(const std::string& arg) {
  if (arg.empty()) throw ParseError("--f: empty functional");
  if (arg.front() == '@') {
    const std::filesystem::path path = arg.substr(1);
    std::ifstream in(path);
    if (!in) throw ParseError("--f: cannot open '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_functional_arg(ss.str());
  }
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && arg[first] == '[') {
    try {
      return parse_vector(json::parse(arg), "--f");
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("--f: ") + e.what());
    }
  }
  Vector out;
  std::string token;
  bool after_comma = false;
  auto flush = [&] {
    if (!token.empty()) out.push_back(parse_number(token));
    token.clear();
  };
  for (char c : arg) {
    if (c == ',') {
      if (token.empty() && (after_comma || out.empty())) throw ParseError("--f: empty entry in '" + arg + "'");
      flush();
      after_comma = true;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      if (token.empty()) after_comma = false;
      token.push_back(c);
    }
  }
  if (after_comma && token.empty()) throw ParseError("--f: trailing comma in '" + arg + "'");
  flush();
  if (out.empty()) throw ParseError("--f: no values");
  return out;
}

}  // namespace revmc::cli
