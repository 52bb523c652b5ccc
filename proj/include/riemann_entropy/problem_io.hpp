#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "riemann_entropy/errors.hpp"
#include "riemann_entropy/model.hpp"

// Problem files are JSON objects {"u": [...], "v": [...], "a": [...]} with
// lengths n+1, n, n.  Parse failures name the offending field.

namespace riemann_entropy {

inline PiecewiseProblem problem_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("problem: top level must be a JSON object");
  auto read_field = [&](const char* name) -> std::vector<double> {
    if (!j.contains(name)) {
      throw ParseError(std::string("problem: missing field \"") + name + "\"");
    }
    const nlohmann::json& arr = j.at(name);
    if (!arr.is_array()) {
      throw ParseError(std::string("problem: field \"") + name + "\" must be an array");
    }
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& x : arr) {
      if (!x.is_number()) {
        throw ParseError(std::string("problem: field \"") + name +
                         "\" must contain only numbers");
      }
      out.push_back(x.get<double>());
    }
    return out;
  };
  PiecewiseProblem p;
  p.u = read_field("u");
  p.v = read_field("v");
  p.a = read_field("a");
  return p;
}

inline PiecewiseProblem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("problem: cannot open file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("problem: invalid JSON in " + path + ": " + e.what());
  }
  return problem_from_json(j);
}

}  // namespace riemann_entropy
