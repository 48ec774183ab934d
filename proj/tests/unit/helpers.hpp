#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>

#include <json.hpp>

#include "schemacalc/error.hpp"
#include "schemacalc/space.hpp"
#include "schemacalc/syntax.hpp"

namespace th {

using namespace schemacalc;

/// The code of the Error thrown by `f`, or nothing if it returned.
inline std::optional<ErrorCode> error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline SpaceSpec space(const std::string& label, SpaceRole role, std::size_t n) {
  std::vector<std::string> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(label + std::to_string(i));
  return SpaceSpec(label, role, pts);
}

inline const SpaceSpec S = space("S", SpaceRole::Sensor, 2);
inline const SpaceSpec O = space("O", SpaceRole::Observation, 2);
inline const SpaceSpec D = space("D", SpaceRole::Decision, 2);
inline const SpaceSpec E = space("E", SpaceRole::Effector, 2);

inline syntax::SchemaType type(syntax::SchemaKind kind, ProductSpace dom, ProductSpace cod) {
  return {kind, std::move(dom), std::move(cod)};
}

inline syntax::SchemaTerm atom(const std::string& id, syntax::SchemaKind kind, ProductSpace dom,
                               ProductSpace cod) {
  return syntax::make_atomic(id, type(kind, std::move(dom), std::move(cod)));
}

inline std::filesystem::path data_dir() { return SCHEMACALC_TEST_DATA; }

inline nlohmann::json load(const std::string& name) {
  std::ifstream in(data_dir() / name);
  return nlohmann::json::parse(in);
}

}  // namespace th
