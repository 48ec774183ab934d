#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "schemacalc/syntax.hpp"

/// Implemented schemas: a syntactic schema paired with a representation
/// language and a parameter tensor, plus the vertical operators acting on
/// the parameters.
namespace schemacalc::impl {

using syntax::SchemaTerm;
using syntax::SchemaType;

/// Shape a language assigns to a schema type. Stochastic layouts store one
/// probability row per domain configuration; the row spans the trailing
/// codomain dimensions.
struct ParamLayout {
  std::vector<std::size_t> dims;
  bool stochastic = false;
  std::size_t row_width = 1;

  friend bool operator==(const ParamLayout&, const ParamLayout&) = default;
};

/// Dense row-major tensor of reals.
struct ParamTensor {
  std::vector<std::size_t> shape;
  std::vector<double> values;

  ParamTensor() = default;
  ParamTensor(std::vector<std::size_t> shape, std::vector<double> values);

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  friend bool operator==(const ParamTensor&, const ParamTensor&) = default;
};

std::size_t element_count(const std::vector<std::size_t>& shape);

using ParamMap = std::function<ParamTensor(const ParamTensor&)>;

class ImplLanguage {
 public:
  using ShapeFn = std::function<ParamLayout(const SchemaType&)>;

  ImplLanguage(std::string name, ShapeFn shape_of);

  const std::string& name() const { return name_; }
  ParamLayout layout_of(const SchemaType& type) const { return shape_of_(type); }

 private:
  std::string name_;
  ShapeFn shape_of_;
};

/// Tables indexed by the domain factors. A codomain consisting of one real
/// grid gives a deterministic table (one real per domain point); any other
/// codomain gives stochastic rows over the codomain product.
ImplLanguage tabular_language();

/// Open set of representation languages, keyed by name. `builtin()` holds
/// "tabular" only.
class LanguageRegistry {
 public:
  static const LanguageRegistry& builtin();

  void add(ImplLanguage lang);
  const ImplLanguage& find(const std::string& name) const;
  bool contains(const std::string& name) const { return langs_.count(name) > 0; }

 private:
  std::map<std::string, ImplLanguage> langs_;
};

/// An object of the total category: (term, (language, parameters)).
struct ImplementedSchema {
  std::string id;
  SchemaTerm term;
  ImplLanguage lang;
  ParamTensor params;
  ParamLayout layout;

  /// True for deterministic tables (one real per domain point).
  bool deterministic() const { return !layout.stochastic; }
};

/// Checks the tensor against the language layout. Throws ShapeMismatch or
/// NonStochasticRow. An empty id defaults to the atomic id (or a digest of
/// the term key for composites).
ImplementedSchema implement(const SchemaTerm& term, const ImplLanguage& lang, ParamTensor params,
                            std::string id = {});

/// Vertical Update: same term and language, parameters replaced by u(θ).
ImplementedSchema update(const ImplementedSchema& s, const ParamMap& u);

/// Vertical Transform: same term, new language, translated parameters.
ImplementedSchema transform(const ImplementedSchema& s, const ImplLanguage& target,
                            const ParamMap& translate);

/// Finite point relabeling used to reindex instances. Missing keys map to
/// themselves, so the empty map is the identity.
struct PointMap {
  std::map<std::string, std::string> mapping;

  std::string apply(const std::string& point) const;
  /// (after ∘ before)(x) = after(before(x)).
  static PointMap compose(const PointMap& after, const PointMap& before);
};

struct ObjectRef {
  std::string term_key;
  std::string lang;
  std::vector<std::size_t> shape;

  friend bool operator==(const ObjectRef&, const ObjectRef&) = default;
};

ObjectRef object_ref(const ImplementedSchema& s);

/// A morphism (f, (ℓ_f, f_Θ)) between implemented schemas. The point maps
/// run contravariantly (target points to source points) and drive the
/// reindexing of stored instances.
struct ImplMorphism {
  ObjectRef src;
  ObjectRef dst;
  /// Syntactic component; "id" marks a vertical morphism.
  std::string syn = "id";
  std::string lang_from;
  std::string lang_to;
  ParamMap param_map;
  PointMap pull_dom;
  PointMap pull_cod;

  bool vertical() const { return syn == "id"; }
};

ImplMorphism identity_morphism(const ImplementedSchema& s);
/// The morphism of `update(s, u)`.
ImplMorphism update_morphism(const ImplementedSchema& s, ParamMap u);

/// Componentwise composite g ∘ f. Throws DomainMismatch if f.dst != g.src.
ImplMorphism compose_morphisms(const ImplMorphism& g, const ImplMorphism& f);

nlohmann::json to_json(const ImplementedSchema& s);
ImplementedSchema implemented_from_json(const nlohmann::json& j,
                                        const LanguageRegistry& langs = LanguageRegistry::builtin());

}  // namespace schemacalc::impl
