#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "schemacalc/impl.hpp"
#include "schemacalc/semantics.hpp"
#include "schemacalc/workflow.hpp"

/// Mind states: the implemented schemas an agent holds, its memory
/// subsystems and its cognitive modules.
namespace schemacalc::mind {

using impl::ImplementedSchema;
using impl::ImplMorphism;
using sem::EvaluatedInstance;

/// Stored evaluated instances, grouped by the id of the schema that
/// produced them. Insertion order is kept.
class MemorySubsystem {
 public:
  explicit MemorySubsystem(std::string name);

  const std::string& name() const { return name_; }
  const std::map<std::string, std::vector<EvaluatedInstance>>& data() const { return data_; }
  /// Instances stored for one schema; empty if none.
  const std::vector<EvaluatedInstance>& instances(const std::string& schema_id) const;

  /// Operation names this subsystem understands.
  static const std::vector<std::string>& operations();

  friend bool operator==(const MemorySubsystem&, const MemorySubsystem&) = default;

 private:
  friend MemorySubsystem mem_store(const MemorySubsystem&, const std::string&, EvaluatedInstance);
  friend MemorySubsystem mem_forget(const MemorySubsystem&, const std::set<std::string>&);
  friend MemorySubsystem mem_reindex(const MemorySubsystem&, const ImplMorphism&,
                                     const std::string&, const std::string&);
  std::string name_;
  std::map<std::string, std::vector<EvaluatedInstance>> data_;
};

/// Appends without any consistency check.
MemorySubsystem mem_store(const MemorySubsystem& mem, const std::string& schema_id,
                          EvaluatedInstance inst);

/// Checks the instance against model(schema) and appends it. Throws
/// InconsistentInstance when the weight is not positive, the points are not
/// in the schema's spaces, or the weight differs from the model by more
/// than 1e-9.
MemorySubsystem mem_write(const MemorySubsystem& mem, const ImplementedSchema& schema,
                          EvaluatedInstance inst);

/// Drops everything stored for the listed schema ids (all ids when empty).
MemorySubsystem mem_forget(const MemorySubsystem& mem, const std::set<std::string>& schema_ids);

enum class Selector { All, Count, MeanOutput, Last };

std::string to_string(Selector s);
Selector selector_from_string(const std::string& text);

struct ReadValue {
  std::vector<EvaluatedInstance> instances;
  double value = 0;
};

/// All: every instance. Count: number of instances. Last: the newest one
/// (none if empty). MeanOutput: arithmetic mean of the outputs; throws
/// NonNumericAggregate if any output is not a real or nothing is stored.
ReadValue mem_read(const MemorySubsystem& mem, const std::string& schema_id, Selector selector);

/// The data map of `m`: the instances stored under `from_id`, pulled back
/// along m's point maps, become the content of `to_id`.
MemorySubsystem mem_reindex(const MemorySubsystem& mem, const ImplMorphism& m,
                            const std::string& from_id, const std::string& to_id);

/// One JSON object per line: {"schema", "input", "output", "weight"}.
std::string dump_jsonl(const MemorySubsystem& mem);

struct CognitiveModule {
  std::string name;
  std::vector<syntax::SchemaType> dom_types;
  std::vector<syntax::SchemaType> cod_types;
  std::vector<wf::Workflow> workflows;
  wf::PredicateRef success;
  std::set<std::string> signature;
};

/// Throws SignatureViolation if a workflow uses an operator outside the
/// signature.
CognitiveModule make_module(std::string name, std::vector<syntax::SchemaType> dom_types,
                            std::vector<syntax::SchemaType> cod_types,
                            std::vector<wf::Workflow> workflows, wf::PredicateRef success,
                            std::set<std::string> signature);

struct MindSpaces {
  std::optional<SpaceSpec> observations;
  std::optional<SpaceSpec> decisions;
  std::optional<SpaceSpec> hidden;
};

struct MindState {
  MindSpaces spaces;
  std::map<std::string, ImplementedSchema> schemas;
  std::map<std::string, MemorySubsystem> memories;
  std::map<std::string, CognitiveModule> modules;

  const ImplementedSchema& schema(const std::string& id) const;
  const MemorySubsystem& memory(const std::string& name) const;
  const CognitiveModule& module(const std::string& name) const;
};

/// The unit of mind_par.
MindState empty_mind();

/// Union of two minds. Throws OverlapConflict on a shared schema id,
/// memory name or module name, or on two different spaces in one slot.
MindState mind_par(const MindState& a, const MindState& b);

/// Keeps only the listed schema ids and memory names (and no modules).
MindState restrict_to(const MindState& m, const std::set<std::string>& ids);
/// Removes the listed schema ids and memory names.
MindState remove_ids(const MindState& m, const std::set<std::string>& ids);

/// Throws TypeMismatch if some module type matches no schema in `m`.
void check_module_types(const MindState& m);

MindState add_schema(const MindState& m, ImplementedSchema s);
MindState add_memory(const MindState& m, MemorySubsystem mem);
MindState add_module(const MindState& m, CognitiveModule module);

/// Mind-level write/read. Throw UnknownMemory / UnknownSchema.
MindState mem_write(const MindState& m, const std::string& memory, const std::string& schema_id,
                    EvaluatedInstance inst);
ReadValue mem_read(const MindState& m, const std::string& memory, const std::string& schema_id,
                   Selector selector);

/// Equality of serialized states.
bool same_state(const MindState& a, const MindState& b);

nlohmann::json to_json(const MemorySubsystem& mem);
MemorySubsystem memory_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CognitiveModule& module);
CognitiveModule module_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MindState& m);
MindState mind_from_json(const nlohmann::json& j,
                         const impl::LanguageRegistry& langs = impl::LanguageRegistry::builtin());

}  // namespace schemacalc::mind
