#include "schemacalc/mind.hpp"

#include <algorithm>
#include <cmath>

#include "schemacalc/error.hpp"

namespace schemacalc::mind {

namespace {

constexpr const char* kSelectorNames[] = {"all", "count", "mean_output", "last"};

void merge_space(std::optional<SpaceSpec>& slot, const std::optional<SpaceSpec>& other,
                 const char* what) {
  if (!other) return;
  if (slot && !(*slot == *other)) {
    fail(ErrorCode::OverlapConflict, std::string("minds disagree on the ") + what + " space");
  }
  slot = other;
}

template <typename Map>
void merge_disjoint(Map& into, const Map& from, const char* what) {
  for (const auto& [k, v] : from) {
    if (!into.emplace(k, v).second) {
      fail(ErrorCode::OverlapConflict, std::string("both minds hold ") + what + " '" + k + "'");
    }
  }
}

nlohmann::json optional_space(const std::optional<SpaceSpec>& s) {
  return s ? to_json(*s) : nlohmann::json(nullptr);
}

std::optional<SpaceSpec> optional_space_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return space_from_json(j.at(key));
}

bool type_present(const MindState& m, const syntax::SchemaType& t) {
  return std::any_of(m.schemas.begin(), m.schemas.end(),
                     [&](const auto& kv) { return kv.second.term.type() == t; });
}

}  // namespace

MemorySubsystem::MemorySubsystem(std::string name) : name_(std::move(name)) {
  if (name_.empty()) fail(ErrorCode::InvalidArgument, "memory name must be non-empty");
}

const std::vector<EvaluatedInstance>& MemorySubsystem::instances(const std::string& schema_id) const {
  static const std::vector<EvaluatedInstance> none;
  auto it = data_.find(schema_id);
  return it == data_.end() ? none : it->second;
}

const std::vector<std::string>& MemorySubsystem::operations() {
  static const std::vector<std::string> ops{"store", "retrieve", "aggregate", "forget"};
  return ops;
}

MemorySubsystem mem_store(const MemorySubsystem& mem, const std::string& schema_id,
                          EvaluatedInstance inst) {
  MemorySubsystem out = mem;
  out.data_[schema_id].push_back(std::move(inst));
  return out;
}

MemorySubsystem mem_write(const MemorySubsystem& mem, const ImplementedSchema& schema,
                          EvaluatedInstance inst) {
  if (!(inst.weight > 0)) {
    fail(ErrorCode::InconsistentInstance, "instance weight must be positive");
  }
  auto k = sem::model(schema);
  auto x = point_index(k.dom(), inst.input);
  auto y = point_index(k.cod(), inst.output);
  if (!x || !y) {
    fail(ErrorCode::InconsistentInstance,
         "(" + inst.input + ", " + inst.output + ") is not a point pair of " + schema.id);
  }
  double expected = k.row(*x)[*y];
  if (std::abs(expected - inst.weight) > sem::kProbTolerance) {
    fail(ErrorCode::InconsistentInstance, "weight " + format_real(inst.weight) + " but " +
                                              schema.id + " assigns " + format_real(expected));
  }
  return mem_store(mem, schema.id, std::move(inst));
}

MemorySubsystem mem_forget(const MemorySubsystem& mem, const std::set<std::string>& schema_ids) {
  MemorySubsystem out = mem;
  if (schema_ids.empty()) {
    out.data_.clear();
  } else {
    for (const auto& id : schema_ids) out.data_.erase(id);
  }
  return out;
}

std::string to_string(Selector s) { return kSelectorNames[static_cast<int>(s)]; }

Selector selector_from_string(const std::string& text) {
  for (int i = 0; i < 4; ++i) {
    if (text == kSelectorNames[i]) return static_cast<Selector>(i);
  }
  fail(ErrorCode::InvalidArgument, "unknown selector '" + text + "'");
}

ReadValue mem_read(const MemorySubsystem& mem, const std::string& schema_id, Selector selector) {
  const auto& stored = mem.instances(schema_id);
  ReadValue out;
  switch (selector) {
    case Selector::All:
      out.instances = stored;
      out.value = static_cast<double>(stored.size());
      break;
    case Selector::Count:
      out.value = static_cast<double>(stored.size());
      break;
    case Selector::Last:
      if (!stored.empty()) out.instances.push_back(stored.back());
      out.value = static_cast<double>(out.instances.size());
      break;
    case Selector::MeanOutput: {
      if (stored.empty()) fail(ErrorCode::NonNumericAggregate, "no outputs stored for " + schema_id);
      double sum = 0;
      for (const auto& inst : stored) {
        auto v = parse_real(inst.output);
        if (!v) fail(ErrorCode::NonNumericAggregate, "output '" + inst.output + "' is not a real");
        sum += *v;
      }
      out.value = sum / static_cast<double>(stored.size());
      break;
    }
  }
  return out;
}

MemorySubsystem mem_reindex(const MemorySubsystem& mem, const ImplMorphism& m,
                            const std::string& from_id, const std::string& to_id) {
  MemorySubsystem out = mem;
  auto it = out.data_.find(from_id);
  if (it == out.data_.end()) return out;
  auto moved = sem::inst_reindex(m, it->second);
  out.data_.erase(it);
  out.data_[to_id] = std::move(moved);
  return out;
}

std::string dump_jsonl(const MemorySubsystem& mem) {
  std::string out;
  for (const auto& [id, list] : mem.data()) {
    for (const auto& inst : list) {
      auto j = sem::to_json(inst);
      j["schema"] = id;
      out += j.dump();
      out += '\n';
    }
  }
  return out;
}

CognitiveModule make_module(std::string name, std::vector<syntax::SchemaType> dom_types,
                            std::vector<syntax::SchemaType> cod_types,
                            std::vector<wf::Workflow> workflows, wf::PredicateRef success,
                            std::set<std::string> signature) {
  for (const auto& w : workflows) {
    for (const auto& op : wf::operator_names(w)) {
      if (!signature.count(op)) {
        fail(ErrorCode::SignatureViolation,
             "module " + name + " uses operator '" + op + "' outside its signature");
      }
    }
  }
  return CognitiveModule{std::move(name),      std::move(dom_types), std::move(cod_types),
                         std::move(workflows), std::move(success),   std::move(signature)};
}

const ImplementedSchema& MindState::schema(const std::string& id) const {
  auto it = schemas.find(id);
  if (it == schemas.end()) fail(ErrorCode::UnknownSchema, "no schema '" + id + "'");
  return it->second;
}

const MemorySubsystem& MindState::memory(const std::string& name) const {
  auto it = memories.find(name);
  if (it == memories.end()) fail(ErrorCode::UnknownMemory, "no memory '" + name + "'");
  return it->second;
}

const CognitiveModule& MindState::module(const std::string& name) const {
  auto it = modules.find(name);
  if (it == modules.end()) fail(ErrorCode::UnknownModule, "no module '" + name + "'");
  return it->second;
}

MindState empty_mind() { return MindState{}; }

MindState mind_par(const MindState& a, const MindState& b) {
  MindState out = a;
  merge_space(out.spaces.observations, b.spaces.observations, "observation");
  merge_space(out.spaces.decisions, b.spaces.decisions, "decision");
  merge_space(out.spaces.hidden, b.spaces.hidden, "hidden");
  merge_disjoint(out.schemas, b.schemas, "schema");
  merge_disjoint(out.memories, b.memories, "memory");
  merge_disjoint(out.modules, b.modules, "module");
  return out;
}

MindState restrict_to(const MindState& m, const std::set<std::string>& ids) {
  MindState out;
  for (const auto& id : ids) {
    if (auto it = m.schemas.find(id); it != m.schemas.end()) out.schemas.emplace(id, it->second);
    if (auto it = m.memories.find(id); it != m.memories.end()) out.memories.emplace(id, it->second);
  }
  return out;
}

MindState remove_ids(const MindState& m, const std::set<std::string>& ids) {
  MindState out = m;
  for (const auto& id : ids) {
    out.schemas.erase(id);
    out.memories.erase(id);
  }
  return out;
}

void check_module_types(const MindState& m) {
  for (const auto& [name, module] : m.modules) {
    for (const auto* types : {&module.dom_types, &module.cod_types}) {
      for (const auto& t : *types) {
        if (!type_present(m, t)) {
          fail(ErrorCode::TypeMismatch,
               "module " + name + " expects a schema of type " + syntax::type_signature(t));
        }
      }
    }
  }
}

MindState add_schema(const MindState& m, ImplementedSchema s) {
  MindState one;
  auto id = s.id;
  one.schemas.emplace(std::move(id), std::move(s));
  return mind_par(m, one);
}

MindState add_memory(const MindState& m, MemorySubsystem mem) {
  MindState one;
  auto name = mem.name();
  one.memories.emplace(std::move(name), std::move(mem));
  return mind_par(m, one);
}

MindState add_module(const MindState& m, CognitiveModule module) {
  MindState one;
  auto name = module.name;
  one.modules.emplace(std::move(name), std::move(module));
  auto out = mind_par(m, one);
  check_module_types(out);
  return out;
}

MindState mem_write(const MindState& m, const std::string& memory, const std::string& schema_id,
                    EvaluatedInstance inst) {
  const auto& mem = m.memory(memory);
  const auto& schema = m.schema(schema_id);
  MindState out = m;
  out.memories.insert_or_assign(memory, mem_write(mem, schema, std::move(inst)));
  return out;
}

ReadValue mem_read(const MindState& m, const std::string& memory, const std::string& schema_id,
                   Selector selector) {
  const auto& mem = m.memory(memory);
  m.schema(schema_id);
  return mem_read(mem, schema_id, selector);
}

bool same_state(const MindState& a, const MindState& b) { return to_json(a) == to_json(b); }

nlohmann::json to_json(const MemorySubsystem& mem) {
  nlohmann::json data = nlohmann::json::object();
  for (const auto& [id, list] : mem.data()) {
    auto& arr = data[id] = nlohmann::json::array();
    for (const auto& inst : list) arr.push_back(sem::to_json(inst));
  }
  return {{"name", mem.name()}, {"data", std::move(data)}};
}

MemorySubsystem memory_from_json(const nlohmann::json& j) {
  try {
    MemorySubsystem mem(j.at("name").get<std::string>());
    if (j.contains("data")) {
      for (const auto& [id, list] : j.at("data").items()) {
        for (const auto& inst : list) mem = mem_store(mem, id, sem::instance_from_json(inst));
      }
    }
    return mem;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("memory: ") + e.what());
  }
}

nlohmann::json to_json(const CognitiveModule& module) {
  auto types = [](const std::vector<syntax::SchemaType>& ts) {
    auto arr = nlohmann::json::array();
    for (const auto& t : ts) arr.push_back(syntax::to_json(t));
    return arr;
  };
  auto workflows = nlohmann::json::array();
  for (const auto& w : module.workflows) workflows.push_back(wf::to_json(w));
  return {{"name", module.name},
          {"dom_types", types(module.dom_types)},
          {"cod_types", types(module.cod_types)},
          {"workflows", std::move(workflows)},
          {"success", wf::to_json(module.success)},
          {"signature", module.signature}};
}

CognitiveModule module_from_json(const nlohmann::json& j) {
  try {
    auto types = [](const nlohmann::json& arr) {
      std::vector<syntax::SchemaType> out;
      for (const auto& t : arr) out.push_back(syntax::type_from_json(t));
      return out;
    };
    std::vector<wf::Workflow> workflows;
    for (const auto& w : j.at("workflows")) workflows.push_back(wf::workflow_from_json(w));
    return make_module(j.at("name").get<std::string>(), types(j.value("dom_types", nlohmann::json::array())),
                       types(j.value("cod_types", nlohmann::json::array())), std::move(workflows),
                       wf::predicate_from_json(j.at("success")),
                       j.at("signature").get<std::set<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("module: ") + e.what());
  }
}

nlohmann::json to_json(const MindState& m) {
  auto schemas = nlohmann::json::array();
  for (const auto& [id, s] : m.schemas) schemas.push_back(impl::to_json(s));
  auto memories = nlohmann::json::array();
  for (const auto& [name, mem] : m.memories) memories.push_back(to_json(mem));
  auto modules = nlohmann::json::array();
  for (const auto& [name, mod] : m.modules) modules.push_back(to_json(mod));
  return {{"spaces",
           {{"O", optional_space(m.spaces.observations)},
            {"D", optional_space(m.spaces.decisions)},
            {"H", optional_space(m.spaces.hidden)}}},
          {"schemas", std::move(schemas)},
          {"memories", std::move(memories)},
          {"modules", std::move(modules)}};
}

MindState mind_from_json(const nlohmann::json& j, const impl::LanguageRegistry& langs) {
  try {
    MindState m;
    if (j.contains("spaces")) {
      const auto& sp = j.at("spaces");
      m.spaces.observations = optional_space_from(sp, "O");
      m.spaces.decisions = optional_space_from(sp, "D");
      m.spaces.hidden = optional_space_from(sp, "H");
    }
    for (const auto& s : j.value("schemas", nlohmann::json::array())) {
      m = add_schema(m, impl::implemented_from_json(s, langs));
    }
    for (const auto& mem : j.value("memories", nlohmann::json::array())) {
      m = add_memory(m, memory_from_json(mem));
    }
    for (const auto& mod : j.value("modules", nlohmann::json::array())) {
      m = add_module(m, module_from_json(mod));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("mind: ") + e.what());
  }
}

}  // namespace schemacalc::mind
