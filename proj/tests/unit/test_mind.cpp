#include <doctest.h>

#include "helpers.hpp"
#include "schemacalc/action.hpp"
#include "schemacalc/laws.hpp"

using namespace schemacalc;
using namespace schemacalc::mind;
using syntax::SchemaKind;

namespace {

const SpaceSpec kReal("r", SpaceRole::Real, {"1", "3"});

ImplementedSchema value_table(const std::string& id) {
  return impl::implement(th::atom(id, SchemaKind::Goal, {th::O}, {kReal}), impl::tabular_language(),
                         impl::ParamTensor({2}, {1.0, 3.0}));
}

ImplementedSchema percept(const std::string& id) {
  return impl::implement(th::atom(id, SchemaKind::Perceptual, {th::S}, {th::O}), impl::tabular_language(),
                         impl::ParamTensor({2, 2}, {0.5, 0.5, 0.1, 0.9}));
}

MindState base_mind() {
  auto m = add_schema(empty_mind(), value_table("V"));
  m = add_schema(m, percept("vision"));
  return add_memory(m, MemorySubsystem("episodic"));
}

}  // namespace

TEST_CASE("write then read back") {
  auto m = base_mind();
  auto w = mem_write(m, "episodic", "V", {"O0", "1", 1.0});
  auto all = mem_read(w, "episodic", "V", Selector::All);
  REQUIRE(all.instances.size() == 1);
  CHECK(all.instances[0] == EvaluatedInstance{"O0", "1", 1.0});
  CHECK(mem_read(w, "episodic", "V", Selector::Last).instances.at(0).input == "O0");
}

TEST_CASE("writes are checked against the schema") {
  auto m = base_mind();
  CHECK(th::error_of([&] { mem_write(m, "episodic", "V", {"O0", "1", 0.0}); }) == ErrorCode::InconsistentInstance);
  CHECK(th::error_of([&] { mem_write(m, "episodic", "V", {"O0", "3", 1.0}); }) == ErrorCode::InconsistentInstance);
  CHECK(th::error_of([&] { mem_write(m, "episodic", "vision", {"S0", "O0", 0.7}); }) ==
        ErrorCode::InconsistentInstance);
  CHECK(th::error_of([&] { mem_write(m, "episodic", "nope", {"O0", "1", 1.0}); }) == ErrorCode::UnknownSchema);
  CHECK(th::error_of([&] { mem_write(m, "semantic", "V", {"O0", "1", 1.0}); }) == ErrorCode::UnknownMemory);
}

TEST_CASE("aggregates") {
  auto m = base_mind();
  m = mem_write(m, "episodic", "V", {"O0", "1", 1.0});
  m = mem_write(m, "episodic", "V", {"O1", "3", 1.0});
  m = mem_write(m, "episodic", "V", {"O1", "3", 1.0});
  CHECK(mem_read(m, "episodic", "V", Selector::Count).value == 3);
  m = mem_write(m, "episodic", "vision", {"S0", "O1", 0.5});
  CHECK(th::error_of([&] { mem_read(m, "episodic", "vision", Selector::MeanOutput); }) ==
        ErrorCode::NonNumericAggregate);

  auto two = mem_write(base_mind(), "episodic", "V", {"O0", "1", 1.0});
  two = mem_write(two, "episodic", "V", {"O1", "3", 1.0});
  CHECK(mem_read(two, "episodic", "V", Selector::MeanOutput).value == 2.0);
  CHECK(th::error_of([&] { mem_read(two, "episodic", "missing", Selector::Count); }) == ErrorCode::UnknownSchema);
}

TEST_CASE("reindex along the identity and of empty storage") {
  auto s = percept("vision");
  auto mem = mind::mem_write(MemorySubsystem("m"), s, {"S1", "O1", 0.9});
  auto same = mem_reindex(mem, impl::identity_morphism(s), "vision", "vision");
  CHECK(same == mem);
  auto empty = mem_reindex(MemorySubsystem("m"), impl::identity_morphism(s), "vision", "vision");
  CHECK(empty.data().empty());
}

TEST_CASE("reindex pulls instances back along the point maps") {
  auto s = percept("vision");
  auto mem = mind::mem_write(MemorySubsystem("m"), s, {"S1", "O1", 0.9});
  auto m = impl::identity_morphism(s);
  m.pull_dom.mapping = {{"S1", "S0"}, {"S0", "S1"}};
  auto moved = mem_reindex(mem, m, "vision", "vision2");
  REQUIRE(moved.instances("vision2").size() == 1);
  CHECK(moved.instances("vision2")[0].input == "S0");
  CHECK(moved.instances("vision2")[0].output == "O1");
}

TEST_CASE("mind_par: unit, union, overlap") {
  auto m = base_mind();
  CHECK(same_state(mind_par(m, empty_mind()), m));
  CHECK(same_state(mind_par(empty_mind(), m), m));
  auto other = add_schema(empty_mind(), value_table("W"));
  auto both = mind_par(m, other);
  CHECK(both.schemas.size() == 3);
  CHECK(both.memories.size() == 1);
  CHECK(th::error_of([&] { mind_par(m, m); }) == ErrorCode::OverlapConflict);
}

TEST_CASE("modules: inertia, signature closure") {
  auto m = base_mind();
  auto unit_module = make_module("rest", {}, {}, {wf::Workflow::unit_seq()}, {"always_true", {}, 0, {}}, {});
  auto with = add_module(m, unit_module);
  auto run = exec::run_module(with, "rest", 0, 1);
  CHECK(same_state(run.state, with));
  CHECK(run.success);

  auto scale = wf::wf_prim({"update.scale", {"V"}, {}, {{"factor", 2}}});
  CHECK(th::error_of([&] { make_module("bad", {}, {}, {scale}, {"always_true", {}, 0, {}}, {"update.shift"}); }) ==
        ErrorCode::SignatureViolation);

  // Bypass the static check to reach the runtime one.
  CognitiveModule sneaky{"sneaky", {}, {}, {scale}, {"always_true", {}, 0, {}}, {"update.shift"}};
  auto with_sneaky = add_module(m, sneaky);
  CHECK(th::error_of([&] { exec::run_module(with_sneaky, "sneaky", 0, 1); }) == ErrorCode::SignatureViolation);
  CHECK(th::error_of([&] { exec::run_module(with, "missing", 0, 1); }) == ErrorCode::UnknownModule);
}

TEST_CASE("minds round trip through JSON") {
  auto m = mem_write(base_mind(), "episodic", "V", {"O1", "3", 1.0});
  m = add_module(m, make_module("rest", {}, {}, {wf::Workflow::unit_seq()}, {"always_true", {}, 0, {}}, {}));
  auto back = mind_from_json(to_json(m));
  CHECK(same_state(back, m));
  CHECK(to_json(back).dump() == to_json(m).dump());
}

TEST_CASE("memory law suite passes") {
  for (const auto& r : laws::memory_laws(100, 4)) {
    INFO(r.name << ": " << r.first_failure);
    CHECK(r.passed());
  }
}
