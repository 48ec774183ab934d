#include <doctest.h>

#include "helpers.hpp"
#include "schemacalc/impl.hpp"
#include "schemacalc/laws.hpp"

using namespace schemacalc;
using namespace schemacalc::impl;
using syntax::SchemaKind;
using th::D;
using th::O;

namespace {

const SpaceSpec kReal("r", SpaceRole::Real, {"0", "1", "2"});
const auto value_term = th::atom("V", SchemaKind::Goal, {O}, {kReal});
const auto forward_term = th::atom("forward", SchemaKind::Predictive, {O, D}, {O});

ImplementedSchema value_table() { return implement(value_term, tabular_language(), ParamTensor({2}, {3.0, 0.0})); }

ImplementedSchema forward_model() {
  return implement(forward_term, tabular_language(),
                   ParamTensor({2, 2, 2}, {0.9, 0.1, 0.2, 0.8, 0.5, 0.5, 1.0, 0.0}));
}

ParamMap scale(double k) {
  return [k](const ParamTensor& t) {
    auto out = t;
    for (auto& v : out.values) v *= k;
    return out;
  };
}

}  // namespace

TEST_CASE("implement checks the layout of the tabular language") {
  auto v = value_table();
  CHECK(v.deterministic());
  CHECK(v.params.shape == std::vector<std::size_t>{2});
  auto f = forward_model();
  CHECK_FALSE(f.deterministic());
  CHECK(f.layout.dims == std::vector<std::size_t>{2, 2, 2});
  CHECK(f.id == "forward");

  CHECK(th::error_of([] { implement(value_term, tabular_language(), ParamTensor({3}, {1, 2, 3})); }) ==
        ErrorCode::ShapeMismatch);
  CHECK(th::error_of([] {
          implement(forward_term, tabular_language(), ParamTensor({2, 2, 2}, {0.9, 0.2, 0.2, 0.8, 0.5, 0.5, 1, 0}));
        }) == ErrorCode::NonStochasticRow);
}

TEST_CASE("update keeps the fiber and composes its maps") {
  auto s = value_table();
  auto same = update(s, [](const ParamTensor& t) { return t; });
  CHECK(same.params == s.params);
  CHECK(same.term == s.term);
  auto twice = update(update(s, scale(2)), scale(3));
  auto once = update(s, [](const ParamTensor& t) { return scale(3)(scale(2)(t)); });
  CHECK(twice.params == once.params);
  CHECK(twice.term == s.term);
  CHECK(twice.params.values == std::vector<double>{18.0, 0.0});
  CHECK(th::error_of([&] { update(s, [](const ParamTensor&) { return ParamTensor({3}, {0, 0, 0}); }); }) ==
        ErrorCode::ShapeMismatch);
}

TEST_CASE("transform into the same language") {
  auto s = value_table();
  auto t = transform(s, tabular_language(), [](const ParamTensor& p) { return p; });
  CHECK(t.params == s.params);
  CHECK(t.lang.name() == "tabular");
  auto swapped = transform(s, tabular_language(), [](const ParamTensor& p) {
    return ParamTensor(p.shape, {p.values[1], p.values[0]});
  });
  CHECK(swapped.params.values == std::vector<double>{0.0, 3.0});
  CHECK(th::error_of([&] {
          transform(s, tabular_language(), [](const ParamTensor&) { return ParamTensor({1}, {0}); });
        }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("morphism composition: units, verticality, domain check") {
  auto s = value_table();
  auto f = update_morphism(s, scale(2));
  auto id = identity_morphism(s);
  auto left = compose_morphisms(id, f);
  auto theta = ParamTensor({2}, {1.5, -4});
  CHECK(left.param_map(theta) == f.param_map(theta));
  auto v2 = update_morphism(s, scale(5));
  auto both = compose_morphisms(v2, f);
  CHECK(both.vertical());
  CHECK(both.param_map(theta).values == std::vector<double>{15.0, -40.0});

  auto other = identity_morphism(forward_model());
  CHECK(th::error_of([&] { compose_morphisms(other, f); }) == ErrorCode::DomainMismatch);
}

TEST_CASE("implemented schemas round trip through JSON") {
  auto f = forward_model();
  auto j = to_json(f);
  CHECK(j["lang"] == "tabular");
  CHECK(j["shape"] == nlohmann::json::array({2, 2, 2}));
  auto back = implemented_from_json(j);
  CHECK(back.params == f.params);
  CHECK(back.term == f.term);
  CHECK(back.id == f.id);
}

TEST_CASE("impl law suite passes") {
  for (const auto& r : laws::impl_laws(100, 5)) {
    INFO(r.name << ": " << r.first_failure);
    CHECK(r.passed());
  }
}
