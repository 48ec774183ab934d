#include <doctest.h>

#include "../oracles.hpp"
#include "helpers.hpp"
#include "schemacalc/laws.hpp"
#include "schemacalc/semantics.hpp"

using namespace schemacalc;
using namespace schemacalc::sem;
using syntax::SchemaKind;
using th::O;
using th::S;

namespace {

SpaceSpec pts(const std::string& label, std::vector<std::string> p) {
  return SpaceSpec(label, SpaceRole::Other, std::move(p));
}

const SpaceSpec X = pts("X", {"x0", "x1"});
const SpaceSpec Y = pts("Y", {"y0", "y1"});
const SpaceSpec Z = pts("Z", {"z0", "z1"});

void check_rows(const std::vector<std::vector<double>>& got, const std::vector<std::vector<double>>& want) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    REQUIRE(got[i].size() == want[i].size());
    for (std::size_t j = 0; j < got[i].size(); ++j) CHECK(got[i][j] == doctest::Approx(want[i][j]).epsilon(1e-12));
  }
}

const SpaceSpec kReal("r", SpaceRole::Real, {"0", "3"});

impl::ImplementedSchema value_table() {
  return impl::implement(th::atom("V", SchemaKind::Goal, {O}, {kReal}), impl::tabular_language(),
                         impl::ParamTensor({2}, {3.0, 0.0}));
}

impl::ImplementedSchema coin() {
  return impl::implement(th::atom("vision", SchemaKind::Perceptual, {S}, {O}), impl::tabular_language(),
                         impl::ParamTensor({2, 2}, {0.5, 0.5, 0.1, 0.9}));
}

}  // namespace

TEST_CASE("dirac") {
  CHECK(dirac(X, "x0").probs == std::vector<double>{1, 0});
  CHECK(dirac(pts("W", {"a", "b", "c"}), "c").probs == std::vector<double>{0, 0, 1});
  CHECK(th::error_of([] { dirac(X, "z"); }) == ErrorCode::UnknownPoint);
}

TEST_CASE("oracle reproduces the frozen compose and product values") {
  check_rows(oracle::compose({{0.5, 0.5}, {0.2, 0.8}}, {{0.3, 0.7}, {0.9, 0.1}}), {{0.6, 0.4}, {0.78, 0.22}});
  check_rows(oracle::product({{0.5, 0.5}}, {{0.2, 0.8}}), {{0.1, 0.4, 0.1, 0.4}});
}

TEST_CASE("kernel_compose") {
  FiniteKernel f({X}, {Y}, {{0.5, 0.5}, {0.2, 0.8}});
  FiniteKernel g({Y}, {Z}, {{0.3, 0.7}, {0.9, 0.1}});
  check_rows(kernel_compose(f, g).rows(), {{0.6, 0.4}, {0.78, 0.22}});
  check_rows(kernel_compose(f, identity_kernel({Y})).rows(), f.rows());
  check_rows(kernel_compose(identity_kernel({X}), f).rows(), f.rows());
  CHECK(th::error_of([&] { kernel_compose(f, f); }) == ErrorCode::DomainMismatch);
}

TEST_CASE("kernel_product") {
  const SpaceSpec one = pts("1", {"*"});
  FiniteKernel f({one}, {X}, {{0.5, 0.5}});
  FiniteKernel g({one}, {Y}, {{0.2, 0.8}});
  auto p = kernel_product(f, g);
  check_rows(p.rows(), {{0.1, 0.4, 0.1, 0.4}});
  CHECK(p.cod() == ProductSpace{X, Y});
  check_rows(kernel_product(identity_kernel({X}), identity_kernel({Y})).rows(), identity_kernel({X, Y}).rows());
  // Summing out the second factor gives back f.
  CHECK(p.row(0)[0] + p.row(0)[1] == doctest::Approx(0.5));
}

TEST_CASE("kernels reject rows that are not distributions") {
  CHECK(th::error_of([] { FiniteKernel({X}, {Y}, {{0.5, 0.6}, {0.5, 0.5}}); }) == ErrorCode::NonStochasticRow);
  CHECK(th::error_of([] { FiniteKernel({X}, {Y}, {{0.5, 0.5}}); }).has_value());
}

TEST_CASE("model embeds value tables as Dirac kernels") {
  auto k = model(value_table());
  CHECK(k.at("O0").probs == dirac(k.cod(), "3").probs);
  CHECK(k.at("O1").probs == dirac(k.cod(), "0").probs);
  check_rows(model(coin()).rows(), {{0.5, 0.5}, {0.1, 0.9}});
}

TEST_CASE("model rejects languages it does not know") {
  auto s = coin();
  impl::ImplLanguage other("neural", [](const syntax::SchemaType&) { return impl::ParamLayout{{2, 2}, true, 2}; });
  s.lang = other;
  CHECK(th::error_of([&] { model(s); }) == ErrorCode::UnsupportedLanguage);
}

TEST_CASE("interpret: null, empty context, par, unbound atoms") {
  std::map<std::string, impl::ImplementedSchema> bind{{"vision", coin()}};
  check_rows(interpret(syntax::make_null({X}), bind).rows(), identity_kernel({X}).rows());
  auto vision = bind.at("vision").term;
  check_rows(interpret(syntax::ctx(vision, std::span<const syntax::SchemaTerm>{}), bind).rows(),
             interpret(vision, bind).rows());
  auto value = value_table();
  bind.emplace("V", value);
  auto par = interpret(syntax::comb_par(vision, value.term), bind);
  auto expect = kernel_product(model(value), model(coin()));
  auto expect2 = kernel_product(model(coin()), model(value));
  CHECK((par.rows() == expect.rows() || par.rows() == expect2.rows()));
  CHECK(th::error_of([&] { interpret(th::atom("touch", SchemaKind::Perceptual, {S}, {O}), bind); }) ==
        ErrorCode::UnboundAtomic);
  auto wrong = th::atom("vision", SchemaKind::Abstract, {O}, {S});
  CHECK(th::error_of([&] { interpret(wrong, bind); }) == ErrorCode::TypeMismatch);
}

TEST_CASE("a failing context emits the inactive point") {
  auto gate_schema = impl::implement(th::atom("gate", SchemaKind::Abstract, {S}, {pts("B", {"false", "true"})}),
                                     impl::tabular_language(), impl::ParamTensor({2, 2}, {1, 0, 0, 1}));
  std::map<std::string, impl::ImplementedSchema> bind{{"vision", coin()}, {"gate", gate_schema}};
  auto k = interpret(syntax::ctx(coin().term, {gate_schema.term}), bind);
  // S0 -> gate false -> inactive; S1 -> gate true -> base row.
  const auto& inactive = k.row(0);
  CHECK(inactive.back() == 1.0);
  CHECK(k.row(1)[0] == doctest::Approx(0.1));
  CHECK(k.row(1)[1] == doctest::Approx(0.9));
}

TEST_CASE("instances: enumerate and reindex along the identity") {
  auto id = impl::implement(th::atom("copy", SchemaKind::Perceptual, {S}, {O}), impl::tabular_language(),
                            impl::ParamTensor({2, 2}, {1, 0, 0, 1}));
  auto inst = inst_enumerate(id);
  REQUIRE(inst.size() == 2);
  CHECK(inst[0] == EvaluatedInstance{"S0", "O0", 1.0});
  CHECK(inst[1] == EvaluatedInstance{"S1", "O1", 1.0});
  auto half = impl::implement(th::atom("half", SchemaKind::Perceptual, {S}, {O}), impl::tabular_language(),
                              impl::ParamTensor({2, 2}, {0.5, 0.5, 1, 0}));
  auto hi = inst_enumerate(half);
  CHECK(hi.size() == 3);
  CHECK(hi[0].weight == 0.5);
  CHECK(hi[1].weight == 0.5);
  CHECK(inst_reindex(impl::identity_morphism(half), hi) == hi);
}

TEST_CASE("eval and sample") {
  CHECK(eval(value_table(), "O0").probs == std::vector<double>{0, 1});
  for (std::uint64_t seed : {1u, 2u, 99u}) CHECK(sample(value_table(), "O0", seed) == "3");
  CHECK(sample(coin(), "S0", 42) == sample(coin(), "S0", 42));
  CHECK(th::error_of([] { eval(coin(), "nowhere"); }) == ErrorCode::UnknownPoint);
}

TEST_CASE("kernels round trip through JSON") {
  FiniteKernel f({X}, {Y}, {{0.5, 0.5}, {0.2, 0.8}});
  auto back = kernel_from_json(to_json(f));
  CHECK(back.rows() == f.rows());
  CHECK(back.dom() == f.dom());
}

TEST_CASE("semantics law suite passes") {
  for (const auto& r : laws::semantics_laws(100, 3)) {
    INFO(r.name << ": " << r.first_failure);
    CHECK(r.passed());
  }
}
