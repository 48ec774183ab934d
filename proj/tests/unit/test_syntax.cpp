#include <doctest.h>

#include "helpers.hpp"
#include "schemacalc/laws.hpp"

using namespace schemacalc;
using namespace schemacalc::syntax;
using th::D;
using th::E;
using th::O;
using th::S;

namespace {

const SchemaTerm vision = th::atom("vision", SchemaKind::Perceptual, {S}, {O});
const SchemaTerm grip = th::atom("grip", SchemaKind::Motor, {D}, {E});
const SchemaTerm forward = th::atom("forward", SchemaKind::Predictive, {D}, {O});
const SchemaTerm inverse = th::atom("inverse", SchemaKind::Predictive, {O}, {D});

}  // namespace

TEST_CASE("make_atomic keeps the declared spaces") {
  CHECK(vision.is(TermOp::Atomic));
  CHECK(vision.id() == "vision");
  CHECK(vision.type().dom == ProductSpace{S});
  CHECK(vision.type().cod == ProductSpace{O});
  CHECK(grip.type().dom == ProductSpace{D});
  CHECK(grip.type().cod == ProductSpace{E});
}

TEST_CASE("make_atomic rejects a goal schema over a sensor space") {
  SpaceSpec real("r", SpaceRole::Real, {"0", "1"});
  CHECK(th::error_of([&] { th::atom("bad", SchemaKind::Goal, {S}, {real}); }) == ErrorCode::MalformedType);
  CHECK(th::error_of([&] { th::atom("bad", SchemaKind::Motor, {O}, {E}); }) == ErrorCode::MalformedType);
  CHECK(th::error_of([&] { th::atom("", SchemaKind::Abstract, {S}, {O}); }).has_value());
}

TEST_CASE("comb_par: unit, symmetry, product type") {
  CHECK(comb_par(vision, make_null({S})) == vision);
  CHECK(term_equal(comb_par(vision, grip), comb_par(grip, vision)));
  auto p = comb_par(vision, grip);
  // Children are sorted by key, so the factor order follows the sorted order.
  CHECK(p.type().dom.size() == 2);
  CHECK(p.type().cod.size() == 2);
  std::set<std::string> dom_labels{p.type().dom[0].label(), p.type().dom[1].label()};
  std::set<std::string> cod_labels{p.type().cod[0].label(), p.type().cod[1].label()};
  CHECK(dom_labels == std::set<std::string>{"S", "D"});
  CHECK(cod_labels == std::set<std::string>{"O", "E"});
}

TEST_CASE("comb_seq: unit, associativity, order matters") {
  CHECK(comb_seq(vision, make_null({S})) == vision);
  CHECK(comb_seq(make_null({S}), vision) == vision);
  auto a = vision, b = grip, c = forward;
  CHECK(term_equal(comb_seq(a, comb_seq(b, c)), comb_seq(comb_seq(a, b), c)));
  CHECK_FALSE(term_equal(comb_seq(a, b), comb_seq(b, a)));
  auto s = comb_seq(vision, grip);
  CHECK(s.type().dom == ProductSpace{S, D});
  CHECK(s.type().cod == ProductSpace{O, E});
}

TEST_CASE("a Par of units only is its least unit regardless of operand order") {
  auto u1 = make_null({S});
  auto u2 = make_null({D});
  CHECK(comb_par(u1, u2) == comb_par(u2, u1));
  CHECK(comb_seq(u1, u2) == comb_seq(u2, u1));
}

TEST_CASE("encap: idempotence, symmetry, specialization") {
  CHECK(encap(vision, vision) == vision);
  CHECK(term_equal(encap(vision, grip), encap(grip, vision)));
  CHECK(specializes(vision, encap(vision, grip)));
  CHECK(specializes(grip, encap(vision, grip)));
  CHECK_FALSE(specializes(encap(vision, grip), vision));
}

TEST_CASE("ref splits composites and refuses leaves") {
  auto [l, r] = ref(encap(vision, grip));
  CHECK(term_equal(encap(l, r), encap(vision, grip)));
  std::set<SchemaTerm> parts{l, r};
  CHECK(parts == std::set<SchemaTerm>{vision, grip});
  CHECK(specializes(l, encap(vision, grip)));
  CHECK(th::error_of([] { ref(vision); }) == ErrorCode::NotDecomposable);
  CHECK(th::error_of([] { ref(make_null({S})); }) == ErrorCode::NotDecomposable);
  CHECK(th::error_of([] { ref(ctx(vision, {grip})); }) == ErrorCode::NotDecomposable);

  auto [first, rest] = ref(comb_seq(vision, comb_seq(grip, forward)));
  CHECK(first == vision);
  CHECK(rest == comb_seq(grip, forward));
}

TEST_CASE("ctx: neutrality, additivity, idempotence, inclusion") {
  CHECK(ctx(vision, std::span<const SchemaTerm>{}) == vision);
  CHECK(ctx(ctx(vision, {grip}), {forward}) == ctx(vision, {grip, forward}));
  CHECK(ctx(ctx(vision, {grip}), {grip}) == ctx(vision, {grip}));
  CHECK(specializes(ctx(vision, {grip, forward}), ctx(vision, {grip})));
  CHECK_FALSE(specializes(ctx(vision, {grip}), ctx(vision, {grip, forward})));
}

TEST_CASE("add and del behave as set operations on normal forms") {
  SchemaSet one{vision};
  CHECK(add(one, vision) == one);
  CHECK(add(one, comb_par(vision, make_null({S}))) == one);
  SchemaSet sigma{grip, forward};
  CHECK(del(add(sigma, vision), vision) == sigma);
  CHECK(add(del(sigma, grip), grip) == sigma);
  CHECK(del(sigma, sigma).empty());
  CHECK(add(sigma, make_null({O})) == sigma);
  CHECK(del(sigma, make_null({O})) == sigma);
}

TEST_CASE("normalize is idempotent and decides the laws") {
  auto t = SchemaTerm::raw(TermOp::Par, "", {},
                           {SchemaTerm::raw(TermOp::Par, "", {}, {grip, make_null({S})}), vision});
  auto n = normalize(t);
  CHECK(normalize(n) == n);
  CHECK(n == comb_par(vision, grip));
  CHECK(term_equal(comb_par(vision, grip), comb_par(grip, vision)));
  CHECK_FALSE(term_equal(comb_seq(vision, grip), comb_seq(grip, vision)));
}

TEST_CASE("specializes is reflexive; is_dual needs swapped predictive types") {
  CHECK(specializes(vision, vision));
  CHECK(is_dual(forward, inverse));
  CHECK_FALSE(is_dual(forward, forward));
  CHECK(th::error_of([] { is_dual(vision, inverse); }) == ErrorCode::NotPredictive);
}

TEST_CASE("terms survive a JSON round trip unchanged") {
  auto t = ctx(comb_seq(vision, encap(grip, forward)), {inverse});
  CHECK(term_from_json(to_json(t)) == t);
}

TEST_CASE("syntax law suite passes") {
  for (const auto& r : laws::syntax_laws(200, 11)) {
    INFO(r.name << ": " << r.first_failure);
    CHECK(r.passed());
  }
}
