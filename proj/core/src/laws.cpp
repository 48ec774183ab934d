#include "schemacalc/laws.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <set>

#include "schemacalc/action.hpp"
#include "schemacalc/error.hpp"
#include "schemacalc/generators.hpp"

namespace schemacalc::laws {

namespace {

using syntax::SchemaSet;
using syntax::SchemaTerm;
using syntax::TermOp;
using Failure = std::optional<std::string>;
using Check = std::function<Failure(Rng&)>;

LawResult run_law(const std::string& suite, const std::string& name, std::size_t cases,
                  std::uint64_t seed, const Check& check) {
  LawResult r{suite, name, 0, 0, {}};
  Rng rng(mix_seed(mix_seed(seed, suite), name));
  for (std::size_t i = 0; i < cases; ++i) {
    ++r.cases;
    Failure bad;
    try {
      bad = check(rng);
    } catch (const std::exception& e) {
      bad = std::string("threw: ") + e.what();
    }
    if (bad && r.failures++ == 0) r.first_failure = "case " + std::to_string(i) + ": " + *bad;
  }
  return r;
}

Failure expect_equal(const SchemaTerm& a, const SchemaTerm& b) {
  if (syntax::term_equal(a, b)) return std::nullopt;
  return syntax::normalize(a).key() + " != " + syntax::normalize(b).key();
}

Failure expect(bool ok, const std::string& what) {
  if (ok) return std::nullopt;
  return what;
}

std::string set_text(const SchemaSet& s) {
  std::string out = "{";
  for (const auto& t : s.elements()) {
    if (out.size() > 1) out += ", ";
    out += t.key();
  }
  return out + "}";
}

Failure expect_equal(const SchemaSet& a, const SchemaSet& b) {
  if (a == b) return std::nullopt;
  return set_text(a) + " != " + set_text(b);
}

SchemaTerm raw(TermOp op, std::vector<SchemaTerm> children) {
  return SchemaTerm::raw(op, "", {}, std::move(children));
}

/// A term whose normal form is a Par, Seq or Encap node.
SchemaTerm random_composite(Rng& rng) {
  while (true) {
    auto n = syntax::normalize(gen::random_term(rng, 4));
    if (n.is(TermOp::Par) || n.is(TermOp::Seq) || n.is(TermOp::Encap)) return n;
  }
}

SchemaTerm null_of(const SchemaTerm& t) { return syntax::make_null(t.type().dom); }

SchemaTerm pick(Rng& rng, const SchemaSet& s) {
  auto it = s.elements().begin();
  std::advance(it, static_cast<std::ptrdiff_t>(rng.below(s.size())));
  return *it;
}

double max_abs_diff(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) return INFINITY;
    for (std::size_t j = 0; j < a[i].size(); ++j) worst = std::max(worst, std::abs(a[i][j] - b[i][j]));
  }
  return worst;
}

Failure kernels_close(const sem::FiniteKernel& a, const sem::FiniteKernel& b, double tol) {
  if (a.dom() != b.dom() || a.cod() != b.cod()) return std::string("kernels differ in type");
  double d = max_abs_diff(a.rows(), b.rows());
  if (d <= tol) return std::nullopt;
  return "max elementwise difference " + format_real(d);
}

Failure rows_stochastic(const sem::FiniteKernel& k, double tol) {
  for (std::size_t x = 0; x < k.dom_size(); ++x) {
    double sum = 0;
    for (double p : k.row(x)) {
      if (p < -tol) return "negative entry in row " + std::to_string(x);
      sum += p;
    }
    if (std::abs(sum - 1) > tol) return "row " + std::to_string(x) + " sums to " + format_real(sum);
  }
  return std::nullopt;
}

Failure tensor_rows_stochastic(const impl::ImplementedSchema& s, double tol) {
  return rows_stochastic(sem::model(s), tol);
}

impl::ImplementedSchema random_stochastic(Rng& rng, const SchemaTerm& atom) {
  const auto layout = impl::tabular_language().layout_of(atom.type());
  std::vector<double> values;
  for (std::size_t r = 0; r * layout.row_width < impl::element_count(layout.dims); ++r) {
    auto row = gen::random_row(rng, layout.row_width);
    values.insert(values.end(), row.begin(), row.end());
  }
  return impl::implement(atom, impl::tabular_language(), impl::ParamTensor(layout.dims, std::move(values)));
}

const SchemaTerm& pool_atom(const std::string& id) {
  for (const auto& t : gen::atom_pool()) {
    if (t.id() == id) return t;
  }
  fail(ErrorCode::UnboundAtomic, "no pool atom " + id);
}

// ---------------------------------------------------------------- syntax

std::vector<LawResult> syntax_suite(std::size_t n, std::uint64_t seed) {
  const std::string S = "syntax";
  std::vector<LawResult> out;
  auto law = [&](const std::string& name, const Check& c) { out.push_back(run_law(S, name, n, seed, c)); };
  auto term = [](Rng& rng) { return gen::random_term(rng, 4); };

  law("normalize.idempotent", [](Rng& rng) {
    auto t = gen::random_term(rng, 8);
    auto once = syntax::normalize(t);
    auto twice = syntax::normalize(once);
    return expect(once == twice, "normalize not idempotent on " + t.key());
  });
  law("par.symmetry", [&](Rng& rng) {
    auto a = term(rng), b = term(rng);
    return expect_equal(syntax::comb_par(a, b), syntax::comb_par(b, a));
  });
  law("par.associativity", [&](Rng& rng) {
    auto a = term(rng), b = term(rng), c = term(rng);
    return expect_equal(syntax::comb_par(syntax::comb_par(a, b), c), syntax::comb_par(a, syntax::comb_par(b, c)));
  });
  law("par.identity", [&](Rng& rng) {
    auto a = term(rng);
    if (auto f = expect_equal(syntax::comb_par(a, null_of(a)), a)) return f;
    return expect_equal(syntax::comb_par(null_of(a), a), a);
  });
  law("par.absorbs_any_unit", [&](Rng& rng) {
    auto a = gen::random_seq_free_term(rng, 4);
    return expect_equal(syntax::comb_par(gen::random_null(rng), a), a);
  });
  law("seq.associativity", [&](Rng& rng) {
    auto a = term(rng), b = term(rng), c = term(rng);
    return expect_equal(syntax::comb_seq(syntax::comb_seq(a, b), c), syntax::comb_seq(a, syntax::comb_seq(b, c)));
  });
  law("seq.identity", [&](Rng& rng) {
    auto a = term(rng);
    if (auto f = expect_equal(syntax::comb_seq(a, null_of(a)), a)) return f;
    return expect_equal(syntax::comb_seq(null_of(a), a), a);
  });
  law("seq.non_commutativity", [](Rng& rng) {
    auto a = gen::random_seq_free_term(rng, 4);
    auto b = gen::random_seq_free_term(rng, 4);
    while (syntax::term_equal(a, b)) b = gen::random_seq_free_term(rng, 4);
    return expect(!syntax::term_equal(syntax::comb_seq(a, b), syntax::comb_seq(b, a)),
                  "seq commuted for " + a.key() + " and " + b.key());
  });
  law("encap.symmetry", [&](Rng& rng) {
    auto a = term(rng), b = term(rng);
    return expect_equal(syntax::encap(a, b), syntax::encap(b, a));
  });
  law("encap.idempotence", [&](Rng& rng) {
    auto a = term(rng);
    return expect_equal(syntax::encap(a, a), a);
  });
  law("encap.weak_associativity", [&](Rng& rng) {
    auto a = term(rng), b = term(rng), c = term(rng);
    return expect_equal(syntax::encap(syntax::encap(a, b), c), syntax::encap(a, syntax::encap(b, c)));
  });
  law("ref.weak_duality", [](Rng& rng) {
    auto psi = random_composite(rng);
    auto [first, rest] = syntax::ref(psi);
    SchemaTerm rebuilt = psi.is(TermOp::Par)   ? syntax::comb_par(first, rest)
                         : psi.is(TermOp::Seq) ? syntax::comb_seq(first, rest)
                                               : syntax::encap(first, rest);
    if (auto f = expect_equal(rebuilt, psi)) return f;
    if (!syntax::specializes(first, psi) || !syntax::specializes(rest, psi)) {
      return Failure("a component of ref(" + psi.key() + ") does not specialize it");
    }
    return Failure();
  });
  law("ctx.neutrality", [&](Rng& rng) {
    auto a = term(rng);
    return expect_equal(syntax::ctx(a, std::span<const SchemaTerm>()), a);
  });
  law("ctx.idempotence", [&](Rng& rng) {
    auto a = term(rng);
    auto phi = gen::random_context(rng, 2, 3);
    auto once = syntax::ctx(a, phi);
    return expect_equal(syntax::ctx(once, phi), once);
  });
  law("ctx.additivity", [&](Rng& rng) {
    auto a = term(rng);
    auto p1 = gen::random_context(rng, 2, 3);
    auto p2 = gen::random_context(rng, 2, 3);
    auto both = p1;
    both.insert(both.end(), p2.begin(), p2.end());
    return expect_equal(syntax::ctx(syntax::ctx(a, p1), p2), syntax::ctx(a, both));
  });
  law("ctx.inclusion", [&](Rng& rng) {
    auto a = term(rng);
    auto p1 = gen::random_context(rng, 2, 3);
    auto p2 = p1;
    auto extra = gen::random_context(rng, 2, 2);
    p2.insert(p2.end(), extra.begin(), extra.end());
    return expect(syntax::specializes(syntax::ctx(a, p2), syntax::ctx(a, p1)),
                  "larger context does not specialize for base " + a.key());
  });

  auto set = [](Rng& rng) { return gen::random_set(rng, 3, 5); };
  law("add.null_neutral", [&](Rng& rng) {
    auto s = set(rng);
    return expect_equal(syntax::add(s, gen::random_null(rng)), s);
  });
  law("add.present_idempotent", [&](Rng& rng) {
    auto s = syntax::add(set(rng), term(rng));
    if (s.empty()) return Failure();
    return expect_equal(syntax::add(s, pick(rng, s)), s);
  });
  law("add.commutative", [&](Rng& rng) {
    auto s = set(rng);
    auto p1 = term(rng), p2 = term(rng);
    return expect_equal(syntax::add(syntax::add(s, p1), p2), syntax::add(syntax::add(s, p2), p1));
  });
  law("add.batch", [&](Rng& rng) {
    auto s = set(rng);
    auto p1 = term(rng), p2 = term(rng);
    return expect_equal(syntax::add(syntax::add(s, p1), p2), syntax::add(s, SchemaSet{p1, p2}));
  });
  law("del.null_neutral", [&](Rng& rng) {
    auto s = set(rng);
    return expect_equal(syntax::del(s, gen::random_null(rng)), s);
  });
  law("del.absent_neutral", [&](Rng& rng) {
    auto s = set(rng);
    auto p = term(rng);
    if (s.contains(p)) return Failure();
    return expect_equal(syntax::del(s, p), s);
  });
  law("del.commutative", [&](Rng& rng) {
    auto s = set(rng);
    auto p1 = s.empty() || rng.coin() ? term(rng) : pick(rng, s);
    auto p2 = s.empty() || rng.coin() ? term(rng) : pick(rng, s);
    return expect_equal(syntax::del(syntax::del(s, p1), p2), syntax::del(syntax::del(s, p2), p1));
  });
  law("del.batch", [&](Rng& rng) {
    auto s = set(rng);
    auto p1 = s.empty() || rng.coin() ? term(rng) : pick(rng, s);
    auto p2 = s.empty() || rng.coin() ? term(rng) : pick(rng, s);
    return expect_equal(syntax::del(syntax::del(s, p1), p2), syntax::del(s, SchemaSet{p1, p2}));
  });
  law("del.absorption", [&](Rng& rng) {
    auto s = set(rng);
    return expect_equal(syntax::del(s, s), SchemaSet{});
  });
  law("duality.del_after_add", [&](Rng& rng) {
    auto s = set(rng);
    auto p = term(rng);
    if (s.contains(p)) return Failure();
    return expect_equal(syntax::del(syntax::add(s, p), p), s);
  });
  law("duality.add_after_del", [&](Rng& rng) {
    auto s = syntax::add(set(rng), term(rng));
    if (s.empty()) return Failure();
    auto p = pick(rng, s);
    return expect_equal(syntax::add(syntax::del(s, p), p), s);
  });
  law("set.oracle", [&](Rng& rng) {
    std::set<std::string> oracle;
    SchemaSet s;
    for (int step = 0; step < 12; ++step) {
      auto p = rng.coin(0.3) && !oracle.empty() ? pick(rng, s) : term(rng);
      auto n = syntax::normalize(p);
      if (rng.coin(0.6)) {
        s = syntax::add(s, p);
        if (!n.is(TermOp::Null)) oracle.insert(n.key());
      } else {
        s = syntax::del(s, p);
        oracle.erase(n.key());
      }
      std::set<std::string> keys;
      for (const auto& t : s.elements()) keys.insert(t.key());
      if (keys != oracle) return Failure("set diverged from oracle at step " + std::to_string(step));
    }
    return Failure();
  });
  law("specializes.reflexive", [&](Rng& rng) {
    auto a = term(rng);
    return expect(syntax::specializes(a, a), "not reflexive on " + a.key());
  });
  law("specializes.antisymmetric", [&](Rng& rng) {
    auto a = term(rng);
    // Related pairs are rare at random, so half of the cases pair a term
    // with one of its components.
    auto b = rng.coin() ? syntax::encap(a, term(rng)) : term(rng);
    if (syntax::specializes(a, b) && syntax::specializes(b, a)) return expect_equal(a, b);
    return Failure();
  });
  law("specializes.transitive", [&](Rng& rng) {
    auto t0 = term(rng);
    auto t1 = syntax::encap(t0, term(rng));
    auto t2 = syntax::encap(t1, term(rng));
    if (!syntax::specializes(t0, t1) || !syntax::specializes(t1, t2)) {
      return Failure("encap tower is not ordered for " + t0.key());
    }
    return expect(syntax::specializes(t0, t2), "not transitive for " + t0.key());
  });
  return out;
}

// ---------------------------------------------------------------- impl

std::vector<LawResult> impl_suite(std::size_t n, std::uint64_t seed) {
  const std::string S = "impl";
  std::vector<LawResult> out;
  auto law = [&](const std::string& name, const Check& c) { out.push_back(run_law(S, name, n, seed, c)); };
  const auto& tab = impl::tabular_language();

  law("fiber_preservation", [&](Rng& rng) {
    const auto& atom = gen::atom_pool()[rng.below(gen::atom_pool().size())];
    impl::ImplementedSchema s = tab.layout_of(atom.type()).stochastic
                                    ? random_stochastic(rng, atom)
                                    : impl::implement(atom, tab, gen::random_tensor(rng, tab.layout_of(atom.type()).dims, -1, 1));
    const double w = rng.uniform01();
    auto u = impl::update(s, [w, &s](const impl::ParamTensor& t) {
      auto r = t;
      const double fill = s.layout.stochastic ? 1.0 / static_cast<double>(s.layout.row_width) : 0.0;
      for (auto& v : r.values) v = (1 - w) * v + w * fill;
      return r;
    });
    impl::ImplLanguage copy("tabular-copy", [&tab](const syntax::SchemaType& t) { return tab.layout_of(t); });
    auto moved = impl::transform(s, copy, [](const impl::ParamTensor& t) { return t; });
    if (!(u.term == s.term) || !(moved.term == s.term)) return Failure("vertical operator changed " + s.term.key());
    return expect(impl::object_ref(u).term_key == s.term.key(), "update changed the object key");
  });

  auto affine = [](Rng& rng) {
    const double a = rng.uniform(-2, 2);
    const double b = rng.uniform(-1, 1);
    return [a, b](const impl::ParamTensor& t) {
      auto r = t;
      for (auto& v : r.values) v = a * v + b;
      return r;
    };
  };
  auto value_schema = [&](Rng& rng) {
    return impl::implement(pool_atom("value"), tab, gen::random_tensor(rng, {3}, -1, 1));
  };
  auto apply_many = [](Rng& rng, const impl::ParamMap& p, const impl::ParamMap& q) -> Failure {
    for (int i = 0; i < 100; ++i) {
      auto t = gen::random_tensor(rng, {3}, -5, 5);
      auto x = p(t);
      auto y = q(t);
      for (std::size_t k = 0; k < x.size(); ++k) {
        if (std::abs(x[k] - y[k]) > 1e-12) return "composites differ by " + format_real(std::abs(x[k] - y[k]));
      }
    }
    return std::nullopt;
  };
  law("morphism.associativity", [&](Rng& rng) {
    auto s = value_schema(rng);
    auto f = impl::update_morphism(s, affine(rng));
    auto g = impl::update_morphism(s, affine(rng));
    auto h = impl::update_morphism(s, affine(rng));
    auto left = impl::compose_morphisms(h, impl::compose_morphisms(g, f));
    auto right = impl::compose_morphisms(impl::compose_morphisms(h, g), f);
    return apply_many(rng, left.param_map, right.param_map);
  });
  law("morphism.unit", [&](Rng& rng) {
    auto s = value_schema(rng);
    auto f = impl::update_morphism(s, affine(rng));
    auto id = impl::identity_morphism(s);
    if (auto bad = apply_many(rng, impl::compose_morphisms(f, id).param_map, f.param_map)) return bad;
    return apply_many(rng, impl::compose_morphisms(id, f).param_map, f.param_map);
  });
  law("stochastic_after_update", [&](Rng& rng) {
    static const char* ids[] = {"vision", "grip", "forward", "inverse", "belief"};
    const auto& atom = pool_atom(ids[rng.below(5)]);
    auto a = random_stochastic(rng, atom);
    auto b = random_stochastic(rng, atom);
    a.id = "a";
    b.id = "b";
    auto m = mind::add_schema(mind::add_schema(mind::MindState{}, a), b);
    exec::ExecContext ctx;
    auto mixed = exec::execute(wf::wf_prim({"update.mix", {"a"}, {"b"}, {{"weight", rng.uniform01()}}}), m, ctx);
    if (auto bad = tensor_rows_stochastic(mixed.schema("a"), 1e-9)) return bad;
    // Scaling a stochastic table either keeps its rows or is rejected.
    try {
      auto scaled = exec::execute(wf::wf_prim({"update.scale", {"a"}, {}, {{"factor", rng.uniform(0.5, 1.5)}}}), m, ctx);
      return tensor_rows_stochastic(scaled.schema("a"), 1e-9);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NonStochasticRow) return Failure();
      throw;
    }
  });
  return out;
}

// ---------------------------------------------------------------- semantics

std::map<std::string, impl::ImplementedSchema> pool_bindings(Rng& rng) {
  std::map<std::string, impl::ImplementedSchema> bind;
  const auto& tab = impl::tabular_language();
  for (const auto& atom : gen::atom_pool()) {
    auto layout = tab.layout_of(atom.type());
    if (layout.stochastic) {
      bind.emplace(atom.id(), random_stochastic(rng, atom));
    } else {
      std::vector<double> values(impl::element_count(layout.dims));
      for (auto& v : values) v = rng.coin() ? 1.0 : 0.0;
      bind.emplace(atom.id(), impl::implement(atom, tab, impl::ParamTensor(layout.dims, values)));
    }
  }
  return bind;
}

/// Pool atoms whose domain matches `base`, usable as its context.
std::vector<SchemaTerm> same_domain(const SchemaTerm& base) {
  std::vector<SchemaTerm> out;
  for (const auto& t : gen::atom_pool()) {
    if (t.type().dom == base.type().dom) out.push_back(t);
  }
  return out;
}

impl::PointMap random_map_on(Rng& rng, const ProductSpace& product) {
  impl::PointMap m;
  const auto n = cardinality(product);
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.coin(0.7)) m.mapping[point_label(product, i)] = point_label(product, rng.below(n));
  }
  return m;
}

std::vector<LawResult> semantics_suite(std::size_t n, std::uint64_t seed) {
  const std::string S = "semantics";
  std::vector<LawResult> out;
  auto law = [&](const std::string& name, const Check& c) { out.push_back(run_law(S, name, n, seed, c)); };
  auto space = [](Rng& rng, const std::string& label) {
    return ProductSpace{gen::random_space(rng, label, 1, 4)};
  };

  law("kleisli.unit", [&](Rng& rng) {
    auto a = space(rng, "A"), b = space(rng, "B");
    auto f = gen::random_kernel(rng, a, b);
    if (auto bad = kernels_close(sem::kernel_compose(sem::identity_kernel(a), f), f, 1e-9)) return bad;
    return kernels_close(sem::kernel_compose(f, sem::identity_kernel(b)), f, 1e-9);
  });
  law("kleisli.associativity", [&](Rng& rng) {
    auto a = space(rng, "A"), b = space(rng, "B"), c = space(rng, "C"), d = space(rng, "D");
    auto f = gen::random_kernel(rng, a, b);
    auto g = gen::random_kernel(rng, b, c);
    auto h = gen::random_kernel(rng, c, d);
    return kernels_close(sem::kernel_compose(sem::kernel_compose(f, g), h),
                         sem::kernel_compose(f, sem::kernel_compose(g, h)), 1e-9);
  });
  law("stochasticity", [&](Rng& rng) {
    auto a = space(rng, "A"), b = space(rng, "B"), c = space(rng, "C");
    auto f = gen::random_kernel(rng, a, b);
    auto g = gen::random_kernel(rng, b, c);
    if (auto bad = rows_stochastic(sem::kernel_compose(f, g), 1e-9)) return bad;
    return rows_stochastic(sem::kernel_product(f, g), 1e-9);
  });
  law("interpret.normal_form", [&](Rng& rng) {
    auto bind = pool_bindings(rng);
    const auto& pool = gen::atom_pool();
    auto a = pool[rng.below(pool.size())];
    auto b = pool[rng.below(pool.size())];
    auto ctxs = same_domain(a);
    auto phi = ctxs[rng.below(ctxs.size())];
    auto t = [&] {
      switch (rng.below(4)) {
        case 0:
          return raw(TermOp::Par, {a, null_of(b)});
        case 1:
          return raw(TermOp::Par, {raw(TermOp::Par, {b, a}), null_of(a)});
        case 2:
          return raw(TermOp::Ctx, {raw(TermOp::Ctx, {a, phi}), phi});
        default:
          return raw(TermOp::Ctx, {raw(TermOp::Par, {a, null_of(a)})});
      }
    }();
    return kernels_close(sem::interpret(t, bind), sem::interpret(syntax::normalize(t), bind), 0);
  });
  law("interpret.par_matches_product", [&](Rng& rng) {
    auto bind = pool_bindings(rng);
    const auto& pool = gen::atom_pool();
    auto a = pool[rng.below(pool.size())];
    auto b = pool[rng.below(pool.size())];
    auto n = syntax::normalize(syntax::comb_par(a, b));
    auto k = sem::kernel_product(sem::model(bind.at(n.children()[0].id())),
                                 sem::model(bind.at(n.children()[1].id())));
    return kernels_close(sem::interpret(syntax::comb_par(a, b), bind), k, 0);
  });
  law("presheaf.identity", [&](Rng& rng) {
    auto s = random_stochastic(rng, pool_atom("forward"));
    auto inst = sem::inst_enumerate(s);
    return expect(sem::inst_reindex(impl::identity_morphism(s), inst) == inst, "identity moved instances");
  });
  law("presheaf.contravariance", [&](Rng& rng) {
    auto s = random_stochastic(rng, pool_atom("forward"));
    auto m1 = impl::identity_morphism(s);
    auto m2 = impl::identity_morphism(s);
    for (auto* m : {&m1, &m2}) {
      m->pull_dom = random_map_on(rng, s.term.type().dom);
      m->pull_cod = random_map_on(rng, s.term.type().cod);
    }
    auto inst = sem::inst_enumerate(s);
    auto direct = sem::inst_reindex(impl::compose_morphisms(m2, m1), inst);
    auto stepwise = sem::inst_reindex(m1, sem::inst_reindex(m2, inst));
    return expect(direct == stepwise, "reindex along a composite differs from the stepwise pullback");
  });
  return out;
}

// ---------------------------------------------------------------- workflow

std::vector<std::string> table_ids(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("s" + std::to_string(i));
  return ids;
}

Failure same(const mind::MindState& a, const mind::MindState& b, const std::string& what) {
  return expect(mind::same_state(a, b), what);
}

/// Branch of a Par node evaluated on its own part of the mind.
mind::MindState run_branch(const wf::Workflow& w, const mind::MindState& m, std::uint64_t seed) {
  exec::ExecContext ctx;
  ctx.seed = seed;
  auto fp = wf::footprint(w);
  auto result = exec::execute(w, mind::restrict_to(m, fp.touched()), ctx);
  return mind::restrict_to(result, fp.writes);
}

std::vector<LawResult> workflow_suite(std::size_t n, std::uint64_t seed) {
  const std::string S = "workflow";
  std::vector<LawResult> out;
  auto law = [&](const std::string& name, std::size_t count, const Check& c) {
    out.push_back(run_law(S, name, count, seed, c));
  };
  auto setup = [](Rng& rng) {
    const auto size = 2 + rng.below(4);
    return std::pair{gen::random_table_mind(rng, size), table_ids(size)};
  };
  auto run = [](const wf::Workflow& w, const mind::MindState& m, std::uint64_t s) {
    exec::ExecContext ctx;
    ctx.seed = s;
    return exec::execute(w, m, ctx);
  };

  law("action.seq_identity", n, [&](Rng& rng) {
    auto [m, ids] = setup(rng);
    auto w = gen::random_workflow(rng, ids, 3);
    const auto s = rng.next();
    auto plain = run(w, m, s);
    if (auto bad = same(run(wf::Workflow::unit_seq(), m, s), m, "unit_seq changed the state")) return bad;
    if (auto bad = same(run(wf::Workflow::raw_seq(wf::Workflow::unit_seq(), w), m, s), plain, "left unit")) return bad;
    return same(run(wf::Workflow::raw_seq(w, wf::Workflow::unit_seq()), m, s), plain, "right unit");
  });
  law("action.par_identity", n, [&](Rng& rng) {
    auto [m, ids] = setup(rng);
    auto w = gen::random_workflow(rng, ids, 3);
    const auto s = rng.next();
    auto plain = run(w, m, s);
    if (auto bad = same(run(wf::Workflow::unit_par(), m, s), m, "unit_par changed the state")) return bad;
    if (auto bad = same(run(wf::Workflow::raw_par(wf::Workflow::unit_par(), w), m, s), plain, "left unit")) return bad;
    return same(run(wf::Workflow::raw_par(w, wf::Workflow::unit_par()), m, s), plain, "right unit");
  });
  law("action.sequential_coherence", n, [&](Rng& rng) {
    auto [m, ids] = setup(rng);
    auto a = gen::random_workflow(rng, ids, 2);
    auto b = gen::random_workflow(rng, ids, 2);
    const auto s = rng.next();
    return same(run(wf::Workflow::raw_seq(a, b), m, s), run(b, run(a, m, s), s),
                "(a•b)⋆M differs from b⋆(a⋆M)");
  });
  law("action.parallel_coherence", n, [&](Rng& rng) {
    auto [m, ids] = setup(rng);
    const auto cut = 1 + rng.below(ids.size() - 1);
    std::vector<std::string> left(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(cut));
    std::vector<std::string> right(ids.begin() + static_cast<std::ptrdiff_t>(cut), ids.end());
    auto a = gen::random_workflow(rng, left, 2);
    auto b = gen::random_workflow(rng, right, 2);
    const auto s = rng.next();
    auto wa = wf::footprint(a).writes;
    auto wb = wf::footprint(b).writes;
    std::set<std::string> written = wa;
    written.insert(wb.begin(), wb.end());
    auto expected = mind::mind_par(mind::mind_par(mind::remove_ids(m, written), run_branch(a, m, s)),
                                   run_branch(b, m, s));
    return same(run(wf::Workflow::raw_par(a, b), m, s), expected, "(a⊗b)⋆M differs from the merged branches");
  });
  law("loop.bounded_deterministic", n, [&](Rng& rng) {
    auto [m, ids] = setup(rng);
    wf::PredicateRef cond{"sup_change_below", {ids[rng.below(ids.size())]}, rng.uniform(0, 0.5), {}};
    if (rng.coin(0.3)) cond = wf::PredicateRef{"always_false", {}, 0, {}};
    const auto max_iter = 1 + rng.below(6);
    auto w = wf::wf_loop(cond, gen::random_workflow(rng, ids, 2), max_iter);
    const auto s = rng.next();
    exec::ExecContext c1;
    c1.seed = s;
    exec::ExecContext c2;
    c2.seed = s;
    auto r1 = exec::execute(w, m, c1);
    auto r2 = exec::execute(w, m, c2);
    if (c1.last_loop_iterations > max_iter || c1.last_loop_iterations == 0) {
      return Failure("loop ran " + std::to_string(c1.last_loop_iterations) + " times, bound " +
                     std::to_string(max_iter));
    }
    if (c1.log != c2.log) return Failure("loop logs differ between runs");
    return same(r1, r2, "loop is not deterministic");
  });
  law("interchange.preserves_execution", std::max<std::size_t>(1, n / 2), [&](Rng& rng) {
    auto [m, ids] = setup(rng);
    const auto cut = 1 + rng.below(ids.size() - 1);
    std::vector<std::string> left(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(cut));
    std::vector<std::string> right(ids.begin() + static_cast<std::ptrdiff_t>(cut), ids.end());
    auto w = wf::Workflow::raw_seq(
        wf::Workflow::raw_par(gen::random_workflow(rng, left, 2), gen::random_workflow(rng, right, 2)),
        wf::Workflow::raw_par(gen::random_workflow(rng, left, 2), gen::random_workflow(rng, right, 2)));
    auto r = wf::interchange_rewrite(w);
    if (!r.applied) return Failure("rewrite refused a disjoint instance");
    const auto s = rng.next();
    return same(run(w, m, s), run(r.workflow, m, s), "rewritten workflow executes differently");
  });
  law("interchange.refuses_conflicts", n, [&](Rng& rng) {
    auto [m, ids] = setup(rng);
    auto shared = ids[rng.below(ids.size())];
    auto side = [&] { return gen::random_workflow(rng, ids, 1); };
    auto touching = wf::wf_prim({"update.shift", {shared}, {}, {{"by", 1}}});
    auto w = wf::Workflow::raw_seq(wf::Workflow::raw_par(touching, side()),
                                   wf::Workflow::raw_par(side(), touching));
    auto r = wf::interchange_rewrite(w);
    if (r.applied) return Failure("rewrite applied across a shared write on " + shared);
    return expect(r.workflow == w, "refused rewrite changed the workflow");
  });
  return out;
}

// ---------------------------------------------------------------- memory

mind::MindState with_spaces(mind::MindState m, const mind::MindSpaces& spaces) {
  m.spaces = spaces;
  return m;
}

std::vector<LawResult> memory_suite(std::size_t n, std::uint64_t seed) {
  const std::string S = "memory";
  std::vector<LawResult> out;
  auto law = [&](const std::string& name, const Check& c) { out.push_back(run_law(S, name, n, seed, c)); };

  law("coherence_square", [](Rng& rng) {
    auto dom = gen::random_space(rng, "x", 1, 4, SpaceRole::Observation);
    auto cod = gen::random_space(rng, "y", 1, 4, SpaceRole::Observation);
    auto type = syntax::SchemaType{syntax::SchemaKind::Predictive, {dom}, {cod}};
    auto target_term = syntax::make_atomic("K", type);
    auto source_term = syntax::make_atomic("J", type);
    auto kt = gen::random_kernel(rng, {dom}, {cod});
    std::vector<double> tv;
    for (const auto& row : kt.rows()) tv.insert(tv.end(), row.begin(), row.end());
    const auto& tab = impl::tabular_language();
    auto target = impl::implement(target_term, tab, impl::ParamTensor({dom.size(), cod.size()}, tv));

    // The source table is the target read through two relabelings, so the
    // pullback of every target instance is an instance of the source.
    auto pd = gen::random_permutation(rng, dom);
    auto pc = gen::random_permutation(rng, cod);
    std::vector<double> sv(tv.size());
    for (std::size_t x = 0; x < dom.size(); ++x) {
      for (std::size_t y = 0; y < cod.size(); ++y) {
        auto sx = *dom.index_of(pd.apply(dom.points()[x]));
        auto sy = *cod.index_of(pc.apply(cod.points()[y]));
        sv[sx * cod.size() + sy] = tv[x * cod.size() + y];
      }
    }
    auto source = impl::implement(source_term, tab, impl::ParamTensor({dom.size(), cod.size()}, sv));

    impl::ImplMorphism m;
    m.src = impl::object_ref(source);
    m.dst = impl::object_ref(target);
    m.syn = "relabel";
    m.lang_from = m.lang_to = "tabular";
    m.param_map = [](const impl::ParamTensor& t) { return t; };
    m.pull_dom = pd;
    m.pull_cod = pc;

    auto all = sem::inst_enumerate(target);
    mind::MemorySubsystem mem("episodic");
    const auto prior = rng.below(3);
    for (std::size_t i = 0; i < prior && !all.empty(); ++i) mem = mind::mem_write(mem, target, all[rng.below(all.size())]);
    auto inst = all[rng.below(all.size())];

    auto via_write = mind::mem_reindex(mind::mem_write(mem, target, inst), m, "K", "J");
    auto pulled = sem::inst_reindex(m, std::vector{inst}).front();
    auto via_reindex = mind::mem_write(mind::mem_reindex(mem, m, "K", "J"), source, pulled);
    return expect(via_write == via_reindex, "Data(m)∘write differs from write∘Inst(m)");
  });
  law("mind_par.monoid", [](Rng& rng) {
    auto m = gen::random_table_mind(rng, 6);
    auto a = with_spaces(mind::restrict_to(m, {"s0", "s1"}), m.spaces);
    auto b = with_spaces(mind::restrict_to(m, {"s2", "s3"}), m.spaces);
    auto c = mind::restrict_to(m, {"s4", "s5"});
    if (rng.coin()) c = mind::add_memory(c, mind::MemorySubsystem("mem"));
    auto left = mind::mind_par(mind::mind_par(a, b), c);
    auto right = mind::mind_par(a, mind::mind_par(b, c));
    if (auto bad = same(left, right, "mind_par is not associative")) return bad;
    if (auto bad = same(mind::mind_par(a, mind::empty_mind()), a, "right unit")) return bad;
    return same(mind::mind_par(mind::empty_mind(), a), a, "left unit");
  });
  law("module.deterministic", [](Rng& rng) {
    auto m = gen::random_table_mind(rng, 3);
    auto w = gen::random_workflow(rng, table_ids(3), 3);
    auto module = mind::make_module("task", {}, {}, {w}, {"always_true", {}, 0, {}}, wf::operator_names(w));
    m = mind::add_module(m, module);
    const auto s = rng.next();
    auto r1 = exec::run_module(m, "task", 0, s);
    auto r2 = exec::run_module(m, "task", 0, s);
    if (r1.log != r2.log || r1.success != r2.success) return Failure("module runs differ");
    return same(r1.state, r2.state, "module results differ");
  });
  law("module.signature_closure", [](Rng& rng) {
    auto m = gen::random_table_mind(rng, 3);
    auto w = gen::random_workflow(rng, table_ids(3), 3);
    std::set<std::string> signature;
    for (const auto& name : {"update.scale", "update.shift", "update.mix"}) {
      if (rng.coin(0.7)) signature.insert(name);
    }
    bool static_ok = true;
    try {
      mind::make_module("task", {}, {}, {w}, {"always_true", {}, 0, {}}, signature);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SignatureViolation) throw;
      static_ok = false;
    }
    bool runtime_ok = true;
    exec::ExecContext ctx;
    ctx.signature = signature;
    try {
      exec::execute(w, m, ctx);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SignatureViolation) throw;
      runtime_ok = false;
    }
    return expect(static_ok == runtime_ok, "static and runtime signature checks disagree");
  });
  return out;
}

void append(std::vector<LawResult>& out, std::vector<LawResult> more) {
  out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
}

}  // namespace

std::vector<LawResult> syntax_laws(std::size_t cases, std::uint64_t seed) { return syntax_suite(cases, seed); }
std::vector<LawResult> impl_laws(std::size_t cases, std::uint64_t seed) { return impl_suite(cases, seed); }
std::vector<LawResult> semantics_laws(std::size_t cases, std::uint64_t seed) {
  return semantics_suite(cases, seed);
}
std::vector<LawResult> workflow_laws(std::size_t cases, std::uint64_t seed) {
  return workflow_suite(cases, seed);
}
std::vector<LawResult> memory_laws(std::size_t cases, std::uint64_t seed) { return memory_suite(cases, seed); }

std::vector<LawResult> run_all(std::size_t cases, std::uint64_t seed) {
  std::vector<LawResult> out;
  append(out, syntax_laws(cases, seed));
  append(out, impl_laws(cases, seed));
  append(out, semantics_laws(cases, seed));
  append(out, workflow_laws(cases, seed));
  append(out, memory_laws(cases, seed));
  return out;
}

bool all_passed(const std::vector<LawResult>& results) {
  for (const auto& r : results) {
    if (!r.passed()) return false;
  }
  return !results.empty();
}

nlohmann::json to_json(const std::vector<LawResult>& results) {
  auto arr = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json j{{"suite", r.suite},
                     {"law", r.name},
                     {"cases", r.cases},
                     {"passed", r.cases - r.failures},
                     {"failures", r.failures}};
    if (r.failures) j["first_failure"] = r.first_failure;
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace schemacalc::laws
