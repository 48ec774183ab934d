#include "schemacalc/action.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "schemacalc/error.hpp"

namespace schemacalc::exec {

template <typename Fn>
const Fn& Registry<Fn>::find(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) fail(ErrorCode::UnresolvedTarget, "nothing registered as '" + name + "'");
  return it->second;
}

template <typename Fn>
std::set<std::string> Registry<Fn>::names() const {
  std::set<std::string> out;
  for (const auto& [k, v] : entries_) out.insert(k);
  return out;
}

template class Registry<Operator>;
template class Registry<Predicate>;

namespace {

using impl::ParamTensor;
using mind::ImplementedSchema;
using wf::Prim;
using wf::PredicateRef;
using wf::WfOp;

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += items[i];
  }
  return out;
}

double arg_or(const Prim& p, const std::string& key, double fallback) {
  auto it = p.args.find(key);
  return it == p.args.end() ? fallback : it->second;
}

const ImplementedSchema& schema_arg(const MindState& m, const std::string& id, const Prim& p) {
  auto it = m.schemas.find(id);
  if (it == m.schemas.end()) {
    fail(ErrorCode::UnresolvedTarget, p.name + ": no schema '" + id + "'");
  }
  return it->second;
}

const mind::MemorySubsystem& memory_arg(const MindState& m, const std::string& id, const Prim& p) {
  auto it = m.memories.find(id);
  if (it == m.memories.end()) {
    fail(ErrorCode::UnresolvedTarget, p.name + ": no memory '" + id + "'");
  }
  return it->second;
}

void need_count(const Prim& p, std::size_t targets, std::size_t reads) {
  if (p.targets.size() < targets || p.reads.size() < reads) {
    fail(ErrorCode::InvalidArgument, p.name + " needs " + std::to_string(targets) +
                                         " target(s) and " + std::to_string(reads) + " read(s)");
  }
}

Operator elementwise(std::function<double(double, const Prim&)> fn) {
  return [fn = std::move(fn)](const MindState& m, const Prim& p, ExecContext&) {
    need_count(p, 1, 0);
    MindState out = m;
    for (const auto& id : p.targets) {
      auto next = impl::update(schema_arg(m, id, p), [&](const ParamTensor& t) {
        ParamTensor r = t;
        for (auto& v : r.values) v = fn(v, p);
        return r;
      });
      out.schemas.insert_or_assign(id, std::move(next));
    }
    return out;
  };
}

MindState op_mix(const MindState& m, const Prim& p, ExecContext&) {
  need_count(p, 1, 1);
  const auto& src = schema_arg(m, p.reads[0], p);
  const double w = arg_or(p, "weight", 0.5);
  MindState out = m;
  for (const auto& id : p.targets) {
    const auto& s = schema_arg(m, id, p);
    if (s.params.shape != src.params.shape) {
      fail(ErrorCode::ShapeMismatch, "update.mix: " + id + " and " + src.id + " differ in shape");
    }
    out.schemas.insert_or_assign(id, impl::update(s, [&](const ParamTensor& t) {
                                   ParamTensor r = t;
                                   for (std::size_t i = 0; i < r.size(); ++i) {
                                     r[i] = (1 - w) * t[i] + w * src.params[i];
                                   }
                                   return r;
                                 }));
  }
  return out;
}

MindState op_del(const MindState& m, const Prim& p, ExecContext&) {
  require_ids(m, p.targets, p.name);
  return mind::remove_ids(m, {p.targets.begin(), p.targets.end()});
}

MindState op_comb_par(const MindState& m, const Prim& p, ExecContext&) {
  need_count(p, 1, 2);
  const auto& a = schema_arg(m, p.reads[0], p);
  const auto& b = schema_arg(m, p.reads[1], p);
  for (const auto* s : {&a, &b}) {
    auto n = syntax::normalize(s->term);
    if (s->deterministic() || n.is(syntax::TermOp::Par) || n.is(syntax::TermOp::Null)) {
      fail(ErrorCode::TypeMismatch, "comb_par: " + s->id + " must be a stochastic non-parallel schema");
    }
  }
  auto term = syntax::comb_par(a.term, b.term);
  const bool a_first = term.children()[0] == syntax::normalize(a.term);
  const auto& first = a_first ? a : b;
  const auto& second = a_first ? b : a;
  auto k = sem::kernel_product(sem::model(first), sem::model(second));
  std::vector<double> values;
  for (const auto& row : k.rows()) values.insert(values.end(), row.begin(), row.end());
  const auto& lang = a.lang;
  auto layout = lang.layout_of(term.type());
  auto joined = impl::implement(term, lang, ParamTensor(layout.dims, std::move(values)), p.targets[0]);
  return mind::add_schema(m, std::move(joined));
}

MindState op_mem_sample(const MindState& m, const Prim& p, ExecContext& ctx) {
  need_count(p, 1, 1);
  const auto& memory = p.targets[0];
  const auto& schema = schema_arg(m, p.reads[0], p);
  auto mem = memory_arg(m, memory, p);
  auto k = sem::model(schema);
  const auto n = static_cast<std::size_t>(arg_or(p, "n", 1));
  for (std::size_t i = 0; i < n; ++i) {
    auto count = mem.instances(schema.id).size();
    Rng rng(mix_seed(mix_seed(mix_seed(ctx.seed, memory), schema.id), count));
    auto x = rng.below(k.dom_size());
    auto y = sample_index(k.row(x), rng.uniform01());
    mem = mind::mem_write(mem, schema,
                          {point_label(k.dom(), x), point_label(k.cod(), y), k.row(x)[y]});
  }
  MindState out = m;
  out.memories.insert_or_assign(memory, std::move(mem));
  return out;
}

MindState op_mem_forget(const MindState& m, const Prim& p, ExecContext&) {
  need_count(p, 1, 0);
  MindState out = m;
  for (const auto& memory : p.targets) {
    out.memories.insert_or_assign(
        memory, mind::mem_forget(memory_arg(m, memory, p), {p.reads.begin(), p.reads.end()}));
  }
  return out;
}

const ImplementedSchema& pred_schema(const MindState& m, const std::string& id, const PredicateRef& p) {
  auto it = m.schemas.find(id);
  if (it == m.schemas.end()) fail(ErrorCode::UnresolvedTarget, p.name + ": no schema '" + id + "'");
  return it->second;
}

bool sup_change_below(const MindState& before, const MindState& after, const PredicateRef& p,
                      ExecContext& ctx) {
  double delta = 0;
  for (const auto& id : p.args) {
    const auto& a = pred_schema(before, id, p).params;
    const auto& b = pred_schema(after, id, p).params;
    if (a.shape != b.shape) {
      delta = std::numeric_limits<double>::infinity();
      continue;
    }
    for (std::size_t i = 0; i < a.size(); ++i) delta = std::max(delta, std::abs(b[i] - a[i]));
  }
  ctx.series["sup_delta:" + join(p.args)].push_back(delta);
  return delta < p.threshold;
}

bool mem_count_at_least(const MindState&, const MindState& after, const PredicateRef& p,
                        ExecContext&) {
  if (p.args.size() != 2) fail(ErrorCode::InvalidArgument, p.name + " takes [memory, schema]");
  auto it = after.memories.find(p.args[0]);
  if (it == after.memories.end()) {
    fail(ErrorCode::UnresolvedTarget, p.name + ": no memory '" + p.args[0] + "'");
  }
  return static_cast<double>(it->second.instances(p.args[1]).size()) >= p.threshold;
}

bool table_max_below(const MindState&, const MindState& after, const PredicateRef& p, ExecContext&) {
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& id : p.args) {
    for (double v : pred_schema(after, id, p).params.values) top = std::max(top, v);
  }
  return top < p.threshold;
}

}  // namespace

void require_ids(const MindState& m, const std::vector<std::string>& ids, const std::string& who) {
  for (const auto& id : ids) {
    if (!m.schemas.count(id) && !m.memories.count(id)) {
      fail(ErrorCode::UnresolvedTarget, who + ": nothing named '" + id + "'");
    }
  }
}

OperatorRegistry builtin_operators() {
  OperatorRegistry r;
  r.add("update.scale", elementwise([](double v, const Prim& p) { return v * arg_or(p, "factor", 1); }));
  r.add("update.shift", elementwise([](double v, const Prim& p) { return v + arg_or(p, "by", 0); }));
  r.add("update.mix", op_mix);
  r.add("del", op_del);
  r.add("comb_par", op_comb_par);
  r.add("mem.sample", op_mem_sample);
  r.add("mem.forget", op_mem_forget);
  return r;
}

PredicateRegistry builtin_predicates() {
  PredicateRegistry r;
  r.add("always_true", [](const MindState&, const MindState&, const PredicateRef&, ExecContext&) {
    return true;
  });
  r.add("always_false", [](const MindState&, const MindState&, const PredicateRef&, ExecContext&) {
    return false;
  });
  r.add("sup_change_below", sup_change_below);
  r.add("mem_count_at_least", mem_count_at_least);
  r.add("table_max_below", table_max_below);
  return r;
}

MindState execute(const wf::Workflow& w, const MindState& m, ExecContext& ctx) {
  switch (w.op()) {
    case WfOp::UnitSeq:
    case WfOp::UnitPar:
      return m;
    case WfOp::Prim: {
      const auto& p = w.prim();
      if (ctx.signature && !ctx.signature->count(p.name)) {
        fail(ErrorCode::SignatureViolation, "operator '" + p.name + "' is outside the signature");
      }
      const auto& op = ctx.operators.find(p.name);
      require_ids(m, p.reads, p.name);
      ctx.log.push_back("prim " + p.name + " targets=[" + join(p.targets) + "] reads=[" +
                        join(p.reads) + "]");
      return op(m, p, ctx);
    }
    case WfOp::Seq:
      return execute(w.children()[1], execute(w.children()[0], m, ctx), ctx);
    case WfOp::Par: {
      auto fa = wf::footprint(w.children()[0]);
      auto fb = wf::footprint(w.children()[1]);
      if (wf::conflicts(fa, fb)) {
        fail(ErrorCode::OverlappingParTargets, "parallel branches touch a common id");
      }
      auto ra = execute(w.children()[0], mind::restrict_to(m, fa.touched()), ctx);
      auto rb = execute(w.children()[1], mind::restrict_to(m, fb.touched()), ctx);
      auto written = fa.writes;
      written.insert(fb.writes.begin(), fb.writes.end());
      auto rest = mind::remove_ids(m, written);
      return mind::mind_par(mind::mind_par(rest, mind::restrict_to(ra, fa.writes)),
                            mind::restrict_to(rb, fb.writes));
    }
    case WfOp::Loop: {
      const auto& cond = w.cond();
      const auto& pred = ctx.predicates.find(cond.name);
      MindState cur = m;
      std::size_t n = 0;
      bool done = false;
      do {
        MindState prev = cur;
        cur = execute(w.children()[0], prev, ctx);
        ++n;
        done = pred(prev, cur, cond, ctx);
        ctx.log.push_back("loop " + cond.name + " iter=" + std::to_string(n) +
                          (done ? " stop" : ""));
      } while (!done && n < w.max_iter());
      if (!done) ctx.max_iter_exceeded = true;
      ctx.last_loop_iterations = n;
      return cur;
    }
  }
  fail(ErrorCode::InvalidArgument, "unreachable workflow op");
}

ModuleRun run_module(const MindState& m, const std::string& module, std::size_t workflow_index,
                     std::uint64_t seed, const OperatorRegistry& operators,
                     const PredicateRegistry& predicates) {
  const auto& mod = m.module(module);
  if (workflow_index >= mod.workflows.size()) {
    fail(ErrorCode::InvalidArgument, "module " + module + " has no workflow " +
                                         std::to_string(workflow_index));
  }
  ExecContext ctx{operators, predicates, seed, mod.signature, {}, {}, false, 0};
  auto result = execute(mod.workflows[workflow_index], m, ctx);
  bool success = ctx.predicates.find(mod.success.name)(m, result, mod.success, ctx);
  return ModuleRun{std::move(result), success, ctx.max_iter_exceeded, std::move(ctx.log),
                   std::move(ctx.series)};
}

}  // namespace schemacalc::exec
