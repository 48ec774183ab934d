#include "schemacalc/causal.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <tuple>

#include "schemacalc/error.hpp"

namespace schemacalc::causal {

namespace {

constexpr double kTieTolerance = 1e-9;

std::vector<std::size_t> as_vector(const std::set<std::size_t>& s) { return {s.begin(), s.end()}; }

std::size_t config_index(const std::vector<std::size_t>& parents,
                         const std::vector<std::size_t>& sizes, const std::vector<std::size_t>& values) {
  std::size_t cfg = 0;
  for (std::size_t i = 0; i < parents.size(); ++i) cfg = cfg * sizes[i] + values[parents[i]];
  return cfg;
}

std::vector<double> uniform_row(std::size_t k) { return std::vector<double>(k, 1.0 / static_cast<double>(k)); }

Cpt uniform_cpt(const std::vector<Variable>& vars, std::size_t v, const std::set<std::size_t>& parents) {
  std::size_t configs = 1;
  for (auto p : parents) configs *= vars[p].size();
  return Cpt{as_vector(parents), std::vector<std::vector<double>>(configs, uniform_row(vars[v].size()))};
}

/// Counts over data columns `target` and `parents` (in the given order).
std::vector<std::vector<double>> count_table(const Dataset& data, std::size_t target,
                                             const std::vector<std::size_t>& parents) {
  std::vector<std::size_t> sizes;
  std::size_t configs = 1;
  for (auto p : parents) {
    sizes.push_back(data.variables[p].size());
    configs *= sizes.back();
  }
  std::vector<std::vector<double>> counts(configs, std::vector<double>(data.variables[target].size(), 0));
  for (const auto& row : data.rows) counts[config_index(parents, sizes, row)][row[target]] += 1;
  return counts;
}

std::vector<std::vector<double>> smooth(std::vector<std::vector<double>> counts, double alpha) {
  for (auto& row : counts) {
    double total = 0;
    for (double c : row) total += c;
    const double denom = total + alpha * static_cast<double>(row.size());
    if (denom <= 0) {
      row = uniform_row(row.size());
      continue;
    }
    for (double& c : row) c = (c + alpha) / denom;
  }
  return counts;
}

std::size_t data_column(const Dataset& data, const Variable& var) {
  auto col = data.index_of(var.name);
  if (data.variables[col].domain != var.domain) {
    fail(ErrorCode::ShapeMismatch, "data domain of " + var.name + " differs from the model's");
  }
  return col;
}

void refit(CausalSchema& c, std::size_t v, const Dataset* data, double alpha) {
  const auto& parents = c.dag.parents(v);
  if (!data) {
    c.cpts[v] = uniform_cpt(c.variables, v, parents);
    return;
  }
  if (data->rows.empty()) fail(ErrorCode::EmptyDataset, "cannot fit tables to an empty dataset");
  std::vector<std::size_t> cols;
  for (auto p : parents) cols.push_back(data_column(*data, c.variables[p]));
  c.cpts[v] = Cpt{as_vector(parents), smooth(count_table(*data, data_column(*data, c.variables[v]), cols), alpha)};
}

std::vector<std::string> infer_domain(const std::vector<std::string>& seen) {
  std::vector<std::string> labels(seen.begin(), seen.end());
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  bool numeric = std::all_of(labels.begin(), labels.end(), [](const std::string& s) { return parse_real(s).has_value(); });
  if (numeric) {
    std::stable_sort(labels.begin(), labels.end(), [](const std::string& a, const std::string& b) {
      return *parse_real(a) < *parse_real(b);
    });
  }
  return labels;
}

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    auto field = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
    out.emplace_back(field);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

struct Candidate {
  MoveKind kind = MoveKind::Add;
  std::size_t source = 0;
  std::size_t target = 0;
  double delta = 0;
};

class MoveSelector {
 public:
  explicit MoveSelector(const std::vector<Variable>& vars) : vars_(vars) {}

  void offer(const Candidate& c) {
    if (!found_ || c.delta > best_.delta + kTieTolerance ||
        (c.delta >= best_.delta - kTieTolerance && key(c) < key(best_))) {
      best_ = c;
      found_ = true;
    }
  }
  /// Null until something was offered.
  const Candidate* best() const { return found_ ? &best_ : nullptr; }

 private:
  std::tuple<int, const std::string&, const std::string&> key(const Candidate& c) const {
    return {static_cast<int>(c.kind), vars_[c.source].name, vars_[c.target].name};
  }
  const std::vector<Variable>& vars_;
  Candidate best_;
  bool found_ = false;
};

}  // namespace

Dag::Dag(std::size_t n) : parents_(n) {}

std::set<std::size_t> Dag::children(std::size_t v) const {
  std::set<std::size_t> out;
  for (std::size_t w = 0; w < size(); ++w) {
    if (parents_[w].count(v)) out.insert(w);
  }
  return out;
}

std::vector<Edge> Dag::edges() const {
  std::vector<Edge> out;
  for (std::size_t v = 0; v < size(); ++v) {
    for (auto u : parents_[v]) out.emplace_back(u, v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t Dag::edge_count() const {
  std::size_t n = 0;
  for (const auto& p : parents_) n += p.size();
  return n;
}

bool Dag::reaches(std::size_t from, std::size_t to) const {
  std::vector<bool> seen(size(), false);
  std::vector<std::size_t> stack{to};
  // Walk parent links backwards from `to`.
  while (!stack.empty()) {
    auto w = stack.back();
    stack.pop_back();
    if (w == from) return true;
    if (seen[w]) continue;
    seen[w] = true;
    for (auto p : parents_[w]) stack.push_back(p);
  }
  return false;
}

std::vector<std::size_t> Dag::topological_order() const {
  std::vector<std::size_t> indegree(size());
  for (std::size_t v = 0; v < size(); ++v) indegree[v] = parents_[v].size();
  std::set<std::size_t> ready;
  for (std::size_t v = 0; v < size(); ++v) {
    if (indegree[v] == 0) ready.insert(v);
  }
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    auto v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (auto w : children(v)) {
      if (--indegree[w] == 0) ready.insert(w);
    }
  }
  if (order.size() != size()) fail(ErrorCode::CycleCreated, "graph has a directed cycle");
  return order;
}

std::size_t CausalSchema::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].name == name) return i;
  }
  fail(ErrorCode::UnknownVariable, "no variable '" + name + "'");
}

std::size_t Dataset::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].name == name) return i;
  }
  fail(ErrorCode::UnknownVariable, "dataset has no variable '" + name + "'");
}

void check_factorization(const CausalSchema& c) {
  const std::size_t n = c.variables.size();
  if (c.dag.size() != n || c.cpts.size() != n) {
    fail(ErrorCode::ShapeMismatch, "one DAG node and one table per variable required");
  }
  c.dag.topological_order();
  for (std::size_t v = 0; v < n; ++v) {
    const auto& cpt = c.cpts[v];
    if (cpt.parents != as_vector(c.dag.parents(v))) {
      fail(ErrorCode::ShapeMismatch, "table of " + c.variables[v].name + " does not follow its DAG parents");
    }
    std::size_t configs = 1;
    for (auto p : cpt.parents) configs *= c.variables[p].size();
    if (cpt.rows.size() != configs) fail(ErrorCode::ShapeMismatch, "table of " + c.variables[v].name + " has the wrong row count");
    for (const auto& row : cpt.rows) {
      if (row.size() != c.variables[v].size()) fail(ErrorCode::ShapeMismatch, "table row of the wrong width");
      double sum = 0;
      for (double p : row) {
        if (!(p >= 0)) fail(ErrorCode::NonStochasticRow, "negative probability in " + c.variables[v].name);
        sum += p;
      }
      if (std::abs(sum - 1) > sem::kProbTolerance) {
        fail(ErrorCode::NonStochasticRow, "table row of " + c.variables[v].name + " sums to " + format_real(sum));
      }
    }
  }
}

CausalSchema make_uniform(std::vector<Variable> variables, Dag dag) {
  if (dag.size() != variables.size()) fail(ErrorCode::ShapeMismatch, "DAG size differs from variable count");
  for (const auto& v : variables) {
    if (v.name.empty() || v.domain.empty()) fail(ErrorCode::InvalidArgument, "variables need a name and values");
  }
  dag.topological_order();
  CausalSchema c{std::move(variables), std::move(dag), {}};
  for (std::size_t v = 0; v < c.variables.size(); ++v) c.cpts.push_back(uniform_cpt(c.variables, v, c.dag.parents(v)));
  return c;
}

std::vector<Variable> numbered_variables(std::size_t n, std::size_t values) {
  std::vector<Variable> out;
  for (std::size_t i = 0; i < n; ++i) {
    Variable v{"X" + std::to_string(i), {}};
    for (std::size_t k = 0; k < values; ++k) v.domain.push_back(std::to_string(k));
    out.push_back(std::move(v));
  }
  return out;
}

Dataset dataset_from_csv(std::string_view text, const std::vector<Variable>* domains) {
  std::vector<std::vector<std::string>> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    auto line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(split_line(line));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  if (lines.empty()) fail(ErrorCode::ParseError, "csv: missing header row");
  const auto& header = lines[0];
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].size() != header.size()) {
      fail(ErrorCode::ParseError, "csv: row " + std::to_string(i + 1) + " has " +
                                      std::to_string(lines[i].size()) + " fields, expected " +
                                      std::to_string(header.size()));
    }
  }
  Dataset data;
  for (std::size_t col = 0; col < header.size(); ++col) {
    if (header[col].empty()) fail(ErrorCode::ParseError, "csv: empty variable name");
    Variable var{header[col], {}};
    if (domains) {
      auto it = std::find_if(domains->begin(), domains->end(), [&](const Variable& v) { return v.name == header[col]; });
      if (it == domains->end()) fail(ErrorCode::UnknownVariable, "csv: no declared domain for '" + header[col] + "'");
      var.domain = it->domain;
    } else {
      std::vector<std::string> seen;
      for (std::size_t i = 1; i < lines.size(); ++i) seen.push_back(lines[i][col]);
      var.domain = infer_domain(seen);
    }
    data.variables.push_back(std::move(var));
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::size_t> row;
    for (std::size_t col = 0; col < header.size(); ++col) {
      const auto& dom = data.variables[col].domain;
      auto it = std::find(dom.begin(), dom.end(), lines[i][col]);
      if (it == dom.end()) {
        fail(ErrorCode::UnknownValue, "csv: '" + lines[i][col] + "' is not a value of " + header[col]);
      }
      row.push_back(static_cast<std::size_t>(it - dom.begin()));
    }
    data.rows.push_back(std::move(row));
  }
  return data;
}

std::string to_csv(const Dataset& data) {
  std::string out;
  for (std::size_t i = 0; i < data.variables.size(); ++i) {
    if (i) out += ',';
    out += data.variables[i].name;
  }
  out += '\n';
  for (const auto& row : data.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += data.variables[i].domain[row[i]];
    }
    out += '\n';
  }
  return out;
}

sem::FiniteDist joint(const CausalSchema& c) {
  check_factorization(c);
  ProductSpace space;
  for (const auto& v : c.variables) space.emplace_back(v.name, SpaceRole::Hidden, v.domain);
  const std::size_t total = cardinality(space);
  std::vector<std::vector<std::size_t>> sizes(c.variables.size());
  for (std::size_t v = 0; v < c.variables.size(); ++v) {
    for (auto p : c.cpts[v].parents) sizes[v].push_back(c.variables[p].size());
  }
  std::vector<double> probs(total);
  for (std::size_t i = 0; i < total; ++i) {
    auto values = unflatten(space, i);
    double p = 1;
    for (std::size_t v = 0; v < c.variables.size(); ++v) {
      p *= c.cpts[v].rows[config_index(c.cpts[v].parents, sizes[v], values)][values[v]];
    }
    probs[i] = p;
  }
  return sem::make_dist(std::move(space), std::move(probs));
}

CausalSchema do_intervene(const CausalSchema& c, const std::string& var, const std::string& value) {
  auto v = c.index_of(var);
  const auto& dom = c.variables[v].domain;
  auto it = std::find(dom.begin(), dom.end(), value);
  if (it == dom.end()) fail(ErrorCode::UnknownValue, "'" + value + "' is not a value of " + var);
  CausalSchema out = c;
  for (auto p : c.dag.parents(v)) out.dag.erase(p, v);
  std::vector<double> row(dom.size(), 0.0);
  row[static_cast<std::size_t>(it - dom.begin())] = 1.0;
  out.cpts[v] = Cpt{{}, {std::move(row)}};
  return out;
}

Cpt fit_cpt(std::size_t v, const std::set<std::size_t>& parents, const Dataset& data, double alpha) {
  if (data.rows.empty()) fail(ErrorCode::EmptyDataset, "cannot fit tables to an empty dataset");
  if (alpha < 0) fail(ErrorCode::InvalidArgument, "alpha must be non-negative");
  auto ps = as_vector(parents);
  return Cpt{ps, smooth(count_table(data, v, ps), alpha)};
}

std::vector<Cpt> fit_mle(const Dag& dag, const Dataset& data, double alpha) {
  if (dag.size() != data.variables.size()) fail(ErrorCode::ShapeMismatch, "DAG and data disagree on variables");
  std::vector<Cpt> out;
  for (std::size_t v = 0; v < dag.size(); ++v) out.push_back(fit_cpt(v, dag.parents(v), data, alpha));
  return out;
}

CausalSchema arc_add(const CausalSchema& c, const std::string& u, const std::string& v, const Dataset* data,
                     double alpha) {
  auto iu = c.index_of(u);
  auto iv = c.index_of(v);
  if (c.dag.has_edge(iu, iv)) fail(ErrorCode::EdgePresent, u + "->" + v + " is already present");
  if (iu == iv || c.dag.reaches(iv, iu)) fail(ErrorCode::CycleCreated, "adding " + u + "->" + v + " closes a cycle");
  CausalSchema out = c;
  out.dag.insert(iu, iv);
  refit(out, iv, data, alpha);
  return out;
}

CausalSchema arc_delete(const CausalSchema& c, const std::string& u, const std::string& v, const Dataset* data,
                        double alpha) {
  auto iu = c.index_of(u);
  auto iv = c.index_of(v);
  if (!c.dag.has_edge(iu, iv)) fail(ErrorCode::EdgeAbsent, u + "->" + v + " is not present");
  CausalSchema out = c;
  out.dag.erase(iu, iv);
  refit(out, iv, data, alpha);
  return out;
}

CausalSchema arc_reverse(const CausalSchema& c, const std::string& u, const std::string& v, const Dataset* data,
                         double alpha) {
  return arc_add(arc_delete(c, u, v, data, alpha), v, u, data, alpha);
}

bool covered(const Dag& dag, std::size_t u, std::size_t v) {
  if (!dag.has_edge(u, v)) fail(ErrorCode::EdgeAbsent, "covered() needs an existing edge");
  auto rest = dag.parents(v);
  rest.erase(u);
  return rest == dag.parents(u);
}

BicScorer::BicScorer(const Dataset& data) : data_(&data) {
  if (data.rows.empty()) fail(ErrorCode::EmptyDataset, "cannot score an empty dataset");
}

double BicScorer::local_score(const Dataset& data, std::size_t v, const std::set<std::size_t>& parents) {
  if (data.rows.empty()) fail(ErrorCode::EmptyDataset, "cannot score an empty dataset");
  auto counts = count_table(data, v, as_vector(parents));
  double ll = 0;
  for (const auto& row : counts) {
    double total = 0;
    for (double c : row) total += c;
    for (double c : row) {
      if (c > 0) ll += c * std::log(c / total);
    }
  }
  double k = static_cast<double>(data.variables[v].size() - 1) * static_cast<double>(counts.size());
  return ll - 0.5 * k * std::log(static_cast<double>(data.rows.size()));
}

double BicScorer::local(std::size_t v, const std::set<std::size_t>& parents) {
  auto key = std::make_pair(v, as_vector(parents));
  auto it = cache_.find(key);
  if (it != cache_.end()) {
    ++hits_;
    return it->second;
  }
  ++misses_;
  double s = local_score(*data_, v, parents);
  cache_.emplace(std::move(key), s);
  return s;
}

double BicScorer::total(const Dag& dag) {
  double s = 0;
  for (std::size_t v = 0; v < dag.size(); ++v) s += local(v, dag.parents(v));
  return s;
}

double score_bic(const Dag& dag, const Dataset& data) {
  if (dag.size() != data.variables.size()) fail(ErrorCode::ShapeMismatch, "DAG and data disagree on variables");
  double s = 0;
  for (std::size_t v = 0; v < dag.size(); ++v) s += BicScorer::local_score(data, v, dag.parents(v));
  return s;
}

std::string to_string(MoveKind kind) {
  switch (kind) {
    case MoveKind::Add:
      return "add";
    case MoveKind::Delete:
      return "delete";
    case MoveKind::Reverse:
      return "reverse";
  }
  return "?";
}

GesResult ges_run(const Dataset& data, double epsilon, double alpha) {
  if (data.rows.empty()) fail(ErrorCode::EmptyDataset, "cannot search on an empty dataset");
  if (data.variables.size() < 2) fail(ErrorCode::InvalidArgument, "structure search needs at least two variables");
  const auto& vars = data.variables;
  const std::size_t n = vars.size();
  BicScorer scorer(data);
  GesResult result{make_uniform(vars, Dag(n)), {}, 0, 0, 0};
  auto& model = result.model;
  model.cpts = fit_mle(model.dag, data, alpha);

  auto apply = [&](const Candidate& c) {
    const auto& u = vars[c.source].name;
    const auto& v = vars[c.target].name;
    switch (c.kind) {
      case MoveKind::Add:
        model = arc_add(model, u, v, &data, alpha);
        break;
      case MoveKind::Delete:
        model = arc_delete(model, u, v, &data, alpha);
        break;
      case MoveKind::Reverse:
        model = arc_reverse(model, u, v, &data, alpha);
        break;
    }
    result.trace.push_back(Move{c.kind, c.source, c.target, c.delta});
  };

  while (true) {
    MoveSelector sel(vars);
    const auto& g = model.dag;
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = 0; v < n; ++v) {
        if (u == v || g.adjacent(u, v) || g.reaches(v, u)) continue;
        auto pa = g.parents(v);
        double before = scorer.local(v, pa);
        pa.insert(u);
        sel.offer({MoveKind::Add, u, v, scorer.local(v, pa) - before});
      }
    }
    if (!sel.best() || !(sel.best()->delta > epsilon)) break;
    apply(*sel.best());
    ++result.forward_moves;
  }

  while (true) {
    MoveSelector sel(vars);
    const auto& g = model.dag;
    for (const auto& [u, v] : g.edges()) {
      auto pv = g.parents(v);
      double before_v = scorer.local(v, pv);
      pv.erase(u);
      double after_v = scorer.local(v, pv);
      sel.offer({MoveKind::Delete, u, v, after_v - before_v});
      if (!covered(g, u, v)) continue;
      Dag reversed = g;
      reversed.erase(u, v);
      if (reversed.reaches(v, u)) continue;
      auto pu = g.parents(u);
      double before_u = scorer.local(u, pu);
      pu.insert(v);
      sel.offer({MoveKind::Reverse, u, v, after_v + scorer.local(u, pu) - before_v - before_u});
    }
    if (!sel.best() || !(sel.best()->delta > epsilon)) break;
    apply(*sel.best());
    ++result.backward_moves;
  }

  result.score = scorer.total(model.dag);
  return result;
}

std::set<std::tuple<std::size_t, std::size_t, std::size_t>> v_structures(const Dag& dag) {
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> out;
  for (std::size_t c = 0; c < dag.size(); ++c) {
    const auto ps = as_vector(dag.parents(c));
    for (std::size_t i = 0; i < ps.size(); ++i) {
      for (std::size_t j = i + 1; j < ps.size(); ++j) {
        if (!dag.adjacent(ps[i], ps[j])) out.emplace(ps[i], c, ps[j]);
      }
    }
  }
  return out;
}

Cpdag cpdag(const Dag& dag) {
  Cpdag g;
  g.size = dag.size();
  for (const auto& [a, c, b] : v_structures(dag)) {
    g.directed.emplace(a, c);
    g.directed.emplace(b, c);
  }
  for (const auto& [u, v] : dag.edges()) {
    if (!g.directed.count({u, v})) g.undirected.emplace(std::min(u, v), std::max(u, v));
  }
  auto is_undirected = [&](std::size_t x, std::size_t y) {
    return g.undirected.count({std::min(x, y), std::max(x, y)}) > 0;
  };
  auto orient = [&](std::size_t x, std::size_t y) {
    g.undirected.erase({std::min(x, y), std::max(x, y)});
    g.directed.emplace(x, y);
  };
  const std::size_t n = g.size;
  bool changed = true;
  while (changed) {
    changed = false;
    const std::vector<Edge> pending(g.undirected.begin(), g.undirected.end());
    for (const auto& [p, q] : pending) {
      for (const auto& [x, y] : {Edge{p, q}, Edge{q, p}}) {
        if (!is_undirected(x, y)) break;
        bool force = false;
        for (std::size_t z = 0; z < n && !force; ++z) {
          if (z == x || z == y) continue;
          // R1: z→x—y with z, y non-adjacent.
          if (g.directed.count({z, x}) && !dag.adjacent(z, y)) force = true;
          // R2: x→z→y.
          if (g.directed.count({x, z}) && g.directed.count({z, y})) force = true;
          // R3: x—z→y and x—w→y with z, w non-adjacent.
          if (is_undirected(x, z) && g.directed.count({z, y})) {
            for (std::size_t w = z + 1; w < n && !force; ++w) {
              if (w == x || w == y) continue;
              if (is_undirected(x, w) && g.directed.count({w, y}) && !dag.adjacent(z, w)) force = true;
            }
          }
        }
        if (force) {
          orient(x, y);
          changed = true;
        }
      }
    }
  }
  return g;
}

bool markov_equivalent(const Dag& a, const Dag& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t u = 0; u < a.size(); ++u) {
    for (std::size_t v = u + 1; v < a.size(); ++v) {
      if (a.adjacent(u, v) != b.adjacent(u, v)) return false;
    }
  }
  return v_structures(a) == v_structures(b);
}

Dataset sample_data(const CausalSchema& c, std::size_t n, std::uint64_t seed) {
  check_factorization(c);
  if (n == 0) fail(ErrorCode::InvalidArgument, "sample size must be at least 1");
  const auto order = c.dag.topological_order();
  std::vector<std::vector<std::size_t>> sizes(c.variables.size());
  for (std::size_t v = 0; v < c.variables.size(); ++v) {
    for (auto p : c.cpts[v].parents) sizes[v].push_back(c.variables[p].size());
  }
  Rng rng(seed);
  Dataset data{c.variables, {}};
  data.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> row(c.variables.size(), 0);
    for (auto v : order) {
      const auto& probs = c.cpts[v].rows[config_index(c.cpts[v].parents, sizes[v], row)];
      row[v] = sample_index(probs, rng.uniform01());
    }
    data.rows.push_back(std::move(row));
  }
  return data;
}

Dag dag_over(const CausalSchema& c, const std::vector<std::string>& names) {
  if (names.size() != c.variables.size()) fail(ErrorCode::InvalidArgument, "variable sets differ in size");
  std::vector<std::size_t> pos(c.variables.size());
  for (std::size_t i = 0; i < names.size(); ++i) pos[c.index_of(names[i])] = i;
  Dag out(names.size());
  for (const auto& [u, v] : c.dag.edges()) out.insert(pos[u], pos[v]);
  return out;
}

syntax::SchemaTerm structure_term(const CausalSchema& c) {
  auto space = [&](std::size_t v) { return SpaceSpec(c.variables[v].name, SpaceRole::Hidden, c.variables[v].domain); };
  std::optional<syntax::SchemaTerm> term;
  for (std::size_t v = 0; v < c.variables.size(); ++v) {
    syntax::SchemaType type{syntax::SchemaKind::Predictive, {}, {space(v)}};
    for (auto p : c.dag.parents(v)) type.dom.push_back(space(p));
    auto factor = syntax::make_atomic("K." + c.variables[v].name, type);
    term = term ? syntax::encap(*term, factor) : factor;
  }
  if (!term) fail(ErrorCode::InvalidArgument, "a causal schema needs variables");
  return *term;
}

nlohmann::json to_json(const CausalSchema& c) {
  auto variables = nlohmann::json::array();
  for (const auto& v : c.variables) variables.push_back({{"name", v.name}, {"domain", v.domain}});
  auto edges = nlohmann::json::array();
  for (const auto& [u, v] : c.dag.edges()) edges.push_back({c.variables[u].name, c.variables[v].name});
  nlohmann::json cpts = nlohmann::json::object();
  for (std::size_t v = 0; v < c.variables.size(); ++v) {
    std::vector<std::string> parents;
    for (auto p : c.cpts[v].parents) parents.push_back(c.variables[p].name);
    cpts[c.variables[v].name] = {{"parents", parents}, {"rows", c.cpts[v].rows}};
  }
  return {{"variables", std::move(variables)}, {"edges", std::move(edges)}, {"cpts", std::move(cpts)}};
}

CausalSchema causal_from_json(const nlohmann::json& j) {
  try {
    std::vector<Variable> vars;
    for (const auto& v : j.at("variables")) {
      vars.push_back({v.at("name").get<std::string>(), v.at("domain").get<std::vector<std::string>>()});
    }
    CausalSchema probe{vars, Dag(vars.size()), {}};
    Dag dag(vars.size());
    for (const auto& e : j.value("edges", nlohmann::json::array())) {
      dag.insert(probe.index_of(e.at(0).get<std::string>()), probe.index_of(e.at(1).get<std::string>()));
    }
    auto c = make_uniform(std::move(vars), std::move(dag));
    if (j.contains("cpts")) {
      for (const auto& [name, table] : j.at("cpts").items()) {
        auto v = c.index_of(name);
        std::vector<std::size_t> parents;
        for (const auto& p : table.value("parents", std::vector<std::string>{})) parents.push_back(c.index_of(p));
        c.cpts[v] = Cpt{std::move(parents), table.at("rows").get<std::vector<std::vector<double>>>()};
      }
    }
    check_factorization(c);
    return c;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("causal model: ") + e.what());
  }
}

nlohmann::json to_json(const Cpdag& g, const std::vector<Variable>& variables) {
  auto named = [&](const std::set<Edge>& edges) {
    auto out = nlohmann::json::array();
    for (const auto& [u, v] : edges) out.push_back({variables[u].name, variables[v].name});
    return out;
  };
  return {{"directed", named(g.directed)}, {"undirected", named(g.undirected)}};
}

std::string trace_csv(const std::vector<Move>& trace, const std::vector<Variable>& variables) {
  std::string out = "step,move,edge,delta_score\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& m = trace[i];
    out += std::to_string(i + 1) + "," + to_string(m.kind) + "," + variables[m.source].name + "->" +
           variables[m.target].name + "," + format_real(m.delta_score) + "\n";
  }
  return out;
}

}  // namespace schemacalc::causal
