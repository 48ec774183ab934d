#pragma once

// Independent reference computations. Nothing here calls into the library
// except to read plain numbers out of its types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

/// (g∘f)(x)(z) = Σ_y f(x)(y) g(y)(z), as a plain triple loop.
inline Matrix compose(const Matrix& f, const Matrix& g) {
  Matrix out(f.size(), std::vector<double>(g.empty() ? 0 : g[0].size(), 0.0));
  for (std::size_t x = 0; x < f.size(); ++x)
    for (std::size_t y = 0; y < g.size(); ++y)
      for (std::size_t z = 0; z < g[y].size(); ++z) out[x][z] += f[x][y] * g[y][z];
  return out;
}

/// Row (x1,x2) of f⊗g is the outer product of f[x1] and g[x2].
inline Matrix product(const Matrix& f, const Matrix& g) {
  Matrix out;
  for (const auto& a : f)
    for (const auto& b : g) {
      std::vector<double> row;
      for (double p : a)
        for (double q : b) row.push_back(p * q);
      out.push_back(row);
    }
  return out;
}

/// Flat MDP arrays indexed [(o*nd + d)*no + o2].
struct Mdp {
  std::size_t no = 0;
  std::size_t nd = 0;
  std::vector<double> t;
  std::vector<double> r;
  double gamma = 0;

  double T(std::size_t o, std::size_t d, std::size_t o2) const { return t[(o * nd + d) * no + o2]; }
  double R(std::size_t o, std::size_t d, std::size_t o2) const { return r[(o * nd + d) * no + o2]; }
};

/// max_d Σ_o' T (R + γ V), spelled out.
inline std::vector<double> bellman(const Mdp& m, const std::vector<double>& v) {
  std::vector<double> out(m.no);
  for (std::size_t o = 0; o < m.no; ++o) {
    double best = -INFINITY;
    for (std::size_t d = 0; d < m.nd; ++d) {
      double q = 0;
      for (std::size_t o2 = 0; o2 < m.no; ++o2) q += m.T(o, d, o2) * (m.R(o, d, o2) + m.gamma * v[o2]);
      best = std::max(best, q);
    }
    out[o] = best;
  }
  return out;
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> solve(Matrix a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(a[i][c]) > std::abs(a[p][c])) p = i;
    std::swap(a[c], a[p]);
    std::swap(b[c], b[p]);
    for (std::size_t i = c + 1; i < n; ++i) {
      const double k = a[i][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[i][j] -= k * a[c][j];
      b[i] -= k * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

/// Exact value of a deterministic policy: (I - γ P_π) V = r_π.
inline std::vector<double> policy_value(const Mdp& m, const std::vector<std::size_t>& pi) {
  Matrix a(m.no, std::vector<double>(m.no, 0.0));
  std::vector<double> b(m.no, 0.0);
  for (std::size_t o = 0; o < m.no; ++o) {
    a[o][o] = 1;
    for (std::size_t o2 = 0; o2 < m.no; ++o2) {
      a[o][o2] -= m.gamma * m.T(o, pi[o], o2);
      b[o] += m.T(o, pi[o], o2) * m.R(o, pi[o], o2);
    }
  }
  return solve(a, b);
}

/// V* as the pointwise maximum over all |D|^|O| deterministic policies.
inline std::vector<double> optimal_values(const Mdp& m) {
  std::vector<double> best(m.no, -INFINITY);
  std::vector<std::size_t> pi(m.no, 0);
  while (true) {
    auto v = policy_value(m, pi);
    for (std::size_t o = 0; o < m.no; ++o) best[o] = std::max(best[o], v[o]);
    std::size_t i = 0;
    while (i < m.no && ++pi[i] == m.nd) pi[i++] = 0;
    if (i == m.no) break;
  }
  return best;
}

/// adj[u][v] means u → v.
using Graph = std::vector<std::vector<bool>>;

inline bool acyclic(const Graph& g) {
  const std::size_t n = g.size();
  std::vector<int> indeg(n, 0);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) indeg[v] += g[u][v];
  std::vector<std::size_t> ready;
  for (std::size_t v = 0; v < n; ++v)
    if (!indeg[v]) ready.push_back(v);
  std::size_t seen = 0;
  while (!ready.empty()) {
    auto u = ready.back();
    ready.pop_back();
    ++seen;
    for (std::size_t v = 0; v < n; ++v)
      if (g[u][v] && --indeg[v] == 0) ready.push_back(v);
  }
  return seen == n;
}

/// All 25 DAGs on three labelled nodes.
inline std::vector<Graph> all_dags3() {
  const std::size_t pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  std::vector<Graph> out;
  for (int code = 0; code < 27; ++code) {
    Graph g(3, std::vector<bool>(3, false));
    int c = code;
    for (const auto& p : pairs) {
      if (c % 3 == 1) g[p[0]][p[1]] = true;
      if (c % 3 == 2) g[p[1]][p[0]] = true;
      c /= 3;
    }
    if (acyclic(g)) out.push_back(g);
  }
  return out;
}

/// d-separation of x and y given s, via the moralized ancestral graph.
inline bool d_separated(const Graph& g, std::size_t x, std::size_t y, const std::set<std::size_t>& s) {
  const std::size_t n = g.size();
  std::vector<bool> keep(n, false);
  std::vector<std::size_t> stack{x, y};
  stack.insert(stack.end(), s.begin(), s.end());
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    if (keep[v]) continue;
    keep[v] = true;
    for (std::size_t u = 0; u < n; ++u)
      if (g[u][v]) stack.push_back(u);
  }
  Graph moral(n, std::vector<bool>(n, false));
  for (std::size_t v = 0; v < n; ++v) {
    if (!keep[v]) continue;
    std::vector<std::size_t> pa;
    for (std::size_t u = 0; u < n; ++u)
      if (g[u][v] && keep[u]) {
        pa.push_back(u);
        moral[u][v] = moral[v][u] = true;
      }
    for (auto a : pa)
      for (auto b : pa)
        if (a != b) moral[a][b] = true;
  }
  std::vector<bool> seen(n, false);
  stack = {x};
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    if (v == y) return false;
    if (seen[v] || s.count(v)) continue;
    seen[v] = true;
    for (std::size_t u = 0; u < n; ++u)
      if (moral[v][u] && keep[u] && !seen[u] && !s.count(u)) stack.push_back(u);
  }
  return true;
}

/// Markov equivalence as equality of the full d-separation relation.
inline bool same_independencies(const Graph& a, const Graph& b) {
  const std::size_t n = a.size();
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) {
      std::vector<std::size_t> rest;
      for (std::size_t v = 0; v < n; ++v)
        if (v != x && v != y) rest.push_back(v);
      for (std::size_t mask = 0; mask < (std::size_t{1} << rest.size()); ++mask) {
        std::set<std::size_t> s;
        for (std::size_t i = 0; i < rest.size(); ++i)
          if (mask >> i & 1) s.insert(rest[i]);
        if (d_separated(a, x, y, s) != d_separated(b, x, y, s)) return false;
      }
    }
  return true;
}

/// BIC by direct counting: Σ_v Σ_(pa,k) N ln(N/N_pa) − ½ (r_v−1) q_v ln n.
inline double bic(const Graph& g, const std::vector<std::vector<std::size_t>>& rows,
                  const std::vector<std::size_t>& card) {
  const std::size_t nv = card.size();
  const double n = static_cast<double>(rows.size());
  double score = 0;
  for (std::size_t v = 0; v < nv; ++v) {
    std::map<std::vector<std::size_t>, std::map<std::size_t, double>> counts;
    std::size_t q = 1;
    for (std::size_t u = 0; u < nv; ++u)
      if (g[u][v]) q *= card[u];
    for (const auto& row : rows) {
      std::vector<std::size_t> cfg;
      for (std::size_t u = 0; u < nv; ++u)
        if (g[u][v]) cfg.push_back(row[u]);
      counts[cfg][row[v]] += 1;
    }
    for (const auto& [cfg, by_value] : counts) {
      double total = 0;
      for (const auto& [k, c] : by_value) total += c;
      for (const auto& [k, c] : by_value) score += c * std::log(c / total);
    }
    score -= 0.5 * static_cast<double>((card[v] - 1) * q) * std::log(n);
  }
  return score;
}

}  // namespace oracle
