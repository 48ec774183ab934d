#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

/// Property suites for the algebraic laws of every layer, driven by the
/// seeded generators.
namespace schemacalc::laws {

struct LawResult {
  std::string suite;
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  /// Description of the first failing case.
  std::string first_failure;

  bool passed() const { return failures == 0 && cases > 0; }
};

/// Term laws of every operator, Add/Del, normalization, specialization and
/// the brute-force set oracle.
std::vector<LawResult> syntax_laws(std::size_t cases, std::uint64_t seed);
/// Fiber preservation, morphism associativity/unitality, stochastic rows
/// after built-in updates.
std::vector<LawResult> impl_laws(std::size_t cases, std::uint64_t seed);
/// Kleisli unit/associativity, stochasticity, functoriality of interpret,
/// presheaf contravariance.
std::vector<LawResult> semantics_laws(std::size_t cases, std::uint64_t seed);
/// Action identities, sequential and parallel coherence, loop bound and
/// determinism on `cases` workflows; interchange on cases/2 (at least one)
/// applicable instances.
std::vector<LawResult> workflow_laws(std::size_t cases, std::uint64_t seed);
/// Write/reindex coherence square, mind_par monoid laws, module
/// determinism and signature closure.
std::vector<LawResult> memory_laws(std::size_t cases, std::uint64_t seed);

std::vector<LawResult> run_all(std::size_t cases, std::uint64_t seed);

bool all_passed(const std::vector<LawResult>& results);
nlohmann::json to_json(const std::vector<LawResult>& results);

}  // namespace schemacalc::laws
