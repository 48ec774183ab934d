#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace schemacalc {

/// Which mental or bodily space a finite space stands for. Schema typing
/// rules are phrased in terms of these roles.
enum class SpaceRole {
  Sensor,
  Observation,
  Decision,
  Effector,
  Hidden,
  Goal,
  Real,
  Other,
};

std::string to_string(SpaceRole role);
SpaceRole space_role_from_string(const std::string& text);

/// A finite measurable space: an ordered list of distinct point labels.
/// The position of a label is its canonical index.
class SpaceSpec {
 public:
  SpaceSpec(std::string label, SpaceRole role, std::vector<std::string> points);

  const std::string& label() const { return label_; }
  SpaceRole role() const { return role_; }
  const std::vector<std::string>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

  std::optional<std::size_t> index_of(const std::string& point) const;
  bool contains(const std::string& point) const { return index_of(point).has_value(); }

  friend bool operator==(const SpaceSpec&, const SpaceSpec&) = default;

 private:
  std::string label_;
  SpaceRole role_;
  std::vector<std::string> points_;
};

/// A finite product of spaces, flattened in row-major order (last factor
/// varies fastest). The empty product is the one-point space.
using ProductSpace = std::vector<SpaceSpec>;

std::size_t cardinality(std::span<const SpaceSpec> product);

/// Label of a product point: factor labels joined with ','.
std::string point_label(std::span<const SpaceSpec> product, std::size_t flat_index);
std::optional<std::size_t> point_index(std::span<const SpaceSpec> product,
                                       const std::string& label);
std::vector<std::size_t> unflatten(std::span<const SpaceSpec> product, std::size_t flat_index);

/// Shortest decimal text that round-trips to the same double.
std::string format_real(double value);
std::optional<double> parse_real(const std::string& text);

nlohmann::json to_json(const SpaceSpec& space);
SpaceSpec space_from_json(const nlohmann::json& j);
nlohmann::json to_json(std::span<const SpaceSpec> product);
ProductSpace product_from_json(const nlohmann::json& j);

/// Deterministic 64-bit generator. Results depend only on the seed, never on
/// the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n);
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  bool coin(double p_true = 0.5) { return uniform01() < p_true; }

 private:
  std::uint64_t state_[4];
};

/// Mixes a seed with a string tag into a new seed.
std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag);
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t value);

/// Inverse-CDF draw over a probability vector in canonical order.
std::size_t sample_index(std::span<const double> probs, double u);

}  // namespace schemacalc
