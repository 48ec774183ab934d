#include "schemacalc/space.hpp"

#include <charconv>
#include <set>

#include "schemacalc/error.hpp"

namespace schemacalc {

namespace {

constexpr const char* kRoleNames[] = {"sensor", "observation", "decision", "effector",
                                      "hidden", "goal",        "real",     "other"};

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::string to_string(SpaceRole role) { return kRoleNames[static_cast<int>(role)]; }

SpaceRole space_role_from_string(const std::string& text) {
  for (int i = 0; i < 8; ++i) {
    if (text == kRoleNames[i]) return static_cast<SpaceRole>(i);
  }
  fail(ErrorCode::ParseError, "unknown space role '" + text + "'");
}

SpaceSpec::SpaceSpec(std::string label, SpaceRole role, std::vector<std::string> points)
    : label_(std::move(label)), role_(role), points_(std::move(points)) {
  if (label_.empty()) fail(ErrorCode::MalformedType, "space label must be non-empty");
  if (points_.empty()) fail(ErrorCode::MalformedType, "space '" + label_ + "' has no points");
  std::set<std::string> seen;
  for (const auto& p : points_) {
    if (p.find(',') != std::string::npos) {
      fail(ErrorCode::MalformedType, "point label '" + p + "' contains ','");
    }
    if (!seen.insert(p).second) {
      fail(ErrorCode::MalformedType, "duplicate point '" + p + "' in space '" + label_ + "'");
    }
  }
}

std::optional<std::size_t> SpaceSpec::index_of(const std::string& point) const {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i] == point) return i;
  }
  return std::nullopt;
}

std::size_t cardinality(std::span<const SpaceSpec> product) {
  std::size_t n = 1;
  for (const auto& s : product) n *= s.size();
  return n;
}

std::vector<std::size_t> unflatten(std::span<const SpaceSpec> product, std::size_t flat_index) {
  std::vector<std::size_t> coords(product.size());
  for (std::size_t k = product.size(); k-- > 0;) {
    coords[k] = flat_index % product[k].size();
    flat_index /= product[k].size();
  }
  return coords;
}

std::string point_label(std::span<const SpaceSpec> product, std::size_t flat_index) {
  if (product.empty()) return "*";
  auto coords = unflatten(product, flat_index);
  std::string out;
  for (std::size_t k = 0; k < product.size(); ++k) {
    if (k) out += ',';
    out += product[k].points()[coords[k]];
  }
  return out;
}

std::optional<std::size_t> point_index(std::span<const SpaceSpec> product,
                                       const std::string& label) {
  if (product.empty()) return label == "*" ? std::optional<std::size_t>(0) : std::nullopt;
  std::size_t flat = 0;
  std::size_t start = 0;
  for (std::size_t k = 0; k < product.size(); ++k) {
    std::size_t end = label.find(',', start);
    bool last = k + 1 == product.size();
    if (last != (end == std::string::npos)) return std::nullopt;
    auto part = label.substr(start, last ? std::string::npos : end - start);
    auto idx = product[k].index_of(part);
    if (!idx) return std::nullopt;
    flat = flat * product[k].size() + *idx;
    start = end + 1;
  }
  return flat;
}

std::string format_real(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_real(const std::string& text) {
  double v = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

nlohmann::json to_json(const SpaceSpec& space) {
  return {{"label", space.label()}, {"role", to_string(space.role())}, {"points", space.points()}};
}

SpaceSpec space_from_json(const nlohmann::json& j) {
  try {
    return SpaceSpec(j.at("label").get<std::string>(),
                     space_role_from_string(j.value("role", std::string("other"))),
                     j.at("points").get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("space: ") + e.what());
  }
}

nlohmann::json to_json(std::span<const SpaceSpec> product) {
  auto arr = nlohmann::json::array();
  for (const auto& s : product) arr.push_back(to_json(s));
  return arr;
}

ProductSpace product_from_json(const nlohmann::json& j) {
  if (!j.is_array()) fail(ErrorCode::ParseError, "product space must be an array");
  ProductSpace out;
  for (const auto& s : j) out.push_back(space_from_json(s));
  return out;
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& s : state_) s = splitmix64(x);
}

std::uint64_t Rng::next() {
  // xoshiro256**
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::size_t Rng::below(std::size_t n) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "Rng::below(0)");
  return static_cast<std::size_t>(next() % n);
}

std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix_seed(seed, h);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t value) {
  std::uint64_t x = seed ^ rotl(value, 29);
  return splitmix64(x);
}

std::size_t sample_index(std::span<const double> probs, double u) {
  double acc = 0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0) continue;
    last_positive = i;
    acc += probs[i];
    if (u < acc) return i;
  }
  return last_positive;
}

}  // namespace schemacalc
