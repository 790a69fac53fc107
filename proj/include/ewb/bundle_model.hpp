#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace ewb {

/// Exact rational number in lowest terms with a positive denominator.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  /// Parses "p/q" or "p".
  static Rational parse(const std::string& text);

  friend bool operator==(const Rational&, const Rational&) = default;
  friend Rational operator-(const Rational& r) { return {-r.num_, r.den_}; }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Real dimension m of the total space. Formulas written for the real
/// dimension take this type so they cannot be handed the complex one.
struct RealDim {
  int value;
};

/// Sign of the base scalar curvature; the base is normalized to tau_N = 4(n-1)eps.
enum class BaseSign : int { Negative = -1, Flat = 0, Positive = 1 };

enum class Topology { SphereBundle, ProjectiveSpace };

std::string to_string(Topology t);
Topology topology_from_string(const std::string& text);

struct BundleSpec {
  int n_complex = 2;
  BaseSign epsilon = BaseSign::Positive;
  Rational s;
  int q = 1;
  int k = 0;
  Topology topology = Topology::SphereBundle;

  RealDim real_dim() const { return {2 * n_complex}; }
  double s_value() const { return s.to_double(); }
  int eps() const { return static_cast<int>(epsilon); }

  friend bool operator==(const BundleSpec&, const BundleSpec&) = default;
};

/// Unvalidated input, e.g. straight from a config file.
struct RawBundleSpec {
  std::optional<long long> n;
  std::optional<long long> epsilon;
  std::optional<long long> k;
  std::optional<long long> q;
  std::optional<Topology> topology;
  /// Optional explicit s; when present it must equal 2k/q.
  std::optional<Rational> s;
};

enum class SpecViolation { MissingField, NonIntegralClass, BadDimension, BadEpsilon };

std::string to_string(SpecViolation v);

class SpecRejected : public std::runtime_error {
 public:
  explicit SpecRejected(std::vector<std::pair<SpecViolation, std::string>> violations);
  const std::vector<std::pair<SpecViolation, std::string>>& violations() const { return violations_; }
  bool has(SpecViolation v) const;

 private:
  std::vector<std::pair<SpecViolation, std::string>> violations_;
};

/// Checks every constraint and reports all violations at once.
BundleSpec validate_bundle_spec(const RawBundleSpec& raw);

enum class Endpoint { Zero, End };
enum class Quantity { F, FP, G, GP };
enum class Parity { Odd, Even };

/// A linear endpoint functional: value of `quantity` at `at` must equal `target`.
struct BoundaryCondition {
  Endpoint at;
  Quantity quantity;
  double target;

  std::string label() const;
  friend bool operator==(const BoundaryCondition&, const BoundaryCondition&) = default;
};

struct BoundaryConditionSet {
  std::vector<BoundaryCondition> at_zero;
  std::vector<BoundaryCondition> at_L;
  Parity f_at_zero = Parity::Odd;
  Parity f_at_L = Parity::Odd;
  Parity g_at_zero = Parity::Even;
  Parity g_at_L = Parity::Even;

  /// at_zero followed by at_L.
  std::vector<BoundaryCondition> all() const;
  friend bool operator==(const BoundaryConditionSet&, const BoundaryConditionSet&) = default;
};

BoundaryConditionSet boundary_conditions(const BundleSpec& spec);

// Serialization. The flat key-value form uses keys n, epsilon, k, q, topology.
std::map<std::string, std::string> to_key_values(const BundleSpec& spec);
RawBundleSpec raw_from_key_values(const std::map<std::string, std::string>& kv);
nlohmann::json to_json(const BundleSpec& spec);
BundleSpec spec_from_json(const nlohmann::json& j);

}  // namespace ewb
