#include "ewb/bundle_model.hpp"

#include <numeric>
#include <sstream>

namespace ewb {

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = num / (g == 0 ? 1 : g);
  den_ = den / (g == 0 ? 1 : g);
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(const std::string& text) {
  const auto slash = text.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const long long v = std::stoll(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return {v, 1};
    }
    const std::string a = text.substr(0, slash), b = text.substr(slash + 1);
    const long long p = std::stoll(a, &used);
    if (used != a.size()) throw std::invalid_argument(text);
    const long long q = std::stoll(b, &used);
    if (used != b.size()) throw std::invalid_argument(text);
    return {p, q};
  } catch (const std::logic_error&) {
    throw std::invalid_argument("not a rational: '" + text + "'");
  }
}

std::string to_string(Topology t) {
  return t == Topology::SphereBundle ? "sphere-bundle" : "projective-space";
}

Topology topology_from_string(const std::string& text) {
  if (text == "sphere-bundle" || text == "SphereBundle" || text == "sphere") return Topology::SphereBundle;
  if (text == "projective-space" || text == "ProjectiveSpace" || text == "cpn") return Topology::ProjectiveSpace;
  throw std::invalid_argument("unknown topology '" + text + "'");
}

std::string to_string(SpecViolation v) {
  switch (v) {
    case SpecViolation::MissingField: return "MissingField";
    case SpecViolation::NonIntegralClass: return "NonIntegralClass";
    case SpecViolation::BadDimension: return "BadDimension";
    case SpecViolation::BadEpsilon: return "BadEpsilon";
  }
  return "?";
}

namespace {
std::string join_violations(const std::vector<std::pair<SpecViolation, std::string>>& vs) {
  std::ostringstream os;
  os << "bundle spec rejected:";
  for (const auto& [code, what] : vs) os << " [" << to_string(code) << ": " << what << "]";
  return os.str();
}
}  // namespace

SpecRejected::SpecRejected(std::vector<std::pair<SpecViolation, std::string>> violations)
    : std::runtime_error(join_violations(violations)), violations_(std::move(violations)) {}

bool SpecRejected::has(SpecViolation v) const {
  for (const auto& [code, _] : violations_)
    if (code == v) return true;
  return false;
}

BundleSpec validate_bundle_spec(const RawBundleSpec& raw) {
  std::vector<std::pair<SpecViolation, std::string>> bad;
  auto missing = [&](const char* name) { bad.emplace_back(SpecViolation::MissingField, name); };
  if (!raw.n) missing("n");
  if (!raw.epsilon) missing("epsilon");
  if (!raw.k) missing("k");
  if (!raw.q) missing("q");
  if (!raw.topology) missing("topology");

  if (raw.n && *raw.n < 2)
    bad.emplace_back(SpecViolation::BadDimension, "n_complex = " + std::to_string(*raw.n) + " < 2");
  if (raw.epsilon && (*raw.epsilon < -1 || *raw.epsilon > 1))
    bad.emplace_back(SpecViolation::BadEpsilon, "epsilon = " + std::to_string(*raw.epsilon) + " not in {-1,0,1}");
  if (raw.q && *raw.q <= 0)
    bad.emplace_back(SpecViolation::NonIntegralClass, "q = " + std::to_string(*raw.q) + " must be a positive integer");

  std::optional<Rational> s;
  if (raw.k && raw.q && *raw.q > 0) {
    s = Rational(2 * *raw.k, *raw.q);
    if (raw.s && !(*raw.s == *s))
      bad.emplace_back(SpecViolation::NonIntegralClass,
                       "s = " + raw.s->str() + " differs from 2k/q = " + s->str());
  }
  if (!bad.empty()) throw SpecRejected(std::move(bad));

  BundleSpec spec;
  spec.n_complex = static_cast<int>(*raw.n);
  spec.epsilon = static_cast<BaseSign>(*raw.epsilon);
  spec.k = static_cast<int>(*raw.k);
  spec.q = static_cast<int>(*raw.q);
  spec.s = *s;
  spec.topology = *raw.topology;
  return spec;
}

std::string BoundaryCondition::label() const {
  std::string name;
  switch (quantity) {
    case Quantity::F: name = "f"; break;
    case Quantity::FP: name = "f'"; break;
    case Quantity::G: name = "g"; break;
    case Quantity::GP: name = "g'"; break;
  }
  std::ostringstream os;
  os << name << (at == Endpoint::Zero ? "(0)" : "(L)") << "=" << target;
  return os.str();
}

std::vector<BoundaryCondition> BoundaryConditionSet::all() const {
  std::vector<BoundaryCondition> out = at_zero;
  out.insert(out.end(), at_L.begin(), at_L.end());
  return out;
}

BoundaryConditionSet boundary_conditions(const BundleSpec& spec) {
  BoundaryConditionSet bcs;
  bcs.at_zero = {{Endpoint::Zero, Quantity::F, 0.0},
                 {Endpoint::Zero, Quantity::FP, 1.0},
                 {Endpoint::Zero, Quantity::GP, 0.0}};
  if (spec.topology == Topology::SphereBundle) {
    bcs.at_L = {{Endpoint::End, Quantity::F, 0.0},
                {Endpoint::End, Quantity::FP, -1.0},
                {Endpoint::End, Quantity::GP, 0.0}};
  } else {
    // g collapses at L: odd there, with unit outward slope.
    bcs.at_L = {{Endpoint::End, Quantity::F, 0.0},
                {Endpoint::End, Quantity::FP, -1.0},
                {Endpoint::End, Quantity::G, 0.0},
                {Endpoint::End, Quantity::GP, -1.0}};
    bcs.g_at_L = Parity::Odd;
  }
  return bcs;
}

std::map<std::string, std::string> to_key_values(const BundleSpec& spec) {
  return {{"n", std::to_string(spec.n_complex)},
          {"epsilon", std::to_string(spec.eps())},
          {"k", std::to_string(spec.k)},
          {"q", std::to_string(spec.q)},
          {"topology", to_string(spec.topology)}};
}

namespace {
long long parse_integer(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::logic_error&) {
    throw std::invalid_argument("key '" + key + "': not an integer: '" + text + "'");
  }
  if (used != text.size()) throw std::invalid_argument("key '" + key + "': not an integer: '" + text + "'");
  return v;
}
}  // namespace

RawBundleSpec raw_from_key_values(const std::map<std::string, std::string>& kv) {
  RawBundleSpec raw;
  if (auto it = kv.find("n"); it != kv.end()) raw.n = parse_integer("n", it->second);
  if (auto it = kv.find("epsilon"); it != kv.end()) raw.epsilon = parse_integer("epsilon", it->second);
  if (auto it = kv.find("k"); it != kv.end()) raw.k = parse_integer("k", it->second);
  if (auto it = kv.find("q"); it != kv.end()) raw.q = parse_integer("q", it->second);
  if (auto it = kv.find("topology"); it != kv.end()) raw.topology = topology_from_string(it->second);
  if (auto it = kv.find("s"); it != kv.end()) raw.s = Rational::parse(it->second);
  return raw;
}

nlohmann::json to_json(const BundleSpec& spec) {
  return {{"n", spec.n_complex},
          {"epsilon", spec.eps()},
          {"k", spec.k},
          {"q", spec.q},
          {"s", spec.s.str()},
          {"topology", to_string(spec.topology)}};
}

BundleSpec spec_from_json(const nlohmann::json& j) {
  RawBundleSpec raw;
  raw.n = j.at("n").get<long long>();
  raw.epsilon = j.at("epsilon").get<long long>();
  raw.k = j.at("k").get<long long>();
  raw.q = j.at("q").get<long long>();
  raw.topology = topology_from_string(j.at("topology").get<std::string>());
  if (j.contains("s")) raw.s = Rational::parse(j.at("s").get<std::string>());
  return validate_bundle_spec(raw);
}

}  // namespace ewb
