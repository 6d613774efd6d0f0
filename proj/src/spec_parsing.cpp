#include "rwm/spec_parsing.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rwm/error.hpp"

namespace rwm {

namespace {

double to_double(std::string_view s, std::string_view what) {
  const std::string str(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(str, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (str.empty() || used != str.size() || !std::isfinite(v)) {
    throw InvalidParameter(std::string(what) + ": not a number: '" + str + "'");
  }
  return v;
}

int to_int(std::string_view s, std::string_view what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw InvalidParameter(std::string(what) + ": not an integer: '" + std::string(s) + "'");
  }
  return v;
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::vector<double> read_numbers(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open '" + path + "'");
  std::vector<double> out;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) out.push_back(to_double(tok, path));
  }
  if (out.empty()) throw InvalidParameter("'" + path + "' holds no numbers");
  return out;
}

TargetFamily parse_target_spec(std::string_view spec) {
  if (spec == "gaussian") return TargetFamily::gaussian();
  if (spec == "exponential" || spec == "laplace") return TargetFamily::exponential();
  if (spec == "radial-gaussian") return TargetFamily::radial_gaussian();
  if (spec == "radial-exponential") return TargetFamily::radial_exponential();
  if (spec == "lognormal") return TargetFamily::lognormal();
  if (starts_with(spec, "mixture:p=")) {
    const auto rule = spec.substr(10);
    if (rule == "1/d") return TargetFamily::mixture(MixtureRule::InverseD);
    if (rule == "1/d^2") return TargetFamily::mixture(MixtureRule::InverseD2);
    if (rule == "1/d^3") return TargetFamily::mixture(MixtureRule::InverseD3);
    return TargetFamily::mixture(to_double(rule, "mixture weight"));
  }
  if (starts_with(spec, "custom:")) {
    const std::string path(spec.substr(7));
    if (path.empty()) throw InvalidParameter("custom: missing path");
    return TargetFamily::custom(std::make_shared<const CustomRadialTable>(CustomRadialTable::load(path)));
  }
  throw InvalidParameter("unknown target spec '" + std::string(spec) + "'");
}

MixingDistribution parse_mixing_spec(std::string_view spec, std::uint64_t seed, std::size_t from_target_samples) {
  if (starts_with(spec, "point:")) return MixingDistribution::point_mass(to_double(spec.substr(6), "point mass"));
  if (spec == "point") return MixingDistribution::point_mass(1.0);
  if (spec == "halfnormal") return MixingDistribution::half_normal();
  if (spec == "exp") return MixingDistribution::exponential();
  if (spec == "lognormal") return MixingDistribution::lognormal();
  if (starts_with(spec, "atoms:")) {
    std::vector<double> v, w;
    for (auto item : split(spec.substr(6), ',')) {
      const auto parts = split(item, '/');
      if (parts.size() > 2) throw InvalidParameter("atoms: expected value/weight, got '" + std::string(item) + "'");
      v.push_back(to_double(parts[0], "atom location"));
      w.push_back(parts.size() == 2 ? to_double(parts[1], "atom weight") : 1.0);
    }
    return MixingDistribution::atoms(std::move(v), std::move(w));
  }
  if (starts_with(spec, "samples:")) {
    const std::string path(spec.substr(8));
    return MixingDistribution::from_samples(read_numbers(path), "samples:" + path);
  }
  if (starts_with(spec, "from-target:")) {
    const auto rest = spec.substr(12);
    const auto colon = rest.rfind(':');
    if (colon == std::string_view::npos) throw InvalidParameter("from-target: expected <target-spec>:<d>");
    const TargetFamily family = parse_target_spec(rest.substr(0, colon));
    const int d = to_int(rest.substr(colon + 1), "from-target dimension");
    if (d < 1) throw InvalidParameter("from-target: d must be >= 1");
    if (!family.scale_constant(d)) throw InvalidParameter("from-target: family has no known scale constant k");
    return mixing_from_target(build_example_target(family, d), from_target_samples, seed);
  }
  throw InvalidParameter("unknown mixing spec '" + std::string(spec) + "'");
}

EigenRule parse_eigen_rule(std::string_view spec) {
  if (spec == "iota") return EigenRule::iota();
  if (starts_with(spec, "const:")) return EigenRule::constant(to_double(spec.substr(6), "const eigenvalue"));
  if (starts_with(spec, "spike:")) {
    const auto c = spec.substr(6);
    if (c == "d") return EigenRule::spike(0.0, true);
    return EigenRule::spike(to_double(c, "spike eigenvalue"));
  }
  if (starts_with(spec, "file:")) {
    const std::string path(spec.substr(5));
    return EigenRule::list(read_numbers(path), path);
  }
  throw InvalidParameter("unknown eigenvalue rule '" + std::string(spec) + "'");
}

std::vector<int> parse_dims(std::string_view spec) {
  std::vector<int> out;
  for (auto item : split(spec, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(to_int(parts[0], "dimension"));
      continue;
    }
    if (parts.size() != 3) throw InvalidParameter("dims: expected a:b:linN or a:b:logN, got '" + std::string(item) + "'");
    const int a = to_int(parts[0], "dims start");
    const int b = to_int(parts[1], "dims end");
    const auto mode = parts[2];
    const bool log_mode = starts_with(mode, "log");
    if (!log_mode && !starts_with(mode, "lin")) throw InvalidParameter("dims: spacing must be linN or logN");
    const int n = to_int(mode.substr(3), "dims count");
    if (a < 1 || b < a || n < 1 || (n == 1 && b != a)) throw InvalidParameter("dims: need 1 <= a <= b and N >= 2");
    for (int i = 0; i < n; ++i) {
      const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
      const double v = log_mode ? std::exp(std::log(a) + t * (std::log(b) - std::log(a))) : a + t * (b - a);
      out.push_back(static_cast<int>(std::lround(v)));
    }
  }
  for (int d : out) {
    if (d < 1) throw InvalidParameter("dims: dimensions must be >= 1");
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace rwm
