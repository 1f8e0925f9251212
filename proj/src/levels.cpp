#include "cifti/levels.hpp"
#include "cifti/transforms.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>
#include <sstream>

namespace cifti {

std::string_view to_string(LevelKind kind) {
  switch(kind) {
  case LevelKind::dhw_sparsity:
    return "dhw-sparsity";
  case LevelKind::dhw_sampling:
    return "dhw-sampling";
  case LevelKind::dft_symmetric:
    return "dft-symmetric";
  }
  return "unknown";
}

LevelKind parse_level_kind(std::string_view name) {
  if(name == "dhw-sparsity")
    return LevelKind::dhw_sparsity;
  if(name == "dhw-sampling")
    return LevelKind::dhw_sampling;
  if(name == "dft-symmetric" || name == "dft")
    return LevelKind::dft_symmetric;
  throw DomainError("unknown level kind '" + std::string(name) + "'");
}

std::vector<t_index> LevelScheme::sizes() const {
  std::vector<t_index> result;
  result.reserve(levels.size());
  for(auto const &level : levels)
    result.push_back(static_cast<t_index>(level.size()));
  return result;
}

std::vector<t_index> LevelScheme::level_of() const {
  std::vector<t_index> owner(N, -1);
  for(t_index l = 0; l < r(); ++l)
    for(auto const s : levels[l])
      if(s >= 0 && s < N)
        owner[s] = l;
  return owner;
}

LevelScheme build_dhw_sparsity_levels(t_index n) {
  require_power_of_two(n, "build_dhw_sparsity_levels");
  int const r = log2_exact(n);
  LevelScheme scheme{n, LevelKind::dhw_sparsity, {}, {}};
  t_index previous = 0;
  for(int l = 1; l <= r; ++l) {
    t_index const bound = t_index(1) << l;
    scheme.boundaries.push_back(bound);
    std::vector<t_index> level;
    for(t_index i = previous; i < bound; ++i)
      level.push_back(i);
    scheme.levels.push_back(std::move(level));
    previous = bound;
  }
  return scheme;
}

LevelScheme build_dhw_sampling_levels(t_index n) {
  require_power_of_two(n, "build_dhw_sampling_levels");
  int const r = log2_exact(n);
  LevelScheme scheme{n, LevelKind::dhw_sampling, {}, {}};
  std::vector<bool> taken(n, false);
  // W_1 = {0, 1}; W_(t+1) is the annulus {-n_t+1..n_t} minus everything already taken.
  for(int t = 0; t < r; ++t) {
    t_index const lo = t == 0 ? 0 : -(t_index(1) << t) + 1;
    t_index const hi = t == 0 ? 1 : (t_index(1) << t);
    scheme.boundaries.push_back(t_index(1) << (t + 1));
    std::vector<t_index> level;
    for(t_index f = lo; f <= hi; ++f) {
      t_index const s = storage_of(f, n);
      if(!taken[s]) {
        taken[s] = true;
        level.push_back(s);
      }
    }
    scheme.levels.push_back(std::move(level));
  }
  return scheme;
}

LevelScheme build_dft_levels(t_index n, int q) {
  require_power_of_two(n, "build_dft_levels");
  if(q < 0 || q > 62)
    throw DomainError("build_dft_levels: q must be a small nonnegative integer");
  t_index const r = t_index(1) << q;
  if((n / 2) % r != 0)
    throw DomainError("build_dft_levels: r = 2^" + std::to_string(q) + " does not divide N/2 = "
                      + std::to_string(n / 2));
  t_index const half_band = n / (2 * r);
  LevelScheme scheme{n, LevelKind::dft_symmetric, {}, {}};
  for(t_index l = 1; l <= r; ++l) {
    t_index const inner = (l - 1) * half_band;
    t_index const outer = l * half_band;
    scheme.boundaries.push_back(outer);
    std::vector<t_index> level;
    for(t_index f = -outer + 1; f <= -inner; ++f)
      level.push_back(storage_of(f, n));
    for(t_index f = inner + 1; f <= outer; ++f)
      level.push_back(storage_of(f, n));
    std::sort(level.begin(), level.end());
    scheme.levels.push_back(std::move(level));
  }
  return scheme;
}

namespace {
std::string index_list(std::vector<t_index> const &indices) {
  std::ostringstream out;
  out << '{';
  for(std::size_t i = 0; i < indices.size(); ++i)
    out << (i ? "," : "") << indices[i] + 1;
  out << '}';
  return out.str();
}
} // namespace

std::vector<std::string> validate_scheme(LevelScheme const &scheme) {
  std::vector<std::string> violations;
  t_index const n = scheme.N;
  if(n < 1) {
    violations.push_back("N must be positive");
    return violations;
  }
  std::vector<t_index> owner(n, -1);
  std::set<std::pair<t_index, t_index>> overlaps;
  for(t_index l = 0; l < scheme.r(); ++l) {
    auto const &level = scheme.levels[l];
    if(level.empty())
      violations.push_back("level " + std::to_string(l + 1) + " is empty");
    std::vector<t_index> outside;
    for(auto const s : level) {
      if(s < 0 || s >= n) {
        outside.push_back(s);
        continue;
      }
      if(owner[s] >= 0 && owner[s] != l)
        overlaps.emplace(owner[s], l);
      else if(owner[s] == l)
        violations.push_back("level " + std::to_string(l + 1) + " repeats index "
                             + std::to_string(s + 1));
      owner[s] = l;
    }
    if(!outside.empty())
      violations.push_back("level " + std::to_string(l + 1) + " has indices outside [N]: "
                           + index_list(outside));
  }
  for(auto const &[a, b] : overlaps)
    violations.push_back("levels " + std::to_string(a + 1) + " and " + std::to_string(b + 1)
                         + " overlap");
  std::vector<t_index> missing;
  for(t_index s = 0; s < n; ++s)
    if(owner[s] < 0)
      missing.push_back(s);
  if(!missing.empty())
    violations.push_back("union misses " + index_list(missing));

  if(scheme.kind == LevelKind::dft_symmetric && scheme.r() > 0) {
    for(t_index l = 0; l < scheme.r(); ++l) {
      auto const &level = scheme.levels[l];
      if(static_cast<t_index>(level.size()) * scheme.r() != n)
        violations.push_back("level " + std::to_string(l + 1) + " has cardinality "
                             + std::to_string(level.size()) + ", expected N/r");
      std::set<t_index> members(level.begin(), level.end());
      for(auto const s : level) {
        if(s < 0 || s >= n)
          continue;
        // mirror f -> 1 - f keeps the Nyquist frequency paired with -N/2+1
        t_index const mirror = storage_of(1 - frequency_of(s, n), n);
        if(!members.count(mirror)) {
          violations.push_back("level " + std::to_string(l + 1) + " is not symmetric");
          break;
        }
      }
    }
  }
  return violations;
}

void to_json(nlohmann::json &j, LevelScheme const &scheme) {
  nlohmann::json levels = nlohmann::json::array();
  for(auto const &level : scheme.levels) {
    nlohmann::json indices = nlohmann::json::array();
    for(auto const s : level)
      indices.push_back(s + 1);
    levels.push_back(std::move(indices));
  }
  j = nlohmann::json{{"N", scheme.N},
                     {"r", scheme.r()},
                     {"kind", std::string(to_string(scheme.kind))},
                     {"boundaries", scheme.boundaries},
                     {"levels", std::move(levels)}};
}

void from_json(nlohmann::json const &j, LevelScheme &scheme) {
  scheme.N = j.at("N").get<t_index>();
  scheme.kind = parse_level_kind(j.at("kind").get<std::string>());
  scheme.boundaries = j.at("boundaries").get<std::vector<t_index>>();
  scheme.levels.clear();
  for(auto const &level : j.at("levels")) {
    std::vector<t_index> indices;
    for(auto const &i : level)
      indices.push_back(i.get<t_index>() - 1);
    scheme.levels.push_back(std::move(indices));
  }
  if(j.contains("r") && j.at("r").get<t_index>() != scheme.r())
    throw ParseError("level scheme: r does not match the number of levels");
}

} // namespace cifti
