#include "cifti/dictionary.hpp"
#include "cifti/rng.hpp"
#include "cifti/transforms.hpp"

#include <boost/tokenizer.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace cifti {

namespace {

std::string trim(std::string const &text) {
  auto const first = text.find_first_not_of(" \t\r");
  if(first == std::string::npos)
    return {};
  auto const last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(std::string const &line) {
  using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;
  boost::escaped_list_separator<char> separator('\\', ',', '"');
  std::vector<std::string> fields;
  try {
    for(auto const &field : Tokenizer(line, separator))
      fields.push_back(trim(field));
  } catch(boost::escaped_list_error const &e) {
    throw ParseError(std::string("dictionary CSV: ") + e.what());
  }
  return fields;
}

t_real parse_number(std::string const &field, t_index row, std::size_t column) {
  t_real value = 0;
  auto const *begin = field.data();
  auto const *end = field.data() + field.size();
  auto const [ptr, ec] = std::from_chars(begin, end, value);
  if(field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value))
    throw ParseError("dictionary CSV: line " + std::to_string(row) + ", column "
                     + std::to_string(column + 1) + ": '" + field + "' is not a number");
  return value;
}

bool is_grid_name(std::string name) {
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
  return name == "wavelength" || name == "wavelength_nm" || name == "nm";
}

//! Linear interpolation of samples (x_i, y_i) at the query points.
RealVector interpolate(RealVector const &x, RealVector const &y, RealVector const &query) {
  RealVector out(query.size());
  t_index i = 0;
  for(t_index q = 0; q < query.size(); ++q) {
    t_real const t = query(q);
    while(i + 2 < x.size() && x(i + 1) < t)
      ++i;
    if(x.size() == 1) {
      out(q) = y(0);
      continue;
    }
    t_real const span = x(i + 1) - x(i);
    t_real const w = std::clamp((t - x(i)) / span, t_real(0), t_real(1));
    out(q) = (1 - w) * y(i) + w * y(i + 1);
  }
  return out;
}

} // namespace

SpectralDictionary parse_dictionary(std::istream &input, t_index target_length) {
  require_power_of_two(target_length, "load_dictionary");
  std::vector<std::string> lines;
  for(std::string line; std::getline(input, line);)
    lines.push_back(line);
  std::size_t cursor = 0;
  while(cursor < lines.size() && trim(lines[cursor]).empty())
    ++cursor;
  if(cursor == lines.size())
    throw ParseError("dictionary CSV: empty dictionary (no header)");
  auto const header = split_fields(lines[cursor++]);

  bool const has_grid = is_grid_name(header.front());
  std::size_t const first_spectrum = has_grid ? 1 : 0;
  if(header.size() <= first_spectrum)
    throw ParseError("dictionary CSV: empty dictionary (no spectra columns)");

  std::vector<std::vector<t_real>> rows;
  for(; cursor < lines.size(); ++cursor) {
    if(trim(lines[cursor]).empty())
      continue;
    auto const row_number = static_cast<t_index>(cursor + 1);
    auto const fields = split_fields(lines[cursor]);
    if(fields.size() != header.size())
      throw ParseError("dictionary CSV: line " + std::to_string(row_number) + " has "
                       + std::to_string(fields.size()) + " fields, expected "
                       + std::to_string(header.size()));
    std::vector<t_real> values(fields.size());
    for(std::size_t c = 0; c < fields.size(); ++c)
      values[c] = parse_number(fields[c], row_number, c);
    rows.push_back(std::move(values));
  }
  if(rows.empty())
    throw ParseError("dictionary CSV: empty dictionary (no sample rows)");

  auto const samples = static_cast<t_index>(rows.size());
  auto const n_f = static_cast<t_index>(header.size() - first_spectrum);
  SpectralDictionary dictionary;
  dictionary.names.assign(header.begin() + static_cast<std::ptrdiff_t>(first_spectrum), header.end());

  RealVector grid(samples);
  for(t_index i = 0; i < samples; ++i)
    grid(i) = has_grid ? rows[i][0] : t_real(i);
  for(t_index i = 1; i < samples; ++i)
    if(!(grid(i) > grid(i - 1)))
      throw ParseError("dictionary CSV: wavelength grid must be strictly increasing");
  RealVector query(target_length);
  for(t_index q = 0; q < target_length; ++q)
    query(q) = samples == 1 ? grid(0)
                            : grid(0) + (grid(samples - 1) - grid(0)) * t_real(q) / t_real(target_length - 1);
  if(has_grid)
    dictionary.wavelengths_nm = query;

  dictionary.H.resize(target_length, n_f);
  for(t_index c = 0; c < n_f; ++c) {
    RealVector column(samples);
    for(t_index i = 0; i < samples; ++i) {
      t_real v = rows[i][first_spectrum + c];
      if(v < 0) {
        v = 0;
        ++dictionary.clamped;
      }
      column(i) = v;
    }
    if(column.maxCoeff() <= 0)
      throw DomainError("dictionary CSV: column '" + dictionary.names[c] + "' is all zeros");
    dictionary.H.col(c) = interpolate(grid, column, query);
  }
  return dictionary;
}

SpectralDictionary load_dictionary(std::filesystem::path const &path, t_index target_length) {
  std::ifstream input(path);
  if(!input)
    throw IoError("cannot open dictionary file " + path.string());
  return parse_dictionary(input, target_length);
}

SpectralDictionary synth_dictionary(t_index n_f, t_index n_nu, std::uint64_t seed) {
  if(n_f < 1)
    throw DomainError("synth_dictionary: need at least one spectrum");
  require_power_of_two(n_nu, "synth_dictionary");
  Rng rng(seed);
  SpectralDictionary dictionary;
  dictionary.H = RealMatrix::Zero(n_nu, n_f);
  t_real const band = t_real(n_nu);
  for(t_index c = 0; c < n_f; ++c) {
    auto const bumps = 1 + static_cast<t_index>(rng.index(3));
    for(t_index b = 0; b < bumps; ++b) {
      // width is the Gaussian standard deviation; centres stay 5 widths clear of the band edges
      t_real const width = rng.uniform(0.03, 0.10) * band;
      t_real const centre = rng.uniform(5 * width, band - 1 - 5 * width);
      t_real const amplitude = rng.uniform(0.3, 1.0);
      for(t_index i = 0; i < n_nu; ++i) {
        t_real const d = (t_real(i) - centre) / width;
        dictionary.H(i, c) += amplitude * std::exp(-0.5 * d * d);
      }
    }
    dictionary.H.col(c) /= dictionary.H.col(c).maxCoeff();
    std::ostringstream name;
    name << "synthetic-" << (c + 1);
    dictionary.names.push_back(name.str());
  }
  return dictionary;
}

std::vector<t_index> energy_support(RealVector const &magnitudes, t_real rho) {
  if(rho < 0 || rho > 1)
    throw DomainError("energy_support: rho must lie in [0, 1]");
  t_real const floor = 1e-12 * magnitudes.norm();
  std::vector<t_index> order;
  for(t_index i = 0; i < magnitudes.size(); ++i)
    if(magnitudes(i) > floor)
      order.push_back(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](t_index a, t_index b) { return magnitudes(a) > magnitudes(b); });
  if(rho <= 0)
    return {};
  if(rho >= 1)
    return order;
  t_real total = 0;
  for(auto const i : order)
    total += magnitudes(i) * magnitudes(i);
  // relative slack so that exact ties such as 4 >= 0.8 * 5 survive rounding of rho^2
  t_real const target = rho * rho * total * (1 - 1e-12);
  t_real cumulative = 0;
  for(std::size_t n = 0; n < order.size(); ++n) {
    cumulative += magnitudes(order[n]) * magnitudes(order[n]);
    if(cumulative >= target) {
      order.resize(n + 1);
      return order;
    }
  }
  return order;
}

std::vector<t_real> LocalSparsityProfile::ratios() const {
  std::vector<t_real> out(k.size());
  for(std::size_t l = 0; l < k.size(); ++l)
    out[l] = t_real(k[l]) / t_real(T.size(static_cast<t_index>(l)));
  return out;
}

LocalSparsityProfile
estimate_profile(SpectralDictionary const &dictionary, Basis psi, LevelScheme const &T, t_real rho) {
  if(T.N != dictionary.bands())
    throw DimensionError("estimate_profile: dictionary has " + std::to_string(dictionary.bands())
                         + " bands but the level scheme has N = " + std::to_string(T.N));
  if(rho < 0 || rho > 1)
    throw DomainError("estimate_profile: rho must lie in [0, 1]");
  LocalSparsityProfile profile;
  profile.rho = rho;
  profile.psi = psi;
  profile.T = T;
  profile.k.assign(T.r(), 0);
  auto const owner = T.level_of();
  for(t_index i = 0; i < dictionary.size(); ++i) {
    RealVector const column = dictionary.H.col(i);
    RealVector const magnitudes = analyse(psi, column).cwiseAbs();
    auto const kept = energy_support(magnitudes, rho);
    std::vector<t_index> counts(T.r(), 0);
    for(auto const s : kept)
      ++counts[owner[s]];
    for(t_index l = 0; l < T.r(); ++l)
      profile.k[l] = std::max(profile.k[l], counts[l]);
    profile.kept.push_back(static_cast<t_index>(kept.size()));
    profile.per_fluorochrome.push_back(std::move(counts));
  }
  for(t_index l = T.r(); l > 0; --l)
    if(profile.k[l - 1] > 0) {
      profile.r0 = l;
      break;
    }
  return profile;
}

HSVolume lmm_mix(SpectralDictionary const &dictionary, RealMatrix const &G) {
  if(G.rows() != dictionary.size())
    throw DimensionError("lmm_mix: G has " + std::to_string(G.rows()) + " rows but the dictionary has "
                         + std::to_string(dictionary.size()) + " spectra");
  if(G.size() > 0 && G.minCoeff() < 0)
    throw DomainError("lmm_mix: concentrations must be nonnegative");
  HSVolume volume;
  volume.X = dictionary.H * G;
  return volume;
}

nlohmann::json to_json(LocalSparsityProfile const &profile) {
  return {{"rho", profile.rho},
          {"psi", std::string(to_string(profile.psi))},
          {"N", profile.T.N},
          {"r", profile.T.r()},
          {"k", profile.k},
          {"r0", profile.r0},
          {"level_sizes", profile.T.sizes()},
          {"kept", profile.kept},
          {"per_fluorochrome", profile.per_fluorochrome}};
}

} // namespace cifti
