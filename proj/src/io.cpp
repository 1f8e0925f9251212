#include "cifti/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace cifti {

static_assert(std::endian::native == std::endian::little, "binary volume format assumes little-endian hosts");

std::string format_number(t_real value) {
  char buffer[32];
  auto const [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if(ec != std::errc())
    throw Error("format_number: conversion failed");
  return std::string(buffer, end);
}

CsvWriter &CsvWriter::field(std::string_view text) {
  if(!first_)
    out_ << ',';
  first_ = false;
  if(text.find_first_of(",\"\r\n") == std::string_view::npos) {
    out_ << text;
    return *this;
  }
  out_ << '"';
  for(char const c : text) {
    if(c == '"')
      out_ << '"';
    out_ << c;
  }
  out_ << '"';
  return *this;
}

void CsvWriter::end_row() {
  out_ << "\r\n";
  first_ = true;
}

void CsvWriter::row(std::vector<std::string> const &fields) {
  for(auto const &f : fields)
    field(f);
  end_row();
}

std::filesystem::path sidecar_path(std::filesystem::path const &binary) {
  auto path = binary;
  path.replace_extension(".json");
  return path;
}

namespace {

std::ofstream open_out(std::filesystem::path const &path, std::ios::openmode mode = std::ios::out) {
  if(path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, mode | std::ios::trunc);
  if(!out)
    throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(std::filesystem::path const &path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if(!in)
    throw IoError("cannot open '" + path.string() + "'");
  return in;
}

void write_doubles(std::filesystem::path const &path, double const *data, std::size_t count) {
  auto out = open_out(path, std::ios::binary);
  out.write(reinterpret_cast<char const *>(data), static_cast<std::streamsize>(count * sizeof(double)));
  if(!out)
    throw IoError("short write to '" + path.string() + "'");
}

std::vector<double> read_doubles(std::filesystem::path const &path, std::size_t count) {
  auto in = open_in(path, std::ios::binary);
  std::vector<double> data(count);
  in.read(reinterpret_cast<char *>(data.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if(in.gcount() != static_cast<std::streamsize>(count * sizeof(double)))
    throw IoError("'" + path.string() + "' holds fewer than the " + std::to_string(count)
                  + " values its sidecar declares");
  if(in.peek() != std::char_traits<char>::eof())
    throw IoError("'" + path.string() + "' is longer than its sidecar declares");
  return data;
}

t_index size_field(nlohmann::json const &j, char const *key, std::filesystem::path const &path) {
  if(!j.contains(key) || !j[key].is_number_integer() || j[key].get<t_index>() < 0)
    throw IoError("sidecar '" + path.string() + "' needs a nonnegative integer '" + key + "'");
  return j[key].get<t_index>();
}

} // namespace

void write_json(std::filesystem::path const &path, nlohmann::json const &j) {
  write_text(path, j.dump(2) + "\n");
}

nlohmann::json read_json(std::filesystem::path const &path) {
  auto in = open_in(path);
  try {
    return nlohmann::json::parse(in);
  } catch(nlohmann::json::parse_error const &e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  }
}

void write_text(std::filesystem::path const &path, std::string const &text) {
  auto out = open_out(path, std::ios::binary);
  out << text;
  if(!out)
    throw IoError("short write to '" + path.string() + "'");
}

void save_volume(std::filesystem::path const &binary, HSVolume const &volume) {
  volume.validate();
  SpatialShape const shape = volume.shape.value_or(SpatialShape{volume.pixels(), 1});
  write_doubles(binary, volume.X.data(), static_cast<std::size_t>(volume.X.size()));
  write_json(sidecar_path(binary), {{"N_xi", volume.bands()}, {"N_x", shape.nx}, {"N_y", shape.ny}});
}

HSVolume load_volume(std::filesystem::path const &binary) {
  auto const side = sidecar_path(binary);
  auto const meta = read_json(side);
  t_index const n_xi = size_field(meta, "N_xi", side);
  SpatialShape const shape{size_field(meta, "N_x", side), size_field(meta, "N_y", side)};
  auto const data = read_doubles(binary, static_cast<std::size_t>(n_xi * shape.nx * shape.ny));
  HSVolume volume;
  volume.X = Eigen::Map<RealMatrix const>(data.data(), n_xi, shape.nx * shape.ny);
  volume.shape = shape;
  volume.validate();
  return volume;
}

void save_measurements(std::filesystem::path const &binary, CiFtiMeasurements const &measurements) {
  // std::complex<double> is layout-compatible with double[2]
  write_doubles(binary, reinterpret_cast<double const *>(measurements.Y.data()),
                static_cast<std::size_t>(2 * measurements.Y.size()));
  write_json(sidecar_path(binary), {{"rows", measurements.Y.rows()},
                                    {"N_p", measurements.Y.cols()},
                                    {"eps_nyq", measurements.eps_nyq},
                                    {"pattern", to_json(measurements.pattern)}});
}

CiFtiMeasurements load_measurements(std::filesystem::path const &binary) {
  auto const side = sidecar_path(binary);
  auto const meta = read_json(side);
  t_index const rows = size_field(meta, "rows", side);
  t_index const n_p = size_field(meta, "N_p", side);
  CiFtiMeasurements out;
  try {
    out.pattern = pattern_from_json(meta.at("pattern"));
    out.eps_nyq = meta.at("eps_nyq").get<t_real>();
  } catch(nlohmann::json::exception const &e) {
    throw ParseError("sidecar '" + side.string() + "': " + e.what());
  }
  if(out.pattern.size() != rows)
    throw ParseError("sidecar '" + side.string() + "': row count does not match the pattern");
  auto const data = read_doubles(binary, static_cast<std::size_t>(2 * rows * n_p));
  out.Y.resize(rows, n_p);
  std::memcpy(static_cast<void *>(out.Y.data()), data.data(), data.size() * sizeof(double));
  return out;
}

void write_band_map(std::ostream &out, HSVolume const &volume, t_index band) {
  if(band < 0 || band >= volume.bands())
    throw DomainError("band map: band " + std::to_string(band) + " outside [0, "
                      + std::to_string(volume.bands()) + ")");
  SpatialShape const shape = volume.shape.value_or(SpatialShape{volume.pixels(), 1});
  CsvWriter csv(out);
  for(t_index yy = 0; yy < shape.ny; ++yy) {
    for(t_index xx = 0; xx < shape.nx; ++xx)
      csv.field(volume.X(band, yy * shape.nx + xx));
    csv.end_row();
  }
}

void write_mask_row(std::ostream &out, SamplingPattern const &pattern) {
  CsvWriter csv(out);
  for(int const v : mask_row(pattern))
    csv.field(v);
  csv.end_row();
}

} // namespace cifti
