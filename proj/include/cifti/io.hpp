#ifndef CIFTI_IO_HPP
#define CIFTI_IO_HPP

#include "cifti/recon.hpp"
#include "cifti/sampling.hpp"
#include "cifti/types.hpp"
#include "cifti/volume.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace cifti {

//! Shortest decimal that round-trips the double.
std::string format_number(t_real value);

//! RFC-4180 writer: CRLF record ends, fields quoted only when they need it.
class CsvWriter {
public:
  explicit CsvWriter(std::ostream &out) : out_(out) {}

  CsvWriter &field(std::string_view text);
  CsvWriter &field(t_real value) { return field(format_number(value)); }
  CsvWriter &field(t_index value) { return field(std::to_string(value)); }
  CsvWriter &field(int value) { return field(std::to_string(value)); }
  void end_row();
  void row(std::vector<std::string> const &fields);

private:
  std::ostream &out_;
  bool first_ = true;
};

//! Sidecar path next to a binary file: volume.bin -> volume.json.
std::filesystem::path sidecar_path(std::filesystem::path const &binary);

//! Column-major little-endian float64 cube plus a {N_xi, N_x, N_y} sidecar.
void save_volume(std::filesystem::path const &binary, HSVolume const &volume);
HSVolume load_volume(std::filesystem::path const &binary);

//! Interleaved re/im float64, column-major, plus a sidecar with the pattern and eps_nyq.
void save_measurements(std::filesystem::path const &binary, CiFtiMeasurements const &measurements);
CiFtiMeasurements load_measurements(std::filesystem::path const &binary);

//! One band as an N_y x N_x grid.
void write_band_map(std::ostream &out, HSVolume const &volume, t_index band);
//! 1 x N row of 0/1.
void write_mask_row(std::ostream &out, SamplingPattern const &pattern);

void write_json(std::filesystem::path const &path, nlohmann::json const &j);
nlohmann::json read_json(std::filesystem::path const &path);
void write_text(std::filesystem::path const &path, std::string const &text);

} // namespace cifti

#endif
