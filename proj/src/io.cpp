#include "maxid/io.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <ios>
#include <sstream>
#include <stdexcept>

namespace maxid {

namespace {

std::ofstream open_out(const std::string& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

}  // namespace

void write_field_csv(const FieldRealization& field, const std::string& path) {
  std::ostringstream body;
  body.precision(17);
  int d = static_cast<int>(field.grid.front().size());
  for (int c = 0; c < d; ++c) body << "t" << c << ",";
  body << "value\n";
  for (size_t i = 0; i < field.grid.size(); ++i) {
    for (int c = 0; c < d; ++c) body << field.grid[i][c] << ",";
    body << field.values[i] << "\n";
  }
  open_out(path, std::ios::out) << body.str();
}

void write_pgm(const std::vector<double>& values, int rows, int cols,
               const std::string& path) {
  if (values.size() != static_cast<size_t>(rows) * cols)
    throw std::invalid_argument("pgm: value count does not match shape");
  auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  double lo = *mn, span = *mx - *mn;
  std::vector<std::uint8_t> pixels(values.size());
  for (size_t i = 0; i < values.size(); ++i)
    pixels[i] = span > 0.0 ? static_cast<std::uint8_t>(
                                 std::clamp(255.0 * (values[i] - lo) / span,
                                            0.0, 255.0))
                           : 0;
  auto out = open_out(path, std::ios::binary);
  out << "P5\n" << cols << " " << rows << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
}

void write_text_file(const std::string& path, const std::string& content) {
  open_out(path, std::ios::out) << content;
}

}  // namespace maxid
