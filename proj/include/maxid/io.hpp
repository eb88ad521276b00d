#pragma once

#include <string>
#include <vector>

#include "maxid/field.hpp"

namespace maxid {

// grid coordinates then the value, one row per point
void write_field_csv(const FieldRealization& field, const std::string& path);

// 8-bit binary PGM (P5); values mapped min -> 0, max -> 255 per frame
void write_pgm(const std::vector<double>& values, int rows, int cols,
               const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace maxid
