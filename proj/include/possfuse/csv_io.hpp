#pragma once

// Contour interchange files.
//
//   contour set:     theta,pi_1,...,pi_K   (K >= 2)
//   single contour:  theta,pi
//
// Plain decimal text, LF endings, one row per grid point. Lines starting
// with '#' are comments and are skipped by the readers. Writers emit 17
// significant digits so every double survives a round trip unchanged.

#include "possfuse/grid_contour.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace possfuse {

ContourSet read_contour_set(const std::string& path);
ContourSet parse_contour_set(std::istream& in);

Contour read_contour(const std::string& path);
Contour parse_contour(std::istream& in);

void write_contour(const std::string& path, const Contour& contour);
void write_contour(std::ostream& out, const Contour& contour);
void write_contour_set(const std::string& path, const ContourSet& set);
void write_contour_set(std::ostream& out, const ContourSet& set);

// %.17g-style text; parses back to exactly x.
std::string format_double(double x);

namespace csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
    std::vector<std::string> comments;
};

// Numeric CSV with a header row. Throws ValidationError on ragged rows or
// unparsable numbers.
Table parse(std::istream& in);

// Opens for writing; throws IoError.
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

// Comment lines (prefixed with "# " unless they already start with '#'),
// header, then rows.
std::string format(const Table& t);

}  // namespace csv

}  // namespace possfuse
