#include "possfuse/csv_io.hpp"

#include "possfuse/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace possfuse {

std::string format_double(double x) {
    char buf[64];
    // 17 significant digits always round-trips a binary64 value
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace csv {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, std::size_t line_no) {
    const auto f = trim(field);
    double v = 0.0;
    const char* first = f.data();
    const char* last = f.data() + f.size();
    if (!f.empty() && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (f.empty() || res.ec != std::errc() || res.ptr != last) {
        throw ValidationError("line " + std::to_string(line_no) + ": cannot parse number '" + f + "'");
    }
    return v;
}

}  // namespace

Table parse(std::istream& in) {
    Table t;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        if (line.front() == '#') {
            t.comments.push_back(line);
            continue;
        }
        auto fields = split(line);
        if (!have_header) {
            for (auto& f : fields) t.header.push_back(trim(f));
            t.columns.resize(t.header.size());
            have_header = true;
            continue;
        }
        if (fields.size() != t.header.size()) {
            throw ValidationError("line " + std::to_string(line_no) + ": expected " + std::to_string(t.header.size()) +
                                  " fields, found " + std::to_string(fields.size()));
        }
        for (std::size_t c = 0; c < fields.size(); ++c) t.columns[c].push_back(parse_number(fields[c], line_no));
    }
    if (!have_header) throw ValidationError("empty CSV: no header row");
    return t;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("write to '" + path + "' failed");
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format(const Table& t) {
    std::ostringstream out;
    for (const auto& c : t.comments) out << (c.starts_with('#') ? "" : "# ") << c << '\n';
    for (std::size_t c = 0; c < t.header.size(); ++c) out << (c ? "," : "") << t.header[c];
    out << '\n';
    const std::size_t rows = t.columns.empty() ? 0 : t.columns.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << format_double(t.columns[c][r]);
        out << '\n';
    }
    return out.str();
}

}  // namespace csv

namespace {

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return in;
}

GridPtr grid_from(const csv::Table& t) {
    if (t.header.empty() || t.header.front() != "theta") {
        throw ValidationError("malformed header: first column must be 'theta'");
    }
    return share(ParameterGrid::make(t.columns.front()));
}

}  // namespace

ContourSet parse_contour_set(std::istream& in) {
    const auto t = csv::parse(in);
    auto grid = grid_from(t);
    const std::size_t K = t.header.size() - 1;
    if (K < 2) {
        throw ValidationError("malformed header: a contour set needs at least pi_1,pi_2 (K >= 2), found K=" +
                              std::to_string(K));
    }
    std::vector<Contour> members;
    members.reserve(K);
    for (std::size_t k = 1; k <= K; ++k) {
        if (t.header[k] != "pi_" + std::to_string(k)) {
            throw ValidationError("malformed header: column " + std::to_string(k + 1) + " must be 'pi_" +
                                  std::to_string(k) + "', found '" + t.header[k] + "'");
        }
        members.emplace_back(grid, t.columns[k]);
    }
    return ContourSet(std::move(members));
}

ContourSet read_contour_set(const std::string& path) {
    auto in = open_in(path);
    return parse_contour_set(in);
}

Contour parse_contour(std::istream& in) {
    const auto t = csv::parse(in);
    auto grid = grid_from(t);
    if (t.header.size() != 2 || t.header[1] != "pi") {
        throw ValidationError("malformed header: single-contour file must be 'theta,pi'");
    }
    return Contour(grid, t.columns[1]);
}

Contour read_contour(const std::string& path) {
    auto in = open_in(path);
    return parse_contour(in);
}

void write_contour(std::ostream& out, const Contour& contour) {
    out << "theta,pi\n";
    for (std::size_t i = 0; i < contour.size(); ++i) {
        out << format_double(contour.grid()[i]) << ',' << format_double(contour[i]) << '\n';
    }
}

void write_contour(const std::string& path, const Contour& contour) {
    std::ostringstream ss;
    write_contour(ss, contour);
    csv::write_text(path, ss.str());
}

void write_contour_set(std::ostream& out, const ContourSet& set) {
    out << "theta";
    for (std::size_t k = 1; k <= set.K(); ++k) out << ",pi_" << k;
    out << '\n';
    for (std::size_t i = 0; i < set.M(); ++i) {
        out << format_double(set.grid()[i]);
        for (std::size_t k = 0; k < set.K(); ++k) out << ',' << format_double(set[k][i]);
        out << '\n';
    }
}

void write_contour_set(const std::string& path, const ContourSet& set) {
    std::ostringstream ss;
    write_contour_set(ss, set);
    csv::write_text(path, ss.str());
}

}  // namespace possfuse
