#pragma once

// Plain-text dataset formats.
//
//   data CSV    numeric, comma separated, no header; rows are ambient
//               coordinates and columns are data vectors
//   labels      one base-10 integer per line, stored next to the CSV as
//               <name>.labels
//   manifest    one `filename,category,M` record per line

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cursim/cluster.hpp"
#include "cursim/error.hpp"
#include "cursim/linalg.hpp"

namespace cursim::io {

namespace fs = std::filesystem;

struct DatasetFile {
    fs::path path;
    Matrix matrix;
    std::optional<LabelVector> labels;
};

struct ManifestEntry {
    std::string filename;
    std::string category;
    std::size_t m_subspaces = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <class T>
bool parse_number(std::string_view text, T& out) {
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

inline std::string where(const fs::path& path, std::size_t line) {
    return path.string() + ":" + std::to_string(line);
}

}  // namespace detail

inline fs::path labels_path_for(const fs::path& csv) {
    fs::path p = csv;
    p.replace_extension(".labels");
    return p;
}

inline LabelVector load_labels(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open labels file " + path.string());
    std::vector<std::size_t> labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto text = detail::trim(line);
        if (text.empty()) continue;
        long long v = 0;
        if (!detail::parse_number(text, v) || v < 0)
            throw DataError(detail::where(path, lineno) + ": label is not a nonnegative integer: '" + std::string(text) + "'");
        labels.push_back(static_cast<std::size_t>(v));
    }
    return make_labels(std::move(labels));
}

/// Parses a data CSV and, when present, its sibling labels file.
inline DatasetFile load_csv(const fs::path& path) {
    if (!fs::exists(path)) throw DataError("missing file: " + path.string());
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        std::vector<double> row;
        for (const auto cell : detail::split(line, ',')) {
            double v = 0.0;
            if (!detail::parse_number(cell, v) || !std::isfinite(v))
                throw DataError(detail::where(path, lineno) + ": non-numeric cell '" + std::string(cell) + "'");
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw DataError(detail::where(path, lineno) + ": ragged row with " + std::to_string(row.size()) +
                            " cells, expected " + std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError(path.string() + ": no data rows");

    DatasetFile ds;
    ds.path = path;
    ds.matrix.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            ds.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];

    const fs::path lp = labels_path_for(path);
    if (fs::exists(lp)) {
        LabelVector labels = load_labels(lp);
        if (labels.size() != static_cast<std::size_t>(ds.matrix.cols()))
            throw DataError("label-count mismatch: " + lp.string() + " has " + std::to_string(labels.size()) +
                            " labels for " + std::to_string(ds.matrix.cols()) + " columns");
        ds.labels = std::move(labels);
    }
    return ds;
}

/// Shortest text that parses back to exactly `v`.
inline std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

inline void save_csv(const fs::path& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

inline void save_labels(const fs::path& path, const LabelVector& labels) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    for (auto l : labels.labels) out << l << '\n';
}

inline std::vector<ManifestEntry> load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("unreadable manifest " + path.string());
    std::vector<ManifestEntry> entries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto text = detail::trim(line);
        if (text.empty() || text.front() == '#') continue;
        const auto cells = detail::split(text, ',');
        ManifestEntry e;
        if (cells.size() != 3 || cells[0].empty() || !detail::parse_number(cells[2], e.m_subspaces) ||
            e.m_subspaces == 0)
            throw DataError(detail::where(path, lineno) + ": expected filename,category,M");
        e.filename = std::string(cells[0]);
        e.category = std::string(cells[1]);
        entries.push_back(std::move(e));
    }
    return entries;
}

}  // namespace cursim::io
