#pragma once

#include "gnfr/objects.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace gnfr {

/// Histogram table: shared bin edges, one row of counts per subject.
struct BinnedTable {
    Vec edges;
    std::vector<std::string> ids;
    std::vector<Vec> counts;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline double parse_number(const std::string& s, long line_no) {
    try {
        size_t used = 0;
        double v = std::stod(s, &used);
        while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("not a number: '" + s + "'", line_no);
    }
}

}  // namespace detail

/// Parse the binned CSV format: first line `edges,e0,e1,...,eK`, then one
/// `id,c1,...,cK` row per subject. Errors cite the offending line.
inline BinnedTable parse_binned_csv(std::istream& in) {
    BinnedTable table;
    std::string line;
    long line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty input", 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header = detail::split_csv_line(line);
    if (header.size() < 3 || header[0] != "edges")
        throw ParseError("header must be 'edges,e0,e1,...'", line_no);
    table.edges.resize(static_cast<Eigen::Index>(header.size() - 1));
    for (size_t k = 1; k < header.size(); ++k) {
        table.edges[static_cast<Eigen::Index>(k - 1)] = detail::parse_number(header[k], line_no);
        if (k > 1 && table.edges[k - 1] <= table.edges[k - 2])
            throw ParseError("bin edges must be strictly increasing", line_no);
    }
    const auto n_bins = table.edges.size() - 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields = detail::split_csv_line(line);
        if (static_cast<Eigen::Index>(fields.size()) != n_bins + 1)
            throw ParseError("expected " + std::to_string(n_bins) + " counts for row '" +
                                 (fields.empty() ? "" : fields[0]) + "'",
                             line_no);
        Vec counts(n_bins);
        double total = 0.0;
        for (Eigen::Index k = 0; k < n_bins; ++k) {
            counts[k] = detail::parse_number(fields[k + 1], line_no);
            if (counts[k] < 0.0) throw ParseError("negative count in row '" + fields[0] + "'",
                                                  line_no);
            total += counts[k];
        }
        if (total <= 0.0)
            throw ParseError("row '" + fields[0] + "' has zero total count", line_no);
        table.ids.push_back(fields[0]);
        table.counts.push_back(std::move(counts));
    }
    if (table.ids.empty()) throw ParseError("no data rows", line_no);
    return table;
}

/// Piecewise-uniform inverse CDF of one histogram row evaluated on the grid.
inline QuantileObject binned_row_to_quantiles(const Vec& edges, const Vec& counts,
                                              const ProbGrid& grid) {
    const Eigen::Index n_bins = counts.size();
    Vec cum(n_bins + 1);
    cum[0] = 0.0;
    for (Eigen::Index k = 0; k < n_bins; ++k) cum[k + 1] = cum[k] + counts[k];
    double total = cum[n_bins];
    Vec out(grid.size());
    for (Eigen::Index j = 0; j < grid.size(); ++j) {
        double target = grid.points()[j] * total;
        // smallest k with cum[k+1] >= target; then cum[k] < target, so the
        // bin is nonempty and the interpolation below is well defined
        Eigen::Index k = 0;
        while (k < n_bins - 1 && cum[k + 1] < target) ++k;
        double frac = (target - cum[k]) / (cum[k + 1] - cum[k]);
        out[j] = edges[k] + frac * (edges[k + 1] - edges[k]);
        if (j > 0 && out[j] < out[j - 1]) out[j] = out[j - 1];
    }
    return QuantileObject(grid, out);
}

/// Histogram file -> quantile objects on the grid; ids returned alongside.
inline std::pair<std::vector<std::string>, std::vector<MetricObject>> ingest_binned(
    const std::string& path, const ProbGrid& grid) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path, 0);
    BinnedTable table = parse_binned_csv(in);
    std::vector<MetricObject> objects;
    objects.reserve(table.ids.size());
    for (const auto& counts : table.counts)
        objects.push_back(binned_row_to_quantiles(table.edges, counts, grid));
    return {std::move(table.ids), std::move(objects)};
}

/// Plain numeric CSV of Euclidean predictors: `id,x1,...,xp` per row, no
/// header.
inline std::pair<std::vector<std::string>, std::vector<MetricObject>> ingest_euclidean(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path, 0);
    std::vector<std::string> ids;
    std::vector<MetricObject> objects;
    std::string line;
    long line_no = 0;
    Eigen::Index dim = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields = detail::split_csv_line(line);
        if (fields.size() < 2) throw ParseError("expected id,x1,...", line_no);
        Vec v(static_cast<Eigen::Index>(fields.size() - 1));
        for (size_t k = 1; k < fields.size(); ++k)
            v[static_cast<Eigen::Index>(k - 1)] = detail::parse_number(fields[k], line_no);
        if (dim < 0) dim = v.size();
        if (v.size() != dim) throw ParseError("inconsistent dimension", line_no);
        ids.push_back(fields[0]);
        objects.push_back(EuclideanVector(v));
    }
    if (ids.empty()) throw ParseError("no data rows", line_no == 0 ? 1 : line_no);
    return {std::move(ids), std::move(objects)};
}

/// One quantile vector per row: `id,q1,...,qM`.
inline void write_quantile_csv(std::ostream& out, const std::vector<std::string>& ids,
                               const std::vector<MetricObject>& objects) {
    for (size_t i = 0; i < ids.size(); ++i) {
        out << ids[i];
        const auto& q = std::get<QuantileObject>(objects[i]);
        for (Eigen::Index j = 0; j < q.values.size(); ++j)
            out << "," << format_double(q.values[j]);
        out << "\n";
    }
}

}  // namespace gnfr
