#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "common.hpp"
#include "glm_core.hpp"

namespace puclust {

/// Table as read from disk: feature columns plus one binary target.
struct RawTable
{
    std::vector<std::string> column_names;
    std::vector<std::vector<double>> columns;
    std::vector<bool> categorical;
    std::string target_name;
    Labels y;
    std::size_t n_rows = 0;

    std::size_t n_features() const { return columns.size(); }
};

struct DroppedFeature
{
    std::string name;
    std::string reason;
};

/// Preprocessed feature matrix with true labels.
struct Dataset
{
    std::string name;
    Matrix X;
    Labels y;
    std::vector<std::string> feature_names;
    std::vector<DroppedFeature> dropped;

    Index n_obs() const { return X.rows(); }
    Index n_features() const { return X.cols(); }
    std::size_t n_positive() const { return count_ones(y); }
};

struct DatasetSummary
{
    std::size_t n_features = 0;
    std::size_t n_obs = 0;
    std::size_t n_noncont = 0;
    std::size_t n_cont = 0;
    std::size_t n_neg = 0;
    std::size_t n_pos = 0;
    double pos_pct = 0.0;
    double mean_abs_corr = 0.0;
    bool corr_defined = true;
};

struct PreprocessConfig
{
    double corr_threshold = 0.9;
    double quasi_const_share = 0.9;
    std::size_t min_unique = 5;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(cell));
            cell.clear();
        } else {
            cell.push_back(ch);
        }
    }
    out.push_back(std::move(cell));
    for (auto& c : out) {
        const auto b = c.find_first_not_of(" \t");
        const auto e = c.find_last_not_of(" \t\r");
        c = (b == std::string::npos) ? std::string() : c.substr(b, e - b + 1);
    }
    return out;
}

inline std::optional<double> parse_number(const std::string& s)
{
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::size_t count_unique(const Eigen::Ref<const Vector>& col)
{
    std::vector<double> v(col.data(), col.data() + col.size());
    std::sort(v.begin(), v.end());
    return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

inline double modal_share(const std::vector<double>& col)
{
    std::unordered_map<double, std::size_t> counts;
    std::size_t best = 0;
    for (double v : col) best = std::max(best, ++counts[v]);
    return col.empty() ? 0.0 : static_cast<double>(best) / static_cast<double>(col.size());
}

} // namespace detail

/// Reads a comma-delimited file with a header row. Non-numeric feature
/// columns are integer-coded by lexicographic level order; the target must
/// take exactly two distinct values and is mapped to {0, 1} in sorted order
/// (numeric order when both values are numbers).
inline RawTable load_csv(const std::string& path, const std::string& target_column)
{
    std::ifstream in(path);
    if (!in) throw Error("load_csv: cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw Error("load_csv: '" + path + "' is empty");
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3); // BOM
    const auto header = detail::split_csv_line(line);

    const auto target_it = std::find(header.begin(), header.end(), target_column);
    if (target_it == header.end()) {
        throw Error("load_csv: target column '" + target_column + "' not found in '" + path + "'");
    }
    const std::size_t target_idx = static_cast<std::size_t>(target_it - header.begin());

    std::vector<std::vector<std::string>> cells(header.size());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != header.size()) {
            throw Error("load_csv: line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                        " fields, expected " + std::to_string(header.size()));
        }
        for (std::size_t j = 0; j < fields.size(); ++j) {
            if (fields[j].empty()) {
                throw Error("load_csv: empty cell at line " + std::to_string(line_no) + ", column '" + header[j] +
                            "'");
            }
            cells[j].push_back(std::move(fields[j]));
        }
    }

    RawTable table;
    table.n_rows = cells.empty() ? 0 : cells[0].size();
    if (table.n_rows == 0) throw Error("load_csv: '" + path + "' has no data rows");
    table.target_name = target_column;

    // target
    {
        const auto& col = cells[target_idx];
        std::vector<std::string> levels(col.begin(), col.end());
        std::sort(levels.begin(), levels.end());
        levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
        if (levels.size() != 2) {
            throw Error("load_csv: target '" + target_column + "' has " + std::to_string(levels.size()) +
                        " distinct values, expected 2");
        }
        const auto a = detail::parse_number(levels[0]);
        const auto b = detail::parse_number(levels[1]);
        if (a && b && *b < *a) std::swap(levels[0], levels[1]);
        table.y.reserve(table.n_rows);
        for (const auto& v : col) table.y.push_back(v == levels[1] ? 1 : 0);
    }

    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j == target_idx) continue;
        const auto& col = cells[j];
        std::vector<double> values;
        values.reserve(col.size());
        bool numeric = true;
        for (const auto& c : col) {
            auto v = detail::parse_number(c);
            if (!v) {
                numeric = false;
                break;
            }
            values.push_back(*v);
        }
        if (!numeric) {
            std::map<std::string, double> codes;
            for (const auto& c : col) codes.emplace(c, 0.0);
            double code = 0.0;
            for (auto& [level, value] : codes) value = code++;
            values.clear();
            for (const auto& c : col) values.push_back(codes.at(c));
        }
        table.column_names.push_back(header[j]);
        table.columns.push_back(std::move(values));
        table.categorical.push_back(!numeric);
    }
    return table;
}

/// View of an in-memory dataset as a raw table so it can run through the
/// same preprocessing as a file.
inline RawTable to_raw_table(const Dataset& ds)
{
    RawTable t;
    t.n_rows = static_cast<std::size_t>(ds.n_obs());
    t.target_name = "target";
    t.y = ds.y;
    for (Index j = 0; j < ds.n_features(); ++j) {
        t.column_names.push_back(ds.feature_names[static_cast<std::size_t>(j)]);
        t.columns.emplace_back(ds.X.col(j).data(), ds.X.col(j).data() + ds.n_obs());
        t.categorical.push_back(false);
    }
    return t;
}

/// Filtering and scaling pipeline, in order:
///  1. drop quasi-constant features (modal value share > quasi_const_share);
///  2. for each pair with |Pearson r| > corr_threshold drop the later feature;
///  3. min-max scale every remaining feature to [0, 1];
///  4. keep features with at least min_unique distinct values.
inline Dataset preprocess(const RawTable& raw, const PreprocessConfig& cfg = {}, std::string name = {})
{
    if (!(cfg.corr_threshold > 0.0 && cfg.corr_threshold <= 1.0)) {
        throw Error("preprocess: corr_threshold must lie in (0, 1]");
    }
    if (raw.n_rows == 0 || raw.y.size() != raw.n_rows) throw Error("preprocess: malformed table");
    const std::size_t n_pos = count_ones(raw.y);
    if (n_pos == 0 || n_pos == raw.n_rows) throw Error("preprocess: target has zero variance");

    Dataset ds;
    ds.name = std::move(name);
    ds.y = raw.y;
    const Index n = static_cast<Index>(raw.n_rows);

    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < raw.n_features(); ++j) {
        if (raw.columns[j].size() != raw.n_rows) throw Error("preprocess: column length mismatch");
        if (detail::modal_share(raw.columns[j]) > cfg.quasi_const_share) {
            ds.dropped.push_back({raw.column_names[j], "quasi-constant"});
        } else {
            kept.push_back(j);
        }
    }

    auto column = [&](std::size_t j) { return Eigen::Map<const Vector>(raw.columns[j].data(), n); };

    std::vector<std::size_t> decorrelated;
    for (std::size_t j : kept) {
        bool keep = true;
        for (std::size_t i : decorrelated) {
            if (std::abs(pearson(column(i), column(j))) > cfg.corr_threshold) {
                ds.dropped.push_back({raw.column_names[j], "correlated with " + raw.column_names[i]});
                keep = false;
                break;
            }
        }
        if (keep) decorrelated.push_back(j);
    }

    std::vector<Vector> scaled;
    std::vector<std::string> names;
    for (std::size_t j : decorrelated) {
        Vector col = column(j);
        const double lo = col.minCoeff();
        const double hi = col.maxCoeff();
        if (!(hi > lo)) {
            ds.dropped.push_back({raw.column_names[j], "constant after scaling"});
            continue;
        }
        if (lo != 0.0 || hi != 1.0) col = (col.array() - lo) / (hi - lo);
        if (detail::count_unique(col) < cfg.min_unique) {
            ds.dropped.push_back({raw.column_names[j], "fewer than " + std::to_string(cfg.min_unique) + " values"});
            continue;
        }
        scaled.push_back(std::move(col));
        names.push_back(raw.column_names[j]);
    }
    if (scaled.empty()) throw Error("preprocess: all features eliminated");

    ds.X.resize(n, static_cast<Index>(scaled.size()));
    for (std::size_t j = 0; j < scaled.size(); ++j) ds.X.col(static_cast<Index>(j)) = scaled[j];
    ds.feature_names = std::move(names);
    return ds;
}

/// Dataset profile; features with fewer than 15 distinct values count as
/// non-continuous. mean_abs_corr is the average |r| over feature pairs
/// (target excluded), reported as 0 with corr_defined = false when p < 2.
inline DatasetSummary summarize(const Dataset& ds)
{
    DatasetSummary s;
    const Index p = ds.n_features();
    s.n_features = static_cast<std::size_t>(p);
    s.n_obs = static_cast<std::size_t>(ds.n_obs());
    for (Index j = 0; j < p; ++j) {
        if (detail::count_unique(ds.X.col(j)) < 15) {
            ++s.n_noncont;
        } else {
            ++s.n_cont;
        }
    }
    s.n_pos = ds.n_positive();
    s.n_neg = s.n_obs - s.n_pos;
    s.pos_pct = s.n_obs ? 100.0 * static_cast<double>(s.n_pos) / static_cast<double>(s.n_obs) : 0.0;
    if (p < 2) {
        s.corr_defined = false;
        return s;
    }
    double total = 0.0;
    for (Index i = 0; i + 1 < p; ++i) {
        for (Index j = i + 1; j < p; ++j) total += std::abs(pearson(ds.X.col(i), ds.X.col(j)));
    }
    s.mean_abs_corr = 2.0 * total / (static_cast<double>(p) * static_cast<double>(p - 1));
    return s;
}

inline void write_summary_header(std::ostream& out)
{
    out << "dataset,n_features,n_obs,n_noncont,n_cont,n_neg,n_pos,pos_pct,mean_abs_corr\n";
}

inline void write_summary_row(std::ostream& out, const std::string& name, const DatasetSummary& s)
{
    char buf[64];
    out << name << ',' << s.n_features << ',' << s.n_obs << ',' << s.n_noncont << ',' << s.n_cont << ','
        << s.n_neg << ',' << s.n_pos << ',';
    std::snprintf(buf, sizeof buf, "%.2f,%.2f", s.pos_pct, s.mean_abs_corr);
    out << buf << '\n';
}

struct ArtifConfig
{
    std::size_t n = 2000;
    std::size_t p = 21;
    std::size_t n_relevant = 5;
    double sigma0 = 0.2;     // relevant column j (1-based) has sd j * sigma0
    double beta = 1.0;       // weight on every relevant feature
    double positive_share = 0.5;
};

/// Synthetic benchmark data. Features are independent zero-mean Gaussians;
/// relevant ones have increasing spread, the rest unit variance. Y is drawn
/// from a logistic model whose intercept is solved so the mean success
/// probability over the sample equals positive_share. Features are returned
/// unscaled; run them through preprocess(to_raw_table(...)) for experiments.
inline Dataset generate_artif(const ArtifConfig& cfg, std::uint64_t seed)
{
    if (cfg.n_relevant < 1 || cfg.n_relevant > cfg.p) throw Error("generate_artif: need 1 <= n_relevant <= p");
    if (cfg.n == 0) throw Error("generate_artif: n must be positive");
    Rng rng(seed);
    const Index n = static_cast<Index>(cfg.n);
    const Index p = static_cast<Index>(cfg.p);

    Dataset ds;
    ds.name = "artif";
    ds.X.resize(n, p);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < p; ++j) {
            const double sd = j < static_cast<Index>(cfg.n_relevant) ? static_cast<double>(j + 1) * cfg.sigma0 : 1.0;
            ds.X(i, j) = sd * standard_normal(rng);
        }
    }
    Vector eta = ds.X.leftCols(static_cast<Index>(cfg.n_relevant)).rowwise().sum() * cfg.beta;

    // Mean probability is increasing in the intercept; bisect.
    auto mean_prob = [&](double b0) {
        double acc = 0.0;
        for (Index i = 0; i < n; ++i) acc += sigmoid(b0 + eta(i));
        return acc / static_cast<double>(n);
    };
    double lo = -50.0, hi = 50.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mean_prob(mid) < cfg.positive_share ? lo : hi) = mid;
    }
    const double b0 = 0.5 * (lo + hi);

    ds.y.resize(cfg.n);
    for (Index i = 0; i < n; ++i) ds.y[static_cast<std::size_t>(i)] = bernoulli(rng, sigmoid(b0 + eta(i))) ? 1 : 0;
    for (Index j = 0; j < p; ++j) ds.feature_names.push_back("x" + std::to_string(j + 1));
    return ds;
}

} // namespace puclust
