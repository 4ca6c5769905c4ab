#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "common.hpp"
#include "data.hpp"
#include "labelling.hpp"
#include "lassojoint.hpp"
#include "metrics.hpp"
#include "pecking.hpp"

namespace puclust {

enum class Method { Naive, Clust, LassclustStrict, LassclustNonStrict, LassoJoint };

inline const std::vector<Method>& all_methods()
{
    static const std::vector<Method> m{Method::Naive, Method::Clust, Method::LassclustStrict,
                                       Method::LassclustNonStrict, Method::LassoJoint};
    return m;
}

inline std::string to_string(Method m)
{
    switch (m) {
    case Method::Naive: return "naive";
    case Method::Clust: return "clust";
    case Method::LassclustStrict: return "strict_lassclust";
    case Method::LassclustNonStrict: return "nonstrict_lassclust";
    case Method::LassoJoint: return "lassojoint";
    }
    return "?";
}

inline Method parse_method(std::string text)
{
    std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) { return std::tolower(c); });
    if (text == "naive") return Method::Naive;
    if (text == "clust") return Method::Clust;
    if (text == "lassclust_strict" || text == "strict_lassclust") return Method::LassclustStrict;
    if (text == "lassclust_nonstrict" || text == "nonstrict_lassclust") return Method::LassclustNonStrict;
    if (text == "lassojoint" || text == "lasso_joint") return Method::LassoJoint;
    throw Error("unknown method '" + text + "'");
}

inline bool is_pecking(Method m)
{
    return m == Method::Clust || m == Method::LassclustStrict || m == Method::LassclustNonStrict;
}

/// A dataset entry: a CSV file with a named target, or the built-in
/// synthetic set when name is "artif" and path is empty.
struct DatasetSpec
{
    std::string name;
    std::string path;
    std::string target;
};

struct ExperimentConfig
{
    std::vector<DatasetSpec> datasets;
    LabelScheme scheme = LabelScheme::NonScar;
    std::vector<double> c_list{0.3, 0.5, 0.8};
    std::vector<double> q_list{0.25, 0.5, 1.0};
    int R = 5;
    double split = 0.7;
    std::vector<Method> methods = all_methods();
    std::uint64_t master_seed = 1;
    double corr_threshold = 0.9;
    /// Overrides replication_count when set.
    std::optional<int> replications;
    std::size_t n_vars = 1;
    int n_folds = 10;
    int grid_size = 100;
    double delta_factor = 0.5;
    ArtifConfig artif;
    std::string out_dir = "results";

    void validate() const
    {
        if (datasets.empty()) throw Error("config: no datasets");
        if (c_list.empty() || q_list.empty()) throw Error("config: c and q lists must be non-empty");
        for (double c : c_list) {
            if (!(c > 0.0 && c <= 1.0)) throw Error("config: every c must lie in (0, 1]");
            if (scheme == LabelScheme::NonScar && c >= 1.0) throw Error("config: NONSCAR needs c < 1");
        }
        for (double q : q_list) {
            if (!(q > 0.0 && q <= 1.0)) throw Error("config: every q must lie in (0, 1]");
        }
        if (!(split > 0.0 && split < 1.0)) throw Error("config: split must lie in (0, 1)");
        if (R < 1) throw Error("config: R must be positive");
        if (methods.empty()) throw Error("config: no methods");
        if (replications && *replications < 1) throw Error("config: replications must be positive");
        if (!(corr_threshold > 0.0 && corr_threshold <= 1.0)) throw Error("config: corr_threshold must lie in (0, 1]");
    }

    PeckingOptions pecking_options() const
    {
        PeckingOptions o;
        o.lasso_joint = lasso_joint_options();
        return o;
    }

    LassoJointOptions lasso_joint_options() const
    {
        LassoJointOptions o;
        o.cv.n_folds = n_folds;
        o.cv.grid_size = grid_size;
        o.delta_factor = delta_factor;
        return o;
    }
};

namespace detail {

inline std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline double parse_real(const std::string& key, const std::string& v)
{
    auto d = parse_number(trim(v));
    if (!d) throw Error("config: '" + key + "' expects a number, got '" + v + "'");
    return *d;
}

inline long long parse_int(const std::string& key, const std::string& v)
{
    const double d = parse_real(key, v);
    if (d != std::floor(d)) throw Error("config: '" + key + "' expects an integer, got '" + v + "'");
    return static_cast<long long>(d);
}

} // namespace detail

/// Parses `key = value` lines ('#' starts a comment). Keys:
///   dataset = name, path, target   (repeatable; `dataset = artif` for synthetic)
///   scheme = SCAR | NONSCAR        c = 0.3, 0.5, 0.8      q = 0.25, 0.5, 1
///   R, split, methods, master_seed, corr_threshold, replications (or auto),
///   n_vars, n_folds, grid_size, delta_factor, out_dir,
///   artif_n, artif_p, artif_relevant, artif_sigma0, artif_beta
/// Relative dataset paths resolve against base_dir.
inline ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {})
{
    ExperimentConfig cfg;
    cfg.datasets.clear();
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));

        if (key == "dataset") {
            auto parts = detail::split_list(value);
            if (parts.size() == 1 && parts[0] == "artif") {
                cfg.datasets.push_back({"artif", "", ""});
            } else if (parts.size() == 3) {
                std::filesystem::path p(parts[1]);
                if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
                cfg.datasets.push_back({parts[0], p.string(), parts[2]});
            } else {
                throw Error("config line " + std::to_string(line_no) + ": dataset = name, path, target");
            }
        } else if (key == "scheme") {
            cfg.scheme = parse_label_scheme(value);
        } else if (key == "c") {
            cfg.c_list.clear();
            for (const auto& v : detail::split_list(value)) cfg.c_list.push_back(detail::parse_real(key, v));
        } else if (key == "q") {
            cfg.q_list.clear();
            for (const auto& v : detail::split_list(value)) cfg.q_list.push_back(detail::parse_real(key, v));
        } else if (key == "R") {
            cfg.R = static_cast<int>(detail::parse_int(key, value));
        } else if (key == "split") {
            cfg.split = detail::parse_real(key, value);
        } else if (key == "methods") {
            cfg.methods.clear();
            for (const auto& v : detail::split_list(value)) cfg.methods.push_back(parse_method(v));
        } else if (key == "master_seed") {
            cfg.master_seed = static_cast<std::uint64_t>(detail::parse_int(key, value));
        } else if (key == "corr_threshold") {
            cfg.corr_threshold = detail::parse_real(key, value);
        } else if (key == "replications") {
            if (value == "auto") {
                cfg.replications.reset();
            } else {
                cfg.replications = static_cast<int>(detail::parse_int(key, value));
            }
        } else if (key == "n_vars") {
            cfg.n_vars = static_cast<std::size_t>(detail::parse_int(key, value));
        } else if (key == "n_folds") {
            cfg.n_folds = static_cast<int>(detail::parse_int(key, value));
        } else if (key == "grid_size") {
            cfg.grid_size = static_cast<int>(detail::parse_int(key, value));
        } else if (key == "delta_factor") {
            cfg.delta_factor = detail::parse_real(key, value);
        } else if (key == "out_dir") {
            cfg.out_dir = value;
        } else if (key == "artif_n") {
            cfg.artif.n = static_cast<std::size_t>(detail::parse_int(key, value));
        } else if (key == "artif_p") {
            cfg.artif.p = static_cast<std::size_t>(detail::parse_int(key, value));
        } else if (key == "artif_relevant") {
            cfg.artif.n_relevant = static_cast<std::size_t>(detail::parse_int(key, value));
        } else if (key == "artif_sigma0") {
            cfg.artif.sigma0 = detail::parse_real(key, value);
        } else if (key == "artif_beta") {
            cfg.artif.beta = detail::parse_real(key, value);
        } else {
            throw Error("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open config '" + path + "'");
    return parse_config(in, std::filesystem::path(path).parent_path());
}

/// 100 replications when the data has fewer than 100 columns or fewer
/// than 10,000 rows, otherwise 10.
inline int replication_count(std::size_t n_rows, std::size_t n_cols)
{
    return (n_cols < 100 || n_rows < 10000) ? 100 : 10;
}

struct ResultRow
{
    std::string dataset;
    LabelScheme scheme = LabelScheme::NonScar;
    Method method = Method::Naive;
    double c_target = 0.0;
    double realized_c = 0.0;
    std::optional<double> q;
    int replication = 0;
    double accuracy = NAN;
    double f1 = NAN;
    double auc = NAN;
    double fit_seconds = 0.0;
    std::string error;

    bool ok() const { return error.empty(); }
};

struct ExperimentResult
{
    std::vector<ResultRow> rows;
    std::size_t failed_cells = 0;
};

/// Stratified train/test split: each class of `strata` contributes
/// round(train_fraction * count) rows to the training part.
inline std::pair<std::vector<Index>, std::vector<Index>> stratified_split(std::span<const int> strata,
                                                                          double train_fraction, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<Index> train, test;
    for (int cls = 0; cls <= 1; ++cls) {
        std::vector<Index> idx;
        for (std::size_t i = 0; i < strata.size(); ++i) {
            if (strata[i] == cls) idx.push_back(static_cast<Index>(i));
        }
        for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[uniform_index(rng, i)]);
        const auto k = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(idx.size())));
        train.insert(train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
        test.insert(test.end(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end());
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {train, test};
}

inline Dataset load_dataset(const DatasetSpec& spec, const ExperimentConfig& cfg)
{
    PreprocessConfig pc;
    pc.corr_threshold = cfg.corr_threshold;
    if (spec.path.empty()) {
        if (spec.name != "artif") throw Error("dataset '" + spec.name + "' has no path");
        const Dataset raw = generate_artif(cfg.artif, derive_seed(cfg.master_seed, hash_key("artif")));
        return preprocess(to_raw_table(raw), pc, "artif");
    }
    return preprocess(load_csv(spec.path, spec.target), pc, spec.name);
}

namespace detail {

inline std::string format_real(double v)
{
    if (std::isnan(v)) return "NA";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string cell_key(const std::string& dataset, LabelScheme scheme, double c, int rep)
{
    return dataset + "|" + to_string(scheme) + "|" + format_real(c) + "|" + std::to_string(rep);
}

struct Scored
{
    double accuracy, f1, auc;
};

inline Scored score(const Coefficients& coef, const Matrix& X_test, std::span<const int> y_test)
{
    const Vector post = predict_posterior(coef, X_test);
    const ConfusionCounts cc = confusion(y_test, classify(post));
    return {accuracy(cc), f1(cc).value, auc(y_test, post)};
}

} // namespace detail

/// Monte Carlo protocol. For every (dataset, c, replication): draw S on the
/// full data, split train/test stratified on S, fit each method on the
/// training part and score predicted Y against true Y on the test part.
/// Pecking methods loop over q. All randomness derives from master_seed and
/// the cell key, never from execution order. When both lassclust variants
/// run, they share one set of per-repetition fits and each is charged that
/// fit time plus its own aggregation.
/// Sees the per-repetition fits behind every pecking cell.
using ReplicateObserver = std::function<void(const ResultRow& cell, PeckFitter fitter,
                                             std::span<const Coefficients> per_rep)>;

inline ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr,
                                       const ReplicateObserver& observe = {})
{
    using clock = std::chrono::steady_clock;
    auto seconds_since = [](clock::time_point t0) {
        return std::chrono::duration<double>(clock::now() - t0).count();
    };
    cfg.validate();
    const PeckingOptions peck_opt = cfg.pecking_options();
    const LassoJointOptions lj_opt = cfg.lasso_joint_options();
    const bool want_strict =
        std::find(cfg.methods.begin(), cfg.methods.end(), Method::LassclustStrict) != cfg.methods.end();
    const bool want_nonstrict =
        std::find(cfg.methods.begin(), cfg.methods.end(), Method::LassclustNonStrict) != cfg.methods.end();

    ExperimentResult result;
    for (const auto& spec : cfg.datasets) {
        const Dataset ds = load_dataset(spec, cfg);
        const int reps = cfg.replications.value_or(
            replication_count(static_cast<std::size_t>(ds.n_obs()), static_cast<std::size_t>(ds.n_features())));
        if (log) {
            *log << "[" << spec.name << "] n=" << ds.n_obs() << " p=" << ds.n_features() << " replications=" << reps
                 << "\n";
        }
        for (double c : cfg.c_list) {
            for (int rep = 0; rep < reps; ++rep) {
                const std::string key = detail::cell_key(spec.name, cfg.scheme, c, rep);
                const std::uint64_t cell_seed = derive_seed(cfg.master_seed, hash_key(key));

                ResultRow base;
                base.dataset = spec.name;
                base.scheme = cfg.scheme;
                base.c_target = c;
                base.replication = rep;

                SurrogateAssignment sa;
                std::vector<Index> train, test;
                try {
                    sa = cfg.scheme == LabelScheme::Scar
                             ? scar_label(ds.y, c, derive_seed(cell_seed, 1))
                             : non_scar_label(ds.X, ds.y, c, derive_seed(cell_seed, 1), cfg.n_vars);
                    std::tie(train, test) = stratified_split(sa.s, cfg.split, derive_seed(cell_seed, 2));
                } catch (const std::exception& e) {
                    for (Method m : cfg.methods) {
                        ResultRow row = base;
                        row.method = m;
                        row.error = e.what();
                        result.rows.push_back(row);
                        ++result.failed_cells;
                    }
                    continue;
                }
                base.realized_c = sa.realized_c;
                const Matrix X_train = select_rows(ds.X, train);
                const Matrix X_test = select_rows(ds.X, test);
                const Labels s_train = select<int>(sa.s, train);
                const Labels y_test = select<int>(ds.y, test);

                auto record = [&](Method m, std::optional<double> q, const std::function<Coefficients(double&)>& fit) {
                    ResultRow row = base;
                    row.method = m;
                    row.q = q;
                    try {
                        double secs = 0.0;
                        const Coefficients coef = fit(secs);
                        const auto sc = detail::score(coef, X_test, y_test);
                        row.accuracy = sc.accuracy;
                        row.f1 = sc.f1;
                        row.auc = sc.auc;
                        row.fit_seconds = secs;
                    } catch (const std::exception& e) {
                        row.error = e.what();
                        ++result.failed_cells;
                    }
                    result.rows.push_back(std::move(row));
                };

                for (Method m : cfg.methods) {
                    if (m == Method::Naive) {
                        record(m, std::nullopt, [&](double& secs) {
                            const auto t0 = clock::now();
                            Coefficients coef = fit_logistic(X_train, s_train, peck_opt.logistic);
                            secs = seconds_since(t0);
                            return coef;
                        });
                    } else if (m == Method::LassoJoint) {
                        record(m, std::nullopt, [&](double& secs) {
                            const auto t0 = clock::now();
                            Coefficients coef =
                                fit_lasso_joint(X_train, s_train, derive_seed(cell_seed, 3), lj_opt).coefficients;
                            secs = seconds_since(t0);
                            return coef;
                        });
                    } else if (m == Method::Clust) {
                        for (double q : cfg.q_list) {
                            const std::uint64_t peck_seed = derive_seed(cell_seed, hash_key("peck|" + detail::format_real(q)));
                            record(m, q, [&](double& secs) {
                                const auto t0 = clock::now();
                                const auto reps_fit = pecking_replicates(X_train, s_train, q, cfg.R,
                                                                         PeckFitter::Logistic, peck_seed, peck_opt);
                                Coefficients coef = aggregate_coefficients(reps_fit, PeckMode::Clust);
                                secs = seconds_since(t0);
                                if (observe) {
                                    ResultRow cell = base;
                                    cell.method = m;
                                    cell.q = q;
                                    observe(cell, PeckFitter::Logistic, reps_fit);
                                }
                                return coef;
                            });
                        }
                    } else if (m == Method::LassclustStrict || (m == Method::LassclustNonStrict && !want_strict)) {
                        // one set of replicate fits serves both aggregation modes
                        for (double q : cfg.q_list) {
                            const std::uint64_t peck_seed = derive_seed(cell_seed, hash_key("peck|" + detail::format_real(q)));
                            std::vector<Coefficients> reps_fit;
                            double shared = 0.0;
                            std::string failure;
                            try {
                                const auto t0 = clock::now();
                                reps_fit = pecking_replicates(X_train, s_train, q, cfg.R, PeckFitter::LassoJoint,
                                                              peck_seed, peck_opt);
                                shared = seconds_since(t0);
                            } catch (const std::exception& e) {
                                failure = e.what();
                            }
                            if (observe && failure.empty()) {
                                ResultRow cell = base;
                                cell.method = Method::LassclustStrict;
                                cell.q = q;
                                observe(cell, PeckFitter::LassoJoint, reps_fit);
                            }
                            for (PeckMode mode : {PeckMode::Strict, PeckMode::NonStrict}) {
                                const Method mm = mode == PeckMode::Strict ? Method::LassclustStrict
                                                                           : Method::LassclustNonStrict;
                                if ((mm == Method::LassclustStrict && !want_strict) ||
                                    (mm == Method::LassclustNonStrict && !want_nonstrict)) {
                                    continue;
                                }
                                record(mm, q, [&](double& secs) {
                                    if (!failure.empty()) throw Error(failure);
                                    const auto t0 = clock::now();
                                    Coefficients coef = aggregate_coefficients(reps_fit, mode);
                                    secs = shared + seconds_since(t0);
                                    return coef;
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct SummaryLine
{
    std::string group;  // dataset name, or empty for the pooled summary
    Method method = Method::Naive;
    std::optional<double> q;
    std::size_t n = 0;
    double accuracy_mean = 0.0, accuracy_sd = 0.0;
    double f1_mean = 0.0, f1_sd = 0.0;
    double auc_mean = 0.0, auc_sd = 0.0;
};

namespace detail {

inline std::pair<double, double> mean_sd(const std::vector<double>& v)
{
    if (v.empty()) return {NAN, NAN};
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

inline std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += "\"\"";
        else if (ch == '\n' || ch == '\r') out += ' ';
        else out += ch;
    }
    return out + "\"";
}

inline std::string format_q(const std::optional<double>& q)
{
    return q ? format_real(*q) : std::string();
}

inline void write_summary(std::ostream& out, const std::vector<SummaryLine>& lines, bool by_dataset)
{
    if (by_dataset) out << "dataset,";
    out << "method,q,n,accuracy_mean,accuracy_sd,f1_mean,f1_sd,auc_mean,auc_sd\n";
    for (const auto& l : lines) {
        if (by_dataset) out << csv_escape(l.group) << ',';
        out << to_string(l.method) << ',' << format_q(l.q) << ',' << l.n << ',' << format_real(l.accuracy_mean) << ','
            << format_real(l.accuracy_sd) << ',' << format_real(l.f1_mean) << ',' << format_real(l.f1_sd) << ','
            << format_real(l.auc_mean) << ',' << format_real(l.auc_sd) << '\n';
    }
}

} // namespace detail

/// Mean and sample sd of accuracy, F1 and AUC per (method, q), or per
/// (dataset, method, q) when by_dataset is set. Failed rows are skipped.
inline std::vector<SummaryLine> summarize_rows(const std::vector<ResultRow>& rows, bool by_dataset = false)
{
    using Key = std::tuple<std::string, int, int, double>;
    std::map<Key, std::array<std::vector<double>, 3>> groups;
    std::map<std::string, std::size_t> dataset_order;
    for (const auto& r : rows) {
        if (!r.ok()) continue;
        dataset_order.emplace(r.dataset, dataset_order.size());
        const std::string g = by_dataset ? r.dataset : std::string();
        auto& bucket = groups[{g, static_cast<int>(r.method), r.q ? 1 : 0, r.q.value_or(0.0)}];
        bucket[0].push_back(r.accuracy);
        bucket[1].push_back(r.f1);
        bucket[2].push_back(r.auc);
    }
    std::vector<SummaryLine> out;
    for (const auto& [key, v] : groups) {
        SummaryLine l;
        l.group = std::get<0>(key);
        l.method = static_cast<Method>(std::get<1>(key));
        if (std::get<2>(key)) l.q = std::get<3>(key);
        l.n = v[0].size();
        std::tie(l.accuracy_mean, l.accuracy_sd) = detail::mean_sd(v[0]);
        std::tie(l.f1_mean, l.f1_sd) = detail::mean_sd(v[1]);
        std::tie(l.auc_mean, l.auc_sd) = detail::mean_sd(v[2]);
        out.push_back(l);
    }
    if (by_dataset) {
        std::stable_sort(out.begin(), out.end(), [&](const SummaryLine& a, const SummaryLine& b) {
            return dataset_order.at(a.group) < dataset_order.at(b.group);
        });
    }
    return out;
}

/// Raw rows without wall-clock time, so reruns are byte-identical.
inline void write_raw_csv(std::ostream& out, const std::vector<ResultRow>& rows)
{
    out << "dataset,scheme,method,c_target,realized_c,q,replication,accuracy,f1,auc,status\n";
    for (const auto& r : rows) {
        out << detail::csv_escape(r.dataset) << ',' << to_string(r.scheme) << ',' << to_string(r.method) << ','
            << detail::format_real(r.c_target) << ',' << detail::format_real(r.realized_c) << ','
            << detail::format_q(r.q) << ',' << r.replication << ',' << detail::format_real(r.accuracy) << ','
            << detail::format_real(r.f1) << ',' << detail::format_real(r.auc) << ','
            << (r.ok() ? std::string("ok") : detail::csv_escape("error: " + r.error)) << '\n';
    }
}

inline void write_timing_csv(std::ostream& out, const std::vector<ResultRow>& rows)
{
    out << "dataset,scheme,method,c_target,q,replication,fit_seconds\n";
    for (const auto& r : rows) {
        if (!r.ok()) continue;
        out << detail::csv_escape(r.dataset) << ',' << to_string(r.scheme) << ',' << to_string(r.method) << ','
            << detail::format_real(r.c_target) << ',' << detail::format_q(r.q) << ',' << r.replication << ','
            << detail::format_real(r.fit_seconds) << '\n';
    }
}

inline std::vector<ResultRow> read_raw_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) throw Error("raw csv: empty input");
    const auto header = detail::split_csv_line(line);
    const std::vector<std::string> expected{"dataset", "scheme", "method", "c_target", "realized_c", "q",
                                            "replication", "accuracy", "f1", "auc", "status"};
    if (header != expected) throw Error("raw csv: unexpected header");
    auto real = [](const std::string& s) {
        if (s == "NA") return static_cast<double>(NAN);
        auto v = detail::parse_number(s);
        if (!v) throw Error("raw csv: bad number '" + s + "'");
        return *v;
    };
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != expected.size()) throw Error("raw csv: wrong field count");
        ResultRow r;
        r.dataset = f[0];
        r.scheme = parse_label_scheme(f[1]);
        r.method = parse_method(f[2]);
        r.c_target = real(f[3]);
        r.realized_c = real(f[4]);
        if (!f[5].empty()) r.q = real(f[5]);
        r.replication = static_cast<int>(real(f[6]));
        r.accuracy = real(f[7]);
        r.f1 = real(f[8]);
        r.auc = real(f[9]);
        if (f[10] != "ok") r.error = f[10].rfind("error: ", 0) == 0 ? f[10].substr(7) : f[10];
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::vector<ResultRow> read_raw_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return read_raw_csv(in);
}

/// Writes the summary tables (pooled and per dataset) into out_dir.
inline std::vector<std::string> write_summaries(const std::vector<ResultRow>& rows, const std::string& out_dir)
{
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> written;
    for (bool by_dataset : {false, true}) {
        const auto path = (std::filesystem::path(out_dir) / (by_dataset ? "summary_by_dataset.csv" : "summary.csv")).string();
        std::ofstream out(path);
        if (!out) throw Error("cannot write '" + path + "'");
        detail::write_summary(out, summarize_rows(rows, by_dataset), by_dataset);
        written.push_back(path);
    }
    return written;
}

/// raw.csv, summary.csv, summary_by_dataset.csv and timing.csv under out_dir.
inline std::vector<std::string> emit_report(const std::vector<ResultRow>& rows, const std::string& out_dir)
{
    if (rows.empty()) throw Error("emit_report: no rows");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error("emit_report: cannot create '" + out_dir + "': " + ec.message());
    std::vector<std::string> written;
    auto open = [&](const char* name) {
        const auto path = (std::filesystem::path(out_dir) / name).string();
        std::ofstream out(path);
        if (!out) throw Error("emit_report: cannot write '" + path + "'");
        written.push_back(path);
        return out;
    };
    {
        auto out = open("raw.csv");
        write_raw_csv(out, rows);
    }
    {
        auto out = open("timing.csv");
        write_timing_csv(out, rows);
    }
    for (auto& p : write_summaries(rows, out_dir)) written.push_back(std::move(p));
    return written;
}

} // namespace puclust
