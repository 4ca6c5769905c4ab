#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace puclust {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Binary labels, one entry per row, values in {0, 1}.
using Labels = std::vector<int>;

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

using Rng = std::mt19937_64;

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for an independent stream, a pure function of (seed, stream).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    return mix64(mix64(seed) ^ mix64(stream * 0xd1b54a32d192ed03ULL + 1));
}

/// Stable 64-bit hash of a text key (FNV-1a followed by a mixing step).
inline std::uint64_t hash_key(std::string_view key)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : key) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return mix64(h);
}

// The helpers below only consume raw engine output, so draws are identical
// on every standard library (std::*_distribution is implementation-defined).

inline double uniform01(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n).
inline std::size_t uniform_index(Rng& rng, std::size_t n)
{
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return static_cast<std::size_t>(r % bound);
}

inline double standard_normal(Rng& rng)
{
    // Marsaglia polar method; the spare value is discarded to keep the
    // helper stateless.
    double u, v, s;
    do {
        u = 2.0 * uniform01(rng) - 1.0;
        v = 2.0 * uniform01(rng) - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return u * std::sqrt(-2.0 * std::log(s) / s);
}

inline bool bernoulli(Rng& rng, double p)
{
    return uniform01(rng) < p;
}

inline void check_binary(std::span<const int> labels, const char* what)
{
    for (int v : labels) {
        if (v != 0 && v != 1) {
            throw Error(std::string(what) + ": labels must be 0 or 1");
        }
    }
}

inline std::size_t count_ones(std::span<const int> labels)
{
    std::size_t n = 0;
    for (int v : labels) n += (v == 1);
    return n;
}

/// Rows of `X` listed in `rows`, in that order.
inline Matrix select_rows(const Matrix& X, std::span<const Index> rows)
{
    Matrix out(static_cast<Index>(rows.size()), X.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = X.row(rows[i]);
    return out;
}

inline Matrix select_cols(const Matrix& X, std::span<const Index> cols)
{
    Matrix out(X.rows(), static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Index>(j)) = X.col(cols[j]);
    return out;
}

template <class T>
std::vector<T> select(std::span<const T> values, std::span<const Index> idx)
{
    std::vector<T> out;
    out.reserve(idx.size());
    for (Index i : idx) out.push_back(values[static_cast<std::size_t>(i)]);
    return out;
}

/// Pearson correlation; 0 when either vector has zero variance.
inline double pearson(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b)
{
    const double ma = a.mean();
    const double mb = b.mean();
    const Vector da = a.array() - ma;
    const Vector db = b.array() - mb;
    const double saa = da.squaredNorm();
    const double sbb = db.squaredNorm();
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    const double r = da.dot(db) / std::sqrt(saa * sbb);
    return std::clamp(r, -1.0, 1.0);
}

} // namespace puclust
