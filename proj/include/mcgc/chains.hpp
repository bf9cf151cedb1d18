#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcgc/errors.hpp"
#include "mcgc/linalg.hpp"

namespace mcgc {

/**
 * Output of m parallel chains, each with n iterations of a p-vector.
 *
 * Storage is a single (m*n) x p row-major block; chain s occupies rows
 * [s*n, (s+1)*n). Chain and iteration indices are 0-based in the API.
 * Immutable after construction.
 */
class ChainSet {
public:
    ChainSet(std::size_t m, std::size_t n, std::size_t p, RowMatrix data) : m_(m), n_(n), p_(p), data_(std::move(data)) {
        if (m < 1) throw InputError("ChainSet needs at least one chain");
        if (n < 2) throw TooShort("ChainSet needs at least two iterations per chain");
        if (p < 1) throw InputError("ChainSet needs at least one component");
        if (static_cast<std::size_t>(data_.rows()) != m * n || static_cast<std::size_t>(data_.cols()) != p)
            throw ShapeError("ChainSet data must be (m*n) x p");
        for (Eigen::Index r = 0; r < data_.rows(); ++r)
            for (Eigen::Index c = 0; c < data_.cols(); ++c)
                if (!std::isfinite(data_(r, c))) throw BadValue(static_cast<std::size_t>(r) + 1, "non-finite entry");
    }

    /// Builds from one n x p block per chain.
    static ChainSet from_chains(const std::vector<RowMatrix>& chains) {
        if (chains.empty()) throw InputError("ChainSet needs at least one chain");
        const auto n = static_cast<std::size_t>(chains.front().rows());
        const auto p = static_cast<std::size_t>(chains.front().cols());
        RowMatrix data(chains.size() * n, p);
        for (std::size_t s = 0; s < chains.size(); ++s) {
            if (static_cast<std::size_t>(chains[s].rows()) != n || static_cast<std::size_t>(chains[s].cols()) != p)
                throw RaggedInput("chain " + std::to_string(s) + " has a different shape from chain 0");
            data.middleRows(static_cast<Eigen::Index>(s * n), static_cast<Eigen::Index>(n)) = chains[s];
        }
        return ChainSet(chains.size(), n, p, std::move(data));
    }

    /// Univariate convenience constructor: one vector per chain.
    static ChainSet from_scalar_chains(const std::vector<std::vector<double>>& chains) {
        std::vector<RowMatrix> blocks;
        blocks.reserve(chains.size());
        for (const auto& c : chains) {
            RowMatrix b(static_cast<Eigen::Index>(c.size()), 1);
            for (std::size_t t = 0; t < c.size(); ++t) b(static_cast<Eigen::Index>(t), 0) = c[t];
            blocks.push_back(std::move(b));
        }
        if (!blocks.empty())
            for (const auto& b : blocks)
                if (b.rows() != blocks.front().rows()) throw RaggedInput("chains have unequal lengths");
        return from_chains(blocks);
    }

    std::size_t m() const noexcept { return m_; }
    std::size_t n() const noexcept { return n_; }
    std::size_t p() const noexcept { return p_; }

    double operator()(std::size_t s, std::size_t t, std::size_t i) const {
        return data_(static_cast<Eigen::Index>(s * n_ + t), static_cast<Eigen::Index>(i));
    }

    /// n x p view of chain s.
    auto chain(std::size_t s) const {
        check_chain(s);
        return data_.middleRows(static_cast<Eigen::Index>(s * n_), static_cast<Eigen::Index>(n_));
    }

    const RowMatrix& data() const noexcept { return data_; }

    /// First `len` iterations of every chain.
    ChainSet prefix(std::size_t len) const {
        if (len < 2 || len > n_) throw InputError("prefix length out of range");
        RowMatrix d(static_cast<Eigen::Index>(m_ * len), static_cast<Eigen::Index>(p_));
        for (std::size_t s = 0; s < m_; ++s)
            d.middleRows(static_cast<Eigen::Index>(s * len), static_cast<Eigen::Index>(len)) =
                data_.middleRows(static_cast<Eigen::Index>(s * n_), static_cast<Eigen::Index>(len));
        return ChainSet(m_, len, p_, std::move(d));
    }

    void check_chain(std::size_t s) const {
        if (s >= m_) throw IndexError("chain index " + std::to_string(s) + " out of range (m=" + std::to_string(m_) + ")");
    }

private:
    std::size_t m_, n_, p_;
    RowMatrix data_;
};

struct MeanSummary {
    std::vector<Vector> chain_means;
    Vector global_mean;
};

// Sums run left to right in iteration order. Every estimator goes through
// these two functions so that the m = 1 case is bitwise identical under
// local and global centering.
inline Vector chain_mean(const ChainSet& c, std::size_t s) {
    c.check_chain(s);
    Vector sum = Vector::Zero(static_cast<Eigen::Index>(c.p()));
    for (std::size_t t = 0; t < c.n(); ++t)
        for (std::size_t i = 0; i < c.p(); ++i) sum(static_cast<Eigen::Index>(i)) += c(s, t, i);
    return sum / static_cast<double>(c.n());
}

inline MeanSummary mean_summary(const ChainSet& c) {
    MeanSummary out;
    out.chain_means.reserve(c.m());
    out.global_mean = Vector::Zero(static_cast<Eigen::Index>(c.p()));
    for (std::size_t s = 0; s < c.m(); ++s) {
        out.chain_means.push_back(chain_mean(c, s));
        out.global_mean += out.chain_means.back();
    }
    out.global_mean /= static_cast<double>(c.m());
    return out;
}

inline Vector global_mean(const ChainSet& c) { return mean_summary(c).global_mean; }

/// Column names of the tabular chain format. Every column other than the
/// chain and iteration columns is a value column, in file order.
struct CsvSchema {
    std::string chain_column = "chain";
    std::string iter_column = "iter";
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline bool parse_double(std::string_view s, double& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

inline bool parse_long(std::string_view s, long long& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace detail

/**
 * Reads chains from CSV with header `chain,iter,y1,...,yp`.
 *
 * Rows may appear in any order; chains are sorted by ascending chain id and
 * iterations by ascending (1-based) index. Every chain must have the same
 * number of rows.
 */
inline ChainSet load_chains_csv(std::istream& in, const CsvSchema& schema = {}) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty input: missing header row");
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM
    const auto header = detail::split_csv(line);
    std::ptrdiff_t chain_col = -1, iter_col = -1;
    std::vector<std::size_t> value_cols;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == schema.chain_column) chain_col = static_cast<std::ptrdiff_t>(j);
        else if (header[j] == schema.iter_column) iter_col = static_cast<std::ptrdiff_t>(j);
        else value_cols.push_back(j);
    }
    if (chain_col < 0) throw SchemaError("missing column '" + schema.chain_column + "'");
    if (iter_col < 0) throw SchemaError("missing column '" + schema.iter_column + "'");
    if (value_cols.empty()) throw SchemaError("no value columns");

    const std::size_t p = value_cols.size();
    std::map<long long, std::map<long long, std::vector<double>>> rows;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        ++row;
        const auto fields = detail::split_csv(line);
        if (fields.size() != header.size())
            throw SchemaError("row " + std::to_string(row) + " has " + std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(header.size()));
        long long chain_id = 0, iter = 0;
        if (!detail::parse_long(fields[static_cast<std::size_t>(chain_col)], chain_id) ||
            !detail::parse_long(fields[static_cast<std::size_t>(iter_col)], iter))
            throw BadValue(row, "chain id and iteration must be integers");
        std::vector<double> values(p);
        for (std::size_t k = 0; k < p; ++k) {
            const auto field = fields[value_cols[k]];
            if (!detail::parse_double(field, values[k]) || !std::isfinite(values[k]))
                throw BadValue(row, std::string(field));
        }
        if (!rows[chain_id].emplace(iter, std::move(values)).second)
            throw SchemaError("duplicate iteration " + std::to_string(iter) + " in chain " + std::to_string(chain_id));
    }
    if (rows.empty()) throw SchemaError("no data rows");

    const std::size_t n = rows.begin()->second.size();
    for (const auto& [id, iters] : rows)
        if (iters.size() != n)
            throw RaggedInput("chain " + std::to_string(id) + " has " + std::to_string(iters.size()) + " iterations, expected " +
                              std::to_string(n));
    if (n < 2) throw TooShort("chains need at least two iterations");

    RowMatrix data(static_cast<Eigen::Index>(rows.size() * n), static_cast<Eigen::Index>(p));
    Eigen::Index r = 0;
    for (const auto& [id, iters] : rows)
        for (const auto& [it, values] : iters) {
            for (std::size_t k = 0; k < p; ++k) data(r, static_cast<Eigen::Index>(k)) = values[k];
            ++r;
        }
    return ChainSet(rows.size(), n, p, std::move(data));
}

/// Reads `{"m":..,"n":..,"p":..,"data":[[[..]]]}` with data[chain][iter][component].
inline ChainSet load_chains_json(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    for (const char* key : {"m", "n", "p", "data"})
        if (!j.contains(key)) throw SchemaError(std::string("missing field '") + key + "'");
    const auto m = j.at("m").get<std::size_t>();
    const auto n = j.at("n").get<std::size_t>();
    const auto p = j.at("p").get<std::size_t>();
    const auto& data = j.at("data");
    if (!data.is_array() || data.size() != m) throw SchemaError("data must hold m chains");
    RowMatrix out(static_cast<Eigen::Index>(m * n), static_cast<Eigen::Index>(p));
    std::size_t row = 0;
    for (std::size_t s = 0; s < m; ++s) {
        if (!data[s].is_array() || data[s].size() != n) throw RaggedInput("chain " + std::to_string(s) + " does not have n iterations");
        for (std::size_t t = 0; t < n; ++t) {
            ++row;
            const auto& v = data[s][t];
            if (!v.is_array() || v.size() != p) throw SchemaError("iteration entry must hold p values");
            for (std::size_t i = 0; i < p; ++i) {
                if (!v[i].is_number()) throw BadValue(row, v[i].dump());
                const double x = v[i].get<double>();
                if (!std::isfinite(x)) throw BadValue(row, v[i].dump());
                out(static_cast<Eigen::Index>(s * n + t), static_cast<Eigen::Index>(i)) = x;
            }
        }
    }
    return ChainSet(m, n, p, std::move(out));
}

/// Dispatches on the file extension (.json, otherwise CSV).
inline ChainSet load_chains(const std::string& path, const CsvSchema& schema = {}) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return load_chains_json(in);
    return load_chains_csv(in, schema);
}

/// Writes the CSV format read by load_chains_csv with 17 significant digits.
inline void save_chains_csv(const ChainSet& c, std::ostream& out) {
    out << "chain,iter";
    for (std::size_t i = 0; i < c.p(); ++i) out << ",y" << (i + 1);
    out << '\n';
    std::ostringstream buf;
    buf << std::setprecision(17);
    for (std::size_t s = 0; s < c.m(); ++s)
        for (std::size_t t = 0; t < c.n(); ++t) {
            buf.str("");
            buf << (s + 1) << ',' << (t + 1);
            for (std::size_t i = 0; i < c.p(); ++i) buf << ',' << c(s, t, i);
            out << buf.str() << '\n';
        }
}

inline nlohmann::json to_json(const ChainSet& c) {
    nlohmann::json data = nlohmann::json::array();
    for (std::size_t s = 0; s < c.m(); ++s) {
        nlohmann::json chain = nlohmann::json::array();
        for (std::size_t t = 0; t < c.n(); ++t) {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t i = 0; i < c.p(); ++i) row.push_back(c(s, t, i));
            chain.push_back(std::move(row));
        }
        data.push_back(std::move(chain));
    }
    return {{"m", c.m()}, {"n", c.n()}, {"p", c.p()}, {"data", std::move(data)}};
}

}  // namespace mcgc
