#pragma once

// Column-major sparse matrix over an exact or floating coefficient type.

#include <algorithm>
#include <map>
#include <vector>

#include "twistk/exact.hpp"

namespace twistk {

inline bool entry_is_zero(const GaussQ& x) { return x.is_zero(); }
inline bool entry_is_zero(const std::complex<double>& x) { return x == std::complex<double>(0.0); }

template <class T>
class SparseMatrix {
public:
    using Column = std::map<int, T>;

    SparseMatrix() = default;
    SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), columns_(cols) {}

    static SparseMatrix identity(int n) {
        SparseMatrix m(n, n);
        for (int i = 0; i < n; ++i) m.columns_[i].emplace(i, T(1));
        return m;
    }
    static SparseMatrix diagonal(const std::vector<T>& d) {
        SparseMatrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
        for (size_t i = 0; i < d.size(); ++i) m.add(static_cast<int>(i), static_cast<int>(i), d[i]);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const Column& column(int j) const { return columns_[j]; }

    void add(int i, int j, const T& v) {
        if (entry_is_zero(v)) return;
        auto [it, inserted] = columns_[j].try_emplace(i, v);
        if (!inserted) {
            it->second += v;
            if (entry_is_zero(it->second)) columns_[j].erase(it);
        }
    }
    T at(int i, int j) const {
        auto it = columns_[j].find(i);
        return it == columns_[j].end() ? T(0) : it->second;
    }
    size_t nonzeros() const {
        size_t n = 0;
        for (const auto& c : columns_) n += c.size();
        return n;
    }

    SparseMatrix& operator+=(const SparseMatrix& o) {
        check_shape(o);
        for (int j = 0; j < cols_; ++j)
            for (const auto& [i, v] : o.columns_[j]) add(i, j, v);
        return *this;
    }
    SparseMatrix& operator-=(const SparseMatrix& o) {
        check_shape(o);
        for (int j = 0; j < cols_; ++j)
            for (const auto& [i, v] : o.columns_[j]) add(i, j, T(0) - v);
        return *this;
    }
    SparseMatrix& operator*=(const T& s) {
        for (auto& c : columns_) {
            for (auto& [i, v] : c) v *= s;
            std::erase_if(c, [](const auto& kv) { return entry_is_zero(kv.second); });
        }
        return *this;
    }
    friend SparseMatrix operator+(SparseMatrix a, const SparseMatrix& b) { return a += b; }
    friend SparseMatrix operator-(SparseMatrix a, const SparseMatrix& b) { return a -= b; }
    friend SparseMatrix operator*(const T& s, SparseMatrix a) { return a *= s; }

    friend SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b) {
        if (a.cols_ != b.rows_) throw DimensionError("sparse product dimension mismatch");
        SparseMatrix out(a.rows_, b.cols_);
        for (int j = 0; j < b.cols_; ++j)
            for (const auto& [k, bv] : b.columns_[j])
                for (const auto& [i, av] : a.columns_[k]) out.add(i, j, av * bv);
        return out;
    }

    friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.columns_ == b.columns_;
    }

    // Keep only the listed columns (others zeroed), shape unchanged.
    SparseMatrix restrict_columns(const std::vector<bool>& keep) const {
        SparseMatrix out(rows_, cols_);
        for (int j = 0; j < cols_; ++j)
            if (keep[j]) out.columns_[j] = columns_[j];
        return out;
    }

    SparseMatrix conjugate_transpose() const {
        SparseMatrix out(cols_, rows_);
        for (int j = 0; j < cols_; ++j)
            for (const auto& [i, v] : columns_[j]) out.add(j, i, conj_of(v));
        return out;
    }

private:
    static GaussQ conj_of(const GaussQ& v) { return v.conj(); }
    static std::complex<double> conj_of(const std::complex<double>& v) { return std::conj(v); }

    void check_shape(const SparseMatrix& o) const {
        if (o.rows_ != rows_ || o.cols_ != cols_) throw DimensionError("sparse matrix shape mismatch");
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<Column> columns_;
};

using ExactMatrix = SparseMatrix<GaussQ>;

}  // namespace twistk
