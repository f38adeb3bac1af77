#include "twistk/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace twistk {

MultiIndex MultiIndex::from_indices(int n, std::initializer_list<int> indices) {
    MultiIndex m{0, n};
    for (int i : indices) {
        if (i < 1 || i > n) throw DimensionError("generator index out of range");
        m.bits |= 1u << (i - 1);
    }
    return m;
}

std::vector<int> MultiIndex::indices() const {
    std::vector<int> out;
    for (uint32_t rest = bits; rest; rest &= rest - 1) out.push_back(std::countr_zero(rest) + 1);
    return out;
}

std::string MultiIndex::to_string() const {
    if (bits == 0) return "1";
    std::string out;
    for (int i : indices()) {
        if (!out.empty()) out += "^";
        out += "d" + std::to_string(i);
    }
    return out;
}

std::vector<uint32_t> basis_monomials(int n) {
    if (n < 0 || n > kMaxGenerators) throw DimensionError("generator count out of range");
    std::vector<uint32_t> out;
    out.reserve(size_t{1} << n);
    for (uint32_t b = 0; b < (uint32_t{1} << n); ++b) out.push_back(b);
    std::sort(out.begin(), out.end(), MonomialOrder{});
    return out;
}

std::vector<uint32_t> basis_monomials(int n, Parity parity) {
    std::vector<uint32_t> out;
    for (uint32_t b : basis_monomials(n))
        if ((std::popcount(b) % 2 == 1) == (parity == Parity::odd)) out.push_back(b);
    return out;
}

ExtClassQ to_rational(const ExtElement& x) {
    ExtClassQ out(x.n());
    for (const auto& [b, c] : x.terms()) out.add_term(b, Rational(c));
    return out;
}

// ---------------------------------------------------------------------------
// IntMatrix

IntMatrix::IntMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw DimensionError("negative matrix dimension");
    a_.assign(static_cast<size_t>(rows) * cols, Integer(0));
}

IntMatrix IntMatrix::identity(int n) {
    IntMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<long>>& rows) {
    int r = static_cast<int>(rows.size());
    int c = r == 0 ? 0 : static_cast<int>(rows.front().size());
    IntMatrix m(r, c);
    for (int i = 0; i < r; ++i) {
        if (static_cast<int>(rows[i].size()) != c) throw DimensionError("ragged matrix rows");
        for (int j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

IntMatrix IntMatrix::diagonal(const std::vector<Integer>& d) {
    int n = static_cast<int>(d.size());
    IntMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = d[i];
    return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
    if (cols_ != o.rows_) throw DimensionError("matrix product dimension mismatch");
    IntMatrix out(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const Integer& aik = (*this)(i, k);
            if (sgn(aik) == 0) continue;
            for (int j = 0; j < o.cols_; ++j) out(i, j) += aik * o(k, j);
        }
    return out;
}

IntMatrix IntMatrix::transpose() const {
    IntMatrix out(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
}

IntMatrix IntMatrix::columns(int begin, int end) const {
    IntMatrix out(rows_, end - begin);
    for (int i = 0; i < rows_; ++i)
        for (int j = begin; j < end; ++j) out(i, j - begin) = (*this)(i, j);
    return out;
}

std::vector<Integer> IntMatrix::column(int c) const {
    std::vector<Integer> out(rows_);
    for (int i = 0; i < rows_; ++i) out[i] = (*this)(i, c);
    return out;
}

std::vector<Integer> IntMatrix::row(int r) const {
    return {a_.begin() + static_cast<long>(r) * cols_, a_.begin() + static_cast<long>(r + 1) * cols_};
}

bool IntMatrix::is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](const Integer& x) { return sgn(x) == 0; });
}

// Bareiss fraction-free elimination.
Integer IntMatrix::determinant() const {
    if (rows_ != cols_) throw DimensionError("determinant of a non-square matrix");
    int n = rows_;
    if (n == 0) return 1;
    IntMatrix m = *this;
    Integer prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (sgn(m(k, k)) == 0) {
            int swap = -1;
            for (int i = k + 1; i < n; ++i)
                if (sgn(m(i, k)) != 0) {
                    swap = i;
                    break;
                }
            if (swap < 0) return 0;
            for (int j = 0; j < n; ++j) std::swap(m(k, j), m(swap, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) {
                Integer v = m(i, j) * m(k, k) - m(i, k) * m(k, j);
                mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
                m(i, j) = v;
            }
        prev = m(k, k);
    }
    return sign * m(n - 1, n - 1);
}

std::string IntMatrix::to_string() const {
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < rows_; ++i) {
        os << (i ? ", [" : "[");
        for (int j = 0; j < cols_; ++j) os << (j ? ", " : "") << (*this)(i, j).get_str();
        os << "]";
    }
    os << "]";
    return os.str();
}

// ---------------------------------------------------------------------------
// Smith normal form

namespace {

class SmithReducer {
public:
    explicit SmithReducer(const IntMatrix& m)
        : D(m), U(IntMatrix::identity(m.rows())), U_inv(IntMatrix::identity(m.rows())),
          V(IntMatrix::identity(m.cols())) {}

    void swap_rows(int i, int j) {
        if (i == j) return;
        for (int c = 0; c < D.cols(); ++c) std::swap(D(i, c), D(j, c));
        for (int c = 0; c < U.cols(); ++c) std::swap(U(i, c), U(j, c));
        for (int r = 0; r < U_inv.rows(); ++r) std::swap(U_inv(r, i), U_inv(r, j));
    }
    // row dst += q * row src
    void add_row(int dst, int src, const Integer& q) {
        if (sgn(q) == 0) return;
        for (int c = 0; c < D.cols(); ++c) D(dst, c) += q * D(src, c);
        for (int c = 0; c < U.cols(); ++c) U(dst, c) += q * U(src, c);
        for (int r = 0; r < U_inv.rows(); ++r) U_inv(r, src) -= q * U_inv(r, dst);
    }
    void negate_row(int i) {
        for (int c = 0; c < D.cols(); ++c) D(i, c) = -D(i, c);
        for (int c = 0; c < U.cols(); ++c) U(i, c) = -U(i, c);
        for (int r = 0; r < U_inv.rows(); ++r) U_inv(r, i) = -U_inv(r, i);
    }
    void swap_cols(int i, int j) {
        if (i == j) return;
        for (int r = 0; r < D.rows(); ++r) std::swap(D(r, i), D(r, j));
        for (int r = 0; r < V.rows(); ++r) std::swap(V(r, i), V(r, j));
    }
    // col dst += q * col src
    void add_col(int dst, int src, const Integer& q) {
        if (sgn(q) == 0) return;
        for (int r = 0; r < D.rows(); ++r) D(r, dst) += q * D(r, src);
        for (int r = 0; r < V.rows(); ++r) V(r, dst) += q * V(r, src);
    }

    // Rows (t, i) ← [[x, y], [-b/g, a/g]]·(rows t, i), a unimodular Bezout step.
    void bezout_rows(int t, int i, const Integer& x, const Integer& y, const Integer& ag, const Integer& bg) {
        auto mix = [&](IntMatrix& m) {
            for (int c = 0; c < m.cols(); ++c) {
                Integer ut = x * m(t, c) + y * m(i, c);
                Integer ui = ag * m(i, c) - bg * m(t, c);
                m(t, c) = std::move(ut);
                m(i, c) = std::move(ui);
            }
        };
        mix(D);
        mix(U);
        // inverse [[a/g, -y], [b/g, x]] applied on the right
        for (int r = 0; r < U_inv.rows(); ++r) {
            Integer vt = U_inv(r, t) * ag + U_inv(r, i) * bg;
            Integer vi = x * U_inv(r, i) - y * U_inv(r, t);
            U_inv(r, t) = std::move(vt);
            U_inv(r, i) = std::move(vi);
        }
    }
    void bezout_cols(int t, int j, const Integer& x, const Integer& y, const Integer& ag, const Integer& bg) {
        auto mix = [&](IntMatrix& m) {
            for (int r = 0; r < m.rows(); ++r) {
                Integer ut = x * m(r, t) + y * m(r, j);
                Integer uj = ag * m(r, j) - bg * m(r, t);
                m(r, t) = std::move(ut);
                m(r, j) = std::move(uj);
            }
        };
        mix(D);
        mix(V);
    }

    int run() {
        int rows = D.rows(), cols = D.cols();
        int t = 0;
        for (; t < std::min(rows, cols); ++t) {
            if (!move_min_pivot(t)) break;
            while (true) {
                for (int i = t + 1; i < rows; ++i) {
                    if (sgn(D(i, t)) == 0) continue;
                    if (mpz_divisible_p(D(i, t).get_mpz_t(), D(t, t).get_mpz_t())) {
                        add_row(i, t, -Integer(D(i, t) / D(t, t)));
                        continue;
                    }
                    Integer g, x, y;
                    mpz_gcdext(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), D(t, t).get_mpz_t(), D(i, t).get_mpz_t());
                    bezout_rows(t, i, x, y, Integer(D(t, t) / g), Integer(D(i, t) / g));
                }
                for (int j = t + 1; j < cols; ++j) {
                    if (sgn(D(t, j)) == 0) continue;
                    if (mpz_divisible_p(D(t, j).get_mpz_t(), D(t, t).get_mpz_t())) {
                        add_col(j, t, -Integer(D(t, j) / D(t, t)));
                        continue;
                    }
                    Integer g, x, y;
                    mpz_gcdext(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), D(t, t).get_mpz_t(), D(t, j).get_mpz_t());
                    bezout_cols(t, j, x, y, Integer(D(t, t) / g), Integer(D(t, j) / g));
                }
                if (!cross_cleared(t)) continue;
                int bad_row = non_divisible_row(t);
                if (bad_row < 0) break;
                add_row(t, bad_row, Integer(1));
            }
            if (sgn(D(t, t)) < 0) negate_row(t);
        }
        return t;
    }

    IntMatrix D, U, U_inv, V;

private:
    bool move_min_pivot(int t) {
        int bi = -1, bj = -1;
        Integer best;
        for (int i = t; i < D.rows(); ++i)
            for (int j = t; j < D.cols(); ++j) {
                if (sgn(D(i, j)) == 0) continue;
                Integer a = abs(D(i, j));
                if (bi < 0 || a < best) {
                    best = a;
                    bi = i;
                    bj = j;
                }
            }
        if (bi < 0) return false;
        swap_rows(t, bi);
        swap_cols(t, bj);
        return true;
    }
    bool cross_cleared(int t) const {
        for (int i = t + 1; i < D.rows(); ++i)
            if (sgn(D(i, t)) != 0) return false;
        for (int j = t + 1; j < D.cols(); ++j)
            if (sgn(D(t, j)) != 0) return false;
        return true;
    }
    int non_divisible_row(int t) const {
        for (int i = t + 1; i < D.rows(); ++i)
            for (int j = t + 1; j < D.cols(); ++j)
                if (!mpz_divisible_p(D(i, j).get_mpz_t(), D(t, t).get_mpz_t())) return i;
        return -1;
    }
};

}  // namespace

std::vector<Integer> SmithForm::diagonal() const {
    std::vector<Integer> out;
    for (int i = 0; i < std::min(D.rows(), D.cols()); ++i) out.push_back(D(i, i));
    return out;
}

SmithForm smith_normal_form(const IntMatrix& m) {
    SmithReducer red(m);
    int rank = red.run();
    return SmithForm{std::move(red.U), std::move(red.D), std::move(red.V), std::move(red.U_inv), rank};
}

int integer_rank(const IntMatrix& m) { return smith_normal_form(m).rank; }

// ---------------------------------------------------------------------------
// Abelian groups

AbelianGroup AbelianGroup::from_cyclic(int free_rank, const std::vector<Integer>& orders) {
    std::vector<Integer> nontrivial;
    for (const Integer& d : orders) {
        if (sgn(d) == 0) {
            ++free_rank;
            continue;
        }
        if (abs(d) != 1) nontrivial.push_back(abs(d));
    }
    AbelianGroup g{free_rank, {}};
    if (nontrivial.empty()) return g;
    SmithForm snf = smith_normal_form(IntMatrix::diagonal(nontrivial));
    for (const Integer& d : snf.diagonal())
        if (d != 1) g.invariant_factors.push_back(d);
    return g;
}

AbelianGroup AbelianGroup::direct_sum(const AbelianGroup& o) const {
    std::vector<Integer> orders = invariant_factors;
    orders.insert(orders.end(), o.invariant_factors.begin(), o.invariant_factors.end());
    return from_cyclic(free_rank + o.free_rank, orders);
}

Integer AbelianGroup::torsion_order() const {
    Integer p = 1;
    for (const Integer& d : invariant_factors) p *= d;
    return p;
}

std::string AbelianGroup::to_string() const {
    std::string out;
    if (free_rank > 0) out = free_rank == 1 ? "Z" : "Z^" + std::to_string(free_rank);
    for (const Integer& d : invariant_factors) {
        if (!out.empty()) out += " + ";
        out += "Z/" + d.get_str();
    }
    return out.empty() ? "0" : out;
}

// ---------------------------------------------------------------------------
// Quotients, kernels, Hermite form

std::vector<Integer> QuotientPresentation::coordinates(const std::vector<Integer>& x) const {
    std::vector<Integer> out;
    out.reserve(coordinate_rows.size());
    for (size_t f = 0; f < coordinate_rows.size(); ++f) {
        const auto& row = coordinate_rows[f];
        if (row.size() != x.size()) throw DimensionError("coordinate vector has the wrong length");
        Integer v = 0;
        for (size_t i = 0; i < x.size(); ++i) v += row[i] * x[i];
        if (sgn(moduli[f]) != 0) mpz_fdiv_r(v.get_mpz_t(), v.get_mpz_t(), moduli[f].get_mpz_t());
        out.push_back(v);
    }
    return out;
}

QuotientPresentation quotient_presentation(int ambient_rank, const IntMatrix& sublattice) {
    if (sublattice.rows() != ambient_rank)
        throw DimensionError("sublattice generators do not live in the ambient lattice");
    QuotientPresentation q;
    SmithForm snf = smith_normal_form(sublattice);
    std::vector<Integer> diag = snf.diagonal();
    std::vector<int> kept;
    std::vector<Integer> orders;
    for (int i = 0; i < ambient_rank; ++i) {
        Integer d = i < static_cast<int>(diag.size()) ? diag[i] : Integer(0);
        if (d == 1) continue;
        kept.push_back(i);
        q.moduli.push_back(d);
        orders.push_back(d);
        q.coordinate_rows.push_back(snf.U.row(i));
    }
    q.group = AbelianGroup::from_cyclic(0, orders);
    q.generators = IntMatrix(ambient_rank, static_cast<int>(kept.size()));
    for (size_t k = 0; k < kept.size(); ++k)
        for (int r = 0; r < ambient_rank; ++r) q.generators(r, static_cast<int>(k)) = snf.U_inv(r, kept[k]);
    return q;
}

AbelianGroup quotient_group(int ambient_rank, const IntMatrix& sublattice) {
    return quotient_presentation(ambient_rank, sublattice).group;
}

IntMatrix kernel_lattice(const IntMatrix& m) {
    SmithForm snf = smith_normal_form(m);
    IntMatrix basis = snf.V.columns(snf.rank, m.cols());
    if (basis.cols() == 0) return basis;
    HermiteForm h = hermite_normal_form(basis.transpose());
    return h.rows.transpose();
}

HermiteForm hermite_normal_form(const IntMatrix& input) {
    IntMatrix a = input;
    int nrows = a.rows(), ncols = a.cols();
    auto row_axpy = [&](int dst, int src, const Integer& q) {
        if (sgn(q) == 0) return;
        for (int c = 0; c < ncols; ++c) a(dst, c) += q * a(src, c);
    };
    auto swap_rows = [&](int i, int j) {
        if (i == j) return;
        for (int c = 0; c < ncols; ++c) std::swap(a(i, c), a(j, c));
    };

    HermiteForm h;
    int row = 0;
    for (int col = 0; col < ncols && row < nrows; ++col) {
        while (true) {
            int best = -1;
            for (int i = row; i < nrows; ++i)
                if (sgn(a(i, col)) != 0 && (best < 0 || abs(a(i, col)) < abs(a(best, col)))) best = i;
            if (best < 0) break;
            swap_rows(row, best);
            bool done = true;
            for (int i = row + 1; i < nrows; ++i) {
                if (sgn(a(i, col)) == 0) continue;
                Integer q;
                mpz_fdiv_q(q.get_mpz_t(), a(i, col).get_mpz_t(), a(row, col).get_mpz_t());
                row_axpy(i, row, -q);
                if (sgn(a(i, col)) != 0) done = false;
            }
            if (done) break;
        }
        if (sgn(a(row, col)) == 0) continue;
        if (sgn(a(row, col)) < 0)
            for (int c = 0; c < ncols; ++c) a(row, c) = -a(row, c);
        for (int i = 0; i < row; ++i) {
            Integer q;
            mpz_fdiv_q(q.get_mpz_t(), a(i, col).get_mpz_t(), a(row, col).get_mpz_t());
            row_axpy(i, row, -q);
        }
        h.pivot_cols.push_back(col);
        ++row;
    }
    h.rows = IntMatrix(row, ncols);
    for (int i = 0; i < row; ++i)
        for (int c = 0; c < ncols; ++c) h.rows(i, c) = a(i, c);
    return h;
}

std::vector<Integer> HermiteForm::reduce(std::vector<Integer> v) const {
    if (static_cast<int>(v.size()) != rows.cols()) throw DimensionError("vector length does not match lattice");
    for (int r = 0; r < rows.rows(); ++r) {
        int pc = pivot_cols[r];
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), v[pc].get_mpz_t(), rows(r, pc).get_mpz_t());
        if (sgn(q) == 0) continue;
        for (int c = 0; c < rows.cols(); ++c) v[c] -= q * rows(r, c);
    }
    return v;
}

}  // namespace twistk
