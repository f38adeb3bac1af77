#include "twistk/fock.hpp"

#include <bit>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

namespace twistk {

TruncationParams TruncationParams::make(int cutoff, int charge_window, int mode_max) {
    TruncationParams t{cutoff, charge_window, mode_max};
    t.validate();
    return t;
}

void TruncationParams::validate() const {
    if (cutoff < 0) throw DomainError("energy cutoff must be non-negative");
    if (cutoff > 24) throw DomainError("energy cutoff too large");
    if (charge_window < 0) throw DomainError("charge window must be non-negative");
    if (mode_max > cutoff) throw DomainError("mode_max cannot exceed the cutoff");
}

const char* to_string(Variant v) { return v == Variant::odd ? "odd" : "even"; }

// ---------------------------------------------------------------------------
// Basis

int BasisState::fermion_energy(int family) const {
    int e = 0;
    for (uint32_t rest = fermions[family]; rest; rest &= rest - 1) e += std::countr_zero(rest) + 1;
    return e;
}

int BasisState::boson_energy(int family) const {
    int e = 0;
    for (size_t k = 1; k < bosons[family].size(); ++k) e += static_cast<int>(k) * bosons[family][k];
    return e;
}

int BasisState::excitations() const { return std::popcount(fermions[0]) + std::popcount(fermions[1]); }

std::vector<int> BasisState::key() const {
    std::vector<int> k{static_cast<int>(fermions[0]), static_cast<int>(fermions[1]), vacuum, charge[0], charge[1]};
    for (int f = 0; f < 2; ++f) {
        k.push_back(-1);
        k.insert(k.end(), bosons[f].begin(), bosons[f].end());
    }
    return k;
}

namespace {

// Subsets of {1..energy} with the given sum, as bitmasks.
std::vector<uint32_t> distinct_partitions(int energy) {
    std::vector<uint32_t> out;
    std::function<void(int, int, uint32_t)> rec = [&](int remaining, int next, uint32_t bits) {
        if (remaining == 0) {
            out.push_back(bits);
            return;
        }
        for (int part = next; part <= remaining; ++part) rec(remaining - part, part + 1, bits | (1u << (part - 1)));
    };
    rec(energy, 1, 0);
    return out;
}

// Occupation vectors (size cutoff+1) of partitions of energy.
std::vector<std::vector<int>> partitions(int energy, int cutoff) {
    std::vector<std::vector<int>> out;
    std::vector<int> occ(cutoff + 1, 0);
    std::function<void(int, int)> rec = [&](int remaining, int max_part) {
        if (remaining == 0) {
            out.push_back(occ);
            return;
        }
        for (int part = std::min(remaining, max_part); part >= 1; --part) {
            ++occ[part];
            rec(remaining - part, part);
            --occ[part];
        }
    };
    rec(energy, energy);
    return out;
}

struct FamilyState {
    uint32_t fermions;
    std::vector<int> bosons;
};

std::vector<FamilyState> family_states(int energy, int cutoff) {
    std::vector<FamilyState> out;
    for (int ef = 0; ef <= energy; ++ef)
        for (uint32_t f : distinct_partitions(ef))
            for (auto& b : partitions(energy - ef, cutoff)) out.push_back({f, b});
    return out;
}

Rational factorial(int n) {
    Integer r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return Rational(r);
}

}  // namespace

FockBasis::FockBasis(TruncationParams trunc, Variant variant) : trunc_(trunc), variant_(variant) {
    trunc_.validate();
    int L = trunc_.cutoff, C = trunc_.charge_window;
    auto add = [&](BasisState s) {
        index_.emplace(s.key(), static_cast<int>(states_.size()));
        states_.push_back(std::move(s));
    };
    std::vector<int> empty(L + 1, 0);
    if (variant == Variant::odd) {
        for (int m = -C; m <= C; ++m)
            for (int e = 0; e <= L; ++e)
                for (auto& fs : family_states(e, L)) {
                    BasisState s;
                    s.fermions = {fs.fermions, 0};
                    s.charge = {m, 0};
                    s.bosons = {fs.bosons, empty};
                    add(std::move(s));
                }
    } else {
        for (int me = -C; me <= C; ++me)
            for (int mf = -C; mf <= C; ++mf)
                for (int total = 0; total <= L; ++total)
                    for (int e0 = 0; e0 <= total; ++e0) {
                        auto first = family_states(e0, L);
                        auto second = family_states(total - e0, L);
                        for (const auto& a : first)
                            for (const auto& b : second)
                                for (int vac = 0; vac < 2; ++vac) {
                                    BasisState s;
                                    s.fermions = {a.fermions, b.fermions};
                                    s.charge = {me, mf};
                                    s.bosons = {a.bosons, b.bosons};
                                    s.vacuum = vac;
                                    add(std::move(s));
                                }
                    }
    }
    for (const auto& s : states_) {
        Rational n2 = Rational(Integer(1) << s.excitations());
        for (int f = 0; f < 2; ++f)
            for (size_t k = 1; k < s.bosons[f].size(); ++k) {
                int nu = s.bosons[f][k];
                if (nu == 0) continue;
                Integer pw;
                mpz_ui_pow_ui(pw.get_mpz_t(), k, nu);
                n2 *= Rational(pw) * factorial(nu);
            }
        norm_sq_.push_back(n2);
        norm_.push_back(std::sqrt(n2.get_d()));
    }
}

int FockBasis::index_of(const BasisState& s) const {
    auto it = index_.find(s.key());
    return it == index_.end() ? -1 : it->second;
}

std::string FockBasis::label(int i) const {
    const BasisState& s = states_[i];
    std::ostringstream os;
    for (int f = 0; f < families(); ++f) {
        if (f) os << " ";
        os << (variant_ == Variant::odd ? "psi{" : (f == 0 ? "psi0{" : "psi1{"));
        bool first = true;
        for (uint32_t rest = s.fermions[f]; rest; rest &= rest - 1) {
            os << (first ? "" : ",") << std::countr_zero(rest) + 1;
            first = false;
        }
        os << "}";
    }
    os << (variant_ == Variant::odd ? " eta" : (s.vacuum == 0 ? " eta1" : " eta2"));
    for (int f = 0; f < families(); ++f) {
        os << " | " << (f == 0 ? "e" : "f") << ": m=" << s.charge[f] << " [";
        bool first = true;
        for (size_t k = 1; k < s.bosons[f].size(); ++k)
            if (s.bosons[f][k]) {
                os << (first ? "" : ",") << k << "^" << s.bosons[f][k];
                first = false;
            }
        os << "]";
    }
    return os.str();
}

std::vector<int> FockBasis::vacuum_sector() const {
    std::vector<int> out;
    for (int i = 0; i < dim(); ++i)
        if (states_[i].total_energy() == 0) out.push_back(i);
    return out;
}

BasisPtr make_basis(const TruncationParams& trunc, Variant variant) {
    return std::make_shared<const FockBasis>(trunc, variant);
}

// ---------------------------------------------------------------------------
// Mode operators

namespace {

int parity_sign(int count) { return count % 2 ? -1 : 1; }

// Image of one basis state under one mode: (state, coefficient) or nothing.
struct Image {
    bool nonzero = false;
    BasisState state;
    GaussQ coeff;
};

Image apply_fermion(const BasisState& s, int family, int n, Variant variant) {
    Image out{true, s, GaussQ(1)};
    int before = family == 1 ? std::popcount(s.fermions[0]) : 0;
    if (n == 0) {
        int sign = parity_sign(s.excitations());
        if (variant == Variant::odd) {
            out.coeff = GaussQ(sign);
        } else if (family == 0) {
            out.state.vacuum = 1 - s.vacuum;  // σ_x
            out.coeff = GaussQ(sign);
        } else {
            out.state.vacuum = 1 - s.vacuum;  // σ_y: η1 → iη2, η2 → −iη1
            out.coeff = GaussQ(Rational(0), Rational(s.vacuum == 0 ? sign : -sign));
        }
        return out;
    }
    int m = std::abs(n);
    uint32_t bit = 1u << (m - 1);
    int sign = parity_sign(before + std::popcount(s.fermions[family] & (bit - 1)));
    if (n > 0) {
        if (s.fermions[family] & bit) return {};
        out.state.fermions[family] |= bit;
        out.coeff = GaussQ(sign);
    } else {
        if (!(s.fermions[family] & bit)) return {};
        out.state.fermions[family] &= ~bit;
        out.coeff = GaussQ(2 * sign);
    }
    return out;
}

Image apply_boson(const BasisState& s, int family, int n) {
    Image out{true, s, GaussQ(1)};
    if (n == 0) {
        out.coeff = GaussQ(s.charge[family]);
        return out;
    }
    int k = std::abs(n);
    if (n > 0) {
        ++out.state.bosons[family][k];
    } else {
        int nu = s.bosons[family][k];
        if (nu == 0) return {};
        --out.state.bosons[family][k];
        out.coeff = GaussQ(static_cast<long>(k) * nu);
    }
    return out;
}

}  // namespace

ExactMatrix mode_operator(const FockBasis& basis, Mode mode, int n) {
    bool odd = basis.variant() == Variant::odd;
    if (odd && (mode == Mode::psi0 || mode == Mode::psi1 || mode == Mode::f || mode == Mode::shift_f))
        throw DomainError("mode operator belongs to the even module");
    if (!odd && mode == Mode::psi) throw DomainError("use psi0 or psi1 on the even module");
    bool shift = mode == Mode::shift_e || mode == Mode::shift_f;
    if (!shift && std::abs(n) > basis.truncation().modes()) throw DomainError("mode index outside the retained range");

    ExactMatrix out(basis.dim(), basis.dim());
    for (int j = 0; j < basis.dim(); ++j) {
        const BasisState& s = basis.state(j);
        Image img;
        switch (mode) {
            case Mode::psi:
            case Mode::psi0: img = apply_fermion(s, 0, n, basis.variant()); break;
            case Mode::psi1: img = apply_fermion(s, 1, n, basis.variant()); break;
            case Mode::e: img = apply_boson(s, 0, n); break;
            case Mode::f: img = apply_boson(s, 1, n); break;
            case Mode::shift_e:
            case Mode::shift_f:
                img = {true, s, GaussQ(1)};
                ++img.state.charge[mode == Mode::shift_e ? 0 : 1];
                break;
        }
        if (!img.nonzero) continue;
        int i = basis.index_of(img.state);
        if (i >= 0) out.add(i, j, img.coeff);
    }
    return out;
}

ExactMatrix grading_operator(const FockBasis& basis) {
    if (basis.variant() != Variant::even) throw DomainError("chiral grading exists only on the even module");
    std::vector<GaussQ> d;
    for (int i = 0; i < basis.dim(); ++i) {
        const BasisState& s = basis.state(i);
        d.push_back(GaussQ((s.vacuum == 0 ? 1 : -1) * parity_sign(s.excitations())));
    }
    return ExactMatrix::diagonal(d);
}

ExactMatrix adjoint(const FockBasis& basis, const ExactMatrix& a) {
    ExactMatrix out(a.cols(), a.rows());
    for (int j = 0; j < a.cols(); ++j)
        for (const auto& [i, v] : a.column(j))
            out.add(j, i, v.conj() * GaussQ(basis.norm_squared(i) / basis.norm_squared(j)));
    return out;
}

bool is_hermitian(const FockBasis& basis, const ExactMatrix& a) { return adjoint(basis, a) == a; }

ComplexSparse to_orthonormal(const FockBasis& basis, const ExactMatrix& a) {
    std::vector<Eigen::Triplet<std::complex<double>>> trip;
    for (int j = 0; j < a.cols(); ++j)
        for (const auto& [i, v] : a.column(j)) trip.emplace_back(i, j, v.to_complex() * (basis.norm(i) / basis.norm(j)));
    ComplexSparse m(a.rows(), a.cols());
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

ComplexSparse block_sum(const ComplexSparse& a, int copies) {
    if (copies < 1) throw DomainError("block sum needs at least one copy");
    if (copies == 1) return a;
    std::vector<Eigen::Triplet<std::complex<double>>> trip;
    for (int c = 0; c < copies; ++c)
        for (int k = 0; k < a.outerSize(); ++k)
            for (ComplexSparse::InnerIterator it(a, k); it; ++it)
                trip.emplace_back(c * a.rows() + it.row(), c * a.cols() + it.col(), it.value());
    ComplexSparse m(a.rows() * copies, a.cols() * copies);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

namespace {

ExactMatrix family_pairing(const FockBasis& basis, Mode fermion, Mode boson) {
    ExactMatrix q(basis.dim(), basis.dim());
    int M = basis.truncation().modes();
    for (int k = -M; k <= M; ++k) {
        if (k == 0) continue;
        // Lowering factor first, so no intermediate state leaves the truncation.
        if (k > 0) q += mode_operator(basis, fermion, k) * mode_operator(basis, boson, -k);
        else q += mode_operator(basis, boson, -k) * mode_operator(basis, fermion, k);
    }
    return q;
}

ExactMatrix shifted_charge(const FockBasis& basis, Mode boson, const Rational& shift) {
    return mode_operator(basis, boson, 0) + GaussQ(shift) * ExactMatrix::identity(basis.dim());
}

}  // namespace

ExactMatrix supercharge_odd_exact(const FockBasis& basis, const Rational& phi_over_2pi, int slope) {
    if (basis.variant() != Variant::odd) throw DomainError("odd supercharge needs the odd module");
    if (slope != 1 && slope != -1) throw DomainError("slope must be +1 or -1");
    return family_pairing(basis, Mode::psi, Mode::e) +
           mode_operator(basis, Mode::psi, 0) * shifted_charge(basis, Mode::e, Rational(slope) * phi_over_2pi);
}

ExactMatrix supercharge_even_exact(const FockBasis& basis, const Rational& s_over_2pi, const Rational& phi_over_2pi) {
    if (basis.variant() != Variant::even) throw DomainError("even supercharge needs the even module");
    return family_pairing(basis, Mode::psi0, Mode::e) + family_pairing(basis, Mode::psi1, Mode::f) +
           mode_operator(basis, Mode::psi0, 0) * shifted_charge(basis, Mode::e, s_over_2pi) +
           mode_operator(basis, Mode::psi1, 0) * shifted_charge(basis, Mode::f, phi_over_2pi);
}

// ---------------------------------------------------------------------------
// Floating families

OddSuperchargeFamily::OddSuperchargeFamily(BasisPtr basis, int slope, int rank)
    : basis_(std::move(basis)), slope_(slope), rank_(rank) {
    if (rank < 1) throw DomainError("rank must be positive");
    fixed_ = block_sum(to_orthonormal(*basis_, supercharge_odd_exact(*basis_, Rational(0), slope)), rank);
    psi0_ = block_sum(to_orthonormal(*basis_, mode_operator(*basis_, Mode::psi, 0)), rank);
}

ComplexSparse OddSuperchargeFamily::at(double phi) const {
    return fixed_ + std::complex<double>(slope_ * phi / (2 * std::numbers::pi)) * psi0_;
}

ComplexSparse OddSuperchargeFamily::seam_gluing() const {
    ComplexSparse s = to_orthonormal(*basis_, mode_operator(*basis_, Mode::shift_e));
    return block_sum(slope_ > 0 ? ComplexSparse(s.adjoint()) : s, rank_);
}

EvenSuperchargeFamily::EvenSuperchargeFamily(BasisPtr basis, int rank) : basis_(std::move(basis)), rank_(rank) {
    if (rank < 1) throw DomainError("rank must be positive");
    const FockBasis& b = *basis_;
    fixed_ = block_sum(to_orthonormal(b, supercharge_even_exact(b, Rational(0), Rational(0))), rank);
    ExactMatrix p0 = mode_operator(b, Mode::psi0, 0), p1 = mode_operator(b, Mode::psi1, 0);
    ExactMatrix g = grading_operator(b);
    psi00_ = block_sum(to_orthonormal(b, p0), rank);
    psi10_ = block_sum(to_orthonormal(b, p1), rank);
    gamma_ = block_sum(to_orthonormal(b, g), rank);
    insertion_ = block_sum(to_orthonormal(b, GaussQ(Rational(0), Rational(-1)) * (g * p0 * p1)), rank);
}

ComplexSparse EvenSuperchargeFamily::at(double s, double phi) const {
    double two_pi = 2 * std::numbers::pi;
    return fixed_ + std::complex<double>(s / two_pi) * psi00_ + std::complex<double>(phi / two_pi) * psi10_;
}

// ---------------------------------------------------------------------------
// Relation checks

bool RelationReport::all_zero() const {
    for (const auto& e : entries)
        if (sgn(e.violation) != 0) return false;
    return true;
}

Rational RelationReport::max_violation() const {
    Rational m = 0;
    for (const auto& e : entries) m = std::max(m, e.violation);
    return m;
}

namespace {

Rational max_abs(const ExactMatrix& m) {
    Rational out = 0;
    for (int j = 0; j < m.cols(); ++j)
        for (const auto& [i, v] : m.column(j)) out = std::max({out, Rational(abs(v.re)), Rational(abs(v.im))});
    return out;
}

class RelationChecker {
public:
    explicit RelationChecker(const FockBasis& b) : basis_(b) {}

    const ExactMatrix& op(Mode mode, int n) {
        auto key = std::make_pair(static_cast<int>(mode), n);
        auto it = cache_.find(key);
        if (it == cache_.end()) it = cache_.emplace(key, mode_operator(basis_, mode, n)).first;
        return it->second;
    }

    std::vector<bool> interior(int mode_reach, bool below_charge_top = false) const {
        std::vector<bool> keep(basis_.dim());
        int L = basis_.truncation().cutoff, C = basis_.truncation().charge_window;
        for (int j = 0; j < basis_.dim(); ++j) {
            const BasisState& s = basis_.state(j);
            keep[j] = s.total_energy() <= L - mode_reach &&
                      (!below_charge_top || (s.charge[0] < C && s.charge[1] < C));
        }
        return keep;
    }

    // a·b + sign·b·a − expected, on interior columns.
    void bracket(const std::string& name, const ExactMatrix& a, const ExactMatrix& b, int sign, const GaussQ& expected,
                 int reach) {
        auto keep = interior(reach);
        ExactMatrix ar = a.restrict_columns(keep), br = b.restrict_columns(keep);
        ExactMatrix lhs = a * br;
        if (sign > 0) lhs += b * ar;
        else lhs -= b * ar;
        lhs -= expected * ExactMatrix::identity(basis_.dim()).restrict_columns(keep);
        record(name, lhs, keep);
    }

    void record(const std::string& name, const ExactMatrix& residual, const std::vector<bool>& keep) {
        int cols = static_cast<int>(std::count(keep.begin(), keep.end(), true));
        report.entries.push_back({name, max_abs(residual), cols});
    }

    RelationReport report;

private:
    const FockBasis& basis_;
    std::map<std::pair<int, int>, ExactMatrix> cache_;
};

std::string op_name(const char* sym, int n) { return std::string(sym) + "_" + std::to_string(n); }

}  // namespace

RelationReport relation_check(const FockBasis& basis) {
    RelationChecker rc(basis);
    int M = basis.truncation().modes();
    int dim = basis.dim();
    bool odd = basis.variant() == Variant::odd;

    std::vector<std::pair<Mode, const char*>> fermions, bosons;
    if (odd) {
        fermions = {{Mode::psi, "psi"}};
        bosons = {{Mode::e, "e"}};
    } else {
        fermions = {{Mode::psi0, "psi0"}, {Mode::psi1, "psi1"}};
        bosons = {{Mode::e, "e"}, {Mode::f, "f"}};
    }

    for (int n = -M; n <= M; ++n)
        for (int m = n; m <= M; ++m) {
            int reach = std::max(std::abs(n), std::abs(m));
            for (size_t a = 0; a < fermions.size(); ++a)
                for (size_t b = 0; b < fermions.size(); ++b) {
                    if (a == b && m < n) continue;
                    GaussQ expected = (a == b && n == -m) ? GaussQ(2) : GaussQ(0);
                    rc.bracket("{" + op_name(fermions[a].second, n) + "," + op_name(fermions[b].second, m) + "}",
                               rc.op(fermions[a].first, n), rc.op(fermions[b].first, m), +1, expected, reach);
                }
            for (size_t a = 0; a < bosons.size(); ++a)
                for (size_t b = 0; b < bosons.size(); ++b) {
                    GaussQ expected = (a == b && n == -m) ? GaussQ(-n) : GaussQ(0);
                    rc.bracket("[" + op_name(bosons[a].second, n) + "," + op_name(bosons[b].second, m) + "]",
                               rc.op(bosons[a].first, n), rc.op(bosons[b].first, m), -1, expected, reach);
                }
        }
    for (int n = -M; n <= M; ++n)
        for (int m = -M; m <= M; ++m)
            for (const auto& fm : fermions)
                for (const auto& bs : bosons)
                    rc.bracket("[" + op_name(fm.second, n) + "," + op_name(bs.second, m) + "]", rc.op(fm.first, n),
                               rc.op(bs.first, m), -1, GaussQ(0), std::max(std::abs(n), std::abs(m)));

    // Charge shifts: S e_0 S^{-1} = e_0 − 1 read as S e_0 = (e_0 − 1) S below the top charge.
    std::vector<std::tuple<Mode, Mode, const char*>> shifts{{Mode::shift_e, Mode::e, "S_e"}};
    if (!odd) shifts.emplace_back(Mode::shift_f, Mode::f, "S_f");
    ExactMatrix id = ExactMatrix::identity(dim);
    for (const auto& [shift, boson, name] : shifts) {
        const ExactMatrix& s = rc.op(shift, 0);
        auto keep = rc.interior(0, true);
        ExactMatrix lhs = s * rc.op(boson, 0).restrict_columns(keep) -
                          (rc.op(boson, 0) - id) * s.restrict_columns(keep);
        rc.record(std::string(name) + " e_0 S^-1 = e_0 - 1", lhs, keep);
        ExactMatrix unitarity = adjoint(basis, s) * s.restrict_columns(keep) - id.restrict_columns(keep);
        rc.record(std::string(name) + " unitary", unitarity, keep);
        for (int n = -M; n <= M; ++n) {
            keep = rc.interior(std::abs(n), true);
            for (const auto& bs : bosons) {
                if (n == 0 && bs.first == boson) continue;
                ExactMatrix c = s * rc.op(bs.first, n).restrict_columns(keep) - rc.op(bs.first, n) * s.restrict_columns(keep);
                rc.record("[" + std::string(name) + "," + op_name(bs.second, n) + "]", c, keep);
            }
            for (const auto& fm : fermions) {
                ExactMatrix c = s * rc.op(fm.first, n).restrict_columns(keep) - rc.op(fm.first, n) * s.restrict_columns(keep);
                rc.record("[" + std::string(name) + "," + op_name(fm.second, n) + "]", c, keep);
            }
        }
    }

    // Adjoint pairs hold on every column since truncation keeps matrix elements exact.
    std::vector<bool> all(dim, true);
    for (int n = -M; n <= M; ++n) {
        for (const auto& fm : fermions)
            rc.record(op_name(fm.second, n) + "^dagger = " + op_name(fm.second, -n),
                      adjoint(basis, rc.op(fm.first, n)) - rc.op(fm.first, -n), all);
        for (const auto& bs : bosons)
            rc.record(op_name(bs.second, n) + "^dagger = " + op_name(bs.second, -n),
                      adjoint(basis, rc.op(bs.first, n)) - rc.op(bs.first, -n), all);
    }

    std::vector<GaussQ> parity;
    for (int i = 0; i < dim; ++i) parity.push_back(GaussQ(parity_sign(basis.state(i).excitations())));
    if (odd) {
        rc.record("psi_0 = (-1)^N", rc.op(Mode::psi, 0) - ExactMatrix::diagonal(parity), all);
    } else {
        ExactMatrix gamma = grading_operator(basis);
        rc.record("Gamma^2 = 1", gamma * gamma - id, all);
        rc.record("Gamma hermitian", adjoint(basis, gamma) - gamma, all);
        ExactMatrix product_form = GaussQ(Rational(0), Rational(-1)) * rc.op(Mode::psi0, 0) * rc.op(Mode::psi1, 0) *
                                 ExactMatrix::diagonal(parity);
        rc.record("Gamma = -i psi0_0 psi1_0 (-1)^N", product_form - gamma, all);
        for (int n = -M; n <= M; ++n)
            for (const auto& fm : fermions)
                rc.record("{Gamma," + op_name(fm.second, n) + "}",
                          gamma * rc.op(fm.first, n) + rc.op(fm.first, n) * gamma, all);
    }
    return rc.report;
}

// ---------------------------------------------------------------------------
// Square identities

namespace {

double max_abs_on(const ComplexSparse& m, const std::vector<bool>& keep) {
    double out = 0;
    for (int k = 0; k < m.outerSize(); ++k) {
        if (!keep[k]) continue;
        for (ComplexSparse::InnerIterator it(m, k); it; ++it) out = std::max(out, std::abs(it.value()));
    }
    return out;
}

ComplexSparse number_sum(const FockBasis& basis, Mode mode, bool weight_by_mode, double factor) {
    int M = basis.truncation().modes();
    ComplexSparse out(basis.dim(), basis.dim());
    for (int k = 1; k <= M; ++k) {
        ComplexSparse a = to_orthonormal(basis, mode_operator(basis, mode, k));
        ComplexSparse b = to_orthonormal(basis, mode_operator(basis, mode, -k));
        out += std::complex<double>(factor * (weight_by_mode ? k : 1)) * ComplexSparse(a * b);
    }
    return out;
}

ComplexSparse shifted_square(const FockBasis& basis, Mode boson, double shift) {
    ComplexSparse c = to_orthonormal(basis, mode_operator(basis, boson, 0));
    ComplexSparse id(basis.dim(), basis.dim());
    id.setIdentity();
    ComplexSparse sh = c + std::complex<double>(shift) * id;
    return sh * sh;
}

std::vector<bool> low_energy(const FockBasis& basis) {
    std::vector<bool> keep(basis.dim());
    for (int i = 0; i < basis.dim(); ++i) keep[i] = basis.state(i).total_energy() <= basis.truncation().modes();
    return keep;
}

}  // namespace

double odd_square_identity_deviation(const FockBasis& basis, double phi) {
    OddSuperchargeFamily fam(std::make_shared<const FockBasis>(basis));
    ComplexSparse q = fam.at(phi);
    ComplexSparse q2 = q * q;
    ComplexSparse closed = number_sum(basis, Mode::psi, true, 1.0) + number_sum(basis, Mode::e, false, 2.0) +
                           shifted_square(basis, Mode::e, phi / (2 * std::numbers::pi));
    return max_abs_on(ComplexSparse(q2 - closed), low_energy(basis));
}

double even_square_identity_deviation(const FockBasis& basis, double s, double phi) {
    EvenSuperchargeFamily fam(std::make_shared<const FockBasis>(basis));
    ComplexSparse q = fam.at(s, phi);
    ComplexSparse q2 = q * q;
    double two_pi = 2 * std::numbers::pi;
    ComplexSparse closed = number_sum(basis, Mode::psi0, true, 1.0) + number_sum(basis, Mode::psi1, true, 1.0) +
                           number_sum(basis, Mode::e, false, 2.0) + number_sum(basis, Mode::f, false, 2.0) +
                           shifted_square(basis, Mode::e, s / two_pi) + shifted_square(basis, Mode::f, phi / two_pi);
    return max_abs_on(ComplexSparse(q2 - closed), low_energy(basis));
}

}  // namespace twistk
