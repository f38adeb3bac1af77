#include "twistk/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace twistk {

namespace {

using Triplet = Eigen::Triplet<std::complex<double>>;
constexpr double kTwoPi = 2 * std::numbers::pi;

double max_abs(const ComplexSparse& m) {
    double out = 0;
    for (int k = 0; k < m.outerSize(); ++k)
        for (ComplexSparse::InnerIterator it(m, k); it; ++it) out = std::max(out, std::abs(it.value()));
    return out;
}

Eigen::MatrixXcd dense_block(const ComplexSparse& a, const std::vector<int>& idx) {
    // idx is sorted, so a position lookup can use binary search
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(idx.size(), idx.size());
    for (size_t c = 0; c < idx.size(); ++c)
        for (ComplexSparse::InnerIterator it(a, idx[c]); it; ++it) {
            auto pos = std::lower_bound(idx.begin(), idx.end(), static_cast<int>(it.row()));
            if (pos == idx.end() || *pos != it.row()) throw DomainError("operator couples distinct blocks");
            out(pos - idx.begin(), c) = it.value();
        }
    return out;
}

EigenSystem solve_dense(const Eigen::MatrixXcd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a);
    if (solver.info() != Eigen::Success) throw DomainError("eigensolver failed to converge");
    EigenSystem sys{solver.eigenvalues(), solver.eigenvectors(), 0, 0};
    if (a.rows() > 0) {
        Eigen::MatrixXcd r = a * sys.vectors - sys.vectors * sys.values.asDiagonal();
        sys.residual = r.colwise().norm().maxCoeff();
        Eigen::MatrixXcd g = sys.vectors.adjoint() * sys.vectors - Eigen::MatrixXcd::Identity(a.rows(), a.rows());
        sys.orthonormality_defect = g.cwiseAbs().maxCoeff();
    }
    return sys;
}

int negative_count(const Eigen::VectorXd& v) {
    return static_cast<int>((v.array() < 0).count());
}

double min_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().minCoeff() : INFINITY; }

// Spectral norm of a hermitian operator, block by block.
double hermitian_norm(const ComplexSparse& a) {
    double out = 0;
    for (const auto& sys : block_spectrum(a, coupled_blocks({a}), INFINITY).systems)
        if (sys.values.size()) out = std::max(out, sys.values.cwiseAbs().maxCoeff());
    return out;
}

}  // namespace

double hermiticity_defect(const ComplexSparse& a) {
    if (a.rows() != a.cols()) throw DimensionError("operator is not square");
    return max_abs(ComplexSparse(a - ComplexSparse(a.adjoint())));
}

EigenSystem eigendecompose(const ComplexSparse& a, double tol) {
    if (hermiticity_defect(a) > tol) throw DomainError("operator is not hermitian");
    return solve_dense(Eigen::MatrixXcd(a));
}

std::vector<std::vector<int>> coupled_blocks(const std::vector<ComplexSparse>& pattern) {
    if (pattern.empty()) return {};
    int n = static_cast<int>(pattern.front().rows());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (const auto& m : pattern) {
        if (m.rows() != n || m.cols() != n) throw DimensionError("pattern matrices differ in size");
        for (int k = 0; k < m.outerSize(); ++k)
            for (ComplexSparse::InnerIterator it(m, k); it; ++it)
                parent[find(static_cast<int>(it.row()))] = find(static_cast<int>(it.col()));
    }
    std::map<int, std::vector<int>> groups;
    for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
    std::vector<std::vector<int>> out;
    for (auto& [root, members] : groups) out.push_back(std::move(members));
    std::sort(out.begin(), out.end());
    return out;
}

int BlockSpectrum::dim() const {
    int d = 0;
    for (const auto& b : blocks) d += static_cast<int>(b.size());
    return d;
}

Eigen::VectorXd BlockSpectrum::all_values() const {
    std::vector<double> v;
    for (const auto& s : systems) v.insert(v.end(), s.values.data(), s.values.data() + s.values.size());
    std::sort(v.begin(), v.end());
    return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double BlockSpectrum::weighted_trace(const Eigen::VectorXcd& weight, const std::function<double(double)>& f) const {
    std::complex<double> total = 0;
    for (size_t b = 0; b < blocks.size(); ++b) {
        const auto& sys = systems[b];
        for (Eigen::Index k = 0; k < sys.values.size(); ++k) {
            double fk = f(sys.values[k]);
            if (fk == 0) continue;
            std::complex<double> diag = 0;
            for (size_t r = 0; r < blocks[b].size(); ++r) diag += weight[blocks[b][r]] * std::norm(sys.vectors(r, k));
            total += fk * diag;
        }
    }
    return total.real();
}

BlockSpectrum block_spectrum(const ComplexSparse& a, const std::vector<std::vector<int>>& blocks, double tol) {
    if (std::isfinite(tol) && hermiticity_defect(a) > tol) throw DomainError("operator is not hermitian");
    BlockSpectrum out{blocks, {}};
    out.systems.reserve(blocks.size());
    for (const auto& b : blocks) out.systems.push_back(solve_dense(dense_block(a, b)));
    return out;
}

ComplexSparse approximate_sign(const ComplexSparse& q) {
    auto spec = block_spectrum(q, coupled_blocks({q}));
    std::vector<Triplet> trip;
    for (size_t b = 0; b < spec.blocks.size(); ++b) {
        const auto& sys = spec.systems[b];
        Eigen::VectorXd mapped = sys.values.unaryExpr([](double mu) { return mu / std::sqrt(1 + mu * mu); });
        Eigen::MatrixXcd fb = sys.vectors * mapped.asDiagonal() * sys.vectors.adjoint();
        const auto& idx = spec.blocks[b];
        for (size_t c = 0; c < idx.size(); ++c)
            for (size_t r = 0; r < idx.size(); ++r)
                if (std::abs(fb(r, c)) > 1e-300) trip.emplace_back(idx[r], idx[c], fb(r, c));
    }
    ComplexSparse f(q.rows(), q.cols());
    f.setFromTriplets(trip.begin(), trip.end());
    return f;
}

FredholmReport fredholm_report(const std::vector<double>& parameters,
                               const std::function<ComplexSparse(double)>& family, double bound) {
    FredholmReport rep;
    ComplexSparse prev;
    for (size_t p = 0; p < parameters.size(); ++p) {
        ComplexSparse q = family(parameters[p]);
        Eigen::VectorXd values = block_spectrum(q, coupled_blocks({q})).all_values();
        FredholmSample sample{parameters[p], {}, {}, 0};
        for (Eigen::Index i = 0; i < values.size();) {
            Eigen::Index j = i;
            while (j < values.size() && values[j] - values[i] < 1e-8) ++j;
            sample.multiplicities.emplace_back(values[i], static_cast<int>(j - i));
            sample.max_multiplicity = std::max(sample.max_multiplicity, static_cast<int>(j - i));
            i = j;
        }
        double top = values.size() ? values.cwiseAbs().maxCoeff() : 0;
        for (double t = 1; ; t *= 2) {
            sample.counting.emplace_back(t, static_cast<int>((values.array().abs() <= t).count()));
            if (t >= top) break;
        }
        // every multiplicity is bounded by the (finite) dimension
        rep.finite_multiplicity = rep.finite_multiplicity && sample.max_multiplicity <= q.rows();
        rep.samples.push_back(std::move(sample));
        if (p > 0) {
            ComplexSparse diff = q - prev;
            double norm = diff.nonZeros() ? hermitian_norm(diff) : 0.0;
            rep.neighbor_differences.push_back(norm);
            rep.bounded_differences = rep.bounded_differences && norm <= bound;
        }
        prev = std::move(q);
    }
    return rep;
}

int FlowResult::direction_sum() const {
    int s = 0;
    for (const auto& c : crossings) s += c.direction;
    return s;
}

namespace {

class FlowTracker {
public:
    FlowTracker(const std::function<ComplexSparse(double)>& family, std::vector<std::vector<int>> blocks,
                const FlowOptions& opts)
        : family_(family), blocks_(std::move(blocks)), opts_(opts) {}

    struct Point {
        double x;
        ComplexSparse q;
        BlockSpectrum spec;
    };

    Point sample(double x) const {
        ComplexSparse q = family_(x);
        BlockSpectrum s = block_spectrum(q, blocks_);
        return {x, std::move(q), std::move(s)};
    }

    bool has_zero(const Point& p) const {
        for (const auto& sys : p.spec.systems)
            if (min_abs(sys.values) < opts_.zero_tol) return true;
        return false;
    }

    // Crossings inside [a, b] for every block; returns false if attribution failed.
    bool interval(const Point& a, const Point& b, int depth, std::vector<Crossing>& out, int& refinements) const {
        double jump = ComplexSparse(b.q - a.q).norm();  // Frobenius bound on every eigenvalue shift
        std::vector<size_t> unresolved;
        for (size_t k = 0; k < blocks_.size(); ++k) {
            const auto& ea = a.spec.systems[k];
            const auto& eb = b.spec.systems[k];
            int expected = negative_count(ea.values) - negative_count(eb.values);
            if (expected == 0 && min_abs(ea.values) > jump && min_abs(eb.values) > jump) continue;
            std::vector<Crossing> found;
            match_block(a.x, b.x, ea, eb, found);
            int net = 0;
            for (const auto& c : found) net += c.direction;
            if (net == expected && gap_ok(ea, eb)) out.insert(out.end(), found.begin(), found.end());
            else unresolved.push_back(k);
        }
        if (unresolved.empty()) return true;
        if (depth >= opts_.max_refine) return false;
        ++refinements;
        Point mid = sample(0.5 * (a.x + b.x));
        if (has_zero(mid)) return false;
        // Only the unresolved blocks need the finer look; restrict to them.
        std::vector<Crossing> left, right;
        FlowTracker sub(family_, subset(unresolved), opts_);
        Point sa = restrict(a, unresolved), sm = restrict(mid, unresolved), sb = restrict(b, unresolved);
        if (!sub.interval(sa, sm, depth + 1, left, refinements)) return false;
        if (!sub.interval(sm, sb, depth + 1, right, refinements)) return false;
        out.insert(out.end(), left.begin(), left.end());
        out.insert(out.end(), right.begin(), right.end());
        return true;
    }

private:
    std::vector<std::vector<int>> subset(const std::vector<size_t>& keep) const {
        std::vector<std::vector<int>> b;
        for (size_t k : keep) b.push_back(blocks_[k]);
        return b;
    }

    Point restrict(const Point& p, const std::vector<size_t>& keep) const {
        Point out{p.x, p.q, {}};
        for (size_t k : keep) {
            out.spec.blocks.push_back(p.spec.blocks[k]);
            out.spec.systems.push_back(p.spec.systems[k]);
        }
        return out;
    }

    // Crossing attribution is trusted only when the sign-changing branches are well separated.
    bool gap_ok(const EigenSystem& ea, const EigenSystem& eb) const {
        for (const auto* e : {&ea, &eb}) {
            const auto& v = e->values;
            for (Eigen::Index i = 0; i + 1 < v.size(); ++i)
                if (v[i] < 0 && v[i + 1] >= 0 && v[i + 1] - v[i] < opts_.zero_tol) return false;
        }
        return true;
    }

    static void match_block(double xa, double xb, const EigenSystem& ea, const EigenSystem& eb,
                            std::vector<Crossing>& out) {
        Eigen::Index n = ea.values.size();
        Eigen::MatrixXd overlap = (ea.vectors.adjoint() * eb.vectors).cwiseAbs2();
        struct Pair {
            double ov, gap;
            Eigen::Index i, j;
        };
        std::vector<Pair> pairs;
        pairs.reserve(n * n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                pairs.push_back({overlap(i, j), std::abs(ea.values[i] - eb.values[j]), i, j});
        std::sort(pairs.begin(), pairs.end(), [](const Pair& p, const Pair& q) {
            if (std::abs(p.ov - q.ov) > 1e-9) return p.ov > q.ov;
            return p.gap < q.gap;
        });
        std::vector<bool> used_a(n, false), used_b(n, false);
        for (const auto& p : pairs) {
            if (used_a[p.i] || used_b[p.j]) continue;
            used_a[p.i] = used_b[p.j] = true;
            double mu_a = ea.values[p.i], mu_b = eb.values[p.j];
            if ((mu_a < 0) == (mu_b < 0)) continue;
            double x = xa + (xb - xa) * (-mu_a) / (mu_b - mu_a);
            out.push_back({x, mu_b > mu_a ? 1 : -1});
        }
    }

    const std::function<ComplexSparse(double)>& family_;
    std::vector<std::vector<int>> blocks_;
    FlowOptions opts_;
};

}  // namespace

FlowResult spectral_flow(const std::function<ComplexSparse(double)>& family, const ComplexSparse& gluing,
                         const std::string& gluing_name, const FlowOptions& opts) {
    if (opts.grid < 2) throw DomainError("flow grid needs at least two points");
    FlowResult res;
    res.gluing = gluing_name;

    ComplexSparse start = family(opts.offset), end = family(opts.offset + kTwoPi);
    res.seam_residual = max_abs(ComplexSparse(end * gluing - gluing * start));
    if (res.seam_residual > opts.seam_tol) throw DomainError("seam gluing does not match the family");

    auto blocks = coupled_blocks({start, end, family(opts.offset + 0.5 * kTwoPi + 0.123)});
    FlowTracker tracker(family, blocks, opts);
    double h = kTwoPi / opts.grid;

    for (double shift : {0.0, 0.5 * h, 0.25 * h, 0.75 * h}) {
        std::vector<FlowTracker::Point> pts;
        bool clean = true;
        for (int j = 0; j <= opts.grid && clean; ++j) {
            pts.push_back(tracker.sample(opts.offset + shift + j * h));
            clean = !tracker.has_zero(pts.back());
        }
        if (!clean) continue;
        res.grid_shift = shift;
        res.crossings.clear();
        for (int j = 0; j < opts.grid; ++j)
            if (!tracker.interval(pts[j], pts[j + 1], 0, res.crossings, res.refinements))
                throw DomainError("eigenvalue crossing could not be resolved");
        std::sort(res.crossings.begin(), res.crossings.end(),
                  [](const Crossing& a, const Crossing& b) { return a.parameter < b.parameter; });
        res.net_flow = res.direction_sum();
        return res;
    }
    throw DomainError("zero eigenvalues at every shifted grid");
}

FlowResult spectral_flow(const OddSuperchargeFamily& family, const FlowOptions& opts) {
    return spectral_flow([&family](double phi) { return family.at(phi); }, family.seam_gluing(),
                         family.slope() > 0 ? "S^dagger" : "S", opts);
}

namespace {

double reduce_angle(double s) {
    double r = std::fmod(s, kTwoPi);
    return r < 0 ? r + kTwoPi : r;
}

ComplexSparse identity(Eigen::Index n) {
    ComplexSparse id(n, n);
    id.setIdentity();
    return id;
}

}  // namespace

ComplexSparse suspend_family(const ComplexSparse& f, double s, double tol) {
    if (hermiticity_defect(f) > tol) throw DomainError("suspension needs a hermitian operator");
    if (hermitian_norm(f) > 1 + tol) throw DomainError("suspension needs an operator of norm at most one");
    double r = reduce_angle(s);
    ComplexSparse id = identity(f.rows());
    if (r <= std::numbers::pi) return std::complex<double>(std::cos(r)) * id + std::complex<double>(0, std::sin(r)) * f;
    return std::complex<double>(std::cos(r), std::sin(r)) * id;
}

ComplexSparse suspend_block(const ComplexSparse& f, double s) {
    double r = reduce_angle(s);
    double c = std::cos(r), sn = std::sin(r);
    Eigen::Index n = f.rows();
    std::vector<Triplet> trip;
    for (Eigen::Index i = 0; i < n; ++i) {
        trip.emplace_back(i, i, c);
        trip.emplace_back(n + i, n + i, -c);
    }
    if (r <= std::numbers::pi) {
        for (int k = 0; k < f.outerSize(); ++k)
            for (ComplexSparse::InnerIterator it(f, k); it; ++it) {
                trip.emplace_back(it.row(), n + it.col(), sn * it.value());
                trip.emplace_back(n + it.row(), it.col(), sn * it.value());
            }
    } else {
        for (Eigen::Index i = 0; i < n; ++i) {
            trip.emplace_back(i, n + i, sn);
            trip.emplace_back(n + i, i, sn);
        }
    }
    ComplexSparse out(2 * n, 2 * n);
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

SuspensionDefect suspension_defect(const ComplexSparse& f, double s) {
    double r = reduce_angle(s);
    Eigen::Index n = f.rows();
    ComplexSparse ft = suspend_block(f, r);
    ComplexSparse defect = identity(2 * n) - ComplexSparse(ft * ft);
    SuspensionDefect out;
    out.numeric = max_abs(defect);
    if (r <= std::numbers::pi) {
        double sn = std::sin(r);
        ComplexSparse one_minus_f2 = identity(n) - ComplexSparse(f * f);
        ComplexSparse doubled = block_sum(one_minus_f2, 2);
        out.identity_residual = max_abs(ComplexSparse(defect - std::complex<double>(sn * sn) * doubled));
        out.symbolic = NAN;
    } else {
        // F̃ = cos s·γ0 + sin s·γ1 squares to (cos² s + sin² s)·1 = 1 identically.
        out.on_constant_half = true;
        out.symbolic = 0.0;
        out.identity_residual = out.symbolic;
    }
    return out;
}

}  // namespace twistk
