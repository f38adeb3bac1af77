#include "twistk/forms.hpp"

#include <sstream>

namespace twistk {

std::string ScaleTag::to_string() const {
    std::string out;
    if (sqrt_pi != 0) out += "sqrt(pi)^" + std::to_string(sqrt_pi);
    if (two_pi != 0) out += (out.empty() ? "" : "*") + std::string("(2pi)^") + std::to_string(two_pi);
    return out.empty() ? "1" : out;
}

FourierForm::FourierForm(int n, bool with_s, ScaleTag scale) : n_(n), with_s_(with_s), scale_(scale) {
    if (n < 0 || n + kCircleGenerators > kMaxGenerators) throw DimensionError("torus dimension out of range");
}

FourierForm FourierForm::term(int n, int k_s, int k_phi, uint32_t bits, const GaussQ& c, bool with_s) {
    FourierForm f(n, with_s);
    f.add_term({k_s, k_phi, bits}, c);
    return f;
}

FourierForm FourierForm::from_class(const ExtClassQ& c, uint32_t circle_prefix, bool with_s) {
    FourierForm f(c.n(), with_s);
    for (const auto& [b, v] : c.terms()) f.add_term({0, 0, circle_prefix | lift_theta(b)}, GaussQ(v));
    return f;
}

void FourierForm::add_term(const FormKey& key, const GaussQ& c) {
    if ((key.bits >> generators()) != 0) throw DimensionError("form monomial outside the generator range");
    if (!with_s_ && (key.k_s != 0 || key.has_ds()))
        throw DomainError("form on T_phi x T^n cannot depend on s");
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(key, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

GaussQ FourierForm::coeff(const FormKey& key) const {
    auto it = terms_.find(key);
    return it == terms_.end() ? GaussQ(0) : it->second;
}

void FourierForm::check_compatible(const FourierForm& o) const {
    if (o.n_ != n_) throw DimensionError("forms over different torus dimensions");
}

FourierForm& FourierForm::operator+=(const FourierForm& o) {
    check_compatible(o);
    if (o.is_zero()) return *this;
    if (is_zero()) scale_ = o.scale_;
    else if (!(o.scale_ == scale_)) throw DomainError("adding forms with different scale tags");
    if (o.with_s_ && !with_s_) with_s_ = true;
    for (const auto& [k, c] : o.terms_) add_term(k, c);
    return *this;
}

FourierForm& FourierForm::operator-=(const FourierForm& o) { return *this += -o; }

FourierForm& FourierForm::operator*=(const GaussQ& s) {
    if (s.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [k, c] : terms_) c *= s;
    return *this;
}

bool operator==(const FourierForm& a, const FourierForm& b) {
    if (a.n_ != b.n_ || a.terms_ != b.terms_) return false;
    return a.terms_.empty() || a.scale_ == b.scale_;
}

bool FourierForm::all_even() const {
    for (const auto& [k, c] : terms_)
        if (k.degree() % 2) return false;
    return true;
}

bool FourierForm::all_odd() const {
    for (const auto& [k, c] : terms_)
        if (k.degree() % 2 == 0) return false;
    return true;
}

FourierForm FourierForm::restrict_to_phi() const {
    FourierForm out(n_, false, scale_);
    for (const auto& [k, c] : terms_) out.add_term(k, c);
    return out;
}

FourierForm FourierForm::with_s_domain() const {
    FourierForm out = *this;
    out.with_s_ = true;
    return out;
}

ExtClassQ FourierForm::theta_class(uint32_t circle_prefix) const {
    ExtClassQ out(n_);
    uint32_t circle_mask = ds_bit() | dphi_bit();
    for (const auto& [k, c] : terms_) {
        if (k.k_s != 0 || k.k_phi != 0 || (k.bits & circle_mask) != circle_prefix) continue;
        if (!c.is_real()) throw DomainError("form has a non-real constant coefficient");
        out.add_term(k.theta_bits(), c.re);
    }
    return out;
}

std::string FourierForm::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    if (!(scale_ == ScaleTag{})) os << scale_.to_string() << " * (";
    bool first = true;
    for (const auto& [k, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << c.to_string();
        if (k.k_s != 0) os << "*e^{i" << k.k_s << "s}";
        if (k.k_phi != 0) os << "*e^{i" << k.k_phi << "phi}";
        if (k.has_ds()) os << "*ds";
        if (k.has_dphi()) os << "*dphi";
        for (int i : MultiIndex{k.theta_bits(), n_}.indices()) os << "*dt" << i;
    }
    if (!(scale_ == ScaleTag{})) os << ")";
    return os.str();
}

FourierForm wedge(const FourierForm& a, const FourierForm& b) {
    if (a.n() != b.n()) throw DimensionError("wedge of forms over different torus dimensions");
    ScaleTag tag{a.scale().sqrt_pi + b.scale().sqrt_pi, a.scale().two_pi + b.scale().two_pi};
    FourierForm out(a.n(), a.with_s() || b.with_s(), tag);
    for (const auto& [ka, ca] : a.terms())
        for (const auto& [kb, cb] : b.terms()) {
            int s = wedge_sign(ka.bits, kb.bits);
            if (s == 0) continue;
            GaussQ c = ca * cb;
            if (s < 0) c = -c;
            out.add_term({ka.k_s + kb.k_s, ka.k_phi + kb.k_phi, ka.bits | kb.bits}, c);
        }
    return out;
}

FourierForm exterior_d(const FourierForm& w) {
    FourierForm out(w.n(), w.with_s(), w.scale());
    for (const auto& [k, c] : w.terms()) {
        if (k.k_s != 0 && !k.has_ds())
            out.add_term({k.k_s, k.k_phi, k.bits | ds_bit()}, GaussQ::i() * GaussQ(k.k_s) * c);
        if (k.k_phi != 0 && !k.has_dphi()) {
            GaussQ v = GaussQ::i() * GaussQ(k.k_phi) * c;
            if (k.has_ds()) v = -v;
            out.add_term({k.k_s, k.k_phi, k.bits | dphi_bit()}, v);
        }
    }
    return out;
}

namespace {

void require_twist(const FourierForm& h) {
    if (!h.all_odd()) throw DomainError("twisting form must have odd degree");
    if (!exterior_d(h).is_zero()) throw DomainError("twisting form is not closed");
}

}  // namespace

FourierForm twisted_d(const FourierForm& w, const FourierForm& h) {
    require_twist(h);
    FourierForm out = exterior_d(w);
    out += wedge(h, w);
    return out;
}

FourierForm harmonic_twist(const ExtClassQ& f, bool with_s) {
    for (const auto& [b, c] : f.terms())
        if (std::popcount(b) != 2) throw DomainError("twist curvature must be a 2-form");
    return FourierForm::from_class(f, dphi_bit(), with_s);
}

PrimitiveResult twisted_primitive(const FourierForm& phi, const FourierForm& h) {
    if (phi.n() != h.n()) throw DimensionError("primitive data over different torus dimensions");
    FourierForm curvature(h.n(), h.with_s());
    for (const auto& [k, c] : h.terms()) {
        if (k.k_s != 0 || k.k_phi != 0 || k.has_ds() || !k.has_dphi() || k.degree() != 3)
            throw DomainError("twist must be dphi wedge a constant 2-form on T^n");
        curvature.add_term({0, 0, k.bits & ~dphi_bit()}, c);
    }
    for (const auto& [k, c] : phi.terms())
        if (k.k_s != 0 || k.has_ds()) throw DomainError("primitive input must live on T_phi x T^n");
    if (!phi.all_even()) throw DomainError("primitive input must have even degree");

    FourierForm zero_mode(phi.n(), phi.with_s(), phi.scale());
    for (const auto& [k, c] : phi.terms())
        if (k.k_phi == 0 && !k.has_dphi()) zero_mode.add_term(k, c);
    if (!wedge(h, zero_mode).is_zero())
        throw PreconditionError("phi-mode-zero component is not annihilated by the twist");

    // G solves dG = H∧prev using e^{ikφ}dφ = d(e^{ikφ}/ik).
    auto next_correction = [&](const FourierForm& prev) {
        FourierForm g(prev.n(), prev.with_s(), prev.scale());
        for (const auto& [k, c] : prev.terms()) {
            if (k.has_dphi() || k.k_phi == 0) continue;
            FourierForm piece = FourierForm::term(prev.n(), 0, k.k_phi, k.bits, c / (GaussQ::i() * GaussQ(k.k_phi)),
                                                  prev.with_s());
            g += wedge(curvature, piece);
        }
        g.set_scale(prev.scale());
        return g;
    };

    PrimitiveResult r;
    r.omega = phi;
    FourierForm prev = phi;
    int sign = -1;
    while (!wedge(h, prev).is_zero()) {
        FourierForm g = next_correction(prev);
        r.corrections.push_back(g);
        r.omega += GaussQ(sign) * g;
        sign = -sign;
        prev = g;
        ++r.iterations;
        if (r.iterations > phi.generators() + 1) throw DomainError("primitive iteration failed to terminate");
    }
    return r;
}

FourierForm exp_neg(const FourierForm& phi) {
    for (const auto& [k, c] : phi.terms())
        if (k.degree() == 0) throw DomainError("gauge form must have no degree-0 part");
    if (!phi.all_even()) throw DomainError("gauge form must have even degree");
    if (!phi.is_zero() && !(phi.scale() == ScaleTag{})) throw DomainError("gauge form must carry no scale tag");
    FourierForm result = FourierForm::term(phi.n(), 0, 0, 0, GaussQ(1), phi.with_s());
    FourierForm power = result;
    for (long j = 1; j <= phi.generators(); ++j) {
        power = GaussQ(Rational(-1, j)) * wedge(power, phi);
        if (power.is_zero()) break;
        result += power;
    }
    return result;
}

FourierForm gauge_transform(const FourierForm& w, const FourierForm& phi) {
    if (w.n() != phi.n()) throw DimensionError("gauge data over different torus dimensions");
    return wedge(exp_neg(phi), w);
}

ExtClassQ chern_character(const CurvatureData& c) {
    ExtClassQ out = ExtClassQ::scalar(c.n, Rational(c.trivial_rank));
    for (const auto& line : c.line_classes) {
        if (line.n() != c.n) throw DimensionError("line class over the wrong torus dimension");
        for (const auto& [b, v] : line.terms())
            if (std::popcount(b) != 2) throw DomainError("first Chern class must be a 2-form");
        ExtClassQ c1 = to_rational(line);
        ExtClassQ power = ExtClassQ::scalar(c.n, Rational(1));
        out += power;
        for (long j = 1; j <= c.n / 2; ++j) {
            power = Rational(1, j) * wedge(power, c1);
            if (power.is_zero()) break;
            out += power;
        }
    }
    return out;
}

FourierForm desuspend(const FourierForm& w) {
    ScaleTag tag{w.scale().sqrt_pi + 1, w.scale().two_pi + 1};
    FourierForm out(w.n(), false, tag);
    for (const auto& [k, c] : w.terms()) {
        if (k.k_s != 0 || !k.has_ds()) continue;
        // ds is the leftmost generator, so contracting it carries no sign
        out.add_term({0, k.k_phi, k.bits & ~ds_bit()}, c);
    }
    if (out.is_zero()) out.set_scale(tag);
    return out;
}

int twisted_cohomology_rank(const TwistSpec& spec, Parity parity) {
    spec.validate();
    int gens = spec.n + 1;  // dφ is generator 1, dθ_i is generator i+1
    ExtElement h(gens);
    h.add_term(1u | (3u << 1), Integer(spec.k));
    auto same = basis_monomials(gens, parity);
    auto other = basis_monomials(gens, opposite(parity));
    int out_rank = integer_rank(multiplication_matrix(h, same, other));
    int in_rank = integer_rank(multiplication_matrix(h, other, same));
    return static_cast<int>(same.size()) - out_rank - in_rank;
}

NormalizationExponents normalization_exponents(int degree) {
    if (degree < 0) throw DomainError("negative form degree");
    return {make_rational(-(degree / 2), 2), make_rational(-((degree + 1) / 2), 2)};
}

}  // namespace twistk
