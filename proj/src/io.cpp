#include "twistk/io.hpp"

#include <cstdio>

namespace twistk {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Json integers(const std::vector<Integer>& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(x.get_str());
    return a;
}

}  // namespace

Json document(const std::string& kind) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = kind;
    return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const AbelianGroup& g) {
    return Json{{"text", g.to_string()}, {"free_rank", g.free_rank}, {"invariant_factors", integers(g.invariant_factors)}};
}

Json to_json(const KGroupResult& r) {
    Json summands = Json::array(), closed = Json::array();
    for (const auto& s : r.summands) summands.push_back(to_json(s));
    for (const auto& s : r.closed_form_summands) closed.push_back(to_json(s));
    Json gens = Json::array();
    for (const auto& g : r.generators) gens.push_back(g.to_string());
    return Json{{"degree", r.degree},
                {"group", to_json(r.group)},
                {"summands", summands},
                {"closed_form", to_json(r.closed_form)},
                {"closed_form_summands", closed},
                {"invariant_generators", gens},
                {"cross_check_ok", r.cross_check_ok}};
}

Json to_json(const FlowResult& r) {
    Json cr = Json::array();
    for (const auto& c : r.crossings) cr.push_back(Json{{"parameter", c.parameter}, {"direction", c.direction}});
    return Json{{"net_flow", r.net_flow},     {"crossings", cr},           {"gluing", r.gluing},
                {"seam_residual", r.seam_residual}, {"grid_shift", r.grid_shift}, {"refinements", r.refinements}};
}

Json to_json(const LocalizationStats& s) {
    return Json{{"total", s.total},
                {"in_window", s.in_window},
                {"second_moment", s.second_moment},
                {"argmax", Json::array({s.argmax[0], s.argmax[1]})}};
}

Json to_json(const CharacterClass& c) {
    return Json{{"variant", c.variant == Variant::odd ? "odd" : "even"},
                {"sign", c.sign},
                {"coefficient", c.coefficient.to_string()},
                {"form", c.form.to_string()},
                {"scale", c.form.scale().to_string()}};
}

Json to_json(const Coset& c) {
    return Json{{"representative", c.representative.to_string()},
                {"coordinates", integers(c.coordinates)},
                {"moduli", integers(c.moduli)},
                {"torsion", integers(c.torsion())},
                {"group", to_json(c.group)}};
}

Json to_json(const RelationReport& r) {
    Json entries = Json::array();
    for (const auto& e : r.entries)
        entries.push_back(Json{{"relation", e.name}, {"violation", e.violation.get_str()}, {"columns", e.columns}});
    return Json{{"all_zero", r.all_zero()}, {"max_violation", r.max_violation().get_str()}, {"entries", entries}};
}

Json to_json(const TruncationParams& t) {
    return Json{{"cutoff", t.cutoff}, {"charge_window", t.charge_window}, {"mode_max", t.modes()}};
}

void write_density_csv(std::ostream& os, const DensitySample& d, bool header) {
    if (header) os << (d.two_dimensional() ? "t,s,phi,value\n" : "t,phi,value\n");
    std::string t = fmt(d.t);
    if (d.two_dimensional()) {
        for (size_t i = 0; i < d.s_grid.size(); ++i)
            for (size_t j = 0; j < d.phi_grid.size(); ++j)
                os << t << ',' << fmt(d.s_grid[i]) << ',' << fmt(d.phi_grid[j]) << ',' << fmt(d.at(i, j)) << '\n';
    } else {
        for (size_t j = 0; j < d.phi_grid.size(); ++j) os << t << ',' << fmt(d.phi_grid[j]) << ',' << fmt(d.values[j]) << '\n';
    }
}

void write_crossings_csv(std::ostream& os, const FlowResult& r) {
    os << "parameter,direction\n";
    for (const auto& c : r.crossings) os << fmt(c.parameter) << ',' << c.direction << '\n';
}

void write_spectra_csv(std::ostream& os, const std::vector<double>& params, const std::vector<Eigen::VectorXd>& spectra) {
    os << "parameter,index,value\n";
    for (size_t p = 0; p < params.size(); ++p)
        for (Eigen::Index k = 0; k < spectra[p].size(); ++k)
            os << fmt(params[p]) << ',' << k << ',' << fmt(spectra[p][k]) << '\n';
}

Json operator_json(const FockBasis& basis, const ExactMatrix& m) {
    Json labels = Json::array(), entries = Json::array();
    for (int i = 0; i < basis.dim(); ++i) labels.push_back(basis.label(i));
    for (int j = 0; j < m.cols(); ++j)
        for (const auto& [i, v] : m.column(j)) entries.push_back(Json::array({i, j, v.to_string()}));
    Json doc = document("operator");
    doc["dim"] = basis.dim();
    doc["variant"] = to_string(basis.variant());
    doc["truncation"] = to_json(basis.truncation());
    doc["basis"] = labels;
    doc["entries"] = entries;
    return doc;
}

}  // namespace twistk
