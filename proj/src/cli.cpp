#include "twistk/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "twistk/io.hpp"
#include "twistk/sampling.hpp"

namespace twistk {

namespace {

constexpr double kPi = std::numbers::pi;

struct RunConfig {
    int n = 2;
    long k = 1;
    int cutoff = 8;
    int charge_window = 4;
    int mode_max = -1;
    int rank = 1;
    int grid = 256;
    int s_grid = 32;
    double offset = 0;
    std::string variant = "odd";
    std::vector<double> times{1, 4, 16};
    std::string format = "json";
    std::string output;
    std::string out_dir;
    unsigned long seed = 1;
    int count = 100;
    int terms = 20;
    int trivial_rank = 1;
    std::vector<std::string> lines;
    int flow_sign = 1;
    int phi_count = 4;
    double tol = 1e-6;
    double window = 0.5;

    TruncationParams truncation() const { return TruncationParams::make(cutoff, charge_window, mode_max); }
};

struct Outcome {
    Json doc;
    std::string csv;  // used when format is csv
    bool ok = true;
};

// "i,j:c+k,l:d" → Σ c·dθ_i∧dθ_j
ExtElement parse_two_form(const std::string& text, int n) {
    ExtElement out(n);
    std::stringstream terms(text);
    std::string term;
    while (std::getline(terms, term, '+')) {
        int i = 0, j = 0;
        long c = 1;
        char comma = 0, colon = 0;
        std::istringstream is(term);
        if (!(is >> i >> comma >> j) || comma != ',') throw DomainError("bad 2-form term '" + term + "'");
        if (is >> colon) {
            if (colon != ':' || !(is >> c)) throw DomainError("bad 2-form coefficient in '" + term + "'");
        }
        if (i < 1 || j < 1 || i > n || j > n || i == j) throw DomainError("2-form indices out of range in '" + term + "'");
        ExtElement mono = ExtElement::monomial(n, {std::min(i, j), std::max(i, j)}, Integer(i < j ? c : -c));
        out += mono;
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << text;
    if (!f) throw std::runtime_error("failed writing " + path);
}

Outcome run_kgroup(const RunConfig& cfg) {
    auto spec = TwistSpec::make(cfg.n, cfg.k);
    Outcome o{document("kgroup")};
    o.doc["n"] = cfg.n;
    o.doc["k"] = cfg.k;
    auto k0 = twisted_k_group(spec, 0), k1 = twisted_k_group(spec, 1);
    o.doc["K0"] = to_json(k0);
    o.doc["K1"] = to_json(k1);
    o.doc["tolerance"] = "exact";
    o.ok = k0.cross_check_ok && k1.cross_check_ok;
    o.doc["checks"] = Json{{"closed_form_matches", o.ok}};
    std::ostringstream csv;
    csv << "degree,group,free_rank,invariant_factors,cross_check_ok\n";
    for (const auto* r : {&k0, &k1}) {
        std::string inv;
        for (const auto& d : r->group.invariant_factors) inv += (inv.empty() ? "" : " ") + d.get_str();
        csv << r->degree << ',' << r->group.to_string() << ',' << r->group.free_rank << ',' << inv << ','
            << (r->cross_check_ok ? "true" : "false") << '\n';
    }
    o.csv = csv.str();
    return o;
}

Outcome run_flow(const RunConfig& cfg) {
    auto basis = make_basis(cfg.truncation(), Variant::odd);
    FlowOptions opts;
    opts.grid = cfg.grid;
    opts.offset = cfg.offset;
    FlowResult res;
    int expected = 0;
    if (cfg.variant == "odd" || cfg.variant == "odd-negative") {
        int slope = cfg.variant == "odd" ? 1 : -1;
        expected = slope * cfg.rank;
        res = spectral_flow(OddSuperchargeFamily(basis, slope, cfg.rank), opts);
    } else if (cfg.variant == "constant") {
        // frozen at φ = π, where no eigenvalue vanishes
        ComplexSparse q = OddSuperchargeFamily(basis, 1, cfg.rank).at(kPi);
        ComplexSparse id(q.rows(), q.cols());
        id.setIdentity();
        res = spectral_flow([&q](double) { return q; }, id, "identity", opts);
    } else {
        throw DomainError("unknown flow variant '" + cfg.variant + "'");
    }
    Outcome o{document("flow")};
    o.doc["variant"] = cfg.variant;
    o.doc["truncation"] = to_json(cfg.truncation());
    o.doc["rank"] = cfg.rank;
    o.doc["grid"] = cfg.grid;
    o.doc["dim"] = basis->dim() * cfg.rank;
    o.doc["flow"] = to_json(res);
    o.doc["expected_net_flow"] = expected;
    o.doc["tolerance"] = Json{{"seam", opts.seam_tol}, {"zero_eigenvalue", opts.zero_tol}};
    o.ok = res.net_flow == expected && res.net_flow == res.direction_sum();
    o.doc["checks"] = Json{{"net_flow_matches", res.net_flow == expected}, {"seam_consistent", true}};
    std::ostringstream csv;
    write_crossings_csv(csv, res);
    o.csv = csv.str();
    return o;
}

Outcome run_heat(const RunConfig& cfg) {
    for (double t : cfg.times)
        if (!(t > 0)) throw DomainError("heat times must be positive");
    std::vector<double> times = cfg.times;
    std::sort(times.begin(), times.end());
    bool odd_module = cfg.variant == "odd" || cfg.variant == "suspended";
    if (!odd_module && cfg.variant != "even") throw DomainError("unknown heat variant '" + cfg.variant + "'");
    auto basis = make_basis(cfg.truncation(), odd_module ? Variant::odd : Variant::even);

    Outcome o{document("heat")};
    o.doc["variant"] = cfg.variant;
    o.doc["truncation"] = to_json(cfg.truncation());
    o.doc["rank"] = cfg.rank;
    o.doc["grid"] = cfg.variant == "odd" ? Json(cfg.grid) : Json::array({cfg.s_grid, cfg.grid});
    o.doc["tolerance"] = cfg.tol;
    o.doc["window"] = cfg.window;

    Json samples = Json::array();
    std::ostringstream csv;
    bool first = true;
    double prev_moment = INFINITY;
    bool moments_decrease = true, totals_ok = true, oracle_ok = true, localized = true;
    for (double t : times) {
        DensitySample d;
        if (cfg.variant == "odd") d = odd_density(t, cfg.grid, basis, cfg.rank);
        else if (cfg.variant == "suspended") d = suspended_density(t, cfg.s_grid, cfg.grid, basis, cfg.rank);
        else d = even_density(t, cfg.s_grid, cfg.grid, basis, cfg.rank);
        auto st = localization_stats(d, cfg.window);
        Json entry{{"t", t}, {"stats", to_json(st)}};

        if (cfg.variant != "suspended") {
            double dev = 0;
            for (size_t i = 0; i < (d.two_dimensional() ? d.s_grid.size() : 1); ++i)
                for (size_t j = 0; j < d.phi_grid.size(); ++j) {
                    double oracle = d.two_dimensional() ? even_density_oracle(t, d.s_grid[i], d.phi_grid[j], cfg.rank)
                                                        : odd_density_oracle(t, d.phi_grid[j], cfg.rank);
                    double v = d.two_dimensional() ? d.at(i, j) : d.values[j];
                    dev = std::max(dev, std::abs(v - oracle));
                }
            entry["oracle_max_deviation"] = dev;
            entry["expected_total"] = cfg.rank;
            if (cfg.variant == "odd") {
                oracle_ok = oracle_ok && dev < cfg.tol;
                totals_ok = totals_ok && std::abs(st.total - cfg.rank) <= cfg.tol;
            }
        } else {
            entry["expected_total"] = cfg.rank * std::erf(std::sqrt(t));
        }
        moments_decrease = moments_decrease && st.second_moment < prev_moment;
        prev_moment = st.second_moment;

        // localization is asserted at the largest t only
        if (t == times.back() && cfg.variant != "odd") {
            auto c = d.center();
            double cell_s = 2 * kPi / cfg.s_grid, cell_phi = 2 * kPi / cfg.grid;
            localized = std::abs(std::remainder(st.argmax[0] - c[0], 2 * kPi)) <= cell_s &&
                        std::abs(std::remainder(st.argmax[1] - c[1], 2 * kPi)) <= cell_phi;
        }
        samples.push_back(entry);

        write_density_csv(csv, d, first);
        first = false;
        if (!cfg.out_dir.empty()) {
            std::ostringstream one;
            write_density_csv(one, d);
            std::ostringstream name;
            name << "density_" << cfg.variant << "_t" << t << ".csv";
            write_text((std::filesystem::path(cfg.out_dir) / name.str()).string(), one.str());
        }
    }
    o.doc["samples"] = samples;
    Json checks;
    if (cfg.variant == "odd") {
        checks["totals_equal_rank"] = totals_ok;
        checks["oracle_within_tolerance"] = oracle_ok;
        checks["second_moment_decreasing"] = moments_decrease;
        o.ok = totals_ok && oracle_ok && moments_decrease;
    } else {
        checks["argmax_localized"] = localized;
        o.ok = localized;
    }
    o.doc["checks"] = checks;
    o.csv = csv.str();
    if (!cfg.out_dir.empty()) write_text((std::filesystem::path(cfg.out_dir) / "summary.json").string(), dump(o.doc));
    return o;
}

Outcome run_primitive(const RunConfig& cfg) {
    if (cfg.n < 2 || cfg.n > 6) throw DomainError("primitive checks use 2 <= n <= 6");
    Rng rng(cfg.seed);
    int passed = 0, worst = 0;
    bool bound_ok = true;
    for (int trial = 0; trial < cfg.count; ++trial) {
        int n = 2 + trial % (cfg.n - 1);
        auto h = harmonic_twist(to_rational(random_integral_two_form(rng, n)), false);
        auto phi = random_admissible_potential(rng, n, cfg.terms);
        auto r = twisted_primitive(phi, h);
        bool exact = twisted_d(r.omega, h) == exterior_d(phi);
        int bound = (n + 3) / 2 + 1;  // ⌈(n+2)/2⌉ + 1
        bound_ok = bound_ok && r.iterations <= bound;
        worst = std::max(worst, r.iterations);
        passed += exact;
    }
    Outcome o{document("primitive")};
    o.doc["seed"] = cfg.seed;
    o.doc["max_n"] = cfg.n;
    o.doc["max_terms"] = cfg.terms;
    o.doc["trials"] = cfg.count;
    o.doc["exact_matches"] = passed;
    o.doc["max_iterations"] = worst;
    o.doc["tolerance"] = "exact";
    o.ok = passed == cfg.count && bound_ok;
    o.doc["checks"] = Json{{"all_exact", passed == cfg.count}, {"iteration_bound", bound_ok}};
    o.csv = "trials,exact_matches,max_iterations\n" + std::to_string(cfg.count) + "," + std::to_string(passed) + "," +
            std::to_string(worst) + "\n";
    return o;
}

Outcome run_character(const RunConfig& cfg) {
    auto spec = TwistSpec::make(cfg.n, cfg.k);
    if (cfg.flow_sign != 1 && cfg.flow_sign != -1) throw DomainError("flow sign must be +1 or -1");
    CurvatureData xi{cfg.n, cfg.trivial_rank, {}};
    for (const auto& l : cfg.lines) xi.line_classes.push_back(parse_two_form(l, cfg.n));
    if (xi.rank() < 1) throw DomainError("the vacuum bundle needs positive rank");

    auto basis = make_basis(cfg.truncation(), Variant::odd);
    FlowOptions opts;
    opts.grid = cfg.grid;
    auto flow = spectral_flow(OddSuperchargeFamily(basis, cfg.flow_sign, xi.rank()), opts);
    auto density = localization_stats(odd_density(4.0, cfg.grid, basis, xi.rank()), cfg.window);

    Outcome o{document("character")};
    o.doc["n"] = cfg.n;
    o.doc["k"] = cfg.k;
    o.doc["rank"] = xi.rank();
    o.doc["chern_character"] = chern_character(xi).to_string();
    o.doc["flow"] = to_json(flow);
    o.doc["density_total"] = density.total;
    o.doc["tolerance"] = cfg.tol;

    CharacterEvidence ev{flow.net_flow, density.total, cfg.tol};
    bool consistent = true;
    try {
        auto odd = assemble_character(ev, xi, Variant::odd);
        auto even = assemble_character(ev, xi, Variant::even);
        o.doc["odd_character"] = to_json(odd);
        o.doc["even_character"] = to_json(even);
    } catch (const DomainError& e) {
        consistent = false;
        o.doc["assembly_error"] = e.what();
    }
    bool factors = factorization_check(xi, cfg.flow_sign);
    auto coset = classify_supercharge(chern_character(xi), cfg.flow_sign, spec);
    o.doc["coset"] = to_json(coset);
    o.ok = consistent && factors;
    o.doc["checks"] = Json{{"evidence_consistent", consistent}, {"factorization", factors}};
    o.csv = "flow,density_total,factorization\n" + std::to_string(flow.net_flow) + "," + std::to_string(density.total) +
            "," + (factors ? "true" : "false") + "\n";
    return o;
}

Outcome run_suspend_check(const RunConfig& cfg) {
    auto basis = make_basis(cfg.truncation(), Variant::odd);
    OddSuperchargeFamily fam(basis);
    Rng rng(cfg.seed);
    std::uniform_real_distribution<double> u(0, 2 * kPi);
    double worst = 0, worst_numeric = 0, worst_symbolic = 0;
    Json phis = Json::array();
    for (int p = 0; p < cfg.phi_count; ++p) {
        double phi = u(rng);
        phis.push_back(phi);
        ComplexSparse f = approximate_sign(fam.at(phi));
        for (int i = 0; i < cfg.s_grid; ++i) {
            double s = kPi * i / (cfg.s_grid - 1);
            worst = std::max(worst, suspension_defect(f, s).identity_residual);
            auto back = suspension_defect(f, kPi + kPi * (i + 0.5) / cfg.s_grid);
            worst_symbolic = std::max(worst_symbolic, back.symbolic);
            worst_numeric = std::max(worst_numeric, back.numeric);
        }
    }
    Outcome o{document("suspend-check")};
    o.doc["truncation"] = to_json(cfg.truncation());
    o.doc["phi"] = phis;
    o.doc["s_points"] = cfg.s_grid;
    o.doc["max_identity_residual"] = worst;
    o.doc["constant_half_symbolic"] = worst_symbolic;
    o.doc["constant_half_numeric"] = worst_numeric;
    double tol = 1e-12;
    o.doc["tolerance"] = tol;
    o.ok = worst < tol && worst_symbolic == 0.0;
    o.doc["checks"] = Json{{"identity_on_first_half", worst < tol}, {"zero_on_second_half", worst_symbolic == 0.0}};
    std::ostringstream csv;
    csv << "max_identity_residual,constant_half_symbolic,constant_half_numeric\n"
        << worst << ',' << worst_symbolic << ',' << worst_numeric << '\n';
    o.csv = csv.str();
    return o;
}

std::vector<double> parse_times(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = std::stod(item, &used);
        if (used != item.size()) throw DomainError("bad time value '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw DomainError("empty time list");
    return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Twisted K-theory on tori: exact groups, supercharge spectra and index densities", "twistk"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string times = "1,4,16";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("-o,--output", cfg.output, "write the report here instead of stdout");
    };
    auto add_trunc = [&](CLI::App* sub) {
        sub->add_option("--L", cfg.cutoff, "energy cutoff");
        sub->add_option("--C", cfg.charge_window, "charge window");
        sub->add_option("--mode-max", cfg.mode_max, "largest retained mode (default: L)");
    };

    auto* kgroup = app.add_subcommand("kgroup", "twisted K-groups with closed-form cross-check");
    kgroup->add_option("--n", cfg.n, "torus dimension n (T_phi x T^n)");
    kgroup->add_option("--k", cfg.k, "twist multiple");
    add_common(kgroup);

    auto* flow = app.add_subcommand("flow", "spectral flow of a supercharge loop");
    flow->add_option("--variant", cfg.variant)->check(CLI::IsMember({"odd", "odd-negative", "constant"}));
    add_trunc(flow);
    flow->add_option("--rank", cfg.rank, "number of identical copies");
    flow->add_option("--grid", cfg.grid, "grid points per period");
    flow->add_option("--offset", cfg.offset, "start of the period");
    add_common(flow);

    auto* heat = app.add_subcommand("heat", "heat supertrace densities");
    heat->add_option("--variant", cfg.variant)->check(CLI::IsMember({"odd", "suspended", "even"}));
    heat->add_option("--t", times, "comma separated heat times");
    add_trunc(heat);
    heat->add_option("--rank", cfg.rank);
    heat->add_option("--grid", cfg.grid, "phi grid points");
    heat->add_option("--s-grid", cfg.s_grid, "s grid points (2D variants)");
    heat->add_option("--tol", cfg.tol);
    heat->add_option("--window", cfg.window, "half-width of the localization window");
    heat->add_option("--out-dir", cfg.out_dir, "directory for per-t CSV files and summary.json");
    add_common(heat);

    auto* prim = app.add_subcommand("primitive", "randomized twisted primitive checks");
    prim->add_option("--n", cfg.n, "largest torus dimension used");
    prim->add_option("--count", cfg.count);
    prim->add_option("--terms", cfg.terms, "terms drawn per potential");
    prim->add_option("--seed", cfg.seed);
    add_common(prim);

    auto* ch = app.add_subcommand("character", "assemble and classify the index character");
    ch->add_option("--n", cfg.n);
    ch->add_option("--k", cfg.k);
    ch->add_option("--trivial-rank", cfg.trivial_rank);
    ch->add_option("--line", cfg.lines, "line summand first Chern class, e.g. 1,2:3 for 3 dtheta1^dtheta2");
    ch->add_option("--flow-sign", cfg.flow_sign);
    add_trunc(ch);
    ch->add_option("--grid", cfg.grid);
    ch->add_option("--tol", cfg.tol);
    add_common(ch);

    auto* susp = app.add_subcommand("suspend-check", "suspension identity for approximate signs");
    add_trunc(susp);
    susp->add_option("--phi-count", cfg.phi_count);
    susp->add_option("--s-grid", cfg.s_grid);
    susp->add_option("--seed", cfg.seed);
    add_common(susp);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    Outcome o;
    bool inputs_valid = false;
    try {
        if (heat->parsed()) cfg.times = parse_times(times);
        if (!kgroup->parsed() && !prim->parsed()) cfg.truncation();
        inputs_valid = true;
        if (kgroup->parsed()) o = run_kgroup(cfg);
        else if (flow->parsed()) o = run_flow(cfg);
        else if (heat->parsed()) o = run_heat(cfg);
        else if (prim->parsed()) o = run_primitive(cfg);
        else if (ch->parsed()) o = run_character(cfg);
        else o = run_suspend_check(cfg);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return inputs_valid && flow->parsed() ? 1 : 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    std::string text = cfg.format == "csv" ? o.csv : dump(o.doc);
    try {
        if (cfg.output.empty()) out << text;
        else write_text(cfg.output, text);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return o.ok ? 0 : 1;
}

}  // namespace twistk
