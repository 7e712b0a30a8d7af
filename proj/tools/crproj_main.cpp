#include <CLI11.hpp>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "crproj/pipeline.hpp"
#include "json.hpp"

namespace {

using namespace crproj;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

std::string fmt(double v) {
    std::ostringstream ss;
    ss << std::setprecision(12) << v;
    return ss.str();
}

json to_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

json to_json(const Eigen::MatrixXcd& a) {
    json rows = json::array();
    for (int i = 0; i < a.rows(); ++i) {
        json r = json::array();
        for (int j = 0; j < a.cols(); ++j) r.push_back(to_json(a(i, j)));
        rows.push_back(r);
    }
    return rows;
}

json to_json(const Eigen::VectorXcd& a) {
    json r = json::array();
    for (int i = 0; i < a.size(); ++i) r.push_back(to_json(a(i)));
    return r;
}

struct source_options {
    std::string expr;
    std::string file;
    bool quadric = false;
    bool random = false;
};

surface_germ make_surface(const source_options& src, config& cfg, bool m_explicit) {
    int provided = (!src.expr.empty()) + (!src.file.empty()) + src.quadric + src.random;
    if (provided != 1) throw CLI::ValidationError("exactly one of --expr, --file, --quadric, --random is required");
    if (!src.expr.empty()) return parse_surface(src.expr, cfg.m, cfg.order);
    if (src.quadric) return hyperquadric(cfg.m, cfg.order);
    if (src.random) return random_germ(cfg.m, cfg.order, cfg.seed);
    surface_germ g = load_surface(src.file);
    if (m_explicit && g.m != cfg.m)
        throw domain_error("surface file has m = " + std::to_string(g.m) + " but --m requested " +
                           std::to_string(cfg.m));
    cfg.m = g.m;
    return g;
}

std::string key(const midx& s) {
    std::string r;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) r += ",";
        r += std::to_string(s[i]);
    }
    return r;
}

json invariants_report(const analysis& a, const config& cfg) {
    json rep;
    rep["m"] = a.germ.m;
    rep["order"] = a.germ.order;
    json h;
    for (int p = 2; p <= a.tables.p_max; ++p)
        for (const auto& [s, v] : a.tables.h[p]) h[key(s)] = v.value0();
    rep["h"] = h;
    rep["P"] = to_json(a.so.pl.P);
    rep["L"] = to_json(a.so.pl.L);
    rep["P_am"] = to_json(a.so.Pam);
    rep["P_mm"] = to_json(a.so.Pmm);
    json p3;
    p3["P_abm"] = to_json(a.p3.Pabm);
    p3["P_abbm"] = to_json(a.p3.Pabbm);
    p3["P_amm"] = to_json(a.p3.Pamm);
    p3["P_mmm"] = to_json(a.p3.Pmmm);
    rep["P3"] = p3;
    json motion;
    motion["g0a"] = to_json(a.adapted.motion.shear.g0a);
    motion["g0m"] = to_json(a.adapted.motion.shear.g0m);
    rep["adaptation"] = motion;
    json red = json::array();
    for (const auto& c : verify_index1_redundancy(a.tables, cfg.tol_structural)) {
        json line;
        line["name"] = c.name;
        line["residual"] = c.residual;
        line["pass"] = c.pass;
        red.push_back(line);
    }
    rep["redundancy"] = red;
    return rep;
}

void print_matrix(std::ostream& os, const std::string& name, const Eigen::MatrixXcd& a) {
    os << name << ":\n";
    for (int i = 0; i < a.rows(); ++i) {
        os << "  ";
        for (int j = 0; j < a.cols(); ++j)
            os << "(" << fmt(a(i, j).real()) << ", " << fmt(a(i, j).imag()) << ") ";
        os << "\n";
    }
}

int cmd_invariants(const source_options& src, config cfg, bool m_explicit) {
    analysis a = run_analysis(make_surface(src, cfg, m_explicit), cfg);
    json rep = invariants_report(a, cfg);
    if (cfg.json) {
        std::cout << rep.dump(2) << "\n";
        return kExitOk;
    }
    std::cout << "surface: m = " << a.germ.m << ", order = " << a.germ.order << "\n";
    std::cout << "h coefficients at the base point (sorted indices):\n";
    for (int p = 2; p <= a.tables.p_max; ++p)
        for (const auto& [s, v] : a.tables.h[p])
            if (std::abs(v.value0()) > 1e-13) std::cout << "  h_{" << key(s) << "} = " << fmt(v.value0()) << "\n";
    print_matrix(std::cout, "P", a.so.pl.P);
    print_matrix(std::cout, "L", a.so.pl.L);
    print_matrix(std::cout, "P3: P_abm", a.p3.Pabm);
    print_matrix(std::cout, "P3: P_abbm", a.p3.Pabbm);
    std::cout << "P_mmm = (" << fmt(a.p3.Pmmm.real()) << ", " << fmt(a.p3.Pmmm.imag()) << ")\n";
    bool all = true;
    for (const auto& c : verify_index1_redundancy(a.tables, cfg.tol_structural)) all = all && c.pass;
    std::cout << "index-1 redundancy identities: " << (all ? "pass" : "FAIL") << "\n";
    return kExitOk;
}

int cmd_convexity(const source_options& src, config cfg, bool m_explicit) {
    analysis a = run_analysis(make_surface(src, cfg, m_explicit), cfg);
    json rep;
    rep["classification"] = to_string(a.levi.classification);
    rep["eigenvalues"] = a.levi.eigenvalues;
    if (a.sclc) {
        rep["sclc"] = a.sclc->sclc;
        rep["margin"] = a.sclc->margin;
        if (!a.sclc->sclc) rep["witness"] = to_json(Eigen::VectorXcd(a.sclc->witness));
    } else {
        rep["sclc"] = false;
    }
    if (cfg.json)
        std::cout << rep.dump(2) << "\n";
    else {
        std::cout << "levi classification: " << to_string(a.levi.classification) << "\neigenvalues of iL:";
        for (double e : a.levi.eigenvalues) std::cout << " " << fmt(e);
        std::cout << "\nsclc: " << (a.sclc && a.sclc->sclc ? "true" : "false");
        if (a.sclc) std::cout << " (margin " << fmt(a.sclc->margin) << ")";
        std::cout << "\n";
    }
    return kExitOk;
}

int cmd_dual(const source_options& src, config cfg, bool m_explicit) {
    analysis a = run_analysis(make_surface(src, cfg, m_explicit), cfg);
    if (!a.sclc || !a.sclc->sclc)
        throw domain_error("dual invariants require a strongly C-linearly convex surface");
    second_order_data dual = dual_second_order(a.so.pl);
    dual_third_data q3 = dual_third_order(a.p3, a.inv->Q, a.inv->M);
    json rep;
    rep["Q"] = to_json(a.inv->Q);
    rep["M"] = to_json(a.inv->M);
    rep["dual_P"] = to_json(dual.P);
    rep["dual_L"] = to_json(dual.L);
    rep["Q3"]["Q_abm"] = to_json(q3.Qabm);
    rep["Q3"]["Q_abbm"] = to_json(q3.Qabbm);
    rep["Q3"]["Q_amm"] = to_json(q3.Qamm);
    if (cfg.json)
        std::cout << rep.dump(2) << "\n";
    else {
        print_matrix(std::cout, "Q", a.inv->Q);
        print_matrix(std::cout, "M", a.inv->M);
        print_matrix(std::cout, "dual P* = Q", dual.P);
        print_matrix(std::cout, "dual L* = -M", dual.L);
    }
    return kExitOk;
}

int cmd_selfdual(const source_options& src, config cfg, bool m_explicit) {
    analysis a = run_analysis(make_surface(src, cfg, m_explicit), cfg);
    if (!a.sclc || !a.sclc->sclc)
        throw domain_error("the self-duality test requires a strongly C-linearly convex surface");
    orbit_options opt;
    opt.seed = cfg.seed;
    opt.match_threshold = cfg.tol_orbit;
    orbit_match_result o2 = selfdual_second_order(a.so.pl, opt);
    json rep;
    rep["order2"]["status"] = to_string(o2.status);
    rep["order2"]["match"] = o2.status == match_status::match;
    rep["order2"]["residual"] = o2.residual;
    rep["order2"]["motion"]["g00"] = to_json(o2.motion.g00);
    rep["order2"]["motion"]["gab"] = to_json(o2.motion.gab);
    rep["order2"]["motion"]["gmm"] = to_json(o2.motion.gmm);
    if (!o2.obstruction.empty()) rep["order2"]["obstruction"] = o2.obstruction;
    if (o2.status == match_status::match) {
        dual_third_data q3 = dual_third_order(a.p3, a.inv->Q, a.inv->M);
        selfdual_third_report o3 = selfdual_third_order(a.adapted.mc, a.p3, q3, o2.motion, cfg.p_max);
        rep["order3"]["residuals"] = {{"abm", o3.r_abm}, {"abbm", o3.r_abbm}, {"amm", o3.r_amm}, {"mmm", o3.r_mmm}};
        selfdual_h_report hv = selfdual_h_version(a.adapted.mc, a.adapted.tables, o2.motion, cfg.p_max);
        rep["h_version"]["order2"] = hv.order2;
        rep["h_version"]["order3"] = hv.order3;
    }
    if (cfg.json)
        std::cout << rep.dump(2) << "\n";
    else {
        std::cout << "order-2 self-duality: " << to_string(o2.status) << " (residual " << fmt(o2.residual) << ")\n";
        if (!o2.obstruction.empty()) std::cout << "obstruction: " << o2.obstruction << "\n";
        if (rep.contains("order3")) {
            std::cout << "order-3 residuals: abm " << fmt(rep["order3"]["residuals"]["abm"].get<double>())
                      << ", abbm " << fmt(rep["order3"]["residuals"]["abbm"].get<double>()) << ", amm "
                      << fmt(rep["order3"]["residuals"]["amm"].get<double>()) << ", mmm "
                      << fmt(rep["order3"]["residuals"]["mmm"].get<double>()) << "\n";
            std::cout << "h-version residuals: order2 " << fmt(rep["h_version"]["order2"].get<double>())
                      << ", order3 " << fmt(rep["h_version"]["order3"].get<double>()) << "\n";
        }
    }
    return kExitOk;
}

int cmd_verify(const source_options& src, config cfg, bool m_explicit, const std::string& corrupt) {
    surface_germ g = make_surface(src, cfg, m_explicit);
    frame_section s = build_section(g);
    mc_pullback mc = pullback_mc(s);
    if (!corrupt.empty()) {
        int j = -1, k = -1;
        if (std::sscanf(corrupt.c_str(), "%d,%d", &j, &k) != 2 || j < 0 || k < 0 || j > 2 * g.m + 1 ||
            k > 2 * g.m + 1)
            throw CLI::ValidationError("--corrupt-mc expects j,k with frame indices");
        corrupt_component(mc, j, k, 1e-3);
    }
    auto lines = verify_suite_on(mc, cfg);
    bool all = true;
    json jlines = json::array();
    for (const auto& l : lines) {
        all = all && l.pass;
        if (cfg.json) {
            jlines.push_back({{"name", l.name}, {"residual", l.residual}, {"pass", l.pass}});
        } else {
            std::cout << (l.pass ? "pass" : "FAIL") << "  " << l.name << "  (max residual " << fmt(l.residual)
                      << ")\n";
        }
    }
    if (cfg.json) {
        json rep;
        rep["checks"] = jlines;
        rep["pass"] = all;
        std::cout << rep.dump(2) << "\n";
    } else {
        std::cout << (all ? "all identities hold" : "identity violations found") << "\n";
    }
    return all ? kExitOk : kExitDomain;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"projective differential invariants of CR-hypersurface germs"};
    app.require_subcommand(1);

    config cfg;
    source_options src;
    std::string corrupt;

    auto add_common = [&](CLI::App* c) {
        c->add_option("--expr", src.expr, "surface as an expression in x1..y{m-1}, xm");
        c->add_option("--file", src.file, "surface coefficient file (JSON)");
        c->add_flag("--quadric", src.quadric, "use the built-in hyperquadric model");
        c->add_flag("--random", src.random, "use a seeded random germ");
        c->add_option("--m", cfg.m, "complex dimension of the ambient projective space");
        c->add_option("--order", cfg.order, "jet truncation degree N");
        c->add_option("--pmax", cfg.p_max, "highest invariant order");
        c->add_option("--seed", cfg.seed, "random seed");
        c->add_option("--tol-structural", cfg.tol_structural, "tolerance for structural identities");
        c->add_flag("--json", cfg.json, "emit machine-readable JSON");
    };

    auto* ci = app.add_subcommand("invariants", "h table, P/L and adapted third-order families");
    auto* cc = app.add_subcommand("convexity", "Levi classification and the SCLC test");
    auto* cd = app.add_subcommand("dual", "dual second/third-order data Q, M, Q3");
    auto* cs = app.add_subcommand("selfdual", "self-duality orbit test at orders 2 and 3");
    auto* cv = app.add_subcommand("verify", "structural identity suite");
    for (auto* c : {ci, cc, cd, cs, cv}) add_common(c);
    cv->add_option("--corrupt-mc", corrupt, "fault injection: perturb omega^j_k (format j,k)")->group("");

    try {
        app.parse(argc, argv);
        try {
            cfg.validate();
        } catch (const crproj::domain_error& e) {
            std::cerr << "usage error: " << e.what() << "\n";
            return kExitUsage;
        }
        CLI::App* active = app.get_subcommands().front();
        bool m_explicit = active->count("--m") > 0;
        if (ci->parsed()) return cmd_invariants(src, cfg, m_explicit);
        if (cc->parsed()) return cmd_convexity(src, cfg, m_explicit);
        if (cd->parsed()) return cmd_dual(src, cfg, m_explicit);
        if (cs->parsed()) return cmd_selfdual(src, cfg, m_explicit);
        if (cv->parsed()) return cmd_verify(src, cfg, m_explicit, corrupt);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const crproj::parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const crproj::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const crproj::internal_error& e) {
        std::cerr << "internal consistency failure: " << e.what() << "\n";
        return kExitInternal;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
