#include "frob/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <ostream>
#include <random>
#include <sstream>

#include "frob/error.hpp"
#include "frob/hm.hpp"
#include "frob/oracle.hpp"
#include "frob/structure.hpp"

namespace frob {

namespace {

using OJson = nlohmann::ordered_json;

std::string exp_to_monomial(const ExpVec& e, int n) {
    Laurent m = Laurent::monomial_q(n, e, Rat(1));
    return m.to_string();
}

std::vector<Laurent> parse_deform_spec(const std::string& spec, const Laurent& f,
                                       const NewtonPolyhedron& P) {
    std::vector<Laurent> gs;
    if (spec == "good-max") {
        for (const auto& e : subdiagram_monomials(P))
            gs.push_back(Laurent::monomial_q(f.nu(), e, Rat(1)));
        return gs;
    }
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.empty()) continue;
        gs.push_back(parse_laurent(item, f.nu()));
    }
    if (gs.empty()) fail_input("empty deformation specification");
    return gs;
}

OJson nondeg_json(const NondegeneracyReport& rep) {
    OJson j;
    switch (rep.verdict) {
        case NondegVerdict::nondegenerate_exact: j["verdict"] = "NondegenerateExact"; break;
        case NondegVerdict::nondegenerate_probabilistic:
            j["verdict"] = "NondegenerateProbabilistic";
            j["trials"] = rep.trials;
            break;
        case NondegVerdict::degenerate: j["verdict"] = "DegenerateWitness"; break;
        case NondegVerdict::unknown: j["verdict"] = "Unknown"; break;
    }
    if (!rep.witness_face.empty()) {
        j["face"] = OJson::array();
        for (const auto& e : rep.witness_face) j["face"].push_back(e);
    }
    if (rep.witness_point) {
        j["point"] = OJson::array();
        for (const auto& v : *rep.witness_point) j["point"].push_back(rat_to_string(v));
    }
    if (!rep.note.empty()) j["note"] = rep.note;
    return j;
}

std::string nondeg_text(const NondegeneracyReport& rep) {
    switch (rep.verdict) {
        case NondegVerdict::nondegenerate_exact: return "nondegenerate (exact)";
        case NondegVerdict::nondegenerate_probabilistic:
            return "nondegenerate (probabilistic, " + std::to_string(rep.trials) + " trials)";
        case NondegVerdict::degenerate: {
            std::string s = "degenerate";
            if (rep.witness_point) {
                s += "; witness point (";
                for (size_t i = 0; i < rep.witness_point->size(); ++i)
                    s += (i ? ", " : "") + rat_to_string((*rep.witness_point)[i]);
                s += ")";
            }
            return s;
        }
        case NondegVerdict::unknown: return "unknown (" + rep.note + ")";
    }
    return "";
}

struct AnalyzedInput {
    Laurent f;
    NewtonPolyhedron P;
    NondegeneracyReport nondeg;
};

AnalyzedInput analyze_input(const RunConfig& cfg, bool need_nondegenerate) {
    AnalyzedInput in;
    in.f = parse_laurent(cfg.poly_text, cfg.n);
    if (in.f.is_zero()) fail_precondition("zero polynomial");
    in.P = newton_polyhedron(in.f);
    if (!is_convenient(in.P)) fail_precondition("polynomial is not convenient");
    NondegOptions opt;
    opt.trials = cfg.trials;
    opt.seed = cfg.seed;
    opt.budget = cfg.budget;
    in.nondeg = is_nondegenerate(in.f, in.P, opt);
    if (need_nondegenerate && !in.nondeg.nondegenerate())
        fail_precondition("polynomial is degenerate or undecided: " + nondeg_text(in.nondeg));
    return in;
}

int cmd_analyze(const RunConfig& cfg, std::ostream& out) {
    AnalyzedInput in = analyze_input(cfg, false);
    Int mu = milnor_number(in.P);
    std::vector<ExpVec> sub = subdiagram_monomials(in.P);

    std::optional<SpectrumData> sp;
    if (in.nondeg.nondegenerate()) sp = spectrum(in.f, cfg.budget);

    if (cfg.json) {
        OJson j;
        j["n"] = cfg.n;
        j["input"] = in.f.to_string();
        j["convenient"] = true;
        j["nondegeneracy"] = nondeg_json(in.nondeg);
        j["milnor_number"] = mu.get_str();
        j["subdiagram_dimension"] = sub.size();
        j["vertices"] = OJson::array();
        for (const auto& v : in.P.vertices) j["vertices"].push_back(v);
        j["facets"] = OJson::array();
        for (const auto& F : in.P.facets) {
            OJson fj;
            fj["form"] = OJson::array();
            for (const auto& c : F.form) fj["form"].push_back(rat_to_string(c));
            fj["offset"] = rat_to_string(F.offset);
            j["facets"].push_back(fj);
        }
        j["subdiagram_monomials"] = OJson::array();
        for (const auto& e : sub) j["subdiagram_monomials"].push_back(e);
        if (sp) {
            j["spectrum"] = OJson::array();
            for (const auto& a : sp->values) j["spectrum"].push_back(rat_to_string(a));
        }
        out << j.dump(2) << "\n";
        return 0;
    }
    out << "input: " << in.f.to_string() << "  (n=" << cfg.n << ")\n";
    out << "convenient: yes\n";
    out << "nondegenerate: " << nondeg_text(in.nondeg) << "\n";
    out << "milnor number mu = " << mu.get_str() << "\n";
    out << "subdiagram dimension nu = " << sub.size() << "\n";
    out << "vertices:";
    for (const auto& v : in.P.vertices) out << " " << exp_to_monomial(v, cfg.n);
    out << "\nsubdiagram monomials:";
    for (const auto& e : sub) out << " " << exp_to_monomial(e, cfg.n);
    out << "\n";
    if (sp) {
        out << "spectrum:";
        for (const auto& a : sp->values) out << " " << rat_to_string(a);
        out << "\n";
    }
    return 0;
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out) {
    analyze_input(cfg, true);
    SpectrumData sp = spectrum(parse_laurent(cfg.poly_text, cfg.n), cfg.budget);
    if (cfg.json) {
        OJson j;
        j["spectrum"] = OJson::array();
        for (const auto& a : sp.values) j["spectrum"].push_back(rat_to_string(a));
        out << j.dump(2) << "\n";
        return 0;
    }
    out << "spectrum:";
    for (const auto& a : sp.values) out << " " << rat_to_string(a);
    out << "\n";
    return 0;
}

void print_pmat(std::ostream& out, const std::string& name, const PMat& M) {
    out << name << " =\n";
    for (const auto& row : M) {
        out << "  [";
        for (size_t j = 0; j < row.size(); ++j) out << (j ? ", " : "") << row[j].to_string("x");
        out << "]\n";
    }
}

void print_qmat(std::ostream& out, const std::string& name, const QMat& M) {
    out << name << " =\n";
    for (const auto& row : M) {
        out << "  [";
        for (size_t j = 0; j < row.size(); ++j) out << (j ? ", " : "") << rat_to_string(row[j]);
        out << "]\n";
    }
}

FrobTypeStructure build_from_config(const RunConfig& cfg, const AnalyzedInput& in) {
    std::vector<Laurent> gs = parse_deform_spec(cfg.deform_spec, in.f, in.P);
    SubdiagramDeformation D = classify_deformation(in.f, gs, cfg.budget);
    if (!D.injective) fail_precondition("deformation is not injective");
    return build_canonical_structure(D);
}

int cmd_structure(const RunConfig& cfg, std::ostream& out) {
    AnalyzedInput in = analyze_input(cfg, true);
    FrobTypeStructure S = build_from_config(cfg, in);
    if (cfg.json) {
        out << structure_to_json(S) << "\n";
        return 0;
    }
    out << "deformation: F = " << S.deformation->F().to_string() << "\n";
    out << "flags: injective=" << S.deformation->injective << " maximal=" << S.deformation->maximal
        << " surjective=" << S.deformation->surjective << " good=" << S.deformation->good << "\n";
    out << "basis classes:";
    for (const auto& e : S.basis_monomials) out << " [" << exp_to_monomial(e, cfg.n) << "]";
    out << "\nBinf = diag(";
    for (size_t i = 0; i < S.alpha.size(); ++i) out << (i ? ", " : "") << rat_to_string(S.alpha[i]);
    out << ")\n";
    print_pmat(out, "B0", S.B0);
    for (size_t k = 0; k < S.C.size(); ++k) print_pmat(out, "C(" + std::to_string(k + 1) + ")", S.C[k]);
    print_qmat(out, "g", S.g);
    RelationReport rep = verify_structure_relations(S);
    out << "structure relations: " << (rep.all_pass() ? "all pass" : rep.first_failure()) << "\n";
    return 0;
}

int cmd_deform(const RunConfig& cfg, std::ostream& out) {
    AnalyzedInput in = analyze_input(cfg, true);
    FrobTypeStructure S = build_from_config(cfg, in);
    HMOptions opt;
    opt.order = cfg.order;
    HMDeformation H = universal_deformation(S, opt);
    RelationReport rep = verify_extended_relations(H);
    if (cfg.json) {
        OJson j;
        j["r"] = H.r;
        j["ell"] = H.ell;
        j["order"] = H.N;
        auto mat = [&](const PMat& M) {
            OJson rows = OJson::array();
            for (const auto& row : M) {
                OJson rr = OJson::array();
                for (const auto& p : row) rr.push_back(p.to_string("z"));
                rows.push_back(rr);
            }
            return rows;
        };
        j["B0"] = mat(H.B0);
        j["C"] = OJson::array();
        for (const auto& M : H.C) j["C"].push_back(mat(M));
        j["D"] = OJson::array();
        for (const auto& M : H.D) j["D"].push_back(mat(M));
        j["relations_pass"] = rep.all_pass();
        out << j.dump(2) << "\n";
        return 0;
    }
    out << "extension with " << H.ell << " extra variables through order " << H.N
        << " (variables z1..z" << H.nz() << " = x then y)\n";
    print_pmat(out, "B0(x,y)", H.B0);
    for (size_t k = 0; k < H.C.size(); ++k)
        print_pmat(out, "C(" + std::to_string(k + 1) + ")", H.C[k]);
    for (size_t k = 0; k < H.D.size(); ++k)
        print_pmat(out, "D(" + std::to_string(k + 1) + ")", H.D[k]);
    out << "extended relations: " << (rep.all_pass() ? "all pass" : rep.first_failure()) << "\n";
    return 0;
}

OJson germ_json(const FrobeniusGerm& G) {
    OJson j;
    j["mu"] = G.mu;
    j["unit_index"] = G.unit_index + 1;
    j["flat_coordinates"] = OJson::array();
    for (size_t i = 0; i < G.mu; ++i) j["flat_coordinates"].push_back("t" + std::to_string(i + 1));
    j["charges"] = OJson::array();
    for (const auto& a : G.charges) j["charges"].push_back(rat_to_string(a));
    j["metric"] = OJson::array();
    for (const auto& row : G.metric) {
        OJson rr = OJson::array();
        for (const auto& v : row) rr.push_back(rat_to_string(v));
        j["metric"].push_back(rr);
    }
    j["potential_order"] = G.pot_order;
    j["potential"] = OJson::array();
    for (const auto& [e, c] : G.potential.terms()) {
        OJson term = OJson::array();
        term.push_back(e);
        term.push_back(rat_to_string(c));
        j["potential"].push_back(term);
    }
    return j;
}

int cmd_potential(const RunConfig& cfg, std::ostream& out) {
    AnalyzedInput in = analyze_input(cfg, true);
    FrobTypeStructure S = build_from_config(cfg, in);
    HMOptions opt;
    opt.order = cfg.order;
    HMDeformation H = universal_deformation(S, opt);
    FrobeniusGerm G = frobenius_manifold_from_deformation(H);
    GermCheckReport rep = check_wdvv(G);
    if (cfg.json) {
        OJson j = germ_json(G);
        j["wdvv_pass"] = rep.relations.all_pass();
        j["homogeneous"] = rep.homogeneous;
        out << j.dump(2) << "\n";
        return 0;
    }
    out << "flat coordinates t1..t" << G.mu << " with charges";
    for (const auto& a : G.charges) out << " " << rat_to_string(a);
    out << "; unit along t" << (G.unit_index + 1) << "\n";
    out << "potential through total order " << G.pot_order << ":\n";
    out << "  " << G.potential.to_string("t") << "\n";
    out << "wdvv: " << (rep.relations.all_pass() ? "pass" : "FAIL") << ", euler homogeneity: "
        << (rep.homogeneous ? "pass" : "FAIL") << "\n";
    return 0;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    AnalyzedInput in = analyze_input(cfg, false);
    bool all = true;
    auto line = [&](const std::string& name, bool pass, const std::string& note = "") {
        all = all && pass;
        out << (pass ? "PASS" : "FAIL") << "  " << name;
        if (!note.empty()) out << "  (" << note << ")";
        out << "\n";
    };

    line("convenient", true);
    line("nondegenerate", in.nondeg.nondegenerate(), nondeg_text(in.nondeg));
    if (!in.nondeg.nondegenerate()) {
        out << (all ? "OK" : "VERIFICATION FAILED") << "\n";
        return all ? 0 : 4;
    }

    Int mu = milnor_number(in.P);
    OracleResult dim = jacobi_dim_bruteforce(in.f);
    line("kouchnirenko count matches brute-force dimension", dim.value == mu,
         "mu=" + mu.get_str() + " oracle=" + dim.value.get_str());

    JacobiBasis B = monomial_basis(in.f, cfg.budget);
    SpectrumData sp{B.degrees};
    bool endpoints = B.degrees.front() == Rat(0) && B.degrees.back() == Rat(B.n);
    line("spectrum endpoints 0 and n", endpoints);
    bool symmetric = true;
    for (size_t i = 0; i < B.mu; ++i)
        if (B.degrees[i] + B.degrees[B.mu - 1 - i] != Rat(B.n)) symmetric = false;
    line("spectrum symmetry", symmetric);
    {
        bool graded_ok = true;
        std::map<Rat, int> mult;
        for (const auto& a : sp.values) mult[a]++;
        for (const auto& [alpha, m] : mult)
            if (graded_dim_bruteforce(in.f, alpha).value != m) graded_ok = false;
        line("spectrum equals filtered brute-force dimensions", graded_ok);
    }

    SubdiagramDeformation D = build_good_maximal_deformation(in.f, cfg.budget);
    FrobTypeStructure S = build_canonical_structure(D);
    RelationReport rep = verify_structure_relations(S);
    line("structure relations (canonical maximal deformation)", rep.all_pass(),
         rep.all_pass() ? "" : rep.first_failure());
    {
        FrobTypeStructure bad = S;
        bad.alpha[0] += 1;
        line("negative control rejects a perturbed grading",
             !verify_structure_relations(bad).all_pass());
    }
    {
        PrimitiveMapPoly chi = primitive_map(S);
        line("primitive map triangular shape", chi.triangular);
    }
    {
        // restriction coherence at seeded sample points
        std::mt19937_64 rng(cfg.seed);
        bool coherent = true;
        for (int trial = 0; trial < 2 && coherent; ++trial) {
            std::vector<Rat> a;
            for (int i = 0; i < S.r; ++i)
                a.push_back(rat(static_cast<long>(rng() % 5) - 2, 1 + static_cast<long>(rng() % 3)));
            PointStructure pt = restrict_at(S, a);
            Laurent fa = S.deformation->F().specialize_params(a);
            FrobTypeStructure Sa = build_canonical_structure(classify_deformation(fa, D.gs, cfg.budget));
            coherent = pt.R0 == pmat_eval(Sa.B0, std::vector<Rat>(S.r, Rat(0))) && pt.g == Sa.g;
            if (coherent) {
                SpectrumData spa = spectrum(fa, cfg.budget);
                coherent = spa.values == sp.values;
            }
        }
        line("restriction coherence and spectrum constancy at sample points", coherent);
    }
    line("generation over Q[x]", check_GC_global(S));

    if (all) {
        HMOptions opt;
        opt.order = std::min(cfg.order, 4);
        HMDeformation H = universal_deformation(S, opt);
        line("extended relations through order " + std::to_string(H.N),
             verify_extended_relations(H).all_pass());
        FrobeniusGerm G = frobenius_manifold_from_deformation(H);
        GermCheckReport germ_rep = check_wdvv(G);
        line("germ associativity and unit", germ_rep.relations.all_pass());
        line("germ euler homogeneity", germ_rep.homogeneous);
    }

    out << (all ? "OK" : "VERIFICATION FAILED") << "\n";
    return all ? 0 : 4;
}

} // namespace

int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"canonical Frobenius structures of convenient nondegenerate Laurent polynomials"};
    app.require_subcommand(1);

    RunConfig cfg;
    auto add_common = [&](CLI::App* sub, bool with_deform) {
        sub->add_option("poly", cfg.poly_text, "Laurent polynomial in u1..un")->required();
        sub->add_option("-n", cfg.n, "number of torus variables")->required();
        sub->add_flag("--json", cfg.json, "deterministic JSON output");
        sub->add_option("--seed", cfg.seed, "seed for randomized checks");
        sub->add_option("--trials", cfg.trials, "trial count for probabilistic checks");
        sub->add_option("--budget", cfg.budget, "step budget for basis computations");
        if (with_deform) {
            sub->add_option("--deform", cfg.deform_spec,
                            "deformation: good-max or ';'-separated subdiagram polynomials");
            sub->add_option("--order", cfg.order, "truncation order for deformations")
                ->check(CLI::Range(0, 16));
        }
    };
    add_common(app.add_subcommand("analyze", "newton data, milnor number, spectrum"), false);
    add_common(app.add_subcommand("spectrum", "spectrum only"), false);
    add_common(app.add_subcommand("structure", "canonical Frobenius-type structure"), true);
    add_common(app.add_subcommand("deform", "universal deformation matrices"), true);
    add_common(app.add_subcommand("potential", "Frobenius germ and potential"), true);
    add_common(app.add_subcommand("verify", "full invariant and oracle suite"), true);

    std::vector<std::string> args(argv.rbegin(), argv.rend());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        cfg.subcommand = app.get_subcommands()[0]->get_name();
        if (cfg.subcommand == "analyze") return cmd_analyze(cfg, out);
        if (cfg.subcommand == "spectrum") return cmd_spectrum(cfg, out);
        if (cfg.subcommand == "structure") return cmd_structure(cfg, out);
        if (cfg.subcommand == "deform") return cmd_deform(cfg, out);
        if (cfg.subcommand == "potential") return cmd_potential(cfg, out);
        if (cfg.subcommand == "verify") return cmd_verify(cfg, out);
        err << "error: unknown subcommand\n";
        return 2;
    } catch (const Error& e) {
        if (cfg.json) {
            OJson j;
            j["error"] = e.what();
            switch (e.kind()) {
                case ErrorKind::input: j["kind"] = "input"; break;
                case ErrorKind::precondition: j["kind"] = "precondition"; break;
                case ErrorKind::verification: j["kind"] = "verification"; break;
                case ErrorKind::budget: j["kind"] = "budget"; break;
                case ErrorKind::internal: j["kind"] = "internal"; break;
            }
            out << j.dump(2) << "\n";
        } else {
            err << "error: " << e.what() << "\n";
        }
        switch (e.kind()) {
            case ErrorKind::input: return 2;
            case ErrorKind::precondition: return 3;
            case ErrorKind::verification: return 4;
            case ErrorKind::budget: return 5;
            case ErrorKind::internal: return 6;
        }
        return 6;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 6;
    }
}

} // namespace frob
