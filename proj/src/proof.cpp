#include "epciso/proof.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace epciso {

std::string mode_str(Mode m) {
    switch (m) {
        case Mode::MC3: return "mc3";
        case Mode::PC3: return "pc3";
        case Mode::EPC3: return "epc3";
    }
    return "?";
}

Mode parse_mode(const std::string& s) {
    if (s == "mc3") return Mode::MC3;
    if (s == "pc3") return Mode::PC3;
    if (s == "epc3") return Mode::EPC3;
    throw std::runtime_error("unknown mode: " + s);
}

Justification Justification::ax(int i) {
    Justification j;
    j.rule = Rule::Axiom;
    j.axiom = i;
    return j;
}
Justification Justification::boolean(VariableId v) {
    Justification j;
    j.rule = Rule::BooleanAx;
    j.var = v;
    return j;
}
Justification Justification::mul(int premise, VariableId v) {
    Justification j;
    j.rule = Rule::Mul;
    j.premise = premise;
    j.var = v;
    return j;
}
Justification Justification::lin(int a, const Rational& ca, int b, const Rational& cb) {
    Justification j;
    j.rule = Rule::Lin;
    j.premise_a = a;
    j.premise_b = b;
    j.ca = ca;
    j.cb = cb;
    return j;
}
Justification Justification::extension(int k) {
    Justification j;
    j.rule = Rule::Ext;
    j.ext = k;
    return j;
}

std::string Proof::serialize() const {
    std::ostringstream out;
    out << "epcproof v1 mode=" << mode_str(mode) << " restricted=" << (restricted_ext ? 1 : 0)
        << "\n";
    for (size_t k = 0; k < ext_table.size(); ++k)
        out << "ext " << k << " := " << ext_table[k].f.str() << "\n";
    for (size_t i = 0; i < steps.size(); ++i) {
        const Justification& j = steps[i].just;
        out << "step " << i << " ";
        switch (j.rule) {
            case Justification::Rule::Axiom: out << "axiom " << j.axiom; break;
            case Justification::Rule::BooleanAx: out << "bool " << j.var.str(); break;
            case Justification::Rule::Mul: out << "mul " << j.premise << " " << j.var.str(); break;
            case Justification::Rule::Lin:
                out << "lin " << j.premise_a << " " << rational_str(j.ca) << " " << j.premise_b
                    << " " << rational_str(j.cb);
                break;
            case Justification::Rule::Ext: out << "ext " << j.ext; break;
        }
        out << " :: " << steps[i].poly.str() << "\n";
    }
    return out.str();
}

Proof parse_proof(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Proof p;
    bool header = false;
    int lineno = 0;
    auto fail = [&](const std::string& msg) -> void {
        throw std::runtime_error("proof line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (!header) {
            if (tok != "epcproof") fail("missing epcproof header");
            std::string ver, modes, restr;
            ls >> ver >> modes >> restr;
            if (ver != "v1") fail("unsupported version");
            if (modes.rfind("mode=", 0) != 0 || restr.rfind("restricted=", 0) != 0)
                fail("bad header fields");
            p.mode = parse_mode(modes.substr(5));
            p.restricted_ext = restr.substr(11) == "1";
            header = true;
            continue;
        }
        if (tok == "ext") {
            int k;
            std::string assign;
            ls >> k >> assign;
            if (assign != ":=") fail("expected :=");
            if (k != static_cast<int>(p.ext_table.size())) fail("extension indices must be dense");
            std::string rest;
            std::getline(ls, rest);
            p.ext_table.push_back(ExtensionDescriptor::other(parse_polynomial(rest)));
            continue;
        }
        if (tok == "step") {
            int i;
            std::string rule;
            ls >> i >> rule;
            if (i != static_cast<int>(p.steps.size())) fail("step indices must be dense");
            ProofStep st;
            std::string sep;
            if (rule == "axiom") {
                int a;
                ls >> a >> sep;
                st.just = Justification::ax(a);
            } else if (rule == "bool") {
                std::string v;
                ls >> v >> sep;
                Polynomial pv = parse_polynomial("1/1 * " + v);
                st.just = Justification::boolean(pv.terms[0].first.factors[0]);
            } else if (rule == "mul") {
                int pr;
                std::string v;
                ls >> pr >> v >> sep;
                Polynomial pv = parse_polynomial("1/1 * " + v);
                st.just = Justification::mul(pr, pv.terms[0].first.factors[0]);
            } else if (rule == "lin") {
                int a, b;
                std::string ca, cb;
                ls >> a >> ca >> b >> cb >> sep;
                st.just = Justification::lin(a, parse_rational(ca), b, parse_rational(cb));
            } else if (rule == "ext") {
                int k;
                ls >> k >> sep;
                st.just = Justification::extension(k);
            } else {
                fail("unknown rule " + rule);
            }
            if (sep != "::") fail("expected ::");
            std::string rest;
            std::getline(ls, rest);
            st.poly = parse_polynomial(rest);
            p.steps.push_back(std::move(st));
            continue;
        }
        fail("unexpected line");
    }
    if (!header) throw std::runtime_error("empty proof file");
    // classify descriptors for reporting purposes
    for (auto& d : p.ext_table) {
        if (d.f.terms.size() == 1 && d.f.terms[0].first.degree() == 2 && d.f.terms[0].second == 1)
            d.kind = ExtensionDescriptor::Kind::Pair;
        else if (d.restricted_form_ok())
            d.kind = ExtensionDescriptor::Kind::Scc;
    }
    return p;
}

Proof parse_proof_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_proof(buf.str());
}

std::string check_error_str(CheckError e) {
    switch (e) {
        case CheckError::None: return "NONE";
        case CheckError::BadPremise: return "BAD_PREMISE";
        case CheckError::DegreeExceeded: return "DEGREE_EXCEEDED";
        case CheckError::NotFresh: return "NOT_FRESH";
        case CheckError::BadExtForm: return "BAD_EXT_FORM";
        case CheckError::McMulViolation: return "MC_MUL_VIOLATION";
        case CheckError::PolyMismatch: return "POLY_MISMATCH";
        case CheckError::BooleanOnExt: return "BOOLEAN_ON_EXT";
    }
    return "?";
}

namespace {

// MC multiplication restriction: the premise is a monomial, or a monomial
// times an input axiom. Checked semantically against the axiom list.
bool mc_premise_ok(const Polynomial& premise, const std::vector<Axiom>& axioms) {
    if (premise.terms.size() <= 1) return true;
    for (const auto& ax : axioms) {
        if (ax.poly.terms.size() != premise.terms.size() || ax.poly.terms.empty()) continue;
        // candidate quotient from the first terms (coefficient must match:
        // the multiplier is a plain monomial)
        for (const auto& [m, c] : ax.poly.terms) {
            if (c != premise.terms[0].second) continue;
            Monomial quot;
            if (!premise.terms[0].first.divide(m, quot)) continue;
            Polynomial prod = ax.poly;
            for (auto& [tm, tc] : prod.terms) tm = tm.times(quot);
            std::sort(prod.terms.begin(), prod.terms.end(),
                      [](const auto& l, const auto& r) { return l.first < r.first; });
            if (prod == premise) return true;
        }
    }
    return false;
}

}  // namespace

CheckResult check(const Proof& proof, const std::vector<Axiom>& axioms) {
    CheckResult res;
    auto reject = [&](int step, CheckError e, const std::string& detail) {
        res.accepted = false;
        res.error = e;
        res.failed_step = step;
        res.detail = detail;
        return res;
    };

    // axioms must not mention extension variables
    for (const auto& ax : axioms)
        for (VariableId v : ax.poly.variables())
            if (v.is_ext()) return reject(-1, CheckError::BadPremise, "axiom uses an extension variable");

    std::vector<char> introduced(proof.ext_table.size(), 0);
    const int degree_bound = 3;
    for (size_t i = 0; i < proof.steps.size(); ++i) {
        const ProofStep& st = proof.steps[i];
        const Justification& j = st.just;
        int ii = static_cast<int>(i);

        // extension variables may only occur once introduced
        for (VariableId v : st.poly.variables()) {
            if (!v.is_ext()) continue;
            int k = v.ext_index();
            bool is_own_intro = j.rule == Justification::Rule::Ext && j.ext == k;
            if (k < 0 || k >= static_cast<int>(proof.ext_table.size()) ||
                (!introduced[static_cast<size_t>(k)] && !is_own_intro))
                return reject(ii, CheckError::NotFresh,
                              "extension variable used before its introduction: " + v.str());
        }

        Polynomial expect;
        switch (j.rule) {
            case Justification::Rule::Axiom: {
                if (j.axiom < 0 || j.axiom >= static_cast<int>(axioms.size()))
                    return reject(ii, CheckError::BadPremise, "axiom index out of range");
                expect = axioms[static_cast<size_t>(j.axiom)].poly;
                break;
            }
            case Justification::Rule::BooleanAx: {
                if (j.var.is_ext())
                    return reject(ii, CheckError::BooleanOnExt,
                                  "Boolean axiom on extension variable " + j.var.str());
                Monomial sq = Monomial::var(j.var).times(j.var);
                expect = Polynomial::add_scaled(Polynomial::monomial(sq, 1),
                                                Polynomial::variable(j.var), 1, -1);
                break;
            }
            case Justification::Rule::Mul: {
                if (j.premise < 0 || j.premise >= ii)
                    return reject(ii, CheckError::BadPremise, "mul premise out of range");
                const Polynomial& prem = proof.steps[static_cast<size_t>(j.premise)].poly;
                if (proof.mode == Mode::MC3 && !mc_premise_ok(prem, axioms))
                    return reject(ii, CheckError::McMulViolation,
                                  "premise is neither a monomial nor monomial times an axiom");
                expect = Polynomial::mul_var(prem, j.var);
                break;
            }
            case Justification::Rule::Lin: {
                if (j.premise_a < 0 || j.premise_a >= ii || j.premise_b < 0 || j.premise_b >= ii)
                    return reject(ii, CheckError::BadPremise, "lin premise out of range");
                expect = Polynomial::add_scaled(proof.steps[static_cast<size_t>(j.premise_a)].poly,
                                                proof.steps[static_cast<size_t>(j.premise_b)].poly,
                                                j.ca, j.cb);
                break;
            }
            case Justification::Rule::Ext: {
                if (proof.mode != Mode::EPC3)
                    return reject(ii, CheckError::BadPremise, "extension axiom outside epc3 mode");
                if (j.ext < 0 || j.ext >= static_cast<int>(proof.ext_table.size()))
                    return reject(ii, CheckError::BadPremise, "extension index out of range");
                if (introduced[static_cast<size_t>(j.ext)])
                    return reject(ii, CheckError::NotFresh,
                                  "extension variable introduced twice: e[" +
                                      std::to_string(j.ext) + "]");
                const ExtensionDescriptor& d = proof.ext_table[static_cast<size_t>(j.ext)];
                VariableId xf = VariableId::ext(j.ext);
                if (d.f.variables().count(xf))
                    return reject(ii, CheckError::NotFresh, "extension variable occurs in f");
                for (VariableId v : d.f.variables())
                    if (v.is_ext() && !introduced[static_cast<size_t>(v.ext_index())])
                        return reject(ii, CheckError::NotFresh,
                                      "definition uses a not-yet-introduced extension variable");
                if (proof.restricted_ext && !d.restricted_form_ok())
                    return reject(ii, CheckError::BadExtForm,
                                  "definition is neither X*Y nor an averaged sum");
                expect = Polynomial::add_scaled(Polynomial::variable(xf), d.f, 1, -1);
                introduced[static_cast<size_t>(j.ext)] = 1;
                break;
            }
        }
        if (!(expect == st.poly))
            return reject(ii, CheckError::PolyMismatch, "stated polynomial does not recompute");
        if (st.poly.degree() > degree_bound)
            return reject(ii, CheckError::DegreeExceeded,
                          "degree " + std::to_string(st.poly.degree()));

        res.metrics.size += static_cast<long>(st.poly.monomial_count());
        res.metrics.max_degree = std::max(res.metrics.max_degree, st.poly.degree());
        for (const auto& [m, c] : st.poly.terms)
            res.metrics.bit_complexity = std::max(res.metrics.bit_complexity, rational_bits(c));
        if (j.rule == Justification::Rule::Ext) ++res.metrics.extension_count;
    }
    res.accepted = true;
    res.refutation = !proof.steps.empty() && proof.steps.back().poly.is_one();
    return res;
}

SoundnessResult soundness_probe(const Proof& proof, const std::vector<Axiom>& axioms,
                                const Assignment& assign) {
    SoundnessResult res;
    for (size_t a = 0; a < axioms.size(); ++a)
        if (evaluate(axioms[a].poly, assign, proof.ext_table) != 0) {
            res.passed = false;
            res.failed_step = -1;
            res.detail = "assignment does not zero axiom " + std::to_string(a);
            return res;
        }
    for (size_t i = 0; i < proof.steps.size(); ++i) {
        Rational v = evaluate(proof.steps[i].poly, assign, proof.ext_table);
        if (v != 0) {
            res.passed = false;
            res.failed_step = static_cast<int>(i);
            res.detail = "step evaluates to " + rational_str(v);
            return res;
        }
    }
    res.passed = true;
    return res;
}

}  // namespace epciso
