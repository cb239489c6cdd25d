#include "epciso/polynomial.hpp"

#include <algorithm>
#include <sstream>

namespace epciso {

std::string VariableId::str() const {
    if (is_ext()) return "e[" + std::to_string(ext_index()) + "]";
    return "x[" + std::to_string(left()) + "," + std::to_string(right()) + "]";
}

Monomial Monomial::times(VariableId v) const {
    Monomial out = *this;
    out.factors.insert(std::upper_bound(out.factors.begin(), out.factors.end(), v), v);
    return out;
}

Monomial Monomial::times(const Monomial& o) const {
    Monomial out;
    out.factors.resize(factors.size() + o.factors.size());
    std::merge(factors.begin(), factors.end(), o.factors.begin(), o.factors.end(),
               out.factors.begin());
    return out;
}

bool Monomial::divide(const Monomial& o, Monomial& quotient) const {
    quotient.factors.clear();
    size_t i = 0;
    for (VariableId v : factors) {
        if (i < o.factors.size() && o.factors[i] == v)
            ++i;
        else
            quotient.factors.push_back(v);
    }
    return i == o.factors.size();
}

bool Monomial::contains(VariableId v) const {
    return std::binary_search(factors.begin(), factors.end(), v);
}

Polynomial Polynomial::constant(const Rational& c) {
    Polynomial p;
    if (c != 0) p.terms.push_back({Monomial::one(), c});
    return p;
}

Polynomial Polynomial::variable(VariableId v) { return monomial(Monomial::var(v), 1); }

Polynomial Polynomial::monomial(const Monomial& m, const Rational& c) {
    Polynomial p;
    if (c != 0) p.terms.push_back({m, c});
    return p;
}

bool Polynomial::is_one() const {
    return terms.size() == 1 && terms[0].first.degree() == 0 && terms[0].second == 1;
}

int Polynomial::degree() const {
    int d = 0;
    for (const auto& [m, c] : terms) d = std::max(d, m.degree());
    return d;
}

Rational Polynomial::coeff(const Monomial& m) const {
    auto it = std::lower_bound(terms.begin(), terms.end(), m,
                               [](const auto& t, const Monomial& key) { return t.first < key; });
    if (it != terms.end() && it->first == m) return it->second;
    return 0;
}

std::set<VariableId> Polynomial::variables() const {
    std::set<VariableId> out;
    for (const auto& [m, c] : terms) out.insert(m.factors.begin(), m.factors.end());
    return out;
}

Polynomial Polynomial::scaled(const Rational& a) const {
    if (a == 0) return zero();
    Polynomial out = *this;
    for (auto& [m, c] : out.terms) c *= a;
    return out;
}

Polynomial Polynomial::add_scaled(const Polynomial& p, const Polynomial& q, const Rational& a,
                                  const Rational& b) {
    Polynomial out;
    out.terms.reserve(p.terms.size() + q.terms.size());
    size_t i = 0, j = 0;
    while (i < p.terms.size() || j < q.terms.size()) {
        if (j == q.terms.size() || (i < p.terms.size() && p.terms[i].first < q.terms[j].first)) {
            Rational c = p.terms[i].second * a;
            if (c != 0) out.terms.push_back({p.terms[i].first, c});
            ++i;
        } else if (i == p.terms.size() || q.terms[j].first < p.terms[i].first) {
            Rational c = q.terms[j].second * b;
            if (c != 0) out.terms.push_back({q.terms[j].first, c});
            ++j;
        } else {
            Rational c = p.terms[i].second * a + q.terms[j].second * b;
            if (c != 0) out.terms.push_back({p.terms[i].first, c});
            ++i;
            ++j;
        }
    }
    return out;
}

Polynomial Polynomial::mul_var(const Polynomial& p, VariableId x) {
    Polynomial out;
    out.terms.reserve(p.terms.size());
    for (const auto& [m, c] : p.terms) out.terms.push_back({m.times(x), c});
    std::sort(out.terms.begin(), out.terms.end(),
              [](const auto& l, const auto& r) { return l.first < r.first; });
    return out;
}

Polynomial Polynomial::mul(const Polynomial& p, const Polynomial& q) {
    std::map<Monomial, Rational> acc;
    for (const auto& [mp, cp] : p.terms)
        for (const auto& [mq, cq] : q.terms) acc[mp.times(mq)] += cp * cq;
    Polynomial out;
    for (auto& [m, c] : acc)
        if (c != 0) out.terms.push_back({m, c});
    return out;
}

std::string Polynomial::str() const {
    if (terms.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [m, c] : terms) {
        if (!first) out << " + ";
        out << rational_str(c);
        for (VariableId v : m.factors) out << " * " << v.str();
        first = false;
    }
    return out.str();
}

namespace {

VariableId parse_variable(const std::string& tok) {
    auto bad = [&]() -> void { throw std::runtime_error("bad variable token: " + tok); };
    if (tok.size() < 4 || tok.back() != ']') bad();
    if (tok[0] == 'e' && tok[1] == '[') {
        return VariableId::ext(std::stoi(tok.substr(2, tok.size() - 3)));
    }
    if (tok[0] == 'x' && tok[1] == '[') {
        auto comma = tok.find(',');
        if (comma == std::string::npos) bad();
        int v = std::stoi(tok.substr(2, comma - 2));
        int w = std::stoi(tok.substr(comma + 1, tok.size() - comma - 2));
        return VariableId::orig(v, w);
    }
    bad();
    return {};
}

}  // namespace

Polynomial parse_polynomial(const std::string& text) {
    std::istringstream in(text);
    std::string tok;
    Polynomial acc = Polynomial::zero();
    Monomial m;
    Rational c;
    bool in_term = false;
    auto flush = [&]() {
        if (in_term) acc = Polynomial::add_scaled(acc, Polynomial::monomial(m, c), 1, 1);
        m = Monomial::one();
        in_term = false;
    };
    while (in >> tok) {
        if (tok == "+") {
            flush();
        } else if (tok == "*") {
            continue;
        } else if (tok == "0" && !in_term) {
            continue;
        } else if (tok[0] == 'x' || tok[0] == 'e') {
            if (!in_term) throw std::runtime_error("variable before coefficient: " + tok);
            m = m.times(parse_variable(tok));
        } else {
            if (in_term) throw std::runtime_error("two coefficients in one term");
            c = parse_rational(tok);
            in_term = true;
        }
    }
    flush();
    return acc;
}

ExtensionDescriptor ExtensionDescriptor::pair(VariableId x, VariableId y) {
    ExtensionDescriptor d;
    d.kind = Kind::Pair;
    d.f = Polynomial::monomial(Monomial::var(x).times(y), 1);
    return d;
}

ExtensionDescriptor ExtensionDescriptor::scc(const std::vector<VariableId>& vars, long n) {
    ExtensionDescriptor d;
    d.kind = Kind::Scc;
    Rational c(1, n);
    c.canonicalize();
    Polynomial acc;
    for (VariableId v : vars) acc.terms.push_back({Monomial::var(v), c});
    std::sort(acc.terms.begin(), acc.terms.end(),
              [](const auto& l, const auto& r) { return l.first < r.first; });
    d.f = std::move(acc);
    return d;
}

ExtensionDescriptor ExtensionDescriptor::other(Polynomial f) {
    ExtensionDescriptor d;
    d.kind = Kind::Other;
    d.f = std::move(f);
    return d;
}

bool ExtensionDescriptor::restricted_form_ok() const {
    // f = X*Y
    if (f.terms.size() == 1 && f.terms[0].second == 1 && f.terms[0].first.degree() == 2)
        return true;
    // f = (1/n) * sum of n^2 distinct variables, n >= 1 integer
    if (f.terms.empty()) return false;
    const Rational& c = f.terms[0].second;
    if (c.get_num() != 1) return false;
    const mpz_class& n = c.get_den();
    if (mpz_class(n * n) != mpz_class(static_cast<long>(f.terms.size()))) return false;
    for (const auto& [m, cf] : f.terms)
        if (m.degree() != 1 || cf != c) return false;
    return true;  // monomials are distinct by canonical form
}

void Assignment::set(VariableId v, int value) { vals_[v] = value; }
bool Assignment::has(VariableId v) const { return vals_.count(v) != 0; }
int Assignment::get(VariableId v) const { return vals_.at(v); }

namespace {

Rational eval_var(VariableId v, const Assignment& assign,
                  const std::vector<ExtensionDescriptor>& ext_table,
                  std::map<int, Rational>& memo);

Rational eval_poly(const Polynomial& p, const Assignment& assign,
                   const std::vector<ExtensionDescriptor>& ext_table,
                   std::map<int, Rational>& memo) {
    Rational total = 0;
    for (const auto& [m, c] : p.terms) {
        Rational t = c;
        for (VariableId v : m.factors) t *= eval_var(v, assign, ext_table, memo);
        total += t;
    }
    return total;
}

Rational eval_var(VariableId v, const Assignment& assign,
                  const std::vector<ExtensionDescriptor>& ext_table,
                  std::map<int, Rational>& memo) {
    if (!v.is_ext()) {
        if (!assign.has(v)) throw DomainError("INCOMPLETE_ASSIGNMENT", v.str());
        return assign.get(v);
    }
    int k = v.ext_index();
    auto it = memo.find(k);
    if (it != memo.end()) return it->second;
    if (k < 0 || k >= static_cast<int>(ext_table.size()))
        throw DomainError("INCOMPLETE_ASSIGNMENT", "undefined extension " + v.str());
    Rational val = eval_poly(ext_table[static_cast<size_t>(k)].f, assign, ext_table, memo);
    memo[k] = val;
    return val;
}

}  // namespace

Rational evaluate(const Polynomial& p, const Assignment& assign,
                  const std::vector<ExtensionDescriptor>& ext_table) {
    std::map<int, Rational> memo;
    return eval_poly(p, assign, ext_table, memo);
}

// ---------------------------------------------------------------------------
// P_iso

bool local_isomorphism(const UnionStructure& gh, Vertex v, Vertex w, Vertex v2, Vertex w2) {
    if ((v == v2) != (w == w2)) return false;
    Vertex uv = gh.to_union(Side::Left, v);
    Vertex uv2 = gh.to_union(Side::Left, v2);
    Vertex uw = gh.to_union(Side::Right, w);
    Vertex uw2 = gh.to_union(Side::Right, w2);
    for (const auto& r : gh.s.relations) {
        if (r.contains(uv, uv2) != r.contains(uw, uw2)) return false;
        if (r.contains(uv2, uv) != r.contains(uw2, uw)) return false;
        if (r.contains(uv, uv) != r.contains(uw, uw)) return false;
        if (r.contains(uv2, uv2) != r.contains(uw2, uw2)) return false;
    }
    return true;
}

bool PisoSystem::var_exists(Vertex v, Vertex w) const {
    const auto& ps = partners_of_left[static_cast<size_t>(v)];
    return std::binary_search(ps.begin(), ps.end(), w);
}

int PisoSystem::row_index(Vertex w) const { return w; }
int PisoSystem::col_index(Vertex v) const {
    return static_cast<int>(partners_of_right.size()) + v;
}

PisoSystem piso(const UnionStructure& gh) {
    PisoSystem sys;
    const int nl = gh.left_size;
    const int nr = gh.right_size;
    // vertex colours = colour-flagged diagonal memberships
    auto color_of = [&](Vertex u) { return gh.s.vertex_color(u); };
    std::map<std::set<std::string>, std::pair<long, long>> census;
    std::vector<std::set<std::string>> lcol(static_cast<size_t>(nl)), rcol(static_cast<size_t>(nr));
    for (Vertex v = 0; v < nl; ++v) {
        lcol[static_cast<size_t>(v)] = color_of(gh.to_union(Side::Left, v));
        census[lcol[static_cast<size_t>(v)]].first++;
    }
    for (Vertex w = 0; w < nr; ++w) {
        rcol[static_cast<size_t>(w)] = color_of(gh.to_union(Side::Right, w));
        census[rcol[static_cast<size_t>(w)]].second++;
    }
    for (const auto& [c, cnt] : census)
        if (cnt.first != cnt.second) sys.color_count_mismatch = true;

    sys.partners_of_left.assign(static_cast<size_t>(nl), {});
    sys.partners_of_right.assign(static_cast<size_t>(nr), {});
    for (Vertex v = 0; v < nl; ++v)
        for (Vertex w = 0; w < nr; ++w)
            if (lcol[static_cast<size_t>(v)] == rcol[static_cast<size_t>(w)]) {
                sys.partners_of_left[static_cast<size_t>(v)].push_back(w);
                sys.partners_of_right[static_cast<size_t>(w)].push_back(v);
            }

    // rows: for all w in V(H)
    for (Vertex w = 0; w < nr; ++w) {
        Polynomial p = Polynomial::constant(-1);
        for (Vertex v : sys.partners_of_right[static_cast<size_t>(w)])
            p = Polynomial::add_scaled(p, Polynomial::variable(VariableId::orig(v, w)), 1, 1);
        sys.axioms.push_back({std::move(p), AxiomKind::Row, w});
    }
    // columns: for all v in V(G)
    for (Vertex v = 0; v < nl; ++v) {
        Polynomial p = Polynomial::constant(-1);
        for (Vertex w : sys.partners_of_left[static_cast<size_t>(v)])
            p = Polynomial::add_scaled(p, Polynomial::variable(VariableId::orig(v, w)), 1, 1);
        sys.axioms.push_back({std::move(p), AxiomKind::Col, v});
    }
    // locals: every same-colour pair-of-pairs failing local isomorphism,
    // deduplicated by the canonical monomial
    std::set<Monomial> locals;
    for (Vertex v = 0; v < nl; ++v)
        for (Vertex w : sys.partners_of_left[static_cast<size_t>(v)])
            for (Vertex v2 = 0; v2 < nl; ++v2)
                for (Vertex w2 : sys.partners_of_left[static_cast<size_t>(v2)]) {
                    if (local_isomorphism(gh, v, w, v2, w2)) continue;
                    locals.insert(
                        Monomial::var(VariableId::orig(v, w)).times(VariableId::orig(v2, w2)));
                }
    for (const Monomial& m : locals) {
        sys.local_idx_[m] = static_cast<int>(sys.axioms.size());
        sys.axioms.push_back({Polynomial::monomial(m, 1), AxiomKind::Local, -1});
    }
    return sys;
}

}  // namespace epciso
