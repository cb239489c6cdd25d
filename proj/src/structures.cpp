#include "epciso/structures.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <queue>
#include <sstream>

namespace epciso {

const Relation* Structure::find(const std::string& name) const {
    for (const auto& r : relations)
        if (r.name == name) return &r;
    return nullptr;
}

bool Structure::has(const std::string& name, Vertex u, Vertex v) const {
    const Relation* r = find(name);
    return r && r->contains(u, v);
}

std::set<std::string> Structure::vertex_color(Vertex v) const {
    std::set<std::string> out;
    for (const auto& r : relations)
        if (r.is_color && r.contains(v, v)) out.insert(r.name);
    return out;
}

std::set<std::string> Structure::diagonal_type(Vertex v) const {
    std::set<std::string> out;
    for (const auto& r : relations)
        if (r.contains(v, v)) out.insert(r.name);
    return out;
}

bool Structure::is_connected() const {
    if (n <= 1) return n == 1;
    std::vector<std::vector<Vertex>> adj(static_cast<size_t>(n));
    for (const auto& r : relations)
        for (auto [u, v] : r.pairs)
            if (u != v) {
                adj[static_cast<size_t>(u)].push_back(v);
                adj[static_cast<size_t>(v)].push_back(u);
            }
    std::vector<char> seen(static_cast<size_t>(n), 0);
    std::queue<Vertex> q;
    q.push(0);
    seen[0] = 1;
    int cnt = 1;
    while (!q.empty()) {
        Vertex u = q.front();
        q.pop();
        for (Vertex w : adj[static_cast<size_t>(u)])
            if (!seen[static_cast<size_t>(w)]) {
                seen[static_cast<size_t>(w)] = 1;
                ++cnt;
                q.push(w);
            }
    }
    return cnt == n;
}

static bool valid_relation_name(const std::string& name) {
    if (name.empty()) return false;
    for (char c : name)
        if (c <= ' ' || c > '~' || c == ',') return false;
    return true;
}

void Structure::validate() const {
    if (n < 1) throw DomainError("VALIDATION_ERROR", "universe must be non-empty");
    std::set<std::string> names;
    for (const auto& r : relations) {
        if (!valid_relation_name(r.name))
            throw DomainError("VALIDATION_ERROR", "bad relation name '" + r.name + "'");
        if (!names.insert(r.name).second)
            throw DomainError("VALIDATION_ERROR", "duplicate relation name '" + r.name + "'");
        for (auto [u, v] : r.pairs) {
            if (u < 0 || u >= n || v < 0 || v >= n)
                throw DomainError("VALIDATION_ERROR",
                                  "pair out of range in relation '" + r.name + "'");
            if (r.is_color && u != v)
                throw DomainError("VALIDATION_ERROR",
                                  "colour relation '" + r.name + "' is not diagonal");
        }
    }
    for (size_t i = 1; i < relations.size(); ++i)
        if (!(relations[i - 1].name < relations[i].name))
            throw DomainError("VALIDATION_ERROR", "relations not sorted by name");
}

// Input files must colour every vertex exactly once when colours are present;
// evolved structures may carry several colour marks per vertex.
void validate_color_partition(const Structure& s) {
    std::set<Vertex> colored;
    bool any_color = false;
    for (const auto& r : s.relations) {
        if (!r.is_color) continue;
        any_color = true;
        for (auto [u, v] : r.pairs) {
            (void)v;
            if (!colored.insert(u).second)
                throw DomainError("VALIDATION_ERROR",
                                  "vertex " + std::to_string(u) + " has two colours");
        }
    }
    if (any_color && static_cast<int>(colored.size()) != s.n)
        throw DomainError("VALIDATION_ERROR", "colour relations do not cover the diagonal");
}

std::string Structure::serialize() const {
    std::ostringstream out;
    out << "structure n=" << n << "\n";
    for (const auto& r : relations) {
        out << "rel " << r.name;
        if (r.is_color) out << " color";
        out << "\n";
        for (auto [u, v] : r.pairs) out << u << " " << v << "\n";
        out << "\n";
    }
    return out.str();
}

Structure parse_structure(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) -> void {
        throw DomainError("PARSE_ERROR", "line " + std::to_string(lineno) + ": " + msg);
    };

    Structure s;
    bool have_header = false;
    Relation* cur = nullptr;
    std::vector<Relation> rels;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            cur = nullptr;
            continue;
        }
        if (line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (!have_header) {
            if (tok != "structure") fail("expected 'structure n=<int>' header");
            std::string nspec;
            ls >> nspec;
            if (nspec.rfind("n=", 0) != 0) fail("expected n=<int>");
            try {
                s.n = std::stoi(nspec.substr(2));
            } catch (...) {
                fail("bad vertex count");
            }
            have_header = true;
            continue;
        }
        if (tok == "rel") {
            std::string name, flag;
            ls >> name;
            if (name.empty()) fail("missing relation name");
            if (!valid_relation_name(name)) fail("bad relation name '" + name + "'");
            Relation r;
            r.name = name;
            if (ls >> flag) {
                if (flag != "color") fail("unknown relation flag '" + flag + "'");
                r.is_color = true;
            }
            rels.push_back(std::move(r));
            cur = &rels.back();
            continue;
        }
        // vertex pair line
        if (cur == nullptr) fail("pair line outside a relation block");
        Vertex u, v;
        std::istringstream ps(line);
        if (!(ps >> u >> v)) fail("expected '<u> <v>'");
        std::string extra;
        if (ps >> extra) fail("trailing tokens after pair");
        if (u < 0 || u >= s.n || v < 0 || v >= s.n) fail("vertex out of range");
        cur->pairs.insert({u, v});
    }
    if (!have_header) throw DomainError("PARSE_ERROR", "missing 'structure' header");
    std::sort(rels.begin(), rels.end(),
              [](const Relation& a, const Relation& b) { return a.name < b.name; });
    s.relations = std::move(rels);
    s.validate();
    validate_color_partition(s);
    return s;
}

Structure parse_structure_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("PARSE_ERROR", "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_structure(buf.str());
}

Structure UnionStructure::extract(Side sd) const {
    Structure out;
    out.n = side_size(sd);
    int shift = sd == Side::Left ? 0 : left_size;
    for (const auto& r : s.relations) {
        Relation nr;
        nr.name = r.name;
        nr.is_color = r.is_color;
        for (auto [u, v] : r.pairs) {
            if (side[static_cast<size_t>(u)] != sd || side[static_cast<size_t>(v)] != sd) continue;
            nr.pairs.insert({u - shift, v - shift});
        }
        out.relations.push_back(std::move(nr));
    }
    return out;
}

void UnionStructure::validate() const {
    s.validate();
    if (static_cast<int>(side.size()) != s.n || left_size + right_size != s.n)
        throw DomainError("VALIDATION_ERROR", "side tags inconsistent with universe");
    for (const auto& r : s.relations)
        for (auto [u, v] : r.pairs)
            if (side[static_cast<size_t>(u)] != side[static_cast<size_t>(v)])
                throw DomainError("VALIDATION_ERROR",
                                  "relation '" + r.name + "' crosses sides");
    if (!extract(Side::Left).is_connected())
        throw DomainError("NOT_CONNECTED", "left side is not connected");
    if (!extract(Side::Right).is_connected())
        throw DomainError("NOT_CONNECTED", "right side is not connected");
}

UnionStructure disjoint_union(const Structure& left, const Structure& right) {
    if (left.relations.size() != right.relations.size())
        throw DomainError("VOCAB_MISMATCH", "vocabularies differ in size");
    for (size_t i = 0; i < left.relations.size(); ++i) {
        if (left.relations[i].name != right.relations[i].name ||
            left.relations[i].is_color != right.relations[i].is_color)
            throw DomainError("VOCAB_MISMATCH",
                              "relation '" + left.relations[i].name + "' mismatched");
    }
    if (!left.is_connected()) throw DomainError("NOT_CONNECTED", "left");
    if (!right.is_connected()) throw DomainError("NOT_CONNECTED", "right");

    UnionStructure u;
    u.left_size = left.n;
    u.right_size = right.n;
    u.s.n = left.n + right.n;
    u.side.assign(static_cast<size_t>(u.s.n), Side::Left);
    for (int v = left.n; v < u.s.n; ++v) u.side[static_cast<size_t>(v)] = Side::Right;
    for (size_t i = 0; i < left.relations.size(); ++i) {
        Relation r;
        r.name = left.relations[i].name;
        r.is_color = left.relations[i].is_color;
        r.pairs = left.relations[i].pairs;
        for (auto [a, b] : right.relations[i].pairs) r.pairs.insert({a + left.n, b + left.n});
        u.s.relations.push_back(std::move(r));
    }
    u.validate();
    return u;
}

// ---------------------------------------------------------------------------
// CFI construction

namespace {

struct CfiLayout {
    // base data
    std::vector<std::pair<int, int>> edges;              // sorted, u < v
    std::vector<std::vector<int>> incident;              // vertex -> edge indices (sorted)
    // gadget vertices
    // middle vertex for base vertex v and even subset S of incident(v)
    std::map<std::pair<int, unsigned>, Vertex> middle;   // (v, subset mask) -> id
    // exit vertices: (edge index, endpoint 0/1, a=0/b=1) -> id
    std::map<std::tuple<int, int, int>, Vertex> exit;
    int total = 0;
};

CfiLayout cfi_layout(const Structure& base) {
    const Relation* e = nullptr;
    int nonColor = 0;
    for (const auto& r : base.relations)
        if (!r.is_color) {
            ++nonColor;
            e = &r;
        }
    if (nonColor != 1)
        throw DomainError("VALIDATION_ERROR", "CFI base needs exactly one edge relation");
    CfiLayout L;
    for (auto [u, v] : e->pairs) {
        if (u == v) throw DomainError("VALIDATION_ERROR", "CFI base has a loop");
        if (!e->contains(v, u))
            throw DomainError("VALIDATION_ERROR", "CFI base edge relation is not symmetric");
        if (u < v) L.edges.push_back({u, v});
    }
    std::sort(L.edges.begin(), L.edges.end());
    if (!base.is_connected()) throw DomainError("BASE_NOT_CONNECTED", "CFI base");
    L.incident.assign(static_cast<size_t>(base.n), {});
    for (size_t ei = 0; ei < L.edges.size(); ++ei) {
        L.incident[static_cast<size_t>(L.edges[ei].first)].push_back(static_cast<int>(ei));
        L.incident[static_cast<size_t>(L.edges[ei].second)].push_back(static_cast<int>(ei));
    }
    int id = 0;
    for (int v = 0; v < base.n; ++v) {
        unsigned deg = static_cast<unsigned>(L.incident[static_cast<size_t>(v)].size());
        for (unsigned mask = 0; mask < (1u << deg); ++mask)
            if (__builtin_popcount(mask) % 2 == 0) L.middle[{v, mask}] = id++;
    }
    for (size_t ei = 0; ei < L.edges.size(); ++ei)
        for (int end = 0; end < 2; ++end)
            for (int ab = 0; ab < 2; ++ab) L.exit[{static_cast<int>(ei), end, ab}] = id++;
    L.total = id;
    return L;
}

Structure build_cfi(const Structure& base, const CfiLayout& L, bool twist_least_edge, bool ordered) {
    Structure g;
    g.n = L.total;
    Relation E;
    E.name = "E";
    auto add_sym = [&](Vertex a, Vertex b) {
        E.pairs.insert({a, b});
        E.pairs.insert({b, a});
    };
    // middles to exits within a vertex gadget
    for (const auto& [key, mid] : L.middle) {
        auto [v, mask] = key;
        const auto& inc = L.incident[static_cast<size_t>(v)];
        for (size_t k = 0; k < inc.size(); ++k) {
            int ei = inc[k];
            int end = L.edges[static_cast<size_t>(ei)].first == v ? 0 : 1;
            int ab = (mask >> k) & 1u ? 0 : 1;  // e in S -> a-exit, else b-exit
            add_sym(mid, L.exit.at({ei, end, ab}));
        }
    }
    // exit links across each edge; twisted on the lexicographically least edge
    for (size_t ei = 0; ei < L.edges.size(); ++ei) {
        bool tw = twist_least_edge && ei == 0;
        for (int ab = 0; ab < 2; ++ab) {
            int other = tw ? 1 - ab : ab;
            add_sym(L.exit.at({static_cast<int>(ei), 0, ab}),
                    L.exit.at({static_cast<int>(ei), 1, other}));
        }
    }
    g.relations.push_back(std::move(E));

    auto gadget_name = [&](int gi) {
        std::string d = std::to_string(gi);
        return "C" + std::string(4 - std::min<size_t>(4, d.size()), '0') + d;
    };
    // one colour class per vertex gadget, then per edge gadget
    std::vector<int> gadget_of(static_cast<size_t>(L.total), -1);
    for (const auto& [key, mid] : L.middle) gadget_of[static_cast<size_t>(mid)] = key.first;
    for (const auto& [key, ex] : L.exit)
        gadget_of[static_cast<size_t>(ex)] = base.n + std::get<0>(key);
    int gadgets = base.n + static_cast<int>(L.edges.size());
    for (int gi = 0; gi < gadgets; ++gi) {
        Relation c;
        c.name = gadget_name(gi);
        c.is_color = true;
        for (Vertex x = 0; x < L.total; ++x)
            if (gadget_of[static_cast<size_t>(x)] == gi) c.pairs.insert({x, x});
        g.relations.push_back(std::move(c));
    }
    if (ordered) {
        Relation pre;
        pre.name = "P";
        for (Vertex x = 0; x < L.total; ++x)
            for (Vertex y = 0; y < L.total; ++y)
                if (gadget_of[static_cast<size_t>(x)] <= gadget_of[static_cast<size_t>(y)])
                    pre.pairs.insert({x, y});
        g.relations.push_back(std::move(pre));
    }
    std::sort(g.relations.begin(), g.relations.end(),
              [](const Relation& a, const Relation& b) { return a.name < b.name; });
    g.validate();
    return g;
}

}  // namespace

std::pair<Structure, Structure> cfi_pair(const Structure& base, bool twisted, bool ordered) {
    base.validate();
    if (!base.is_connected()) throw DomainError("BASE_NOT_CONNECTED", "CFI base");
    CfiLayout L = cfi_layout(base);
    Structure a = build_cfi(base, L, false, ordered);
    Structure b = build_cfi(base, L, twisted && !L.edges.empty(), ordered);
    return {a, b};
}

// ---------------------------------------------------------------------------
// Brute-force colour-preserving isomorphism (test oracle)

std::optional<std::vector<Vertex>> find_isomorphism(const Structure& a, const Structure& b) {
    if (a.n != b.n) return std::nullopt;
    if (a.relations.size() != b.relations.size()) return std::nullopt;
    for (size_t i = 0; i < a.relations.size(); ++i) {
        const auto& ra = a.relations[i];
        const auto& rb = b.relations[i];
        if (ra.name != rb.name || ra.is_color != rb.is_color ||
            ra.pairs.size() != rb.pairs.size())
            return std::nullopt;
    }
    size_t n = static_cast<size_t>(a.n);
    // candidate sets by diagonal type
    std::map<std::set<std::string>, std::vector<Vertex>> classes_b;
    for (Vertex v = 0; v < b.n; ++v) classes_b[b.diagonal_type(v)].push_back(v);
    std::vector<std::vector<Vertex>> cand(n);
    for (Vertex v = 0; v < a.n; ++v) {
        auto it = classes_b.find(a.diagonal_type(v));
        if (it == classes_b.end()) return std::nullopt;
        cand[static_cast<size_t>(v)] = it->second;
    }
    // order: BFS over a's relation graph so placed vertices constrain early
    std::vector<Vertex> order;
    {
        std::vector<std::vector<Vertex>> adj(n);
        for (const auto& r : a.relations)
            for (auto [u, v] : r.pairs)
                if (u != v) {
                    adj[static_cast<size_t>(u)].push_back(v);
                    adj[static_cast<size_t>(v)].push_back(u);
                }
        std::vector<char> seen(n, 0);
        for (Vertex s = 0; s < a.n; ++s) {
            if (seen[static_cast<size_t>(s)]) continue;
            std::queue<Vertex> q;
            q.push(s);
            seen[static_cast<size_t>(s)] = 1;
            while (!q.empty()) {
                Vertex u = q.front();
                q.pop();
                order.push_back(u);
                for (Vertex w : adj[static_cast<size_t>(u)])
                    if (!seen[static_cast<size_t>(w)]) {
                        seen[static_cast<size_t>(w)] = 1;
                        q.push(w);
                    }
            }
        }
    }
    std::vector<Vertex> map(n, -1), used(n, 0);
    std::function<bool(size_t)> go = [&](size_t k) -> bool {
        if (k == n) return true;
        Vertex u = order[k];
        for (Vertex w : cand[static_cast<size_t>(u)]) {
            if (used[static_cast<size_t>(w)]) continue;
            bool ok = true;
            for (const auto& r : a.relations) {
                if (!ok) break;
                const Relation* rb = b.find(r.name);
                for (size_t j = 0; j < k && ok; ++j) {
                    Vertex p = order[j];
                    Vertex q = map[static_cast<size_t>(p)];
                    if (r.contains(u, p) != rb->contains(w, q)) ok = false;
                    if (ok && r.contains(p, u) != rb->contains(q, w)) ok = false;
                }
                if (ok && r.contains(u, u) != rb->contains(w, w)) ok = false;
            }
            if (!ok) continue;
            map[static_cast<size_t>(u)] = w;
            used[static_cast<size_t>(w)] = 1;
            if (go(k + 1)) return true;
            map[static_cast<size_t>(u)] = -1;
            used[static_cast<size_t>(w)] = 0;
        }
        return false;
    };
    if (!go(0)) return std::nullopt;
    return map;
}

}  // namespace epciso
