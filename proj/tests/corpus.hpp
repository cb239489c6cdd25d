#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "epciso/structures.hpp"

namespace epciso::corpus {

// plain undirected graph from an edge list
inline Structure graph(int n, std::initializer_list<std::pair<int, int>> edges) {
    Structure s;
    s.n = n;
    Relation e;
    e.name = "E";
    for (auto [u, v] : edges) {
        e.pairs.insert({u, v});
        e.pairs.insert({v, u});
    }
    s.relations.push_back(std::move(e));
    s.validate();
    return s;
}

inline Structure k(int n) {
    Structure s;
    s.n = n;
    Relation e;
    e.name = "E";
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (u != v) e.pairs.insert({u, v});
    s.relations.push_back(std::move(e));
    return s;
}

inline Structure cycle(int n) {
    Structure s;
    s.n = n;
    Relation e;
    e.name = "E";
    for (int u = 0; u < n; ++u) {
        e.pairs.insert({u, (u + 1) % n});
        e.pairs.insert({(u + 1) % n, u});
    }
    s.relations.push_back(std::move(e));
    return s;
}

inline Structure path(int n) {
    Structure s;
    s.n = n;
    Relation e;
    e.name = "E";
    for (int u = 0; u + 1 < n; ++u) {
        e.pairs.insert({u, u + 1});
        e.pairs.insert({u + 1, u});
    }
    s.relations.push_back(std::move(e));
    return s;
}

inline Structure star(int leaves) {
    Structure s;
    s.n = leaves + 1;
    Relation e;
    e.name = "E";
    for (int u = 1; u <= leaves; ++u) {
        e.pairs.insert({0, u});
        e.pairs.insert({u, 0});
    }
    s.relations.push_back(std::move(e));
    return s;
}

// triangular prism: two triangles plus a perfect matching
inline Structure prism() {
    return graph(6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}, {0, 3}, {1, 4}, {2, 5}});
}

inline Structure k33() {
    return graph(6, {{0, 3}, {0, 4}, {0, 5}, {1, 3}, {1, 4}, {1, 5}, {2, 3}, {2, 4}, {2, 5}});
}

inline Structure complete_bipartite(int a, int b) {
    Structure s;
    s.n = a + b;
    Relation e;
    e.name = "E";
    for (int u = 0; u < a; ++u)
        for (int v = a; v < a + b; ++v) {
            e.pairs.insert({u, v});
            e.pairs.insert({v, u});
        }
    s.relations.push_back(std::move(e));
    return s;
}

inline Structure directed_cycle(int n) {
    Structure s;
    s.n = n;
    Relation e;
    e.name = "E";
    for (int u = 0; u < n; ++u) e.pairs.insert({u, (u + 1) % n});
    s.relations.push_back(std::move(e));
    return s;
}

inline Structure directed_path(int n) {
    Structure s;
    s.n = n;
    Relation e;
    e.name = "E";
    for (int u = 0; u + 1 < n; ++u) e.pairs.insert({u, u + 1});
    s.relations.push_back(std::move(e));
    return s;
}

// 4x4 rook's graph: same row or same column
inline Structure rook4() {
    Structure s;
    s.n = 16;
    Relation e;
    e.name = "E";
    auto id = [](int r, int c) { return r * 4 + c; };
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            for (int r2 = 0; r2 < 4; ++r2)
                for (int c2 = 0; c2 < 4; ++c2) {
                    if ((r == r2) == (c == c2)) continue;
                    e.pairs.insert({id(r, c), id(r2, c2)});
                }
    s.relations.push_back(std::move(e));
    return s;
}

// Shrikhande graph: Cayley graph on Z4 x Z4 with +-(1,0), +-(0,1), +-(1,1)
inline Structure shrikhande() {
    Structure s;
    s.n = 16;
    Relation e;
    e.name = "E";
    auto id = [](int a, int b) { return ((a % 4 + 4) % 4) * 4 + ((b % 4 + 4) % 4); };
    int gens[3][2] = {{1, 0}, {0, 1}, {1, 1}};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (auto& g : gens)
                for (int sgn : {1, -1}) {
                    e.pairs.insert({id(a, b), id(a + sgn * g[0], b + sgn * g[1])});
                    e.pairs.insert({id(a + sgn * g[0], b + sgn * g[1]), id(a, b)});
                }
    s.relations.push_back(std::move(e));
    return s;
}

// random connected structure: n vertices, up to `max_rels` relations
// (optionally one colour partition), seeded and deterministic
inline Structure random_connected(std::mt19937& rng, int max_n = 8, int max_rels = 3) {
    std::uniform_int_distribution<int> nd(1, max_n);
    int n = nd(rng);
    Structure s;
    s.n = n;
    std::uniform_int_distribution<int> rd(1, max_rels);
    int nrels = rd(rng);
    bool use_colors = nrels > 1 && std::uniform_int_distribution<int>(0, 3)(rng) == 0;
    int edge_rels = use_colors ? nrels - 1 : nrels;
    std::uniform_real_distribution<double> pd(0.15, 0.7);
    for (int r = 0; r < edge_rels; ++r) {
        Relation rel;
        rel.name = std::string("R") + std::to_string(r);
        double p = pd(rng);
        bool symmetric = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
        std::bernoulli_distribution coin(p);
        for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v) {
                if (u == v && std::uniform_int_distribution<int>(0, 7)(rng) != 0) continue;
                if (u <= v && coin(rng)) {
                    rel.pairs.insert({u, v});
                    if (symmetric && u != v) rel.pairs.insert({v, u});
                }
            }
        s.relations.push_back(std::move(rel));
    }
    // spanning path in relation R0 keeps it connected
    for (int u = 0; u + 1 < n; ++u) {
        s.relations[0].pairs.insert({u, u + 1});
        s.relations[0].pairs.insert({u + 1, u});
    }
    if (use_colors) {
        std::uniform_int_distribution<int> cd(0, 1);
        Relation c0, c1;
        c0.name = "Ca";
        c0.is_color = true;
        c1.name = "Cb";
        c1.is_color = true;
        for (int u = 0; u < n; ++u) (cd(rng) == 0 ? c0 : c1).pairs.insert({u, u});
        if (!c0.pairs.empty()) s.relations.push_back(std::move(c0));
        if (!c1.pairs.empty()) s.relations.push_back(std::move(c1));
    }
    std::sort(s.relations.begin(), s.relations.end(),
              [](const Relation& a, const Relation& b) { return a.name < b.name; });
    s.validate();
    return s;
}

// relabel by a random permutation (isomorphic copy)
inline Structure permute(const Structure& s, std::mt19937& rng, std::vector<Vertex>* perm_out = nullptr) {
    std::vector<Vertex> perm(static_cast<size_t>(s.n));
    for (int i = 0; i < s.n; ++i) perm[static_cast<size_t>(i)] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    Structure out;
    out.n = s.n;
    for (const auto& r : s.relations) {
        Relation nr;
        nr.name = r.name;
        nr.is_color = r.is_color;
        for (auto [u, v] : r.pairs)
            nr.pairs.insert({perm[static_cast<size_t>(u)], perm[static_cast<size_t>(v)]});
        out.relations.push_back(std::move(nr));
    }
    if (perm_out) *perm_out = perm;
    return out;
}

}  // namespace epciso::corpus
