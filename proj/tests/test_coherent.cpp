#include <doctest.h>

#include <map>

#include "corpus.hpp"
#include "epciso/coherent.hpp"

using namespace epciso;

namespace {

// Independent naive refinement: start from full atomic types, split classes
// by complete recount tables each round. O(n^4 |sigma|^2)-ish per round.
std::vector<int> naive_stable_partition(const Structure& s, const std::vector<Side>* side) {
    int n = s.n;
    auto idx = [n](Vertex u, Vertex v) { return static_cast<size_t>(u) * n + v; };
    std::vector<std::vector<long>> key(static_cast<size_t>(n) * n);
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = 0; v < n; ++v) {
            std::vector<long>& k = key[idx(u, v)];
            k.push_back(u == v ? 1 : 0);
            k.push_back(side && (*side)[static_cast<size_t>(u)] != (*side)[static_cast<size_t>(v)] ? 1 : 0);
            for (const auto& r : s.relations) k.push_back(r.contains(u, v) ? 1 : 0);
            for (const auto& r : s.relations) k.push_back(r.contains(v, u) ? 1 : 0);
        }
    std::vector<int> part(static_cast<size_t>(n) * n);
    for (;;) {
        std::map<std::vector<long>, int> groups;
        for (size_t p = 0; p < key.size(); ++p) {
            auto [it, fresh] = groups.emplace(key[p], static_cast<int>(groups.size()));
            (void)fresh;
            part[p] = it->second;
        }
        std::vector<std::vector<long>> nk(key.size());
        for (Vertex u = 0; u < n; ++u)
            for (Vertex v = 0; v < n; ++v) {
                std::map<std::pair<int, int>, long> cnt;
                for (Vertex x = 0; x < n; ++x) ++cnt[{part[idx(u, x)], part[idx(x, v)]}];
                std::vector<long>& k = nk[idx(u, v)];
                k.push_back(part[idx(u, v)]);
                for (const auto& [ab, c] : cnt) {
                    k.push_back(ab.first);
                    k.push_back(ab.second);
                    k.push_back(c);
                }
            }
        std::map<std::vector<long>, int> ngroups;
        for (size_t p = 0; p < key.size(); ++p)
            ngroups.emplace(nk[p], static_cast<int>(ngroups.size()));
        if (ngroups.size() == groups.size()) return part;
        key = std::move(nk);
    }
}

bool same_partition(const std::vector<int>& a, const std::vector<ColorId>& b) {
    REQUIRE(a.size() == b.size());
    std::map<int, ColorId> fwd;
    std::map<ColorId, int> bwd;
    for (size_t i = 0; i < a.size(); ++i) {
        auto f = fwd.emplace(a[i], b[i]);
        if (!f.second && f.first->second != b[i]) return false;
        auto g = bwd.emplace(b[i], a[i]);
        if (!g.second && g.first->second != a[i]) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("K1 refines to a single diagonal colour in one layer") {
    ColorHistory h = refine(corpus::k(1));
    CHECK(h.layers.size() == 1);
    CHECK(h.stable().num_colors == 1);
    CHECK(h.is_diagonal(0));
}

TEST_CASE("C5 stable colouring has diag, distance-1, distance-2") {
    ColorHistory h = refine(corpus::cycle(5));
    CHECK(h.stable().num_colors == 3);
    int diag = 0;
    for (ColorId c = 0; c < 3; ++c)
        if (h.is_diagonal(c)) ++diag;
    CHECK(diag == 1);
    // all vertices share one diagonal colour (vertex-transitive)
    CHECK(h.stable_color(0, 0) == h.stable_color(3, 3));
}

TEST_CASE("sketch of K1 and K2") {
    AlgebraicSketch s1 = sketch(refine(corpus::k(1)));
    CHECK(s1.num_colors == 1);
    CHECK(s1.q.at({0, 0, 0}) == 1);

    ColorHistory h2 = refine(corpus::k(2));
    AlgebraicSketch s2 = sketch(h2);
    ColorId edge = h2.stable_color(0, 1);
    ColorId diag = h2.stable_color(0, 0);
    CHECK(s2.q.count({edge, edge, edge}) == 0);  // no triangles in K2
    CHECK(s2.q.at({edge, edge, diag}) == 1);
}

TEST_CASE("canonical sketches are invariant under relabeling") {
    std::mt19937 rng(31);
    for (int i = 0; i < 25; ++i) {
        Structure s = corpus::random_connected(rng, 7);
        Structure t = corpus::permute(s, rng);
        CHECK(sketch(refine(s)).serialize() == sketch(refine(t)).serialize());
    }
    Structure c5 = corpus::cycle(5);
    Structure c5p = corpus::permute(c5, rng);
    CHECK(sketch(refine(c5)).serialize() == sketch(refine(c5p)).serialize());
}

TEST_CASE("refinement equals the naive recount oracle") {
    std::mt19937 rng(37);
    for (int i = 0; i < 40; ++i) {
        Structure s = corpus::random_connected(rng, 7);
        ColorHistory h = refine(s);
        CHECK(same_partition(naive_stable_partition(s, nullptr), h.stable().color));
    }
    for (int i = 0; i < 15; ++i) {
        Structure a = corpus::random_connected(rng, 5, 1);
        Structure b = corpus::random_connected(rng, 5, 1);
        UnionStructure u = disjoint_union(a, b);
        ColorHistory h = refine(u);
        CHECK(same_partition(naive_stable_partition(u.s, &u.side), h.stable().color));
    }
}

TEST_CASE("refinement stabilizes within n^2 layers and strictly refines") {
    std::mt19937 rng(41);
    for (int i = 0; i < 20; ++i) {
        Structure s = corpus::random_connected(rng, 8);
        ColorHistory h = refine(s);
        CHECK(static_cast<int>(h.layers.size()) <= s.n * s.n + 1);
        for (size_t l = 1; l < h.layers.size(); ++l) {
            CHECK(h.layers[l].num_colors > h.layers[l - 1].num_colors);
            for (ColorId c = 0; c < h.layers[l].num_colors; ++c)
                CHECK(h.layers[l].parent[static_cast<size_t>(c)] >= 0);
        }
    }
}

TEST_CASE("parallel refinement matches sequential") {
    Structure s = corpus::prism();
    CHECK(sketch(refine(s, 4)).serialize() == sketch(refine(s, 1)).serialize());
    UnionStructure u = disjoint_union(corpus::prism(), corpus::k33());
    CHECK(sketch(refine(u, 4)).serialize() == sketch(refine(u, 1)).serialize());
}

TEST_CASE("first separation: prism vs K33") {
    UnionStructure u = disjoint_union(corpus::prism(), corpus::k33());
    ColorHistory h = refine(u);

    CHECK(!first_separation(h, {0, 1}, {0, 1}).has_value());

    // triangle edge of the prism vs any K33 edge: separated at iteration 1 by
    // the (edge, edge) witness counting the common neighbour
    auto w = first_separation(h, {0, 1}, {6, 9});
    REQUIRE(w.has_value());
    CHECK(w->iteration == 1);
    ColorId edge0 = h.color_at(0, 0, 1);
    CHECK(w->s1 == edge0);
    CHECK(w->s2 == edge0);
    CHECK(w->count1 == 1);
    CHECK(w->count2 == 0);

    // diagonal vs non-diagonal separates at layer 0
    auto d = first_separation(h, {0, 0}, {6, 9});
    REQUIRE(d.has_value());
    CHECK(d->iteration == 0);
}

TEST_CASE("triangle counts separate the prism's edge colours from K33's") {
    // q(edge,edge,edge) counts common neighbours: 1 on a prism triangle edge,
    // 0 on every K33 edge
    ColorHistory hp = refine(corpus::prism());
    AlgebraicSketch sp = sketch(hp);
    ColorId tri = hp.stable_color(0, 1);
    CHECK(sp.q.at({tri, tri, tri}) == 1);
    ColorHistory hk = refine(corpus::k33());
    AlgebraicSketch sk = sketch(hk);
    ColorId ke = hk.stable_color(0, 3);
    CHECK(sk.q.count({ke, ke, ke}) == 0);
}

TEST_CASE("restrict_sketch") {
    UnionStructure c55 = disjoint_union(corpus::cycle(5), corpus::cycle(5));
    ColorHistory h = refine(c55);
    CHECK(restrict_sketch(h, Side::Left).serialize() == restrict_sketch(h, Side::Right).serialize());

    UnionStructure pk = disjoint_union(corpus::prism(), corpus::k33());
    ColorHistory h2 = refine(pk);
    CHECK(restrict_sketch(h2, Side::Left).serialize() !=
          restrict_sketch(h2, Side::Right).serialize());

    UnionStructure k22 = disjoint_union(corpus::k(2), corpus::k(2));
    ColorHistory h3 = refine(k22);
    CHECK(restrict_sketch(h3, Side::Left).serialize() == sketch(refine(corpus::k(2))).serialize());
}

TEST_CASE("union restriction equals the standalone sketch") {
    std::mt19937 rng(43);
    int done = 0;
    while (done < 20) {
        Structure a = corpus::random_connected(rng, 8, 1);
        Structure b = corpus::random_connected(rng, 8, 1);
        ++done;
        UnionStructure u = disjoint_union(a, b);
        ColorHistory h = refine(u);
        // restrict_sketch validates the partition agreement internally
        CHECK(restrict_sketch(h, Side::Left).serialize() == sketch(refine(a)).serialize());
        CHECK(restrict_sketch(h, Side::Right).serialize() == sketch(refine(b)).serialize());
    }
}

TEST_CASE("sccs of stable colours") {
    ColorHistory k2 = refine(corpus::k(2));
    auto sccs = sccs_of_color(k2, k2.stable_color(0, 0));
    REQUIRE(sccs.size() == 2);  // two diagonal self-loops
    CHECK(sccs[0] == std::vector<Vertex>{0});
    CHECK(sccs[1] == std::vector<Vertex>{1});

    ColorHistory c3 = refine(corpus::directed_cycle(3));
    auto cyc = sccs_of_color(c3, c3.stable_color(0, 1));
    REQUIRE(cyc.size() == 1);
    CHECK(cyc[0] == std::vector<Vertex>{0, 1, 2});

    ColorHistory p3 = refine(corpus::directed_path(3));
    CHECK(sccs_of_color(p3, p3.stable_color(0, 1)).empty());
}

TEST_CASE("validator passes on refinement output") {
    CHECK(validate_configuration(refine(corpus::k(1))).all_pass());
    std::mt19937 rng(47);
    for (int i = 0; i < 30; ++i) {
        Structure s = corpus::random_connected(rng, 8);
        ValidationReport rep = validate_configuration(refine(s));
        CAPTURE(rep.to_string());
        CHECK(rep.all_pass());
    }
}

TEST_CASE("validator flags a corrupted colouring") {
    // merging the prism's two edge colours breaks the intersection counts
    // (triangle edges have a common neighbour, matching edges do not)
    ColorHistory h = refine(corpus::prism());
    REQUIRE(h.stable().num_colors == 4);
    Layer& st = h.layers.back();
    ColorId a = h.stable_color(0, 1), b = h.stable_color(0, 3);
    if (a > b) std::swap(a, b);
    for (auto& c : st.color)
        if (c == b) c = a;
    for (auto& c : st.color)
        if (c > b) --c;
    st.num_colors--;
    st.is_diag.erase(st.is_diag.begin() + b);
    st.is_cross.erase(st.is_cross.begin() + b);
    st.parent.erase(st.parent.begin() + b);
    h.converse.assign(static_cast<size_t>(st.num_colors), -1);
    for (Vertex u = 0; u < h.n; ++u)
        for (Vertex v = 0; v < h.n; ++v)
            h.converse[static_cast<size_t>(h.stable_color(u, v))] = h.stable_color(v, u);
    ValidationReport rep = validate_configuration(h);
    CHECK(!rep.all_pass());
    bool intersection_failed = false;
    for (const auto& c : rep.checks)
        if (c.name == "intersection-numbers" && !c.pass) intersection_failed = true;
    CHECK(intersection_failed);
}

TEST_CASE("union layer invariants: crossing separation and endpoint colours") {
    std::mt19937 rng(53);
    for (int i = 0; i < 15; ++i) {
        Structure a = corpus::random_connected(rng, 6, 1);
        Structure b = corpus::random_connected(rng, 6, 1);
        UnionStructure u = disjoint_union(a, b);
        ValidationReport rep = validate_layers(refine(u));
        CAPTURE(rep.to_string());
        CHECK(rep.all_pass());
    }
    ValidationReport rep = validate_layers(refine(disjoint_union(corpus::prism(), corpus::k33())));
    CHECK(rep.all_pass());
}
