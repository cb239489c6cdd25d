#include "epciso/coherent.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <sstream>
#include <thread>

namespace epciso {

namespace {

// dense relation membership matrices, aligned with structure.relations
struct RelMatrices {
    int n;
    std::vector<std::vector<char>> m;  // per relation, n*n
    explicit RelMatrices(const Structure& s) : n(s.n) {
        m.assign(s.relations.size(), std::vector<char>(static_cast<size_t>(n) * n, 0));
        for (size_t i = 0; i < s.relations.size(); ++i)
            for (auto [u, v] : s.relations[i].pairs)
                m[i][static_cast<size_t>(u) * n + v] = 1;
    }
    bool has(size_t rel, Vertex u, Vertex v) const {
        return m[rel][static_cast<size_t>(u) * n + v] != 0;
    }
};

void renumber_layer(Layer& layer, int n, std::vector<std::pair<std::vector<long>, int>>& keyed) {
    // keyed: (sort key, old group id); assigns canonical ids by key order
    std::sort(keyed.begin(), keyed.end());
    std::vector<int> newid(keyed.size());
    for (size_t i = 0; i < keyed.size(); ++i) newid[static_cast<size_t>(keyed[i].second)] = static_cast<int>(i);
    for (auto& c : layer.color) c = newid[static_cast<size_t>(c)];
    layer.num_colors = static_cast<int>(keyed.size());
    (void)n;
}

void compute_color_flags(Layer& layer, int n, const std::vector<Side>* side) {
    layer.is_diag.assign(static_cast<size_t>(layer.num_colors), 0);
    layer.is_cross.assign(static_cast<size_t>(layer.num_colors), 0);
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = 0; v < n; ++v) {
            ColorId c = layer.color[static_cast<size_t>(u) * n + v];
            if (u == v) layer.is_diag[static_cast<size_t>(c)] = 1;
            if (side && (*side)[static_cast<size_t>(u)] != (*side)[static_cast<size_t>(v)])
                layer.is_cross[static_cast<size_t>(c)] = 1;
        }
}

ColorHistory refine_impl(const Structure& s, const std::vector<Side>* side, int left_size,
                         int jobs) {
    ColorHistory h;
    h.structure = s;
    h.is_union = side != nullptr;
    if (side) {
        h.side = *side;
        h.left_size = left_size;
    }
    h.n = s.n;
    const int n = s.n;
    const size_t nn = static_cast<size_t>(n) * n;
    RelMatrices rm(s);
    const size_t nrel = s.relations.size();

    // Layer 0: atomic types. Key per pair: (diag, cross, complemented
    // memberships of (u,v), complemented memberships of (v,u)); complementing
    // puts relation-bearing types before the empty type.
    {
        Layer layer;
        layer.color.assign(nn, 0);
        std::map<std::vector<long>, int> groups;
        std::vector<std::vector<long>> group_keys;
        for (Vertex u = 0; u < n; ++u)
            for (Vertex v = 0; v < n; ++v) {
                std::vector<long> key;
                key.reserve(2 + 2 * nrel);
                key.push_back(u == v ? 1 : 0);
                bool cross = side && (*side)[static_cast<size_t>(u)] != (*side)[static_cast<size_t>(v)];
                key.push_back(cross ? 1 : 0);
                for (size_t r = 0; r < nrel; ++r) key.push_back(rm.has(r, u, v) ? 0 : 1);
                for (size_t r = 0; r < nrel; ++r) key.push_back(rm.has(r, v, u) ? 0 : 1);
                auto it = groups.find(key);
                int g;
                if (it == groups.end()) {
                    g = static_cast<int>(groups.size());
                    groups.emplace(key, g);
                    group_keys.push_back(key);
                } else {
                    g = it->second;
                }
                layer.color[static_cast<size_t>(u) * n + v] = g;
            }
        std::vector<std::pair<std::vector<long>, int>> keyed;
        keyed.reserve(groups.size());
        for (size_t g = 0; g < group_keys.size(); ++g)
            keyed.push_back({group_keys[g], static_cast<int>(g)});
        renumber_layer(layer, n, keyed);
        layer.parent.assign(static_cast<size_t>(layer.num_colors), -1);
        compute_color_flags(layer, n, side);
        h.layers.push_back(std::move(layer));
    }

    // Iterate: signature of (u,v) = sorted multiset of (c(u,x), c(x,v)).
    for (;;) {
        const Layer& prev = h.layers.back();
        if (static_cast<int>(h.layers.size()) > n * n + 2)
            throw DomainError("VALIDATION_ERROR", "refinement failed to stabilize");
        std::vector<std::vector<long>> sig(nn);
        auto work = [&](size_t lo, size_t hi) {
            std::vector<std::pair<ColorId, ColorId>> buf(static_cast<size_t>(n));
            for (size_t p = lo; p < hi; ++p) {
                Vertex u = static_cast<Vertex>(p / static_cast<size_t>(n));
                Vertex v = static_cast<Vertex>(p % static_cast<size_t>(n));
                for (Vertex x = 0; x < n; ++x)
                    buf[static_cast<size_t>(x)] = {prev.color[static_cast<size_t>(u) * n + x],
                                                   prev.color[static_cast<size_t>(x) * n + v]};
                std::sort(buf.begin(), buf.end());
                std::vector<long>& out = sig[p];
                for (size_t k = 0; k < buf.size();) {
                    size_t j = k;
                    while (j < buf.size() && buf[j] == buf[k]) ++j;
                    out.push_back(buf[k].first);
                    out.push_back(buf[k].second);
                    out.push_back(static_cast<long>(j - k));
                    k = j;
                }
            }
        };
        if (jobs > 1 && nn > 1024) {
            std::vector<std::thread> ths;
            size_t chunk = (nn + static_cast<size_t>(jobs) - 1) / static_cast<size_t>(jobs);
            for (int t = 0; t < jobs; ++t) {
                size_t lo = static_cast<size_t>(t) * chunk;
                size_t hi = std::min(nn, lo + chunk);
                if (lo < hi) ths.emplace_back(work, lo, hi);
            }
            for (auto& t : ths) t.join();
        } else {
            work(0, nn);
        }

        Layer next;
        next.color.assign(nn, 0);
        std::map<std::vector<long>, int> groups;
        for (size_t p = 0; p < nn; ++p) {
            std::vector<long> key;
            key.reserve(1 + sig[p].size());
            key.push_back(prev.color[p]);
            key.insert(key.end(), sig[p].begin(), sig[p].end());
            auto [it, fresh] = groups.emplace(std::move(key), static_cast<int>(groups.size()));
            (void)fresh;
            next.color[p] = it->second;
        }
        std::vector<std::vector<long>> group_keys(groups.size());
        for (const auto& [key, g] : groups) group_keys[static_cast<size_t>(g)] = key;
        if (static_cast<int>(groups.size()) == prev.num_colors) break;  // stable
        std::vector<std::pair<std::vector<long>, int>> keyed;
        keyed.reserve(groups.size());
        for (size_t g = 0; g < group_keys.size(); ++g)
            keyed.push_back({group_keys[g], static_cast<int>(g)});
        renumber_layer(next, n, keyed);
        next.parent.assign(static_cast<size_t>(next.num_colors), -1);
        for (size_t p = 0; p < nn; ++p) next.parent[static_cast<size_t>(next.color[p])] = prev.color[p];
        compute_color_flags(next, n, side);
        h.layers.push_back(std::move(next));
    }

    h.stable_index = static_cast<int>(h.layers.size()) - 1;
    const Layer& st = h.stable();
    h.converse.assign(static_cast<size_t>(st.num_colors), -1);
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = 0; v < n; ++v)
            h.converse[static_cast<size_t>(st.color[static_cast<size_t>(u) * n + v])] =
                st.color[static_cast<size_t>(v) * n + u];
    return h;
}

}  // namespace

ColorHistory refine(const Structure& a, int jobs) {
    a.validate();
    return refine_impl(a, nullptr, 0, jobs);
}

ColorHistory refine(const UnionStructure& a, int jobs) {
    a.validate();
    return refine_impl(a.s, &a.side, a.left_size, jobs);
}

std::vector<VertexPair> ColorHistory::color_class(ColorId c) const {
    std::vector<VertexPair> out;
    const Layer& st = stable();
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = 0; v < n; ++v)
            if (st.color[static_cast<size_t>(u) * n + v] == c) out.push_back({u, v});
    return out;
}

AlgebraicSketch sketch(const ColorHistory& h) {
    AlgebraicSketch sk;
    for (const auto& r : h.structure.relations) sk.tau.push_back(r.name);
    const Layer& st = h.stable();
    sk.num_colors = st.num_colors;
    sk.diag.assign(static_cast<size_t>(st.num_colors), 0);
    for (int c = 0; c < st.num_colors; ++c) sk.diag[static_cast<size_t>(c)] = st.is_diag[static_cast<size_t>(c)];
    // refines: R(C) subset of E(A); start from all, strike out on a miss
    RelMatrices rm(h.structure);
    std::vector<std::vector<char>> sub(static_cast<size_t>(st.num_colors),
                                       std::vector<char>(sk.tau.size(), 1));
    std::vector<VertexPair> rep(static_cast<size_t>(st.num_colors), {-1, -1});
    for (Vertex u = 0; u < h.n; ++u)
        for (Vertex v = 0; v < h.n; ++v) {
            ColorId c = st.color[static_cast<size_t>(u) * h.n + v];
            if (rep[static_cast<size_t>(c)].first < 0) rep[static_cast<size_t>(c)] = {u, v};
            for (size_t r = 0; r < sk.tau.size(); ++r)
                if (!rm.has(r, u, v)) sub[static_cast<size_t>(c)][r] = 0;
        }
    sk.refines.assign(static_cast<size_t>(st.num_colors), {});
    for (int c = 0; c < st.num_colors; ++c)
        for (size_t r = 0; r < sk.tau.size(); ++r)
            if (sub[static_cast<size_t>(c)][r]) sk.refines[static_cast<size_t>(c)].push_back(static_cast<int>(r));
    // q from one representative per colour (stability makes it well-defined;
    // the validator re-checks all pairs)
    for (int c = 0; c < st.num_colors; ++c) {
        auto [u, v] = rep[static_cast<size_t>(c)];
        for (Vertex x = 0; x < h.n; ++x) {
            ColorId a = st.color[static_cast<size_t>(u) * h.n + x];
            ColorId b = st.color[static_cast<size_t>(x) * h.n + v];
            ++sk.q[{c, a, b}];
        }
    }
    return sk;
}

std::string AlgebraicSketch::serialize() const {
    std::ostringstream out;
    out << "tau";
    for (const auto& t : tau) out << " " << t;
    out << "\n";
    for (int c = 0; c < num_colors; ++c) {
        out << "color " << c << " diag=" << (diag[static_cast<size_t>(c)] ? 1 : 0) << " refines=";
        bool first = true;
        for (int r : refines[static_cast<size_t>(c)]) {
            if (!first) out << ",";
            out << tau[static_cast<size_t>(r)];
            first = false;
        }
        out << "\n";
    }
    for (const auto& [k, cnt] : q)
        out << "q " << std::get<0>(k) << " " << std::get<1>(k) << " " << std::get<2>(k) << " "
            << cnt << "\n";
    return out.str();
}

AlgebraicSketch restrict_sketch(const ColorHistory& h, Side side) {
    if (!h.is_union) throw DomainError("VALIDATION_ERROR", "restrict_sketch needs a union");
    UnionStructure u;
    u.s = h.structure;
    u.side = h.side;
    u.left_size = h.left_size;
    u.right_size = h.n - h.left_size;
    Structure part = u.extract(side);
    ColorHistory own = refine(part);
    // The union colouring restricted to this side must be exactly the side's
    // own stable partition.
    int shift = side == Side::Left ? 0 : h.left_size;
    int m = part.n;
    std::map<ColorId, ColorId> to_own;
    std::map<ColorId, ColorId> from_own;
    for (Vertex a = 0; a < m; ++a)
        for (Vertex b = 0; b < m; ++b) {
            ColorId cu = h.stable_color(a + shift, b + shift);
            ColorId co = own.stable_color(a, b);
            auto it = to_own.find(cu);
            if (it == to_own.end()) {
                to_own[cu] = co;
            } else if (it->second != co) {
                throw DomainError("VALIDATION_ERROR",
                                  "restriction of union colouring is finer than the side's own");
            }
            auto jt = from_own.find(co);
            if (jt == from_own.end()) {
                from_own[co] = cu;
            } else if (jt->second != cu) {
                throw DomainError("VALIDATION_ERROR",
                                  "restriction of union colouring is coarser than the side's own");
            }
        }
    return sketch(own);
}

std::optional<SeparationWitness> first_separation(const ColorHistory& h, VertexPair a,
                                                  VertexPair b) {
    const int n = h.n;
    auto col = [&](int layer, VertexPair p) {
        return h.layers[static_cast<size_t>(layer)].color[static_cast<size_t>(p.first) * n + p.second];
    };
    int sep = -1;
    for (int i = 0; i <= h.stable_index; ++i)
        if (col(i, a) != col(i, b)) {
            sep = i;
            break;
        }
    if (sep < 0) return std::nullopt;
    SeparationWitness w;
    w.iteration = sep;
    if (sep == 0) return w;
    // lexicographically least (s1,s2) of the previous layer with distinct counts
    const Layer& prev = h.layers[static_cast<size_t>(sep - 1)];
    std::map<std::pair<ColorId, ColorId>, std::pair<long, long>> counts;
    for (Vertex x = 0; x < n; ++x) {
        counts[{prev.color[static_cast<size_t>(a.first) * n + x],
                prev.color[static_cast<size_t>(x) * n + a.second]}]
            .first++;
        counts[{prev.color[static_cast<size_t>(b.first) * n + x],
                prev.color[static_cast<size_t>(x) * n + b.second]}]
            .second++;
    }
    for (const auto& [key, cnt] : counts)
        if (cnt.first != cnt.second) {
            w.s1 = key.first;
            w.s2 = key.second;
            w.count1 = cnt.first;
            w.count2 = cnt.second;
            return w;
        }
    throw DomainError("VALIDATION_ERROR", "separated pairs have identical signatures");
}

std::vector<std::vector<Vertex>> sccs_of_relation(const std::vector<VertexPair>& pairs, int n) {
    std::vector<std::vector<Vertex>> adj(static_cast<size_t>(n));
    std::vector<char> has_loop(static_cast<size_t>(n), 0);
    for (auto [u, v] : pairs) {
        adj[static_cast<size_t>(u)].push_back(v);
        if (u == v) has_loop[static_cast<size_t>(u)] = 1;
    }
    // Tarjan
    std::vector<int> idx(static_cast<size_t>(n), -1), low(static_cast<size_t>(n), 0);
    std::vector<char> onstack(static_cast<size_t>(n), 0);
    std::vector<Vertex> stack;
    std::vector<std::vector<Vertex>> out;
    int counter = 0;
    std::function<void(Vertex)> dfs = [&](Vertex u) {
        idx[static_cast<size_t>(u)] = low[static_cast<size_t>(u)] = counter++;
        stack.push_back(u);
        onstack[static_cast<size_t>(u)] = 1;
        for (Vertex v : adj[static_cast<size_t>(u)]) {
            if (idx[static_cast<size_t>(v)] < 0) {
                dfs(v);
                low[static_cast<size_t>(u)] = std::min(low[static_cast<size_t>(u)], low[static_cast<size_t>(v)]);
            } else if (onstack[static_cast<size_t>(v)]) {
                low[static_cast<size_t>(u)] = std::min(low[static_cast<size_t>(u)], idx[static_cast<size_t>(v)]);
            }
        }
        if (low[static_cast<size_t>(u)] == idx[static_cast<size_t>(u)]) {
            std::vector<Vertex> comp;
            for (;;) {
                Vertex v = stack.back();
                stack.pop_back();
                onstack[static_cast<size_t>(v)] = 0;
                comp.push_back(v);
                if (v == u) break;
            }
            // loopless singletons are not SCCs under the path-length >= 1 rule
            if (comp.size() > 1 || has_loop[static_cast<size_t>(comp[0])]) {
                std::sort(comp.begin(), comp.end());
                out.push_back(std::move(comp));
            }
        }
    };
    for (Vertex u = 0; u < n; ++u)
        if (idx[static_cast<size_t>(u)] < 0 && !adj[static_cast<size_t>(u)].empty()) dfs(u);
    for (Vertex u = 0; u < n; ++u)
        if (idx[static_cast<size_t>(u)] < 0 && has_loop[static_cast<size_t>(u)]) out.push_back({u});
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<Vertex>> sccs_of_color(const ColorHistory& h, ColorId r) {
    if (r < 0 || r >= h.stable().num_colors) throw DomainError("UNKNOWN_COLOR", std::to_string(r));
    return sccs_of_relation(h.color_class(r), h.n);
}

// ---------------------------------------------------------------------------
// Validators

namespace {

std::string pair_str(VertexPair p) {
    return "(" + std::to_string(p.first) + "," + std::to_string(p.second) + ")";
}

// Layer 0 holds atomic types, where the endpoint properties are not yet
// established (the undivided initial colouring makes them vacuous instead);
// they hold from the first refinement on because diagonal middle colours pin
// both endpoints.
void check_layer_invariants(const ColorHistory& h, int li, ValidationReport& rep) {
    const Layer& L = h.layers[static_cast<size_t>(li)];
    const int n = h.n;
    std::string suffix = " [layer " + std::to_string(li) + "]";
    ValidationCheck cross{"crossing-noncrossing-separation" + suffix, true, ""};
    ValidationCheck endp{"endpoint-diagonal-colours" + suffix, true, ""};
    ValidationCheck det{"crossing-determined-by-endpoints" + suffix, true, ""};
    bool endpoint_layers = li >= 1;
    std::vector<std::pair<ColorId, ColorId>> ends(static_cast<size_t>(L.num_colors), {-2, -2});
    std::map<std::pair<ColorId, ColorId>, ColorId> cross_by_ends;
    for (Vertex u = 0; u < n && (cross.pass || endp.pass || det.pass); ++u)
        for (Vertex v = 0; v < n; ++v) {
            ColorId c = L.color[static_cast<size_t>(u) * n + v];
            bool isx = h.is_union && h.side[static_cast<size_t>(u)] != h.side[static_cast<size_t>(v)];
            if (cross.pass && isx != (L.is_cross[static_cast<size_t>(c)] != 0)) {
                cross.pass = false;
                cross.detail = "colour " + std::to_string(c) + " mixes at " + pair_str({u, v});
            }
            if (!endpoint_layers) continue;
            ColorId du = L.color[static_cast<size_t>(u) * n + u];
            ColorId dv = L.color[static_cast<size_t>(v) * n + v];
            auto& e = ends[static_cast<size_t>(c)];
            if (e.first == -2) {
                e = {du, dv};
            } else if (endp.pass && (e.first != du || e.second != dv)) {
                endp.pass = false;
                endp.detail = "colour " + std::to_string(c) + " has mixed endpoint colours at " +
                              pair_str({u, v});
            }
            if (isx) {
                auto it = cross_by_ends.find({du, dv});
                if (it == cross_by_ends.end()) {
                    cross_by_ends[{du, dv}] = c;
                } else if (det.pass && it->second != c) {
                    det.pass = false;
                    det.detail = "two crossing colours share endpoint colours (" +
                                 std::to_string(du) + "," + std::to_string(dv) + ")";
                }
            }
        }
    rep.checks.push_back(cross);
    if (endpoint_layers) {
        rep.checks.push_back(endp);
        rep.checks.push_back(det);
    }
}

}  // namespace

ValidationReport validate_layers(const ColorHistory& h) {
    ValidationReport rep;
    for (int i = 0; i <= h.stable_index; ++i) check_layer_invariants(h, i, rep);
    return rep;
}

ValidationReport validate_configuration(const ColorHistory& h) {
    ValidationReport rep;
    const Layer& st = h.stable();
    const int n = h.n;
    const int nc = st.num_colors;

    {
        ValidationCheck c{"partition-of-pairs", true, ""};
        std::vector<long> size(static_cast<size_t>(nc), 0);
        for (ColorId x : st.color) {
            if (x < 0 || x >= nc) {
                c.pass = false;
                c.detail = "colour id out of range";
                break;
            }
            ++size[static_cast<size_t>(x)];
        }
        for (int i = 0; i < nc && c.pass; ++i)
            if (size[static_cast<size_t>(i)] == 0) {
                c.pass = false;
                c.detail = "empty colour " + std::to_string(i);
            }
        rep.checks.push_back(c);
    }
    {
        ValidationCheck c{"diagonal-separation", true, ""};
        for (Vertex u = 0; u < n && c.pass; ++u)
            for (Vertex v = 0; v < n && c.pass; ++v) {
                ColorId col = st.color[static_cast<size_t>(u) * n + v];
                bool d = st.is_diag[static_cast<size_t>(col)] != 0;
                if (d != (u == v)) {
                    c.pass = false;
                    c.detail = "colour " + std::to_string(col) + " mixes diagonal at " +
                               pair_str({u, v});
                }
            }
        rep.checks.push_back(c);
    }
    {
        ValidationCheck c{"refines-input-relations", true, ""};
        std::vector<std::vector<int>> verdict(
            static_cast<size_t>(nc), std::vector<int>(h.structure.relations.size(), -1));
        RelMatrices rm0(h.structure);
        for (Vertex u = 0; u < n && c.pass; ++u)
            for (Vertex v = 0; v < n && c.pass; ++v) {
                ColorId col = st.color[static_cast<size_t>(u) * n + v];
                for (size_t r = 0; r < h.structure.relations.size(); ++r) {
                    int want = rm0.has(r, u, v) ? 1 : 0;
                    int& got = verdict[static_cast<size_t>(col)][r];
                    if (got == -1) {
                        got = want;
                    } else if (got != want) {
                        c.pass = false;
                        c.detail = "colour " + std::to_string(col) + " straddles relation '" +
                                   h.structure.relations[r].name + "' at " + pair_str({u, v});
                        break;
                    }
                }
            }
        rep.checks.push_back(c);
    }
    {
        ValidationCheck c{"converse-closure", true, ""};
        for (Vertex u = 0; u < n && c.pass; ++u)
            for (Vertex v = 0; v < n && c.pass; ++v) {
                ColorId col = st.color[static_cast<size_t>(u) * n + v];
                ColorId conv = st.color[static_cast<size_t>(v) * n + u];
                if (h.converse[static_cast<size_t>(col)] != conv) {
                    c.pass = false;
                    c.detail = "converse of colour " + std::to_string(col) + " not a colour at " +
                               pair_str({u, v});
                }
            }
        rep.checks.push_back(c);
    }
    {
        ValidationCheck c{"intersection-numbers", true, ""};
        std::vector<std::map<std::pair<ColorId, ColorId>, long>> ref(static_cast<size_t>(nc));
        std::vector<char> seen(static_cast<size_t>(nc), 0);
        for (Vertex u = 0; u < n && c.pass; ++u)
            for (Vertex v = 0; v < n && c.pass; ++v) {
                ColorId col = st.color[static_cast<size_t>(u) * n + v];
                std::map<std::pair<ColorId, ColorId>, long> cnt;
                for (Vertex x = 0; x < n; ++x)
                    ++cnt[{st.color[static_cast<size_t>(u) * n + x],
                           st.color[static_cast<size_t>(x) * n + v]}];
                if (!seen[static_cast<size_t>(col)]) {
                    seen[static_cast<size_t>(col)] = 1;
                    ref[static_cast<size_t>(col)] = std::move(cnt);
                } else if (ref[static_cast<size_t>(col)] != cnt) {
                    c.pass = false;
                    c.detail = "pair " + pair_str({u, v}) + " disagrees with colour " +
                               std::to_string(col) + " counts";
                }
            }
        rep.checks.push_back(c);
    }
    {
        ValidationCheck c{"endpoint-colours", true, ""};
        std::vector<std::pair<ColorId, ColorId>> ends(static_cast<size_t>(nc), {-2, -2});
        for (Vertex u = 0; u < n && c.pass; ++u)
            for (Vertex v = 0; v < n && c.pass; ++v) {
                ColorId col = st.color[static_cast<size_t>(u) * n + v];
                ColorId du = st.color[static_cast<size_t>(u) * n + u];
                ColorId dv = st.color[static_cast<size_t>(v) * n + v];
                auto& e = ends[static_cast<size_t>(col)];
                if (e.first == -2)
                    e = {du, dv};
                else if (e.first != du || e.second != dv) {
                    c.pass = false;
                    c.detail = "colour " + std::to_string(col) + " endpoint mismatch at " +
                               pair_str({u, v});
                }
            }
        rep.checks.push_back(c);
    }

    // SCC colour properties, per stable colour with at least one SCC
    RelMatrices rm(h.structure);
    const auto& rels = h.structure.relations;
    for (ColorId r = 0; r < nc; ++r) {
        auto sccs = sccs_of_color(h, r);
        if (sccs.empty()) continue;
        std::string tag = " [colour " + std::to_string(r) + "]";
        std::vector<char> in_scc(static_cast<size_t>(n), 0);
        std::vector<int> scc_of(static_cast<size_t>(n), -1);
        for (size_t si = 0; si < sccs.size(); ++si)
            for (Vertex v : sccs[si]) {
                in_scc[static_cast<size_t>(v)] = 1;
                scc_of[static_cast<size_t>(v)] = static_cast<int>(si);
            }
        {
            ValidationCheck c{"scc-single-diagonal-colour" + tag, true, ""};
            ColorId p = -1;
            for (Vertex v = 0; v < n && c.pass; ++v) {
                if (!in_scc[static_cast<size_t>(v)]) continue;
                ColorId d = st.color[static_cast<size_t>(v) * n + v];
                if (p < 0)
                    p = d;
                else if (p != d) {
                    c.pass = false;
                    c.detail = "SCC members with diagonal colours " + std::to_string(p) + " and " +
                               std::to_string(d);
                }
            }
            for (Vertex v = 0; v < n && c.pass; ++v)
                if (!in_scc[static_cast<size_t>(v)] && st.color[static_cast<size_t>(v) * n + v] == p) {
                    c.pass = false;
                    c.detail = "vertex " + std::to_string(v) + " has the SCC colour but is outside";
                }
            rep.checks.push_back(c);
        }
        {
            ValidationCheck c{"scc-equal-size" + tag, true, ""};
            for (const auto& s : sccs)
                if (s.size() != sccs[0].size()) {
                    c.pass = false;
                    c.detail = "sizes " + std::to_string(sccs[0].size()) + " vs " +
                               std::to_string(s.size());
                }
            rep.checks.push_back(c);
        }
        {
            ValidationCheck c{"scc-relation-is-colour-union" + tag, true, ""};
            // every stable colour is inside or disjoint from R^scc
            std::vector<int> verdict(static_cast<size_t>(nc), -1);  // -1 unseen, 0 out, 1 in
            for (Vertex u = 0; u < n && c.pass; ++u)
                for (Vertex v = 0; v < n && c.pass; ++v) {
                    bool same = in_scc[static_cast<size_t>(u)] && in_scc[static_cast<size_t>(v)] &&
                                scc_of[static_cast<size_t>(u)] == scc_of[static_cast<size_t>(v)];
                    ColorId col = st.color[static_cast<size_t>(u) * n + v];
                    int want = same ? 1 : 0;
                    if (verdict[static_cast<size_t>(col)] == -1)
                        verdict[static_cast<size_t>(col)] = want;
                    else if (verdict[static_cast<size_t>(col)] != want) {
                        c.pass = false;
                        c.detail = "colour " + std::to_string(col) + " straddles R^scc at " +
                                   pair_str({u, v});
                    }
                }
            rep.checks.push_back(c);
        }
        {
            ValidationCheck c{"between-scc-vertex" + tag, true, ""};
            for (size_t e = 0; e < rels.size() && c.pass; ++e)
                for (size_t vi = 0; vi < sccs.size() && c.pass; ++vi)
                    for (size_t wi = 0; wi < sccs.size() && c.pass; ++wi)
                        for (Vertex vp = 0; vp < n && c.pass; ++vp)
                            for (Vertex wp = 0; wp < n && c.pass; ++wp) {
                                bool hits = false;
                                for (Vertex x : sccs[vi])
                                    if (rm.has(e, vp, x)) {
                                        hits = true;
                                        break;
                                    }
                                if (!hits) continue;
                                bool misses = true;
                                for (Vertex x : sccs[wi])
                                    if (rm.has(e, wp, x)) {
                                        misses = false;
                                        break;
                                    }
                                if (!misses) continue;
                                ColorId t = st.color[static_cast<size_t>(vp) * n + sccs[vi][0]];
                                for (Vertex x : sccs[wi])
                                    if (st.color[static_cast<size_t>(wp) * n + x] == t) {
                                        c.pass = false;
                                        c.detail = "colour " + std::to_string(t) +
                                                   " reaches excluded SCC via " +
                                                   pair_str({wp, x}) + " rel " + rels[e].name;
                                        break;
                                    }
                            }
            rep.checks.push_back(c);
        }
        {
            ValidationCheck c{"between-scc-scc" + tag, true, ""};
            size_t k = sccs.size();
            for (size_t e = 0; e < rels.size() && c.pass; ++e)
                for (size_t vpi = 0; vpi < k && c.pass; ++vpi)
                    for (size_t vi = 0; vi < k && c.pass; ++vi)
                        for (size_t wpi = 0; wpi < k && c.pass; ++wpi)
                            for (size_t wi = 0; wi < k && c.pass; ++wi) {
                                bool hits = false;
                                for (Vertex a : sccs[vpi]) {
                                    for (Vertex b : sccs[vi])
                                        if (rm.has(e, a, b)) {
                                            hits = true;
                                            break;
                                        }
                                    if (hits) break;
                                }
                                if (!hits) continue;
                                bool misses = true;
                                for (Vertex a : sccs[wpi]) {
                                    for (Vertex b : sccs[wi])
                                        if (rm.has(e, a, b)) {
                                            misses = false;
                                            break;
                                        }
                                    if (!misses) break;
                                }
                                if (!misses) continue;
                                ColorId t =
                                    st.color[static_cast<size_t>(sccs[vpi][0]) * n + sccs[vi][0]];
                                for (Vertex a : sccs[wpi]) {
                                    for (Vertex b : sccs[wi])
                                        if (st.color[static_cast<size_t>(a) * n + b] == t) {
                                            c.pass = false;
                                            c.detail = "colour " + std::to_string(t) +
                                                       " appears between excluded SCCs at " +
                                                       pair_str({a, b}) + " rel " + rels[e].name;
                                            break;
                                        }
                                    if (!c.pass) break;
                                }
                            }
            rep.checks.push_back(c);
        }
    }
    return rep;
}

std::string ValidationReport::to_string() const {
    std::ostringstream out;
    for (const auto& c : checks) {
        out << (c.pass ? "PASS" : "FAIL") << " " << c.name;
        if (!c.pass) out << " — " << c.detail;
        out << "\n";
    }
    return out.str();
}

}  // namespace epciso
