#include "epciso/derive.hpp"

#include <algorithm>
#include <cassert>

namespace epciso {

int ProofBuilder::axiom_step(int axiom_index) {
    int& cached = axiom_steps_.at(static_cast<size_t>(axiom_index));
    if (cached >= 0) return cached;
    cached = append(axioms_[static_cast<size_t>(axiom_index)].poly, Justification::ax(axiom_index));
    return cached;
}

int ProofBuilder::append(Polynomial poly, Justification just) {
    if (poly.degree() > 3)
        throw DomainError("DEGREE_EXCEEDED", "producer emitted degree " + std::to_string(poly.degree()));
    proof_.steps.push_back({std::move(poly), just});
    return static_cast<int>(proof_.steps.size()) - 1;
}

int ProofBuilder::add_extension(ExtensionDescriptor d) {
    int k = static_cast<int>(proof_.ext_table.size());
    VariableId xf = VariableId::ext(k);
    for (const auto& [m, c] : d.f.terms)
        note_denominator(mpz_get_si(c.get_den().get_mpz_t()));
    Polynomial step_poly = Polynomial::add_scaled(Polynomial::variable(xf), d.f, 1, -1);
    proof_.ext_table.push_back(std::move(d));
    int s = append(std::move(step_poly), Justification::extension(k));
    ext_steps_.push_back(s);
    return k;
}

SystemView make_state0_view(const UnionStructure& gh, const ColorHistory& hist,
                            const PisoSystem& sys) {
    SystemView v;
    v.st = &gh;
    v.hist = &hist;
    int nl = gh.left_size, nr = gh.right_size;
    v.varmap.assign(static_cast<size_t>(nl), std::vector<VariableId>(static_cast<size_t>(nr)));
    v.varok.assign(static_cast<size_t>(nl), std::vector<char>(static_cast<size_t>(nr), 0));
    v.partners_left = sys.partners_of_left;
    v.partners_right = sys.partners_of_right;
    for (Vertex a = 0; a < nl; ++a)
        for (Vertex b : v.partners_left[static_cast<size_t>(a)]) {
            VariableId id = VariableId::orig(a, b);
            v.varmap[static_cast<size_t>(a)][static_cast<size_t>(b)] = id;
            v.varok[static_cast<size_t>(a)][static_cast<size_t>(b)] = 1;
            v.rev[id.raw] = {a, b};
        }
    v.row.resize(static_cast<size_t>(nr));
    v.col.resize(static_cast<size_t>(nl));
    for (Vertex w = 0; w < nr; ++w) v.row[static_cast<size_t>(w)].axiom = sys.row_index(w);
    for (Vertex a = 0; a < nl; ++a) v.col[static_cast<size_t>(a)].axiom = sys.col_index(a);
    for (const auto& [m, idx] : sys.local_index()) v.local[m].axiom = idx;
    return v;
}

Position normalize_position(Position p) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    return p;
}

Monomial position_monomial(const SystemView& sys, const Position& p) {
    Monomial m;
    for (auto [v, w] : p) m = m.times(sys.var(v, w));
    return m;
}

namespace {

int resolve(DeriveCtx& ctx, const Handle& h) {
    if (h.step >= 0) return h.step;
    if (h.axiom >= 0) return ctx.pb.axiom_step(h.axiom);
    throw DomainError("VALIDATION_ERROR", "unresolvable axiom handle");
}

int resolve_row(DeriveCtx& ctx, Vertex w) {
    Handle& h = ctx.sys.row[static_cast<size_t>(w)];
    int s = resolve(ctx, h);
    h.step = s;
    return s;
}
int resolve_col(DeriveCtx& ctx, Vertex v) {
    Handle& h = ctx.sys.col[static_cast<size_t>(v)];
    int s = resolve(ctx, h);
    h.step = s;
    return s;
}
int resolve_local(DeriveCtx& ctx, const Monomial& m) {
    auto it = ctx.sys.local.find(m);
    if (it == ctx.sys.local.end())
        throw DomainError("VALIDATION_ERROR", "missing local axiom for monomial");
    int s = resolve(ctx, it->second);
    it->second.step = s;
    return s;
}

bool position_local_iso(const SystemView& sys, const Position& p) {
    if (p.size() == 1) return local_isomorphism(*sys.st, p[0].first, p[0].second, p[0].first, p[0].second);
    return local_isomorphism(*sys.st, p[0].first, p[0].second, p[1].first, p[1].second);
}

std::optional<SeparationWitness> position_separation(const SystemView& sys, const Position& p) {
    const ColorHistory& h = *sys.hist;
    Vertex v = p[0].first, w = p[0].second;
    Vertex v2 = p.size() == 2 ? p[1].first : v;
    Vertex w2 = p.size() == 2 ? p[1].second : w;
    VertexPair ta{sys.st->to_union(Side::Left, v), sys.st->to_union(Side::Left, v2)};
    VertexPair tb{sys.st->to_union(Side::Right, w), sys.st->to_union(Side::Right, w2)};
    return first_separation(h, ta, tb);
}

// LIN-accumulate: acc += coef * step (acc < 0 means empty so far)
int lin_acc(DeriveCtx& ctx, int acc, int step, const Rational& coef) {
    if (acc < 0) {
        if (coef == 1) return step;
        return ctx.pb.append(ctx.pb.poly(step).scaled(coef),
                             Justification::lin(step, coef, step, 0));
    }
    return ctx.pb.append(Polynomial::add_scaled(ctx.pb.poly(acc), ctx.pb.poly(step), 1, coef),
                         Justification::lin(acc, 1, step, coef));
}

int scale_step(DeriveCtx& ctx, int step, const Rational& coef) {
    if (coef == 1) return step;
    ctx.pb.note_denominator(mpz_get_si(coef.get_den().get_mpz_t()));
    return ctx.pb.append(ctx.pb.poly(step).scaled(coef), Justification::lin(step, coef, step, 0));
}

// multiply a step by each variable of `rest` in order
int mul_chain(DeriveCtx& ctx, int step, const Monomial& rest) {
    int cur = step;
    for (VariableId x : rest.factors)
        cur = ctx.pb.append(Polynomial::mul_var(ctx.pb.poly(cur), x), Justification::mul(cur, x));
    return cur;
}

int census_one(DeriveCtx& ctx, int layer, ColorId d, int max_iteration);

}  // namespace

int derive_term(DeriveCtx& ctx, const Monomial& mono, int max_iteration) {
    auto memo = ctx.term_memo.find(mono);
    if (memo != ctx.term_memo.end()) return memo->second;
    // candidate sub-positions from the distinct pebbles of mono
    std::vector<VertexPair> pebbles;
    for (VariableId x : mono.factors) {
        VertexPair p = ctx.sys.pebble_of(x);
        if (std::find(pebbles.begin(), pebbles.end(), p) == pebbles.end()) pebbles.push_back(p);
    }
    std::sort(pebbles.begin(), pebbles.end());
    std::vector<Position> candidates;
    for (const auto& p : pebbles) candidates.push_back({p});
    for (size_t i = 0; i < pebbles.size(); ++i)
        for (size_t j = i + 1; j < pebbles.size(); ++j)
            candidates.push_back({pebbles[i], pebbles[j]});
    for (const Position& cand : candidates) {
        bool ok = false;
        if (!position_local_iso(ctx.sys, cand)) {
            ok = true;
        } else {
            auto sep = position_separation(ctx.sys, cand);
            ok = sep && sep->iteration < max_iteration;
        }
        if (!ok) continue;
        int s = derive_position(ctx, cand);
        Monomial quot;
        bool divides = mono.divide(position_monomial(ctx.sys, cand), quot);
        assert(divides);
        (void)divides;
        int out = mul_chain(ctx, s, quot);
        assert(ctx.pb.poly(out) == Polynomial::monomial(mono, 1));
        ctx.term_memo[mono] = out;
        return out;
    }
    throw DomainError("NOT_SEPARATED", "no derivable sub-position for cancellation term");
}

namespace {

// Case 1: side-restricted witness counts differ. Sum the matching column
// axioms over the left witness set and row axioms over the right witness set,
// cancel the strictly-earlier-separated cross terms, combine.
int derive_case1(DeriveCtx& ctx, const Position& pos, const SeparationWitness& wit) {
    const SystemView& sys = ctx.sys;
    const ColorHistory& h = *sys.hist;
    const UnionStructure& st = *sys.st;
    int layer = wit.iteration - 1;
    Vertex v = pos[0].first, w = pos[0].second;
    Vertex v2 = pos.size() == 2 ? pos[1].first : v;
    Vertex w2 = pos.size() == 2 ? pos[1].second : w;
    std::vector<Vertex> A, B;
    for (Vertex x = 0; x < st.left_size; ++x) {
        Vertex ux = st.to_union(Side::Left, x);
        if (h.color_at(layer, st.to_union(Side::Left, v), ux) == wit.s1 &&
            h.color_at(layer, ux, st.to_union(Side::Left, v2)) == wit.s2)
            A.push_back(x);
    }
    for (Vertex y = 0; y < st.right_size; ++y) {
        Vertex uy = st.to_union(Side::Right, y);
        if (h.color_at(layer, st.to_union(Side::Right, w), uy) == wit.s1 &&
            h.color_at(layer, uy, st.to_union(Side::Right, w2)) == wit.s2)
            B.push_back(y);
    }
    assert(static_cast<long>(A.size()) == wit.count1 && static_cast<long>(B.size()) == wit.count2);
    Monomial xpos = position_monomial(sys, pos);
    auto in_set = [](const std::vector<Vertex>& s, Vertex x) {
        return std::binary_search(s.begin(), s.end(), x);
    };

    int accG = -1;
    for (Vertex x : A) {
        int t = mul_chain(ctx, resolve_col(ctx, x), xpos);
        accG = lin_acc(ctx, accG, t, 1);
    }
    for (Vertex x : A)
        for (Vertex y : sys.partners_left[static_cast<size_t>(x)]) {
            if (in_set(B, y)) continue;
            int ms = derive_term(ctx, xpos.times(sys.var(x, y)), wit.iteration);
            accG = lin_acc(ctx, accG, ms, -1);
        }
    int accH = -1;
    for (Vertex y : B) {
        int t = mul_chain(ctx, resolve_row(ctx, y), xpos);
        accH = lin_acc(ctx, accH, t, 1);
    }
    for (Vertex y : B)
        for (Vertex x : sys.partners_right[static_cast<size_t>(y)]) {
            if (in_set(A, x)) continue;
            int ms = derive_term(ctx, xpos.times(sys.var(x, y)), wit.iteration);
            accH = lin_acc(ctx, accH, ms, -1);
        }

    long a = static_cast<long>(A.size()), b = static_cast<long>(B.size());
    int comb;
    if (accG >= 0 && accH >= 0)
        comb = ctx.pb.append(Polynomial::add_scaled(ctx.pb.poly(accG), ctx.pb.poly(accH), 1, -1),
                             Justification::lin(accG, 1, accH, -1));
    else if (accG >= 0)
        comb = accG;
    else
        comb = scale_step(ctx, accH, -1);
    // comb == (b - a) * X_pos
    assert(ctx.pb.poly(comb) == Polynomial::monomial(xpos, rat(b - a)));
    Rational coef(1, b - a);
    coef.canonicalize();
    return scale_step(ctx, comb, coef);
}

// Case 2: the witness colours are crossing, so some diagonal colour of the
// previous layer has different censuses in the two sides (at layers >= 1 the
// witness endpoints give one; at layer 0 the side sizes differ). Derive 1
// from that imbalance and multiply up.
int derive_case2(DeriveCtx& ctx, const Position& pos, const SeparationWitness& wit) {
    if (ctx.sketches_equal)
        throw DomainError("VALIDATION_ERROR",
                          "crossing-witness case reached while restricted sketches are equal");
    const ColorHistory& h = *ctx.sys.hist;
    const UnionStructure& st = *ctx.sys.st;
    int layer = wit.iteration - 1;
    const Layer& L = h.layers[static_cast<size_t>(layer)];
    std::vector<long> left_census(static_cast<size_t>(L.num_colors), 0),
        right_census(static_cast<size_t>(L.num_colors), 0);
    for (Vertex x = 0; x < h.n; ++x) {
        ColorId dx = h.color_at(layer, x, x);
        (st.is_left(x) ? left_census : right_census)[static_cast<size_t>(dx)]++;
    }
    ColorId d = -1;
    for (ColorId c = 0; c < L.num_colors; ++c)
        if (left_census[static_cast<size_t>(c)] != right_census[static_cast<size_t>(c)]) {
            d = c;
            break;
        }
    if (d < 0)
        throw DomainError("VALIDATION_ERROR",
                          "crossing witness without a census-unbalanced diagonal colour");
    int one = census_one(ctx, layer, d, wit.iteration);
    return mul_chain(ctx, one, position_monomial(ctx.sys, pos));
}

int census_one(DeriveCtx& ctx, int layer, ColorId d, int max_iteration) {
    auto memo = ctx.census_memo.find({layer, d});
    if (memo != ctx.census_memo.end()) return memo->second;
    const SystemView& sys = ctx.sys;
    const ColorHistory& h = *sys.hist;
    const UnionStructure& st = *sys.st;
    std::vector<Vertex> domG, domH;
    for (Vertex x = 0; x < st.left_size; ++x) {
        Vertex ux = st.to_union(Side::Left, x);
        if (h.color_at(layer, ux, ux) == d) domG.push_back(x);
    }
    for (Vertex y = 0; y < st.right_size; ++y) {
        Vertex uy = st.to_union(Side::Right, y);
        if (h.color_at(layer, uy, uy) == d) domH.push_back(y);
    }
    long g = static_cast<long>(domG.size()), hh = static_cast<long>(domH.size());
    if (g == hh)
        throw DomainError("VALIDATION_ERROR", "census derivation on balanced diagonal colour");
    int accG = -1;
    for (Vertex x : domG) accG = lin_acc(ctx, accG, resolve_col(ctx, x), 1);
    for (Vertex x : domG)
        for (Vertex y : sys.partners_left[static_cast<size_t>(x)]) {
            Vertex uy = st.to_union(Side::Right, y);
            if (h.color_at(layer, uy, uy) == d) continue;
            int ms = derive_term(ctx, Monomial::var(sys.var(x, y)), max_iteration);
            accG = lin_acc(ctx, accG, ms, -1);
        }
    int accH = -1;
    for (Vertex y : domH) accH = lin_acc(ctx, accH, resolve_row(ctx, y), 1);
    for (Vertex y : domH)
        for (Vertex x : sys.partners_right[static_cast<size_t>(y)]) {
            Vertex ux = st.to_union(Side::Left, x);
            if (h.color_at(layer, ux, ux) == d) continue;
            int ms = derive_term(ctx, Monomial::var(sys.var(x, y)), max_iteration);
            accH = lin_acc(ctx, accH, ms, -1);
        }
    int comb;
    if (accG >= 0 && accH >= 0)
        comb = ctx.pb.append(Polynomial::add_scaled(ctx.pb.poly(accG), ctx.pb.poly(accH), 1, -1),
                             Justification::lin(accG, 1, accH, -1));
    else if (accG >= 0)
        comb = accG;
    else
        comb = scale_step(ctx, accH, -1);
    assert(ctx.pb.poly(comb) == Polynomial::constant(rat(hh - g)));
    Rational coef(1, hh - g);
    coef.canonicalize();
    int one = scale_step(ctx, comb, coef);
    assert(ctx.pb.poly(one).is_one());
    ctx.census_memo[{layer, d}] = one;
    return one;
}

}  // namespace

int derive_position(DeriveCtx& ctx, Position pos) {
    pos = normalize_position(std::move(pos));
    assert(!pos.empty() && pos.size() <= 2);
    auto memo = ctx.pos_memo.find(pos);
    if (memo != ctx.pos_memo.end()) return memo->second;
    for (auto [v, w] : pos)
        if (!ctx.sys.has_var(v, w))
            throw DomainError("MISSING_VARIABLE",
                              "no variable for pebble (" + std::to_string(v) + "," +
                                  std::to_string(w) + ")");
    int out;
    if (!position_local_iso(ctx.sys, pos)) {
        if (pos.size() == 2) {
            out = resolve_local(ctx, position_monomial(ctx.sys, pos));
        } else {
            // singleton failure: the square X^2 is the axiom; Boolean brings it
            // down to the variable
            VariableId x = ctx.sys.var(pos[0].first, pos[0].second);
            if (x.is_ext())
                throw DomainError("VALIDATION_ERROR",
                                  "self-loop mismatch on an extension-variable vertex");
            Monomial sq = Monomial::var(x).times(x);
            int s0 = resolve_local(ctx, sq);
            Polynomial boolpoly = Polynomial::add_scaled(Polynomial::monomial(sq, 1),
                                                         Polynomial::variable(x), 1, -1);
            int sb = ctx.pb.append(boolpoly, Justification::boolean(x));
            out = ctx.pb.append(Polynomial::variable(x), Justification::lin(s0, 1, sb, -1));
        }
    } else {
        auto sep = position_separation(ctx.sys, pos);
        if (!sep) throw DomainError("NOT_SEPARATED", "position has stably equal colours");
        assert(sep->iteration >= 1);
        const Layer& prev = ctx.sys.hist->layers[static_cast<size_t>(sep->iteration - 1)];
        bool crossing = prev.is_cross[static_cast<size_t>(sep->s1)] != 0;
        out = crossing ? derive_case2(ctx, pos, *sep) : derive_case1(ctx, pos, *sep);
    }
    assert(ctx.pb.poly(out) == Polynomial::monomial(position_monomial(ctx.sys, pos), 1));
    ctx.pos_memo[pos] = out;
    return out;
}

int derive_one(DeriveCtx& ctx) {
    const SystemView& sys = ctx.sys;
    const ColorHistory& h = *sys.hist;
    const UnionStructure& st = *sys.st;
    const Layer& stable = h.stable();
    // find a stable colour realized on exactly one side
    std::vector<char> on_left(static_cast<size_t>(stable.num_colors), 0),
        on_right(static_cast<size_t>(stable.num_colors), 0);
    for (Vertex u = 0; u < h.n; ++u)
        for (Vertex x = 0; x < h.n; ++x) {
            ColorId c = h.stable_color(u, x);
            if (st.is_left(u) && st.is_left(x)) on_left[static_cast<size_t>(c)] = 1;
            if (!st.is_left(u) && !st.is_left(x)) on_right[static_cast<size_t>(c)] = 1;
        }
    int chosen = -1;
    for (int c = 0; c < stable.num_colors; ++c)
        if (on_left[static_cast<size_t>(c)] != on_right[static_cast<size_t>(c)]) {
            chosen = c;
            break;
        }
    if (chosen < 0)
        throw DomainError("SKETCHES_EQUAL",
                          "no stable colour is realized on exactly one side");
    int max_iter = h.stable_index + 1;
    if (stable.is_diag[static_cast<size_t>(chosen)])
        return census_one(ctx, h.stable_index, chosen, max_iter);

    // non-diagonal one-sided colour: take its least pair (v,v') (or (w,w') on
    // the right) and expand the product of the two column (row) axioms
    bool left_sided = on_left[static_cast<size_t>(chosen)] != 0;
    VertexPair pick{-1, -1};
    for (Vertex u = 0; u < h.n && pick.first < 0; ++u)
        for (Vertex x = 0; x < h.n; ++x)
            if (h.stable_color(u, x) == chosen) {
                pick = {u, x};
                break;
            }
    if (left_sided) {
        Vertex v = st.to_local(pick.first), v2 = st.to_local(pick.second);
        const auto& pw = sys.partners_left[static_cast<size_t>(v)];
        int colv = resolve_col(ctx, v);
        if (pw.empty()) return scale_step(ctx, colv, -1);  // column axiom is already -1
        int colv2 = resolve_col(ctx, v2);
        int acc = -1;
        for (Vertex w : pw) {
            int t = mul_chain(ctx, colv2, Monomial::var(sys.var(v, w)));
            acc = lin_acc(ctx, acc, t, 1);
        }
        acc = lin_acc(ctx, acc, colv, 1);
        for (Vertex w : pw)
            for (Vertex w2 : sys.partners_left[static_cast<size_t>(v2)]) {
                int ms = derive_term(ctx, Monomial::var(sys.var(v, w)).times(sys.var(v2, w2)),
                                     max_iter);
                acc = lin_acc(ctx, acc, ms, -1);
            }
        assert(ctx.pb.poly(acc) == Polynomial::constant(-1));
        return scale_step(ctx, acc, -1);
    }
    Vertex w = st.to_local(pick.first), w2 = st.to_local(pick.second);
    const auto& pv = sys.partners_right[static_cast<size_t>(w)];
    int roww = resolve_row(ctx, w);
    if (pv.empty()) return scale_step(ctx, roww, -1);
    int roww2 = resolve_row(ctx, w2);
    int acc = -1;
    for (Vertex v : pv) {
        int t = mul_chain(ctx, roww2, Monomial::var(sys.var(v, w)));
        acc = lin_acc(ctx, acc, t, 1);
    }
    acc = lin_acc(ctx, acc, roww, 1);
    for (Vertex v : pv)
        for (Vertex v2 : sys.partners_right[static_cast<size_t>(w2)]) {
            int ms = derive_term(ctx, Monomial::var(sys.var(v, w)).times(sys.var(v2, w2)), max_iter);
            acc = lin_acc(ctx, acc, ms, -1);
        }
    assert(ctx.pb.poly(acc) == Polynomial::constant(-1));
    return scale_step(ctx, acc, -1);
}

// ---------------------------------------------------------------------------
// Derivability closure oracle

namespace {

bool set_local_iso(const UnionStructure& gh, const Position& p) {
    for (size_t i = 0; i < p.size(); ++i)
        for (size_t j = i; j < p.size(); ++j)
            if (!local_isomorphism(gh, p[i].first, p[i].second, p[j].first, p[j].second))
                return false;
    return true;
}

}  // namespace

std::set<Position> derivable_closure_oracle(const UnionStructure& gh) {
    const int nl = gh.left_size, nr = gh.right_size;
    if (nl > 6 || nr > 6) throw DomainError("SIZE_LIMIT", "oracle supports at most 6 vertices per side");
    PisoSystem ps = piso(gh);

    std::vector<Position> all;
    all.push_back({});
    for (Vertex v = 0; v < nl; ++v)
        for (Vertex w = 0; w < nr; ++w) all.push_back({{v, w}});
    for (Vertex v = 0; v < nl; ++v)
        for (Vertex w = 0; w < nr; ++w)
            for (Vertex v2 = 0; v2 < nl; ++v2)
                for (Vertex w2 = 0; w2 < nr; ++w2) {
                    Position p = normalize_position({{v, w}, {v2, w2}});
                    if (p.size() == 2 && p[0] == std::min(VertexPair{v, w}, VertexPair{v2, w2}))
                        all.push_back(p);
                }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());

    std::set<Position> closure;
    for (const Position& p : all)
        if (!p.empty() && !set_local_iso(gh, p)) closure.insert(p);

    auto has_derivable_sub = [&](const Position& p) {
        // any subset of size <= 2 already in the closure
        if (closure.count({})) return true;
        for (size_t i = 0; i < p.size(); ++i) {
            if (closure.count({p[i]})) return true;
            for (size_t j = i + 1; j < p.size(); ++j)
                if (closure.count(normalize_position({p[i], p[j]}))) return true;
        }
        return false;
    };
    auto rule_fires = [&](const Position& p) {
        // some vertex on either side works against every partner
        for (Vertex v = 0; v < nl; ++v) {
            bool ok = true;
            for (Vertex w : ps.partners_of_left[static_cast<size_t>(v)]) {
                Position q = normalize_position([&] {
                    Position t = p;
                    t.push_back({v, w});
                    return t;
                }());
                if (!set_local_iso(gh, q)) continue;
                if (q.size() <= 2 && closure.count(q)) continue;
                if (has_derivable_sub(q)) continue;
                ok = false;
                break;
            }
            if (ok) return true;
        }
        for (Vertex w = 0; w < nr; ++w) {
            bool ok = true;
            for (Vertex v : ps.partners_of_right[static_cast<size_t>(w)]) {
                Position q = normalize_position([&] {
                    Position t = p;
                    t.push_back({v, w});
                    return t;
                }());
                if (!set_local_iso(gh, q)) continue;
                if (q.size() <= 2 && closure.count(q)) continue;
                if (has_derivable_sub(q)) continue;
                ok = false;
                break;
            }
            if (ok) return true;
        }
        return false;
    };

    for (bool changed = true; changed;) {
        changed = false;
        for (const Position& p : all) {
            if (closure.count(p)) continue;
            if (rule_fires(p)) {
                closure.insert(p);
                changed = true;
            }
        }
    }
    return closure;
}

}  // namespace epciso
