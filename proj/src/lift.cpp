#include "epciso/lift.hpp"

#include <algorithm>
#include <cassert>

namespace epciso {

namespace {

Polynomial handle_poly(const ProofBuilder& pb, const std::vector<Axiom>& axioms, const Handle& h) {
    if (h.step >= 0) return pb.poly(h.step);
    return axioms[static_cast<size_t>(h.axiom)].poly;
}

}  // namespace

LiftPlan make_lift_plan(const CloudState& prev, const CloudState& next,
                        const SystemView& prev_view) {
    LiftPlan plan;
    plan.op = next.op_kind;
    plan.color = next.op_color;
    const UnionStructure& nst = next.structure;
    for (Vertex v = 0; v < nst.left_size; ++v)
        if (next.provenance[static_cast<size_t>(v)].kind != Provenance::Kind::Original)
            plan.new_left.push_back(v);
    for (Vertex w = 0; w < nst.right_size; ++w)
        if (next.provenance[static_cast<size_t>(nst.to_union(Side::Right, w))].kind !=
            Provenance::Kind::Original)
            plan.new_right.push_back(w);
    if (plan.new_left.empty() || plan.new_right.empty())
        throw DomainError("COLOR_COUNT_MISMATCH", "operation colour realized on one side only");

    auto prev_var = [&](Vertex prev_union_left, Vertex prev_union_right) {
        const UnionStructure& pst = prev.structure;
        Vertex a = pst.to_local(prev_union_left);
        Vertex b = pst.to_local(prev_union_right);
        if (!prev_view.has_var(a, b))
            throw DomainError("VALIDATION_ERROR",
                              "descriptor constituent variable missing (endpoint colours disagree)");
        return prev_view.var(a, b);
    };

    for (Vertex v : plan.new_left)
        for (Vertex w : plan.new_right) {
            const Provenance& pv = next.provenance[static_cast<size_t>(v)];
            const Provenance& pw =
                next.provenance[static_cast<size_t>(nst.to_union(Side::Right, w))];
            LiftPlan::NewPair np;
            np.v = v;
            np.w = w;
            if (plan.op == OpKind::Pair) {
                np.desc = ExtensionDescriptor::pair(
                    prev_var(pv.parents.first, pw.parents.first),
                    prev_var(pv.parents.second, pw.parents.second));
            } else {
                if (pv.members.size() != pw.members.size())
                    throw DomainError("VALIDATION_ERROR", "unequal SCC sizes across sides");
                std::vector<VariableId> vars;
                for (Vertex a : pv.members)
                    for (Vertex b : pw.members) vars.push_back(prev_var(a, b));
                std::sort(vars.begin(), vars.end());
                np.desc = ExtensionDescriptor::scc(vars, static_cast<long>(pv.members.size()));
            }
            plan.new_pairs.push_back(std::move(np));
        }
    long bound = static_cast<long>(nst.left_size) * nst.left_size;
    if (static_cast<long>(plan.new_pairs.size()) > bound)
        throw DomainError("VALIDATION_ERROR", "extension count exceeds |V(G')|^2");
    return plan;
}

namespace {

struct LiftWork {
    DeriveCtx& ctx;  // previous-state derivation context
    const CloudState& prev;
    const CloudState& next;
    const LiftPlan& plan;
    SystemView& nv;
    std::map<std::pair<Vertex, Vertex>, int> ext_index;  // (v,w) next-local -> ext id
    int inf;  // max_iteration allowing any stable separation

    int ext_step(Vertex v, Vertex w) const {
        return ctx.pb.ext_intro_step(ext_index.at({v, w}));
    }
    VariableId ext_var(Vertex v, Vertex w) const {
        return VariableId::ext(ext_index.at({v, w}));
    }
    const Provenance& prov_left(Vertex v) const {
        return next.provenance[static_cast<size_t>(v)];
    }
    const Provenance& prov_right(Vertex w) const {
        return next.provenance[static_cast<size_t>(next.structure.to_union(Side::Right, w))];
    }
    // previous-state side-local index of a previous-union vertex
    Vertex ploc(Vertex prev_union) const { return prev.structure.to_local(prev_union); }
};

int lin_acc2(DeriveCtx& ctx, int acc, int step, const Rational& coef) {
    if (acc < 0) {
        if (coef == 1) return step;
        return ctx.pb.append(ctx.pb.poly(step).scaled(coef),
                             Justification::lin(step, coef, step, 0));
    }
    return ctx.pb.append(Polynomial::add_scaled(ctx.pb.poly(acc), ctx.pb.poly(step), 1, coef),
                         Justification::lin(acc, 1, step, coef));
}

int resolve_handle(DeriveCtx& ctx, Handle& h) {
    if (h.step < 0) h.step = ctx.pb.axiom_step(h.axiom);
    return h.step;
}

// Axiom family (5): row axiom for a new right vertex, pair operation.
int lift_row_pair(LiftWork& lw, Vertex w) {
    DeriveCtx& ctx = lw.ctx;
    const SystemView& pv = ctx.sys;
    const ColorHistory& h = *pv.hist;
    const Provenance& pw = lw.prov_right(w);
    Vertex w1 = lw.ploc(pw.parents.first), w2 = lw.ploc(pw.parents.second);
    int row2 = resolve_handle(ctx, ctx.sys.row[static_cast<size_t>(w2)]);
    int acc = -1;
    const auto& lefts1 = pv.partners_right[static_cast<size_t>(w1)];
    const auto& lefts2 = pv.partners_right[static_cast<size_t>(w2)];
    for (Vertex v1 : lefts1) {
        int t = ctx.pb.append(Polynomial::mul_var(ctx.pb.poly(row2), pv.var(v1, w1)),
                              Justification::mul(row2, pv.var(v1, w1)));
        acc = lin_acc2(ctx, acc, t, 1);
    }
    for (Vertex v1 : lefts1)
        for (Vertex v2 : lefts2) {
            Vertex u1 = lw.prev.structure.to_union(Side::Left, v1);
            Vertex u2 = lw.prev.structure.to_union(Side::Left, v2);
            if (h.stable_color(u1, u2) == lw.plan.color) continue;
            int ms = derive_term(ctx, Monomial::var(pv.var(v1, w1)).times(pv.var(v2, w2)), lw.inf);
            acc = lin_acc2(ctx, acc, ms, -1);
        }
    acc = lin_acc2(ctx, acc, resolve_handle(ctx, ctx.sys.row[static_cast<size_t>(w1)]), 1);
    for (Vertex v : lw.plan.new_left) acc = lin_acc2(ctx, acc, lw.ext_step(v, w), 1);
    return acc;
}

// Axiom family (6): column axiom for a new left vertex, pair operation.
int lift_col_pair(LiftWork& lw, Vertex v) {
    DeriveCtx& ctx = lw.ctx;
    const SystemView& pv = ctx.sys;
    const ColorHistory& h = *pv.hist;
    const Provenance& pvv = lw.prov_left(v);
    Vertex v1 = lw.ploc(pvv.parents.first), v2 = lw.ploc(pvv.parents.second);
    int col2 = resolve_handle(ctx, ctx.sys.col[static_cast<size_t>(v2)]);
    int acc = -1;
    const auto& rights1 = pv.partners_left[static_cast<size_t>(v1)];
    const auto& rights2 = pv.partners_left[static_cast<size_t>(v2)];
    for (Vertex w1 : rights1) {
        int t = ctx.pb.append(Polynomial::mul_var(ctx.pb.poly(col2), pv.var(v1, w1)),
                              Justification::mul(col2, pv.var(v1, w1)));
        acc = lin_acc2(ctx, acc, t, 1);
    }
    for (Vertex w1 : rights1)
        for (Vertex w2 : rights2) {
            Vertex u1 = lw.prev.structure.to_union(Side::Right, w1);
            Vertex u2 = lw.prev.structure.to_union(Side::Right, w2);
            if (h.stable_color(u1, u2) == lw.plan.color) continue;
            int ms = derive_term(ctx, Monomial::var(pv.var(v1, w1)).times(pv.var(v2, w2)), lw.inf);
            acc = lin_acc2(ctx, acc, ms, -1);
        }
    acc = lin_acc2(ctx, acc, resolve_handle(ctx, ctx.sys.col[static_cast<size_t>(v1)]), 1);
    for (Vertex w : lw.plan.new_right) acc = lin_acc2(ctx, acc, lw.ext_step(v, w), 1);
    return acc;
}

// Diagonal colour (at the stable layer) of contraction members, and the set
// of removed vertices per side.
struct SccInfo {
    std::vector<char> removed_left, removed_right;  // prev side-local
    long n = 0;                                     // common SCC size
};

SccInfo scc_info(const LiftWork& lw) {
    SccInfo info;
    info.removed_left.assign(static_cast<size_t>(lw.prev.structure.left_size), 0);
    info.removed_right.assign(static_cast<size_t>(lw.prev.structure.right_size), 0);
    for (Vertex v : lw.plan.new_left) {
        const auto& mem = lw.prov_left(v).members;
        info.n = static_cast<long>(mem.size());
        for (Vertex m : mem) info.removed_left[static_cast<size_t>(lw.ploc(m))] = 1;
    }
    for (Vertex w : lw.plan.new_right)
        for (Vertex m : lw.prov_right(w).members)
            info.removed_right[static_cast<size_t>(lw.ploc(m))] = 1;
    return info;
}

// Axiom family (5), contraction: average the member rows after cancelling
// variables that pair members with non-members.
int lift_row_scc(LiftWork& lw, Vertex w, const SccInfo& info) {
    DeriveCtx& ctx = lw.ctx;
    const SystemView& pv = ctx.sys;
    const auto& mem = lw.prov_right(w).members;
    Rational inv(1, info.n);
    inv.canonicalize();
    ctx.pb.note_denominator(info.n);
    int acc = -1;
    for (Vertex mu : mem) {
        Vertex wp = lw.ploc(mu);
        int star = resolve_handle(ctx, ctx.sys.row[static_cast<size_t>(wp)]);
        for (Vertex vp : pv.partners_right[static_cast<size_t>(wp)]) {
            if (info.removed_left[static_cast<size_t>(vp)]) continue;
            int ms = derive_position(ctx, {{vp, wp}});
            star = lin_acc2(ctx, star, ms, -1);
        }
        acc = lin_acc2(ctx, acc, star, inv);
    }
    for (Vertex v : lw.plan.new_left) acc = lin_acc2(ctx, acc, lw.ext_step(v, w), 1);
    return acc;
}

int lift_col_scc(LiftWork& lw, Vertex v, const SccInfo& info) {
    DeriveCtx& ctx = lw.ctx;
    const SystemView& pv = ctx.sys;
    const auto& mem = lw.prov_left(v).members;
    Rational inv(1, info.n);
    inv.canonicalize();
    ctx.pb.note_denominator(info.n);
    int acc = -1;
    for (Vertex mu : mem) {
        Vertex vp = lw.ploc(mu);
        int star = resolve_handle(ctx, ctx.sys.col[static_cast<size_t>(vp)]);
        for (Vertex wp : pv.partners_left[static_cast<size_t>(vp)]) {
            if (info.removed_right[static_cast<size_t>(wp)]) continue;
            int ms = derive_position(ctx, {{vp, wp}});
            star = lin_acc2(ctx, star, ms, -1);
        }
        acc = lin_acc2(ctx, acc, star, inv);
    }
    for (Vertex w : lw.plan.new_right) acc = lin_acc2(ctx, acc, lw.ext_step(v, w), 1);
    return acc;
}

// Row/column axioms of surviving vertices after a contraction: drop the
// removed partners.
int fix_row_scc(LiftWork& lw, Vertex prev_w, const SccInfo& info) {
    DeriveCtx& ctx = lw.ctx;
    int acc = resolve_handle(ctx, ctx.sys.row[static_cast<size_t>(prev_w)]);
    for (Vertex vp : ctx.sys.partners_right[static_cast<size_t>(prev_w)]) {
        if (!info.removed_left[static_cast<size_t>(vp)]) continue;
        int ms = derive_position(ctx, {{vp, prev_w}});
        acc = lin_acc2(ctx, acc, ms, -1);
    }
    return acc;
}

int fix_col_scc(LiftWork& lw, Vertex prev_v, const SccInfo& info) {
    DeriveCtx& ctx = lw.ctx;
    int acc = resolve_handle(ctx, ctx.sys.col[static_cast<size_t>(prev_v)]);
    for (Vertex wp : ctx.sys.partners_left[static_cast<size_t>(prev_v)]) {
        if (!info.removed_right[static_cast<size_t>(wp)]) continue;
        int ms = derive_position(ctx, {{prev_v, wp}});
        acc = lin_acc2(ctx, acc, ms, -1);
    }
    return acc;
}

// Axiom family (7): a new pair against an old variable.
int lift_local_new_old(LiftWork& lw, Vertex v, Vertex w, VariableId old_var) {
    DeriveCtx& ctx = lw.ctx;
    int es = lw.ext_step(v, w);
    int t1 = ctx.pb.append(Polynomial::mul_var(ctx.pb.poly(es), old_var),
                           Justification::mul(es, old_var));
    const Polynomial& f = ctx.pb.proof().ext_table[static_cast<size_t>(lw.ext_index.at({v, w}))].f;
    int acc = t1;
    // cancel X_old * (every monomial of f); coefficient from f
    for (const auto& [m, c] : f.terms) {
        int ms = derive_term(ctx, m.times(Monomial::var(old_var)), lw.inf);
        acc = lin_acc2(ctx, acc, ms, c);
    }
    return acc;
}

// Axiom family (8), pair operation: equality-type failure between two new
// pairs sharing one component.
int lift_local_new_new_pair(LiftWork& lw, Vertex v, Vertex w, Vertex v2, Vertex w2) {
    DeriveCtx& ctx = lw.ctx;
    const SystemView& pv = ctx.sys;
    auto pvar = [&](Vertex pu_left, Vertex pu_right) {
        return pv.var(lw.ploc(pu_left), lw.ploc(pu_right));
    };
    const Provenance& provv = lw.prov_left(v);
    const Provenance& provw = lw.prov_right(w);
    const Provenance& provv2 = lw.prov_left(v2);
    const Provenance& provw2 = lw.prov_right(w2);
    if (v == v2) {
        // pair(v) = (a1,a2); pair(w) = (b1,b2); pair(w') = (c1,c2)
        Vertex a1 = provv.parents.first, a2 = provv.parents.second;
        Vertex b1 = provw.parents.first, b2 = provw.parents.second;
        Vertex c1 = provw2.parents.first, c2 = provw2.parents.second;
        bool first_differs = b1 != c1;
        VariableId bridge = first_differs ? pvar(a1, c1) : pvar(a2, c2);
        VariableId other = first_differs ? pvar(a2, c2) : pvar(a1, c1);
        int es = lw.ext_step(v, w);
        int s1 = ctx.pb.append(Polynomial::mul_var(ctx.pb.poly(es), bridge),
                               Justification::mul(es, bridge));
        Monomial cancel = Monomial::var(bridge).times(pvar(a1, b1)).times(pvar(a2, b2));
        int ms = derive_term(ctx, cancel, lw.inf);
        int s3 = lin_acc2(ctx, s1, ms, 1);  // bridge * X_f(vw)
        int s4 = ctx.pb.append(Polynomial::mul_var(ctx.pb.poly(s3), other),
                               Justification::mul(s3, other));
        int es2 = lw.ext_step(v2, w2);
        VariableId xf = lw.ext_var(v, w);
        int s5 = ctx.pb.append(Polynomial::mul_var(ctx.pb.poly(es2), xf),
                               Justification::mul(es2, xf));
        return lin_acc2(ctx, s5, s4, 1);
    }
    // w == w2, v != v2 (mirror)
    assert(w == w2);
    Vertex a1 = provv.parents.first, a2 = provv.parents.second;
    Vertex b1 = provw.parents.first, b2 = provw.parents.second;
    Vertex d1 = provv2.parents.first, d2 = provv2.parents.second;
    bool first_differs = a1 != d1;
    VariableId bridge = first_differs ? pvar(d1, b1) : pvar(d2, b2);
    VariableId other = first_differs ? pvar(d2, b2) : pvar(d1, b1);
    int es = lw.ext_step(v, w);
    int s1 = ctx.pb.append(Polynomial::mul_var(ctx.pb.poly(es), bridge),
                           Justification::mul(es, bridge));
    Monomial cancel = Monomial::var(bridge).times(pvar(a1, b1)).times(pvar(a2, b2));
    int ms = derive_term(ctx, cancel, lw.inf);
    int s3 = lin_acc2(ctx, s1, ms, 1);
    int s4 = ctx.pb.append(Polynomial::mul_var(ctx.pb.poly(s3), other),
                           Justification::mul(s3, other));
    int es2 = lw.ext_step(v2, w2);
    VariableId xf = lw.ext_var(v, w);
    int s5 = ctx.pb.append(Polynomial::mul_var(ctx.pb.poly(es2), xf),
                           Justification::mul(es2, xf));
    return lin_acc2(ctx, s5, s4, 1);
}

// Axiom family (8), contraction: uniform over equality-type and relation
// mismatches. Multiply the extension axiom of (v,w) into the weighted member
// sum of (v2,w2), cancel the member-level products, close with the second
// extension axiom.
int lift_local_new_new_scc(LiftWork& lw, Vertex v, Vertex w, Vertex v2, Vertex w2,
                           const SccInfo& info) {
    DeriveCtx& ctx = lw.ctx;
    const SystemView& pv = ctx.sys;
    Rational inv(1, info.n);
    inv.canonicalize();
    ctx.pb.note_denominator(info.n);
    const auto& amem = lw.prov_left(v2).members;
    const auto& bmem = lw.prov_right(w2).members;
    const auto& cmem = lw.prov_left(v).members;
    const auto& dmem = lw.prov_right(w).members;
    int es = lw.ext_step(v, w);
    int acc = -1;
    for (Vertex a : amem)
        for (Vertex b : bmem) {
            VariableId xab = pv.var(lw.ploc(a), lw.ploc(b));
            int q = ctx.pb.append(Polynomial::mul_var(ctx.pb.poly(es), xab),
                                  Justification::mul(es, xab));
            for (Vertex c : cmem)
                for (Vertex d : dmem) {
                    VariableId xcd = pv.var(lw.ploc(c), lw.ploc(d));
                    int ms = derive_term(ctx, Monomial::var(xab).times(xcd), lw.inf);
                    q = lin_acc2(ctx, q, ms, inv);
                }
            acc = lin_acc2(ctx, acc, q, inv);
        }
    int es2 = lw.ext_step(v2, w2);
    VariableId xf = lw.ext_var(v, w);
    int s5 = ctx.pb.append(Polynomial::mul_var(ctx.pb.poly(es2), xf),
                           Justification::mul(es2, xf));
    return lin_acc2(ctx, s5, acc, 1);
}

}  // namespace

LiftResult lift_axioms(DeriveCtx& prev_ctx, const CloudState& prev, const CloudState& next,
                       const LiftPlan& plan) {
    LiftResult out;
    LiftWork lw{prev_ctx, prev, next, plan, out.view, {}, prev_ctx.sys.hist->stable_index + 1};
    const UnionStructure& nst = next.structure;
    ProofBuilder& pb = prev_ctx.pb;

    // prerequisite: equal per-vertex-colour counts in the previous state
    {
        PisoSystem probe = piso(prev.structure);
        if (probe.color_count_mismatch)
            throw DomainError("COLOR_COUNT_MISMATCH", "previous state has unequal colour counts");
    }

    out.ext_base = static_cast<int>(pb.proof().ext_table.size());
    for (const auto& np : plan.new_pairs)
        lw.ext_index[{np.v, np.w}] = pb.add_extension(np.desc);
    out.ext_count = static_cast<int>(plan.new_pairs.size());

    // the directly generated system is the reference for variable classes and
    // the faithfulness check
    out.direct = piso(nst);
    SystemView& nv = out.view;
    nv.st = &nst;
    nv.hist = &next.history;
    nv.partners_left = out.direct.partners_of_left;
    nv.partners_right = out.direct.partners_of_right;
    nv.varmap.assign(static_cast<size_t>(nst.left_size),
                     std::vector<VariableId>(static_cast<size_t>(nst.right_size)));
    nv.varok.assign(static_cast<size_t>(nst.left_size),
                    std::vector<char>(static_cast<size_t>(nst.right_size), 0));

    auto is_new_left = [&](Vertex v) {
        return lw.prov_left(v).kind != Provenance::Kind::Original;
    };
    auto is_new_right = [&](Vertex w) {
        return lw.prov_right(w).kind != Provenance::Kind::Original;
    };
    for (Vertex v = 0; v < nst.left_size; ++v)
        for (Vertex w : nv.partners_left[static_cast<size_t>(v)]) {
            bool nl = is_new_left(v), nr = is_new_right(w);
            if (nl != nr)
                throw DomainError("VALIDATION_ERROR", "new vertex shares a colour with an old one");
            VariableId id;
            if (nl) {
                id = lw.ext_var(v, w);
            } else {
                Vertex pv2 = lw.ploc(lw.prov_left(v).prev);
                Vertex pw2 = lw.ploc(lw.prov_right(w).prev);
                if (!prev_ctx.sys.has_var(pv2, pw2))
                    throw DomainError("VALIDATION_ERROR", "old pair lost its variable");
                id = prev_ctx.sys.var(pv2, pw2);
            }
            nv.varmap[static_cast<size_t>(v)][static_cast<size_t>(w)] = id;
            nv.varok[static_cast<size_t>(v)][static_cast<size_t>(w)] = 1;
            nv.rev[id.raw] = {v, w};
        }

    // renaming: proof variables -> next-state original names
    auto rename_poly = [&](const Polynomial& p) {
        Polynomial q;
        for (const auto& [m, c] : p.terms) {
            Monomial rm;
            for (VariableId x : m.factors) {
                auto [a, b] = nv.rev.at(x.raw);
                rm = rm.times(VariableId::orig(a, b));
            }
            q.terms.push_back({rm, c});
        }
        std::sort(q.terms.begin(), q.terms.end(),
                  [](const auto& l, const auto& r) { return l.first < r.first; });
        return q;
    };
    auto expect = [&](const Handle& h, const Polynomial& reference, const char* what) {
        Polynomial got = rename_poly(handle_poly(pb, pb.input_axioms(), h));
        if (!(got == reference))
            throw DomainError("VALIDATION_ERROR",
                              std::string("lifted axiom mismatch (") + what + ")");
    };

    SccInfo info;
    if (plan.op == OpKind::Scc) info = scc_info(lw);

    // rows
    nv.row.resize(static_cast<size_t>(nst.right_size));
    for (Vertex w = 0; w < nst.right_size; ++w) {
        Handle h;
        if (is_new_right(w)) {
            h.step = plan.op == OpKind::Pair ? lift_row_pair(lw, w) : lift_row_scc(lw, w, info);
        } else {
            Vertex pw2 = lw.ploc(lw.prov_right(w).prev);
            if (plan.op == OpKind::Pair)
                h = prev_ctx.sys.row[static_cast<size_t>(pw2)];
            else
                h.step = fix_row_scc(lw, pw2, info);
        }
        expect(h, out.direct.axioms[static_cast<size_t>(out.direct.row_index(w))].poly, "row");
        nv.row[static_cast<size_t>(w)] = h;
    }
    // columns
    nv.col.resize(static_cast<size_t>(nst.left_size));
    for (Vertex v = 0; v < nst.left_size; ++v) {
        Handle h;
        if (is_new_left(v)) {
            h.step = plan.op == OpKind::Pair ? lift_col_pair(lw, v) : lift_col_scc(lw, v, info);
        } else {
            Vertex pv2 = lw.ploc(lw.prov_left(v).prev);
            if (plan.op == OpKind::Pair)
                h = prev_ctx.sys.col[static_cast<size_t>(pv2)];
            else
                h.step = fix_col_scc(lw, pv2, info);
        }
        expect(h, out.direct.axioms[static_cast<size_t>(out.direct.col_index(v))].poly, "col");
        nv.col[static_cast<size_t>(v)] = h;
    }
    // locals, driven by the directly generated system
    for (const auto& [next_mono, idx] : out.direct.local_index()) {
        // classify by the pebbles of the monomial (next-state original names)
        std::vector<VertexPair> pebbles;
        for (VariableId x : next_mono.factors) {
            VertexPair p{x.left(), x.right()};
            if (pebbles.empty() || pebbles.back() != p) pebbles.push_back(p);
        }
        int new_count = 0;
        for (auto [a, b] : pebbles) new_count += is_new_left(a) ? 1 : 0;
        Handle h;
        Monomial proof_mono;
        for (VertexPair p : pebbles) {
            VariableId id = nv.var(p.first, p.second);
            proof_mono = proof_mono.times(id);
            if (next_mono.factors.size() == 2 && pebbles.size() == 1)
                proof_mono = proof_mono.times(id);  // squared local axiom
        }
        if (new_count == 0) {
            auto it = prev_ctx.sys.local.find(proof_mono);
            if (it == prev_ctx.sys.local.end())
                throw DomainError("VALIDATION_ERROR", "old local axiom missing from previous state");
            h = it->second;
        } else if (new_count == 1 && pebbles.size() == 2) {
            bool first_new = is_new_left(pebbles[0].first);
            VertexPair np = first_new ? pebbles[0] : pebbles[1];
            VertexPair op = first_new ? pebbles[1] : pebbles[0];
            h.step = lift_local_new_old(lw, np.first, np.second,
                                        nv.var(op.first, op.second));
        } else if (new_count == static_cast<int>(pebbles.size()) && pebbles.size() == 2) {
            if (plan.op == OpKind::Pair)
                h.step = lift_local_new_new_pair(lw, pebbles[0].first, pebbles[0].second,
                                                 pebbles[1].first, pebbles[1].second);
            else
                h.step = lift_local_new_new_scc(lw, pebbles[0].first, pebbles[0].second,
                                                pebbles[1].first, pebbles[1].second, info);
        } else {
            // a single new pebble with a squared monomial would be a self-loop
            // mismatch on fresh vertices, which the operations cannot create
            throw DomainError("VALIDATION_ERROR", "unexpected local axiom shape after lift");
        }
        expect(h, out.direct.axioms[static_cast<size_t>(idx)].poly, "local");
        nv.local[proof_mono] = h;
    }
    return out;
}

}  // namespace epciso
