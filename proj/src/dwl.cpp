#include "epciso/dwl.hpp"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <sstream>

namespace epciso {

std::string DwlTrace::serialize() const {
    std::ostringstream out;
    out << "dwltrace v1 budget_vertices=" << budget_vertices << " budget_steps=" << budget_steps
        << "\n";
    for (const auto& op : ops)
        out << (op.kind == OpKind::Pair ? "pair " : "scc ") << op.color << "\n";
    return out.str();
}

DwlTrace parse_trace(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    DwlTrace t;
    bool header = false;
    int lineno = 0;
    auto fail = [&](const std::string& msg) -> void {
        throw DomainError("PARSE_ERROR", "trace line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (!header) {
            if (tok != "dwltrace") fail("missing dwltrace header");
            std::string ver, bv, bs;
            ls >> ver >> bv >> bs;
            if (ver != "v1") fail("unsupported version");
            if (bv.rfind("budget_vertices=", 0) != 0 || bs.rfind("budget_steps=", 0) != 0)
                fail("bad budget fields");
            t.budget_vertices = std::stoi(bv.substr(16));
            t.budget_steps = std::stoi(bs.substr(13));
            if (t.budget_vertices <= 0 || t.budget_steps <= 0) fail("budget must be positive");
            header = true;
            continue;
        }
        DwlOp op;
        if (tok == "pair")
            op.kind = OpKind::Pair;
        else if (tok == "scc")
            op.kind = OpKind::Scc;
        else
            fail("unknown op " + tok);
        if (!(ls >> op.color)) fail("missing colour key");
        t.ops.push_back(op);
    }
    if (!header) throw DomainError("PARSE_ERROR", "empty trace file");
    return t;
}

DwlTrace parse_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("PARSE_ERROR", "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_trace(buf.str());
}

namespace {

// lexicographically smallest binary string not yet used as a relation name
std::string fresh_relation_name(const Structure& s) {
    std::set<std::string> used;
    for (const auto& r : s.relations) used.insert(r.name);
    for (int len = 1;; ++len) {
        for (unsigned long mask = 0; mask < (1ul << len); ++mask) {
            std::string name;
            for (int b = len - 1; b >= 0; --b) name += (mask >> b) & 1ul ? '1' : '0';
            if (!used.count(name)) return name;
        }
    }
}

void finish_state(CloudState& st, int jobs) {
    st.structure.validate();
    st.history = refine(st.structure, jobs);
    st.sketch_left = restrict_sketch(st.history, Side::Left);
    st.sketch_right = restrict_sketch(st.history, Side::Right);
    // normalised runs never create crossing relation pairs
    for (const auto& r : st.structure.s.relations)
        for (auto [u, v] : r.pairs)
            assert(st.structure.side[static_cast<size_t>(u)] == st.structure.side[static_cast<size_t>(v)]);
}

void check_color(const CloudState& state, ColorId r) {
    const Layer& st = state.history.stable();
    if (r < 0 || r >= st.num_colors)
        throw DomainError("UNKNOWN_COLOR", "colour " + std::to_string(r));
    if (st.is_cross[static_cast<size_t>(r)])
        throw DomainError("NOT_NORMALISED", "operation on a crossing colour");
}

}  // namespace

CloudState initial_state(const Structure& g, const Structure& h, int jobs) {
    CloudState st;
    st.structure = disjoint_union(g, h);
    st.provenance.assign(static_cast<size_t>(st.structure.s.n), {});
    for (Vertex v = 0; v < st.structure.s.n; ++v) {
        st.provenance[static_cast<size_t>(v)].kind = Provenance::Kind::Original;
        st.provenance[static_cast<size_t>(v)].prev = v;
    }
    st.prev_to_cur.clear();
    finish_state(st, jobs);
    return st;
}

CloudState exec_pair(const CloudState& state, ColorId r, const DwlTrace& budget, int jobs) {
    check_color(state, r);
    if (state.step_count + 1 > budget.budget_steps)
        throw DomainError("BUDGET_EXCEEDED", "step budget");
    const UnionStructure& old = state.structure;
    auto pairs = state.history.color_class(r);
    std::vector<VertexPair> leftp, rightp;
    for (auto [u, v] : pairs)
        (old.is_left(u) ? leftp : rightp).push_back({u, v});
    // colour classes never mix sides after check_color; pairs are already lex
    // sorted per side by color_class order
    int nl = old.left_size + static_cast<int>(leftp.size());
    int nr = old.right_size + static_cast<int>(rightp.size());
    if (nl + nr > budget.budget_vertices)
        throw DomainError("BUDGET_EXCEEDED", "vertex budget");

    CloudState next;
    next.step_count = state.step_count + 1;
    next.op_kind = OpKind::Pair;
    next.op_color = r;
    UnionStructure& u = next.structure;
    u.left_size = nl;
    u.right_size = nr;
    u.s.n = nl + nr;
    u.side.assign(static_cast<size_t>(u.s.n), Side::Left);
    for (Vertex v = nl; v < u.s.n; ++v) u.side[static_cast<size_t>(v)] = Side::Right;

    next.prev_to_cur.assign(static_cast<size_t>(old.s.n), -1);
    for (Vertex v = 0; v < old.left_size; ++v) next.prev_to_cur[static_cast<size_t>(v)] = v;
    for (Vertex v = old.left_size; v < old.s.n; ++v)
        next.prev_to_cur[static_cast<size_t>(v)] = v - old.left_size + nl;
    next.provenance.assign(static_cast<size_t>(u.s.n), {});
    for (Vertex v = 0; v < old.s.n; ++v) {
        auto& p = next.provenance[static_cast<size_t>(next.prev_to_cur[static_cast<size_t>(v)])];
        p.kind = Provenance::Kind::Original;
        p.prev = v;
    }
    std::vector<Vertex> new_ids;  // aligned with leftp then rightp
    for (size_t i = 0; i < leftp.size(); ++i) {
        Vertex id = old.left_size + static_cast<Vertex>(i);
        auto& p = next.provenance[static_cast<size_t>(id)];
        p.kind = Provenance::Kind::Pair;
        p.parents = leftp[i];
        new_ids.push_back(id);
    }
    for (size_t i = 0; i < rightp.size(); ++i) {
        Vertex id = nl + old.right_size + static_cast<Vertex>(i);
        auto& p = next.provenance[static_cast<size_t>(id)];
        p.kind = Provenance::Kind::Pair;
        p.parents = rightp[i];
        new_ids.push_back(id);
    }

    // old relations, reindexed
    for (const auto& rel : old.s.relations) {
        Relation nr2;
        nr2.name = rel.name;
        nr2.is_color = rel.is_color;
        for (auto [a, b] : rel.pairs)
            nr2.pairs.insert({next.prev_to_cur[static_cast<size_t>(a)],
                              next.prev_to_cur[static_cast<size_t>(b)]});
        u.s.relations.push_back(std::move(nr2));
    }
    // E_left / E_right, created empty on first use
    auto ensure_rel = [&](const std::string& name) -> Relation& {
        for (auto& rel : u.s.relations)
            if (rel.name == name) return rel;
        Relation fresh;
        fresh.name = name;
        u.s.relations.push_back(std::move(fresh));
        return u.s.relations.back();
    };
    {
        ensure_rel("E_left");
        ensure_rel("E_right");
        Relation* el = nullptr;
        Relation* er = nullptr;
        for (auto& rel : u.s.relations) {
            if (rel.name == "E_left") el = &rel;
            if (rel.name == "E_right") er = &rel;
        }
        for (Vertex id : new_ids) {
            auto [a, b] = next.provenance[static_cast<size_t>(id)].parents;
            el->pairs.insert({next.prev_to_cur[static_cast<size_t>(a)], id});
            er->pairs.insert({next.prev_to_cur[static_cast<size_t>(b)], id});
        }
    }
    // D_R marks the new vertices; fresh lexicographically-least binary name
    {
        Relation dr;
        dr.name = fresh_relation_name(u.s);
        dr.is_color = true;
        for (Vertex id : new_ids) dr.pairs.insert({id, id});
        u.s.relations.push_back(std::move(dr));
    }
    std::sort(u.s.relations.begin(), u.s.relations.end(),
              [](const Relation& a, const Relation& b) { return a.name < b.name; });
    finish_state(next, jobs);
    // each new vertex has exactly one E_left and one E_right in-edge
    {
        const Relation* el = u.s.find("E_left");
        const Relation* er = u.s.find("E_right");
        for (Vertex id : new_ids) {
            int cl = 0, cr = 0;
            for (auto [a, b] : el->pairs)
                if (b == id) ++cl;
            for (auto [a, b] : er->pairs)
                if (b == id) ++cr;
            assert(cl == 1 && cr == 1);
            (void)cl;
            (void)cr;
        }
    }
    return next;
}

CloudState exec_scc(const CloudState& state, ColorId r, const DwlTrace& budget, int jobs) {
    check_color(state, r);
    if (state.step_count + 1 > budget.budget_steps)
        throw DomainError("BUDGET_EXCEEDED", "step budget");
    const UnionStructure& old = state.structure;
    auto sccs = sccs_of_color(state.history, r);
    if (sccs.empty()) throw DomainError("NO_SCCS", "colour has no strongly connected components");

    std::vector<int> scc_of(static_cast<size_t>(old.s.n), -1);
    for (size_t i = 0; i < sccs.size(); ++i)
        for (Vertex v : sccs[i]) scc_of[static_cast<size_t>(v)] = static_cast<int>(i);

    // new universe per side: surviving vertices in order, then contracted
    // components by least member
    CloudState next;
    next.step_count = state.step_count + 1;
    next.op_kind = OpKind::Scc;
    next.op_color = r;
    UnionStructure& u = next.structure;
    next.prev_to_cur.assign(static_cast<size_t>(old.s.n), -1);
    std::vector<Vertex> scc_new_id(sccs.size(), -1);
    std::vector<Provenance> prov;
    auto build_side = [&](Side sd) {
        for (Vertex v = 0; v < old.s.n; ++v) {
            if (old.side[static_cast<size_t>(v)] != sd || scc_of[static_cast<size_t>(v)] >= 0) continue;
            next.prev_to_cur[static_cast<size_t>(v)] = static_cast<Vertex>(prov.size());
            Provenance p;
            p.kind = Provenance::Kind::Original;
            p.prev = v;
            prov.push_back(std::move(p));
        }
        for (size_t i = 0; i < sccs.size(); ++i) {
            if (old.side[static_cast<size_t>(sccs[i][0])] != sd) continue;
            scc_new_id[i] = static_cast<Vertex>(prov.size());
            Provenance p;
            p.kind = Provenance::Kind::Scc;
            p.members = sccs[i];
            prov.push_back(std::move(p));
            for (Vertex v : sccs[i]) next.prev_to_cur[static_cast<size_t>(v)] = scc_new_id[i];
        }
    };
    build_side(Side::Left);
    u.left_size = static_cast<int>(prov.size());
    build_side(Side::Right);
    u.s.n = static_cast<int>(prov.size());
    u.right_size = u.s.n - u.left_size;
    if (u.s.n > budget.budget_vertices) throw DomainError("BUDGET_EXCEEDED", "vertex budget");
    u.side.assign(static_cast<size_t>(u.s.n), Side::Left);
    for (Vertex v = u.left_size; v < u.s.n; ++v) u.side[static_cast<size_t>(v)] = Side::Right;
    next.provenance = std::move(prov);

    // every relation rewritten through the contraction map
    for (const auto& rel : old.s.relations) {
        Relation nr2;
        nr2.name = rel.name;
        nr2.is_color = rel.is_color;
        for (auto [a, b] : rel.pairs)
            nr2.pairs.insert({next.prev_to_cur[static_cast<size_t>(a)],
                              next.prev_to_cur[static_cast<size_t>(b)]});
        u.s.relations.push_back(std::move(nr2));
    }
    {
        Relation dr;
        dr.name = fresh_relation_name(u.s);
        dr.is_color = true;
        for (Vertex id : scc_new_id) dr.pairs.insert({id, id});
        u.s.relations.push_back(std::move(dr));
    }
    std::sort(u.s.relations.begin(), u.s.relations.end(),
              [](const Relation& a, const Relation& b) { return a.name < b.name; });

    finish_state(next, jobs);
    return next;
}

TraceRun run_trace(const Structure& g, const Structure& h, const DwlTrace& trace, int jobs) {
    TraceRun run;
    run.states.push_back(initial_state(g, h, jobs));
    for (const auto& op : trace.ops) {
        if (run.states.back().distinguished()) break;
        const CloudState& cur = run.states.back();
        run.states.push_back(op.kind == OpKind::Pair ? exec_pair(cur, op.color, trace, jobs)
                                                     : exec_scc(cur, op.color, trace, jobs));
        ++run.ops_executed;
    }
    run.outcome = run.states.back().distinguished() ? TraceOutcome::Distinguished
                                                    : TraceOutcome::NotDistinguished;
    return run;
}

}  // namespace epciso
