#include "epciso/pipeline.hpp"

#include <chrono>
#include <memory>
#include <sstream>

namespace epciso {

std::string RefutationReport::to_text() const {
    std::ostringstream out;
    out << "outcome "
        << (outcome == Outcome::Refuted ? "REFUTED" : "NOT_DISTINGUISHED") << "\n";
    out << "states " << states << "\n";
    out << "ops_executed " << ops_executed << "\n";
    if (outcome == Outcome::Refuted) {
        out << "size " << metrics.size << "\n";
        out << "bit_complexity " << metrics.bit_complexity << "\n";
        out << "extensions " << metrics.extension_count << "\n";
        out << "max_degree " << metrics.max_degree << "\n";
        out << "denominator_atoms";
        for (long d : denominator_atoms) out << " " << d;
        out << "\n";
    }
    for (const auto& [name, ms] : timings_ms) out << "time_ms " << name << " " << ms << "\n";
    return out.str();
}

RefuteResult refute(const Structure& g, const Structure& h, const DwlTrace& trace, int jobs) {
    using clock = std::chrono::steady_clock;
    auto t0 = clock::now();
    auto elapsed = [&](clock::time_point since) {
        return std::chrono::duration<double, std::milli>(clock::now() - since).count();
    };

    RefuteResult out;
    std::vector<std::unique_ptr<CloudState>> states;
    states.push_back(std::make_unique<CloudState>(initial_state(g, h, jobs)));

    PisoSystem piso0 = piso(states[0]->structure);
    out.axioms.reserve(piso0.axioms.size());
    for (const auto& ax : piso0.axioms) out.axioms.push_back(ax);
    out.report.timings_ms.push_back({"setup", elapsed(t0)});

    ProofBuilder pb(out.proof, out.axioms);
    std::vector<std::unique_ptr<SystemView>> views;
    views.push_back(std::make_unique<SystemView>(
        make_state0_view(states[0]->structure, states[0]->history, piso0)));
    std::vector<std::unique_ptr<DeriveCtx>> ctxs;

    long vertex_square_sum =
        static_cast<long>(states[0]->structure.left_size) * states[0]->structure.left_size;
    size_t next_op = 0;
    bool refuted = false;
    for (;;) {
        CloudState& cur = *states.back();
        bool diverged = cur.distinguished();
        ctxs.push_back(std::make_unique<DeriveCtx>(pb, *views.back(), !diverged));
        if (diverged) {
            auto td = clock::now();
            int one = derive_one(*ctxs.back());
            if (!pb.poly(one).is_one())
                throw DomainError("VALIDATION_ERROR", "final derivation is not the 1-polynomial");
            out.report.timings_ms.push_back({"derive_one", elapsed(td)});
            refuted = true;
            break;
        }
        if (next_op >= trace.ops.size()) break;
        auto top = clock::now();
        const DwlOp& op = trace.ops[next_op++];
        states.push_back(std::make_unique<CloudState>(
            op.kind == OpKind::Pair ? exec_pair(cur, op.color, trace, jobs)
                                    : exec_scc(cur, op.color, trace, jobs)));
        CloudState& nxt = *states.back();
        vertex_square_sum += static_cast<long>(nxt.structure.left_size) * nxt.structure.left_size;
        LiftPlan plan = make_lift_plan(cur, nxt, *views.back());
        LiftResult lifted = lift_axioms(*ctxs.back(), cur, nxt, plan);
        views.push_back(std::make_unique<SystemView>(std::move(lifted.view)));
        views.back()->st = &nxt.structure;
        views.back()->hist = &nxt.history;
        out.report.timings_ms.push_back(
            {"op" + std::to_string(next_op) + "+lift", elapsed(top)});
    }
    out.report.states = static_cast<int>(states.size());
    out.report.ops_executed = static_cast<int>(next_op);
    for (long d : pb.denominator_atoms()) out.report.denominator_atoms.push_back(d);

    if (!refuted) {
        out.report.outcome = RefutationReport::Outcome::NotDistinguished;
        return out;
    }

    out.proof.mode = out.proof.ext_table.empty() ? Mode::MC3 : Mode::EPC3;
    out.proof.restricted_ext = !out.proof.ext_table.empty();
    // a refutation is only reported after an independent check pass
    auto tc = clock::now();
    CheckResult cr = check(out.proof, out.axioms);
    out.report.timings_ms.push_back({"check", elapsed(tc)});
    if (!cr.accepted || !cr.refutation)
        throw DomainError("VALIDATION_ERROR",
                          "emitted proof failed the checker: " + check_error_str(cr.error) +
                              " at step " + std::to_string(cr.failed_step) + " " + cr.detail);
    if (cr.metrics.extension_count > vertex_square_sum)
        throw DomainError("VALIDATION_ERROR", "extension count exceeds the state-size bound");
    out.report.outcome = RefutationReport::Outcome::Refuted;
    out.report.metrics = cr.metrics;
    out.report.timings_ms.push_back({"total", elapsed(t0)});
    return out;
}

}  // namespace epciso
