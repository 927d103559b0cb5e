#ifndef TBPP_MODEL_HPP
#define TBPP_MODEL_HPP

// Object model for timed basic parallel processes: clocks, nonterminals,
// guarded rules with multiset right-hand sides of size at most 2, and the
// queries asked of them. Models are immutable after construction and may be
// shared freely across threads.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tbpp/rational.hpp"

namespace tbpp {

// Interned identifiers: name plus dense index into the owning model's tables.
struct ClockId {
    std::string name;
    int index = -1;
};

struct NonterminalId {
    std::string name;
    int index = -1;
};

enum class Rel { Lt, Le, Eq, Ge, Gt };

const char* rel_str(Rel r);
// Does `value rel bound` hold?
bool rel_holds(const Rat& value, Rel r, const Rat& bound);

struct GuardAtom {
    int clock = 0;
    Rel rel = Rel::Eq;
    // Nonnegative in well-formed models; kept signed so validate() can report
    // violations injected programmatically.
    std::int64_t bound = 0;
};

// Conjunction of atoms; empty conjunction is the trivial constraint.
struct Guard {
    std::vector<GuardAtom> conjuncts;
    bool is_trivial() const { return conjuncts.empty(); }
};

// One update x := e where e is a clock or a nonnegative integer constant.
struct ClockUpdate {
    int target = 0;
    bool from_clock = false;
    int source_clock = 0;        // valid when from_clock
    std::int64_t constant = 0;   // valid when !from_clock
};

// Ordered sequence of updates, applied left to right.
struct Assignment {
    std::vector<ClockUpdate> updates;
    bool empty() const { return updates.empty(); }
};

struct Rule {
    int lhs = 0;
    Guard guard;
    Assignment assign;
    std::vector<int> rhs;  // nonterminal indices; size 0, 1 or 2
    bool is_vanishing() const { return rhs.empty(); }
    bool is_branching() const { return rhs.size() == 2; }
    bool is_unary() const { return rhs.size() == 1; }
};

enum class QueryMode { Reach, Cover, SimpleReach, SimpleCover, Nonempty, Ternary };

const char* query_mode_str(QueryMode m);

struct Query {
    QueryMode mode = QueryMode::Cover;
    int initial = 0;
    std::vector<int> targets;        // unary encoding: one entry per process
    std::optional<Rat> delta;        // ternary mode only
    int multiplicity_cap = 16;       // per-nonterminal target multiplicity cap
};

struct TbppModel {
    std::vector<ClockId> clocks;
    std::vector<NonterminalId> nonterminals;
    std::vector<Rule> rules;
    std::int64_t max_constant = 0;  // largest integer in any guard or assignment
    std::optional<Query> query;     // present when the source text declared one

    int clock_count() const { return static_cast<int>(clocks.size()); }
    int nonterminal_count() const { return static_cast<int>(nonterminals.size()); }
    bool is_ta() const;  // no branching rules

    int clock_index(const std::string& name) const;        // -1 if absent
    int nonterminal_index(const std::string& name) const;  // -1 if absent

    // Recomputes max_constant from rules; call after programmatic edits.
    void refresh_max_constant();
};

struct Diagnostic {
    std::string code;
    std::string message;
};

// Empty result iff all TbppModel invariants hold.
std::vector<Diagnostic> validate(const TbppModel& model);

// Rewrites constant updates x := k (k > 0) into resets, recording the last
// constant per clock in the nonterminal and shifting guard bounds by it.
// Tests whose shifted bound is negative collapse to true or false depending
// on the relation. Only control refinements reachable from some rule are
// materialized.
TbppModel desugar_constant_updates(const TbppModel& model);

// Replaces each branching rule X -[g;R]-> Y (+) Z with the two unary rules
// X -[g;R]-> Y and X -[g;R]-> Z. Vanishing rules are dropped unless
// keep_vanishing is set. The result has no branching rules.
TbppModel project_to_ta(const TbppModel& model, bool keep_vanishing = false);

// Multiplies every guard bound and constant update by `factor` (> 0).
// Used to turn rational query constants into integers.
TbppModel scale_constants(const TbppModel& model, const Int& factor);

// Rewrites branching rules that carry updates into an update-free branching
// rule behind a fresh intermediate nonterminal: X -[g;R]-> Y (+) Z becomes
// X -[g;R]-> W and W -[x=0...]-> Y (+) Z when R resets, which forces W to
// branch before any time elapses. Preserves reach/cover/vanish behaviour.
TbppModel normalize_branching_updates(const TbppModel& model);

// Canonical text form; parse(pretty_print(m)) reproduces m.
std::string pretty_print(const TbppModel& model);

// Evaluated guard under a valuation indexed by clock index.
bool guard_satisfied(const Guard& g, const std::vector<Rat>& valuation);

// Applies an assignment left-to-right to a valuation.
std::vector<Rat> apply_assignment(const Assignment& a, const std::vector<Rat>& valuation);

}  // namespace tbpp

#endif
