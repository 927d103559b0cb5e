#ifndef TBPP_SEMANTICS_HPP
#define TBPP_SEMANTICS_HPP

// Executable TBPP semantics over exact rationals: configurations, timed and
// discrete steps, derivation-tree checking, and a discretized brute-force
// explorer used as a sound (incomplete) positive oracle.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tbpp/model.hpp"

namespace tbpp {

struct Process {
    int nt = 0;
    std::vector<Rat> valuation;  // indexed by clock index
};

bool operator==(const Process& a, const Process& b);
bool process_less(const Process& a, const Process& b);

// Multiset of processes kept canonically sorted (nonterminal index, then
// lexicographic valuation) so equality is syntactic.
struct Configuration {
    std::vector<Process> procs;

    static Configuration of(std::vector<Process> ps);
    bool empty() const { return procs.empty(); }
    size_t size() const { return procs.size(); }
    void insert(Process p);
    std::string str(const TbppModel& model) const;
};

bool operator==(const Configuration& a, const Configuration& b);
bool operator<(const Configuration& a, const Configuration& b);

struct RunStep {
    // Exactly one of the two cases: a time elapse or a rule firing.
    bool is_elapse = false;
    Rat elapse;            // valid when is_elapse
    int rule = -1;         // valid when !is_elapse
    int process_index = 0; // index into the canonical ordering
};

struct Run {
    std::vector<RunStep> steps;
    Rat total_duration() const;
};

nlohmann::json run_to_json(const Run& run);
Run run_from_json(const nlohmann::json& j);

// Time elapse: all clocks in all processes advance by t; the empty
// configuration stutters. Throws on negative t.
Configuration elapse(const Configuration& c, const Rat& t);

// Fires `rule` on the indexed process. Throws std::invalid_argument when the
// index is out of range, the nonterminal mismatches, or the guard fails.
Configuration fire(const TbppModel& model, const Configuration& c, int process_index,
                   const Rule& rule);

// Folds elapse/fire over the run, failing fast on the first illegal step.
Configuration replay(const TbppModel& model, const Configuration& start, const Run& run);

// Derivation trees: each node is a process created at some absolute time; an
// internal node fired a rule at fire_time, producing its children.
struct DerivationNode {
    int nt = 0;
    std::vector<Rat> valuation;  // clocks at birth
    Rat birth_time;
    // Rule application, if any. Nodes without a rule are survivor leaves;
    // nodes firing a vanishing rule are vanished leaves.
    int rule = -1;
    Rat fire_time;
    std::vector<DerivationNode> children;
    bool is_survivor() const { return rule < 0; }
};

struct DerivationCheck {
    bool ok = false;
    std::string diagnostic;
};

// True iff the tree is a legal derivation whose survivor leaves all live at
// the same absolute time tau with zero clocks, and (cover) they include the
// query targets, or (reach) equal them exactly. Nonempty queries require no
// survivors at all.
DerivationCheck check_derivation_tree(const TbppModel& model, const DerivationNode& tree,
                                      const Query& query);

struct ExplorerLimits {
    Rat granularity;        // > 0; time steps are multiples of this
    int max_steps = 10000;  // configurations expanded
    int max_size = 6;       // processes per configuration
    Rat horizon = Rat(16);  // total elapsed time bound
};

ExplorerLimits default_limits(const TbppModel& model, const Query& query);

struct ExplorerVerdict {
    bool witness_found = false;
    Run run;                  // valid when witness_found
    std::string exhausted_by; // which limit stopped the search otherwise
};

// Breadth-first search over configurations with time steps restricted to
// multiples of the granularity. Any returned witness replays successfully in
// the dense-time semantics; absence of a witness proves nothing.
ExplorerVerdict explore_discretized(const TbppModel& model, const Query& query,
                                    const ExplorerLimits& limits);

// Does the configuration satisfy the query's final-state predicate at total
// elapsed time `elapsed`?
bool query_satisfied(const TbppModel& model, const Query& query, const Configuration& c,
                     const Rat& elapsed);

}  // namespace tbpp

#endif
