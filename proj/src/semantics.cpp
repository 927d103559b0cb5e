#include "tbpp/semantics.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace tbpp {

bool operator==(const Process& a, const Process& b) {
    return a.nt == b.nt && a.valuation == b.valuation;
}

bool process_less(const Process& a, const Process& b) {
    if (a.nt != b.nt) return a.nt < b.nt;
    return std::lexicographical_compare(a.valuation.begin(), a.valuation.end(),
                                        b.valuation.begin(), b.valuation.end());
}

Configuration Configuration::of(std::vector<Process> ps) {
    Configuration c;
    c.procs = std::move(ps);
    std::sort(c.procs.begin(), c.procs.end(), process_less);
    return c;
}

void Configuration::insert(Process p) {
    auto it = std::upper_bound(procs.begin(), procs.end(), p, process_less);
    procs.insert(it, std::move(p));
}

std::string Configuration::str(const TbppModel& model) const {
    std::ostringstream os;
    os << "{";
    for (size_t i = 0; i < procs.size(); ++i) {
        if (i) os << ", ";
        os << "(" << model.nonterminals[procs[i].nt].name;
        for (const auto& v : procs[i].valuation) os << " " << rat_str(v);
        os << ")";
    }
    os << "}";
    return os.str();
}

bool operator==(const Configuration& a, const Configuration& b) {
    return a.procs == b.procs;
}

bool operator<(const Configuration& a, const Configuration& b) {
    return std::lexicographical_compare(a.procs.begin(), a.procs.end(), b.procs.begin(),
                                        b.procs.end(), process_less);
}

Rat Run::total_duration() const {
    Rat t = 0;
    for (const auto& s : steps)
        if (s.is_elapse) t += s.elapse;
    return t;
}

nlohmann::json run_to_json(const Run& run) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& s : run.steps) {
        if (s.is_elapse)
            j.push_back({{"elapse", rat_str(s.elapse)}});
        else
            j.push_back({{"fire", s.rule}, {"at", s.process_index}});
    }
    return j;
}

Run run_from_json(const nlohmann::json& j) {
    Run run;
    for (const auto& js : j) {
        RunStep s;
        if (js.contains("elapse")) {
            s.is_elapse = true;
            s.elapse = parse_rat(js.at("elapse").get<std::string>());
        } else {
            s.rule = js.at("fire").get<int>();
            s.process_index = js.at("at").get<int>();
        }
        run.steps.push_back(std::move(s));
    }
    return run;
}

Configuration elapse(const Configuration& c, const Rat& t) {
    if (t < 0) throw std::invalid_argument("negative time elapse");
    Configuration out = c;
    for (auto& p : out.procs)
        for (auto& v : p.valuation) v += t;
    // Uniform shifts preserve the canonical order.
    return out;
}

Configuration fire(const TbppModel& model, const Configuration& c, int process_index,
                   const Rule& rule) {
    if (process_index < 0 || process_index >= static_cast<int>(c.procs.size()))
        throw std::invalid_argument("process index out of range");
    const Process& p = c.procs[process_index];
    if (p.nt != rule.lhs)
        throw std::invalid_argument("rule lhs does not match process nonterminal");
    if (!guard_satisfied(rule.guard, p.valuation))
        throw std::invalid_argument("guard violated");
    std::vector<Rat> nu = apply_assignment(rule.assign, p.valuation);
    Configuration out;
    out.procs = c.procs;
    out.procs.erase(out.procs.begin() + process_index);
    for (int child : rule.rhs) out.insert(Process{child, nu});
    return out;
}

Configuration replay(const TbppModel& model, const Configuration& start, const Run& run) {
    Configuration c = start;
    for (size_t i = 0; i < run.steps.size(); ++i) {
        const RunStep& s = run.steps[i];
        try {
            if (s.is_elapse) {
                c = elapse(c, s.elapse);
            } else {
                if (s.rule < 0 || s.rule >= static_cast<int>(model.rules.size()))
                    throw std::invalid_argument("rule id out of range");
                c = fire(model, c, s.process_index, model.rules[s.rule]);
            }
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("step " + std::to_string(i) + ": " + e.what());
        }
    }
    return c;
}

namespace {

struct TreeWalk {
    const TbppModel& model;
    std::string error;
    std::vector<std::pair<int, Rat>> survivors;  // (nt, survival check done later)
    std::vector<const DerivationNode*> survivor_nodes;

    bool visit(const DerivationNode& n) {
        if (n.nt < 0 || n.nt >= model.nonterminal_count()) {
            error = "nonterminal out of range";
            return false;
        }
        if (n.valuation.size() != model.clocks.size()) {
            error = "valuation arity mismatch";
            return false;
        }
        if (n.is_survivor()) {
            if (!n.children.empty()) {
                error = "survivor leaf with children";
                return false;
            }
            survivor_nodes.push_back(&n);
            return true;
        }
        if (n.rule < 0 || n.rule >= static_cast<int>(model.rules.size())) {
            error = "rule id out of range";
            return false;
        }
        const Rule& r = model.rules[n.rule];
        if (r.lhs != n.nt) {
            error = "rule lhs does not match node nonterminal";
            return false;
        }
        if (n.fire_time < n.birth_time) {
            error = "rule fired before the process existed";
            return false;
        }
        Rat wait = n.fire_time - n.birth_time;
        std::vector<Rat> at_fire = n.valuation;
        for (auto& v : at_fire) v += wait;
        if (!guard_satisfied(r.guard, at_fire)) {
            error = "guard violated at fire time";
            return false;
        }
        std::vector<Rat> nu = apply_assignment(r.assign, at_fire);
        if (n.children.size() != r.rhs.size()) {
            error = "children do not match the rule right-hand side";
            return false;
        }
        // Children must agree with the rule's rhs as a multiset.
        std::multiset<int> want(r.rhs.begin(), r.rhs.end());
        for (const auto& ch : n.children) {
            auto it = want.find(ch.nt);
            if (it == want.end()) {
                error = "child nonterminal not produced by the rule";
                return false;
            }
            want.erase(it);
            if (ch.birth_time != n.fire_time) {
                error = "child born at a different time than the rule fired";
                return false;
            }
            if (ch.valuation != nu) {
                error = "child valuation differs from the assigned valuation";
                return false;
            }
        }
        for (const auto& ch : n.children)
            if (!visit(ch)) return false;
        return true;
    }
};

}  // namespace

DerivationCheck check_derivation_tree(const TbppModel& model, const DerivationNode& tree,
                                      const Query& query) {
    TreeWalk walk{model};
    if (!walk.visit(tree)) return {false, walk.error};

    // All survivors must exist at the same absolute time tau with zero clocks.
    // A tree with no survivors witnesses the empty configuration.
    std::optional<Rat> tau;
    std::multiset<int> survivor_nts;
    for (const DerivationNode* s : walk.survivor_nodes) survivor_nts.insert(s->nt);

    if (!walk.survivor_nodes.empty()) {
        // A survivor's clocks at time tau are valuation + (tau - birth_time).
        // Clocks never run backwards, so requiring them to be zero at tau pins
        // the birth valuation to all-zero and tau to the birth time.
        if (model.clock_count() > 0) {
            for (const DerivationNode* s : walk.survivor_nodes) {
                for (const auto& v : s->valuation)
                    if (v != 0) return {false, "survivor clock nonzero at tau"};
                if (!tau)
                    tau = s->birth_time;
                else if (*tau != s->birth_time)
                    return {false, "survivors exist at different absolute times"};
            }
        } else {
            tau = Rat(0);
        }
    }

    std::multiset<int> targets(query.targets.begin(), query.targets.end());
    switch (query.mode) {
        case QueryMode::Nonempty:
            if (!survivor_nts.empty()) return {false, "survivors remain for nonempty query"};
            return {true, ""};
        case QueryMode::Reach:
        case QueryMode::SimpleReach:
            if (survivor_nts != targets)
                return {false, "survivors do not equal the target multiset"};
            return {true, ""};
        case QueryMode::Cover:
        case QueryMode::SimpleCover: {
            std::multiset<int> pool = survivor_nts;
            for (int t : targets) {
                auto it = pool.find(t);
                if (it == pool.end())
                    return {false, "survivors do not cover the target multiset"};
                pool.erase(it);
            }
            return {true, ""};
        }
        case QueryMode::Ternary:
            return {false, "ternary queries are not derivation-tree checkable"};
    }
    return {false, "unknown query mode"};
}

bool query_satisfied(const TbppModel& model, const Query& query, const Configuration& c,
                     const Rat& elapsed) {
    auto target_config = [&]() {
        std::vector<Process> ps;
        std::vector<Rat> zeros(model.clock_count(), Rat(0));
        for (int t : query.targets) ps.push_back(Process{t, zeros});
        return Configuration::of(std::move(ps));
    };
    switch (query.mode) {
        case QueryMode::Nonempty:
            return c.empty();
        case QueryMode::Reach:
        case QueryMode::SimpleReach:
            return c == target_config();
        case QueryMode::Cover:
        case QueryMode::SimpleCover: {
            // Multiset inclusion of target processes (all-zero clocks).
            std::vector<Rat> zeros(model.clock_count(), Rat(0));
            std::multiset<int> need(query.targets.begin(), query.targets.end());
            for (const auto& p : c.procs) {
                if (need.empty()) break;
                bool zero = std::all_of(p.valuation.begin(), p.valuation.end(),
                                        [](const Rat& v) { return v == 0; });
                if (!zero) continue;
                auto it = need.find(p.nt);
                if (it != need.end()) need.erase(it);
            }
            return need.empty();
        }
        case QueryMode::Ternary: {
            if (!query.delta || c.size() != 1) return false;
            if (elapsed != *query.delta) return false;
            const Process& p = c.procs[0];
            if (p.nt != query.targets.at(0)) return false;
            return std::all_of(p.valuation.begin(), p.valuation.end(),
                               [](const Rat& v) { return v == 0; });
        }
    }
    return false;
}

ExplorerLimits default_limits(const TbppModel& model, const Query& query) {
    ExplorerLimits lim;
    lim.granularity = Rat(1, 2 * (static_cast<long>(query.targets.size()) + 2));
    lim.max_size = std::max<int>(6, static_cast<int>(query.targets.size()) + 2);
    lim.horizon = Rat(static_cast<long>(model.max_constant + 4));
    if (query.delta) lim.horizon = std::max(lim.horizon, *query.delta);
    return lim;
}

ExplorerVerdict explore_discretized(const TbppModel& model, const Query& query,
                                    const ExplorerLimits& limits) {
    if (limits.granularity <= 0) throw std::invalid_argument("granularity must be positive");

    struct NodeKey {
        Configuration config;
        Rat elapsed;
        bool operator<(const NodeKey& o) const {
            if (config < o.config) return true;
            if (o.config < config) return false;
            return elapsed < o.elapsed;
        }
    };
    // Ternary queries depend on the elapsed total, so the visited key includes
    // it; other modes dedupe on the configuration alone.
    const bool elapsed_matters = query.mode == QueryMode::Ternary;

    struct Edge {
        int parent;
        RunStep step;
    };
    std::vector<NodeKey> nodes;
    std::vector<Edge> edges;  // parallel to nodes, edge[0] unused
    std::set<NodeKey> visited;

    std::vector<Rat> zeros(model.clock_count(), Rat(0));
    Configuration init = Configuration::of({Process{query.initial, zeros}});
    NodeKey start{init, Rat(0)};

    auto canon = [&](const NodeKey& k) {
        NodeKey c = k;
        if (!elapsed_matters) c.elapsed = 0;
        return c;
    };

    nodes.push_back(start);
    edges.push_back({-1, {}});
    visited.insert(canon(start));

    auto build_run = [&](int idx) {
        Run run;
        std::vector<RunStep> rev;
        while (idx > 0) {
            rev.push_back(edges[idx].step);
            idx = edges[idx].parent;
        }
        run.steps.assign(rev.rbegin(), rev.rend());
        return run;
    };

    std::deque<int> frontier;
    frontier.push_back(0);
    int expanded = 0;

    if (query_satisfied(model, query, start.config, start.elapsed))
        return {true, Run{}, ""};

    while (!frontier.empty()) {
        if (expanded >= limits.max_steps) return {false, {}, "max_steps"};
        int cur = frontier.front();
        frontier.pop_front();
        ++expanded;
        NodeKey state = nodes[cur];

        auto push = [&](NodeKey next, RunStep step) -> int {
            NodeKey key = canon(next);
            if (visited.count(key)) return -1;
            visited.insert(key);
            nodes.push_back(next);
            edges.push_back({cur, std::move(step)});
            int idx = static_cast<int>(nodes.size()) - 1;
            frontier.push_back(idx);
            return idx;
        };

        // Discrete firings.
        for (int pi = 0; pi < static_cast<int>(state.config.procs.size()); ++pi) {
            const Process& p = state.config.procs[pi];
            for (size_t ri = 0; ri < model.rules.size(); ++ri) {
                const Rule& r = model.rules[ri];
                if (r.lhs != p.nt || !guard_satisfied(r.guard, p.valuation)) continue;
                if (state.config.size() - 1 + r.rhs.size() >
                    static_cast<size_t>(limits.max_size))
                    continue;
                Configuration next = fire(model, state.config, pi, r);
                RunStep step;
                step.rule = static_cast<int>(ri);
                step.process_index = pi;
                int idx = push({next, state.elapsed}, step);
                if (idx >= 0 && query_satisfied(model, query, next, state.elapsed))
                    return {true, build_run(idx), ""};
            }
        }
        // One granularity tick of time.
        Rat next_elapsed = state.elapsed + limits.granularity;
        if (next_elapsed <= limits.horizon) {
            Configuration next = elapse(state.config, limits.granularity);
            RunStep step;
            step.is_elapse = true;
            step.elapse = limits.granularity;
            int idx = push({next, next_elapsed}, step);
            if (idx >= 0 && query_satisfied(model, query, next, next_elapsed))
                return {true, build_run(idx), ""};
        }
    }
    return {false, {}, "frontier exhausted"};
}

}  // namespace tbpp
