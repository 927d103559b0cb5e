#include "tbpp/model.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace tbpp {

const char* rel_str(Rel r) {
    switch (r) {
        case Rel::Lt: return "<";
        case Rel::Le: return "<=";
        case Rel::Eq: return "=";
        case Rel::Ge: return ">=";
        case Rel::Gt: return ">";
    }
    return "?";
}

bool rel_holds(const Rat& value, Rel r, const Rat& bound) {
    switch (r) {
        case Rel::Lt: return value < bound;
        case Rel::Le: return value <= bound;
        case Rel::Eq: return value == bound;
        case Rel::Ge: return value >= bound;
        case Rel::Gt: return value > bound;
    }
    return false;
}

const char* query_mode_str(QueryMode m) {
    switch (m) {
        case QueryMode::Reach: return "reach";
        case QueryMode::Cover: return "cover";
        case QueryMode::SimpleReach: return "simple-reach";
        case QueryMode::SimpleCover: return "simple-cover";
        case QueryMode::Nonempty: return "nonempty";
        case QueryMode::Ternary: return "ternary";
    }
    return "?";
}

bool TbppModel::is_ta() const {
    return std::none_of(rules.begin(), rules.end(),
                        [](const Rule& r) { return r.is_branching(); });
}

int TbppModel::clock_index(const std::string& name) const {
    for (const auto& c : clocks)
        if (c.name == name) return c.index;
    return -1;
}

int TbppModel::nonterminal_index(const std::string& name) const {
    for (const auto& n : nonterminals)
        if (n.name == name) return n.index;
    return -1;
}

void TbppModel::refresh_max_constant() {
    std::int64_t m = 0;
    for (const auto& r : rules) {
        for (const auto& a : r.guard.conjuncts) m = std::max(m, a.bound);
        for (const auto& u : r.assign.updates)
            if (!u.from_clock) m = std::max(m, u.constant);
    }
    max_constant = m;
}

std::vector<Diagnostic> validate(const TbppModel& model) {
    std::vector<Diagnostic> out;
    auto bad = [&out](std::string code, std::string msg) {
        out.push_back({std::move(code), std::move(msg)});
    };

    std::set<std::string> names;
    for (const auto& c : model.clocks) {
        if (!names.insert(c.name).second)
            bad("duplicate-name", "duplicate identifier: " + c.name);
        if (c.index < 0 || c.index >= model.clock_count() ||
            model.clocks[c.index].name != c.name)
            bad("bad-index", "clock index not dense: " + c.name);
    }
    for (const auto& n : model.nonterminals) {
        if (!names.insert(n.name).second)
            bad("duplicate-name", "duplicate identifier: " + n.name);
        if (n.index < 0 || n.index >= model.nonterminal_count() ||
            model.nonterminals[n.index].name != n.name)
            bad("bad-index", "nonterminal index not dense: " + n.name);
    }

    std::int64_t seen_max = 0;
    for (size_t i = 0; i < model.rules.size(); ++i) {
        const Rule& r = model.rules[i];
        const std::string where = "rule #" + std::to_string(i);
        if (r.lhs < 0 || r.lhs >= model.nonterminal_count())
            bad("undeclared-nonterminal", where + ": lhs out of range");
        if (r.rhs.size() > 2)
            bad("rhs-too-large", where + ": rhs size " + std::to_string(r.rhs.size()) +
                                     " exceeds 2");
        for (int nt : r.rhs)
            if (nt < 0 || nt >= model.nonterminal_count())
                bad("undeclared-nonterminal", where + ": rhs out of range");
        for (const auto& a : r.guard.conjuncts) {
            if (a.clock < 0 || a.clock >= model.clock_count())
                bad("undeclared-clock", where + ": guard references undeclared clock");
            if (a.bound < 0)
                bad("negative-constant", where + ": negative guard bound");
            seen_max = std::max(seen_max, a.bound);
        }
        // At most one atom per (clock, rel) after normalization.
        std::set<std::pair<int, int>> atom_keys;
        for (const auto& a : r.guard.conjuncts)
            if (!atom_keys.insert({a.clock, static_cast<int>(a.rel)}).second)
                bad("guard-not-normalized",
                    where + ": repeated (clock, relation) guard atom");
        for (const auto& u : r.assign.updates) {
            if (u.target < 0 || u.target >= model.clock_count())
                bad("undeclared-clock", where + ": update targets undeclared clock");
            if (u.from_clock) {
                if (u.source_clock < 0 || u.source_clock >= model.clock_count())
                    bad("undeclared-clock", where + ": update reads undeclared clock");
            } else {
                if (u.constant < 0)
                    bad("negative-constant", where + ": negative update constant");
                seen_max = std::max(seen_max, u.constant);
            }
        }
    }
    if (out.empty() && seen_max != model.max_constant)
        bad("stale-max-constant",
            "max_constant is " + std::to_string(model.max_constant) + ", expected " +
                std::to_string(seen_max));

    if (model.query) {
        const Query& q = *model.query;
        if (q.initial < 0 || q.initial >= model.nonterminal_count())
            bad("undeclared-nonterminal", "query initial out of range");
        for (int t : q.targets)
            if (t < 0 || t >= model.nonterminal_count())
                bad("undeclared-nonterminal", "query target out of range");
        std::map<int, int> mult;
        for (int t : q.targets) mult[t]++;
        for (auto& [nt, m] : mult)
            if (m > q.multiplicity_cap)
                bad("multiplicity-cap",
                    "target multiplicity " + std::to_string(m) + " exceeds cap " +
                        std::to_string(q.multiplicity_cap));
        bool simple = q.mode == QueryMode::SimpleReach || q.mode == QueryMode::SimpleCover;
        if (simple && q.targets.size() != 1)
            bad("bad-target-size", "simple query requires exactly one target");
        if (q.mode == QueryMode::Nonempty && !q.targets.empty())
            bad("bad-target-size", "nonempty query requires empty target list");
        if (q.mode == QueryMode::Ternary) {
            if (!q.delta) bad("missing-delta", "ternary query requires a duration");
            if (q.delta && *q.delta < 0) bad("negative-constant", "negative delta");
            if (q.targets.size() != 1)
                bad("bad-target-size", "ternary query requires exactly one target");
            if (!model.is_ta())
                bad("not-a-ta", "ternary query applies only to models without branching rules");
        }
    }
    return out;
}

bool guard_satisfied(const Guard& g, const std::vector<Rat>& valuation) {
    for (const auto& a : g.conjuncts)
        if (!rel_holds(valuation[a.clock], a.rel, Rat(static_cast<long>(a.bound))))
            return false;
    return true;
}

std::vector<Rat> apply_assignment(const Assignment& a, const std::vector<Rat>& valuation) {
    std::vector<Rat> v = valuation;
    for (const auto& u : a.updates)
        v[u.target] = u.from_clock ? v[u.source_clock] : Rat(static_cast<long>(u.constant));
    return v;
}

namespace {

// Control refinement used by desugar_constant_updates: a nonterminal plus the
// last constant written to each clock (0 when none, i.e. plain reset or no
// constant update yet).
struct Refinement {
    int nt;
    std::vector<std::int64_t> offsets;
    bool operator<(const Refinement& o) const {
        if (nt != o.nt) return nt < o.nt;
        return offsets < o.offsets;
    }
};

}  // namespace

TbppModel desugar_constant_updates(const TbppModel& model) {
    bool has_constant_update = false;
    for (const auto& r : model.rules)
        for (const auto& u : r.assign.updates)
            if (!u.from_clock && u.constant != 0) has_constant_update = true;
    if (!has_constant_update) return model;

    const int k = model.clock_count();
    TbppModel out;
    out.clocks = model.clocks;
    out.query = model.query;

    std::map<Refinement, int> index_of;
    std::vector<Refinement> worklist;
    auto intern = [&](const Refinement& r) {
        auto it = index_of.find(r);
        if (it != index_of.end()) return it->second;
        int idx = static_cast<int>(out.nonterminals.size());
        std::string name = model.nonterminals[r.nt].name;
        for (int c = 0; c < k; ++c)
            if (r.offsets[c] != 0)
                name += "@" + model.clocks[c].name + std::to_string(r.offsets[c]);
        out.nonterminals.push_back({name, idx});
        index_of.emplace(r, idx);
        worklist.push_back(r);
        return idx;
    };

    // Seed with every original nonterminal at zero offsets so queries keep
    // their meaning; only refinements reachable through rules get added.
    std::vector<std::int64_t> zero(k, 0);
    for (int nt = 0; nt < model.nonterminal_count(); ++nt)
        intern(Refinement{nt, zero});

    for (size_t w = 0; w < worklist.size(); ++w) {
        const Refinement cur = worklist[w];
        for (const auto& rule : model.rules) {
            if (rule.lhs != cur.nt) continue;
            // Shift guard bounds by the recorded constants; a negative shifted
            // bound makes the atom constantly true or false.
            Guard g;
            bool guard_false = false;
            for (const auto& a : rule.guard.conjuncts) {
                std::int64_t shifted = a.bound - cur.offsets[a.clock];
                if (shifted < 0) {
                    // clock value = offset + (time since update) >= offset > bound
                    bool holds = a.rel == Rel::Gt || a.rel == Rel::Ge;
                    if (!holds) guard_false = true;
                    continue;
                }
                g.conjuncts.push_back({a.clock, a.rel, shifted});
            }
            if (guard_false) continue;  // rule can never fire from this refinement

            Assignment assign;
            std::vector<std::int64_t> next = cur.offsets;
            for (const auto& u : rule.assign.updates) {
                if (u.from_clock) {
                    // x := y transfers y's offset to x.
                    assign.updates.push_back(u);
                    next[u.target] = next[u.source_clock];
                } else {
                    assign.updates.push_back({u.target, false, 0, 0});
                    next[u.target] = u.constant;
                }
            }

            Rule nr;
            nr.lhs = index_of.at(cur);
            nr.guard = g;
            nr.assign = assign;
            for (int child : rule.rhs) nr.rhs.push_back(intern(Refinement{child, next}));
            out.rules.push_back(std::move(nr));
        }
    }
    out.refresh_max_constant();
    return out;
}

TbppModel project_to_ta(const TbppModel& model, bool keep_vanishing) {
    TbppModel out = model;
    out.rules.clear();
    for (const auto& r : model.rules) {
        if (r.is_branching()) {
            for (int child : r.rhs) {
                Rule nr = r;
                nr.rhs = {child};
                out.rules.push_back(std::move(nr));
            }
        } else if (r.is_vanishing()) {
            if (keep_vanishing) out.rules.push_back(r);
        } else {
            out.rules.push_back(r);
        }
    }
    out.refresh_max_constant();
    return out;
}

TbppModel scale_constants(const TbppModel& model, const Int& factor) {
    if (factor <= 0) throw std::invalid_argument("scale factor must be positive");
    TbppModel out = model;
    long f = mpz_get_si(factor.get_mpz_t());
    for (auto& r : out.rules) {
        for (auto& a : r.guard.conjuncts) a.bound *= f;
        for (auto& u : r.assign.updates)
            if (!u.from_clock) u.constant *= f;
    }
    if (out.query && out.query->delta) *out.query->delta *= Rat(factor);
    out.refresh_max_constant();
    return out;
}

TbppModel normalize_branching_updates(const TbppModel& model) {
    auto meaningful = [](const ClockUpdate& u) {
        return !(u.from_clock && u.source_clock == u.target);  // x := x is a no-op
    };
    bool needed = false;
    for (const auto& r : model.rules)
        if (r.is_branching())
            for (const auto& u : r.assign.updates)
                if (meaningful(u)) needed = true;
    if (!needed) {
        // Still strip no-op updates from branching rules so downstream code can
        // rely on branching rules carrying no assignment.
        TbppModel out = model;
        for (auto& r : out.rules)
            if (r.is_branching()) r.assign.updates.clear();
        return out;
    }

    TbppModel out = model;
    out.rules.clear();
    int fresh = 0;
    for (const auto& r : model.rules) {
        Assignment kept;
        if (r.is_branching())
            for (const auto& u : r.assign.updates)
                if (meaningful(u)) kept.updates.push_back(u);
        if (!r.is_branching() || kept.empty()) {
            Rule nr = r;
            if (nr.is_branching()) nr.assign.updates.clear();
            out.rules.push_back(std::move(nr));
            continue;
        }
        for (const auto& u : kept.updates)
            if (u.from_clock)
                throw std::invalid_argument(
                    "cannot normalize branching rule with clock-to-clock update");

        // X -[g;R]-> Y (+) Z  ~~>  X -[g;R]-> W,  W -[x=k for each x:=k in R]-> Y (+) Z.
        // The equality tests pin W's branching to the instant of its creation.
        int w = static_cast<int>(out.nonterminals.size());
        out.nonterminals.push_back(
            {"_br" + std::to_string(fresh++) + "_" + model.nonterminals[r.lhs].name, w});
        Rule to_w = r;
        to_w.assign = kept;
        to_w.rhs = {w};
        out.rules.push_back(std::move(to_w));

        Rule branch;
        branch.lhs = w;
        for (const auto& u : kept.updates)
            branch.guard.conjuncts.push_back({u.target, Rel::Eq, u.constant});
        branch.rhs = r.rhs;
        out.rules.push_back(std::move(branch));
    }
    out.refresh_max_constant();
    return out;
}

std::string pretty_print(const TbppModel& model) {
    std::ostringstream os;
    if (!model.clocks.empty()) {
        os << "clocks";
        for (const auto& c : model.clocks) os << " " << c.name;
        os << ";\n";
    }
    if (!model.nonterminals.empty()) {
        os << "nonterminals";
        for (const auto& n : model.nonterminals) os << " " << n.name;
        os << ";\n";
    }
    if (model.query) {
        os << "init " << model.nonterminals[model.query->initial].name << ";\n";
        if (!model.query->targets.empty()) {
            os << "targets";
            for (int t : model.query->targets) os << " " << model.nonterminals[t].name;
            os << ";\n";
        }
    }
    for (const auto& r : model.rules) {
        os << "rule " << model.nonterminals[r.lhs].name;
        if (!r.guard.is_trivial()) {
            os << " [";
            for (size_t i = 0; i < r.guard.conjuncts.size(); ++i) {
                const auto& a = r.guard.conjuncts[i];
                if (i) os << ", ";
                os << model.clocks[a.clock].name << " " << rel_str(a.rel) << " " << a.bound;
            }
            os << "]";
        }
        if (!r.assign.empty()) {
            os << " {";
            for (size_t i = 0; i < r.assign.updates.size(); ++i) {
                const auto& u = r.assign.updates[i];
                if (i) os << ", ";
                os << model.clocks[u.target].name << " := ";
                if (u.from_clock)
                    os << model.clocks[u.source_clock].name;
                else
                    os << u.constant;
            }
            os << "}";
        }
        os << " ->";
        for (int child : r.rhs) os << " " << model.nonterminals[child].name;
        os << " ;\n";
    }
    if (model.query) {
        os << "query " << query_mode_str(model.query->mode);
        if (model.query->mode == QueryMode::Ternary && model.query->delta)
            os << " " << rat_str(*model.query->delta);
        os << ";\n";
    }
    return os.str();
}

}  // namespace tbpp
