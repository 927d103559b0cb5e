#include <algorithm>
#include <cassert>
#include <optional>

#include "tbpp/la.hpp"

namespace tbpp::la {

namespace {

// ---------------------------------------------------------------------------
// Variable boxes with integer rounding, used both as the exact rational
// relaxation inside branch and bound and as the pruning check during the
// disjunct search. Strict rational bounds are relaxed to nonstrict ones here,
// which is sound for pruning; leaves re-check strictness exactly.

struct Box {
    std::optional<Rat> lo, hi;

    bool empty() const { return lo && hi && *lo > *hi; }
    bool fixed() const { return lo && hi && *lo == *hi; }
};

struct PropSystem {
    const std::vector<VarDecl>* vars;
    std::vector<Box> boxes;

    explicit PropSystem(const std::vector<VarDecl>& v) : vars(&v), boxes(v.size()) {
        for (size_t i = 0; i < v.size(); ++i) {
            if (v[i].sort == Sort::Fraction) {
                boxes[i].lo = Rat(0);
                boxes[i].hi = Rat(1);  // hi is exclusive in truth but safe as <=
            }
        }
    }

    bool tighten_lo(int v, Rat val) {
        if ((*vars)[v].sort == Sort::Integer) {
            Int c;
            mpz_cdiv_q(c.get_mpz_t(), val.get_num().get_mpz_t(), val.get_den().get_mpz_t());
            val = Rat(c);
        }
        if (!boxes[v].lo || val > *boxes[v].lo) {
            boxes[v].lo = val;
            return true;
        }
        return false;
    }
    bool tighten_hi(int v, Rat val) {
        if ((*vars)[v].sort == Sort::Integer) val = floor_rat(val);
        if (!boxes[v].hi || val < *boxes[v].hi) {
            boxes[v].hi = val;
            return true;
        }
        return false;
    }
};

// One propagation sweep over sum(coeffs) + constant <= 0 (or == 0). Returns
// false when a box became empty.
bool propagate(PropSystem& sys, const std::vector<LinCon>& cons, int max_passes) {
    for (int pass = 0; pass < max_passes; ++pass) {
        bool changed = false;
        for (const auto& con : cons) {
            // For each variable, bound coef*var by the minimum of the rest.
            int n = static_cast<int>(con.coeffs.size());
            for (int k = 0; k < n; ++k) {
                Rat rest = con.constant;
                bool rest_unbounded = false;
                for (int i = 0; i < n; ++i) {
                    if (i == k) continue;
                    const auto& [v, c] = con.coeffs[i];
                    const Box& b = sys.boxes[v];
                    if (c > 0) {
                        if (!b.lo) { rest_unbounded = true; break; }
                        rest += c * *b.lo;
                    } else {
                        if (!b.hi) { rest_unbounded = true; break; }
                        rest += c * *b.hi;
                    }
                }
                const auto& [v, c] = con.coeffs[k];
                if (!rest_unbounded) {
                    // c*v <= -rest
                    Rat bound = -rest / c;
                    if (c > 0)
                        changed |= sys.tighten_hi(v, bound);
                    else
                        changed |= sys.tighten_lo(v, bound);
                }
                if (con.rel == LinCon::Eq) {
                    // Also propagate the reversed inequality.
                    Rat rest2 = con.constant;
                    bool unb = false;
                    for (int i = 0; i < n; ++i) {
                        if (i == k) continue;
                        const auto& [w, d] = con.coeffs[i];
                        const Box& b = sys.boxes[w];
                        if (d > 0) {
                            if (!b.hi) { unb = true; break; }
                            rest2 += d * *b.hi;
                        } else {
                            if (!b.lo) { unb = true; break; }
                            rest2 += d * *b.lo;
                        }
                    }
                    if (!unb) {
                        Rat bound = -rest2 / c;
                        if (c > 0)
                            changed |= sys.tighten_lo(v, bound);
                        else
                            changed |= sys.tighten_hi(v, bound);
                    }
                }
                if (sys.boxes[v].empty()) return false;
            }
            if (con.coeffs.empty()) {
                // Ground constraint.
                bool ok = con.rel == LinCon::Eq   ? con.constant == 0
                          : con.rel == LinCon::Lt ? con.constant < 0
                                                  : con.constant <= 0;
                if (!ok) return false;
            }
        }
        if (!changed) return true;
    }
    return true;
}

LinCon normalize_con(const LinCon& in) {
    LinCon out;
    out.rel = in.rel;
    out.constant = in.constant;
    for (const auto& [v, c] : in.coeffs) {
        if (c == 0) continue;
        bool found = false;
        for (auto& [w, d] : out.coeffs)
            if (w == v) {
                d += c;
                found = true;
                break;
            }
        if (!found) out.coeffs.push_back({v, c});
    }
    out.coeffs.erase(std::remove_if(out.coeffs.begin(), out.coeffs.end(),
                                    [](const auto& p) { return p.second == 0; }),
                     out.coeffs.end());
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Fourier-Motzkin elimination over the rationals with strictness tracking.

namespace {

struct FmRow {
    std::vector<Rat> coef;  // dense over used vars
    Rat constant;
    bool strict = false;  // sum + constant (<|<=) 0
    bool eq = false;
};

}  // namespace

Verdict solve_rat_conjunction(int var_count, const std::vector<LinCon>& cons) {
    // Collect used variables for a dense representation.
    std::vector<int> used;
    {
        std::vector<bool> seen(var_count, false);
        for (const auto& c : cons)
            for (const auto& [v, k] : c.coeffs)
                if (k != 0 && !seen[v]) {
                    seen[v] = true;
                    used.push_back(v);
                }
        std::sort(used.begin(), used.end());
    }
    std::vector<int> pos(var_count, -1);
    for (size_t i = 0; i < used.size(); ++i) pos[used[i]] = static_cast<int>(i);

    std::vector<FmRow> rows;
    for (const auto& c : cons) {
        FmRow r;
        r.coef.assign(used.size(), Rat(0));
        for (const auto& [v, k] : c.coeffs) r.coef[pos[v]] += k;
        r.constant = c.constant;
        r.eq = c.rel == LinCon::Eq;
        r.strict = c.rel == LinCon::Lt;
        rows.push_back(std::move(r));
    }

    struct Elim {
        int var_pos;
        bool by_equality;
        FmRow eq_row;                 // when by_equality
        std::vector<FmRow> lowers;    // c < 0 rows: var >= .../|c|
        std::vector<FmRow> uppers;    // c > 0 rows: var <= ...
    };
    std::vector<Elim> trail;

    for (size_t vp = 0; vp < used.size(); ++vp) {
        // Prefer an equality row mentioning the variable: Gaussian step.
        int eq_idx = -1;
        for (size_t i = 0; i < rows.size(); ++i)
            if (rows[i].eq && rows[i].coef[vp] != 0) {
                eq_idx = static_cast<int>(i);
                break;
            }
        Elim el;
        el.var_pos = static_cast<int>(vp);
        if (eq_idx >= 0) {
            el.by_equality = true;
            el.eq_row = rows[eq_idx];
            Rat piv = el.eq_row.coef[vp];
            std::vector<FmRow> next;
            for (size_t i = 0; i < rows.size(); ++i) {
                if (static_cast<int>(i) == eq_idx) continue;
                FmRow r = rows[i];
                if (r.coef[vp] != 0) {
                    Rat f = r.coef[vp] / piv;
                    for (size_t j = 0; j < r.coef.size(); ++j)
                        r.coef[j] -= f * el.eq_row.coef[j];
                    r.constant -= f * el.eq_row.constant;
                }
                next.push_back(std::move(r));
            }
            rows = std::move(next);
        } else {
            el.by_equality = false;
            std::vector<FmRow> keep;
            for (auto& r : rows) {
                if (r.coef[vp] == 0) {
                    keep.push_back(std::move(r));
                } else if (r.coef[vp] > 0) {
                    el.uppers.push_back(std::move(r));
                } else {
                    el.lowers.push_back(std::move(r));
                }
            }
            // Combine lower x upper; derived bound strict iff any contributor is.
            for (const auto& lo : el.lowers) {
                for (const auto& up : el.uppers) {
                    FmRow r;
                    r.coef.assign(used.size(), Rat(0));
                    Rat a = -lo.coef[vp];  // > 0
                    Rat b = up.coef[vp];   // > 0
                    for (size_t j = 0; j < used.size(); ++j)
                        r.coef[j] = lo.coef[j] * b + up.coef[j] * a;
                    r.constant = lo.constant * b + up.constant * a;
                    r.strict = lo.strict || up.strict;
                    keep.push_back(std::move(r));
                }
            }
            rows = std::move(keep);
        }
        trail.push_back(std::move(el));
    }

    // Ground rows decide feasibility.
    for (const auto& r : rows) {
        bool zero = std::all_of(r.coef.begin(), r.coef.end(),
                                [](const Rat& c) { return c == 0; });
        (void)zero;  // all variables eliminated
        bool ok = r.eq ? r.constant == 0 : (r.strict ? r.constant < 0 : r.constant <= 0);
        if (!ok) return {false, {}};
    }

    // Back-substitute a witness.
    std::vector<Rat> value(used.size(), Rat(0));
    std::vector<bool> have(used.size(), false);
    auto row_rest = [&](const FmRow& r, int vp) {
        Rat s = r.constant;
        for (size_t j = 0; j < used.size(); ++j) {
            if (static_cast<int>(j) == vp) continue;
            if (r.coef[j] != 0) s += r.coef[j] * value[j];
        }
        return s;
    };
    for (auto it = trail.rbegin(); it != trail.rend(); ++it) {
        int vp = it->var_pos;
        if (it->by_equality) {
            value[vp] = -row_rest(it->eq_row, vp) / it->eq_row.coef[vp];
        } else {
            std::optional<Rat> lo, hi;
            bool lo_strict = false, hi_strict = false;
            for (const auto& r : it->lowers) {
                Rat bound = row_rest(r, vp) / -r.coef[vp];
                if (!lo || bound > *lo || (bound == *lo && r.strict)) {
                    if (!lo || bound > *lo) lo_strict = r.strict;
                    else lo_strict = lo_strict || r.strict;
                    lo = bound;
                }
            }
            for (const auto& r : it->uppers) {
                Rat bound = -row_rest(r, vp) / r.coef[vp];
                if (!hi || bound < *hi || (bound == *hi && r.strict)) {
                    if (!hi || bound < *hi) hi_strict = r.strict;
                    else hi_strict = hi_strict || r.strict;
                    hi = bound;
                }
            }
            if (lo && hi) {
                if (*lo == *hi)
                    value[vp] = *lo;  // feasibility guaranteed nonstrict here
                else
                    value[vp] = (lo_strict || hi_strict) ? rat_between(*lo, *hi)
                                                         : *lo;
            } else if (lo) {
                value[vp] = lo_strict ? *lo + 1 : *lo;
            } else if (hi) {
                value[vp] = hi_strict ? *hi - 1 : *hi;
            } else {
                value[vp] = 0;
            }
        }
        have[vp] = true;
    }

    Verdict v;
    v.sat = true;
    for (size_t i = 0; i < used.size(); ++i) v.valuation[used[i]] = value[i];
    return v;
}

// ---------------------------------------------------------------------------
// Integer conjunctions: presolve (gcd tightening, unit-coefficient equality
// substitution) followed by branch and bound over the exact box relaxation.
// Variable bounds default to the standard small-model bound when a variable
// is otherwise unbounded; the bound used is recorded in solver_stats.

namespace {

struct IntRow {
    std::vector<std::pair<int, Int>> coeffs;
    Int constant;
    bool eq = false;  // sum + constant == 0, else <= 0
};

struct IntSolver {
    std::vector<VarDecl> vars;
    std::vector<IntRow> rows;
    // Substitutions var = (combo over later-solved vars + const) / 1.
    struct Subst {
        int var;
        std::vector<std::pair<int, Int>> coeffs;
        Int constant;
    };
    std::vector<Subst> substs;
    long nodes = 0;
    long node_budget = 500000;
    Int fallback_bound;

    static Int gcd(const Int& a, const Int& b) {
        Int g;
        mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
        return g;
    }

    bool presolve() {
        bool changed = true;
        int rounds = 0;
        while (changed && rounds++ < 20000) {
            changed = false;
            // Ground + gcd normalization.
            std::vector<IntRow> next;
            for (auto& r : rows) {
                r.coeffs.erase(std::remove_if(r.coeffs.begin(), r.coeffs.end(),
                                              [](const auto& p) { return p.second == 0; }),
                               r.coeffs.end());
                if (r.coeffs.empty()) {
                    bool ok = r.eq ? r.constant == 0 : r.constant <= 0;
                    if (!ok) return false;
                    continue;
                }
                Int g = 0;
                for (const auto& [v, c] : r.coeffs) g = gcd(g, c >= 0 ? c : Int(-c));
                if (g > 1) {
                    if (r.eq) {
                        Int rem;
                        mpz_mod(rem.get_mpz_t(), r.constant.get_mpz_t(), g.get_mpz_t());
                        if (rem != 0) return false;  // divisibility violated
                        for (auto& [v, c] : r.coeffs) c /= g;
                        r.constant /= g;
                    } else {
                        // sum <= -constant: divide and round the bound down.
                        Int bound = -r.constant;
                        Int q;
                        mpz_fdiv_q(q.get_mpz_t(), bound.get_mpz_t(), g.get_mpz_t());
                        for (auto& [v, c] : r.coeffs) c /= g;
                        r.constant = -q;
                    }
                    changed = true;
                }
                next.push_back(std::move(r));
            }
            rows = std::move(next);

            // Unit-coefficient equality substitution.
            for (size_t i = 0; i < rows.size(); ++i) {
                if (!rows[i].eq) continue;
                int pick = -1;
                bool negate = false;
                for (size_t j = 0; j < rows[i].coeffs.size(); ++j) {
                    const Int& c = rows[i].coeffs[j].second;
                    if (c == 1 || c == -1) {
                        pick = static_cast<int>(j);
                        negate = c == 1;
                        break;
                    }
                }
                if (pick < 0) continue;
                IntRow eq = rows[i];
                rows.erase(rows.begin() + i);
                Subst s;
                s.var = eq.coeffs[pick].first;
                // c*v + rest + k = 0  =>  v = -(rest + k)/c ; with |c| = 1.
                for (size_t j = 0; j < eq.coeffs.size(); ++j) {
                    if (static_cast<int>(j) == pick) continue;
                    auto [w, d] = eq.coeffs[j];
                    s.coeffs.push_back({w, negate ? -d : d});
                }
                s.constant = negate ? -eq.constant : eq.constant;
                // Apply to all remaining rows.
                for (auto& r : rows) {
                    Int cv = 0;
                    for (auto& [w, d] : r.coeffs)
                        if (w == s.var) cv = d;
                    if (cv == 0) continue;
                    r.coeffs.erase(std::remove_if(r.coeffs.begin(), r.coeffs.end(),
                                                  [&](const auto& p) { return p.first == s.var; }),
                                   r.coeffs.end());
                    for (const auto& [w, d] : s.coeffs) {
                        bool found = false;
                        for (auto& [u, e] : r.coeffs)
                            if (u == w) {
                                e += cv * d;
                                found = true;
                            }
                        if (!found) r.coeffs.push_back({w, cv * d});
                    }
                    r.constant += cv * s.constant;
                }
                substs.push_back(std::move(s));
                changed = true;
                break;
            }
        }
        return true;
    }

    // Small-model style fallback bound for otherwise unbounded variables.
    void compute_fallback() {
        Int amax = 1, cmax = 1;
        for (const auto& r : rows) {
            for (const auto& [v, c] : r.coeffs) {
                Int a = c >= 0 ? c : Int(-c);
                if (a > amax) amax = a;
            }
            Int k = r.constant >= 0 ? r.constant : Int(-r.constant);
            if (k > cmax) cmax = k;
        }
        long n = 0;
        {
            std::vector<bool> seen(vars.size(), false);
            for (const auto& r : rows)
                for (const auto& [v, c] : r.coeffs)
                    if (!seen[v]) {
                        seen[v] = true;
                        ++n;
                    }
        }
        long m = static_cast<long>(rows.size());
        // (n+m) * (amax + cmax + 1)^(min(n,m)+2), the usual crude bound.
        Int base = amax + cmax + 1;
        long expo = std::min(n, m) + 2;
        Int bound = n + m + 1;
        for (long i = 0; i < expo && mpz_sizeinbase(bound.get_mpz_t(), 2) < 64; ++i)
            bound *= base;
        fallback_bound = bound;
    }

    std::vector<LinCon> as_lincons() const {
        std::vector<LinCon> cs;
        for (const auto& r : rows) {
            LinCon c;
            c.rel = r.eq ? LinCon::Eq : LinCon::Le;
            c.constant = Rat(r.constant);
            for (const auto& [v, k] : r.coeffs) c.coeffs.push_back({v, Rat(k)});
            cs.push_back(std::move(c));
        }
        return cs;
    }

    bool rows_hold(const std::vector<Rat>& val) const {
        for (const auto& r : rows) {
            Rat s = Rat(r.constant);
            for (const auto& [v, c] : r.coeffs) s += Rat(c) * val[v];
            if (r.eq ? s != 0 : s > 0) return false;
        }
        return true;
    }

    bool search(PropSystem sys, const std::vector<LinCon>& cons, std::map<int, Rat>& out) {
        if (++nodes > node_budget)
            throw std::runtime_error("integer conjunction solver exceeded its node budget");
        if (!propagate(sys, cons, 64)) return false;

        // Find an unfixed variable that occurs in some row.
        int branch_var = -1;
        for (const auto& r : rows) {
            for (const auto& [v, c] : r.coeffs) {
                const Box& b = sys.boxes[v];
                if (!b.fixed()) {
                    branch_var = v;
                    break;
                }
            }
            if (branch_var >= 0) break;
        }
        if (branch_var < 0) {
            // All constrained variables fixed; verify rows exactly.
            std::vector<Rat> val(vars.size(), Rat(0));
            for (size_t v = 0; v < vars.size(); ++v)
                if (sys.boxes[v].fixed()) val[v] = *sys.boxes[v].lo;
            if (!rows_hold(val)) return false;
            for (size_t v = 0; v < vars.size(); ++v)
                if (sys.boxes[v].fixed()) out[static_cast<int>(v)] = *sys.boxes[v].lo;
            return true;
        }

        Box& b = sys.boxes[branch_var];
        Rat lo = b.lo ? *b.lo : Rat(-fallback_bound);
        Rat hi = b.hi ? *b.hi : Rat(fallback_bound);
        if (lo > hi) return false;

        // Try the smallest value first, then the rest of the range. Splitting
        // off one point keeps witnesses minimal, which downstream run
        // materialization appreciates.
        {
            PropSystem s2 = sys;
            s2.boxes[branch_var].lo = lo;
            s2.boxes[branch_var].hi = lo;
            if (search(std::move(s2), cons, out)) return true;
        }
        if (lo < hi) {
            PropSystem s2 = sys;
            s2.boxes[branch_var].lo = lo + 1;
            s2.boxes[branch_var].hi = hi;
            if (search(std::move(s2), cons, out)) return true;
        }
        return false;
    }
};

}  // namespace

// Diagnostic counters for the most recent integer solve.
static thread_local std::string g_solver_stats;
const std::string& solver_stats() { return g_solver_stats; }

Verdict solve_int_conjunction(int var_count, const std::vector<LinCon>& cons) {
    IntSolver solver;
    solver.vars.assign(var_count, VarDecl{"", Sort::Integer});

    for (const auto& raw : cons) {
        LinCon c = normalize_con(raw);
        IntRow r;
        r.eq = c.rel == LinCon::Eq;
        // Clear denominators.
        Int den = c.constant.get_den();
        for (const auto& [v, k] : c.coeffs) den = lcm_int(den, k.get_den());
        Rat mult = Rat(den);
        Rat k0 = c.constant * mult;
        r.constant = k0.get_num();
        for (const auto& [v, k] : c.coeffs) {
            Rat kq = k * mult;
            r.coeffs.push_back({v, kq.get_num()});
        }
        if (c.rel == LinCon::Lt) {
            // Integer strictness: sum + k < 0 iff sum + k + 1 <= 0.
            r.constant += 1;
        }
        solver.rows.push_back(std::move(r));
    }

    if (!solver.presolve()) return {false, {}};
    solver.compute_fallback();
    g_solver_stats = "int-solver: rows=" + std::to_string(solver.rows.size()) +
                     " substs=" + std::to_string(solver.substs.size()) +
                     " fallback-bound=" + solver.fallback_bound.get_str();

    PropSystem sys(solver.vars);
    std::map<int, Rat> partial;
    auto cons2 = solver.as_lincons();
    if (!solver.search(std::move(sys), cons2, partial)) return {false, {}};

    // Undo substitutions in reverse.
    std::map<int, Rat> full = partial;
    auto get = [&full](int v) {
        auto it = full.find(v);
        return it == full.end() ? Rat(0) : it->second;
    };
    for (auto it = solver.substs.rbegin(); it != solver.substs.rend(); ++it) {
        Rat s = Rat(it->constant);
        for (const auto& [w, d] : it->coeffs) s += Rat(d) * get(w);
        full[it->var] = s;
    }

    Verdict v;
    v.sat = true;
    for (int i = 0; i < var_count; ++i) v.valuation[i] = get(i);
    // Exactness net: every constraint must hold on the witness.
    for (const auto& raw : cons) {
        Rat s = raw.constant;
        for (const auto& [w, c] : raw.coeffs) s += c * v.valuation[w];
        bool ok = raw.rel == LinCon::Eq ? s == 0 : raw.rel == LinCon::Lt ? s < 0 : s <= 0;
        if (!ok) throw std::logic_error("integer witness failed verification");
    }
    return v;
}

// ---------------------------------------------------------------------------
// decide: pipeline + lazy DNF search with propagation-based pruning.

namespace {

struct DnfSearcher {
    const LaFormula& f;
    std::vector<LinCon> int_cons, frac_cons;
    long or_branches = 0;
    long budget = 2000000;

    explicit DnfSearcher(const LaFormula& sep) : f(sep) {}

    std::optional<LinCon> atom_to_lincon(const Node& n, bool& ground_value, bool& is_ground) {
        // Linearize lhs - rhs REL 0.
        LinCon c;
        is_ground = false;
        std::function<void(const Term&, const Rat&)> lin = [&](const Term& t, const Rat& mul) {
            switch (t->kind) {
                case TNode::Var: {
                    for (auto& [v, k] : c.coeffs)
                        if (v == t->var) {
                            k += mul;
                            return;
                        }
                    c.coeffs.push_back({t->var, mul});
                    return;
                }
                case TNode::Const: c.constant += mul * t->constant; return;
                case TNode::Neg: lin(t->a, -mul); return;
                case TNode::Add:
                    lin(t->a, mul);
                    lin(t->b, mul);
                    return;
                case TNode::Scale: lin(t->a, mul * Rat(t->factor)); return;
                case TNode::Floor:
                case TNode::Frac:
                    throw std::logic_error("decide: residual floor/frac after separation");
            }
        };
        lin(n->lhs, Rat(1));
        lin(n->rhs, Rat(-1));
        c.coeffs.erase(std::remove_if(c.coeffs.begin(), c.coeffs.end(),
                                      [](const auto& p) { return p.second == 0; }),
                       c.coeffs.end());
        Rel rel = n->rel;
        bool flip = rel == Rel::Ge || rel == Rel::Gt;
        if (flip) {
            for (auto& [v, k] : c.coeffs) k = -k;
            c.constant = -c.constant;
            rel = rel == Rel::Ge ? Rel::Le : Rel::Lt;
        }
        c.rel = rel == Rel::Eq ? LinCon::Eq : rel == Rel::Lt ? LinCon::Lt : LinCon::Le;
        if (c.coeffs.empty()) {
            is_ground = true;
            ground_value = c.rel == LinCon::Eq   ? c.constant == 0
                           : c.rel == LinCon::Lt ? c.constant < 0
                                                 : c.constant <= 0;
            return std::nullopt;
        }
        return c;
    }

    bool is_int_con(const LinCon& c) const {
        for (const auto& [v, k] : c.coeffs)
            if (f.vars[v].sort != Sort::Integer) return false;
        return true;
    }

    bool prune() {
        PropSystem sys(f.vars);
        std::vector<LinCon> all = int_cons;
        all.insert(all.end(), frac_cons.begin(), frac_cons.end());
        return propagate(sys, all, 24);
    }

    // Returns true when a satisfying leaf was found; fills verdict.
    bool search(std::vector<Node> pending, Verdict& out) {
        while (!pending.empty()) {
            Node n = pending.back();
            pending.pop_back();
            switch (n->kind) {
                case FNode::True: continue;
                case FNode::False: return false;
                case FNode::And:
                    for (const auto& c : n->children) pending.push_back(c);
                    continue;
                case FNode::Not: throw std::logic_error("decide: residual negation");
                case FNode::Atom: {
                    bool ground = false, gv = false;
                    auto c = atom_to_lincon(n, gv, ground);
                    if (ground) {
                        if (!gv) return false;
                        continue;
                    }
                    if (is_int_con(*c))
                        int_cons.push_back(std::move(*c));
                    else
                        frac_cons.push_back(std::move(*c));
                    continue;
                }
                case FNode::Or: {
                    if (++or_branches > budget)
                        throw std::runtime_error("decide exceeded its branch budget");
                    if (!prune()) return false;
                    size_t int_mark = int_cons.size();
                    size_t frac_mark = frac_cons.size();
                    for (const auto& child : n->children) {
                        std::vector<Node> next = pending;
                        next.push_back(child);
                        if (search(std::move(next), out)) return true;
                        int_cons.resize(int_mark);
                        frac_cons.resize(frac_mark);
                    }
                    return false;
                }
            }
        }
        // Leaf: decide both sorts exactly.
        if (!prune()) return false;
        Verdict iv = solve_int_conjunction(f.var_count(), int_cons);
        if (!iv.sat) return false;
        Verdict fv = solve_rat_conjunction(f.var_count(), frac_cons);
        if (!fv.sat) return false;
        out.sat = true;
        out.valuation.clear();
        for (int v = 0; v < f.var_count(); ++v) {
            if (f.vars[v].sort == Sort::Integer) {
                auto it = iv.valuation.find(v);
                out.valuation[v] = it == iv.valuation.end() ? Rat(0) : it->second;
            } else {
                auto it = fv.valuation.find(v);
                out.valuation[v] = it == fv.valuation.end() ? Rat(0) : it->second;
            }
        }
        return true;
    }
};

}  // namespace

Verdict decide(const LaFormula& f) {
    LaFormula shallow = make_shallow(f);
    LaFormula scale_free = eliminate_scaling(shallow);
    std::vector<int> int_sym, frac_sym;
    LaFormula sep = separate_mapped(scale_free, &int_sym, &frac_sym);
    if (!is_separated(sep)) throw std::logic_error("separation failed");

    DnfSearcher searcher(sep);
    Verdict leaf;
    if (!searcher.search({sep.root}, leaf)) return {false, {}};

    Verdict out;
    out.sat = true;
    auto leaf_val = [&](int v) {
        auto it = leaf.valuation.find(v);
        return it == leaf.valuation.end() ? Rat(0) : it->second;
    };
    // A rational x is recovered as x#i + x#f; integer and fraction variables
    // carry over directly.
    for (int v = 0; v < f.var_count(); ++v) {
        if (f.vars[v].sort == Sort::Rational) {
            Rat value = 0;
            if (int_sym[v] >= 0) value += leaf_val(int_sym[v]);
            if (frac_sym[v] >= 0) value += leaf_val(frac_sym[v]);
            out.valuation[v] = value;
        } else {
            out.valuation[v] = leaf_val(v);
        }
    }
    // Witness net: the valuation must satisfy the input formula.
    if (!eval(f, out.valuation))
        throw std::logic_error("decide produced a witness that fails eval");
    return out;
}

}  // namespace tbpp::la
