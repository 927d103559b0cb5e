#include "tbpp/la.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <sstream>

namespace tbpp::la {

Term t_var(int v) {
    auto n = std::make_shared<TNode>();
    n->kind = TNode::Var;
    n->var = v;
    return n;
}

Term t_const(Rat k) {
    auto n = std::make_shared<TNode>();
    n->kind = TNode::Const;
    n->constant = std::move(k);
    return n;
}

Term t_const(long k) { return t_const(Rat(k)); }

static Term t_unary(TNode::Kind kind, Term t) {
    auto n = std::make_shared<TNode>();
    n->kind = kind;
    n->a = std::move(t);
    return n;
}

Term t_floor(Term t) { return t_unary(TNode::Floor, std::move(t)); }
Term t_frac(Term t) { return t_unary(TNode::Frac, std::move(t)); }
Term t_neg(Term t) { return t_unary(TNode::Neg, std::move(t)); }

Term t_add(Term a, Term b) {
    auto n = std::make_shared<TNode>();
    n->kind = TNode::Add;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

Term t_scale(Int k, Term t) {
    auto n = std::make_shared<TNode>();
    n->kind = TNode::Scale;
    n->factor = std::move(k);
    n->a = std::move(t);
    return n;
}

Term t_sum(const std::vector<Term>& ts) {
    if (ts.empty()) return t_const(0L);
    Term acc = ts[0];
    for (size_t i = 1; i < ts.size(); ++i) acc = t_add(acc, ts[i]);
    return acc;
}

Node f_true() {
    auto n = std::make_shared<FNode>();
    n->kind = FNode::True;
    return n;
}

Node f_false() {
    auto n = std::make_shared<FNode>();
    n->kind = FNode::False;
    return n;
}

Node f_atom(Term lhs, Rel rel, Term rhs) {
    auto n = std::make_shared<FNode>();
    n->kind = FNode::Atom;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    n->rel = rel;
    return n;
}

Node f_and(std::vector<Node> children) {
    std::vector<Node> flat;
    for (auto& c : children) {
        if (!c || c->kind == FNode::True) continue;
        if (c->kind == FNode::False) return f_false();
        if (c->kind == FNode::And)
            flat.insert(flat.end(), c->children.begin(), c->children.end());
        else
            flat.push_back(std::move(c));
    }
    if (flat.empty()) return f_true();
    if (flat.size() == 1) return flat[0];
    auto n = std::make_shared<FNode>();
    n->kind = FNode::And;
    n->children = std::move(flat);
    return n;
}

Node f_or(std::vector<Node> children) {
    std::vector<Node> flat;
    for (auto& c : children) {
        if (!c || c->kind == FNode::False) continue;
        if (c->kind == FNode::True) return f_true();
        if (c->kind == FNode::Or)
            flat.insert(flat.end(), c->children.begin(), c->children.end());
        else
            flat.push_back(std::move(c));
    }
    if (flat.empty()) return f_false();
    if (flat.size() == 1) return flat[0];
    auto n = std::make_shared<FNode>();
    n->kind = FNode::Or;
    n->children = std::move(flat);
    return n;
}

Node f_not(Node n) {
    auto out = std::make_shared<FNode>();
    out->kind = FNode::Not;
    out->children = {std::move(n)};
    return out;
}

Node f_var_rel_const(int var, Rel rel, const Rat& k) {
    return f_atom(t_var(var), rel, t_const(k));
}

Node f_var_eq_var(int a, int b) { return f_atom(t_var(a), Rel::Eq, t_var(b)); }
Node f_le(Term a, Term b) { return f_atom(std::move(a), Rel::Le, std::move(b)); }
Node f_eq(Term a, Term b) { return f_atom(std::move(a), Rel::Eq, std::move(b)); }

Rat eval_term(const Term& t, const std::map<int, Rat>& valuation) {
    switch (t->kind) {
        case TNode::Var: {
            auto it = valuation.find(t->var);
            if (it == valuation.end())
                throw std::invalid_argument("unbound variable " + std::to_string(t->var));
            return it->second;
        }
        case TNode::Const: return t->constant;
        case TNode::Floor: return floor_rat(eval_term(t->a, valuation));
        case TNode::Frac: return frac_rat(eval_term(t->a, valuation));
        case TNode::Neg: return -eval_term(t->a, valuation);
        case TNode::Add: return eval_term(t->a, valuation) + eval_term(t->b, valuation);
        case TNode::Scale: return Rat(t->factor) * eval_term(t->a, valuation);
    }
    throw std::logic_error("bad term");
}

static bool eval_node(const Node& n, const std::map<int, Rat>& v) {
    switch (n->kind) {
        case FNode::True: return true;
        case FNode::False: return false;
        case FNode::Atom:
            return rel_holds(eval_term(n->lhs, v), n->rel, eval_term(n->rhs, v));
        case FNode::And:
            for (const auto& c : n->children)
                if (!eval_node(c, v)) return false;
            return true;
        case FNode::Or:
            for (const auto& c : n->children)
                if (eval_node(c, v)) return true;
            return false;
        case FNode::Not: return !eval_node(n->children[0], v);
    }
    throw std::logic_error("bad formula");
}

bool eval(const LaFormula& f, const std::map<int, Rat>& valuation) {
    return eval_node(f.root, valuation);
}

// ---------------------------------------------------------------------------
// Negation normal form.

static Rel negate_rel(Rel r) {
    switch (r) {
        case Rel::Lt: return Rel::Ge;
        case Rel::Le: return Rel::Gt;
        case Rel::Ge: return Rel::Lt;
        case Rel::Gt: return Rel::Le;
        case Rel::Eq: break;
    }
    throw std::logic_error("negate_rel(Eq) needs a disjunction");
}

Node to_nnf(const Node& n, bool negate) {
    switch (n->kind) {
        case FNode::True: return negate ? f_false() : f_true();
        case FNode::False: return negate ? f_true() : f_false();
        case FNode::Atom:
            if (!negate) return n;
            if (n->rel == Rel::Eq)
                return f_or({f_atom(n->lhs, Rel::Lt, n->rhs), f_atom(n->lhs, Rel::Gt, n->rhs)});
            return f_atom(n->lhs, negate_rel(n->rel), n->rhs);
        case FNode::And: {
            std::vector<Node> cs;
            for (const auto& c : n->children) cs.push_back(to_nnf(c, negate));
            return negate ? f_or(std::move(cs)) : f_and(std::move(cs));
        }
        case FNode::Or: {
            std::vector<Node> cs;
            for (const auto& c : n->children) cs.push_back(to_nnf(c, negate));
            return negate ? f_and(std::move(cs)) : f_or(std::move(cs));
        }
        case FNode::Not: return to_nnf(n->children[0], !negate);
    }
    throw std::logic_error("bad formula");
}

// ---------------------------------------------------------------------------
// make_shallow: flatten every atom into sides drawn from the shallow grammar
//   x | k | floor(x) | frac(x) | x + y | x + k | k * x
// introducing fresh variables with defining equalities for anything deeper.

namespace {

struct Primary {
    enum Kind { PVar, PFloor, PFrac } kind;
    int var;
    bool operator<(const Primary& o) const {
        if (kind != o.kind) return kind < o.kind;
        return var < o.var;
    }
    bool operator==(const Primary& o) const { return kind == o.kind && var == o.var; }
};

// Linear combination over primaries with a rational constant.
struct Combo {
    std::vector<std::pair<Int, Primary>> terms;
    Rat constant;

    void add(const Int& coef, const Primary& p) {
        for (auto& [c, q] : terms) {
            if (q == p) {
                c += coef;
                return;
            }
        }
        terms.push_back({coef, p});
    }
    void merge(const Combo& o, const Int& scale) {
        for (const auto& [c, p] : o.terms) add(c * scale, p);
        constant += Rat(scale) * o.constant;
    }
    void prune() {
        terms.erase(std::remove_if(terms.begin(), terms.end(),
                                   [](const auto& t) { return t.first == 0; }),
                    terms.end());
    }
};

class Shallower {
  public:
    explicit Shallower(LaFormula f) : f_(std::move(f)) {}

    LaFormula run() {
        f_.root = walk(to_nnf(f_.root, false));
        return std::move(f_);
    }

  private:
    Node walk(const Node& n) {
        switch (n->kind) {
            case FNode::True:
            case FNode::False: return n;
            case FNode::And:
            case FNode::Or: {
                std::vector<Node> cs;
                for (const auto& c : n->children) cs.push_back(walk(c));
                return n->kind == FNode::And ? f_and(std::move(cs)) : f_or(std::move(cs));
            }
            case FNode::Not: throw std::logic_error("NNF violated");
            case FNode::Atom: return shallow_atom(n);
        }
        throw std::logic_error("bad formula");
    }

    Term primary_term(const Primary& p) {
        switch (p.kind) {
            case Primary::PVar: return t_var(p.var);
            case Primary::PFloor: return t_floor(t_var(p.var));
            case Primary::PFrac: return t_frac(t_var(p.var));
        }
        throw std::logic_error("bad primary");
    }

    // Reduce a term to a combo over primaries, producing defining atoms for
    // nested floor/frac arguments.
    Combo normalize(const Term& t, std::vector<Node>& defs) {
        Combo c;
        switch (t->kind) {
            case TNode::Var:
                c.add(1, {Primary::PVar, t->var});
                return c;
            case TNode::Const:
                c.constant = t->constant;
                return c;
            case TNode::Neg: {
                Combo a = normalize(t->a, defs);
                c.merge(a, Int(-1));
                return c;
            }
            case TNode::Add: {
                c = normalize(t->a, defs);
                c.merge(normalize(t->b, defs), Int(1));
                return c;
            }
            case TNode::Scale: {
                Combo a = normalize(t->a, defs);
                c.merge(a, t->factor);
                return c;
            }
            case TNode::Floor:
            case TNode::Frac: {
                Combo inner = normalize(t->a, defs);
                inner.prune();
                int v;
                if (inner.terms.size() == 1 && inner.terms[0].first == 1 &&
                    inner.terms[0].second.kind == Primary::PVar && inner.constant == 0) {
                    v = inner.terms[0].second.var;
                } else {
                    v = fresh(t->kind == TNode::Floor ? "sf" : "sg");
                    defs.push_back(combo_eq_var(inner, v, defs));
                }
                c.add(1, {t->kind == TNode::Floor ? Primary::PFloor : Primary::PFrac, v});
                return c;
            }
        }
        throw std::logic_error("bad term");
    }

    int fresh(const char* tag) {
        return f_.add_var(std::string("_") + tag + std::to_string(f_.var_count()),
                          Sort::Rational);
    }

    // Builds the atom  var = combo  in shallow form (may add chain defs).
    Node combo_eq_var(const Combo& combo, int var, std::vector<Node>& defs) {
        auto [lhs, rhs] = split_sides(combo, defs);
        // var + rhs-side = lhs-side.
        Term left = rhs ? t_add(t_var(var), *rhs) : t_var(var);
        return f_atom(left, Rel::Eq, lhs ? *lhs : t_const(0L));
    }

    // Turn a combo comparison combo REL 0 into a shallow atom by splitting
    // positive and negative parts across the relation.
    Node shallow_atom(const Node& atom) {
        std::vector<Node> defs;
        Combo c = normalize(atom->lhs, defs);
        c.merge(normalize(atom->rhs, defs), Int(-1));
        c.prune();
        Combo pos, neg;
        for (const auto& [coef, p] : c.terms) {
            if (coef > 0)
                pos.terms.push_back({coef, p});
            else
                neg.terms.push_back({-coef, p});
        }
        if (c.constant > 0)
            pos.constant = c.constant;
        else
            neg.constant = -c.constant;
        auto lhs = flatten_side(pos, defs);
        auto rhs = flatten_side(neg, defs);
        Node a = f_atom(lhs ? *lhs : t_const(0L), atom->rel, rhs ? *rhs : t_const(0L));
        defs.push_back(a);
        return f_and(std::move(defs));
    }

    std::pair<std::optional<Term>, std::optional<Term>> split_sides(const Combo& combo,
                                                                    std::vector<Node>& defs) {
        Combo pos, neg;
        for (const auto& [coef, p] : combo.terms) {
            if (coef > 0)
                pos.terms.push_back({coef, p});
            else if (coef < 0)
                neg.terms.push_back({-coef, p});
        }
        if (combo.constant > 0)
            pos.constant = combo.constant;
        else if (combo.constant < 0)
            neg.constant = -combo.constant;
        return {flatten_side(pos, defs), flatten_side(neg, defs)};
    }

    // Builds a shallow term for a nonnegative combo, chaining fresh sums.
    std::optional<Term> flatten_side(const Combo& combo, std::vector<Node>& defs) {
        std::vector<Term> addends;
        for (const auto& [coef, p] : combo.terms) {
            Term base = primary_term(p);
            if (coef == 1) {
                addends.push_back(base);
            } else {
                // Scalings apply to plain variables only; alias other primaries.
                if (p.kind != Primary::PVar) {
                    int u = fresh("sa");
                    defs.push_back(f_atom(t_var(u), Rel::Eq, base));
                    base = t_var(u);
                }
                addends.push_back(t_scale(coef, base));
            }
        }
        if (combo.constant != 0) addends.push_back(t_const(combo.constant));
        if (addends.empty()) return std::nullopt;
        // Chain: u1 = a0 + a1, u2 = u1 + a2, ...; the final link stays inline.
        Term acc = addends[0];
        bool acc_compound = acc->kind == TNode::Scale;  // k*x may not nest in sums
        for (size_t i = 1; i < addends.size(); ++i) {
            bool last = i + 1 == addends.size();
            Term rhs = addends[i];
            if (acc_compound || rhs->kind == TNode::Scale) {
                // Alias compound pieces so every Add has variable/const leaves.
                if (acc_compound) {
                    int u = fresh("sc");
                    defs.push_back(f_atom(t_var(u), Rel::Eq, acc));
                    acc = t_var(u);
                    acc_compound = false;
                }
                if (rhs->kind == TNode::Scale) {
                    int u = fresh("sc");
                    defs.push_back(f_atom(t_var(u), Rel::Eq, rhs));
                    rhs = t_var(u);
                }
            }
            if (last) {
                acc = t_add(acc, rhs);
                acc_compound = true;
            } else {
                int u = fresh("ss");
                defs.push_back(f_atom(t_var(u), Rel::Eq, t_add(acc, rhs)));
                acc = t_var(u);
                acc_compound = false;
            }
        }
        return acc;
    }

    LaFormula f_;
};

}  // namespace

LaFormula make_shallow(const LaFormula& f) { return Shallower(f).run(); }

// ---------------------------------------------------------------------------
// eliminate_scaling: k*x replaced via iterated doubling over binary digits.

namespace {

class ScaleEliminator {
  public:
    explicit ScaleEliminator(LaFormula f) : f_(std::move(f)) {}

    LaFormula run() {
        f_.root = walk(f_.root);
        return std::move(f_);
    }

  private:
    Node walk(const Node& n) {
        switch (n->kind) {
            case FNode::True:
            case FNode::False: return n;
            case FNode::And:
            case FNode::Or: {
                std::vector<Node> cs;
                for (const auto& c : n->children) cs.push_back(walk(c));
                return n->kind == FNode::And ? f_and(std::move(cs)) : f_or(std::move(cs));
            }
            case FNode::Not: return f_not(walk(n->children[0]));
            case FNode::Atom: return rewrite_atom(n);
        }
        throw std::logic_error("bad formula");
    }

    Node rewrite_atom(const Node& atom) {
        std::vector<Node> defs;
        Term l = rewrite_term(atom->lhs, defs);
        Term r = rewrite_term(atom->rhs, defs);
        defs.push_back(f_atom(l, atom->rel, r));
        return f_and(std::move(defs));
    }

    Term rewrite_term(const Term& t, std::vector<Node>& defs) {
        switch (t->kind) {
            case TNode::Var:
            case TNode::Const: return t;
            case TNode::Floor:
            case TNode::Frac:
            case TNode::Neg: {
                Term a = rewrite_term(t->a, defs);
                if (a == t->a) return t;
                return t_unary(static_cast<TNode::Kind>(t->kind), a);
            }
            case TNode::Add: {
                Term a = rewrite_term(t->a, defs);
                Term b = rewrite_term(t->b, defs);
                if (a == t->a && b == t->b) return t;
                return t_add(a, b);
            }
            case TNode::Scale: {
                if (t->a->kind != TNode::Var)
                    throw std::invalid_argument("eliminate_scaling requires shallow input");
                Int k = t->factor;
                int x = t->a->var;
                bool neg = k < 0;
                if (neg) k = -k;
                if (k == 0) return t_const(0L);
                Term body;
                // Doubled copies of a fraction-sorted variable leave [0,1), so
                // chain variables are plain rationals unless x is integral.
                Sort chain_sort =
                    f_.vars[x].sort == Sort::Integer ? Sort::Integer : Sort::Rational;
                if (k == 1) {
                    body = t_var(x);
                } else {
                    // Doubling chain x0 = x, x_{i+1} = x_i + x_i; sum the bits.
                    size_t bits = mpz_sizeinbase(k.get_mpz_t(), 2);
                    std::vector<int> chain;
                    int x0 = f_.add_var("_d" + std::to_string(f_.var_count()), chain_sort);
                    defs.push_back(f_atom(t_var(x0), Rel::Eq, t_var(x)));
                    chain.push_back(x0);
                    for (size_t i = 1; i < bits; ++i) {
                        int xi = f_.add_var("_d" + std::to_string(f_.var_count()),
                                            chain_sort);
                        defs.push_back(
                            f_atom(t_var(xi), Rel::Eq, t_add(t_var(chain.back()), t_var(chain.back()))));
                        chain.push_back(xi);
                    }
                    std::vector<Term> picked;
                    for (size_t i = 0; i < bits; ++i)
                        if (mpz_tstbit(k.get_mpz_t(), i)) picked.push_back(t_var(chain[i]));
                    // Sum of the picked bits, chained through fresh variables.
                    Term acc = picked[0];
                    for (size_t i = 1; i < picked.size(); ++i) {
                        if (i + 1 == picked.size()) {
                            acc = t_add(acc, picked[i]);
                        } else {
                            int u = f_.add_var("_d" + std::to_string(f_.var_count()),
                                               chain_sort);
                            defs.push_back(f_atom(t_var(u), Rel::Eq, t_add(acc, picked[i])));
                            acc = t_var(u);
                        }
                    }
                    body = acc;
                }
                return neg ? t_neg(body) : body;
            }
        }
        throw std::logic_error("bad term");
    }

    LaFormula f_;
};

}  // namespace

LaFormula eliminate_scaling(const LaFormula& f) { return ScaleEliminator(f).run(); }

// ---------------------------------------------------------------------------
// Separation.

namespace {

// Linear expression over variables (post-separation symbols).
struct LinExpr {
    std::vector<std::pair<int, Rat>> coeffs;
    Rat constant;

    bool is_constant() const { return coeffs.empty(); }
    void add_var(int v, const Rat& c) {
        for (auto& [w, k] : coeffs)
            if (w == v) {
                k += c;
                return;
            }
        coeffs.push_back({v, c});
    }
    void add(const LinExpr& o) {
        for (const auto& [v, c] : o.coeffs) add_var(v, c);
        constant += o.constant;
    }
    Term to_term() const {
        std::vector<Term> ts;
        for (const auto& [v, c] : o_sorted()) {
            if (c == 1)
                ts.push_back(t_var(v));
            else
                ts.push_back(t_scale(Int(c.get_num()), t_var(v)));  // c integral here
        }
        if (constant != 0 || ts.empty()) ts.push_back(t_const(constant));
        return t_sum(ts);
    }
    std::vector<std::pair<int, Rat>> o_sorted() const {
        auto v = coeffs;
        std::sort(v.begin(), v.end());
        return v;
    }
};

// One case of a side's decomposition into integer and fractional components.
struct SideCase {
    LinExpr int_part;   // over integer symbols
    LinExpr frac_part;  // over fraction symbols (plus a constant in [0,1))
    Node condition;     // frac-sorted side condition, or true
    bool frac_static_zero = false;
};

class Separator {
  public:
    explicit Separator(const LaFormula& f) : in_(f) {
        out_.vars = f.vars;
        int_sym_.assign(f.vars.size(), -1);
        frac_sym_.assign(f.vars.size(), -1);
        for (size_t v = 0; v < f.vars.size(); ++v) {
            if (f.vars[v].sort == Sort::Integer) {
                int_sym_[v] = static_cast<int>(v);
            } else if (f.vars[v].sort == Sort::Fraction) {
                frac_sym_[v] = static_cast<int>(v);
            }
        }
    }

    LaFormula run() {
        Node body = walk(to_nnf(in_.root, false));
        std::vector<Node> all;
        all.push_back(body);
        for (size_t v = 0; v < in_.vars.size(); ++v) {
            if (frac_created_[v]) {
                all.push_back(f_var_rel_const(frac_sym_[v], Rel::Ge, Rat(0)));
                all.push_back(f_var_rel_const(frac_sym_[v], Rel::Lt, Rat(1)));
            }
        }
        out_.root = f_and(std::move(all));
        return std::move(out_);
    }

    // Mapping from original rational variables to their split symbols.
    std::vector<int> int_symbols() const { return int_sym_; }
    std::vector<int> frac_symbols() const { return frac_sym_; }

  private:
    int int_symbol(int v) {
        if (int_sym_[v] < 0) {
            int_sym_[v] = out_.add_var(in_.vars[v].name + "#i", Sort::Integer);
            int_sym_.resize(std::max(int_sym_.size(), out_.vars.size()), -1);
            frac_sym_.resize(std::max(frac_sym_.size(), out_.vars.size()), -1);
        }
        return int_sym_[v];
    }
    int frac_symbol(int v) {
        if (frac_sym_[v] < 0) {
            frac_sym_[v] = out_.add_var(in_.vars[v].name + "#f", Sort::Fraction);
            int_sym_.resize(std::max(int_sym_.size(), out_.vars.size()), -1);
            frac_sym_.resize(std::max(frac_sym_.size(), out_.vars.size()), -1);
        }
        if (frac_created_.size() < in_.vars.size()) frac_created_.resize(in_.vars.size());
        frac_created_[v] = true;
        return frac_sym_[v];
    }

    Node walk(const Node& n) {
        switch (n->kind) {
            case FNode::True:
            case FNode::False: return n;
            case FNode::And:
            case FNode::Or: {
                std::vector<Node> cs;
                for (const auto& c : n->children) cs.push_back(walk(c));
                return n->kind == FNode::And ? f_and(std::move(cs)) : f_or(std::move(cs));
            }
            case FNode::Not: throw std::logic_error("NNF violated");
            case FNode::Atom: return separate_atom(n);
        }
        throw std::logic_error("bad formula");
    }

    // Decompose a shallow side into integer/fractional components with case
    // conditions for the carry of two-variable sums.
    std::vector<SideCase> side_cases(const Term& t) {
        switch (t->kind) {
            case TNode::Const: {
                SideCase c;
                c.int_part.constant = floor_rat(t->constant);
                c.frac_part.constant = frac_rat(t->constant);
                c.condition = f_true();
                c.frac_static_zero = c.frac_part.constant == 0;
                return {c};
            }
            case TNode::Var: return {var_case(t->var)};
            case TNode::Floor: {
                SideCase base = atom_component(t->a);
                SideCase c;
                c.int_part = base.int_part;
                c.condition = f_true();
                c.frac_static_zero = true;
                return {c};
            }
            case TNode::Frac: {
                SideCase base = atom_component(t->a);
                SideCase c;
                c.frac_part = base.frac_part;
                c.condition = f_true();
                c.frac_static_zero = base.frac_static_zero;
                return {c};
            }
            case TNode::Neg: {
                // Shallow normalization moves negations across the relation;
                // a residual -t appears only around single primaries.
                auto inner = side_cases(t->a);
                for (auto& c : inner) {
                    for (auto& [v, k] : c.int_part.coeffs) k = -k;
                    c.int_part.constant = -c.int_part.constant;
                    for (auto& [v, k] : c.frac_part.coeffs) k = -k;
                    c.frac_part.constant = -c.frac_part.constant;
                    // A negated fractional part leaves [0,1); renormalize via
                    // the identity -f = -1 + (1 - f) only when f may be nonzero.
                    if (!c.frac_static_zero)
                        throw std::invalid_argument(
                            "separate: negation of a fractional quantity is not shallow");
                }
                return inner;
            }
            case TNode::Add: {
                auto as = side_cases(t->a);
                auto bs = side_cases(t->b);
                std::vector<SideCase> out;
                for (const auto& ca : as) {
                    for (const auto& cb : bs) {
                        // Combined fractional component fa + fb lies in [0,2);
                        // split on whether it wraps past 1.
                        SideCase lo;
                        lo.int_part = ca.int_part;
                        lo.int_part.add(cb.int_part);
                        lo.frac_part = ca.frac_part;
                        lo.frac_part.add(cb.frac_part);
                        lo.frac_static_zero = ca.frac_static_zero && cb.frac_static_zero;
                        if (lo.frac_static_zero) {
                            lo.condition = f_and({ca.condition, cb.condition});
                            out.push_back(lo);
                            continue;
                        }
                        Node no_carry = frac_lt_one(lo.frac_part);
                        Node carry = f_not_frac_lt_one(lo.frac_part);
                        SideCase hi = lo;
                        lo.condition = f_and({ca.condition, cb.condition, no_carry});
                        out.push_back(lo);
                        hi.int_part.constant += 1;
                        hi.frac_part.constant -= 1;
                        hi.condition = f_and({ca.condition, cb.condition, carry});
                        out.push_back(hi);
                    }
                }
                return out;
            }
            case TNode::Scale:
                throw std::invalid_argument("separate requires scaling-free input");
        }
        throw std::logic_error("bad term");
    }

    SideCase var_case(int v) {
        SideCase c;
        c.condition = f_true();
        if (in_.vars[v].sort == Sort::Integer) {
            c.int_part.add_var(v, Rat(1));
            c.frac_static_zero = true;
        } else if (in_.vars[v].sort == Sort::Fraction) {
            c.frac_part.add_var(v, Rat(1));
            c.frac_static_zero = false;
        } else {
            c.int_part.add_var(int_symbol(v), Rat(1));
            c.frac_part.add_var(frac_symbol(v), Rat(1));
            c.frac_static_zero = false;
        }
        return c;
    }

    // Component of a floor/frac argument, which is a plain variable after
    // make_shallow.
    SideCase atom_component(const Term& t) {
        if (t->kind != TNode::Var)
            throw std::invalid_argument("separate requires shallow input");
        return var_case(t->var);
    }

    Node frac_lt_one(const LinExpr& fr) { return f_atom(fr.to_term(), Rel::Lt, t_const(1L)); }
    Node f_not_frac_lt_one(const LinExpr& fr) {
        return f_atom(fr.to_term(), Rel::Ge, t_const(1L));
    }

    static Node ground_atom(const Rat& l, Rel rel, const Rat& r) {
        return rel_holds(l, rel, r) ? f_true() : f_false();
    }

    Node cmp(const LinExpr& a, Rel rel, const LinExpr& b) {
        if (a.is_constant() && b.is_constant()) return ground_atom(a.constant, rel, b.constant);
        return f_atom(a.to_term(), rel, b.to_term());
    }

    Node expand(const SideCase& s, Rel rel, const SideCase& t) {
        bool fracs_zero = s.frac_static_zero && t.frac_static_zero;
        switch (rel) {
            case Rel::Le:
            case Rel::Lt: {
                if (fracs_zero) return cmp(s.int_part, rel, t.int_part);
                Node lt = cmp(s.int_part, Rel::Lt, t.int_part);
                Node eq = cmp(s.int_part, Rel::Eq, t.int_part);
                Node fr = cmp(s.frac_part, rel, t.frac_part);
                return f_or({lt, f_and({eq, fr})});
            }
            case Rel::Eq: {
                Node ieq = cmp(s.int_part, Rel::Eq, t.int_part);
                if (fracs_zero) return ieq;
                return f_and({ieq, cmp(s.frac_part, Rel::Eq, t.frac_part)});
            }
            case Rel::Ge: return expand(t, Rel::Le, s);
            case Rel::Gt: return expand(t, Rel::Lt, s);
        }
        throw std::logic_error("bad relation");
    }

    Node separate_atom(const Node& atom) {
        auto ls = side_cases(atom->lhs);
        auto rs = side_cases(atom->rhs);
        std::vector<Node> cases;
        for (const auto& l : ls)
            for (const auto& r : rs)
                cases.push_back(f_and({l.condition, r.condition, expand(l, atom->rel, r)}));
        return f_or(std::move(cases));
    }

    const LaFormula& in_;
    LaFormula out_;
    std::vector<int> int_sym_, frac_sym_;
    std::vector<bool> frac_created_ = std::vector<bool>(in_.vars.size(), false);
};

}  // namespace

LaFormula separate(const LaFormula& f) { return Separator(f).run(); }

LaFormula separate_mapped(const LaFormula& f, std::vector<int>* int_sym,
                          std::vector<int>* frac_sym) {
    Separator s(f);
    LaFormula out = s.run();
    if (int_sym) {
        *int_sym = s.int_symbols();
        int_sym->resize(f.vars.size(), -1);
    }
    if (frac_sym) {
        *frac_sym = s.frac_symbols();
        frac_sym->resize(f.vars.size(), -1);
    }
    return out;
}

namespace {

void collect_atom_sorts(const LaFormula& f, const Term& t, bool& has_int, bool& has_frac,
                        bool& has_rational) {
    switch (t->kind) {
        case TNode::Var: {
            Sort s = f.vars[t->var].sort;
            if (s == Sort::Integer) has_int = true;
            if (s == Sort::Fraction) has_frac = true;
            if (s == Sort::Rational) has_rational = true;
            return;
        }
        case TNode::Const: return;
        case TNode::Floor:
        case TNode::Frac:
            // Residual floor/frac operators mean the formula is not separated.
            has_rational = true;
            return;
        case TNode::Neg:
            collect_atom_sorts(f, t->a, has_int, has_frac, has_rational);
            return;
        case TNode::Add:
        case TNode::Scale:
            collect_atom_sorts(f, t->a, has_int, has_frac, has_rational);
            if (t->b) collect_atom_sorts(f, t->b, has_int, has_frac, has_rational);
            return;
    }
}

bool separated_node(const LaFormula& f, const Node& n) {
    switch (n->kind) {
        case FNode::True:
        case FNode::False: return true;
        case FNode::Atom: {
            bool i = false, fr = false, rat = false;
            collect_atom_sorts(f, n->lhs, i, fr, rat);
            collect_atom_sorts(f, n->rhs, i, fr, rat);
            return !rat && !(i && fr);
        }
        case FNode::And:
        case FNode::Or:
        case FNode::Not:
            for (const auto& c : n->children)
                if (!separated_node(f, c)) return false;
            return true;
    }
    return false;
}

}  // namespace

bool is_separated(const LaFormula& f) { return separated_node(f, f.root); }

// ---------------------------------------------------------------------------
// SMT-LIB export.

namespace {

class SmtPrinter {
  public:
    explicit SmtPrinter(const LaFormula& f) : f_(f) {}

    std::string run() {
        std::ostringstream body;
        print_node(f_.root, body);
        std::ostringstream os;
        os << "(set-logic QF_LIRA)\n";
        for (size_t v = 0; v < f_.vars.size(); ++v) {
            os << "(declare-const " << sym(static_cast<int>(v)) << " "
               << (f_.vars[v].sort == Sort::Integer ? "Int" : "Real") << ")\n";
        }
        for (const auto& d : decls_) os << d;
        for (size_t v = 0; v < f_.vars.size(); ++v)
            if (f_.vars[v].sort == Sort::Fraction)
                os << "(assert (and (<= 0.0 " << sym(static_cast<int>(v)) << ") (< "
                   << sym(static_cast<int>(v)) << " 1.0)))\n";
        for (const auto& a : floor_asserts_) os << a;
        os << "(assert " << body.str() << ")\n";
        os << "(check-sat)\n(get-model)\n";
        return os.str();
    }

  private:
    std::string sym(int v) const {
        std::string s = "v" + std::to_string(v) + "_";
        for (char c : f_.vars[v].name)
            s += (std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
        return s;
    }

    std::string num(const Rat& q) {
        if (is_integer(q)) {
            if (q < 0) return "(- " + Rat(-q).get_str() + ".0)";
            return q.get_str() + ".0";
        }
        std::string n = Rat(abs(q.get_num())).get_str();
        std::string d = Rat(q.get_den()).get_str();
        std::string core = "(/ " + n + ".0 " + d + ".0)";
        if (q < 0) return "(- " + core + ")";
        return core;
    }

    std::string print_term(const Term& t) {
        switch (t->kind) {
            case TNode::Var: {
                if (f_.vars[t->var].sort == Sort::Integer)
                    return "(to_real " + sym(t->var) + ")";
                return sym(t->var);
            }
            case TNode::Const: return num(t->constant);
            case TNode::Neg: return "(- " + print_term(t->a) + ")";
            case TNode::Add: return "(+ " + print_term(t->a) + " " + print_term(t->b) + ")";
            case TNode::Scale:
                return "(* " + num(Rat(t->factor)) + " " + print_term(t->a) + ")";
            case TNode::Floor: {
                std::string inner = print_term(t->a);
                std::string n = floor_helper(inner);
                return "(to_real " + n + ")";
            }
            case TNode::Frac: {
                std::string inner = print_term(t->a);
                std::string n = floor_helper(inner);
                return "(- " + inner + " (to_real " + n + "))";
            }
        }
        throw std::logic_error("bad term");
    }

    std::string floor_helper(const std::string& inner) {
        auto it = floors_.find(inner);
        if (it != floors_.end()) return it->second;
        std::string name = "fl" + std::to_string(floors_.size());
        floors_[inner] = name;
        decls_ += "(declare-const " + name + " Int)\n";
        floor_asserts_.push_back("(assert (and (<= (to_real " + name + ") " + inner +
                                 ") (< " + inner + " (+ (to_real " + name + ") 1.0))))\n");
        return name;
    }

    void print_node(const Node& n, std::ostringstream& os) {
        switch (n->kind) {
            case FNode::True: os << "true"; return;
            case FNode::False: os << "false"; return;
            case FNode::Atom: {
                const char* op = nullptr;
                switch (n->rel) {
                    case Rel::Lt: op = "<"; break;
                    case Rel::Le: op = "<="; break;
                    case Rel::Eq: op = "="; break;
                    case Rel::Ge: op = ">="; break;
                    case Rel::Gt: op = ">"; break;
                }
                os << "(" << op << " " << print_term(n->lhs) << " " << print_term(n->rhs)
                   << ")";
                return;
            }
            case FNode::And:
            case FNode::Or: {
                os << (n->kind == FNode::And ? "(and" : "(or");
                for (const auto& c : n->children) {
                    os << " ";
                    print_node(c, os);
                }
                os << ")";
                return;
            }
            case FNode::Not:
                os << "(not ";
                print_node(n->children[0], os);
                os << ")";
                return;
        }
    }

    const LaFormula& f_;
    std::map<std::string, std::string> floors_;
    std::string decls_;
    std::vector<std::string> floor_asserts_;
};

}  // namespace

std::string export_smt(const LaFormula& f) { return SmtPrinter(f).run(); }

// ---------------------------------------------------------------------------
// Debug JSON dump.

namespace {

nlohmann::json term_json(const LaFormula& f, const Term& t) {
    using nlohmann::json;
    switch (t->kind) {
        case TNode::Var: return json{{"var", f.vars[t->var].name}, {"id", t->var}};
        case TNode::Const: return json{{"const", rat_str(t->constant)}};
        case TNode::Floor: return json{{"floor", term_json(f, t->a)}};
        case TNode::Frac: return json{{"frac", term_json(f, t->a)}};
        case TNode::Neg: return json{{"neg", term_json(f, t->a)}};
        case TNode::Add: return json{{"add", {term_json(f, t->a), term_json(f, t->b)}}};
        case TNode::Scale:
            return json{{"scale", t->factor.get_str()}, {"of", term_json(f, t->a)}};
    }
    return nullptr;
}

nlohmann::json node_json(const LaFormula& f, const Node& n) {
    using nlohmann::json;
    switch (n->kind) {
        case FNode::True: return json{{"op", "true"}};
        case FNode::False: return json{{"op", "false"}};
        case FNode::Atom:
            return json{{"op", rel_str(n->rel)},
                        {"lhs", term_json(f, n->lhs)},
                        {"rhs", term_json(f, n->rhs)}};
        case FNode::And:
        case FNode::Or:
        case FNode::Not: {
            json c = json::array();
            for (const auto& ch : n->children) c.push_back(node_json(f, ch));
            const char* op = n->kind == FNode::And ? "and" : n->kind == FNode::Or ? "or" : "not";
            return json{{"op", op}, {"args", c}};
        }
    }
    return nullptr;
}

}  // namespace

nlohmann::json formula_to_json(const LaFormula& f) {
    nlohmann::json vars = nlohmann::json::array();
    for (const auto& v : f.vars)
        vars.push_back({{"name", v.name},
                        {"sort", v.sort == Sort::Integer    ? "int"
                                 : v.sort == Sort::Fraction ? "fraction"
                                                            : "rational"}});
    return {{"vars", vars}, {"formula", node_json(f, f.root)}};
}

}  // namespace tbpp::la
