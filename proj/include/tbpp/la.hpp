#ifndef TBPP_LA_HPP
#define TBPP_LA_HPP

// Linear arithmetic kernel: terms with floor and fractional-part operators,
// boolean structure, the separation rewriting, an exact satisfiability
// decision for the existential fragment, and SMT-LIB export.
//
// All variables of a formula are treated as existentially quantified when
// deciding; Sat verdicts carry an exact rational witness for every variable
// of the input formula.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tbpp/model.hpp"  // Rel
#include "tbpp/rational.hpp"

namespace tbpp::la {

enum class Sort { Rational, Integer };

struct TNode;
using Term = std::shared_ptr<const TNode>;

struct TNode {
    enum Kind { Var, Const, Floor, Frac, Neg, Add, Scale } kind;
    int var = -1;    // Var
    Rat constant;    // Const
    Int factor;      // Scale
    Term a, b;       // children (a for unary, a+b for Add)
};

Term t_var(int v);
Term t_const(Rat k);
Term t_const(long k);
Term t_floor(Term t);
Term t_frac(Term t);
Term t_neg(Term t);
Term t_add(Term a, Term b);
Term t_scale(Int k, Term t);
// Left-folded sum; empty list is the constant 0.
Term t_sum(const std::vector<Term>& ts);

struct FNode;
using Node = std::shared_ptr<const FNode>;

struct FNode {
    enum Kind { True, False, Atom, And, Or, Not } kind;
    Term lhs, rhs;  // Atom
    Rel rel = Rel::Le;
    std::vector<Node> children;
};

Node f_true();
Node f_false();
Node f_atom(Term lhs, Rel rel, Term rhs);
Node f_and(std::vector<Node> children);  // flattens; empty list is true
Node f_or(std::vector<Node> children);   // flattens; empty list is false
Node f_not(Node n);

struct VarDecl {
    std::string name;
    Sort sort = Sort::Rational;
};

struct LaFormula {
    std::vector<VarDecl> vars;
    Node root;

    int add_var(const std::string& name, Sort sort = Sort::Rational) {
        vars.push_back({name, sort});
        return static_cast<int>(vars.size()) - 1;
    }
    int var_count() const { return static_cast<int>(vars.size()); }
};

// Standard semantics; floor/frac are the integer and fractional part. Throws
// std::invalid_argument on a variable the valuation does not bind.
bool eval(const LaFormula& f, const std::map<int, Rat>& valuation);
Rat eval_term(const Term& t, const std::map<int, Rat>& valuation);

// Equisatisfiable formula in which every atom's sides are shallow: a
// variable, a constant, floor/frac of a variable, a sum of two variables, or
// an integer scaling of a variable. Fresh existential variables carry
// defining equalities.
LaFormula make_shallow(const LaFormula& f);

// Removes k*x terms by iterated doubling over the binary expansion of k.
// Requires shallow input.
LaFormula eliminate_scaling(const LaFormula& f);

// Rewrites into the separated form: every atom mentions only integer-part
// symbols or only fractional-part symbols. Requires shallow, scaling-free
// input. Fractional symbols are constrained to [0,1) in the result.
LaFormula separate(const LaFormula& f);

// As separate(), additionally reporting for each input variable the
// integer-part and fractional-part symbols created for it (-1 when the
// variable never needed splitting).
LaFormula separate_mapped(const LaFormula& f, std::vector<int>* int_sym,
                          std::vector<int>* frac_sym);

// Syntactic check of the separation property (every atom single-sorted).
bool is_separated(const LaFormula& f);

struct Verdict {
    bool sat = false;
    std::map<int, Rat> valuation;  // over the input formula's variables
};

// Satisfiability of the existential fragment: make_shallow, then
// eliminate_scaling, then separate, then lazy enumeration of the disjunctive
// normal form with early pruning. Integer-sorted conjunctions are decided by
// solve_int_conjunction, fractional ones by solve_rat_conjunction.
Verdict decide(const LaFormula& f);

// Linear constraint sum(coeffs) + constant REL 0.
struct LinCon {
    enum RelKind { Le, Lt, Eq } rel = Le;
    std::vector<std::pair<int, Rat>> coeffs;
    Rat constant;
};

// Conjunction of linear constraints over integer variables (var ids are
// 0..var_count-1). Exact verdict with witness.
Verdict solve_int_conjunction(int var_count, const std::vector<LinCon>& cons);

// Conjunction of linear constraints over rational variables, decided by
// Fourier-Motzkin elimination with strictness tracking.
Verdict solve_rat_conjunction(int var_count, const std::vector<LinCon>& cons);

// SMT-LIB v2 script over mixed Int/Real sorts; floor is encoded through a
// fresh integer with bracketing constraints.
std::string export_smt(const LaFormula& f);

nlohmann::json formula_to_json(const LaFormula& f);

// Convenience builders used across the compilation pipeline.
Node f_var_rel_const(int var, Rel rel, const Rat& k);
Node f_var_eq_var(int a, int b);
Node f_le(Term a, Term b);
Node f_eq(Term a, Term b);

}  // namespace tbpp::la

#endif
