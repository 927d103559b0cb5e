#include "tbpp/parser.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <vector>

namespace tbpp {

namespace {

struct Token {
    enum Kind { Ident, Number, Punct, End } kind;
    std::string text;
    int line;
    int column;
};

class Lexer {
  public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

  private:
    void advance() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '\n') {
                ++line_;
                col_ = 1;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++col_;
                ++pos_;
            } else if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
        tok_.line = line_;
        tok_.column = col_;
        if (pos_ >= text_.size()) {
            tok_.kind = Token::End;
            tok_.text.clear();
            return;
        }
        char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                    text_[pos_] == '_' || text_[pos_] == '@')) {
                ++pos_;
                ++col_;
            }
            // Allow hyphenated keywords such as simple-reach.
            while (pos_ + 1 < text_.size() && text_[pos_] == '-' &&
                   std::isalpha(static_cast<unsigned char>(text_[pos_ + 1]))) {
                ++pos_;
                ++col_;
                while (pos_ < text_.size() &&
                       (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                        text_[pos_] == '_')) {
                    ++pos_;
                    ++col_;
                }
            }
            tok_.kind = Token::Ident;
            tok_.text = text_.substr(start, pos_ - start);
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < text_.size() &&
                   std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
                ++col_;
            }
            tok_.kind = Token::Number;
            tok_.text = text_.substr(start, pos_ - start);
            return;
        }
        // Multi-character punctuation first.
        static const char* two[] = {"<=", ">=", ":=", "->"};
        for (const char* t : two) {
            if (text_.compare(pos_, 2, t) == 0) {
                tok_.kind = Token::Punct;
                tok_.text = t;
                pos_ += 2;
                col_ += 2;
                return;
            }
        }
        tok_.kind = Token::Punct;
        tok_.text = std::string(1, c);
        ++pos_;
        ++col_;
    }

    const std::string& text_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token tok_;
};

class Parser {
  public:
    explicit Parser(const std::string& text) : lex_(text) {}

    TbppModel run() {
        std::optional<std::string> init_name;
        std::vector<std::string> target_names;
        std::optional<QueryMode> qmode;
        std::optional<Rat> qdelta;
        int qline = 1, qcol = 1;

        struct RawRule {
            std::string lhs;
            std::vector<std::tuple<std::string, Rel, std::int64_t>> guard;
            std::vector<std::pair<std::string, std::string>> updates;  // target, source
            std::vector<std::string> rhs;
            int line, column;
        };
        std::vector<RawRule> raw_rules;

        while (lex_.peek().kind != Token::End) {
            Token head = expect(Token::Ident, "statement keyword");
            if (head.text == "clocks") {
                while (lex_.peek().kind == Token::Ident) declare_clock(lex_.take());
                expect_punct(";");
            } else if (head.text == "nonterminals") {
                while (lex_.peek().kind == Token::Ident) declare_nonterminal(lex_.take());
                expect_punct(";");
            } else if (head.text == "init") {
                Token t = expect(Token::Ident, "nonterminal name");
                init_name = t.text;
                expect_punct(";");
            } else if (head.text == "targets") {
                while (lex_.peek().kind == Token::Ident) target_names.push_back(lex_.take().text);
                expect_punct(";");
            } else if (head.text == "query") {
                Token m = expect(Token::Ident, "query mode");
                qline = m.line;
                qcol = m.column;
                if (m.text == "reach") qmode = QueryMode::Reach;
                else if (m.text == "cover") qmode = QueryMode::Cover;
                else if (m.text == "simple-reach") qmode = QueryMode::SimpleReach;
                else if (m.text == "simple-cover") qmode = QueryMode::SimpleCover;
                else if (m.text == "nonempty") qmode = QueryMode::Nonempty;
                else if (m.text == "ternary") {
                    qmode = QueryMode::Ternary;
                    qdelta = parse_rational();
                } else
                    fail(m, "unknown query mode '" + m.text + "'");
                expect_punct(";");
            } else if (head.text == "rule") {
                RawRule rr;
                rr.line = head.line;
                rr.column = head.column;
                Token lhs = expect(Token::Ident, "rule left-hand side");
                rr.lhs = lhs.text;
                if (peek_punct("[")) {
                    lex_.take();
                    while (true) {
                        Token c = expect(Token::Ident, "clock name");
                        Rel rel = parse_rel();
                        Token b = expect(Token::Number, "guard bound");
                        rr.guard.emplace_back(c.text, rel, std::stoll(b.text));
                        if (peek_punct(",")) {
                            lex_.take();
                            continue;
                        }
                        break;
                    }
                    expect_punct("]");
                }
                if (peek_punct("{")) {
                    lex_.take();
                    while (true) {
                        Token t = expect(Token::Ident, "clock name");
                        expect_punct(":=");
                        Token s = lex_.take();
                        if (s.kind != Token::Ident && s.kind != Token::Number)
                            fail(s, "expected clock or constant after ':='");
                        rr.updates.emplace_back(t.text, s.text);
                        if (peek_punct(",")) {
                            lex_.take();
                            continue;
                        }
                        break;
                    }
                    expect_punct("}");
                }
                expect_punct("->");
                while (lex_.peek().kind == Token::Ident) rr.rhs.push_back(lex_.take().text);
                Token semi = lex_.peek();
                expect_punct(";");
                if (rr.rhs.size() > 2)
                    fail(semi, "rule right-hand side has size " +
                                   std::to_string(rr.rhs.size()) + ", at most 2 allowed");
                raw_rules.push_back(std::move(rr));
            } else {
                fail(head, "unknown statement '" + head.text + "'");
            }
        }

        // Resolve names.
        for (const auto& rr : raw_rules) {
            Rule r;
            r.lhs = nonterminal(rr.lhs, rr.line, rr.column);
            for (const auto& [cn, rel, bound] : rr.guard)
                r.guard.conjuncts.push_back({clock(cn, rr.line, rr.column), rel, bound});
            for (const auto& [tn, src] : rr.updates) {
                ClockUpdate u;
                u.target = clock(tn, rr.line, rr.column);
                if (std::isdigit(static_cast<unsigned char>(src[0]))) {
                    u.from_clock = false;
                    u.constant = std::stoll(src);
                } else {
                    u.from_clock = true;
                    u.source_clock = clock(src, rr.line, rr.column);
                }
                r.assign.updates.push_back(u);
            }
            for (const auto& name : rr.rhs)
                r.rhs.push_back(nonterminal(name, rr.line, rr.column));
            model_.rules.push_back(std::move(r));
        }
        if (init_name || !target_names.empty() || qmode) {
            Query q;
            q.mode = qmode.value_or(QueryMode::Cover);
            if (!init_name) throw ParseError(qline, qcol, "query requires an init declaration");
            q.initial = nonterminal(*init_name, qline, qcol);
            for (const auto& t : target_names) q.targets.push_back(nonterminal(t, qline, qcol));
            q.delta = qdelta;
            model_.query = q;
        }
        model_.refresh_max_constant();
        return std::move(model_);
    }

  private:
    [[noreturn]] static void fail(const Token& t, const std::string& msg) {
        throw ParseError(t.line, t.column, msg);
    }

    Token expect(Token::Kind kind, const std::string& what) {
        Token t = lex_.take();
        if (t.kind != kind) fail(t, "expected " + what + ", found '" + t.text + "'");
        return t;
    }

    bool peek_punct(const std::string& p) {
        return lex_.peek().kind == Token::Punct && lex_.peek().text == p;
    }

    void expect_punct(const std::string& p) {
        Token t = lex_.take();
        if (t.kind != Token::Punct || t.text != p)
            fail(t, "expected '" + p + "', found '" + t.text + "'");
    }

    Rel parse_rel() {
        Token t = lex_.take();
        if (t.kind != Token::Punct) fail(t, "expected relation");
        if (t.text == "<") return Rel::Lt;
        if (t.text == "<=") return Rel::Le;
        if (t.text == "=") return Rel::Eq;
        if (t.text == ">=") return Rel::Ge;
        if (t.text == ">") return Rel::Gt;
        fail(t, "unknown relation '" + t.text + "'");
    }

    Rat parse_rational() {
        Token n = expect(Token::Number, "rational");
        std::string text = n.text;
        if (peek_punct("/")) {
            lex_.take();
            Token d = expect(Token::Number, "denominator");
            text += "/" + d.text;
        }
        return parse_rat(text);
    }

    void declare_clock(const Token& t) {
        if (model_.clock_index(t.text) >= 0 || model_.nonterminal_index(t.text) >= 0)
            fail(t, "duplicate declaration of '" + t.text + "'");
        model_.clocks.push_back({t.text, model_.clock_count()});
    }

    void declare_nonterminal(const Token& t) {
        if (model_.clock_index(t.text) >= 0 || model_.nonterminal_index(t.text) >= 0)
            fail(t, "duplicate declaration of '" + t.text + "'");
        model_.nonterminals.push_back({t.text, model_.nonterminal_count()});
    }

    int clock(const std::string& name, int line, int col) {
        int i = model_.clock_index(name);
        if (i < 0) throw ParseError(line, col, "undeclared clock '" + name + "'");
        return i;
    }

    int nonterminal(const std::string& name, int line, int col) {
        int i = model_.nonterminal_index(name);
        if (i < 0) throw ParseError(line, col, "undeclared nonterminal '" + name + "'");
        return i;
    }

    Lexer lex_;
    TbppModel model_;
};

}  // namespace

TbppModel parse_model(const std::string& text) { return Parser(text).run(); }

}  // namespace tbpp
