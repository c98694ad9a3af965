#pragma once

// Recursive-descent parser for the text grammar: signatures, formulas,
// sequents, theories and structures. Proof scripts and Kripke models reuse
// the lexer from their own headers.

#include <cctype>

#include "hetlog/ast.hpp"
#include "hetlog/structure.hpp"
#include "hetlog/syntax.hpp"

namespace hetlog {

struct Token {
  enum Kind { Ident, Number, Str, Punct, End } kind = End;
  string text;
  int line = 1, col = 1;
};

inline vector<Token> lex(const string& src) {
  vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto push = [&](Token::Kind k, string text, int l, int c) {
    out.push_back(Token{k, std::move(text), l, c});
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++col;
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    int l = line, cl = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' ||
              src[j] == '\'' || src[j] == '#' || src[j] == '@'))
        ++j;
      push(Token::Ident, src.substr(i, j - i), l, cl);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      push(Token::Number, src.substr(i, j - i), l, cl);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (c == '"') {
      size_t j = i + 1;
      while (j < src.size() && src[j] != '"') {
        if (src[j] == '\n') ++line;
        ++j;
      }
      if (j >= src.size()) throw SyntaxError({l, cl, "unterminated string"});
      push(Token::Str, src.substr(i + 1, j - i - 1), l, cl);
      col += static_cast<int>(j - i + 1);
      i = j + 1;
      continue;
    }
    auto two = src.substr(i, 2);
    if (two == "->" || two == "|-" || two == "<=") {
      push(Token::Punct, two, l, cl);
      i += 2;
      col += 2;
      continue;
    }
    if (string("()[]{},;:=").find(c) != string::npos) {
      push(Token::Punct, string(1, c), l, cl);
      ++i;
      ++col;
      continue;
    }
    throw SyntaxError({l, cl, string("unexpected character '") + c + "'"});
  }
  out.push_back(Token{Token::End, "", line, col});
  return out;
}

// Variable scope used while parsing formulas: name -> sort.
using Scope = std::map<string, string>;

class Parser {
 public:
  Parser(vector<Token> tokens, const Signature* sig = nullptr)
      : toks_(std::move(tokens)), sig_(sig) {}

  static Parser from_text(const string& src, const Signature* sig = nullptr) {
    return Parser(lex(src), sig);
  }

  const Token& peek(int ahead = 0) const {
    size_t i = pos_ + static_cast<size_t>(ahead);
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at_end() const { return peek().kind == Token::End; }
  size_t save() const { return pos_; }
  void restore(size_t p) { pos_ = p; }

  [[noreturn]] void fail(const string& msg) const {
    const Token& t = peek();
    throw SyntaxError({t.line, t.col, msg});
  }

  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  bool accept(const string& punct) {
    if (peek().kind == Token::Punct && peek().text == punct) {
      next();
      return true;
    }
    return false;
  }
  bool accept_ident(const string& word) {
    if (peek().kind == Token::Ident && peek().text == word) {
      next();
      return true;
    }
    return false;
  }
  void expect(const string& punct) {
    if (!accept(punct)) fail("expected '" + punct + "'");
  }
  void expect_ident(const string& word) {
    if (!accept_ident(word)) fail("expected '" + word + "'");
  }
  string ident() {
    if (peek().kind != Token::Ident) fail("expected identifier");
    return next().text;
  }
  int number() {
    if (peek().kind != Token::Number) fail("expected number");
    return std::stoi(next().text);
  }
  string name_token() {  // identifier or number (element names)
    if (peek().kind == Token::Ident || peek().kind == Token::Number)
      return next().text;
    fail("expected name");
  }
  string quoted() {
    if (peek().kind != Token::Str) fail("expected quoted string");
    return next().text;
  }

  void set_signature(const Signature* sig) { sig_ = sig; }
  const Signature* signature() const { return sig_; }

  // ---- variables / contexts ----

  Var sorted_var() {
    string n = ident();
    if (n == "ctx") fail("'ctx' is reserved");
    expect(":");
    string s = ident();
    return Var{n, s};
  }

  vector<Var> var_list() {  // [x:s, y:t]
    expect("[");
    vector<Var> out;
    if (!accept("]")) {
      do {
        out.push_back(sorted_var());
      } while (accept(","));
      expect("]");
    }
    return out;
  }

  // ---- terms ----

  TermPtr term(const Scope& scope) {
    string n = name_token();
    if (peek().kind == Token::Punct && peek().text == "(") {
      if (!sig_ || !sig_->function(n)) fail("unknown function " + n);
      next();
      vector<TermPtr> args;
      if (!accept(")")) {
        do {
          args.push_back(term(scope));
        } while (accept(","));
        expect(")");
      }
      return mk_app(n, std::move(args));
    }
    auto it = scope.find(n);
    if (it != scope.end()) return mk_var(n, it->second);
    if (sig_ && sig_->function(n) && sig_->function(n)->arg_sorts.empty())
      return mk_app(n);
    fail("unresolved name " + n);
  }

  // ---- formulas ----

  Formula formula(const Scope& scope) {
    if (accept("(")) {  // (t = t)
      TermPtr lhs = term(scope);
      expect("=");
      TermPtr rhs = term(scope);
      expect(")");
      return mk_eq(lhs, rhs);
    }
    if (peek().kind == Token::Number) {  // bare equality: 0 = 1 in .str-free ctx
      TermPtr lhs = term(scope);
      expect("=");
      return mk_eq(lhs, term(scope));
    }
    string kw = peek().text;
    if (kw == "true") {
      next();
      if (accept("(")) expect(")");
      return mk_top();
    }
    if (kw == "false") {
      next();
      if (accept("(")) expect(")");
      return mk_bottom();
    }
    if (kw == "and" || kw == "or") {
      next();
      expect("(");
      vector<Formula> items;
      if (!accept(")")) {
        do {
          items.push_back(formula(scope));
        } while (accept(","));
        expect(")");
      }
      return kw == "and" ? mk_and(std::move(items)) : mk_or(std::move(items));
    }
    if (kw == "implies") {
      next();
      expect("(");
      Formula a = formula(scope);
      expect(",");
      Formula b = formula(scope);
      expect(")");
      return mk_implies(a, b);
    }
    if (kw == "not") {
      next();
      expect("(");
      Formula a = formula(scope);
      expect(")");
      return mk_not(a);
    }
    if (kw == "exists" || kw == "forall") {
      next();
      vector<Var> vars = var_list();
      Scope inner = scope;
      for (auto& v : vars) inner[v.name] = v.sort;
      Formula body = formula(inner);
      return kw == "exists" ? mk_exists(std::move(vars), body)
                            : mk_forall(std::move(vars), body);
    }
    if (kw == "hetAE" || kw == "hetEA") {
      next();
      return het_formula(kw == "hetAE" ? Polarity::AE : Polarity::EA, scope);
    }
    // relation atom or equality
    if (peek().kind == Token::Ident && sig_ && sig_->relation(peek().text)) {
      string rel = ident();
      expect("(");
      vector<TermPtr> args;
      if (!accept(")")) {
        do {
          args.push_back(term(scope));
        } while (accept(","));
        expect(")");
      }
      return mk_atom(rel, std::move(args));
    }
    TermPtr lhs = term(scope);
    expect("=");
    return mk_eq(lhs, term(scope));
  }

  Formula het_formula(Polarity pol, const Scope& scope) {
    HetBlock blk;
    blk.polarity = pol;
    expect("{");
    expect_ident("len");
    expect(":");
    if (accept_ident("omega"))
      blk.length = std::nullopt;
    else
      blk.length = number();
    expect(";");
    expect_ident("sched");
    expect(":");
    expect("[");
    do {
      blk.schedule.push_back(var_list());
    } while (accept(","));
    expect("]");
    expect(";");
    Scope sched_scope = scope;
    for (auto& entry : blk.schedule)
      for (auto& v : entry) sched_scope[v.name] = v.sort;
    if (accept_ident("bounds")) {
      expect(":");
      expect("[");
      size_t idx = 0;
      do {
        Scope bscope = scope;
        if (idx < blk.schedule.size())
          for (auto& v : blk.schedule[idx]) bscope[v.name] = v.sort;
        blk.bounds.push_back(formula(bscope));
        ++idx;
      } while (accept(","));
      expect("]");
      expect(";");
    }
    if (accept_ident("prefix")) {
      expect(":");
      expect("[");
      if (!accept("]")) {
        do {
          blk.window_prefix.push_back(term(scope));
        } while (accept(","));
        expect("]");
      }
      expect(";");
    }
    if (accept_ident("past")) {
      expect(":");
      expect("[");
      if (!accept("]")) {
        do {
          blk.past.push_back(formula(scope));
        } while (accept(","));
        expect("]");
      }
      expect(";");
    }
    expect_ident("payoff");
    expect(":");
    Payoff payoff = payoff_spec(&blk, sched_scope, scope);
    expect("}");
    return mk_het(std::move(blk), std::move(payoff));
  }

  // When `blk` is null (explicit classC lists) placeholders get wildcard
  // sort "?" and membership tests ignore placeholder sorts.
  Payoff payoff_spec(const HetBlock* blk, const Scope& body_scope,
                     const Scope& outer_scope) {
    if (accept_ident("body")) return BodyPayoff{formula(body_scope)};
    bool safety = false;
    if (accept_ident("safety"))
      safety = true;
    else if (accept_ident("reach"))
      safety = false;
    else
      fail("expected payoff (body/safety/reach)");
    expect("(");
    int window = number();
    expect(")");
    expect("[");
    OmegaPayoff op;
    op.safety = safety;
    op.window = window;
    int idx = 0;
    do {
      Scope scope = outer_scope;
      for (int i = 0; i < window; ++i) {
        string sort =
            blk && !blk->schedule.empty() && blk->is_omega() &&
                    !blk->schedule[0].empty()
                ? placeholder_sort(*blk, idx, i, window)
                : "?";
        scope[placeholder_name(i)] = sort;
      }
      op.templates.push_back(formula(scope));
      ++idx;
    } while (accept(","));
    expect("]");
    return Payoff{op};
  }

  // ---- sequents ----

  // `f |- g [ctx x:s, ...]`. The trailing context clause is located first so
  // free variables can be parsed with their sorts.
  Sequent sequent() {
    size_t start = save();
    vector<Var> ctx;
    bool has_ctx = false;
    int depth = 0;
    while (!at_end()) {
      const Token& t = peek();
      if (t.kind == Token::Punct && (t.text == ";" || t.text == "}") && depth == 0)
        break;
      if (t.kind == Token::Punct && (t.text == "(" || t.text == "[" || t.text == "{"))
        ++depth;
      if (t.kind == Token::Punct && (t.text == ")" || t.text == "]" || t.text == "}"))
        --depth;
      if (t.kind == Token::Punct && t.text == "[" && peek(1).kind == Token::Ident &&
          peek(1).text == "ctx") {
        next();
        next();
        has_ctx = true;
        if (!accept("]")) {
          do {
            ctx.push_back(sorted_var());
          } while (accept(","));
          expect("]");
        }
        break;
      }
      next();
    }
    size_t after = has_ctx ? save() : 0;
    restore(start);
    Scope scope;
    for (auto& v : ctx) scope[v.name] = v.sort;
    Formula lhs = formula(scope);
    expect("|-");
    Formula rhs = formula(scope);
    if (has_ctx)
      restore(after);
    return mk_sequent(lhs, rhs, std::move(ctx));
  }

  // ---- declarations / theories / structures ----

  // Parses one `sort/rel/fun/const` statement into sig; returns false if the
  // next statement is not a declaration.
  bool declaration(Signature& sig) {
    if (accept_ident("sort")) {
      sig.sorts.push_back(ident());
      expect(";");
      return true;
    }
    if (accept_ident("rel")) {
      Signature::Rel r;
      r.name = ident();
      expect("(");
      if (!accept(")")) {
        do {
          r.arg_sorts.push_back(ident());
        } while (accept(","));
        expect(")");
      }
      expect(";");
      sig.relations.push_back(std::move(r));
      return true;
    }
    if (accept_ident("fun")) {
      Signature::Fun f;
      f.name = ident();
      expect("(");
      if (!accept(")")) {
        do {
          f.arg_sorts.push_back(ident());
        } while (accept(","));
        expect(")");
      }
      expect("->");
      f.result_sort = ident();
      expect(";");
      sig.functions.push_back(std::move(f));
      return true;
    }
    if (accept_ident("const")) {
      Signature::Fun f;
      f.name = ident();
      expect(":");
      f.result_sort = ident();
      expect(";");
      sig.functions.push_back(std::move(f));
      return true;
    }
    return false;
  }

  Theory theory() {
    Theory t;
    sig_owned_ = Signature{};
    sig_ = &sig_owned_;
    while (!at_end()) {
      if (declaration(sig_owned_)) continue;
      if (accept_ident("axiom")) {
        NamedAxiom ax;
        ax.name = ident();
        expect(":");
        ax.sequent = sequent();
        expect(";");
        t.axioms.push_back(std::move(ax));
        continue;
      }
      if (accept_ident("classC")) {
        if (accept_ident("safety")) {
          t.classc.kind = ClassC::SafetyOnly;
        } else if (accept_ident("clopen")) {
          t.classc.kind = ClassC::Clopen;
        } else {
          t.classc.kind = ClassC::Explicit;
          expect("{");
          do {
            Payoff p = payoff_spec(nullptr, {}, {});
            t.classc.entries.push_back(std::get<OmegaPayoff>(p));
          } while (accept(","));
          expect("}");
        }
        expect(";");
        continue;
      }
      if (accept_ident("mode")) {
        if (accept_ident("classical"))
          t.mode = Mode::Classical;
        else if (accept_ident("intuitionistic"))
          t.mode = Mode::Intuitionistic;
        else
          fail("expected classical or intuitionistic");
        expect(";");
        continue;
      }
      fail("unexpected statement '" + peek().text + "'");
    }
    t.signature = sig_owned_;
    return t;
  }

  Signature signature_only() {
    Signature sig;
    while (!at_end())
      if (!declaration(sig)) fail("expected declaration");
    return sig;
  }

  Structure structure(const Signature& sig) {
    Structure m;
    m.signature = sig;
    sig_ = &m.signature;
    while (!at_end()) {
      if (accept_ident("carrier")) {
        string sort = ident();
        expect("=");
        expect("{");
        vector<string> elems;
        if (!accept("}")) {
          do {
            elems.push_back(name_token());
          } while (accept(","));
          expect("}");
        }
        expect(";");
        m.carriers[sort] = std::move(elems);
        continue;
      }
      if (accept_ident("table")) {
        string rel = ident();
        auto* r = sig.relation(rel);
        if (!r) fail("unknown relation " + rel);
        expect("=");
        expect("{");
        std::set<vector<int>> tuples;
        if (!accept("}")) {
          do {
            tuples.insert(element_tuple(m, r->arg_sorts));
          } while (accept(","));
          expect("}");
        }
        expect(";");
        m.relations[rel] = std::move(tuples);
        continue;
      }
      if (accept_ident("fun")) {
        string fn = ident();
        auto* f = sig.function(fn);
        if (!f) fail("unknown function " + fn);
        expect("=");
        std::map<vector<int>, int> table;
        expect("{");
        if (!accept("}")) {
          do {
            vector<int> args = element_tuple(m, f->arg_sorts);
            expect("->");
            int v = element(m, f->result_sort);
            table[args] = v;
          } while (accept(","));
          expect("}");
        }
        expect(";");
        m.functions[fn] = std::move(table);
        continue;
      }
      fail("unexpected statement '" + peek().text + "'");
    }
    // Relations without tables default to empty.
    for (auto& r : sig.relations)
      if (!m.relations.count(r.name)) m.relations[r.name] = {};
    return m;
  }

 private:
  int element(const Structure& m, const string& sort) {
    string n = name_token();
    auto it = m.carriers.find(sort);
    if (it == m.carriers.end()) fail("carrier for sort " + sort + " not declared yet");
    for (size_t i = 0; i < it->second.size(); ++i)
      if (it->second[i] == n) return static_cast<int>(i);
    fail("unknown element " + n + " of sort " + sort);
  }

  vector<int> element_tuple(const Structure& m, const vector<string>& sorts) {
    expect("(");
    vector<int> out;
    for (size_t i = 0; i < sorts.size(); ++i) {
      if (i) expect(",");
      out.push_back(element(m, sorts[i]));
    }
    expect(")");
    return out;
  }

  vector<Token> toks_;
  size_t pos_ = 0;
  const Signature* sig_ = nullptr;
  Signature sig_owned_;
};

// ---------------------------------------------------------------------------
// Convenience entry points

inline Theory parse_theory(const string& src) {
  return Parser::from_text(src).theory();
}

inline Signature parse_signature(const string& src) {
  return Parser::from_text(src).signature_only();
}

inline Structure parse_structure(const string& src, const Signature& sig) {
  return Parser::from_text(src).structure(sig);
}

inline Formula parse_formula(const string& src, const Signature& sig,
                             const vector<Var>& context = {}) {
  Parser p = Parser::from_text(src, &sig);
  Scope scope;
  for (auto& v : context) scope[v.name] = v.sort;
  Formula f = p.formula(scope);
  if (!p.at_end()) p.fail("trailing input after formula");
  return f;
}

inline Sequent parse_sequent(const string& src, const Signature& sig) {
  Parser p = Parser::from_text(src, &sig);
  Sequent s = p.sequent();
  if (!p.at_end()) p.fail("trailing input after sequent");
  return s;
}

}  // namespace hetlog
