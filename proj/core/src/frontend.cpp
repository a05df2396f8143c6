#include "stt/frontend.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

namespace stt {
namespace {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Lexer

enum class Tok {
  Ident, Number, String,
  KwDef, KwPostulate, KwImport,
  KwRecOr, KwRecBot, KwRefl, KwJ, KwFst, KwSnd, KwId, KwU, KwTop, KwBot,
  LParen, RParen, LBrace, RBrace, LBracket, RBracket, LAngle, RAngle,
  Comma, Colon, ColonEq, Pipe, Turnstile, MapsTo, Arrow, Star, Backslash,
  Eq3, Leq, And, Or,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  Span span;
};

struct ParseError {
  Diagnostic diag;
};

[[noreturn]] void perr(std::string msg, Span span, DiagCode code = DiagCode::SyntaxError) {
  Diagnostic d;
  d.code = code;
  d.span = span;
  d.message = std::move(msg);
  throw ParseError{std::move(d)};
}

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "an identifier";
    case Tok::Number: return "a number";
    case Tok::String: return "a quoted path";
    case Tok::KwDef: return "'def'";
    case Tok::KwPostulate: return "'postulate'";
    case Tok::KwImport: return "'import'";
    case Tok::KwRecOr: return "'recOR'";
    case Tok::KwRecBot: return "'recBOT'";
    case Tok::KwRefl: return "'refl'";
    case Tok::KwJ: return "'J'";
    case Tok::KwFst: return "'fst'";
    case Tok::KwSnd: return "'snd'";
    case Tok::KwId: return "'Id'";
    case Tok::KwU: return "'U'";
    case Tok::KwTop: return "'TOP'";
    case Tok::KwBot: return "'BOT'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::LAngle: return "'<'";
    case Tok::RAngle: return "'>'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::ColonEq: return "':='";
    case Tok::Pipe: return "'|'";
    case Tok::Turnstile: return "'|-'";
    case Tok::MapsTo: return "'|->'";
    case Tok::Arrow: return "'->'";
    case Tok::Star: return "'*'";
    case Tok::Backslash: return "'\\'";
    case Tok::Eq3: return "'==='";
    case Tok::Leq: return "'<='";
    case Tok::And: return "'/\\'";
    case Tok::Or: return "'\\/'";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::string describe(const Token& t) {
  if (t.kind == Tok::Ident || t.kind == Tok::Number) return "'" + t.text + "'";
  return tok_name(t.kind);
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_cont(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

Tok keyword(const std::string& s) {
  if (s == "def") return Tok::KwDef;
  if (s == "postulate") return Tok::KwPostulate;
  if (s == "import") return Tok::KwImport;
  if (s == "recOR") return Tok::KwRecOr;
  if (s == "recBOT") return Tok::KwRecBot;
  if (s == "refl") return Tok::KwRefl;
  if (s == "J") return Tok::KwJ;
  if (s == "fst") return Tok::KwFst;
  if (s == "snd") return Tok::KwSnd;
  if (s == "Id") return Tok::KwId;
  if (s == "U") return Tok::KwU;
  if (s == "TOP") return Tok::KwTop;
  if (s == "BOT") return Tok::KwBot;
  return Tok::Ident;
}

struct Lexer {
  const std::string& src;
  size_t i = 0;
  uint32_t line = 1, col = 1;
  std::vector<Token> out;
  std::vector<Diagnostic> errs;

  bool done() const { return i >= src.size(); }
  char cur() const { return src[i]; }
  char peek(size_t k = 1) const { return i + k < src.size() ? src[i + k] : '\0'; }

  void bump(size_t n = 1) {
    for (size_t k = 0; k < n && i < src.size(); ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  }

  void tok(Tok t, std::string text, uint32_t l, uint32_t c, size_t len) {
    out.push_back({t, std::move(text), Span{l, c, static_cast<uint32_t>(len)}});
  }

  void err(std::string msg, uint32_t l, uint32_t c, size_t len) {
    Diagnostic d;
    d.code = DiagCode::SyntaxError;
    d.span = Span{l, c, static_cast<uint32_t>(len)};
    d.message = std::move(msg);
    errs.push_back(std::move(d));
  }

  void run() {
    while (!done()) step();
    out.push_back({Tok::End, "", Span{line, col, 0}});
  }

  void step() {
    char c = cur();
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      bump();
      return;
    }
    if (c == '-' && peek() == '-') {
      while (!done() && cur() != '\n') bump();
      return;
    }
    uint32_t l = line, cc = col;

    // Unicode aliases, matched as exact byte sequences.
    static const struct {
      const char* bytes;
      size_t n;
      Tok t;
      const char* text;
    } aliases[] = {
        {"\xE2\x89\xA4", 3, Tok::Leq, "<="},     // lessequal
        {"\xE2\x89\xA1", 3, Tok::Eq3, "==="},    // identical
        {"\xE2\x88\xA7", 3, Tok::And, "/\\"},    // wedge
        {"\xE2\x88\xA8", 3, Tok::Or, "\\/"},     // vee
        {"\xE2\x8A\xA4", 3, Tok::KwTop, "TOP"},  // down tack
        {"\xE2\x8A\xA5", 3, Tok::KwBot, "BOT"},  // up tack
        {"\xF0\x9D\x9F\x9A", 4, Tok::Number, "2"},
    };
    for (const auto& a : aliases) {
      if (src.compare(i, a.n, a.bytes, a.n) == 0) {
        tok(a.t, a.text, l, cc, a.n);
        bump(a.n);
        return;
      }
    }
    if (static_cast<unsigned char>(c) >= 0x80) {
      unsigned char u = static_cast<unsigned char>(c);
      size_t n = u >= 0xF0 ? 4 : u >= 0xE0 ? 3 : u >= 0xC0 ? 2 : 1;
      n = std::min(n, src.size() - i);
      err("unexpected character '" + src.substr(i, n) + "'", l, cc, n);
      bump(n);
      return;
    }

    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      tok(Tok::Number, src.substr(i, j - i), l, cc, j - i);
      bump(j - i);
      return;
    }
    if (ident_start(c)) {
      size_t j = i + 1;
      while (j < src.size()) {
        if (ident_cont(src[j])) {
          ++j;
          continue;
        }
        // Hyphens are part of a name when flanked by name characters,
        // so id-arr is one identifier while t->x is three tokens.
        if (src[j] == '-' && j + 1 < src.size() &&
            (ident_start(src[j + 1]) || std::isdigit(static_cast<unsigned char>(src[j + 1])))) {
          j += 2;
          continue;
        }
        break;
      }
      std::string text = src.substr(i, j - i);
      Tok k = keyword(text);
      tok(k, std::move(text), l, cc, j - i);
      bump(j - i);
      return;
    }
    if (c == '"') {
      size_t j = i + 1;
      while (j < src.size() && src[j] != '"' && src[j] != '\n') ++j;
      if (j >= src.size() || src[j] != '"') {
        err("unterminated string", l, cc, j - i);
        bump(j - i);
        return;
      }
      tok(Tok::String, src.substr(i + 1, j - i - 1), l, cc, j + 1 - i);
      bump(j + 1 - i);
      return;
    }

    switch (c) {
      case '(': tok(Tok::LParen, "(", l, cc, 1); bump(); return;
      case ')': tok(Tok::RParen, ")", l, cc, 1); bump(); return;
      case '{': tok(Tok::LBrace, "{", l, cc, 1); bump(); return;
      case '}': tok(Tok::RBrace, "}", l, cc, 1); bump(); return;
      case '[': tok(Tok::LBracket, "[", l, cc, 1); bump(); return;
      case ']': tok(Tok::RBracket, "]", l, cc, 1); bump(); return;
      case ',': tok(Tok::Comma, ",", l, cc, 1); bump(); return;
      case '*': tok(Tok::Star, "*", l, cc, 1); bump(); return;
      case '>': tok(Tok::RAngle, ">", l, cc, 1); bump(); return;
      case ':':
        if (peek() == '=') { tok(Tok::ColonEq, ":=", l, cc, 2); bump(2); return; }
        tok(Tok::Colon, ":", l, cc, 1); bump(); return;
      case '|':
        if (peek() == '-' && peek(2) == '>') { tok(Tok::MapsTo, "|->", l, cc, 3); bump(3); return; }
        if (peek() == '-') { tok(Tok::Turnstile, "|-", l, cc, 2); bump(2); return; }
        tok(Tok::Pipe, "|", l, cc, 1); bump(); return;
      case '-':
        if (peek() == '>') { tok(Tok::Arrow, "->", l, cc, 2); bump(2); return; }
        err("stray '-'", l, cc, 1); bump(); return;
      case '=':
        if (peek() == '=' && peek(2) == '=') { tok(Tok::Eq3, "===", l, cc, 3); bump(3); return; }
        err("expected '===' for tope equality", l, cc, 1); bump(); return;
      case '<':
        if (peek() == '=') { tok(Tok::Leq, "<=", l, cc, 2); bump(2); return; }
        tok(Tok::LAngle, "<", l, cc, 1); bump(); return;
      case '/':
        if (peek() == '\\') { tok(Tok::And, "/\\", l, cc, 2); bump(2); return; }
        err("expected '/\\'", l, cc, 1); bump(); return;
      case '\\':
        if (peek() == '/') { tok(Tok::Or, "\\/", l, cc, 2); bump(2); return; }
        tok(Tok::Backslash, "\\", l, cc, 1); bump(); return;
      default:
        err(std::string("unexpected character '") + c + "'", l, cc, 1);
        bump();
        return;
    }
  }
};

// ---------------------------------------------------------------------------
// Parser

// Projection paths for a flat tuple pattern of arity k over a right-nested
// cube product: component i is i seconds followed by a first.
std::vector<Path> flat_paths(size_t k) {
  std::vector<Path> out;
  for (size_t i = 0; i < k; ++i) {
    Path p(i, uint8_t{2});
    if (i + 1 < k) p.push_back(1);
    out.push_back(std::move(p));
  }
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ParsedModule module(const std::string& file, std::vector<Diagnostic> lex_errs) {
    ParsedModule m;
    m.path = file;
    m.diagnostics = std::move(lex_errs);
    while (!at(Tok::End)) {
      try {
        decl(m, file);
      } catch (ParseError& pe) {
        pe.diag.file = file;
        m.diagnostics.push_back(std::move(pe.diag));
        // Resynchronize at the next declaration keyword. A keyword is never
        // skipped: parsing a declaration always consumes its keyword, so the
        // loop cannot stall.
        while (!at(Tok::End) && !at(Tok::KwDef) && !at(Tok::KwPostulate) && !at(Tok::KwImport))
          next();
      }
    }
    return m;
  }

  ExprPtr top_term() {
    ExprPtr e = term();
    expect(Tok::End, "end of input");
    return e;
  }

  SolveQuery query() {
    SolveQuery q;
    if (!at(Tok::Pipe)) {
      do {
        Token n = expect(Tok::Ident, "a cube variable name");
        expect(Tok::Colon, "':'");
        CubeShapePtr c = cube_expr();
        q.cubes.push_back(c);
        q.ctx = q.ctx.extended_cube(n.text, c);
        push_binder(n.text);
      } while (eat(Tok::Comma));
    }
    expect(Tok::Pipe, "'|'");
    if (!at(Tok::Turnstile)) {
      do q.hyps.push_back(tope_or());
      while (eat(Tok::Comma));
    }
    expect(Tok::Turnstile, "'|-'");
    q.goal = tope_or();
    expect(Tok::End, "end of query");
    return q;
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;

  // One scope entry per name in scope; tuple patterns contribute one entry
  // per component, all sharing the binder's depth.
  struct Entry {
    std::string name;
    int depth;
    Path path;  // empty: the binder itself; else projection to a component
  };
  std::vector<Entry> scope_;
  int depth_ = 0;

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(size_t k) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(Tok t) const { return cur().kind == t; }

  Token next() {
    Token t = cur();
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  bool eat(Tok t) {
    if (!at(t)) return false;
    next();
    return true;
  }

  Token expect(Tok t, const char* what) {
    if (!at(t)) perr(std::string("expected ") + what + ", found " + describe(cur()), cur().span);
    return next();
  }

  size_t mark() const { return scope_.size(); }

  void push_binder(const std::string& n) {
    scope_.push_back({n, depth_, {}});
    ++depth_;
  }

  void push_tuple(const std::vector<std::string>& names, const std::vector<Path>& paths) {
    for (size_t i = 0; i < names.size(); ++i) scope_.push_back({names[i], depth_, paths[i]});
    ++depth_;
  }

  void pop_binders(int k, size_t m) {
    scope_.resize(m);
    depth_ -= k;
  }

  const Entry* lookup(const std::string& n) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->name == n) return &*it;
    return nullptr;
  }

  CubeTermPtr entry_cterm(const Entry& e) const {
    CubeTermPtr t = CubeTerm::var(depth_ - 1 - e.depth);
    for (uint8_t w : e.path) t = CubeTerm::proj(w, t);
    return t;
  }

  // --- terms ---------------------------------------------------------------

  ExprPtr term() {
    if (at(Tok::Backslash)) return lambda();
    return arrow();
  }

  struct Pattern {
    std::vector<std::string> names;  // one name, or >= 2 tuple components
    Span span;
  };

  Pattern pattern() {
    Pattern p;
    p.span = cur().span;
    if (at(Tok::Ident)) {
      p.names.push_back(next().text);
      return p;
    }
    expect(Tok::LParen, "a binder pattern");
    p.names.push_back(expect(Tok::Ident, "a name").text);
    expect(Tok::Comma, "','");
    p.names.push_back(expect(Tok::Ident, "a name").text);
    while (eat(Tok::Comma)) p.names.push_back(expect(Tok::Ident, "a name").text);
    expect(Tok::RParen, "')'");
    return p;
  }

  ExprPtr lambda() {
    expect(Tok::Backslash, "'\\'");
    std::vector<Pattern> pats;
    pats.push_back(pattern());
    while (!at(Tok::Arrow)) pats.push_back(pattern());
    expect(Tok::Arrow, "'->'");
    std::vector<size_t> marks;
    for (const auto& p : pats) {
      marks.push_back(mark());
      if (p.names.size() == 1)
        push_binder(p.names[0]);
      else
        push_tuple(p.names, flat_paths(p.names.size()));
    }
    ExprPtr body = term();
    for (size_t k = pats.size(); k-- > 0;) {
      pop_binders(1, marks[k]);
      if (pats[k].names.size() == 1)
        body = mk::lam(pats[k].names[0], std::move(body));
      else
        body = mk::lam("t", pats[k].names, std::move(body));
    }
    return body;
  }

  bool binder_group_ahead() const {
    size_t k = pos_ + 1;  // past '('
    if (toks_[k].kind != Tok::Ident) return false;
    while (toks_[k].kind == Tok::Ident) ++k;
    return toks_[k].kind == Tok::Colon;
  }

  ExprPtr arrow() {
    ExprPtr l;
    if (at(Tok::LParen) && binder_group_ahead()) {
      l = group_type();
    } else if (at(Tok::LBrace)) {
      ShapeLit lit = shape_literal();
      expect(Tok::Arrow, "'->' after a shape domain");
      ExprPtr fam = arrow();
      pop_binders(1, lit.mark);
      l = mk::ext(lit.binder, lit.leaves, lit.cube, lit.tope, Tope::bot(), std::move(fam),
                  mk::rec_bot());
    } else {
      l = star_level();
    }
    if (eat(Tok::Arrow)) {
      size_t m = mark();
      push_binder("_");
      ExprPtr r = arrow();
      pop_binders(1, m);
      return mk::pi("_", std::move(l), std::move(r));
    }
    return l;
  }

  // (x y : A) -> B  or  (x y : A) * B. The arrow form consumes the rest of
  // the type; the product form returns to arrow() for a possible codomain.
  ExprPtr group_type() {
    expect(Tok::LParen, "'('");
    std::vector<std::string> names;
    names.push_back(expect(Tok::Ident, "a name").text);
    while (at(Tok::Ident)) names.push_back(next().text);
    expect(Tok::Colon, "':'");
    ExprPtr dom = term();
    expect(Tok::RParen, "')'");
    bool is_pi;
    if (eat(Tok::Arrow))
      is_pi = true;
    else if (eat(Tok::Star))
      is_pi = false;
    else
      perr("expected '->' or '*' after a binder group", cur().span);
    size_t m = mark();
    for (const auto& n : names) push_binder(n);
    ExprPtr body = is_pi ? arrow() : star_level();
    pop_binders(static_cast<int>(names.size()), m);
    for (size_t i = names.size(); i-- > 0;) {
      ExprPtr d = shift(dom, static_cast<int>(i));
      body = is_pi ? mk::pi(names[i], std::move(d), std::move(body))
                   : mk::sigma(names[i], std::move(d), std::move(body));
    }
    return body;
  }

  ExprPtr star_level() {
    ExprPtr l = app_level();
    if (eat(Tok::Star)) {
      size_t m = mark();
      push_binder("_");
      ExprPtr r = star_level();
      pop_binders(1, m);
      return mk::sigma("_", std::move(l), std::move(r));
    }
    return l;
  }

  bool starts_atom() const {
    switch (cur().kind) {
      case Tok::Ident:
      case Tok::Number:
      case Tok::LParen:
      case Tok::LAngle:
      case Tok::KwU:
      case Tok::KwRefl:
      case Tok::KwJ:
      case Tok::KwRecBot:
        return true;
      default:
        return false;
    }
  }

  ExprPtr app_level() {
    ExprPtr e = prefix();
    while (starts_atom()) e = mk::app(std::move(e), atom());
    return e;
  }

  ExprPtr prefix() {
    if (at(Tok::KwFst)) {
      Span sp = next().span;
      return mk::with_span(mk::fst(atom()), sp);
    }
    if (at(Tok::KwSnd)) {
      Span sp = next().span;
      return mk::with_span(mk::snd(atom()), sp);
    }
    if (at(Tok::KwId)) {
      Span sp = next().span;
      ExprPtr ty = atom();
      ExprPtr a = atom();
      ExprPtr b = atom();
      return mk::with_span(mk::id(std::move(ty), std::move(a), std::move(b)), sp);
    }
    if (at(Tok::KwRecOr)) return rec_or_form();
    return atom();
  }

  ExprPtr atom() {
    Token t = cur();
    switch (t.kind) {
      case Tok::Ident: {
        next();
        const Entry* e = lookup(t.text);
        if (!e) return mk::with_span(mk::cnst(t.text), t.span);
        if (e->path.empty()) return mk::with_span(mk::var(depth_ - 1 - e->depth), t.span);
        return mk::with_span(mk::cube_term(entry_cterm(*e)), t.span);
      }
      case Tok::Number:
        next();
        if (t.text == "0") return mk::with_span(mk::cube_term(CubeTerm::zero()), t.span);
        if (t.text == "1") return mk::with_span(mk::cube_term(CubeTerm::one()), t.span);
        perr("only 0 and 1 are cube constants", t.span);
      case Tok::LParen: {
        next();
        if (at(Tok::RParen)) {  // (): the point of the unit cube
          next();
          return mk::with_span(mk::cube_term(CubeTerm::star()), t.span);
        }
        ExprPtr e = term();
        if (eat(Tok::Comma)) {
          std::vector<ExprPtr> es;
          es.push_back(std::move(e));
          es.push_back(term());
          while (eat(Tok::Comma)) es.push_back(term());
          expect(Tok::RParen, "')'");
          ExprPtr p = es.back();
          for (size_t i = es.size() - 1; i-- > 0;) p = mk::pair(es[i], std::move(p));
          return p;
        }
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::LAngle: return ext_type();
      case Tok::KwU: next(); return mk::with_span(mk::universe(), t.span);
      case Tok::KwRefl: next(); return mk::with_span(mk::refl(), t.span);
      case Tok::KwJ: next(); return mk::with_span(mk::jelim(), t.span);
      case Tok::KwRecBot: next(); return mk::with_span(mk::rec_bot(), t.span);
      default: perr(std::string("expected a term, found ") + describe(t), t.span);
    }
  }

  ExprPtr ext_type() {
    Span sp = expect(Tok::LAngle, "'<'").span;
    ShapeLit lit = shape_literal();
    expect(Tok::Arrow, "'->'");
    ExprPtr fam = arrow();
    expect(Tok::LBracket, "'['");
    TopePtr boundary = tope_or();
    expect(Tok::MapsTo, "'|->'");
    ExprPtr section = term();
    expect(Tok::RBracket, "']'");
    pop_binders(1, lit.mark);
    expect(Tok::RAngle, "'>'");
    return mk::with_span(mk::ext(lit.binder, lit.leaves, lit.cube, lit.tope, std::move(boundary),
                                 std::move(fam), std::move(section)),
                         sp);
  }

  ExprPtr rec_or_form() {
    Span sp = expect(Tok::KwRecOr, "'recOR'").span;
    expect(Tok::LParen, "'('");
    std::vector<TopePtr> guards;
    std::vector<ExprPtr> branches;
    do {
      guards.push_back(tope_or());
      expect(Tok::MapsTo, "'|->'");
      branches.push_back(term());
    } while (eat(Tok::Comma));
    expect(Tok::RParen, "')'");
    if (guards.size() < 2) perr("recOR needs at least two clauses", sp);
    // recOR(a |-> x, b |-> y, c |-> z) nests to the right:
    // the tail recOR(b |-> y, c |-> z) sits under the guard b \/ c.
    ExprPtr e = mk::rec_or(guards[guards.size() - 2], guards.back(),
                           branches[branches.size() - 2], branches.back());
    TopePtr rest = Tope::disj(guards[guards.size() - 2], guards.back());
    for (size_t i = guards.size() - 2; i-- > 0;) {
      e = mk::rec_or(guards[i], rest, branches[i], std::move(e));
      rest = Tope::disj(guards[i], rest);
    }
    return mk::with_span(std::move(e), sp);
  }

  // --- shapes, cubes, topes --------------------------------------------------

  struct ShapeLit {
    std::string binder;
    std::vector<std::string> leaves;   // component names; empty for one name
    std::vector<std::string> pattern;  // as written
    CubeShapePtr cube;
    TopePtr tope;
    size_t mark;
  };

  // Leaves the bound variable in scope; callers pop with pop_binders(1, mark).
  ShapeLit shape_literal() {
    expect(Tok::LBrace, "'{'");
    Pattern pat = pattern();
    expect(Tok::Colon, "':'");
    CubeShapePtr cube = cube_expr();
    expect(Tok::Pipe, "'|'");
    ShapeLit lit;
    lit.pattern = pat.names;
    lit.cube = cube;
    lit.mark = mark();
    if (pat.names.size() == 1) {
      lit.binder = pat.names[0];
      push_binder(pat.names[0]);
    } else {
      auto paths = interval_paths(*cube);
      if (paths.size() != pat.names.size())
        perr("pattern binds " + std::to_string(pat.names.size()) + " names but the cube has " +
                 std::to_string(paths.size()) + " interval factors",
             pat.span, DiagCode::ArityMismatch);
      lit.binder = "t";
      lit.leaves = pat.names;
      push_tuple(pat.names, paths);
    }
    lit.tope = tope_or();
    expect(Tok::RBrace, "'}'");
    return lit;
  }

  CubeShapePtr cube_expr() {
    CubeShapePtr l = cube_atom();
    if (eat(Tok::Star)) return CubeShape::product(std::move(l), cube_expr());
    return l;
  }

  CubeShapePtr cube_atom() {
    if (at(Tok::Number)) {
      Token t = next();
      if (t.text == "2") return CubeShape::interval();
      if (t.text == "1") return CubeShape::unit();
      perr("a cube is a product of 2 (the interval) and 1 (the point)", t.span);
    }
    if (at(Tok::Ident) && cur().text == "I") {
      next();
      return CubeShape::interval();
    }
    if (eat(Tok::LParen)) {
      CubeShapePtr c = cube_expr();
      expect(Tok::RParen, "')'");
      return c;
    }
    perr(std::string("expected a cube, found ") + describe(cur()), cur().span);
  }

  TopePtr tope_or() {
    TopePtr l = tope_and();
    if (eat(Tok::Or)) return Tope::disj(std::move(l), tope_or());
    return l;
  }

  TopePtr tope_and() {
    TopePtr l = tope_atom();
    if (eat(Tok::And)) return Tope::conj(std::move(l), tope_and());
    return l;
  }

  // A '(' in a tope is a grouping paren unless the matching ')' is followed
  // by === or <=, in which case it wraps a cube tuple.
  bool cterm_paren_ahead() const {
    size_t k = pos_ + 1;
    int depth = 1;
    while (toks_[k].kind != Tok::End && depth > 0) {
      if (toks_[k].kind == Tok::LParen) ++depth;
      if (toks_[k].kind == Tok::RParen) --depth;
      ++k;
    }
    return toks_[k].kind == Tok::Eq3 || toks_[k].kind == Tok::Leq;
  }

  TopePtr tope_atom() {
    if (eat(Tok::KwTop)) return Tope::top();
    if (eat(Tok::KwBot)) return Tope::bot();
    if (at(Tok::LParen) && !cterm_paren_ahead()) {
      next();
      TopePtr t = tope_or();
      expect(Tok::RParen, "')'");
      return t;
    }
    CubeTermPtr s = cterm();
    if (eat(Tok::Eq3)) return Tope::eq(std::move(s), cterm());
    if (eat(Tok::Leq)) return Tope::leq(std::move(s), cterm());
    perr(std::string("expected '===' or '<=', found ") + describe(cur()), cur().span);
  }

  CubeTermPtr cterm() {
    if (at(Tok::Number)) {
      Token t = next();
      if (t.text == "0") return CubeTerm::zero();
      if (t.text == "1") return CubeTerm::one();
      perr("only 0 and 1 are cube constants", t.span);
    }
    if (at(Tok::Ident)) {
      Token t = next();
      const Entry* e = lookup(t.text);
      if (!e) perr("unbound cube variable '" + t.text + "'", t.span, DiagCode::UnboundVariable);
      return entry_cterm(*e);
    }
    if (at(Tok::LParen)) {
      next();
      if (at(Tok::RParen)) {
        next();
        return CubeTerm::star();
      }
      std::vector<CubeTermPtr> es;
      es.push_back(cterm());
      while (eat(Tok::Comma)) es.push_back(cterm());
      expect(Tok::RParen, "')'");
      CubeTermPtr t = es.back();
      for (size_t i = es.size() - 1; i-- > 0;) t = CubeTerm::pair(es[i], std::move(t));
      return t;
    }
    perr(std::string("expected a cube term, found ") + describe(cur()), cur().span);
  }

  // --- declarations ----------------------------------------------------------

  void decl(ParsedModule& m, const std::string& file) {
    scope_.clear();
    depth_ = 0;
    if (at(Tok::KwImport)) {
      next();
      Token s = expect(Tok::String, "a quoted path");
      m.imports.push_back(s.text);
      m.import_spans.push_back(s.span);
      return;
    }
    bool postulate = false;
    if (eat(Tok::KwPostulate))
      postulate = true;
    else if (!eat(Tok::KwDef))
      perr("expected 'def', 'postulate' or 'import'", cur().span);
    Token name = expect(Tok::Ident, "a declaration name");

    Declaration d;
    d.name = name.text;
    d.file = file;
    d.span = name.span;

    if (!postulate && at(Tok::ColonEq) && peek(1).kind == Tok::LBrace) {
      next();
      ShapeLit lit = shape_literal();
      pop_binders(1, lit.mark);
      d.kind = Declaration::Kind::ShapeAlias;
      d.shape = Shape{lit.cube, lit.tope};
      d.shape_leaves = lit.pattern;
      m.declarations.push_back(std::move(d));
      return;
    }

    struct Param {
      std::string name;
      ExprPtr type;  // already shifted to its binding depth
    };
    std::vector<Param> params;
    while (at(Tok::LParen)) {
      if (!binder_group_ahead()) perr("expected a '(name : type)' parameter group", cur().span);
      next();
      std::vector<std::string> names;
      names.push_back(expect(Tok::Ident, "a name").text);
      while (at(Tok::Ident)) names.push_back(next().text);
      expect(Tok::Colon, "':'");
      ExprPtr ty = term();
      expect(Tok::RParen, "')'");
      for (size_t i = 0; i < names.size(); ++i) {
        params.push_back({names[i], shift(ty, static_cast<int>(i))});
        push_binder(names[i]);
      }
    }
    if (at(Tok::ColonEq))
      perr("a term definition needs a type annotation: def name : type := term", cur().span);
    expect(Tok::Colon, "':'");
    ExprPtr type = term();
    ExprPtr body;
    if (!postulate) {
      expect(Tok::ColonEq, "':='");
      body = term();
    }
    for (size_t i = params.size(); i-- > 0;) {
      type = mk::pi(params[i].name, params[i].type, std::move(type));
      if (body) body = mk::lam(params[i].name, std::move(body));
    }
    scope_.clear();
    depth_ = 0;
    d.kind = postulate ? Declaration::Kind::Postulate : Declaration::Kind::Definition;
    d.type = std::move(type);
    d.body = std::move(body);
    m.declarations.push_back(std::move(d));
  }
};

// ---------------------------------------------------------------------------
// Printer

int prec_of(const Expr& e) {
  switch (e.tag) {
    case Expr::Tag::Lam: return 0;
    case Expr::Tag::Pi: return 1;
    case Expr::Tag::Sigma: return 2;
    case Expr::Tag::App:
    case Expr::Tag::ExtApp:
    case Expr::Tag::Fst:
    case Expr::Tag::Snd:
    case Expr::Tag::Id: return 3;
    case Expr::Tag::Ext: return e.tope2 && e.tope2->tag == Tope::Tag::Bot ? 1 : 4;
    default: return 4;
  }
}

bool occurs_ct(const CubeTermPtr& t, int idx) {
  if (!t) return false;
  switch (t->tag) {
    case CubeTerm::Tag::Var: return t->index == idx;
    case CubeTerm::Tag::Pair: return occurs_ct(t->a, idx) || occurs_ct(t->b, idx);
    case CubeTerm::Tag::Proj: return occurs_ct(t->a, idx);
    default: return false;
  }
}

bool occurs_tope(const TopePtr& t, int idx) {
  if (!t) return false;
  switch (t->tag) {
    case Tope::Tag::And:
    case Tope::Tag::Or: return occurs_tope(t->l, idx) || occurs_tope(t->r, idx);
    case Tope::Tag::Eq:
    case Tope::Tag::Leq: return occurs_ct(t->s, idx) || occurs_ct(t->t, idx);
    default: return false;
  }
}

bool occurs(const ExprPtr& e, int idx) {
  if (!e) return false;
  switch (e->tag) {
    case Expr::Tag::Var: return e->var_index == idx;
    case Expr::Tag::Pi:
    case Expr::Tag::Sigma: return occurs(e->e1, idx) || occurs(e->e2, idx + 1);
    case Expr::Tag::Lam: return occurs(e->e1, idx + 1);
    case Expr::Tag::Ext:
      return occurs_tope(e->tope1, idx + 1) || occurs_tope(e->tope2, idx + 1) ||
             occurs(e->e1, idx + 1) || occurs(e->e2, idx + 1);
    case Expr::Tag::Id: return occurs(e->e1, idx) || occurs(e->e2, idx) || occurs(e->e3, idx);
    case Expr::Tag::App:
    case Expr::Tag::Pair: return occurs(e->e1, idx) || occurs(e->e2, idx);
    case Expr::Tag::Fst:
    case Expr::Tag::Snd: return occurs(e->e1, idx);
    case Expr::Tag::ExtApp: return occurs(e->e1, idx) || occurs_ct(e->cterm, idx);
    case Expr::Tag::RecOr:
      return occurs_tope(e->tope1, idx) || occurs_tope(e->tope2, idx) || occurs(e->e1, idx) ||
             occurs(e->e2, idx);
    case Expr::Tag::CubeE: return occurs_ct(e->cterm, idx);
    default: return false;
  }
}

void collect_consts(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->tag == Expr::Tag::Const) out.insert(e->cname);
  collect_consts(e->e1, out);
  collect_consts(e->e2, out);
  collect_consts(e->e3, out);
}

std::string cube_str(const CubeShapePtr& c) {
  switch (c->tag) {
    case CubeShape::Tag::Unit: return "1";
    case CubeShape::Tag::Interval: return "2";
    case CubeShape::Tag::Product: {
      std::string l = cube_str(c->lhs);
      if (c->lhs->tag == CubeShape::Tag::Product) l = "(" + l + ")";
      return l + "*" + cube_str(c->rhs);
    }
  }
  return "?";
}

// Splits nested right recOR branches back into a clause list whenever the
// outer guard is literally the disjunction of the inner guards.
void flatten_rec_or(const ExprPtr& e, std::vector<std::pair<TopePtr, ExprPtr>>& out) {
  ExprPtr cur = e;
  while (true) {
    if (cur->e2 && cur->e2->tag == Expr::Tag::RecOr &&
        tope_equal(*cur->tope2, *Tope::disj(cur->e2->tope1, cur->e2->tope2))) {
      out.push_back({cur->tope1, cur->e1});
      cur = cur->e2;
      continue;
    }
    out.push_back({cur->tope1, cur->e1});
    out.push_back({cur->tope2, cur->e2});
    return;
  }
}

struct Printer {
  struct E {
    std::string name;
    std::vector<std::pair<Path, std::string>> leaves;
  };
  std::vector<E> es;  // outermost first
  std::set<std::string> consts;

  bool taken(const std::string& n) const {
    if (consts.count(n)) return true;
    for (const auto& e : es) {
      if (e.name == n) return true;
      for (const auto& l : e.leaves)
        if (l.second == n) return true;
    }
    return false;
  }

  std::string fresh(std::string base) {
    if (base.empty() || base == "_") base = "x";
    while (taken(base)) base += "'";
    return base;
  }

  static std::string wrap(int prec, int need, std::string s) {
    if (prec < need) return "(" + std::move(s) + ")";
    return s;
  }

  std::string var_name(int idx) const {
    if (idx >= 0 && static_cast<size_t>(idx) < es.size()) return es[es.size() - 1 - idx].name;
    return "#" + std::to_string(idx);
  }

  std::string cterm_str(const CubeTermPtr& t) const {
    switch (t->tag) {
      case CubeTerm::Tag::Var: return var_name(t->index);
      case CubeTerm::Tag::Zero: return "0";
      case CubeTerm::Tag::One: return "1";
      case CubeTerm::Tag::Star: return "()";
      case CubeTerm::Tag::Pair: {
        std::string s = "(";
        CubeTermPtr cur = t;
        while (cur->tag == CubeTerm::Tag::Pair) {
          s += cterm_str(cur->a) + ", ";
          cur = cur->b;
        }
        return s + cterm_str(cur) + ")";
      }
      case CubeTerm::Tag::Proj: {
        Path path;
        const CubeTerm* b = t.get();
        while (b->tag == CubeTerm::Tag::Proj) {
          path.insert(path.begin(), b->which);
          b = b->a.get();
        }
        if (b->tag == CubeTerm::Tag::Var && b->index >= 0 &&
            static_cast<size_t>(b->index) < es.size()) {
          const E& e = es[es.size() - 1 - b->index];
          for (const auto& l : e.leaves)
            if (l.first == path) return l.second;
          std::string s = e.name;
          for (uint8_t w : path) s += "." + std::to_string(int(w));
          return s;
        }
        std::string s = b->tag == CubeTerm::Tag::Var ? var_name(b->index) : cterm_str(t->a);
        return s + "." + std::to_string(int(t->which));
      }
    }
    return "?";
  }

  std::string tope_str(const TopePtr& t, int need) const {
    switch (t->tag) {
      case Tope::Tag::Top: return "TOP";
      case Tope::Tag::Bot: return "BOT";
      case Tope::Tag::And:
        return wrap(1, need, tope_str(t->l, 2) + " /\\ " + tope_str(t->r, 1));
      case Tope::Tag::Or:
        return wrap(0, need, tope_str(t->l, 1) + " \\/ " + tope_str(t->r, 0));
      case Tope::Tag::Eq: return cterm_str(t->s) + " === " + cterm_str(t->t);
      case Tope::Tag::Leq: return cterm_str(t->s) + " <= " + cterm_str(t->t);
    }
    return "?";
  }

  // Pattern and scope entry for a cube binder; used by extension types and
  // shape literals. Returns the pattern text and pushes the entry.
  std::string push_cube_binder(const std::string& binder, const std::vector<std::string>& hint,
                               const CubeShapePtr& cube) {
    auto paths = interval_paths(*cube);
    E entry;
    std::string pat;
    if (paths.size() >= 2) {
      std::vector<std::string> names;
      for (size_t i = 0; i < paths.size(); ++i) {
        std::string base = hint.size() == paths.size() ? hint[i] : "t" + std::to_string(i + 1);
        names.push_back(fresh(base));
        entry.leaves.push_back({paths[i], names.back()});
      }
      pat = "(";
      for (size_t i = 0; i < names.size(); ++i) pat += (i ? ", " : "") + names[i];
      pat += ")";
      // A bare reference to the binder prints as the tuple of its parts so
      // the output stays parseable.
      entry.name = pat;
    } else {
      std::string n = fresh(hint.size() == 1 ? hint[0] : (binder.empty() ? "t" : binder));
      entry.name = n;
      if (paths.size() == 1) entry.leaves.push_back({paths[0], n});
      pat = n;
    }
    es.push_back(std::move(entry));
    return pat;
  }

  std::string expr(const ExprPtr& e, int need) {
    switch (e->tag) {
      case Expr::Tag::Var: return var_name(e->var_index);
      case Expr::Tag::Universe: return "U";
      case Expr::Tag::Refl: return "refl";
      case Expr::Tag::J: return "J";
      case Expr::Tag::RecBot: return "recBOT";
      case Expr::Tag::Const: return e->cname;
      case Expr::Tag::CubeE: return cterm_str(e->cterm);
      case Expr::Tag::Pair: {
        std::string s = "(";
        ExprPtr cur = e;
        while (cur->tag == Expr::Tag::Pair) {
          s += expr(cur->e1, 0) + ", ";
          cur = cur->e2;
        }
        return s + expr(cur, 0) + ")";
      }
      case Expr::Tag::Fst: return wrap(3, need, "fst " + expr(e->e1, 4));
      case Expr::Tag::Snd: return wrap(3, need, "snd " + expr(e->e1, 4));
      case Expr::Tag::Id:
        return wrap(3, need,
                    "Id " + expr(e->e1, 4) + " " + expr(e->e2, 4) + " " + expr(e->e3, 4));
      case Expr::Tag::App: return wrap(3, need, expr(e->e1, 3) + " " + expr(e->e2, 4));
      case Expr::Tag::ExtApp: return wrap(3, need, expr(e->e1, 3) + " " + cterm_str(e->cterm));
      case Expr::Tag::Lam: {
        std::string pat;
        if (e->leaves.size() >= 2) {
          E entry;
          auto paths = flat_paths(e->leaves.size());
          std::vector<std::string> names;
          for (size_t i = 0; i < e->leaves.size(); ++i) {
            names.push_back(fresh(e->leaves[i]));
            entry.leaves.push_back({paths[i], names.back()});
          }
          pat = "(";
          for (size_t i = 0; i < names.size(); ++i) pat += (i ? ", " : "") + names[i];
          pat += ")";
          entry.name = pat;
          es.push_back(std::move(entry));
        } else {
          std::string n = fresh(e->binder);
          es.push_back({n, {}});
          pat = n;
        }
        std::string body = expr(e->e1, 0);
        es.pop_back();
        return wrap(0, need, "\\" + pat + " -> " + body);
      }
      case Expr::Tag::Pi: {
        std::string s;
        if (occurs(e->e2, 0)) {
          std::string n = fresh(e->binder);
          s = "(" + n + " : " + expr(e->e1, 0) + ") -> ";
          es.push_back({n, {}});
        } else {
          s = expr(e->e1, 2) + " -> ";
          es.push_back({"_", {}});
        }
        s += expr(e->e2, 1);
        es.pop_back();
        return wrap(1, need, s);
      }
      case Expr::Tag::Sigma: {
        std::string s;
        if (occurs(e->e2, 0)) {
          std::string n = fresh(e->binder);
          s = "(" + n + " : " + expr(e->e1, 0) + ") * ";
          es.push_back({n, {}});
        } else {
          s = expr(e->e1, 3) + " * ";
          es.push_back({"_", {}});
        }
        s += expr(e->e2, 2);
        es.pop_back();
        return wrap(2, need, s);
      }
      case Expr::Tag::Ext: {
        std::string pat = push_cube_binder(e->binder, e->leaves, e->cube);
        std::string shape = "{" + pat + " : " + cube_str(e->cube) + " | " + tope_str(e->tope1, 0) + "}";
        std::string s;
        if (e->tope2->tag == Tope::Tag::Bot) {
          s = shape + " -> " + expr(e->e1, 1);
          es.pop_back();
          return wrap(1, need, s);
        }
        s = "<" + shape + " -> " + expr(e->e1, 1) + " [" + tope_str(e->tope2, 0) + " |-> " +
            expr(e->e2, 0) + "]>";
        es.pop_back();
        return s;
      }
      case Expr::Tag::RecOr: {
        std::vector<std::pair<TopePtr, ExprPtr>> clauses;
        flatten_rec_or(e, clauses);
        std::string s = "recOR(";
        for (size_t i = 0; i < clauses.size(); ++i) {
          if (i) s += ", ";
          s += tope_str(clauses[i].first, 0) + " |-> " + expr(clauses[i].second, 0);
        }
        return s + ")";
      }
    }
    return "?";
  }
};

std::string shape_literal_str(const std::vector<std::string>& hint, const Shape& s) {
  Printer p;
  std::string pat = p.push_cube_binder("t", hint, s.cube);
  return "{" + pat + " : " + cube_str(s.cube) + " | " + p.tope_str(s.tope, 0) + "}";
}

bool span_before(const Span& a, const Span& b) {
  if (a.line != b.line) return a.line < b.line;
  return a.col < b.col;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public entry points

ParsedModule parse_module(const std::string& text, const std::string& file) {
  Lexer lx{text};
  lx.run();
  for (auto& d : lx.errs) d.file = file;
  Parser p(std::move(lx.out));
  return p.module(file, std::move(lx.errs));
}

ExprPtr parse_term_text(const std::string& text) {
  Lexer lx{text};
  lx.run();
  if (!lx.errs.empty()) throw CheckError(lx.errs.front());
  Parser p(std::move(lx.out));
  try {
    return p.top_term();
  } catch (ParseError& pe) {
    throw CheckError(std::move(pe.diag));
  }
}

SolveQuery parse_solve_query(const std::string& text) {
  Lexer lx{text};
  lx.run();
  if (!lx.errs.empty()) throw CheckError(lx.errs.front());
  Parser p(std::move(lx.out));
  try {
    return p.query();
  } catch (ParseError& pe) {
    throw CheckError(std::move(pe.diag));
  }
}

std::string print_term(const ExprPtr& e) {
  Printer p;
  collect_consts(e, p.consts);
  return p.expr(e, 0);
}

std::string print_declaration(const Declaration& d) {
  if (d.kind == Declaration::Kind::ShapeAlias)
    return "def " + d.name + " := " + shape_literal_str(d.shape_leaves, *d.shape) + "\n";
  Printer p;
  collect_consts(d.type, p.consts);
  collect_consts(d.body, p.consts);
  if (d.kind == Declaration::Kind::Postulate)
    return "postulate " + d.name + " : " + p.expr(d.type, 0) + "\n";
  return "def " + d.name + " : " + p.expr(d.type, 0) + " := " + p.expr(d.body, 0) + "\n";
}

std::string print_module(const ParsedModule& m) {
  std::string s;
  for (const auto& imp : m.imports) s += "import \"" + imp + "\"\n";
  if (!m.imports.empty() && !m.declarations.empty()) s += "\n";
  for (size_t i = 0; i < m.declarations.size(); ++i) {
    if (i) s += "\n";
    s += print_declaration(m.declarations[i]);
  }
  return s;
}

TriContext shape_pattern_context(const std::vector<std::string>& pattern,
                                 const CubeShapePtr& cube) {
  if (pattern.size() == 1) return TriContext().extended_cube(pattern[0], cube);
  if (pattern.empty()) return TriContext().extended_cube("t", cube);
  return TriContext().extended_cube("t", cube, pattern);
}

std::string print_shape(const Shape& s) { return shape_literal_str({}, s); }

ExprPtr resolve_shape_domains(const Environment& env, const ExprPtr& e) {
  if (!e) return e;
  auto rec = [&env](const ExprPtr& x) { return resolve_shape_domains(env, x); };
  auto respan = [&e](ExprPtr x) { return e->span.known() ? mk::with_span(std::move(x), e->span) : x; };
  switch (e->tag) {
    case Expr::Tag::Pi: {
      ExprPtr dom = rec(e->e1);
      ExprPtr cod = rec(e->e2);
      if (dom->tag == Expr::Tag::Const) {
        const Declaration* d = env.find(dom->cname);
        if (d && d->kind == Declaration::Kind::ShapeAlias) {
          std::string binder = d->shape_leaves.size() == 1 ? d->shape_leaves[0] : "t";
          std::vector<std::string> leaves =
              d->shape_leaves.size() >= 2 ? d->shape_leaves : std::vector<std::string>{};
          return respan(mk::ext(binder, std::move(leaves), d->shape->cube, d->shape->tope,
                                Tope::bot(), std::move(cod), mk::rec_bot()));
        }
      }
      return respan(mk::pi(e->binder, std::move(dom), std::move(cod)));
    }
    case Expr::Tag::Sigma: return respan(mk::sigma(e->binder, rec(e->e1), rec(e->e2)));
    case Expr::Tag::Lam: return respan(mk::lam(e->binder, e->leaves, rec(e->e1)));
    case Expr::Tag::App: return respan(mk::app(rec(e->e1), rec(e->e2)));
    case Expr::Tag::Pair: return respan(mk::pair(rec(e->e1), rec(e->e2)));
    case Expr::Tag::Fst: return respan(mk::fst(rec(e->e1)));
    case Expr::Tag::Snd: return respan(mk::snd(rec(e->e1)));
    case Expr::Tag::Id: return respan(mk::id(rec(e->e1), rec(e->e2), rec(e->e3)));
    case Expr::Tag::ExtApp: return respan(mk::ext_app(rec(e->e1), e->cterm));
    case Expr::Tag::RecOr:
      return respan(mk::rec_or(e->tope1, e->tope2, rec(e->e1), rec(e->e2)));
    case Expr::Tag::Ext:
      return respan(mk::ext(e->binder, e->leaves, e->cube, e->tope1, e->tope2, rec(e->e1),
                            rec(e->e2)));
    default: return e;
  }
}

// ---------------------------------------------------------------------------
// Loader

bool Loader::load(const std::string& path) {
  size_t before = diags_.size();
  load_rec(path, Span{}, "");
  return diags_.size() == before;
}

void Loader::load_rec(const std::string& path, const Span& at, const std::string& importer) {
  std::error_code ec;
  fs::path canon = fs::weakly_canonical(fs::path(path), ec);
  std::string key = ec ? path : canon.string();

  if (std::find(stack_.begin(), stack_.end(), key) != stack_.end()) {
    Diagnostic d;
    d.code = DiagCode::ImportCycle;
    d.file = importer;
    d.span = at;
    d.message = "import cycle through '" + path + "'";
    diags_.push_back(std::move(d));
    return;
  }
  if (std::find(done_.begin(), done_.end(), key) != done_.end()) return;

  std::ifstream in(path, std::ios::binary);
  if (!in) {
    Diagnostic d;
    d.code = DiagCode::ImportNotFound;
    d.file = importer;
    d.span = at;
    d.message = "cannot open '" + path + "'";
    diags_.push_back(std::move(d));
    return;
  }
  std::ostringstream ss;
  ss << in.rdbuf();

  stack_.push_back(key);
  ParsedModule m = parse_module(ss.str(), path);

  for (size_t i = 0; i < m.imports.size(); ++i) {
    fs::path resolved = fs::path(path).parent_path() / m.imports[i];
    load_rec(resolved.string(), m.import_spans[i], path);
  }

  std::vector<Diagnostic> local = std::move(m.diagnostics);
  for (auto& d : m.declarations) {
    if (d.type) d.type = resolve_shape_domains(env_, d.type);
    if (d.body) d.body = resolve_shape_domains(env_, d.body);
    try {
      check_declaration(env_, solver_, std::move(d));
    } catch (CheckError& ce) {
      local.push_back(ce.diag);
    }
  }
  std::stable_sort(local.begin(), local.end(),
                   [](const Diagnostic& a, const Diagnostic& b) { return span_before(a.span, b.span); });
  for (auto& d : local) diags_.push_back(std::move(d));

  stack_.pop_back();
  done_.push_back(key);
}

}  // namespace stt
