#include "gpal/syntax.hpp"

#include <cctype>
#include <map>
#include <tuple>
#include <variant>
#include <vector>

namespace gpal {

namespace {

enum class Tok {
  Ident,     // [a-z][a-z0-9_]*
  Know,      // K_<ident>, payload is the agent name
  Tilde,     // ~
  Amp,       // &
  Arrow,     // ->
  BiArrow,   // <->
  LParen,
  RParen,
  LBracket,
  RBracket,
  Colon,
  Comma,
  SeqArrow,  // =>
  End,
};

struct Token {
  Tok kind;
  std::string text;  // Ident: the identifier; Know: the agent name
  std::size_t pos;
};

bool ident_start(char c) { return c >= 'a' && c <= 'z'; }
bool ident_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  const auto n = text.size();
  while (i < n) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (ident_start(c)) {
      std::size_t j = i + 1;
      while (j < n && ident_char(text[j])) ++j;
      out.push_back({Tok::Ident, std::string(text.substr(i, j - i)), start});
      i = j;
      continue;
    }
    switch (c) {
      case 'K': {
        if (i + 1 >= n || text[i + 1] != '_')
          throw ParseError("expected '_' after 'K'", start);
        std::size_t j = i + 2;
        if (j >= n || !ident_start(text[j]))
          throw ParseError("expected agent name after 'K_'", start);
        ++j;
        while (j < n && ident_char(text[j])) ++j;
        out.push_back({Tok::Know, std::string(text.substr(i + 2, j - i - 2)), start});
        i = j;
        break;
      }
      case '~':
        out.push_back({Tok::Tilde, "~", start});
        ++i;
        break;
      case '&':
        out.push_back({Tok::Amp, "&", start});
        ++i;
        break;
      case '-':
        if (i + 1 >= n || text[i + 1] != '>')
          throw ParseError("expected '>' after '-'", start);
        out.push_back({Tok::Arrow, "->", start});
        i += 2;
        break;
      case '<':
        if (i + 2 >= n || text[i + 1] != '-' || text[i + 2] != '>')
          throw ParseError("expected '<->'", start);
        out.push_back({Tok::BiArrow, "<->", start});
        i += 3;
        break;
      case '=':
        if (i + 1 >= n || text[i + 1] != '>')
          throw ParseError("expected '>' after '='", start);
        out.push_back({Tok::SeqArrow, "=>", start});
        i += 2;
        break;
      case '(':
        out.push_back({Tok::LParen, "(", start});
        ++i;
        break;
      case ')':
        out.push_back({Tok::RParen, ")", start});
        ++i;
        break;
      case '[':
        out.push_back({Tok::LBracket, "[", start});
        ++i;
        break;
      case ']':
        out.push_back({Tok::RBracket, "]", start});
        ++i;
        break;
      case ':':
        out.push_back({Tok::Colon, ":", start});
        ++i;
        break;
      case ',':
        out.push_back({Tok::Comma, ",", start});
        ++i;
        break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
  }
  out.push_back({Tok::End, "", n});
  return out;
}

// Shares structurally equal subterms as they are built, bottom-up: children
// are interned before parents, so a (kind, payload, child identities) key
// pins down the whole subtree.  Comparisons elsewhere short-circuit on node
// identity, which makes inputs full of repeated subterms cheap to handle.
class Interner {
 public:
  Formula prop(const std::string& name) {
    return get(FormulaKind::Prop, name, nullptr, nullptr,
               [&] { return Formula::prop(name); });
  }
  Formula negation(const Formula& f) {
    return get(FormulaKind::Not, "", f.identity(), nullptr,
               [&] { return Formula::negation(f); });
  }
  Formula conjunction(const Formula& a, const Formula& b) {
    return get(FormulaKind::And, "", a.identity(), b.identity(),
               [&] { return Formula::conjunction(a, b); });
  }
  Formula implication(const Formula& a, const Formula& b) {
    return get(FormulaKind::Implies, "", a.identity(), b.identity(),
               [&] { return Formula::implication(a, b); });
  }
  Formula knows(const Agent& a, const Formula& f) {
    return get(FormulaKind::Know, a.name(), f.identity(), nullptr,
               [&] { return Formula::knows(a, f); });
  }
  Formula announcement(const Formula& a, const Formula& b) {
    return get(FormulaKind::Announce, "", a.identity(), b.identity(),
               [&] { return Formula::announcement(a, b); });
  }

 private:
  using Key = std::tuple<FormulaKind, std::string, const void*, const void*>;

  template <typename Make>
  Formula get(FormulaKind k, const std::string& name, const void* l,
              const void* r, Make make) {
    Key key{k, name, l, r};
    if (auto it = table_.find(key); it != table_.end()) return it->second;
    Formula f = make();
    table_.emplace(std::move(key), f);
    return f;
  }

  // Values keep every interned node alive, so child identities in keys
  // cannot dangle or be recycled.
  std::map<Key, Formula> table_;
};

class Parser {
 public:
  Parser(std::string_view text, const ParseOptions& opts)
      : tokens_(lex(text)), opts_(opts) {}

  Formula parse_formula_all() {
    Formula f = formula();
    expect(Tok::End, "end of input");
    return f;
  }

  Sequent parse_sequent_all() {
    std::vector<SequentExpr> ant = expr_list(Tok::SeqArrow);
    expect(Tok::SeqArrow, "'=>'");
    std::vector<SequentExpr> suc = expr_list(Tok::End);
    expect(Tok::End, "end of input");
    return Sequent{Multiset(std::move(ant)), Multiset(std::move(suc))};
  }

 private:
  const Token& peek() const { return tokens_[index_]; }
  Token advance() { return tokens_[index_++]; }

  void expect(Tok kind, const char* what) {
    if (peek().kind != kind)
      throw ParseError(std::string("expected ") + what, peek().pos);
    advance();
  }

  Agent check_agent(std::string name, std::size_t pos) {
    Agent a(std::move(name));
    if (opts_.allowed_agents && !opts_.allowed_agents->contains(a))
      throw ParseError("unknown agent '" + a.name() + "'", pos);
    return a;
  }

  Formula formula() {
    Formula left = imp();
    while (peek().kind == Tok::BiArrow) {
      advance();
      Formula right = imp();
      left = intern_.conjunction(intern_.implication(left, right),
                                  intern_.implication(right, left));
    }
    return left;
  }

  Formula imp() {
    Formula left = conj();
    if (peek().kind == Tok::Arrow) {
      advance();
      return intern_.implication(left, imp());
    }
    return left;
  }

  Formula conj() {
    Formula left = unary();
    while (peek().kind == Tok::Amp) {
      advance();
      left = intern_.conjunction(left, unary());
    }
    return left;
  }

  Formula unary() {
    switch (peek().kind) {
      case Tok::Tilde:
        advance();
        return intern_.negation(unary());
      case Tok::Know: {
        Token t = advance();
        Agent a = check_agent(std::move(t.text), t.pos);
        return intern_.knows(a, unary());
      }
      case Tok::LBracket: {
        advance();
        Formula announced = formula();
        expect(Tok::RBracket, "']'");
        return intern_.announcement(announced, unary());
      }
      case Tok::LParen: {
        advance();
        Formula inner = formula();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Ident:
        return intern_.prop(advance().text);
      default:
        throw ParseError("expected a formula", peek().pos);
    }
  }

  // expr := ident ':' formula | ident '~' ident ident
  SequentExpr expr() {
    if (peek().kind != Tok::Ident)
      throw ParseError("expected a label", peek().pos);
    Token first = advance();
    if (peek().kind == Tok::Colon) {
      advance();
      return lab(Label(std::move(first.text)), formula());
    }
    if (peek().kind == Tok::Tilde) {
      advance();
      if (peek().kind != Tok::Ident)
        throw ParseError("expected an agent name after '~'", peek().pos);
      Token agent_tok = advance();
      Agent a = check_agent(std::move(agent_tok.text), agent_tok.pos);
      if (peek().kind != Tok::Ident)
        throw ParseError("expected a label", peek().pos);
      return rel(Label(std::move(first.text)), std::move(a), Label(advance().text));
    }
    throw ParseError("expected ':' or '~' after label", peek().pos);
  }

  std::vector<SequentExpr> expr_list(Tok terminator) {
    std::vector<SequentExpr> out;
    if (peek().kind == terminator) return out;  // empty side
    out.push_back(expr());
    while (peek().kind == Tok::Comma) {
      advance();
      out.push_back(expr());
    }
    return out;
  }

  Interner intern_;
  std::vector<Token> tokens_;
  std::size_t index_ = 0;
  ParseOptions opts_;
};

// Precedence levels for rendering with minimal parentheses.
enum Prec { kImp = 1, kAnd = 2, kUnary = 3 };

int prec_of(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Implies:
      return kImp;
    case FormulaKind::And:
      return kAnd;
    default:
      return kUnary;
  }
}

void render(const Formula& f, int min_prec, std::string& out) {
  const bool parens = prec_of(f) < min_prec;
  if (parens) out += '(';
  switch (f.kind()) {
    case FormulaKind::Prop:
      out += f.atom().name();
      break;
    case FormulaKind::Not:
      out += '~';
      render(f.child(), kUnary, out);
      break;
    case FormulaKind::Know:
      out += "K_";
      out += f.agent().name();
      out += ' ';
      render(f.child(), kUnary, out);
      break;
    case FormulaKind::Announce:
      out += '[';
      render(f.left(), kImp, out);
      out += ']';
      render(f.right(), kUnary, out);
      break;
    case FormulaKind::And:
      // Left associative: the right operand needs parens if it is itself '&'.
      render(f.left(), kAnd, out);
      out += " & ";
      render(f.right(), kAnd + 1, out);
      break;
    case FormulaKind::Implies:
      // Right associative.
      render(f.left(), kImp + 1, out);
      out += " -> ";
      render(f.right(), kImp, out);
      break;
  }
  if (parens) out += ')';
}

}  // namespace

Formula parse_formula(std::string_view text, const ParseOptions& opts) {
  return Parser(text, opts).parse_formula_all();
}

Sequent parse_sequent(std::string_view text, const ParseOptions& opts) {
  return Parser(text, opts).parse_sequent_all();
}

std::string render_formula(const Formula& f) {
  std::string out;
  render(f, kImp, out);
  return out;
}

std::string render_expr(const SequentExpr& e) {
  if (const auto* r = std::get_if<RelationalAtom>(&e))
    return r->from.name() + " ~" + r->agent.name() + " " + r->to.name();
  const auto& lf = std::get<LabelledFormula>(e);
  return lf.label.name() + ": " + render_formula(lf.formula);
}

std::string render_sequent(const Sequent& s) {
  std::string out;
  bool first = true;
  for (const auto& e : s.antecedent.items()) {
    if (!first) out += ", ";
    out += render_expr(e);
    first = false;
  }
  out += s.antecedent.empty() ? "=>" : " =>";
  first = true;
  for (const auto& e : s.succedent.items()) {
    out += first ? " " : ", ";
    out += render_expr(e);
    first = false;
  }
  return out;
}

}  // namespace gpal
