#ifndef GPAL_SYNTAX_HPP
#define GPAL_SYNTAX_HPP

// Concrete syntax.
//
//   formula  :=  imp ("<->" imp)*                 biconditional, lowest, left
//   imp      :=  conj ("->" imp)?                 right associative
//   conj     :=  unary ("&" unary)*               left associative
//   unary    :=  "~" unary | "K_" ident unary | "[" formula "]" unary | prim
//   prim     :=  ident | "(" formula ")"
//   ident    :=  [a-z][a-z0-9_]*
//
// "a <-> b" is sugar for "(a -> b) & (b -> a)" and is expanded by the parser;
// the abstract syntax has no biconditional node, and rendering never emits
// one.  Sequents are written "x: K_a p, x ~a y => y: p": comma-separated
// expressions on both sides of "=>", where an expression is a labelled
// formula "label: formula" or a relational atom "label ~agent label".

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include "gpal/formula.hpp"
#include "gpal/sequent.hpp"

namespace gpal {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::size_t position)
      : std::runtime_error(message + " (at offset " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

struct ParseOptions {
  // When set, K_x is rejected unless x is one of these agents.
  std::optional<std::set<Agent>> allowed_agents;
};

Formula parse_formula(std::string_view text, const ParseOptions& opts = {});
Sequent parse_sequent(std::string_view text, const ParseOptions& opts = {});

std::string render_formula(const Formula& f);
std::string render_expr(const SequentExpr& e);
std::string render_sequent(const Sequent& s);

}  // namespace gpal

#endif
