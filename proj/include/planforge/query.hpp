#pragma once

#include <algorithm>
#include <cctype>
#include <sstream>
#include <string>
#include <vector>

#include "planforge/error.hpp"

namespace planforge {

struct AttributeRef {
  std::string relation;
  std::string attribute;

  bool operator==(const AttributeRef& o) const {
    return relation == o.relation && attribute == o.attribute;
  }
};

// Equi-join between two relations; `left.relation` is the one appearing
// earlier in the FROM list (normalized at parse time).
struct JoinPredicate {
  AttributeRef left;
  AttributeRef right;

  bool operator==(const JoinPredicate& o) const {
    return left == o.left && right == o.right;
  }
};

struct Query {
  std::vector<std::string> projection;
  std::vector<std::string> relations;  // FROM order
  std::vector<JoinPredicate> join_predicates;

  std::size_t relation_count() const { return relations.size(); }
  std::size_t join_count() const { return join_predicates.size(); }

  // Index in FROM order, or -1 when absent.
  int relation_index(const std::string& name) const {
    auto it = std::find(relations.begin(), relations.end(), name);
    return it == relations.end()
               ? -1
               : static_cast<int>(it - relations.begin());
  }

  bool operator==(const Query& o) const {
    return projection == o.projection && relations == o.relations &&
           join_predicates == o.join_predicates;
  }
};

namespace detail {

struct Token {
  enum class Kind { ident, comma, dot, equals, semicolon, end };
  Kind kind;
  std::string text;
  int line;
  int column;
};

inline std::vector<Token> lex_query(const std::string& text,
                                    const std::string& source) {
  std::vector<Token> tokens;
  int line = 1, column = 1;
  std::size_t i = 0;
  auto fail = [&](const std::string& msg) {
    throw ParseError(source.empty() ? msg : source + ": " + msg, line, column);
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      column = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++column;
      ++i;
      continue;
    }
    int tok_col = column;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = i;
      while (i < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i])) ||
              text[i] == '_')) {
        ++i;
        ++column;
      }
      tokens.push_back({Token::Kind::ident, text.substr(start, i - start),
                        line, tok_col});
      continue;
    }
    switch (c) {
      case ',':
        tokens.push_back({Token::Kind::comma, ",", line, tok_col});
        break;
      case '.':
        tokens.push_back({Token::Kind::dot, ".", line, tok_col});
        break;
      case '=':
        tokens.push_back({Token::Kind::equals, "=", line, tok_col});
        break;
      case ';':
        tokens.push_back({Token::Kind::semicolon, ";", line, tok_col});
        break;
      default:
        fail(std::string("unexpected character '") + c + "'");
    }
    ++i;
    ++column;
  }
  tokens.push_back({Token::Kind::end, "", line, column});
  return tokens;
}

inline bool keyword_is(const Token& t, const char* kw) {
  if (t.kind != Token::Kind::ident) return false;
  const std::string& s = t.text;
  std::size_t n = 0;
  while (kw[n]) ++n;
  if (s.size() != n) return false;
  for (std::size_t i = 0; i < n; ++i)
    if (std::toupper(static_cast<unsigned char>(s[i])) != kw[i]) return false;
  return true;
}

}  // namespace detail

// Grammar:  SELECT attr (, attr)* FROM rel (, rel)*
//           [WHERE rel.attr = rel.attr (AND rel.attr = rel.attr)*] [;]
// Keywords are case-insensitive; identifiers are case-sensitive. Projection
// attributes are bare names and are not resolved against relations.
inline Query parse_query(const std::string& text,
                         const std::string& source = "") {
  auto tokens = detail::lex_query(text, source);
  std::size_t pos = 0;
  using detail::Token;

  auto fail = [&](const std::string& msg, const Token& t) -> void {
    throw ParseError(source.empty() ? msg : source + ": " + msg, t.line,
                     t.column);
  };
  auto peek = [&]() -> const Token& { return tokens[pos]; };
  auto advance = [&]() -> const Token& { return tokens[pos++]; };
  auto expect_ident = [&](const char* what) -> std::string {
    const Token& t = advance();
    if (t.kind != Token::Kind::ident)
      fail(std::string("expected ") + what + ", found '" + t.text + "'", t);
    return t.text;
  };
  auto expect_kind = [&](Token::Kind kind, const char* what) {
    const Token& t = advance();
    if (t.kind != kind)
      fail(std::string("expected ") + what + ", found '" +
               (t.kind == Token::Kind::end ? "<end>" : t.text) + "'",
           t);
  };

  Query q;

  if (!detail::keyword_is(peek(), "SELECT")) fail("expected SELECT", peek());
  advance();
  q.projection.push_back(expect_ident("projection attribute"));
  while (peek().kind == Token::Kind::comma) {
    advance();
    q.projection.push_back(expect_ident("projection attribute"));
  }

  if (!detail::keyword_is(peek(), "FROM")) fail("expected FROM", peek());
  advance();
  q.relations.push_back(expect_ident("relation name"));
  while (peek().kind == Token::Kind::comma) {
    advance();
    q.relations.push_back(expect_ident("relation name"));
  }
  for (std::size_t i = 0; i < q.relations.size(); ++i)
    for (std::size_t j = i + 1; j < q.relations.size(); ++j)
      if (q.relations[i] == q.relations[j])
        throw SemanticError("relation " + q.relations[i] +
                            " appears twice in FROM");

  if (detail::keyword_is(peek(), "WHERE")) {
    advance();
    while (true) {
      const Token& first = peek();
      AttributeRef lhs, rhs;
      lhs.relation = expect_ident("relation name");
      expect_kind(Token::Kind::dot, "'.'");
      lhs.attribute = expect_ident("attribute name");
      expect_kind(Token::Kind::equals, "'='");
      rhs.relation = expect_ident("relation name");
      expect_kind(Token::Kind::dot, "'.'");
      rhs.attribute = expect_ident("attribute name");

      int li = q.relation_index(lhs.relation);
      int ri = q.relation_index(rhs.relation);
      if (li < 0)
        throw SemanticError("predicate references relation " + lhs.relation +
                            " which is not in FROM");
      if (ri < 0)
        throw SemanticError("predicate references relation " + rhs.relation +
                            " which is not in FROM");
      if (li == ri)
        throw SemanticError("join predicate at line " +
                            std::to_string(first.line) +
                            " must reference two distinct relations");
      if (li > ri) std::swap(lhs, rhs);  // left = earlier in FROM order
      q.join_predicates.push_back({lhs, rhs});

      if (detail::keyword_is(peek(), "AND")) {
        advance();
        continue;
      }
      break;
    }
  }

  if (peek().kind == Token::Kind::semicolon) advance();
  if (peek().kind != Token::Kind::end)
    fail("unexpected trailing input '" + peek().text + "'", peek());
  return q;
}

inline std::string render_query(const Query& q) {
  std::ostringstream out;
  out << "SELECT ";
  for (std::size_t i = 0; i < q.projection.size(); ++i) {
    if (i) out << ", ";
    out << q.projection[i];
  }
  out << " FROM ";
  for (std::size_t i = 0; i < q.relations.size(); ++i) {
    if (i) out << ", ";
    out << q.relations[i];
  }
  if (!q.join_predicates.empty()) {
    out << " WHERE ";
    for (std::size_t i = 0; i < q.join_predicates.size(); ++i) {
      if (i) out << " AND ";
      const auto& p = q.join_predicates[i];
      out << p.left.relation << '.' << p.left.attribute << " = "
          << p.right.relation << '.' << p.right.attribute;
    }
  }
  out << ';';
  return out.str();
}

}  // namespace planforge
