#pragma once

#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "isofun/core.hpp"
#include "isofun/psi.hpp"
#include "isofun/symfn.hpp"

namespace isofun {

namespace detail {

inline std::optional<double> parse_number(const std::string& tok) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + tok.size() || tok.empty()) return std::nullopt;
  return v;
}

/// Polish-prefix psi grammar over whitespace-separated tokens:
///   expr := P<k> | <number> | + expr expr | - expr expr | * expr expr
///         | / expr expr | pow expr <number> | abs expr
inline PsiExpression parse_psi_prefix(const std::vector<std::string>& tokens, std::size_t& pos) {
  if (pos >= tokens.size()) throw ParseError("psi expression ended unexpectedly");
  const std::string tok = tokens[pos++];
  if (tok == "+" || tok == "-" || tok == "*" || tok == "/") {
    PsiExpression a = parse_psi_prefix(tokens, pos);
    PsiExpression b = parse_psi_prefix(tokens, pos);
    if (tok == "+") return a + b;
    if (tok == "-") return a - b;
    if (tok == "*") return a * b;
    return a / b;
  }
  if (tok == "pow") {
    PsiExpression base = parse_psi_prefix(tokens, pos);
    if (pos >= tokens.size()) throw ParseError("pow needs a numeric exponent");
    const auto exponent = parse_number(tokens[pos++]);
    if (!exponent) throw ParseError("pow exponent must be a number literal");
    return PsiExpression::pow(base, *exponent);
  }
  if (tok == "abs") return PsiExpression::abs(parse_psi_prefix(tokens, pos));
  if (tok.size() >= 2 && tok[0] == 'P') {
    int index = 0;
    for (std::size_t c = 1; c < tok.size(); ++c) {
      if (tok[c] < '0' || tok[c] > '9') throw ParseError("bad power-sum variable '" + tok + "'");
      index = index * 10 + (tok[c] - '0');
    }
    if (index < 1) throw ParseError("power-sum index must be >= 1");
    return PsiExpression::variable(index);
  }
  if (const auto num = parse_number(tok)) return PsiExpression::constant(*num);
  throw ParseError("unknown psi token '" + tok + "'");
}

}  // namespace detail

inline PsiExpression parse_psi_expression(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  std::size_t pos = 0;
  PsiExpression expr = detail::parse_psi_prefix(tokens, pos);
  if (pos != tokens.size()) throw ParseError("trailing tokens in psi expression");
  return expr;
}

/// Function-spec mini-grammar for the CLI:
///   p<k> | s<k> | q<k> | ratio:<k>:<l> | inv:<spec> | psi:<prefix expression>
inline SymmetricFunctionSpec parse_function_spec(const std::string& text, int n) {
  if (text.rfind("inv:", 0) == 0) return inverse_transform(parse_function_spec(text.substr(4), n));
  if (text.rfind("psi:", 0) == 0) {
    PsiExpression expr = parse_psi_expression(text.substr(4));
    return SymmetricFunctionSpec(text, std::move(expr), n, DomainCone::full());
  }
  return builtin(text, n);
}

inline DomainCone parse_cone(const std::string& text, int n) {
  if (text == "full") return DomainCone::full();
  if (text == "gplus") return DomainCone::gamma_plus();
  if (text.rfind("gk:", 0) == 0) {
    int k = 0;
    try {
      k = std::stoi(text.substr(3));
    } catch (const std::exception&) {
      throw ParseError("bad cone index in '" + text + "'");
    }
    if (k < 1 || k > n) throw ParseError("cone index must satisfy 1 <= k <= dim");
    return DomainCone::gamma_k(k);
  }
  throw ParseError("unknown cone '" + text + "' (expected full, gplus, or gk:<k>)");
}

}  // namespace isofun
