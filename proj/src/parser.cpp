#include "evtl/parser.hpp"

#include "evtl/csv.hpp"
#include "evtl/error.hpp"

#include <cctype>
#include <charconv>
#include <map>

#include <fmt/format.h>

namespace evtl {

namespace {

enum class Tok {
  Ident,
  Number,
  String,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Semicolon,
  Equals,
  Bang,
  OrOr,
  AndAnd,
  Arrow,
  Minus,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

std::string describe(const Token& t) {
  switch (t.kind) {
  case Tok::End: return "end of input";
  case Tok::String: return fmt::format("string \"{}\"", t.text);
  default: return fmt::format("'{}'", t.text);
  }
}

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_blank();
      const auto line = line_;
      const auto col = col_;
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", line, col});
        return out;
      }
      const char c = src_[pos_];
      auto single = [&](Tok kind) {
        advance();
        out.push_back({kind, std::string(1, c), line, col});
      };
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string ident;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
          ident += src_[pos_];
          advance();
        }
        out.push_back({Tok::Ident, ident, line, col});
      } else if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && next_is_digit())) {
        out.push_back({Tok::Number, number(), line, col});
      } else if (c == '"') {
        advance();
        std::string s;
        while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') {
          s += src_[pos_];
          advance();
        }
        if (pos_ >= src_.size() || src_[pos_] != '"') throw ParseError("unterminated string", line, col);
        advance();
        out.push_back({Tok::String, s, line, col});
      } else if (c == '|' && peek(1) == '|') {
        advance(2);
        out.push_back({Tok::OrOr, "||", line, col});
      } else if (c == '&' && peek(1) == '&') {
        advance(2);
        out.push_back({Tok::AndAnd, "&&", line, col});
      } else if (c == '-' && peek(1) == '>') {
        advance(2);
        out.push_back({Tok::Arrow, "->", line, col});
      } else {
        switch (c) {
        case '(': single(Tok::LParen); break;
        case ')': single(Tok::RParen); break;
        case '[': single(Tok::LBracket); break;
        case ']': single(Tok::RBracket); break;
        case ',': single(Tok::Comma); break;
        case ';': single(Tok::Semicolon); break;
        case '=': single(Tok::Equals); break;
        case '!': single(Tok::Bang); break;
        case '-': single(Tok::Minus); break;
        default: throw ParseError(fmt::format("unexpected character '{}'", c), line, col);
        }
      }
    }
  }

private:
  char peek(std::size_t ahead) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }
  bool next_is_digit() const { return std::isdigit(static_cast<unsigned char>(peek(1))) != 0; }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_blank() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  std::string number() {
    std::string s;
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        s += src_[pos_];
        advance();
      }
    };
    digits();
    if (peek(0) == '.') {
      s += '.';
      advance();
      digits();
    }
    if (peek(0) == 'e' || peek(0) == 'E') {
      const char sign = peek(1);
      const bool has_sign = sign == '+' || sign == '-';
      if (std::isdigit(static_cast<unsigned char>(peek(has_sign ? 2 : 1)))) {
        s += src_[pos_];
        advance();
        if (has_sign) {
          s += src_[pos_];
          advance();
        }
        digits();
      }
    }
    return s;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
public:
  Parser(std::vector<Token> tokens, const ParseContext& ctx) : toks_(std::move(tokens)), ctx_(ctx) {}

  FormulaPtr run() {
    auto f = implication();
    if (cur().kind != Tok::End) fail(fmt::format("unexpected {} after formula", describe(cur())));
    return f;
  }

private:
  const Token& cur() const { return toks_[pos_]; }
  bool at(Tok k) const { return cur().kind == k; }
  bool at_ident(std::string_view name) const { return at(Tok::Ident) && cur().text == name; }
  bool at_temporal(std::string_view name) const {
    return at_ident(name) && pos_ + 1 < toks_.size() && toks_[pos_ + 1].kind == Tok::LBracket;
  }

  [[noreturn]] void fail(const std::string& msg) const { fail_at(cur(), msg); }
  [[noreturn]] static void fail_at(const Token& t, const std::string& msg) { throw ParseError(msg, t.line, t.column); }

  Token take() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }

  Token expect(Tok k, std::string_view what) {
    if (!at(k)) fail(fmt::format("expected {}, found {}", what, describe(cur())));
    return take();
  }

  FormulaPtr implication() {
    auto lhs = disjunction();
    if (at(Tok::Arrow)) {
      take();
      return implies(std::move(lhs), implication());
    }
    return lhs;
  }

  FormulaPtr disjunction() {
    auto lhs = conjunction();
    if (at(Tok::OrOr)) {
      take();
      return disj(std::move(lhs), disjunction());
    }
    return lhs;
  }

  FormulaPtr conjunction() {
    auto lhs = until_expr();
    if (at(Tok::AndAnd)) {
      take();
      return conj(std::move(lhs), conjunction());
    }
    return lhs;
  }

  FormulaPtr until_expr() {
    auto lhs = unary();
    if (at_temporal("U")) {
      auto op = take();
      auto [a, b] = interval(op);
      return until(std::move(lhs), a, b, until_expr());
    }
    return lhs;
  }

  FormulaPtr unary() {
    if (at(Tok::Bang)) {
      take();
      return negate(unary());
    }
    if (at_temporal("F") || at_temporal("G")) {
      auto op = take();
      auto [a, b] = interval(op);
      auto arg = unary();
      return op.text == "F" ? eventually(a, b, std::move(arg)) : always(a, b, std::move(arg));
    }
    return primary();
  }

  std::pair<int, int> interval(const Token& op) {
    expect(Tok::LBracket, "'['");
    const int a = integer();
    expect(Tok::Comma, "','");
    const int b = integer();
    expect(Tok::RBracket, "']'");
    if (a > b) fail_at(op, fmt::format("interval [{},{}] has a > b", a, b));
    return {a, b};
  }

  int integer() {
    const auto t = expect(Tok::Number, "an integer");
    int v = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc{} || ptr != t.text.data() + t.text.size()) fail_at(t, fmt::format("'{}' is not a nonnegative integer", t.text));
    return v;
  }

  double number() {
    const bool negative = at(Tok::Minus);
    if (negative) take();
    const auto t = expect(Tok::Number, "a number");
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc{} || ptr != t.text.data() + t.text.size()) fail_at(t, fmt::format("'{}' is not a number", t.text));
    return negative ? -v : v;
  }

  FormulaPtr primary() {
    if (at(Tok::LParen)) {
      take();
      auto f = implication();
      expect(Tok::RParen, "')'");
      return f;
    }
    if (at_ident("true")) {
      take();
      return make_true();
    }
    if (at_ident("target") || at_ident("hazard")) return atom();
    fail(fmt::format("expected a formula, found {}", describe(cur())));
  }

  FormulaPtr atom() {
    const auto head = take();
    expect(Tok::LParen, "'('");
    auto dist = distribution();
    expect(Tok::Comma, "','");
    const auto pen = expect(Tok::Ident, "a penalty name");
    expect(Tok::Comma, "','");
    const auto p_tok = cur();
    const double p = number();
    expect(Tok::RParen, "')'");

    if (!ctx_.penalties) fail_at(pen, "no penalty registry available");
    const auto* penalty = ctx_.penalties->find(pen.text);
    if (!penalty) fail_at(pen, fmt::format("unknown penalty '{}'", pen.text));
    if (!(p >= 0.0 && p <= 1.0)) fail_at(p_tok, fmt::format("threshold {} outside [0,1]", p));
    try {
      return head.text == "target" ? target(std::move(dist), *penalty, p) : hazard(std::move(dist), *penalty, p);
    } catch (const ConfigError& e) {
      fail_at(head, e.what());
    }
  }

  std::string variable() {
    const auto t = expect(Tok::Ident, "a variable name");
    if (!ctx_.space->find(t.text)) fail_at(t, fmt::format("unknown variable '{}'", t.text));
    return t.text;
  }

  DistributionSpec distribution() {
    const auto head = expect(Tok::Ident, "a distribution");
    expect(Tok::LParen, "'('");
    try {
      if (head.text == "normal") return normal(head);
      if (head.text == "point") return point(head);
      if (head.text == "empirical") return empirical(head);
    } catch (const ConfigError& e) {
      fail_at(head, e.what());
    }
    fail_at(head, fmt::format("unknown distribution '{}' (expected normal, point or empirical)", head.text));
  }

  DistributionSpec normal(const Token& head) {
    std::vector<NormalComponent> comps;
    for (;;) {
      const auto var_tok = cur();
      NormalComponent c;
      c.var = variable();
      for (const auto& prev : comps) {
        if (prev.var == c.var) fail_at(var_tok, fmt::format("variable '{}' given twice", c.var));
      }
      expect(Tok::Semicolon, "';'");
      c.mean = number();
      expect(Tok::Comma, "','");
      const auto var_pos = cur();
      c.variance = number();
      if (c.variance < 0.0) fail_at(var_pos, fmt::format("negative variance {}", c.variance));
      comps.push_back(std::move(c));
      if (at(Tok::Comma)) {
        take();
        continue;
      }
      expect(Tok::RParen, "')'");
      break;
    }
    (void)head;
    return DistributionSpec::normal(ctx_.space, std::move(comps));
  }

  DistributionSpec point(const Token& head) {
    std::map<std::string, double> assigned;
    std::vector<std::string> order;
    for (;;) {
      const auto var_tok = cur();
      auto var = variable();
      expect(Tok::Equals, "'='");
      const double v = number();
      if (!assigned.emplace(var, v).second) fail_at(var_tok, fmt::format("variable '{}' assigned twice", var));
      order.push_back(var);
      if (at(Tok::Comma)) {
        take();
        continue;
      }
      expect(Tok::RParen, "')'");
      break;
    }
    (void)head;
    std::vector<double> values(ctx_.space->size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto& var = ctx_.space->variable(i);
      auto it = assigned.find(var.name());
      values[i] = it == assigned.end() ? var.clamp(0.0) : it->second;
    }
    return DistributionSpec::point(DataState(ctx_.space, std::move(values)), std::move(order));
  }

  DistributionSpec empirical(const Token& head) {
    const auto path_tok = expect(Tok::String, "a quoted file path");
    expect(Tok::RParen, "')'");
    std::filesystem::path path(path_tok.text);
    if (path.is_relative()) path = ctx_.base_dir / path;
    SampleSet samples = read_samples_csv(path, ctx_.space);
    if (samples.empty()) fail_at(head, fmt::format("empirical reference '{}' has no samples", path_tok.text));
    return DistributionSpec::empirical(std::move(samples), {}, path_tok.text);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const ParseContext& ctx_;
};

} // namespace

FormulaPtr parse_formula(std::string_view text, const ParseContext& context) {
  if (!context.space) throw ConfigError("parse_formula: no data space in context");
  Lexer lexer(text);
  Parser parser(lexer.run(), context);
  return parser.run();
}

} // namespace evtl
