#include "fsk/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

#include "fsk/error.hpp"

namespace fsk {

namespace {

enum class Op { constant, var_x, var_y, add, sub, mul, div, pow, neg, sin, cos, tan, exp, log, sqrt, abs };

struct Instr {
  Op op;
  double value = 0.0;
};

struct FunctionName {
  std::string_view name;
  Op op;
};

constexpr std::array<FunctionName, 7> kFunctions{{{"sin", Op::sin},
                                                  {"cos", Op::cos},
                                                  {"tan", Op::tan},
                                                  {"exp", Op::exp},
                                                  {"log", Op::log},
                                                  {"sqrt", Op::sqrt},
                                                  {"abs", Op::abs}}};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  std::vector<Instr> run() {
    expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return std::move(code_);
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::parse_error, "column " + std::to_string(pos_ + 1) + ": " + what + " in \"" +
                                       std::string(text_) + "\"");
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  void expr() {
    term();
    while (true) {
      if (accept('+')) {
        term();
        code_.push_back({Op::add});
      } else if (accept('-')) {
        term();
        code_.push_back({Op::sub});
      } else {
        return;
      }
    }
  }

  void term() {
    unary();
    while (true) {
      if (accept('*')) {
        unary();
        code_.push_back({Op::mul});
      } else if (accept('/')) {
        unary();
        code_.push_back({Op::div});
      } else {
        return;
      }
    }
  }

  void unary() {
    if (accept('-')) {
      unary();
      code_.push_back({Op::neg});
    } else if (accept('+')) {
      unary();
    } else {
      power();
    }
  }

  void power() {
    primary();
    if (accept('^')) {
      unary();
      code_.push_back({Op::pow});
    }
  }

  void primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      if (name == "x") {
        code_.push_back({Op::var_x});
      } else if (name == "y") {
        code_.push_back({Op::var_y});
      } else if (name == "pi") {
        code_.push_back({Op::constant, std::numbers::pi});
      } else {
        for (const auto& fn : kFunctions) {
          if (fn.name == name) {
            expect('(');
            expr();
            expect(')');
            code_.push_back({fn.op});
            return;
          }
        }
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "'");
      }
      return;
    }
    if (accept('(')) {
      expr();
      expect(')');
      return;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  void number() {
    double v = 0.0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    code_.push_back({Op::constant, v});
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<Instr> code_;
};

std::size_t stack_depth(const std::vector<Instr>& code) {
  std::size_t depth = 0;
  std::size_t peak = 0;
  for (const auto& ins : code) {
    switch (ins.op) {
      case Op::constant:
      case Op::var_x:
      case Op::var_y: ++depth; break;
      case Op::add:
      case Op::sub:
      case Op::mul:
      case Op::div:
      case Op::pow: --depth; break;
      default: break;
    }
    peak = std::max(peak, depth);
  }
  return peak;
}

}  // namespace

struct Expression::Program {
  std::string source;
  std::vector<Instr> code;
  std::size_t depth = 0;
};

Expression Expression::parse(std::string_view text) {
  auto program = std::make_shared<Program>();
  program->source = std::string(text);
  program->code = Parser(program->source).run();
  program->depth = stack_depth(program->code);
  return Expression(std::move(program));
}

double Expression::operator()(double x, double y) const {
  constexpr std::size_t kInline = 32;
  std::array<double, kInline> small{};
  std::vector<double> large;
  double* stack = small.data();
  if (program_->depth > kInline) {
    large.resize(program_->depth);
    stack = large.data();
  }
  std::size_t top = 0;
  for (const auto& ins : program_->code) {
    switch (ins.op) {
      case Op::constant: stack[top++] = ins.value; break;
      case Op::var_x: stack[top++] = x; break;
      case Op::var_y: stack[top++] = y; break;
      case Op::add: --top; stack[top - 1] += stack[top]; break;
      case Op::sub: --top; stack[top - 1] -= stack[top]; break;
      case Op::mul: --top; stack[top - 1] *= stack[top]; break;
      case Op::div: --top; stack[top - 1] /= stack[top]; break;
      case Op::pow: --top; stack[top - 1] = std::pow(stack[top - 1], stack[top]); break;
      case Op::neg: stack[top - 1] = -stack[top - 1]; break;
      case Op::sin: stack[top - 1] = std::sin(stack[top - 1]); break;
      case Op::cos: stack[top - 1] = std::cos(stack[top - 1]); break;
      case Op::tan: stack[top - 1] = std::tan(stack[top - 1]); break;
      case Op::exp: stack[top - 1] = std::exp(stack[top - 1]); break;
      case Op::log: stack[top - 1] = std::log(stack[top - 1]); break;
      case Op::sqrt: stack[top - 1] = std::sqrt(stack[top - 1]); break;
      case Op::abs: stack[top - 1] = std::abs(stack[top - 1]); break;
    }
  }
  return stack[0];
}

const std::string& Expression::source() const { return program_->source; }

BivariateFn Expression::as_function() const {
  return [e = *this](double x, double y) { return e(x, y); };
}

}  // namespace fsk
