#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

#include "engelgrad/poly.hpp"

namespace engelgrad {

namespace {

// Recursive-descent reader for
//   poly   := [sign] term (sign term)*
//   term   := factor (('*' factor) | ('/' number))*
//   factor := number | var ['^' int]
class Reader {
 public:
  explicit Reader(std::string_view s) : s_(s) {}

  Poly4 poly() {
    skip();
    if (eof()) throw ParseError("empty polynomial", pos_);
    std::vector<Monomial> terms;
    double sign = 1.0;
    if (peek() == '+' || peek() == '-') {
      sign = take() == '-' ? -1.0 : 1.0;
    }
    terms.push_back(term(sign));
    while (true) {
      skip();
      if (eof()) break;
      char c = peek();
      if (c != '+' && c != '-') throw ParseError(std::string("unexpected '") + c + "'", pos_);
      take();
      terms.push_back(term(c == '-' ? -1.0 : 1.0));
    }
    return Poly4::from_terms(std::move(terms));
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  char take() { return s_[pos_++]; }
  void skip() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  Monomial term(double sign) {
    Monomial m{{0, 0, 0, 0}, sign};
    factor(m);
    while (true) {
      skip();
      if (eof()) break;
      if (peek() == '*') {
        take();
        factor(m);
      } else if (peek() == '/') {
        take();
        skip();
        double d = number();
        if (d == 0.0) throw ParseError("division by zero", pos_);
        m.coef /= d;
      } else {
        break;
      }
    }
    return m;
  }

  void factor(Monomial& m) {
    skip();
    if (eof()) throw ParseError("expected a number or variable", pos_);
    char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      m.coef *= number();
      return;
    }
    if (!std::isalpha(static_cast<unsigned char>(c))) {
      throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }
    std::size_t start = pos_;
    while (!eof() && std::isalnum(static_cast<unsigned char>(peek()))) ++pos_;
    std::string_view name = s_.substr(start, pos_ - start);
    if (name.size() != 2 || name[0] != 'x' || name[1] < '1' || name[1] > '4') {
      throw ParseError("unknown variable '" + std::string(name) + "'", start);
    }
    int k = name[1] - '1';
    int power = 1;
    skip();
    if (!eof() && peek() == '^') {
      take();
      skip();
      std::size_t p0 = pos_;
      while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      if (p0 == pos_) throw ParseError("expected integer exponent", pos_);
      power = std::stoi(std::string(s_.substr(p0, pos_ - p0)));
    }
    m.exps[k] += power;
  }

  double number() {
    double v = 0.0;
    auto first = s_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, s_.data() + s_.size(), v);
    if (ec != std::errc() || ptr == first) throw ParseError("malformed number", pos_);
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }
};

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

Poly4 parse_poly(std::string_view text) { return Reader(text).poly(); }

std::string format_poly(const Poly4& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : p.terms()) {
    double c = t.coef;
    if (first) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    first = false;
    double a = std::abs(c);
    bool constant = total_degree(t.exps) == 0;
    bool need_star = false;
    if (constant || a != 1.0) {
      out += shortest(a);
      need_star = true;
    }
    for (int k = 0; k < 4; ++k) {
      if (t.exps[k] == 0) continue;
      if (need_star) out += "*";
      out += "x";
      out += static_cast<char>('1' + k);
      if (t.exps[k] >= 2) out += "^" + std::to_string(t.exps[k]);
      need_star = true;
    }
  }
  return out;
}

}  // namespace engelgrad
