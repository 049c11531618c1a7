#include <cctype>
#include <charconv>
#include <stdexcept>
#include <string>

#include "anderson/measures.hpp"

namespace anderson {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Measure parse() {
    Measure m = measure();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters");
    return m;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("measure '" + std::string(text_) +
                                "': " + what + " at offset " +
                                std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) {
      fail(std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string identifier() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    if (start == pos_) fail("expected a measure name");
    return std::string(text_.substr(start, pos_ - start));
  }

  double number() {
    skip_ws();
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    if (first != last && *first == '+') ++first;
    double value = 0.0;
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc()) fail("expected a number");
    pos_ = static_cast<std::size_t>(res.ptr - text_.data());
    return value;
  }

  std::vector<double> list() {
    expect('[');
    std::vector<double> out;
    if (accept(']')) return out;
    do {
      out.push_back(number());
    } while (accept(','));
    expect(']');
    return out;
  }

  Measure measure() {
    const std::string name = identifier();
    expect('(');
    if (name == "uniform") {
      const double a = number();
      expect(',');
      const double b = number();
      expect(')');
      return Measure::uniform(a, b);
    }
    if (name == "cantor") {
      int depth = 40;
      if (!accept(')')) {
        const double k = number();
        if (k != static_cast<int>(k)) fail("cantor depth must be an integer");
        depth = static_cast<int>(k);
        expect(')');
      }
      return Measure::cantor(depth);
    }
    if (name == "pwc") {
      auto breaks = list();
      expect(',');
      auto heights = list();
      expect(')');
      return Measure::piecewise_constant(std::move(breaks), std::move(heights));
    }
    if (name == "gauss") {
      const double m = number();
      expect(',');
      const double s = number();
      expect(')');
      return Measure::gaussian(m, s);
    }
    if (name == "trunc") {
      Measure inner = measure();
      expect(',');
      const double cutoff = number();
      expect(')');
      return truncate(inner, cutoff);
    }
    fail("unknown measure '" + name +
         "' (expected uniform, cantor, pwc, gauss or trunc)");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Measure parse_measure(std::string_view text) { return Parser(text).parse(); }

}  // namespace anderson
