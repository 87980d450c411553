#pragma once

// Godel numbering of raw (not necessarily reduced) words over {a,b,a^-1,b^-1}:
// a -> 1, b -> 2, a^-1 -> 3, b^-1 -> 4, extended letterwise by decimal
// concatenation; the empty word encodes 0. Codes are kept as digit strings so
// they never overflow; numeric comparisons are digit-wise.

#include <string>

#include "cgt/error.hpp"
#include "cgt/word.hpp"

namespace cgt {

class GodelCode {
public:
  GodelCode() = default; // zero
  explicit GodelCode(std::string digits) : digits_(std::move(digits)) {
    for (char c : digits_)
      if (c < '1' || c > '4') fail(errc::invalid_digit, "godel digit out of {1,2,3,4}");
  }

  static GodelCode parse(const std::string& s) {
    if (s == "0") return GodelCode();
    if (s.empty()) fail(errc::invalid_digit, "empty godel code literal");
    return GodelCode(s);
  }

  bool is_zero() const { return digits_.empty(); }
  const std::string& digits() const { return digits_; }
  std::string str() const { return digits_.empty() ? "0" : digits_; }

  // Digit-wise numeric order: shorter strings are smaller.
  bool operator<(const GodelCode& o) const {
    if (digits_.size() != o.digits_.size()) return digits_.size() < o.digits_.size();
    return digits_ < o.digits_;
  }
  bool operator==(const GodelCode&) const = default;

  bool fits_int64() const { return digits_.size() <= 18; }
  long long to_int64() const {
    if (!fits_int64()) fail(errc::overflow, "godel code " + str() + " exceeds 64 bits");
    long long v = 0;
    for (char c : digits_) v = v * 10 + (c - '0');
    return v;
  }

  static GodelCode concat(const GodelCode& a, const GodelCode& b) {
    return a.digits_.empty() && b.digits_.empty() ? GodelCode() : GodelCode(a.digits_ + b.digits_);
  }

private:
  std::string digits_;
};

struct GodelAlphabet {
  GenId a;
  GenId b;
};

inline GodelCode godel_encode(const Word& w, const GodelAlphabet& ab) {
  std::string digits;
  digits.reserve(w.size());
  for (Lit l : w) {
    GenId g = lit_gen(l);
    int s = lit_sign(l);
    if (g == ab.a)
      digits += (s > 0 ? '1' : '3');
    else if (g == ab.b)
      digits += (s > 0 ? '2' : '4');
    else
      fail(errc::alphabet_error, "godel encode: letter " + gen_display(g) + " is not a or b");
  }
  return w.empty() ? GodelCode() : GodelCode(std::move(digits));
}

// Letterwise inverse of godel_encode; no free reduction is applied.
inline Word godel_decode(const GodelCode& c, const GodelAlphabet& ab) {
  Word w;
  for (char d : c.digits()) {
    switch (d) {
      case '1': w.push_back(make_lit(ab.a, 1)); break;
      case '2': w.push_back(make_lit(ab.b, 1)); break;
      case '3': w.push_back(make_lit(ab.a, -1)); break;
      case '4': w.push_back(make_lit(ab.b, -1)); break;
      default: fail(errc::invalid_digit, "godel digit out of {1,2,3,4}");
    }
  }
  return w;
}

} // namespace cgt
