#pragma once

#include <cstdint>
#include <string>

#include "quav/diag.hpp"

namespace quav {

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw EvalError("integer overflow in +");
  return r;
}

inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw EvalError("integer overflow in -");
  return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw EvalError("integer overflow in *");
  return r;
}

// Euclidean division (the SMT-LIB `div`): remainder is always in [0, |d|).
inline std::int64_t euclid_div(std::int64_t a, std::int64_t d) {
  if (d == 0) throw EvalError("division by zero");
  std::int64_t q = a / d, r = a % d;
  if (r < 0) q += (d > 0 ? -1 : 1);
  return q;
}

// Z extended with both infinities; the value space of resource functions.
// min/max are total under the order -inf < finite < +inf; addition is defined
// except +inf + -inf, which is a checked error.
class ExtInt {
 public:
  constexpr ExtInt() = default;
  static constexpr ExtInt finite(std::int64_t v) { return ExtInt(Tag::Fin, v); }
  static constexpr ExtInt pos_inf() { return ExtInt(Tag::PosInf, 0); }
  static constexpr ExtInt neg_inf() { return ExtInt(Tag::NegInf, 0); }

  constexpr bool is_finite() const { return tag_ == Tag::Fin; }
  constexpr bool is_pos_inf() const { return tag_ == Tag::PosInf; }
  constexpr bool is_neg_inf() const { return tag_ == Tag::NegInf; }

  std::int64_t value() const {
    if (!is_finite()) throw EvalError("value() on infinite ExtInt");
    return v_;
  }

  friend constexpr bool operator==(ExtInt a, ExtInt b) {
    return a.tag_ == b.tag_ && (a.tag_ != Tag::Fin || a.v_ == b.v_);
  }
  friend constexpr bool operator!=(ExtInt a, ExtInt b) { return !(a == b); }
  friend constexpr bool operator<(ExtInt a, ExtInt b) {
    if (a.tag_ != b.tag_) return rank(a.tag_) < rank(b.tag_);
    return a.tag_ == Tag::Fin && a.v_ < b.v_;
  }
  friend constexpr bool operator<=(ExtInt a, ExtInt b) { return a < b || a == b; }
  friend constexpr bool operator>(ExtInt a, ExtInt b) { return b < a; }
  friend constexpr bool operator>=(ExtInt a, ExtInt b) { return b <= a; }

  friend ExtInt min(ExtInt a, ExtInt b) { return a < b ? a : b; }
  friend ExtInt max(ExtInt a, ExtInt b) { return a < b ? b : a; }

  friend ExtInt operator+(ExtInt a, ExtInt b) {
    if (a.is_finite() && b.is_finite())
      return finite(checked_add(a.v_, b.v_));
    if ((a.is_pos_inf() && b.is_neg_inf()) || (a.is_neg_inf() && b.is_pos_inf()))
      throw EvalError("undefined sum +inf + -inf");
    return a.is_finite() ? b : a;
  }

  // Subtract a finite amount; infinities absorb.
  ExtInt minus(std::int64_t f) const {
    if (!is_finite()) return *this;
    return finite(checked_sub(v_, f));
  }
  ExtInt plus(std::int64_t f) const {
    if (!is_finite()) return *this;
    return finite(checked_add(v_, f));
  }

  std::string str() const {
    if (is_pos_inf()) return "oo";
    if (is_neg_inf()) return "-oo";
    return std::to_string(v_);
  }

 private:
  enum class Tag : std::uint8_t { NegInf, Fin, PosInf };
  constexpr ExtInt(Tag t, std::int64_t v) : tag_(t), v_(v) {}
  static constexpr int rank(Tag t) { return static_cast<int>(t); }
  Tag tag_ = Tag::Fin;
  std::int64_t v_ = 0;
};

}  // namespace quav
