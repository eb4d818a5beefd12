#pragma once

#include <cstdint>
#include <compare>
#include <string>

namespace railplan {

// Fixed-point amount with four fractional digits.
class Money {
 public:
  static constexpr std::int64_t kScale = 10000;

  constexpr Money() = default;
  static constexpr Money fromTicks(std::int64_t ticks) {
    Money m;
    m.ticks_ = ticks;
    return m;
  }
  static Money fromDouble(double value);
  static Money parse(const std::string& text);

  constexpr std::int64_t ticks() const { return ticks_; }
  double toDouble() const { return static_cast<double>(ticks_) / kScale; }
  std::string toString() const;

  constexpr Money operator+(Money o) const { return fromTicks(ticks_ + o.ticks_); }
  constexpr Money operator-(Money o) const { return fromTicks(ticks_ - o.ticks_); }
  constexpr Money& operator+=(Money o) {
    ticks_ += o.ticks_;
    return *this;
  }
  constexpr Money& operator-=(Money o) {
    ticks_ -= o.ticks_;
    return *this;
  }
  constexpr Money operator*(std::int64_t n) const { return fromTicks(ticks_ * n); }

  constexpr auto operator<=>(const Money&) const = default;

 private:
  std::int64_t ticks_ = 0;
};

constexpr Money operator*(std::int64_t n, Money m) { return m * n; }

}  // namespace railplan
