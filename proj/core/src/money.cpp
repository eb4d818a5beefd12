#include "railplan/money.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace railplan {

Money Money::fromDouble(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("money value must be finite");
  return fromTicks(static_cast<std::int64_t>(std::llround(value * kScale)));
}

Money Money::parse(const std::string& text) {
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') throw std::invalid_argument("not a money value: " + text);
  return fromDouble(v);
}

std::string Money::toString() const {
  std::int64_t a = ticks_ < 0 ? -ticks_ : ticks_;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%lld.%04lld", ticks_ < 0 ? "-" : "",
                static_cast<long long>(a / kScale), static_cast<long long>(a % kScale));
  return buf;
}

}  // namespace railplan
