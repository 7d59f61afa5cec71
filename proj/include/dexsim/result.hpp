#pragma once

#include <string>
#include <utility>
#include <variant>

namespace dexsim {

struct Error {
  std::string message;
};

// Minimal expected-style result. Holds either a value or an error; the
// error type defaults to Error but modules substitute their own enums or
// structs where callers need to branch on the failure kind.
template <typename T, typename E = Error>
class Expected {
 public:
  Expected(T value) : v_(std::in_place_index<0>, std::move(value)) {}
  Expected(E error) : v_(std::in_place_index<1>, std::move(error)) {}

  bool ok() const { return v_.index() == 0; }
  explicit operator bool() const { return ok(); }

  T& value() & { return std::get<0>(v_); }
  const T& value() const& { return std::get<0>(v_); }
  T&& take() && { return std::get<0>(std::move(v_)); }

  E& error() & { return std::get<1>(v_); }
  const E& error() const& { return std::get<1>(v_); }

  const T& value_or(const T& fallback) const& { return ok() ? value() : fallback; }

 private:
  std::variant<T, E> v_;
};

// Operations with no payload report success as Status.
template <typename E = Error>
using Status = Expected<std::monostate, E>;

template <typename E = Error>
Status<E> ok_status() {
  return Status<E>(std::monostate{});
}

}  // namespace dexsim
