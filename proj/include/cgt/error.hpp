#pragma once

#include <stdexcept>
#include <string>

namespace cgt {

enum class errc {
  parse,
  undeclared_generator,
  unmapped_generator,
  alphabet_collision,
  alphabet_error,
  bad_schema,
  no_defining_relator,
  self_referential_definition,
  not_a_member,
  not_small_cancellation,
  loop_exits_ball,
  invalid_digit,
  constraint,
  overflow,
  io,
};

class error : public std::runtime_error {
public:
  error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

} // namespace cgt
