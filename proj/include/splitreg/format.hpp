#pragma once

#include <charconv>
#include <string>
#include <system_error>

#include "splitreg/errors.hpp"

namespace splitreg {

/// Shortest decimal string that round-trips to the same double (to_chars
/// shortest form). Used for all numeric output so files reload bit-exactly.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

/// Strict double parser: the whole token must be consumed.
inline double parse_double(const std::string& token, const std::string& context) {
  double v = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw ConfigError(context + ": '" + token + "' is not a number");
  return v;
}

inline long long parse_int(const std::string& token, const std::string& context) {
  long long v = 0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw ConfigError(context + ": '" + token + "' is not an integer");
  return v;
}

}  // namespace splitreg
