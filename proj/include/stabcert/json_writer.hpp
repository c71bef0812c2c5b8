#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stabcert/linalg.hpp"

namespace stabcert {

/// "%.17g"; NaN and infinities become "nan", "inf", "-inf".
std::string format_double(double v);

/// Streaming JSON writer with two-space indentation.
///
/// Doubles are written with 17 significant digits; non-finite doubles are
/// written as null.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& k);

  JsonWriter& value(double v);
  JsonWriter& value(std::int64_t v);
  JsonWriter& value(int v) { return value(static_cast<std::int64_t>(v)); }
  JsonWriter& value(std::size_t v) { return value(static_cast<std::int64_t>(v)); }
  JsonWriter& value(bool v);
  JsonWriter& value(const std::string& v);
  JsonWriter& value(const char* v) { return value(std::string(v)); }
  JsonWriter& value(const Vector& v);
  JsonWriter& value(const Matrix& m);
  JsonWriter& null();

  template <typename T>
  JsonWriter& field(const std::string& k, const T& v) {
    key(k);
    return value(v);
  }

  const std::string& str() const { return out_; }

 private:
  void before_value();
  void newline();

  struct Level {
    bool is_object;
    bool empty;
  };
  std::string out_;
  std::vector<Level> stack_;
  bool after_key_ = false;
};

std::string json_escape(const std::string& s);

}  // namespace stabcert
