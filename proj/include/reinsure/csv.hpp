#ifndef REINSURE_CSV_HPP
#define REINSURE_CSV_HPP

#include <cstdio>
#include <ostream>
#include <string>
#include <type_traits>

namespace reinsure::csv {

/// 12 significant digits, '.' separator; negative zero prints as 0.
inline std::string number(double v) {
  if (v == 0.0) v = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string boolean(bool v) { return v ? "true" : "false"; }

// Writes fields joined by ',' and terminated by a bare LF.
class RowWriter {
 public:
  explicit RowWriter(std::ostream& os) : os_(os) {}

  template <class... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((emit(fields, first)), ...);
    os_ << '\n';
  }

 private:
  void emit(const std::string& s, bool& first) { sep(first), os_ << s; }
  void emit(const char* s, bool& first) { sep(first), os_ << s; }
  void emit(double v, bool& first) { sep(first), os_ << number(v); }
  template <class Int>
  void emit(Int v, bool& first) requires std::is_integral_v<Int> {
    sep(first), os_ << v;
  }
  void sep(bool& first) {
    if (!first) os_ << ',';
    first = false;
  }

  std::ostream& os_;
};

}  // namespace reinsure::csv

#endif  // REINSURE_CSV_HPP
