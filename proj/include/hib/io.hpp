#ifndef HIB_IO_HPP
#define HIB_IO_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace hib {

inline constexpr int kJsonDigits = 17;
inline constexpr int kCsvDigits = 10;

/// printf %.{digits}g; non-finite values become "nan", "inf" or "-inf".
std::string format_number(double x, int digits);

/// Streaming JSON writer. Numbers are always printed with kJsonDigits
/// significant digits so output bytes are stable; non-finite numbers are
/// written as null.
class JsonWriter {
 public:
  explicit JsonWriter(std::ostream& os) : os_(os) {}

  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& name);
  JsonWriter& value(double x);
  JsonWriter& value(long x);
  JsonWriter& value(int x) { return value(static_cast<long>(x)); }
  JsonWriter& value(std::uint64_t x);
  JsonWriter& value(bool x);
  JsonWriter& value(const std::string& x);
  JsonWriter& value(const char* x) { return value(std::string(x)); }

  template <typename T>
  JsonWriter& field(const std::string& name, const T& x) {
    key(name);
    return value(x);
  }

  /// Terminates the document with a newline.
  void finish();

 private:
  void before_value();
  void newline();

  struct Level {
    bool is_object;
    bool empty;
  };
  std::ostream& os_;
  std::vector<Level> stack_;
  bool after_key_ = false;
};

/// JSON string literal with escapes.
std::string json_quote(const std::string& s);

/// Splits one CSV line on commas. Double-quoted fields may contain commas
/// and doubled quotes. Surrounding whitespace of unquoted fields is trimmed.
std::vector<std::string> split_csv_line(const std::string& line);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(const std::string& s);

}  // namespace hib

#endif  // HIB_IO_HPP
