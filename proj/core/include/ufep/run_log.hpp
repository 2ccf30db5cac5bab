#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace ufep {

/// Structured run log. Each entry is one line "kind key=value ...";
/// warnings are prefixed with "warning".
class RunLog {
 public:
  using Fields = std::vector<std::pair<std::string, std::string>>;

  explicit RunLog(std::ostream* sink = nullptr) : sink_(sink) {}

  void event(const std::string& kind, const Fields& fields = {});
  void warn(const std::string& kind, const std::string& message, const Fields& fields = {});

  [[nodiscard]] const std::vector<std::string>& lines() const { return lines_; }
  [[nodiscard]] std::size_t count(const std::string& kind) const;
  [[nodiscard]] std::size_t warning_count(const std::string& kind) const;

  static std::string num(double v);
  static std::string num(long v) { return std::to_string(v); }
  static std::string num(int v) { return std::to_string(v); }
  static std::string num(std::size_t v) { return std::to_string(v); }

 private:
  void emit(std::string line);

  std::ostream* sink_;
  std::vector<std::string> lines_;
};

}  // namespace ufep
