#include "ufep/run_log.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace ufep {

std::string RunLog::num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void RunLog::emit(std::string line) {
  if (sink_ != nullptr) *sink_ << line << '\n';
  lines_.push_back(std::move(line));
}

void RunLog::event(const std::string& kind, const Fields& fields) {
  std::string line = kind;
  for (const auto& [k, v] : fields) line += ' ' + k + '=' + v;
  emit(std::move(line));
}

void RunLog::warn(const std::string& kind, const std::string& message, const Fields& fields) {
  std::string line = "warning " + kind;
  for (const auto& [k, v] : fields) line += ' ' + k + '=' + v;
  line += " msg=\"" + message + '"';
  emit(std::move(line));
}

std::size_t RunLog::count(const std::string& kind) const {
  const std::string head = kind + ' ';
  return static_cast<std::size_t>(std::count_if(lines_.begin(), lines_.end(), [&](const std::string& l) {
    return l == kind || l.compare(0, head.size(), head) == 0;
  }));
}

std::size_t RunLog::warning_count(const std::string& kind) const { return count("warning " + kind); }

}  // namespace ufep
