#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pdbench {

enum class Provenance { fitting, noised };

const char* to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

struct Trace {
  std::string case_id;
  std::vector<std::string> events;
  Provenance provenance = Provenance::fitting;

  bool operator==(const Trace&) const = default;
};

/// Ordered collection of traces; the alphabet is kept equal to the union of
/// event labels.
class EventLog {
 public:
  EventLog() = default;
  explicit EventLog(std::vector<Trace> traces);

  const std::vector<Trace>& traces() const noexcept { return traces_; }
  const std::set<std::string>& alphabet() const noexcept { return alphabet_; }
  std::size_t size() const noexcept { return traces_.size(); }
  bool empty() const noexcept { return traces_.empty(); }
  const Trace& operator[](std::size_t i) const { return traces_.at(i); }

  /// Distinct event sequences.
  std::set<std::vector<std::string>> variants() const;

  /// Log restricted to the given trace indices, in the given order.
  EventLog subset(const std::vector<std::size_t>& indices) const;

 private:
  std::vector<Trace> traces_;
  std::set<std::string> alphabet_;
};

/// Line-delimited JSON: one `{"case_id", "provenance", "events"}` record per
/// line.
std::string to_jsonl(const EventLog& log);
EventLog parse_jsonl(std::string_view text);

/// Minimal XES export (trace and event `concept:name` only).
std::string to_xes(const EventLog& log);

}  // namespace pdbench
