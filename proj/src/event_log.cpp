#include "pdbench/event_log.hpp"

#include <sstream>

#include "json.hpp"

#include "pdbench/errors.hpp"

namespace pdbench {

const char* to_string(Provenance p) {
  return p == Provenance::fitting ? "fitting" : "noised";
}

Provenance provenance_from_string(std::string_view s) {
  if (s == "fitting") return Provenance::fitting;
  if (s == "noised") return Provenance::noised;
  throw ParseError("unknown provenance '" + std::string(s) + "'");
}

EventLog::EventLog(std::vector<Trace> traces) : traces_(std::move(traces)) {
  for (const auto& t : traces_) alphabet_.insert(t.events.begin(), t.events.end());
}

std::set<std::vector<std::string>> EventLog::variants() const {
  std::set<std::vector<std::string>> out;
  for (const auto& t : traces_) out.insert(t.events);
  return out;
}

EventLog EventLog::subset(const std::vector<std::size_t>& indices) const {
  std::vector<Trace> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(traces_.at(i));
  return EventLog(std::move(out));
}

std::string to_jsonl(const EventLog& log) {
  std::string out;
  for (const auto& t : log.traces()) {
    nlohmann::ordered_json j;
    j["case_id"] = t.case_id;
    j["provenance"] = to_string(t.provenance);
    j["events"] = t.events;
    out += j.dump();
    out += '\n';
  }
  return out;
}

EventLog parse_jsonl(std::string_view text) {
  std::vector<Trace> traces;
  std::istringstream is{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      Trace t;
      t.case_id = j.at("case_id").get<std::string>();
      t.provenance = provenance_from_string(j.value("provenance", "fitting"));
      t.events = j.at("events").get<std::vector<std::string>>();
      traces.push_back(std::move(t));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("log line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return EventLog(std::move(traces));
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string to_xes(const EventLog& log) {
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<log xes.version=\"1.0\" xmlns=\"http://www.xes-standard.org/\">\n"
      "  <extension name=\"Concept\" prefix=\"concept\" "
      "uri=\"http://www.xes-standard.org/concept.xesext\"/>\n";
  for (const auto& t : log.traces()) {
    out += "  <trace>\n    <string key=\"concept:name\" value=\"" + xml_escape(t.case_id) +
           "\"/>\n";
    for (const auto& e : t.events)
      out += "    <event><string key=\"concept:name\" value=\"" + xml_escape(e) +
             "\"/></event>\n";
    out += "  </trace>\n";
  }
  out += "</log>\n";
  return out;
}

}  // namespace pdbench
