#include "pdbench/petri_net.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "pdbench/errors.hpp"

namespace pdbench {

PetriNet::PetriNet(std::vector<Place> places, std::vector<Transition> transitions,
                   Marking initial, Marking final)
    : places_(std::move(places)),
      transitions_(std::move(transitions)),
      initial_(std::move(initial)),
      final_(std::move(final)) {}

std::size_t PetriNet::silent_count() const {
  return static_cast<std::size_t>(std::count_if(
      transitions_.begin(), transitions_.end(), [](const Transition& t) { return t.silent(); }));
}

std::vector<std::string> PetriNet::labels() const {
  std::set<std::string> out;
  for (const auto& t : transitions_)
    if (t.label) out.insert(*t.label);
  return {out.begin(), out.end()};
}

void PetriNet::validate() const {
  if (initial_.size() != places_.size() || final_.size() != places_.size())
    throw InvalidNet("marking size does not match place count");
  auto empty = [](const Marking& m) {
    return std::all_of(m.begin(), m.end(), [](std::uint32_t c) { return c == 0; });
  };
  if (empty(initial_)) throw InvalidNet("empty initial marking");
  if (empty(final_)) throw InvalidNet("empty final marking");
  for (const auto& t : transitions_) {
    if (t.inputs.empty()) throw InvalidNet("transition " + t.name + " has no input place");
    if (t.outputs.empty()) throw InvalidNet("transition " + t.name + " has no output place");
    for (PlaceId p : t.inputs)
      if (p >= places_.size()) throw InvalidNet("dangling arc at " + t.name);
    for (PlaceId p : t.outputs)
      if (p >= places_.size()) throw InvalidNet("dangling arc at " + t.name);
  }
}

bool PetriNet::valid() const noexcept {
  try {
    validate();
    return true;
  } catch (const InvalidNet&) {
    return false;
  }
}

PlaceId PetriNetBuilder::add_place(std::string name) {
  PlaceId id = places_.size();
  if (name.empty()) name = "p" + std::to_string(id);
  places_.push_back({std::move(name)});
  return id;
}

TransitionId PetriNetBuilder::add_transition(std::optional<std::string> label,
                                             std::string name) {
  TransitionId id = transitions_.size();
  if (name.empty()) name = (label ? "t" : "tau") + std::to_string(id);
  transitions_.push_back({std::move(name), std::move(label), {}, {}});
  return id;
}

void PetriNetBuilder::add_input(TransitionId t, PlaceId p) {
  transitions_.at(t).inputs.push_back(p);
}

void PetriNetBuilder::add_output(TransitionId t, PlaceId p) {
  transitions_.at(t).outputs.push_back(p);
}

void PetriNetBuilder::mark_initial(PlaceId p, std::uint32_t tokens) {
  initial_.emplace_back(p, tokens);
}

void PetriNetBuilder::mark_final(PlaceId p, std::uint32_t tokens) {
  final_.emplace_back(p, tokens);
}

PetriNet PetriNetBuilder::build() const {
  auto transitions = transitions_;
  for (auto& t : transitions) {
    for (auto* arcs : {&t.inputs, &t.outputs}) {
      std::sort(arcs->begin(), arcs->end());
      arcs->erase(std::unique(arcs->begin(), arcs->end()), arcs->end());
    }
  }
  Marking initial(places_.size(), 0), final(places_.size(), 0);
  for (auto [p, n] : initial_) initial.at(p) += n;
  for (auto [p, n] : final_) final.at(p) += n;
  return PetriNet(places_, std::move(transitions), std::move(initial), std::move(final));
}

// ---------------------------------------------------------------------------
// PNML

namespace pt = boost::property_tree;

namespace {

constexpr const char* kInvisible = "$invisible$";

void add_text(pt::ptree& node, const std::string& key, const std::string& text) {
  node.add(key + ".text", text);
}

}  // namespace

std::string to_pnml(const PetriNet& net, std::string_view id) {
  pt::ptree root;
  pt::ptree& pnml = root.add_child("pnml", pt::ptree{});
  pt::ptree& n = pnml.add_child("net", pt::ptree{});
  n.put("<xmlattr>.id", std::string(id));
  n.put("<xmlattr>.type", "http://www.pnml.org/version-2009/grammar/pnmlcoremodel");
  pt::ptree& page = n.add_child("page", pt::ptree{});
  page.put("<xmlattr>.id", "page0");

  const auto& places = net.places();
  for (PlaceId p = 0; p < places.size(); ++p) {
    pt::ptree& pl = page.add_child("place", pt::ptree{});
    pl.put("<xmlattr>.id", places[p].name);
    add_text(pl, "name", places[p].name);
    if (net.initial_marking()[p] > 0)
      add_text(pl, "initialMarking", std::to_string(net.initial_marking()[p]));
  }
  const auto& transitions = net.transitions();
  for (const auto& t : transitions) {
    pt::ptree& tr = page.add_child("transition", pt::ptree{});
    tr.put("<xmlattr>.id", t.name);
    add_text(tr, "name", t.label ? *t.label : t.name);
    if (t.silent()) {
      pt::ptree& ts = tr.add_child("toolspecific", pt::ptree{});
      ts.put("<xmlattr>.tool", "ProM");
      ts.put("<xmlattr>.version", "6.4");
      ts.put("<xmlattr>.activity", kInvisible);
    }
  }
  std::size_t arc = 0;
  for (const auto& t : transitions) {
    for (PlaceId p : t.inputs) {
      pt::ptree& a = page.add_child("arc", pt::ptree{});
      a.put("<xmlattr>.id", "a" + std::to_string(arc++));
      a.put("<xmlattr>.source", places[p].name);
      a.put("<xmlattr>.target", t.name);
    }
    for (PlaceId p : t.outputs) {
      pt::ptree& a = page.add_child("arc", pt::ptree{});
      a.put("<xmlattr>.id", "a" + std::to_string(arc++));
      a.put("<xmlattr>.source", t.name);
      a.put("<xmlattr>.target", places[p].name);
    }
  }
  pt::ptree& fm = n.add_child("finalmarkings", pt::ptree{}).add_child("marking", pt::ptree{});
  for (PlaceId p = 0; p < places.size(); ++p) {
    if (net.final_marking()[p] == 0) continue;
    pt::ptree& e = fm.add_child("place", pt::ptree{});
    e.put("<xmlattr>.idref", places[p].name);
    e.put("text", std::to_string(net.final_marking()[p]));
  }

  std::ostringstream os;
  pt::write_xml(os, root, pt::xml_writer_make_settings<std::string>(' ', 2));
  return os.str();
}

PetriNet parse_pnml(std::string_view xml) {
  pt::ptree root;
  try {
    std::istringstream is{std::string(xml)};
    pt::read_xml(is, root, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(std::string("PNML: ") + e.what());
  }
  const pt::ptree* net = nullptr;
  if (auto p = root.get_child_optional("pnml.net")) net = &*p;
  if (!net) throw ParseError("PNML: missing pnml/net");

  PetriNetBuilder b;
  std::map<std::string, PlaceId> place_ids;
  std::map<std::string, TransitionId> transition_ids;
  std::vector<const pt::ptree*> arcs;

  auto visit_page = [&](const pt::ptree& page) {
    for (const auto& [tag, child] : page) {
      if (tag == "place") {
        std::string id = child.get<std::string>("<xmlattr>.id");
        PlaceId p = b.add_place(id);
        place_ids.emplace(id, p);
        if (auto m = child.get_optional<std::uint32_t>("initialMarking.text"))
          if (*m > 0) b.mark_initial(p, *m);
      } else if (tag == "transition") {
        std::string id = child.get<std::string>("<xmlattr>.id");
        std::string name = child.get<std::string>("name.text", id);
        bool silent = false;
        if (auto ts = child.get_child_optional("toolspecific"))
          silent = ts->get<std::string>("<xmlattr>.activity", "") == kInvisible;
        TransitionId t =
            b.add_transition(silent ? std::nullopt : std::optional<std::string>(name), id);
        transition_ids.emplace(id, t);
      } else if (tag == "arc") {
        arcs.push_back(&child);
      }
    }
  };
  bool paged = false;
  for (const auto& [tag, child] : *net) {
    if (tag == "page") {
      visit_page(child);
      paged = true;
    }
  }
  if (!paged) visit_page(*net);

  for (const pt::ptree* a : arcs) {
    std::string src = a->get<std::string>("<xmlattr>.source");
    std::string tgt = a->get<std::string>("<xmlattr>.target");
    if (auto p = place_ids.find(src); p != place_ids.end()) {
      auto t = transition_ids.find(tgt);
      if (t == transition_ids.end()) throw ParseError("PNML: arc to unknown node " + tgt);
      b.add_input(t->second, p->second);
    } else if (auto t = transition_ids.find(src); t != transition_ids.end()) {
      auto q = place_ids.find(tgt);
      if (q == place_ids.end()) throw ParseError("PNML: arc to unknown node " + tgt);
      b.add_output(t->second, q->second);
    } else {
      throw ParseError("PNML: arc from unknown node " + src);
    }
  }
  if (auto fms = net->get_child_optional("finalmarkings")) {
    if (auto m = fms->get_child_optional("marking")) {
      for (const auto& [tag, child] : *m) {
        if (tag != "place") continue;
        std::string ref = child.get<std::string>("<xmlattr>.idref");
        auto p = place_ids.find(ref);
        if (p == place_ids.end()) throw ParseError("PNML: final marking of unknown place " + ref);
        auto n = child.get<std::uint32_t>("text", 0);
        if (n > 0) b.mark_final(p->second, n);
      }
    }
  }
  return b.build();
}

}  // namespace pdbench
