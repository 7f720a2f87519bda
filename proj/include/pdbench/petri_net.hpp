#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pdbench {

using PlaceId = std::size_t;
using TransitionId = std::size_t;

/// Token count per place, indexed by PlaceId.
using Marking = std::vector<std::uint32_t>;

struct Place {
  std::string name;
};

struct Transition {
  std::string name;
  std::optional<std::string> label;  // nullopt = silent
  std::vector<PlaceId> inputs;       // sorted, unique
  std::vector<PlaceId> outputs;      // sorted, unique

  bool silent() const noexcept { return !label.has_value(); }
};

/// Labeled place/transition net with unit arc weights and explicit initial
/// and final markings. Immutable once built; use PetriNetBuilder.
class PetriNet {
 public:
  PetriNet() = default;
  PetriNet(std::vector<Place> places, std::vector<Transition> transitions,
           Marking initial, Marking final);

  const std::vector<Place>& places() const noexcept { return places_; }
  const std::vector<Transition>& transitions() const noexcept { return transitions_; }
  const Marking& initial_marking() const noexcept { return initial_; }
  const Marking& final_marking() const noexcept { return final_; }

  std::size_t silent_count() const;
  /// Distinct visible labels, sorted.
  std::vector<std::string> labels() const;

  /// Throws InvalidNet on empty markings, transitions without an input or an
  /// output place, or marking sizes that disagree with the place count.
  void validate() const;
  bool valid() const noexcept;

 private:
  std::vector<Place> places_;
  std::vector<Transition> transitions_;
  Marking initial_;
  Marking final_;
};

class PetriNetBuilder {
 public:
  PlaceId add_place(std::string name = {});
  TransitionId add_transition(std::optional<std::string> label, std::string name = {});
  void add_input(TransitionId t, PlaceId p);   // p -> t
  void add_output(TransitionId t, PlaceId p);  // t -> p
  void mark_initial(PlaceId p, std::uint32_t tokens = 1);
  void mark_final(PlaceId p, std::uint32_t tokens = 1);

  std::size_t place_count() const noexcept { return places_.size(); }
  PetriNet build() const;

 private:
  std::vector<Place> places_;
  std::vector<Transition> transitions_;
  std::vector<std::pair<PlaceId, std::uint32_t>> initial_;
  std::vector<std::pair<PlaceId, std::uint32_t>> final_;
};

/// PNML subset: places, transitions (silent ones tagged with the
/// `$invisible$` tool-specific marker), arcs, initial marking and a
/// `finalmarkings` section.
std::string to_pnml(const PetriNet& net, std::string_view id = "net");
PetriNet parse_pnml(std::string_view xml);

}  // namespace pdbench
