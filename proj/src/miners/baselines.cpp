#include "pdbench/miners.hpp"

namespace pdbench {

PetriNet miner_flower(const EventLog& training) {
  PetriNetBuilder b;
  PlaceId start = b.add_place("start");
  PlaceId centre = b.add_place("centre");
  PlaceId end = b.add_place("end");
  TransitionId enter = b.add_transition(std::nullopt, "tau_start");
  b.add_input(enter, start);
  b.add_output(enter, centre);
  for (const auto& a : training.alphabet()) {
    TransitionId t = b.add_transition(a);
    b.add_input(t, centre);
    b.add_output(t, centre);
  }
  TransitionId leave = b.add_transition(std::nullopt, "tau_end");
  b.add_input(leave, centre);
  b.add_output(leave, end);
  b.mark_initial(start);
  b.mark_final(end);
  return b.build();
}

PetriNet miner_tracelog(const EventLog& training) {
  PetriNetBuilder b;
  PlaceId source = b.add_place("source");
  PlaceId sink = b.add_place("sink");
  std::size_t v = 0;
  for (const auto& variant : training.variants()) {
    ++v;
    if (variant.empty()) {
      TransitionId t = b.add_transition(std::nullopt, "tau_v" + std::to_string(v));
      b.add_input(t, source);
      b.add_output(t, sink);
      continue;
    }
    PlaceId prev = source;
    for (std::size_t i = 0; i < variant.size(); ++i) {
      TransitionId t = b.add_transition(variant[i]);
      b.add_input(t, prev);
      if (i + 1 == variant.size()) {
        b.add_output(t, sink);
      } else {
        prev = b.add_place("v" + std::to_string(v) + "_" + std::to_string(i + 1));
        b.add_output(t, prev);
      }
    }
  }
  b.mark_initial(source);
  b.mark_final(sink);
  return b.build();
}

}  // namespace pdbench
