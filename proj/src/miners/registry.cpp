#include <exception>

#include "pdbench/errors.hpp"
#include "pdbench/miners.hpp"

namespace pdbench {

namespace {

template <PetriNet (*F)(const EventLog&)>
PetriNet plain(const EventLog& log, const std::map<std::string, std::string>&) {
  return F(log);
}

MinerRegistry make_builtin() {
  MinerRegistry r;
  r.add("alpha_plus", plain<miner_alpha_plus>);
  r.add("inductive_basic", plain<miner_inductive_basic>);
  r.add("flower", plain<miner_flower>);
  r.add("tracelog", plain<miner_tracelog>);
  r.reserve("heuristics");
  r.reserve("ilp");
  return r;
}

}  // namespace

const MinerRegistry& MinerRegistry::builtin() {
  static const MinerRegistry registry = make_builtin();
  return registry;
}

void MinerRegistry::add(const std::string& name, MinerFn fn, std::set<std::string> parameters) {
  entries_[name] = Entry{std::move(fn), std::move(parameters)};
}

void MinerRegistry::reserve(const std::string& name) { entries_[name] = Entry{}; }

bool MinerRegistry::implemented(const std::string& name) const {
  auto it = entries_.find(name);
  return it != entries_.end() && static_cast<bool>(it->second.fn);
}

std::vector<std::string> MinerRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, entry] : entries_) out.push_back(name);
  return out;
}

void MinerRegistry::check(const MinerSpec& spec) const {
  auto it = entries_.find(spec.name);
  if (it == entries_.end()) throw ConfigInvalid("unknown miner '" + spec.name + "'");
  for (const auto& [key, value] : spec.parameters)
    if (!it->second.parameters.count(key))
      throw ConfigInvalid("miner '" + spec.name + "' has no parameter '" + key + "'");
}

PetriNet MinerRegistry::discover(const MinerSpec& spec, const EventLog& training) const {
  auto it = entries_.find(spec.name);
  if (it == entries_.end()) throw MinerFailure("unknown miner '" + spec.name + "'");
  if (!it->second.fn)
    throw MinerFailure("miner '" + spec.name + "' is reserved but not implemented");
  if (training.empty()) throw MinerFailure("miner '" + spec.name + "': empty training log");
  try {
    PetriNet net = it->second.fn(training, spec.parameters);
    net.validate();
    return net;
  } catch (const MinerFailure&) {
    throw;
  } catch (const std::exception& e) {
    throw MinerFailure("miner '" + spec.name + "': " + e.what());
  }
}

}  // namespace pdbench
