#include "phasecast/sim/config.hpp"
#include <fstream>

#include <algorithm>
#include <set>
#include <sstream>

#include "phasecast/util/kv.hpp"

namespace phasecast::sim {

double RateProfile::at(int tod) const {
  if (points.empty()) return 0.0;
  double rate = points.front().second;
  for (const auto& [start, r] : points) {
    if (start <= tod) rate = r;
  }
  return rate;
}

const PhaseConfig& IntersectionConfig::phase(PhaseId id) const {
  for (const auto& p : phases) {
    if (p.id == id) return p;
  }
  throw ConfigError("unknown phase id " + std::to_string(id));
}

bool IntersectionConfig::has_phase(PhaseId id) const {
  return std::any_of(phases.begin(), phases.end(), [&](const auto& p) { return p.id == id; });
}

std::vector<PhaseId> IntersectionConfig::ring_group_sequence(int ring, int group) const {
  std::vector<PhaseId> out;
  for (const auto& p : phases) {
    if (p.ring == ring && p.barrier_group == group) out.push_back(p.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> IntersectionConfig::ring_ids() const {
  std::set<int> s;
  for (const auto& p : phases) s.insert(p.ring);
  return {s.begin(), s.end()};
}

std::vector<int> IntersectionConfig::barrier_group_ids() const {
  std::set<int> s;
  for (const auto& p : phases) s.insert(p.barrier_group);
  return {s.begin(), s.end()};
}

void IntersectionConfig::validate() const {
  if (phases.empty()) throw ConfigError("no phases defined");
  if (span_end <= span_start) throw ConfigError("operating span is empty");

  std::set<PhaseId> ids;
  for (const auto& p : phases) {
    if (!ids.insert(p.id).second) throw ConfigError("duplicate phase id " + std::to_string(p.id));
    if (p.min_green <= 0 || p.max_green <= 0 || p.yellow <= 0 || p.all_red < 0 ||
        p.gap_extension <= 0) {
      throw ConfigError("phase " + std::to_string(p.id) + ": durations must be positive seconds");
    }
    if (p.min_green > p.max_green) {
      throw ConfigError("phase " + std::to_string(p.id) + ": min_green > max_green");
    }
  }

  const auto rings = ring_ids();
  const auto groups = barrier_group_ids();
  if (groups.size() < 2) throw ConfigError("need at least two barrier groups");

  // Exactly one coordinated phase per ring, and it must sit in the first
  // barrier group (coordination anchors the cycle there).
  for (int ring : rings) {
    int coordinated = 0;
    for (const auto& p : phases) {
      if (p.ring == ring && p.coordinated) {
        ++coordinated;
        if (p.barrier_group != groups.front()) {
          throw ConfigError("coordinated phase " + std::to_string(p.id) +
                            " must be in barrier group " + std::to_string(groups.front()));
        }
      }
    }
    if (coordinated != 1) {
      throw ConfigError("ring " + std::to_string(ring) + ": expected exactly 1 coordinated phase, got " +
                        std::to_string(coordinated));
    }
  }

  for (const auto& [a, b] : overlaps) {
    const auto& pa = phase(a);
    const auto& pb = phase(b);
    if (pa.ring == pb.ring) throw ConfigError("overlap phases must be on different rings");
    if (pa.barrier_group != pb.barrier_group) {
      throw ConfigError("overlap phases must share a barrier group");
    }
  }

  for (const auto& [veh, ped] : ped_phases) {
    const auto& p = phase(veh);
    if (ped.walk <= 0 || ped.flashing <= 0) {
      throw ConfigError("ped phase on " + std::to_string(veh) + ": walk/flashing must be positive");
    }
    if (ped.walk + ped.flashing > p.max_green && !p.coordinated) {
      throw ConfigError("ped phase on " + std::to_string(veh) +
                        ": walk + flashing exceeds max_green");
    }
  }

  if (tod_schedule.empty()) throw ConfigError("tod_schedule is empty");
  for (std::size_t i = 1; i < tod_schedule.size(); ++i) {
    if (tod_schedule[i].start <= tod_schedule[i - 1].start) {
      throw ConfigError("tod_schedule start times must be strictly increasing");
    }
  }
  if (tod_schedule.front().start > span_start) {
    throw ConfigError("tod_schedule does not cover the start of the operating span");
  }

  for (const auto& entry : tod_schedule) {
    const PlanConfig& plan = entry.plan;
    if (plan.cycle_length <= 0) throw ConfigError("plan cycle_length must be positive");
    if (plan.offset < 0 || plan.offset >= plan.cycle_length) {
      throw ConfigError("plan offset must lie in [0, cycle_length)");
    }
    // Ring consistency: per group, every ring serving the group gets the
    // same window; group windows tile the cycle.
    std::map<int, std::set<int>> group_totals;
    for (int ring : rings) {
      for (int group : groups) {
        int total = 0;
        bool any = false;
        for (PhaseId id : ring_group_sequence(ring, group)) {
          auto it = plan.splits.find(id);
          if (it == plan.splits.end()) {
            throw ConfigError("plan " + std::to_string(plan.plan_id) + ": missing split for phase " +
                              std::to_string(id));
          }
          const auto& p = phase(id);
          if (it->second < p.min_green + p.clearance()) {
            throw ConfigError("plan " + std::to_string(plan.plan_id) + ": split of phase " +
                              std::to_string(id) + " below min_green + clearance");
          }
          auto ped = ped_phases.find(id);
          if (ped != ped_phases.end() &&
              it->second < ped->second.walk + ped->second.flashing + p.clearance()) {
            throw ConfigError("plan " + std::to_string(plan.plan_id) + ": split of phase " +
                              std::to_string(id) + " cannot contain walk + flashing + clearance");
          }
          total += it->second;
          any = true;
        }
        if (any) group_totals[group].insert(total);
      }
    }
    int cycle = 0;
    for (int group : groups) {
      auto it = group_totals.find(group);
      if (it == group_totals.end()) throw ConfigError("barrier group with no phases");
      if (it->second.size() != 1) {
        throw ConfigError("plan " + std::to_string(plan.plan_id) + ": rings disagree on group " +
                          std::to_string(group) + " window length");
      }
      cycle += *it->second.begin();
    }
    if (cycle != plan.cycle_length) {
      throw ConfigError("plan " + std::to_string(plan.plan_id) + ": splits sum to " +
                        std::to_string(cycle) + ", cycle_length is " +
                        std::to_string(plan.cycle_length));
    }
  }

  std::set<int> det_ids;
  for (const auto& d : detectors) {
    if (!det_ids.insert(d.id).second) {
      throw ConfigError("duplicate detector id " + std::to_string(d.id));
    }
    if (!has_phase(d.phase)) {
      throw ConfigError("detector " + std::to_string(d.id) + " owned by unknown phase");
    }
    if (!arrivals.count(d.approach)) {
      throw ConfigError("detector " + std::to_string(d.id) + ": no arrival profile for approach " +
                        d.approach);
    }
  }

  if (corruption.dropout_prob < 0 || corruption.dropout_prob > 1 ||
      corruption.duplicate_prob < 0 || corruption.duplicate_prob > 1) {
    throw ConfigError("feed corruption probabilities must lie in [0,1]");
  }
  if (saturation_flow <= 0) throw ConfigError("saturation_flow must be positive");
}

const PlanConfig& build_plan(const IntersectionConfig& config, int time_of_day) {
  if (time_of_day < 0 || time_of_day >= kSecondsPerDay) {
    throw UncoveredTimeError("time of day out of range: " + std::to_string(time_of_day));
  }
  const PlanConfig* found = nullptr;
  for (const auto& entry : config.tod_schedule) {
    if (entry.start <= time_of_day) found = &entry.plan;
  }
  if (!found) {
    throw UncoveredTimeError("tod_schedule has no entry covering " +
                             format_time_of_day(time_of_day));
  }
  return *found;
}

namespace {

RateProfile parse_profile(const std::string& text, const std::string& key) {
  // "06:00 0.12, 09:00 0.05" — pairs of start time and per-second rate.
  RateProfile profile;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::istringstream pair(item);
    std::string at, rate;
    if (!(pair >> at >> rate)) throw ConfigError(key + ": expected `HH:MM rate` pairs");
    profile.points.emplace_back(parse_time_of_day(at), std::stod(rate));
  }
  if (profile.points.empty()) throw ConfigError(key + ": empty rate profile");
  for (std::size_t i = 1; i < profile.points.size(); ++i) {
    if (profile.points[i].first <= profile.points[i - 1].first) {
      throw ConfigError(key + ": profile times must be increasing");
    }
  }
  return profile;
}

}  // namespace

IntersectionConfig parse_intersection_config(const std::string& text, const std::string& origin) {
  KvFile kv = KvFile::parse_text(text, origin);
  IntersectionConfig cfg;
  cfg.name = kv.get_or("name", "intersection");
  cfg.span_start = parse_time_of_day(kv.get_or("span.start", "06:00"));
  cfg.span_end = parse_time_of_day(kv.get_or("span.end", "22:00"));
  cfg.saturation_flow = kv.get_double_or("saturation_flow", 0.5);
  cfg.corruption.dropout_prob = kv.get_double_or("feed.dropout_prob", 0.0);
  cfg.corruption.duplicate_prob = kv.get_double_or("feed.duplicate_prob", 0.0);

  // Phases: every `phase.<id>.ring` line introduces one.
  for (const std::string& key : kv.keys_with_prefix("phase.")) {
    if (key.size() < 7 || key.substr(key.size() - 5) != ".ring") continue;
    std::string id_str = key.substr(6, key.size() - 6 - 5);
    PhaseConfig p;
    p.id = std::stoi(id_str);
    const std::string base = "phase." + id_str + ".";
    p.ring = static_cast<int>(kv.get_int(base + "ring"));
    p.barrier_group = static_cast<int>(kv.get_int(base + "barrier_group"));
    p.min_green = static_cast<int>(kv.get_int(base + "min_green"));
    p.max_green = static_cast<int>(kv.get_int(base + "max_green"));
    p.yellow = static_cast<int>(kv.get_int(base + "yellow"));
    p.all_red = static_cast<int>(kv.get_int(base + "all_red"));
    p.gap_extension = static_cast<int>(kv.get_int(base + "gap_extension"));
    p.coordinated = kv.has(base + "coordinated") ? kv.get_bool(base + "coordinated") : false;
    cfg.phases.push_back(p);
  }
  std::sort(cfg.phases.begin(), cfg.phases.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });

  for (const std::string& v : kv.get_all("overlap")) {
    std::istringstream in(v);
    std::string a, b;
    if (!std::getline(in, a, ',') || !std::getline(in, b)) {
      throw ConfigError("overlap: expected `a,b`");
    }
    cfg.overlaps.emplace_back(std::stoi(a), std::stoi(b));
  }

  for (const std::string& key : kv.keys_with_prefix("ped.")) {
    if (key.substr(key.size() - 5) != ".walk") continue;
    std::string id_str = key.substr(4, key.size() - 4 - 5);
    PedPhaseConfig ped;
    ped.vehicle_phase = std::stoi(id_str);
    ped.walk = static_cast<int>(kv.get_int("ped." + id_str + ".walk"));
    ped.flashing = static_cast<int>(kv.get_int("ped." + id_str + ".flashing"));
    cfg.ped_phases[ped.vehicle_phase] = ped;
  }

  for (const std::string& key : kv.keys_with_prefix("detector.")) {
    if (key.substr(key.size() - 6) != ".phase") continue;
    std::string id_str = key.substr(9, key.size() - 9 - 6);
    DetectorConfig d;
    d.id = std::stoi(id_str);
    const std::string base = "detector." + id_str + ".";
    d.approach = kv.get(base + "approach");
    d.lane = static_cast<int>(kv.get_int_or(base + "lane", 1));
    d.phase = static_cast<int>(kv.get_int(base + "phase"));
    d.share = kv.get_double_or(base + "share", 1.0);
    if (d.share <= 0) throw ConfigError("detector " + id_str + ": share must be positive");
    cfg.detectors.push_back(d);
  }
  std::sort(cfg.detectors.begin(), cfg.detectors.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });

  for (const std::string& key : kv.keys_with_prefix("plan.")) {
    if (key.substr(key.size() - 6) != ".start") continue;
    std::string id_str = key.substr(5, key.size() - 5 - 6);
    TodPlanEntry entry;
    entry.start = parse_time_of_day(kv.get("plan." + id_str + ".start"));
    entry.plan.plan_id = std::stoi(id_str);
    entry.plan.cycle_length = static_cast<int>(kv.get_int("plan." + id_str + ".cycle"));
    entry.plan.offset = static_cast<int>(kv.get_int_or("plan." + id_str + ".offset", 0));
    for (const auto& p : cfg.phases) {
      const std::string split_key = "plan." + id_str + ".split." + std::to_string(p.id);
      entry.plan.splits[p.id] = static_cast<int>(kv.get_int(split_key));
    }
    cfg.tod_schedule.push_back(entry);
  }
  std::sort(cfg.tod_schedule.begin(), cfg.tod_schedule.end(),
            [](const auto& a, const auto& b) { return a.start < b.start; });

  for (const std::string& key : kv.keys_with_prefix("arrival.")) {
    cfg.arrivals[key.substr(8)] = parse_profile(kv.get(key), key);
  }
  for (const std::string& key : kv.keys_with_prefix("ped_calls.")) {
    cfg.ped_call_rates[std::stoi(key.substr(10))] = parse_profile(kv.get(key), key);
  }
  for (const std::string& key : kv.keys_with_prefix("free_speed.")) {
    cfg.free_speed[key.substr(11)] = kv.get_double(key);
  }

  cfg.validate();
  return cfg;
}

IntersectionConfig load_intersection_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open intersection config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_intersection_config(ss.str(), path);
}

}  // namespace phasecast::sim
