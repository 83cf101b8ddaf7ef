// Copyright 2026 The infucb Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef INFUCB_TRACE_HPP
#define INFUCB_TRACE_HPP

#include <bit>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "infucb/instance.hpp"

namespace infucb {

enum class PullSource : std::uint8_t { engine = 0, lucb = 1 };

struct SecondaryPull {
  ArmId arm_id = kNoArm;
  double reward = 0.0;
  friend bool operator==(const SecondaryPull&, const SecondaryPull&) = default;
};

/// One physical pull (plus the same-round J pull of the FWPD variant).
/// arm_id == kNoArm marks a round in which no arm was available.
struct PullRecord {
  std::uint64_t t = 0;
  std::uint32_t bracket_r = 0;
  ArmId arm_id = kNoArm;
  double reward = 0.0;
  bool was_forced_init = false;
  PullSource source = PullSource::engine;
  std::optional<SecondaryPull> secondary;

  [[nodiscard]] bool idle() const { return arm_id == kNoArm; }
  friend bool operator==(const PullRecord&, const PullRecord&) = default;
};

enum class EventKind : std::uint8_t { output_ot = 0, fdr_accept = 1, fwer_accept = 2, fwpd_accept = 3 };

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::output_ot: return "output_Ot";
    case EventKind::fdr_accept: return "fdr_accept";
    case EventKind::fwer_accept: return "fwer_accept";
    case EventKind::fwpd_accept: return "fwpd_accept";
  }
  return "?";
}

inline EventKind event_kind_from_string(const std::string& s) {
  if (s == "output_Ot") return EventKind::output_ot;
  if (s == "fdr_accept") return EventKind::fdr_accept;
  if (s == "fwer_accept") return EventKind::fwer_accept;
  if (s == "fwpd_accept") return EventKind::fwpd_accept;
  throw std::runtime_error("unknown event kind '" + s + "'");
}

/// Emitted after round t. For the accept kinds, arm_ids lists the arms newly
/// added to the accepted set; the set itself is the union of all earlier
/// events of the same kind. For output_Ot, arm_ids holds the new output.
struct RecommendationEvent {
  std::uint64_t t = 0;
  EventKind kind = EventKind::output_ot;
  std::vector<ArmId> arm_ids;
  std::uint32_t bracket_r = 0;
  std::optional<std::uint32_t> p_hat;
  friend bool operator==(const RecommendationEvent&, const RecommendationEvent&) = default;
};

/// 64-bit FNV-1a over a canonical byte encoding of records.
class TraceHasher {
 public:
  void add_u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      add_byte(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }
  void add_double(double v) { add_u64(std::bit_cast<std::uint64_t>(v)); }
  void add_byte(std::uint8_t b) {
    h_ ^= b;
    h_ *= 0x100000001b3ULL;
  }

  void add(const PullRecord& r) {
    add_byte(0x50);
    add_u64(r.t);
    add_u64(r.bracket_r);
    add_u64(r.arm_id);
    add_double(r.reward);
    add_byte(r.was_forced_init ? 1 : 0);
    add_byte(static_cast<std::uint8_t>(r.source));
    if (r.secondary) {
      add_byte(1);
      add_u64(r.secondary->arm_id);
      add_double(r.secondary->reward);
    } else {
      add_byte(0);
    }
  }

  void add(const RecommendationEvent& e) {
    add_byte(0x45);
    add_u64(e.t);
    add_byte(static_cast<std::uint8_t>(e.kind));
    add_u64(e.bracket_r);
    add_u64(e.p_hat ? *e.p_hat + 1ULL : 0ULL);
    add_u64(e.arm_ids.size());
    for (const auto a : e.arm_ids) {
      add_u64(a);
    }
  }

  void add_output(std::uint64_t t, ArmId arm) {
    add_byte(0x4f);
    add_u64(t);
    add_u64(arm);
  }

  [[nodiscard]] std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Trace text format (tab separated, one record per line):
//   # infucb-trace v1
//   P  t  bracket  arm  reward  forced  source  [j_arm  j_reward]
//   E  t  kind  bracket  p_hat|-  arm,arm,...
//   O  t  arm
// Idle rounds write "-" for the arm.

inline void write_pull(std::ostream& out, const PullRecord& r) {
  out << "P\t" << r.t << '\t' << r.bracket_r << '\t';
  if (r.idle()) {
    out << '-';
  } else {
    out << r.arm_id;
  }
  out << '\t' << format_double(r.reward) << '\t' << (r.was_forced_init ? 1 : 0) << '\t'
      << (r.source == PullSource::lucb ? "lucb" : "engine");
  if (r.secondary) {
    out << '\t' << r.secondary->arm_id << '\t' << format_double(r.secondary->reward);
  }
  out << '\n';
}

inline void write_event(std::ostream& out, const RecommendationEvent& e) {
  out << "E\t" << e.t << '\t' << to_string(e.kind) << '\t' << e.bracket_r << '\t';
  if (e.p_hat) {
    out << *e.p_hat;
  } else {
    out << '-';
  }
  out << '\t';
  for (std::size_t i = 0; i < e.arm_ids.size(); ++i) {
    out << (i ? "," : "") << e.arm_ids[i];
  }
  out << '\n';
}

}  // namespace infucb

#endif  // INFUCB_TRACE_HPP
