#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fixrev/digest.hpp"
#include "fixrev/taxonomy.hpp"

namespace fixrev {

// One appended fact about a review case. Events form a hash chain:
// this_digest = SHA-256 of the event's canonical bytes (all fields except
// this_digest), and prev_digest repeats the previous event's this_digest
// (the empty-input digest at genesis). seq starts at 1 and increments by 1.
struct ReviewEvent {
    std::uint64_t seq = 0;
    std::string case_id;
    Role actor_role = Role::Secretariat;
    std::string actor;
    std::string event_type;
    nlohmann::json payload;  // integers and strings only — floats would break canonical form
    std::int64_t at = 0;     // epoch seconds
    Digest prev_digest;
    Digest this_digest;
};

// Canonical line form: one JSON object per event, keys sorted, no
// insignificant whitespace, UTF-8, LF terminated. These exact bytes (minus
// the this_digest member) are what the chain hashes.
std::string canonical_event_bytes(const ReviewEvent& event);  // without this_digest
nlohmann::json event_to_json(const ReviewEvent& event);       // with this_digest
ReviewEvent event_from_json(const nlohmann::json& j);

class EventLog {
  public:
    static Digest genesis() { return digest_bytes(""); }

    // Builds, chains and stores the next event.
    const ReviewEvent& append(std::string case_id, Role actor_role, std::string actor,
                              std::string event_type, nlohmann::json payload, std::int64_t at);

    const std::vector<ReviewEvent>& events() const noexcept { return events_; }
    bool empty() const noexcept { return events_.empty(); }
    std::size_t size() const noexcept { return events_.size(); }

    std::string to_jsonl() const;

    // Parses and verifies: any reserialization difference or digest mismatch
    // is ChainBroken (with the offending line); a clean event whose seq
    // skips ahead is GapInSequence.
    static EventLog from_jsonl(std::string_view text);

  private:
    std::vector<ReviewEvent> events_;
};

}  // namespace fixrev
