#include "fixrev/events.hpp"

#include "fixrev/errors.hpp"

namespace fixrev {

namespace {

nlohmann::json event_body(const ReviewEvent& e) {
    return nlohmann::json{
        {"actor", e.actor},
        {"actor_role", std::string(role_label(e.actor_role))},
        {"at", e.at},
        {"case_id", e.case_id},
        {"event_type", e.event_type},
        {"payload", e.payload},
        {"prev_digest", e.prev_digest.hex()},
        {"seq", e.seq},
    };
}

}  // namespace

std::string canonical_event_bytes(const ReviewEvent& event) { return event_body(event).dump(); }

nlohmann::json event_to_json(const ReviewEvent& event) {
    nlohmann::json j = event_body(event);
    j["this_digest"] = event.this_digest.hex();
    return j;
}

ReviewEvent event_from_json(const nlohmann::json& j) {
    ReviewEvent e;
    e.seq = j.at("seq").get<std::uint64_t>();
    e.case_id = j.at("case_id").get<std::string>();
    e.actor_role = role_from_label(j.at("actor_role").get<std::string>());
    e.actor = j.at("actor").get<std::string>();
    e.event_type = j.at("event_type").get<std::string>();
    e.payload = j.at("payload");
    e.at = j.at("at").get<std::int64_t>();
    e.prev_digest = Digest::from_hex(j.at("prev_digest").get<std::string>());
    e.this_digest = Digest::from_hex(j.at("this_digest").get<std::string>());
    return e;
}

const ReviewEvent& EventLog::append(std::string case_id, Role actor_role, std::string actor,
                                    std::string event_type, nlohmann::json payload, std::int64_t at) {
    ReviewEvent e;
    e.seq = events_.size() + 1;
    e.case_id = std::move(case_id);
    e.actor_role = actor_role;
    e.actor = std::move(actor);
    e.event_type = std::move(event_type);
    e.payload = std::move(payload);
    e.at = at;
    e.prev_digest = events_.empty() ? genesis() : events_.back().this_digest;
    e.this_digest = digest_bytes(canonical_event_bytes(e));
    events_.push_back(std::move(e));
    return events_.back();
}

std::string EventLog::to_jsonl() const {
    std::string out;
    for (const auto& e : events_) {
        out += event_to_json(e).dump();
        out += '\n';
    }
    return out;
}

EventLog EventLog::from_jsonl(std::string_view text) {
    EventLog log;
    Digest prev = genesis();
    std::uint64_t expected_seq = 1;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        if (line.empty()) continue;
        ++line_no;

        ReviewEvent e;
        try {
            nlohmann::json j = nlohmann::json::parse(line);
            e = event_from_json(j);
            // The stored line must be the canonical serialization; anything
            // else (reordered keys, stray whitespace, altered bytes) is
            // tampering.
            if (event_to_json(e).dump() != line) {
                throw Error(ErrorCode::ChainBroken,
                            "line " + std::to_string(line_no) + " is not in canonical form");
            }
        } catch (const Error& err) {
            if (err.code() == ErrorCode::ChainBroken) throw;
            // Any field-level failure (bad digest shape, unknown role, wrong
            // type) means the stored line is not an intact event.
            throw Error(ErrorCode::ChainBroken,
                        "line " + std::to_string(line_no) + " unreadable: " + err.what());
        } catch (const std::exception& ex) {
            throw Error(ErrorCode::ChainBroken,
                        "line " + std::to_string(line_no) + " unreadable: " + ex.what());
        }

        if (digest_bytes(canonical_event_bytes(e)) != e.this_digest) {
            throw Error(ErrorCode::ChainBroken,
                        "digest mismatch at seq " + std::to_string(e.seq) + " (line " +
                            std::to_string(line_no) + ")");
        }
        if (e.seq != expected_seq) {
            throw Error(ErrorCode::GapInSequence, "missing seq " + std::to_string(expected_seq));
        }
        if (!(e.prev_digest == prev)) {
            throw Error(ErrorCode::ChainBroken, "chain break at seq " + std::to_string(e.seq));
        }
        prev = e.this_digest;
        ++expected_seq;
        log.events_.push_back(std::move(e));
    }
    return log;
}

}  // namespace fixrev
