#include "fixrev/report.hpp"

#include <algorithm>
#include <map>

#include "fixrev/errors.hpp"

namespace fixrev {

namespace {

nlohmann::json report_to_json(const PeerReviewReport& r) {
    nlohmann::json rounds = nlohmann::json::array();
    for (const auto& round : r.rounds) {
        nlohmann::json comments = nlohmann::json::array();
        for (const auto& c : round.comments) {
            nlohmann::json j{{"role", std::string(role_label(c.author_role))},
                             {"text", c.text},
                             {"identity", nullptr}};
            if (c.identity) {
                j["identity"] = {{"name", c.identity->name}, {"affiliation", c.identity->affiliation}};
            }
            comments.push_back(std::move(j));
        }
        rounds.push_back({{"round_number", round.round_number}, {"comments", std::move(comments)}});
    }

    nlohmann::json annex = nlohmann::json::array();
    for (const auto& i : r.incident_annex) {
        annex.push_back({{"category", i.category_label},
                         {"role", i.role},
                         {"flow_ref", i.flow_ref},
                         {"measure", i.measure},
                         {"table_row", i.table_row},
                         {"verdict", i.verdict},
                         {"note", i.note}});
    }

    return nlohmann::json{
        {"schema_version", r.schema_version},
        {"case_id", r.case_id},
        {"manuscript_meta", r.manuscript_meta},
        {"rounds", std::move(rounds)},
        {"editor_name", r.editor_name},
        {"data_section",
         {{"permanent_link", r.data_section.permanent_link},
          {"raw_digest", r.data_section.raw_digest.hex()},
          {"content_manifest", manifest_to_json(r.data_section.content_manifest)},
          {"algorithm", r.data_section.algorithm}}},
        {"incident_annex", std::move(annex)},
        {"published_at", r.published_at},
        {"published_at_iso", r.published_at_iso},
    };
}

[[noreturn]] void schema_fail(const std::string& path, const std::string& why) {
    throw Error(ErrorCode::SchemaInvalid, path + ": " + why);
}

const nlohmann::json& need(const nlohmann::json& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) schema_fail(path + "/" + key, "missing");
    return j.at(key);
}

std::string need_string(const nlohmann::json& j, const char* key, const std::string& path) {
    const auto& v = need(j, key, path);
    if (!v.is_string()) schema_fail(path + "/" + key, "expected a string");
    return v.get<std::string>();
}

std::int64_t need_int(const nlohmann::json& j, const char* key, const std::string& path) {
    const auto& v = need(j, key, path);
    if (!v.is_number_integer()) schema_fail(path + "/" + key, "expected an integer");
    return v.get<std::int64_t>();
}

}  // namespace

std::string_view to_string(VerifyVerdict v) {
    switch (v) {
        case VerifyVerdict::Verified: return "Verified";
        case VerifyVerdict::VerifiedContentOnly: return "VerifiedContentOnly";
        case VerifyVerdict::Mismatch: return "Mismatch";
        case VerifyVerdict::Inaccessible: return "Inaccessible";
    }
    return "Inaccessible";
}

std::string report_file_name(const std::string& case_id) { return case_id + ".review-report.json"; }

PeerReviewReport generate_report(const ReviewCase& c) {
    if (c.state != CaseState::SealedAcceptance && c.state != CaseState::Published) {
        throw Error(ErrorCode::InvalidState, "reports are generated after the acceptance seal, case is " +
                                                 std::string(to_string(c.state)));
    }
    const HashRecord* acceptance = c.latest_record(CheckpointKind::Acceptance);
    if (!acceptance) {
        throw Error(ErrorCode::MissingAcceptanceRecord, "case has no acceptance record");
    }

    PeerReviewReport r;
    r.case_id = c.case_id;
    r.manuscript_meta = c.manuscript_meta;

    // A commenter's identity is disclosed iff their latest recorded consent
    // flag is true.
    std::map<std::string, bool> consent;
    for (const auto& cm : c.comments) consent[cm.actor] = cm.identity_consent;

    std::map<int, ReportRound> rounds;
    for (const auto& cm : c.comments) {
        ReportRound& round = rounds[cm.round];
        round.round_number = cm.round;
        ReportComment rc;
        rc.author_role = cm.author_role;
        rc.text = cm.text;
        if (consent[cm.actor]) {
            const Participant* p = c.find_participant(cm.actor);
            rc.identity = ReportIdentity{cm.actor, p ? p->affiliation : ""};
        }
        round.comments.push_back(std::move(rc));
    }
    for (auto& [_, round] : rounds) r.rounds.push_back(std::move(round));

    for (const auto& p : c.participants) {
        if (p.role == Role::Editor) {
            r.editor_name = p.name;  // the name is always disclosed
            break;
        }
    }

    r.data_section.permanent_link = acceptance->source_link;
    r.data_section.raw_digest = acceptance->raw_digest;
    r.data_section.content_manifest = acceptance->content_manifest;

    for (const auto& f : c.findings) {
        if (f.disposition != Disposition::Resolved || !f.resolution) continue;  // never prejudge open inquiries
        const CategoryInfo& info = f.info();
        r.incident_annex.push_back(ReportIncident{std::string(info.label),
                                                  std::string(role_label(info.role)),
                                                  std::string(info.flow_ref),
                                                  std::string(measure_label(info.measure)),
                                                  info.table_row,
                                                  std::string(to_string(f.resolution->verdict)),
                                                  f.resolution->note});
    }

    r.published_at = c.published_at.value_or(acceptance->sealed_at);
    r.published_at_iso = iso8601_utc(r.published_at);
    return r;
}

std::string serialize_report(const PeerReviewReport& report) {
    return report_to_json(report).dump() + "\n";
}

PeerReviewReport parse_report(std::string_view bytes) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes);
    } catch (const std::exception& e) {
        schema_fail("/", std::string("not valid JSON: ") + e.what());
    }
    if (!j.is_object()) schema_fail("/", "expected an object");

    PeerReviewReport r;
    r.schema_version = need_string(j, "schema_version", "");
    if (r.schema_version != kReportSchemaVersion) {
        schema_fail("/schema_version", "unsupported version " + r.schema_version);
    }
    r.case_id = need_string(j, "case_id", "");
    r.manuscript_meta = need(j, "manuscript_meta", "");
    if (!r.manuscript_meta.is_object()) schema_fail("/manuscript_meta", "expected an object");

    const auto& rounds = need(j, "rounds", "");
    if (!rounds.is_array()) schema_fail("/rounds", "expected an array");
    for (std::size_t ri = 0; ri < rounds.size(); ++ri) {
        std::string rpath = "/rounds/" + std::to_string(ri);
        const auto& round_json = rounds[ri];
        if (!round_json.is_object()) schema_fail(rpath, "expected an object");
        ReportRound round;
        round.round_number = static_cast<int>(need_int(round_json, "round_number", rpath));
        const auto& comments = need(round_json, "comments", rpath);
        if (!comments.is_array()) schema_fail(rpath + "/comments", "expected an array");
        for (std::size_t ci = 0; ci < comments.size(); ++ci) {
            std::string cpath = rpath + "/comments/" + std::to_string(ci);
            const auto& cj = comments[ci];
            ReportComment comment;
            try {
                comment.author_role = role_from_label(need_string(cj, "role", cpath));
            } catch (const Error&) {
                schema_fail(cpath + "/role", "unknown role");
            }
            comment.text = need_string(cj, "text", cpath);
            const auto& identity = need(cj, "identity", cpath);
            if (!identity.is_null()) {
                if (!identity.is_object()) schema_fail(cpath + "/identity", "expected null or object");
                comment.identity = ReportIdentity{need_string(identity, "name", cpath + "/identity"),
                                                  need_string(identity, "affiliation", cpath + "/identity")};
            }
            round.comments.push_back(std::move(comment));
        }
        r.rounds.push_back(std::move(round));
    }

    r.editor_name = need_string(j, "editor_name", "");

    const auto& ds = need(j, "data_section", "");
    if (!ds.is_object()) schema_fail("/data_section", "expected an object");
    r.data_section.permanent_link = need_string(ds, "permanent_link", "/data_section");
    try {
        r.data_section.raw_digest = Digest::from_hex(need_string(ds, "raw_digest", "/data_section"));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::SchemaInvalid) throw;
        schema_fail("/data_section/raw_digest", "not a SHA-256 hex digest");
    }
    r.data_section.algorithm = need_string(ds, "algorithm", "/data_section");
    if (r.data_section.algorithm != kDigestAlgorithm) {
        schema_fail("/data_section/algorithm", "unsupported algorithm " + r.data_section.algorithm);
    }
    try {
        r.data_section.content_manifest = manifest_from_json(need(ds, "content_manifest", "/data_section"));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::SchemaInvalid &&
            std::string(e.what()).find("/data_section") != std::string::npos) {
            throw;
        }
        schema_fail("/data_section/content_manifest", e.what());
    }

    const auto& annex = need(j, "incident_annex", "");
    if (!annex.is_array()) schema_fail("/incident_annex", "expected an array");
    for (std::size_t ai = 0; ai < annex.size(); ++ai) {
        std::string apath = "/incident_annex/" + std::to_string(ai);
        const auto& aj = annex[ai];
        ReportIncident incident;
        incident.category_label = need_string(aj, "category", apath);
        incident.role = need_string(aj, "role", apath);
        incident.flow_ref = need_string(aj, "flow_ref", apath);
        incident.measure = need_string(aj, "measure", apath);
        const auto& tr = need(aj, "table_row", apath);
        if (!tr.is_boolean()) schema_fail(apath + "/table_row", "expected a boolean");
        incident.table_row = tr.get<bool>();
        incident.verdict = need_string(aj, "verdict", apath);
        incident.note = need_string(aj, "note", apath);
        r.incident_annex.push_back(std::move(incident));
    }

    r.published_at = need_int(j, "published_at", "");
    r.published_at_iso = need_string(j, "published_at_iso", "");
    return r;
}

VerificationOutcome verify_against_report(const PeerReviewReport& report,
                                          const std::function<std::string()>& fetch_bytes,
                                          VerifyMode mode, Clock* clock) {
    Clock& clk = clock ? *clock : system_clock();
    VerificationOutcome out;
    out.expected_raw = report.data_section.raw_digest;
    out.expected_content = report.data_section.content_manifest.manifest_digest();
    out.checked_at = clk.now();

    std::string bytes;
    try {
        bytes = fetch_bytes();
    } catch (const Error& e) {
        out.verdict = VerifyVerdict::Inaccessible;
        out.detail = e.what();
        return out;
    }

    out.actual_raw = digest_bytes(bytes);
    if (*out.actual_raw == out.expected_raw) {
        out.verdict = VerifyVerdict::Verified;
        out.detail = "raw digest matches the reviewed data";
        return out;
    }
    if (mode == VerifyMode::Strict) {
        out.verdict = VerifyVerdict::Mismatch;
        out.detail = "raw digest differs from the reviewed data";
        return out;
    }
    out.actual_content = content_identity(bytes).manifest.manifest_digest();
    if (*out.actual_content == out.expected_content) {
        out.verdict = VerifyVerdict::VerifiedContentOnly;
        out.detail = "container bytes differ but the decompressed contents match";
    } else {
        out.verdict = VerifyVerdict::Mismatch;
        out.detail = "content manifest differs from the reviewed data";
    }
    return out;
}

VerificationOutcome verify_against_report(const PeerReviewReport& report, Connector& connector,
                                          VerifyMode mode, Clock* clock) {
    return verify_against_report(
        report, [&]() { return connector.download(report.data_section.permanent_link).bytes; }, mode,
        clock);
}

}  // namespace fixrev
