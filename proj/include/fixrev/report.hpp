#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fixrev/workflow.hpp"

namespace fixrev {

inline constexpr std::string_view kReportSchemaVersion = "1";

struct ReportIdentity {
    std::string name;
    std::string affiliation;
};

struct ReportComment {
    Role author_role = Role::Referee;
    std::string text;
    std::optional<ReportIdentity> identity;  // present iff the writer consented
};

struct ReportRound {
    int round_number = 1;
    std::vector<ReportComment> comments;
};

struct ReportDataSection {
    std::string permanent_link;
    Digest raw_digest;
    HashManifest content_manifest;
    std::string algorithm = std::string(kDigestAlgorithm);
};

struct ReportIncident {
    std::string category_label;
    std::string role;
    std::string flow_ref;
    std::string measure;
    bool table_row = true;
    std::string verdict;
    std::string note;
};

// The publishable document: every comment of the review, consent-gated
// identities, the accepted data's hashes, and its permanent link.
struct PeerReviewReport {
    std::string schema_version = std::string(kReportSchemaVersion);
    std::string case_id;
    nlohmann::json manuscript_meta = nlohmann::json::object();
    std::vector<ReportRound> rounds;
    std::string editor_name;
    ReportDataSection data_section;
    std::vector<ReportIncident> incident_annex;  // resolved findings only
    std::int64_t published_at = 0;
    std::string published_at_iso;  // derived from published_at, UTC
};

// Builds the report from a case in SealedAcceptance or Published state.
// Deterministic: the same case yields byte-identical serializations.
// Throws InvalidState / MissingAcceptanceRecord.
PeerReviewReport generate_report(const ReviewCase& c);

// Canonical bytes: single-line JSON, sorted keys, UTF-8, trailing LF.
std::string serialize_report(const PeerReviewReport& report);

// Throws SchemaInvalid with a JSON-pointer-style path on malformed input.
PeerReviewReport parse_report(std::string_view bytes);

enum class VerifyMode { Strict, ContentNormalized };

enum class VerifyVerdict { Verified, VerifiedContentOnly, Mismatch, Inaccessible };

std::string_view to_string(VerifyVerdict v);

struct VerificationOutcome {
    VerifyVerdict verdict = VerifyVerdict::Inaccessible;
    Digest expected_raw;
    std::optional<Digest> actual_raw;
    Digest expected_content;
    std::optional<Digest> actual_content;
    std::string detail;
    std::int64_t checked_at = 0;
};

// End-user check: fetch the report's permanent link and compare digests.
// Strict compares the raw container only; ContentNormalized falls back to
// the content manifest when the container differs.
VerificationOutcome verify_against_report(const PeerReviewReport& report,
                                          const std::function<std::string()>& fetch_bytes,
                                          VerifyMode mode, Clock* clock = nullptr);

// Convenience: fetch through a Connector.
VerificationOutcome verify_against_report(const PeerReviewReport& report, Connector& connector,
                                          VerifyMode mode, Clock* clock = nullptr);

// "<case_id>.review-report.json"
std::string report_file_name(const std::string& case_id);

}  // namespace fixrev
