#include "fixrev/detection.hpp"

#include "fixrev/errors.hpp"

namespace fixrev {

std::string_view to_string(CheckpointKind kind) {
    switch (kind) {
        case CheckpointKind::Submission: return "submission";
        case CheckpointKind::Revision: return "revision";
        case CheckpointKind::Acceptance: return "acceptance";
        case CheckpointKind::PostPublication: return "post-publication";
    }
    return "submission";
}

CheckpointKind checkpoint_kind_from_string(std::string_view s) {
    if (s == "submission") return CheckpointKind::Submission;
    if (s == "revision") return CheckpointKind::Revision;
    if (s == "acceptance") return CheckpointKind::Acceptance;
    if (s == "post-publication") return CheckpointKind::PostPublication;
    throw Error(ErrorCode::SchemaInvalid, "unknown checkpoint kind: " + std::string(s));
}

std::string_view checkpoint_flow_label(CheckpointKind kind) {
    switch (kind) {
        case CheckpointKind::Submission: return "4";
        case CheckpointKind::Revision: return "4'";
        case CheckpointKind::Acceptance: return "14";
        case CheckpointKind::PostPublication: return "post";
    }
    return "4";
}

std::optional<ManipulationFinding> classify(const ClassifyContext& context) {
    // A failed fetch carries no digests; nothing else is knowable.
    if (context.fetch != FetchStatus::Ok) {
        ManipulationFinding f;
        f.category = FindingCategory::DataLoss;
        return f;
    }

    if (context.revision_approved && !context.revision_declared) {
        throw Error(ErrorCode::InconsistentContext, "a revision cannot be approved but undeclared");
    }
    if (context.stage == CheckpointKind::Submission) {
        // The first seal has no baseline, and no revision can predate
        // submission.
        if (context.content_changed || context.raw_changed) {
            throw Error(ErrorCode::InconsistentContext, "submission seal has no comparison baseline");
        }
        if (context.revision_declared || context.revision_approved) {
            throw Error(ErrorCode::InconsistentContext, "no revision can exist at submission time");
        }
    }
    if (context.content_changed && !context.raw_changed) {
        throw Error(ErrorCode::InconsistentContext, "content cannot change while raw bytes match");
    }

    ManipulationFinding f;
    if (context.stability == StabilityVerdict::ContentDrift) {
        // The repository served different content within a single probe:
        // repository-side falsification pending investigation.
        f.category = FindingCategory::DataFalsification;
        return f;
    }
    if (context.content_changed) {
        if (context.stage == CheckpointKind::PostPublication) {
            f.category = FindingCategory::PostAcceptanceChange;
            return f;
        }
        if (context.revision_declared && context.revision_approved) {
            return std::nullopt;  // authorized change; the baseline moves instead
        }
        f.category = FindingCategory::UnauthorizedChangeDuringReview;
        return f;
    }
    if (context.stability == StabilityVerdict::ContainerNondeterminism || context.raw_changed) {
        f.category = FindingCategory::ContainerNondeterminismAdvisory;
        return f;
    }
    return std::nullopt;
}

std::vector<Notification> route_incident(const ManipulationFinding& finding) {
    if (finding.disposition != Disposition::Open) {
        throw Error(ErrorCode::AlreadyResolved, "only Open findings are routed");
    }
    std::vector<Notification> out;
    out.push_back(Notification{Role::Editor, "finding-raised"});
    switch (finding.category) {
        case FindingCategory::DataLoss:
        case FindingCategory::DataFalsification:
        case FindingCategory::ContainerNondeterminismAdvisory:
            out.push_back(Notification{Role::DataRepository, "repository-incident"});
            break;
        default:
            break;
    }
    return out;
}

}  // namespace fixrev
