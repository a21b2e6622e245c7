#pragma once

#include <optional>
#include <vector>

#include "fixrev/stability.hpp"
#include "fixrev/taxonomy.hpp"

namespace fixrev {

// Seal checkpoints. Submission/Revision/Acceptance are the in-review flow
// points (4, 4', 14); PostPublication covers audits of already-published
// data against its acceptance seal.
enum class CheckpointKind { Submission, Revision, Acceptance, PostPublication };

std::string_view to_string(CheckpointKind kind);
CheckpointKind checkpoint_kind_from_string(std::string_view s);
std::string_view checkpoint_flow_label(CheckpointKind kind);  // "4", "4'", "14", "post"

enum class FetchStatus { Ok, NotFound, TransportFailed };

// Everything classification needs about one seal-and-compare step.
// content_changed/raw_changed are relative to the comparison baseline (the
// submission seal, or the latest authorized revision seal; the acceptance
// seal for post-publication audits). revision_declared/approved refer to a
// data-revision declaration covering the baseline-to-stage interval that no
// earlier seal has consumed.
struct ClassifyContext {
    CheckpointKind stage = CheckpointKind::Submission;
    bool content_changed = false;
    bool raw_changed = false;
    bool revision_declared = false;
    bool revision_approved = false;
    StabilityVerdict stability = StabilityVerdict::Stable;
    FetchStatus fetch = FetchStatus::Ok;
};

// Maps one context to at most one finding draft (category + derived
// metadata; id/evidence/timestamps are the caller's). Rules, in priority
// order:
//   1. failed fetch                          → Data loss
//   2. drifting content within one probe     → Data falsification
//   3. content changed vs baseline:
//        in-review stages, no approved
//        covering revision                   → Unauthorized change
//        in-review stages, approved covering
//        revision                            → none (authorized)
//        post-publication stage              → Post-acceptance change
//   4. container-only difference             → nondeterminism advisory
//   5. otherwise                             → none
// Throws InconsistentContext for impossible field combinations.
std::optional<ManipulationFinding> classify(const ClassifyContext& context);

struct Notification {
    Role recipient;
    std::string message_kind;
};

// Routing for an Open finding: the editor always hears about it; suspected
// repository-side incidents additionally notify the repository's
// management. Emitted as records; delivery is out of scope.
std::vector<Notification> route_incident(const ManipulationFinding& finding);

}  // namespace fixrev
