#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "fixrev/manifest.hpp"
#include "fixrev/zip.hpp"

namespace fixrev {

enum class StabilityVerdict { Stable, ContainerNondeterminism, ContentDrift };

std::string_view to_string(StabilityVerdict v);
StabilityVerdict stability_verdict_from_string(std::string_view s);

struct StabilityResult {
    StabilityVerdict verdict = StabilityVerdict::Stable;
    std::vector<Digest> raw_digests;             // one per fetch, in fetch order
    std::vector<HashManifest> content_manifests; // one per fetch (normalized or raw fallback)
    bool payload_is_archive = false;             // all fetches parsed as ZIP
};

// Content identity of an arbitrary payload: ZIP archives normalize to their
// entry manifest; anything else becomes a one-entry manifest keyed "data".
// Both seal-time records and report verification go through this, so the two
// sides always compare like with like.
struct ContentIdentity {
    HashManifest manifest;
    bool is_archive = false;
};
ContentIdentity content_identity(std::string_view bytes);

// Re-derives the verdict from the digests/manifests alone (the invariant the
// probe must satisfy).
StabilityVerdict derive_verdict(const std::vector<Digest>& raw_digests,
                                const std::vector<HashManifest>& content_manifests);

// What a sealed record retains of the probe: verdict plus the digests needed
// to re-derive it. Round-trips exactly through JSON.
struct StabilitySummary {
    StabilityVerdict verdict = StabilityVerdict::Stable;
    std::vector<Digest> raw_digests;
    std::vector<Digest> content_manifest_digests;
    bool payload_is_archive = false;
};

StabilitySummary summarize(const StabilityResult& result);

// Fetches the same link n times in sequence (ordering is part of the
// contract; repository state may move between fetches). Throws FetchFailed
// with the failing attempt index in the message; n must be >= 2.
using FetchBytesFn = std::function<std::string(int attempt)>;
StabilityResult probe_stability(const FetchBytesFn& fetch, int n);

}  // namespace fixrev
