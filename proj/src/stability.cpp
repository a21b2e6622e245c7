#include "fixrev/stability.hpp"

#include "fixrev/errors.hpp"

namespace fixrev {

std::string_view to_string(StabilityVerdict v) {
    switch (v) {
        case StabilityVerdict::Stable: return "Stable";
        case StabilityVerdict::ContainerNondeterminism: return "ContainerNondeterminism";
        case StabilityVerdict::ContentDrift: return "ContentDrift";
    }
    return "Stable";
}

StabilityVerdict stability_verdict_from_string(std::string_view s) {
    if (s == "Stable") return StabilityVerdict::Stable;
    if (s == "ContainerNondeterminism") return StabilityVerdict::ContainerNondeterminism;
    if (s == "ContentDrift") return StabilityVerdict::ContentDrift;
    throw Error(ErrorCode::SchemaInvalid, "unknown stability verdict: " + std::string(s));
}

ContentIdentity content_identity(std::string_view bytes) {
    if (zip::looks_like_zip(bytes)) {
        try {
            return ContentIdentity{normalize_archive(bytes, ArchiveFormat::Zip), true};
        } catch (const Error&) {
            // Signature without a parseable archive: identity falls back to
            // the opaque byte stream.
        }
    }
    HashManifest m = HashManifest::from_entries(
        {ManifestEntry{"data", digest_bytes(bytes), static_cast<std::uint64_t>(bytes.size())}});
    return ContentIdentity{std::move(m), false};
}

StabilityVerdict derive_verdict(const std::vector<Digest>& raw_digests,
                                const std::vector<HashManifest>& content_manifests) {
    bool raw_equal = true;
    for (const auto& d : raw_digests) {
        if (!(d == raw_digests.front())) raw_equal = false;
    }
    if (raw_equal) return StabilityVerdict::Stable;

    bool content_equal = !content_manifests.empty();
    for (const auto& m : content_manifests) {
        if (!(m == content_manifests.front())) content_equal = false;
    }
    return content_equal ? StabilityVerdict::ContainerNondeterminism : StabilityVerdict::ContentDrift;
}

StabilitySummary summarize(const StabilityResult& result) {
    StabilitySummary s;
    s.verdict = result.verdict;
    s.raw_digests = result.raw_digests;
    for (const auto& m : result.content_manifests) {
        s.content_manifest_digests.push_back(m.manifest_digest());
    }
    s.payload_is_archive = result.payload_is_archive;
    return s;
}

StabilityResult probe_stability(const FetchBytesFn& fetch, int n) {
    if (n < 2) {
        throw Error(ErrorCode::FetchFailed, "probe requires at least 2 fetches, got " + std::to_string(n));
    }
    StabilityResult result;
    result.payload_is_archive = true;
    for (int attempt = 1; attempt <= n; ++attempt) {
        std::string bytes;
        try {
            bytes = fetch(attempt);
        } catch (const Error& e) {
            throw Error(ErrorCode::FetchFailed,
                        "fetch attempt " + std::to_string(attempt) + " failed: " + e.what(), e.cause());
        }
        result.raw_digests.push_back(digest_bytes(bytes));
        ContentIdentity identity = content_identity(bytes);
        result.payload_is_archive = result.payload_is_archive && identity.is_archive;
        result.content_manifests.push_back(std::move(identity.manifest));
    }
    result.verdict = derive_verdict(result.raw_digests, result.content_manifests);
    return result;
}

}  // namespace fixrev
