#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fixrev/digest.hpp"

namespace fixrev {

// A named file payload; the unit build_manifest consumes.
struct FileEntry {
    std::string path;
    std::string content;
};

struct ManifestEntry {
    std::string path;      // normalized, "/"-separated, relative
    Digest digest;         // SHA-256 of the file content
    std::uint64_t size{};  // content byte count

    auto operator<=>(const ManifestEntry&) const = default;
};

// Canonical multi-file identity: entries sorted by path (byte order), plus a
// digest over the canonical text serialization. A dataset compares equal iff
// its manifest_digest compares equal.
class HashManifest {
  public:
    HashManifest();  // empty manifest; manifest_digest = digest of ""

    // Computes digests for each file and assembles the manifest.
    // Throws InvalidPath / DuplicatePath.
    static HashManifest from_files(const std::vector<FileEntry>& files);

    // Assembles from precomputed entries (paths must already be normalized;
    // this still sorts and rejects duplicates).
    static HashManifest from_entries(std::vector<ManifestEntry> entries);

    const std::vector<ManifestEntry>& entries() const noexcept { return entries_; }
    const Digest& manifest_digest() const noexcept { return manifest_digest_; }

    // One line per entry: "<hex><SP><SP><path><LF>", sorted by path;
    // UTF-8, LF endings, no trailing blank line. This exact byte stream is
    // what manifest_digest hashes, and it is sha256sum-compatible.
    std::string canonical_text() const;

    bool operator==(const HashManifest& other) const { return manifest_digest_ == other.manifest_digest_; }

  private:
    std::vector<ManifestEntry> entries_;
    Digest manifest_digest_;
};

// Path normalization for manifest and archive entries: backslashes become
// "/", repeated separators collapse, "." segments drop. Throws InvalidPath
// for empty results, absolute paths, or ".." segments.
std::string normalize_path(std::string_view raw);

// Spec-facing alias for HashManifest::from_files.
HashManifest build_manifest(const std::vector<FileEntry>& files);

}  // namespace fixrev
